#pragma once
// Raw little-endian checkpoint streams.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "actorgauss/embedding_store.hpp"

namespace actorgauss::detail {

inline constexpr char kMagic[4] = {'A', 'G', 'E', 'M'};
inline constexpr std::uint32_t kVersion = 1;

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
    }

    void put_table(const Table& t) {
        put<std::uint64_t>(t.rows());
        put<std::uint64_t>(t.width());
        out_.write(reinterpret_cast<const char*>(t.data().data()),
                   static_cast<std::streamsize>(t.data().size() * sizeof(double)));
    }

private:
    std::ostream& out_;
};

class BinaryReader {
public:
    BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    template <typename T>
    T get() {
        T value{};
        in_.read(reinterpret_cast<char*>(&value), sizeof(T));
        if (!in_) throw std::runtime_error(source_ + ": truncated checkpoint");
        return value;
    }

    Table get_table() {
        const auto rows = get<std::uint64_t>();
        const auto width = get<std::uint64_t>();
        if (rows > (1ull << 32) || width > (1ull << 20))
            throw std::runtime_error(source_ + ": implausible table shape");
        Table t(rows, width);
        in_.read(reinterpret_cast<char*>(t.data().data()),
                 static_cast<std::streamsize>(t.data().size() * sizeof(double)));
        if (!in_) throw std::runtime_error(source_ + ": truncated checkpoint");
        return t;
    }

    const std::string& source() const { return source_; }

private:
    std::istream& in_;
    std::string source_;
};

inline void write_header(BinaryWriter& w, ModelFamily family, std::uint32_t dim) {
    for (char c : kMagic) w.put(c);
    w.put(kVersion);
    w.put(static_cast<std::uint32_t>(family));
    w.put(dim);
}

// Returns (family, dim) after validating magic and version.
inline std::pair<ModelFamily, std::uint32_t> read_header(BinaryReader& r) {
    char magic[4];
    for (char& c : magic) c = r.get<char>();
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(r.source() + ": not a checkpoint");
    if (r.get<std::uint32_t>() != kVersion)
        throw std::runtime_error(r.source() + ": unsupported checkpoint version");
    const auto family = r.get<std::uint32_t>();
    if (family > 1) throw std::runtime_error(r.source() + ": unknown model family");
    const auto dim = r.get<std::uint32_t>();
    return {static_cast<ModelFamily>(family), dim};
}

}  // namespace actorgauss::detail
