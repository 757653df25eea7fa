#pragma once
// Learnable parameters of the joint Gaussian model.
//
// Every movie, actor and keyword is a diagonal Gaussian (mean + variance).
// Personae are plain translation vectors composed from descriptor vectors
// (topic group, age bucket, gender); they carry no variance.
//
// Storage is a fixed set of row-major tables so that gradients, optimizer
// state and checkpoints can walk all parameters uniformly. In spherical mode
// a variance table has width 1 and the value is broadcast over dimensions.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "actorgauss/data_model.hpp"

namespace actorgauss {

class Table {
public:
    Table() = default;
    Table(std::size_t rows, std::size_t width, double fill = 0.0)
        : rows_(rows), width_(width), data_(rows * width, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t width() const { return width_; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * width_, width_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * width_, width_}; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Table&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t width_ = 0;
    std::vector<double> data_;
};

// Which descriptor families feed the persona translation.
enum class PersonaMode : std::uint8_t {
    None,       // JGE: persona-free similarity
    Topic,      // JGE+T
    AgeGender,  // JGE+AG
    Full,       // JGE+AGT
};

enum class Composition : std::uint8_t { Sum, Concat };

struct ModelConfig {
    int dim = 40;
    double var_min = 1e-4;
    double var_max = 100.0;
    bool spherical = true;
    PersonaMode persona_mode = PersonaMode::Full;
    Composition composition = Composition::Sum;

    void validate() const;
    bool uses_topic() const;
    bool uses_age_gender() const;
    int active_families() const;
    // Width of one descriptor vector: dim for Sum, dim / families for Concat.
    int descriptor_width() const;
};

// Read-only view of one entity.
struct GaussianParam {
    std::span<const double> mean;
    std::span<const double> var;  // length dim, or 1 in spherical mode

    double variance(std::size_t d) const { return var.size() == 1 ? var[0] : var[d]; }
};

enum class Block : std::uint8_t {
    MovieMean,
    MovieVar,
    ActorMean,
    ActorVar,
    KeywordMean,
    KeywordVar,
    Topic,
    Age,
    Gender,
};
inline constexpr std::size_t kBlockCount = 9;

constexpr std::size_t block_index(Block b) { return static_cast<std::size_t>(b); }
bool is_variance_block(Block b);
Block mean_block(EntityKind kind);
Block var_block(EntityKind kind);

struct VocabSizes {
    std::size_t movies = 0;
    std::size_t actors = 0;
    std::size_t keywords = 0;
};

VocabSizes vocab_sizes(const Dataset& d);

using Tables = std::array<Table, kBlockCount>;

struct ModelParams {
    ModelConfig config;
    Tables blocks;

    Table& table(Block b) { return blocks[block_index(b)]; }
    const Table& table(Block b) const { return blocks[block_index(b)]; }

    GaussianParam entity(EntityId id) const;
    GaussianParam movie(std::uint32_t i) const { return entity({EntityKind::Movie, i}); }
    GaussianParam actor(std::uint32_t i) const { return entity({EntityKind::Actor, i}); }
    GaussianParam keyword(std::uint32_t i) const { return entity({EntityKind::Keyword, i}); }
    VocabSizes sizes() const;

    bool operator==(const ModelParams& other) const { return blocks == other.blocks; }
};

// Token -> vector table loaded from a "token v1 v2 ... vD" text file.
struct WordVectors {
    int dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
};

WordVectors load_word_vectors(const std::filesystem::path& path);

struct PretrainedKeywords {
    const WordVectors& vectors;
    std::span<const std::string> keyword_names;
};

// Means uniform in [-0.5/D, 0.5/D]; variances start at 1 and are clipped.
// Keywords found in the pretrained table copy their vector; a multiword name
// ("cold-war", "road_movie", "film noir") sums the vectors of its known words.
ModelParams init_params(const ModelConfig& cfg, const VocabSizes& sizes, std::uint64_t seed,
                        const std::optional<PretrainedKeywords>& pretrained = std::nullopt);

void clip_variances(ModelParams& params);
void clip_variances(ModelParams& params, std::span<const std::uint32_t> rows, Block block);

// Sum mode adds the present, active descriptor vectors; Concat mode lays
// them out in topic/age/gender order with zero blocks for absent fields.
std::vector<double> compose_persona_vector(const ModelParams& params, const PersonaDescriptor& desc);
void compose_persona_vector(const ModelParams& params, const PersonaDescriptor& desc,
                            std::span<double> out);

// One (block,row,offset) slot of the composed persona vector.
struct PersonaSlot {
    Block block;
    std::uint32_t row;
    std::size_t offset;  // position inside the composed vector
};
std::vector<PersonaSlot> persona_slots(const ModelConfig& cfg, const PersonaDescriptor& desc);

// Checkpoint layout (native little-endian):
//   char[4]  "AGEM"
//   u32      version (1)
//   u32      family (0 = gaussian, 1 = transe)
//   u32      dim
//   u64      movies, actors, keywords
//   u32      spherical, persona_mode, composition
//   f64      var_min, var_max
//   then for each of the 9 blocks: u64 rows, u64 width, rows*width f64
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

enum class ModelFamily : std::uint32_t { Gaussian = 0, TransE = 1 };
ModelFamily peek_checkpoint_family(const std::filesystem::path& path);

}  // namespace actorgauss
