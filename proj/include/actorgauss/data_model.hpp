#pragma once
// Entity vocabularies, relation files, filtering and dataset splits.
//
// A catalog is two relation lists:
//   movie-persona-actor triples (one per cast credit)
//   movie-keyword pairs (genres and keywords share one vocabulary)
// Entities are interned in first-appearance order, so ids are stable for a
// given pair of input files.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace actorgauss {

inline constexpr int kTopicGroups = 50;
inline constexpr int kAgeBuckets = 24;
inline constexpr int kGenders = 3;
inline constexpr double kMaxAgeYears = 120.0;

enum class EntityKind : std::uint8_t { Movie, Actor, Keyword };

struct EntityId {
    EntityKind kind = EntityKind::Movie;
    std::uint32_t index = 0;

    auto operator<=>(const EntityId&) const = default;
};

enum class Gender : std::uint8_t { Female, Male, Other };

// Absent fields contribute a zero vector to the composed persona.
struct PersonaDescriptor {
    std::optional<int> topic_group;  // [0, kTopicGroups)
    std::optional<int> age_bucket;   // [0, kAgeBuckets)
    std::optional<Gender> gender;

    auto operator<=>(const PersonaDescriptor&) const = default;
};

struct Triple {
    EntityId movie;
    EntityId actor;
    PersonaDescriptor persona;
    int cast_rank = 1;
    std::optional<double> age_years;  // kept so a catalog can be written back verbatim
};

struct Pair {
    EntityId movie;
    EntityId keyword;
};

enum class Split : std::uint8_t { Train, Val, Test };

// Raised for malformed input files; the message carries "path:line".
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Vocabulary {
public:
    std::uint32_t intern(std::string_view name);
    std::optional<std::uint32_t> find(std::string_view name) const;
    const std::string& name(std::uint32_t index) const { return names_.at(index); }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct Dataset {
    Vocabulary movies;
    Vocabulary actors;
    Vocabulary keywords;
    std::vector<Triple> triples;
    std::vector<Pair> pairs;       // always training data
    std::vector<Split> splits;     // parallel to triples

    std::size_t count(Split s) const;
};

// One expert judgement: winner is more versatile than loser.
struct ExpertPair {
    std::string winner;
    std::string loser;
    int majority_count = 1;
};

struct VersatilitySplit {
    std::vector<std::string> val_actors;
    std::vector<std::string> test_actors;
    std::vector<ExpertPair> val_pairs;
    std::vector<ExpertPair> test_pairs;
};

Gender parse_gender(std::string_view token);
char gender_code(Gender g);

// Maps [0, 120] years to one of 24 five-year buckets; 120 lands in the last one.
int discretize_age(double age_years);

Dataset ingest_catalog(const std::filesystem::path& triples_file,
                       const std::filesystem::path& pairs_file);

// Drops credits below max_cast_rank, then prunes entities with fewer than
// min_relations relations until nothing else changes. Vocabularies are
// compacted, keeping the original relative order.
Dataset filter_entities(const Dataset& d, int min_relations,
                        int max_cast_rank = std::numeric_limits<int>::max());

Dataset split_triples(const Dataset& d, std::array<double, 3> ratios, std::uint64_t seed);

VersatilitySplit split_versatility_actors(const std::vector<std::string>& actors,
                                          const std::vector<ExpertPair>& expert_pairs,
                                          std::uint64_t seed);

// Validation pairs have both endpoints in val_actors; everything else is test.
VersatilitySplit partition_expert_pairs(const std::vector<std::string>& val_actors,
                                        const std::vector<std::string>& test_actors,
                                        const std::vector<ExpertPair>& expert_pairs);

std::vector<ExpertPair> read_expert_pairs(const std::filesystem::path& path);
void write_expert_pairs(const std::vector<ExpertPair>& pairs, const std::filesystem::path& path);

void write_catalog(const Dataset& d, const std::filesystem::path& triples_file,
                   const std::filesystem::path& pairs_file);

// splits file: one "train"/"val"/"test" token per triple, in triple order.
void write_splits(const Dataset& d, const std::filesystem::path& path);
void read_splits(Dataset& d, const std::filesystem::path& path);

std::string_view split_name(Split s);

}  // namespace actorgauss
