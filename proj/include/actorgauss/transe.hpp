#pragma once
// Point-vector translation baseline: score(h, r, t) = -||h + r - t||.
//
// Relations: one vector per distinct persona combination seen in training
// (restricted to the families of the persona mode), a shared default for
// unseen combinations, and one "has-keyword" relation for movie-keyword pairs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "actorgauss/data_model.hpp"
#include "actorgauss/embedding_store.hpp"
#include "actorgauss/training.hpp"

namespace actorgauss {

enum class Norm : std::uint8_t { L1, L2 };

double transe_score(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, Norm norm);

struct TransEConfig {
    int dim = 40;
    Norm norm = Norm::L2;
    PersonaMode persona_mode = PersonaMode::Full;
};

// (topic, age bucket, gender) with -1 for absent or inactive fields.
using RelationKey = std::tuple<int, int, int>;

struct TransEParams {
    TransEConfig config;
    Table movies;
    Table actors;
    Table keywords;
    Table relations;  // row 0 = default persona relation, row 1 = has-keyword
    std::map<RelationKey, std::uint32_t> relation_index;

    static constexpr std::uint32_t kDefaultRelation = 0;
    static constexpr std::uint32_t kKeywordRelation = 1;

    RelationKey key_of(const PersonaDescriptor& desc) const;
    std::uint32_t relation_of(const PersonaDescriptor& desc) const;

    double triple_score(std::uint32_t movie, const PersonaDescriptor& desc,
                        std::uint32_t actor) const;
    double pair_score(std::uint32_t movie, std::uint32_t keyword) const;

    bool operator==(const TransEParams& o) const {
        return movies == o.movies && actors == o.actors && keywords == o.keywords &&
               relations == o.relations && relation_index == o.relation_index;
    }
};

TransEParams init_transe(const Dataset& d, const TransEConfig& cfg, std::uint64_t seed,
                         bool include_validation = false);

struct TransEResult {
    TransEParams params;
    std::vector<EpochStats> history;
};

// Same epoch loop as the Gaussian trainer (negative sampling, hinge, cosine
// RMSProp); dropout is not used. Entity vectors are renormalised to unit
// length after every update.
TransEResult transe_train(const Dataset& dataset, const TransEConfig& cfg, const TrainConfig& tcfg,
                          const EpochCallback& on_epoch = {});

// Shares the gaussian checkpoint header; family = 1, then:
//   u32 norm, u32 persona_mode, u64 relation count,
//   per relation key: i32 topic, i32 age, i32 gender, u32 row,
//   then tables movies, actors, keywords, relations.
void save_transe_checkpoint(const TransEParams& params, const std::filesystem::path& path);
TransEParams load_transe_checkpoint(const std::filesystem::path& path);

}  // namespace actorgauss
