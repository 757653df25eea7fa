#pragma once
// Planted-structure worlds with known ground truth.
//
// Genre clusters sit at random centres. Movies and keywords scatter around
// one centre each. A typecast actor lives next to a single centre; an actor
// with spread s is placed at the centroid of s centres and given a variance
// proportional to how far those centres are spread out. Casts are drawn from
// the top planted persona-similarity scores, so the generated triples follow
// the planted ordering.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "actorgauss/data_model.hpp"
#include "actorgauss/embedding_store.hpp"
#include "actorgauss/evaluation.hpp"

namespace actorgauss {

struct WorldConfig {
    int n_movies = 200;
    int n_actors = 50;
    int n_keywords = 20;
    int n_personae = 5;
    int dim = 10;
    std::vector<int> versatility_spreads{1};  // assigned to actors round-robin
    int n_clusters = 0;                       // 0 = max(5, largest spread)
    int cast_size = 4;
    int keywords_per_movie = 3;
    int candidate_pool = 3;                   // casts come from the top-k scores
    double temperature = 4.0;                 // softmax temperature inside the pool
    double center_scale = 3.0;
    double persona_scale = 2.0;
    double jitter = 0.3;
    double base_variance = 0.5;
    std::array<double, 3> split_ratios{0.70, 0.15, 0.15};
    std::uint64_t seed = 1;

    void validate() const;
};

struct PlantedWorld {
    WorldConfig config;
    ModelParams truth;              // persona mode Topic, spherical
    std::vector<int> actor_spread;  // planted versatility (clusters per actor)
    std::vector<int> movie_cluster;
    Dataset dataset;                // triples carry split tags
};

PlantedWorld generate_planted(const WorldConfig& cfg);

// Every actor pair with distinct spreads, the wider spread as winner.
std::vector<RankedPair> planted_versatility_pairs(const PlantedWorld& world);
// Named pairs, skipping actors that were never cast (they are absent from
// the written catalog).
std::vector<ExpertPair> planted_expert_pairs(const PlantedWorld& world);

struct OracleReport {
    double mean_rank = 0.0;
    double hits_at_10 = 0.0;
    double versatility_accuracy = 0.0;  // percent, NaN-free: 50 when no pairs
    std::size_t n_test = 0;
    std::size_t n_versatility_pairs = 0;
    std::size_t versatility_correct = 0;  // strict wins
};

OracleReport oracle_metrics(const PlantedWorld& world, const ModelParams& trained);
// For models without variances (versatility fields stay at their defaults).
OracleReport oracle_metrics(const PlantedWorld& world, const CastScorer& scorer);

// triples.tsv, pairs.tsv, splits.tsv and expert_pairs.tsv under dir.
void write_world(const PlantedWorld& world, const std::filesystem::path& dir);

}  // namespace actorgauss
