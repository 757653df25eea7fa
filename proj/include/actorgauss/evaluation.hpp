#pragma once
// Cast-prediction ranking, versatility agreement, heuristic baselines,
// significance testing and nearest-neighbour queries.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "actorgauss/data_model.hpp"
#include "actorgauss/embedding_store.hpp"
#include "actorgauss/transe.hpp"

namespace actorgauss {

// ---- cast prediction --------------------------------------------------------

// Scores every actor for a (movie, persona) query; higher is better.
class CastScorer {
public:
    virtual ~CastScorer() = default;
    virtual std::size_t actor_count() const = 0;
    virtual void score_actors(std::uint32_t movie, const PersonaDescriptor& desc,
                              std::span<double> out) const = 0;
};

// Persona similarity (reduces to the persona-free form when the model has no persona).
class GaussianScorer final : public CastScorer {
public:
    explicit GaussianScorer(const ModelParams& params) : params_(params) {}
    std::size_t actor_count() const override { return params_.table(Block::ActorMean).rows(); }
    void score_actors(std::uint32_t movie, const PersonaDescriptor& desc,
                      std::span<double> out) const override;

private:
    const ModelParams& params_;
};

class TransEScorer final : public CastScorer {
public:
    explicit TransEScorer(const TransEParams& params) : params_(params) {}
    std::size_t actor_count() const override { return params_.actors.rows(); }
    void score_actors(std::uint32_t movie, const PersonaDescriptor& desc,
                      std::span<double> out) const override;

private:
    const TransEParams& params_;
};

// 1 + number of non-excluded candidates scoring strictly above the truth.
std::size_t rank_of_truth(std::span<const double> scores, std::size_t truth,
                          std::span<const std::uint32_t> excluded = {});

// Known-true actors per (movie, persona), across all splits, for filtered ranking.
class KnownCasts {
public:
    explicit KnownCasts(const Dataset& d);
    std::span<const std::uint32_t> actors(std::uint32_t movie, const PersonaDescriptor& desc) const;

private:
    std::map<std::pair<std::uint32_t, PersonaDescriptor>, std::vector<std::uint32_t>> known_;
};

std::size_t rank_candidates(const CastScorer& scorer, std::uint32_t movie,
                            const PersonaDescriptor& desc, std::uint32_t truth, bool filtered,
                            const KnownCasts* known = nullptr);

struct RankSummary {
    double mean_rank = 0.0;
    double hits_at_k = 0.0;  // percent
};

RankSummary mean_rank_hits(std::span<const std::size_t> ranks, int k);

struct CastReport {
    std::vector<std::size_t> triple_ids;
    std::vector<std::size_t> ranks;
    RankSummary summary;
    int k = 10;
};

CastReport evaluate_cast(const CastScorer& scorer, const Dataset& d, Split split, bool filtered,
                         int k);

// ---- versatility --------------------------------------------------------------

// Mean log-variance over dimensions; higher = more versatile.
double versatility_score(const ModelParams& params, std::uint32_t actor);
std::vector<double> versatility_scores(const ModelParams& params);

struct RankedPair {
    std::uint32_t winner = 0;
    std::uint32_t loser = 0;
    int majority = 1;
};

// Maps names to actor ids; unknown names throw.
std::vector<RankedPair> resolve_pairs(const Vocabulary& actors, const std::vector<ExpertPair>& pairs);

// Winner above loser counts 1, a tie 0.5. Percent.
double pairwise_accuracy(std::span<const double> scores, std::span<const RankedPair> pairs);

// Removes the lowest-majority edges of each cycle until the graph is acyclic.
// A cycle whose edges all share one majority count cannot be broken this way
// and raises std::runtime_error naming the cycle.
std::vector<RankedPair> repair_cycles(std::span<const RankedPair> pairs,
                                      const std::vector<std::string>* names = nullptr);

// A topological order of `nodes` (best first), picking uniformly among the
// ready nodes at every step.
std::vector<std::uint32_t> random_linear_extension(std::span<const std::uint32_t> nodes,
                                                   std::span<const RankedPair> pairs,
                                                   std::mt19937_64& rng);

// Spearman correlation; tied values get their average rank. Returns 0 when
// either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

// Mean Spearman correlation between the model ranking of `nodes` and
// n_sorts random linear extensions of the expert partial order.
double rank_correlation(std::span<const double> scores, std::span<const std::uint32_t> nodes,
                        std::span<const RankedPair> pairs, int n_sorts, std::uint64_t seed);

struct VersatilityReport {
    double pairwise_accuracy = 0.0;
    double rank_correlation = 0.0;
    std::size_t n_pairs = 0;
};

// ---- heuristic baselines --------------------------------------------------------

// Natural-log Shannon entropy of a normalised count vector.
double entropy(std::span<const double> counts);
std::vector<double> entropy_baseline(const std::vector<std::vector<double>>& counts);

// Per-actor counts over the given keyword ids (e.g. genres), one column each.
std::vector<std::vector<double>> keyword_counts(const Dataset& d,
                                                std::span<const std::uint32_t> keyword_ids);
std::vector<std::vector<double>> topic_group_counts(const Dataset& d);
// Counts of each movie's dominant NMF topic (argmax of its W row).
std::vector<std::vector<double>> keyword_topic_counts(const Dataset& d, const Eigen::MatrixXd& w);

Eigen::MatrixXd movie_keyword_matrix(const Dataset& d);

struct NmfResult {
    Eigen::MatrixXd w;  // rows x k
    Eigen::MatrixXd h;  // k x cols
    std::vector<double> objective;  // ||V - WH||_F after each iteration
};

// Lee-Seung multiplicative updates for the Frobenius objective.
NmfResult nmf_topics(const Eigen::MatrixXd& v, int k, int iters, std::uint64_t seed);

// ---- significance -----------------------------------------------------------

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_one_tailed = 0.5;  // H1: mean(a) > mean(b)
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// One-sided binomial tail P(X >= successes) for X ~ Bin(n, 0.5).
double binomial_upper_tail(std::size_t successes, std::size_t n);

// ---- nearest neighbours ------------------------------------------------------

struct Neighbor {
    std::uint32_t actor = 0;
    std::size_t rank = 0;
    double similarity = 0.0;
};

// Other actors by log N(mu_a; mu_b, var_a + var_b), descending; ties by id.
std::vector<Neighbor> nearest_neighbors(const ModelParams& params, std::uint32_t actor,
                                        std::size_t top_n);

// Position of `other` in `actor`'s neighbour list.
std::size_t neighbor_rank(const ModelParams& params, std::uint32_t actor, std::uint32_t other);

}  // namespace actorgauss
