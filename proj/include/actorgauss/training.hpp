#pragma once
// Margin-ranking training of the joint Gaussian model.
//
// Loss = sum over movie-keyword pairs  g(S(m,k),     S(m,k-))
//      + sum over movie-persona-actor  g(S(m,p,a),   S(m,p,a-))
// with g(s1,s2) = max(0, margin - s1 + s2), negatives resampled and a fresh
// inverted-dropout mask per pair/triple every epoch, RMSProp updates and a
// cosine learning-rate schedule over all mini-batches.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "actorgauss/data_model.hpp"
#include "actorgauss/embedding_store.hpp"

namespace actorgauss {

struct TrainConfig {
    int epochs = 600;
    int batch_size = 128;
    double lr_initial = 0.15;
    double lr_min = 1e-4;
    double margin = 4.0;
    double dropout_keep = 0.6;
    double rmsprop_decay = 0.9;
    double rmsprop_eps = 1e-8;
    int negatives_per_positive = 1;
    std::uint64_t seed = 1;
    bool cosine_pi_variant = false;
    bool include_validation = false;  // also train on Val-tagged triples

    void validate() const;
};

using Rng = std::mt19937_64;

double hinge(double s_pos, double s_neg, double margin);

// eta_min + 1/2 (cos(x) + 1)(eta_0 - eta_min), x = t/T_max, or pi*t/T_max.
double cosine_lr(long t, long t_max, double lr_initial, double lr_min, bool pi_variant);

struct DropoutMask {
    std::vector<double> q;  // components in {0, 1/keep}
};

DropoutMask draw_dropout_mask(int dim, double keep, Rng& rng);

// Training co-occurrences per movie, sorted, for negative sampling.
class CooccurrenceIndex {
public:
    CooccurrenceIndex(const Dataset& d, bool include_validation = false);

    std::span<const std::uint32_t> keywords_of(std::uint32_t movie) const { return keywords_[movie]; }
    std::span<const std::uint32_t> actors_of(std::uint32_t movie) const { return actors_[movie]; }
    std::size_t keyword_count() const { return n_keywords_; }
    std::size_t actor_count() const { return n_actors_; }

private:
    std::vector<std::vector<std::uint32_t>> keywords_;
    std::vector<std::vector<std::uint32_t>> actors_;
    std::size_t n_keywords_ = 0;
    std::size_t n_actors_ = 0;
};

// Uniform draw from [0, universe) minus a sorted exclusion list.
std::optional<std::uint32_t> sample_excluding(std::size_t universe,
                                              std::span<const std::uint32_t> sorted_excluded,
                                              Rng& rng);

// nullopt when every keyword co-occurs with the movie.
std::optional<EntityId> sample_negative_keyword(const CooccurrenceIndex& index, EntityId movie,
                                                Rng& rng);
// Excludes every actor credited on the movie in training, whatever the persona.
std::optional<EntityId> sample_negative_actor(const CooccurrenceIndex& index, EntityId movie,
                                              Rng& rng);

struct PairExample {
    std::uint32_t movie = 0;
    std::uint32_t keyword = 0;
    std::vector<std::uint32_t> negatives;
    DropoutMask mask;  // empty q = no dropout
};

struct TripleExample {
    std::uint32_t movie = 0;
    std::uint32_t actor = 0;
    PersonaDescriptor persona;
    std::vector<std::uint32_t> negatives;
    DropoutMask mask;
};

struct Batch {
    std::vector<PairExample> pairs;
    std::vector<TripleExample> triples;
};

// Dense gradient buffers shaped like the parameters, plus the rows touched
// since the last reset so updates stay sparse.
class ModelGradients {
public:
    explicit ModelGradients(const ModelParams& shape);
    ModelGradients(const Tables& shape);

    std::span<double> row(Block b, std::uint32_t r);
    std::span<const double> row(Block b, std::uint32_t r) const;
    const std::vector<std::uint32_t>& touched(Block b) const { return touched_[block_index(b)]; }
    const Table& table(Block b) const { return grads_[block_index(b)]; }
    void reset();

private:
    Tables grads_;
    std::array<std::vector<std::uint32_t>, kBlockCount> touched_;
    std::array<std::vector<char>, kBlockCount> flags_;
};

// Sum of hinge terms over the batch; gradients of the violated terms are
// accumulated into `grads` (not reset here).
double batch_loss_and_grads(const ModelParams& params, const Batch& batch, double margin,
                            ModelGradients& grads);

struct OptimizerState {
    Tables accumulators;  // running mean of squared gradients
    explicit OptimizerState(const Tables& shape);
};

// acc <- rho acc + (1-rho) g^2 ; theta <- theta - lr g / sqrt(acc + eps)
void rmsprop_update(std::span<double> theta, std::span<double> acc, std::span<const double> grad,
                    double lr, double rho, double eps);

// Updates only touched rows, then clips their variances.
void rmsprop_step(ModelParams& params, OptimizerState& opt, const ModelGradients& grads, double lr,
                  double rho, double eps);

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double lr = 0.0;
    double wall_ms = 0.0;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochStats> history;
    std::size_t skipped_negatives = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;
// Called after every optimizer step with the updated parameters.
using StepCallback = std::function<void(const ModelParams&)>;

// Training examples: all pairs plus Train (and optionally Val) triples.
struct ExamplePlan {
    std::vector<std::uint32_t> pair_ids;
    std::vector<std::uint32_t> triple_ids;
    std::size_t size() const { return pair_ids.size() + triple_ids.size(); }
};
ExamplePlan training_examples(const Dataset& d, bool include_validation);

// Draws negatives and a mask for one pair/triple. Returns false (and leaves
// negatives empty) when no valid negative exists.
bool prepare_pair(const CooccurrenceIndex& index, const Pair& p, int negatives, int dim,
                  double keep, Rng& rng, PairExample& out);
bool prepare_triple(const CooccurrenceIndex& index, const Triple& t, int negatives, int dim,
                    double keep, Rng& rng, TripleExample& out);

TrainResult train(const Dataset& dataset, const ModelConfig& cfg, const TrainConfig& tcfg,
                  const std::optional<PretrainedKeywords>& pretrained = std::nullopt,
                  const EpochCallback& on_epoch = {}, const StepCallback& on_step = {});

}  // namespace actorgauss
