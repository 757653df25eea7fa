#include "actorgauss/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "actorgauss/similarity.hpp"

namespace actorgauss {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(lr_initial > lr_min && lr_min >= 0.0))
        throw std::invalid_argument("need lr_initial > lr_min >= 0");
    if (!(dropout_keep > 0.0 && dropout_keep <= 1.0))
        throw std::invalid_argument("dropout_keep must be in (0,1]");
    if (!(rmsprop_decay >= 0.0 && rmsprop_decay < 1.0))
        throw std::invalid_argument("rmsprop_decay must be in [0,1)");
    if (!(rmsprop_eps > 0.0)) throw std::invalid_argument("rmsprop_eps must be positive");
    if (negatives_per_positive < 1) throw std::invalid_argument("negatives_per_positive must be >= 1");
}

double hinge(double s_pos, double s_neg, double margin) {
    return std::max(0.0, margin - s_pos + s_neg);
}

double cosine_lr(long t, long t_max, double lr_initial, double lr_min, bool pi_variant) {
    if (t_max <= 0 || t < 0 || t > t_max) throw std::out_of_range("cosine_lr: need 0 <= t <= T_max");
    double x = static_cast<double>(t) / static_cast<double>(t_max);
    if (pi_variant) x *= std::numbers::pi;
    return lr_min + 0.5 * (std::cos(x) + 1.0) * (lr_initial - lr_min);
}

DropoutMask draw_dropout_mask(int dim, double keep, Rng& rng) {
    if (!(keep > 0.0 && keep <= 1.0)) throw std::invalid_argument("keep probability must be in (0,1]");
    DropoutMask m;
    m.q.resize(static_cast<std::size_t>(dim));
    std::bernoulli_distribution coin(keep);
    const double scale = 1.0 / keep;
    for (double& x : m.q) x = coin(rng) ? scale : 0.0;
    return m;
}

CooccurrenceIndex::CooccurrenceIndex(const Dataset& d, bool include_validation)
    : keywords_(d.movies.size()),
      actors_(d.movies.size()),
      n_keywords_(d.keywords.size()),
      n_actors_(d.actors.size()) {
    for (const auto& p : d.pairs) keywords_[p.movie.index].push_back(p.keyword.index);
    for (std::size_t i = 0; i < d.triples.size(); ++i) {
        const auto s = i < d.splits.size() ? d.splits[i] : Split::Train;
        if (s == Split::Train || (include_validation && s == Split::Val))
            actors_[d.triples[i].movie.index].push_back(d.triples[i].actor.index);
    }
    for (auto* lists : {&keywords_, &actors_})
        for (auto& v : *lists) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
}

std::optional<std::uint32_t> sample_excluding(std::size_t universe,
                                              std::span<const std::uint32_t> sorted_excluded,
                                              Rng& rng) {
    if (sorted_excluded.size() >= universe) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, universe - sorted_excluded.size() - 1);
    std::size_t candidate = pick(rng);
    // Shift the r-th free slot past every excluded id at or below it.
    for (auto e : sorted_excluded) {
        if (e <= candidate)
            ++candidate;
        else
            break;
    }
    return static_cast<std::uint32_t>(candidate);
}

std::optional<EntityId> sample_negative_keyword(const CooccurrenceIndex& index, EntityId movie,
                                                Rng& rng) {
    auto k = sample_excluding(index.keyword_count(), index.keywords_of(movie.index), rng);
    if (!k) return std::nullopt;
    return EntityId{EntityKind::Keyword, *k};
}

std::optional<EntityId> sample_negative_actor(const CooccurrenceIndex& index, EntityId movie,
                                              Rng& rng) {
    auto a = sample_excluding(index.actor_count(), index.actors_of(movie.index), rng);
    if (!a) return std::nullopt;
    return EntityId{EntityKind::Actor, *a};
}

ModelGradients::ModelGradients(const Tables& shape) {
    for (std::size_t b = 0; b < kBlockCount; ++b) {
        grads_[b] = Table(shape[b].rows(), shape[b].width());
        flags_[b].assign(shape[b].rows(), 0);
    }
}

ModelGradients::ModelGradients(const ModelParams& shape) : ModelGradients(shape.blocks) {}

std::span<double> ModelGradients::row(Block b, std::uint32_t r) {
    const auto i = block_index(b);
    if (!flags_[i][r]) {
        flags_[i][r] = 1;
        touched_[i].push_back(r);
    }
    return grads_[i].row(r);
}

std::span<const double> ModelGradients::row(Block b, std::uint32_t r) const {
    return grads_[block_index(b)].row(r);
}

void ModelGradients::reset() {
    for (std::size_t b = 0; b < kBlockCount; ++b) {
        for (auto r : touched_[b]) {
            auto row = grads_[b].row(r);
            std::fill(row.begin(), row.end(), 0.0);
            flags_[b][r] = 0;
        }
        touched_[b].clear();
    }
}

namespace {

void axpy(std::span<double> dst, std::span<const double> src, double scale) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
}

// Adds scale * dS/dtheta for one similarity into the buffers.
void scatter(const ModelParams& params, const SimilarityGradients& g, EntityId movie,
             EntityId other, const PersonaDescriptor& desc, double scale, ModelGradients& grads) {
    axpy(grads.row(Block::MovieMean, movie.index), g.d_mean_left, scale);
    axpy(grads.row(Block::MovieVar, movie.index), g.d_var_left, scale);
    axpy(grads.row(mean_block(other.kind), other.index), g.d_mean_right, scale);
    axpy(grads.row(var_block(other.kind), other.index), g.d_var_right, scale);
    if (other.kind != EntityKind::Actor || params.config.persona_mode == PersonaMode::None) return;
    const auto width = static_cast<std::size_t>(params.config.descriptor_width());
    for (const auto& slot : persona_slots(params.config, desc))
        axpy(grads.row(slot.block, slot.row),
             std::span<const double>(g.d_persona).subspan(slot.offset, width), scale);
}

template <typename Negatives>
double accumulate_terms(const ModelParams& params, Relation rel, EntityId movie, EntityId positive,
                        EntityKind neg_kind, const Negatives& negatives,
                        const PersonaDescriptor& desc, std::span<const double> mask, double margin,
                        ModelGradients& grads) {
    if (negatives.empty()) return 0.0;
    const auto pos = similarity_gradients(params, rel, movie, positive, desc, mask);
    double loss = 0.0;
    for (auto n : negatives) {
        const EntityId neg{neg_kind, n};
        const auto ng = similarity_gradients(params, rel, movie, neg, desc, mask);
        const double h = hinge(pos.value, ng.value, margin);
        if (h <= 0.0) continue;
        loss += h;
        scatter(params, pos, movie, positive, desc, -1.0, grads);
        scatter(params, ng, movie, neg, desc, +1.0, grads);
    }
    return loss;
}

}  // namespace

double batch_loss_and_grads(const ModelParams& params, const Batch& batch, double margin,
                            ModelGradients& grads) {
    double loss = 0.0;
    const PersonaDescriptor none;
    for (const auto& ex : batch.pairs)
        loss += accumulate_terms(params, Relation::MovieKeyword, {EntityKind::Movie, ex.movie},
                                 {EntityKind::Keyword, ex.keyword}, EntityKind::Keyword,
                                 ex.negatives, none, ex.mask.q, margin, grads);
    for (const auto& ex : batch.triples)
        loss += accumulate_terms(params, Relation::MoviePersonaActor, {EntityKind::Movie, ex.movie},
                                 {EntityKind::Actor, ex.actor}, EntityKind::Actor, ex.negatives,
                                 ex.persona, ex.mask.q, margin, grads);
    return loss;
}

OptimizerState::OptimizerState(const Tables& shape) {
    for (std::size_t b = 0; b < kBlockCount; ++b)
        accumulators[b] = Table(shape[b].rows(), shape[b].width());
}

void rmsprop_update(std::span<double> theta, std::span<double> acc, std::span<const double> grad,
                    double lr, double rho, double eps) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i];
        acc[i] = rho * acc[i] + (1.0 - rho) * g * g;
        theta[i] -= lr * g / std::sqrt(acc[i] + eps);
    }
}

void rmsprop_step(ModelParams& params, OptimizerState& opt, const ModelGradients& grads, double lr,
                  double rho, double eps) {
    for (std::size_t b = 0; b < kBlockCount; ++b) {
        const auto block = static_cast<Block>(b);
        for (auto r : grads.touched(block))
            rmsprop_update(params.table(block).row(r), opt.accumulators[b].row(r),
                           grads.row(block, r), lr, rho, eps);
        if (is_variance_block(block)) clip_variances(params, grads.touched(block), block);
    }
}

ExamplePlan training_examples(const Dataset& d, bool include_validation) {
    ExamplePlan plan;
    for (std::uint32_t i = 0; i < d.pairs.size(); ++i) plan.pair_ids.push_back(i);
    for (std::uint32_t i = 0; i < d.triples.size(); ++i) {
        const auto s = i < d.splits.size() ? d.splits[i] : Split::Train;
        if (s == Split::Train || (include_validation && s == Split::Val)) plan.triple_ids.push_back(i);
    }
    return plan;
}

bool prepare_pair(const CooccurrenceIndex& index, const Pair& p, int negatives, int dim,
                  double keep, Rng& rng, PairExample& out) {
    out.movie = p.movie.index;
    out.keyword = p.keyword.index;
    out.negatives.clear();
    for (int i = 0; i < negatives; ++i) {
        auto k = sample_negative_keyword(index, p.movie, rng);
        if (!k) return false;
        out.negatives.push_back(k->index);
    }
    out.mask = keep < 1.0 ? draw_dropout_mask(dim, keep, rng) : DropoutMask{};
    return true;
}

bool prepare_triple(const CooccurrenceIndex& index, const Triple& t, int negatives, int dim,
                    double keep, Rng& rng, TripleExample& out) {
    out.movie = t.movie.index;
    out.actor = t.actor.index;
    out.persona = t.persona;
    out.negatives.clear();
    for (int i = 0; i < negatives; ++i) {
        auto a = sample_negative_actor(index, t.movie, rng);
        if (!a) return false;
        out.negatives.push_back(a->index);
    }
    out.mask = keep < 1.0 ? draw_dropout_mask(dim, keep, rng) : DropoutMask{};
    return true;
}

TrainResult train(const Dataset& dataset, const ModelConfig& cfg, const TrainConfig& tcfg,
                  const std::optional<PretrainedKeywords>& pretrained,
                  const EpochCallback& on_epoch, const StepCallback& on_step) {
    tcfg.validate();
    const auto plan = training_examples(dataset, tcfg.include_validation);
    if (plan.triple_ids.empty() && plan.pair_ids.empty())
        throw std::invalid_argument("dataset has no training data");

    TrainResult result{init_params(cfg, vocab_sizes(dataset), tcfg.seed, pretrained), {}, 0};
    ModelParams& params = result.params;
    const CooccurrenceIndex index(dataset, tcfg.include_validation);
    ModelGradients grads(params);
    OptimizerState opt(params.blocks);

    // Entries < pair count are pairs; the rest index plan.triple_ids.
    std::vector<std::uint32_t> order(plan.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto n_pairs = plan.pair_ids.size();
    const auto batch_size = static_cast<std::size_t>(tcfg.batch_size);
    const long batches_per_epoch = static_cast<long>((order.size() + batch_size - 1) / batch_size);
    const long t_max = batches_per_epoch * tcfg.epochs;

    // Keep the sampling stream separate from the initialisation stream.
    Rng rng(tcfg.seed ^ 0x9e3779b97f4a7c15ull);
    long step = 0;
    Batch batch;
    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        double lr = tcfg.lr_initial;
        for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
            const auto end = std::min(order.size(), begin + batch_size);
            batch.pairs.clear();
            batch.triples.clear();
            for (std::size_t i = begin; i < end; ++i) {
                const auto e = order[i];
                if (e < n_pairs) {
                    PairExample ex;
                    if (prepare_pair(index, dataset.pairs[plan.pair_ids[e]],
                                     tcfg.negatives_per_positive, cfg.dim, tcfg.dropout_keep, rng, ex))
                        batch.pairs.push_back(std::move(ex));
                    else
                        ++result.skipped_negatives;
                } else {
                    TripleExample ex;
                    if (prepare_triple(index, dataset.triples[plan.triple_ids[e - n_pairs]],
                                       tcfg.negatives_per_positive, cfg.dim, tcfg.dropout_keep,
                                       rng, ex))
                        batch.triples.push_back(std::move(ex));
                    else
                        ++result.skipped_negatives;
                }
            }
            grads.reset();
            const double loss = batch_loss_and_grads(params, batch, tcfg.margin, grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(begin / batch_size));
            epoch_loss += loss;
            lr = cosine_lr(step, t_max, tcfg.lr_initial, tcfg.lr_min, tcfg.cosine_pi_variant);
            rmsprop_step(params, opt, grads, lr, tcfg.rmsprop_decay, tcfg.rmsprop_eps);
            if (on_step) on_step(params);
            ++step;
        }
        const auto elapsed = std::chrono::steady_clock::now() - start;
        EpochStats stats{epoch, epoch_loss / static_cast<double>(order.size()), lr,
                         std::chrono::duration<double, std::milli>(elapsed).count()};
        result.history.push_back(stats);
        if (on_epoch) on_epoch(stats);
    }
    return result;
}

}  // namespace actorgauss
