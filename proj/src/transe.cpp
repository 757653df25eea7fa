#include "actorgauss/transe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "actorgauss/io.hpp"
#include "binary_io.hpp"

namespace actorgauss {

double transe_score(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, Norm norm) {
    if (h.size() != r.size() || h.size() != t.size())
        throw std::invalid_argument("transe_score: length mismatch");
    double acc = 0.0;
    for (std::size_t d = 0; d < h.size(); ++d) {
        const double x = h[d] + r[d] - t[d];
        acc += norm == Norm::L1 ? std::abs(x) : x * x;
    }
    return norm == Norm::L1 ? -acc : -std::sqrt(acc);
}

RelationKey TransEParams::key_of(const PersonaDescriptor& desc) const {
    const bool topic = config.persona_mode == PersonaMode::Topic ||
                       config.persona_mode == PersonaMode::Full;
    const bool ag = config.persona_mode == PersonaMode::AgeGender ||
                    config.persona_mode == PersonaMode::Full;
    return {topic ? desc.topic_group.value_or(-1) : -1, ag ? desc.age_bucket.value_or(-1) : -1,
            ag && desc.gender ? static_cast<int>(*desc.gender) : -1};
}

std::uint32_t TransEParams::relation_of(const PersonaDescriptor& desc) const {
    auto it = relation_index.find(key_of(desc));
    return it == relation_index.end() ? kDefaultRelation : it->second;
}

double TransEParams::triple_score(std::uint32_t movie, const PersonaDescriptor& desc,
                                  std::uint32_t actor) const {
    return transe_score(movies.row(movie), relations.row(relation_of(desc)), actors.row(actor),
                        config.norm);
}

double TransEParams::pair_score(std::uint32_t movie, std::uint32_t keyword) const {
    return transe_score(movies.row(movie), relations.row(kKeywordRelation), keywords.row(keyword),
                        config.norm);
}

namespace {

void normalize(std::span<double> v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0.0)
        for (double& x : v) x /= n;
}

// Gradient buffer for one table with touched-row tracking.
struct SparseGrad {
    Table g;
    std::vector<std::uint32_t> touched;
    std::vector<char> flag;

    explicit SparseGrad(const Table& shape)
        : g(shape.rows(), shape.width()), flag(shape.rows(), 0) {}

    std::span<double> row(std::uint32_t r) {
        if (!flag[r]) {
            flag[r] = 1;
            touched.push_back(r);
        }
        return g.row(r);
    }
    void reset() {
        for (auto r : touched) {
            auto row = g.row(r);
            std::fill(row.begin(), row.end(), 0.0);
            flag[r] = 0;
        }
        touched.clear();
    }
};

// d||h + r - t|| / d(h + r - t), in place.
void distance_direction(std::span<const double> h, std::span<const double> r,
                        std::span<const double> t, Norm norm, std::vector<double>& out) {
    out.resize(h.size());
    double n = 0.0;
    for (std::size_t d = 0; d < h.size(); ++d) {
        out[d] = h[d] + r[d] - t[d];
        n += out[d] * out[d];
    }
    if (norm == Norm::L1) {
        for (double& x : out) x = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        return;
    }
    n = std::sqrt(n);
    for (double& x : out) x = n > 0.0 ? x / n : 0.0;
}

}  // namespace

TransEParams init_transe(const Dataset& d, const TransEConfig& cfg, std::uint64_t seed,
                         bool include_validation) {
    if (cfg.dim <= 0) throw std::invalid_argument("dim must be positive");
    TransEParams p;
    p.config = cfg;
    const auto dim = static_cast<std::size_t>(cfg.dim);
    std::uint32_t next = 2;
    for (std::size_t i = 0; i < d.triples.size(); ++i) {
        const auto s = i < d.splits.size() ? d.splits[i] : Split::Train;
        if (s == Split::Test || (s == Split::Val && !include_validation)) continue;
        if (p.relation_index.emplace(p.key_of(d.triples[i].persona), next).second) ++next;
    }
    p.movies = Table(d.movies.size(), dim);
    p.actors = Table(d.actors.size(), dim);
    p.keywords = Table(d.keywords.size(), dim);
    p.relations = Table(next, dim);

    std::mt19937_64 rng(seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (Table* t : {&p.movies, &p.actors, &p.keywords, &p.relations}) {
        for (double& x : t->data()) x = unif(rng);
        for (std::size_t r = 0; r < t->rows(); ++r) normalize(t->row(r));
    }
    return p;
}

TransEResult transe_train(const Dataset& dataset, const TransEConfig& cfg, const TrainConfig& tcfg,
                          const EpochCallback& on_epoch) {
    tcfg.validate();
    const auto plan = training_examples(dataset, tcfg.include_validation);
    if (plan.size() == 0) throw std::invalid_argument("dataset has no training data");

    TransEResult result{init_transe(dataset, cfg, tcfg.seed, tcfg.include_validation), {}};
    TransEParams& p = result.params;
    const CooccurrenceIndex index(dataset, tcfg.include_validation);

    SparseGrad g_movies(p.movies), g_actors(p.actors), g_keywords(p.keywords),
        g_relations(p.relations);
    Table acc_movies(p.movies.rows(), p.movies.width()), acc_actors(p.actors.rows(), p.actors.width()),
        acc_keywords(p.keywords.rows(), p.keywords.width()),
        acc_relations(p.relations.rows(), p.relations.width());

    std::vector<std::uint32_t> order(plan.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto n_pairs = plan.pair_ids.size();
    const auto batch_size = static_cast<std::size_t>(tcfg.batch_size);
    const long t_max = static_cast<long>((order.size() + batch_size - 1) / batch_size) * tcfg.epochs;

    Rng rng(tcfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<double> dir_pos, dir_neg;
    long step = 0;

    // One hinge term: margin + d(h + r - t_pos) - d(h + r - t_neg).
    auto term = [&](std::span<const double> h, std::span<const double> r, const Table& tails,
                    std::uint32_t pos, std::uint32_t neg, std::uint32_t movie, std::uint32_t rel,
                    SparseGrad& g_tail) {
        const double s_pos = transe_score(h, r, tails.row(pos), cfg.norm);
        const double s_neg = transe_score(h, r, tails.row(neg), cfg.norm);
        const double loss = hinge(s_pos, s_neg, tcfg.margin);
        if (loss <= 0.0) return 0.0;
        distance_direction(h, r, tails.row(pos), cfg.norm, dir_pos);
        distance_direction(h, r, tails.row(neg), cfg.norm, dir_neg);
        auto gm = g_movies.row(movie);
        auto gr = g_relations.row(rel);
        auto gp = g_tail.row(pos);
        auto gn = g_tail.row(neg);
        for (std::size_t d = 0; d < h.size(); ++d) {
            const double diff = dir_pos[d] - dir_neg[d];
            gm[d] += diff;
            gr[d] += diff;
            gp[d] -= dir_pos[d];
            gn[d] += dir_neg[d];
        }
        return loss;
    };

    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        double lr = tcfg.lr_initial;
        for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
            const auto end = std::min(order.size(), begin + batch_size);
            double loss = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const auto e = order[i];
                if (e < n_pairs) {
                    PairExample ex;
                    if (!prepare_pair(index, dataset.pairs[plan.pair_ids[e]],
                                      tcfg.negatives_per_positive, cfg.dim, 1.0, rng, ex))
                        continue;
                    for (auto n : ex.negatives)
                        loss += term(p.movies.row(ex.movie), p.relations.row(TransEParams::kKeywordRelation),
                                     p.keywords, ex.keyword, n, ex.movie,
                                     TransEParams::kKeywordRelation, g_keywords);
                } else {
                    TripleExample ex;
                    if (!prepare_triple(index, dataset.triples[plan.triple_ids[e - n_pairs]],
                                        tcfg.negatives_per_positive, cfg.dim, 1.0, rng, ex))
                        continue;
                    const auto rel = p.relation_of(ex.persona);
                    for (auto n : ex.negatives)
                        loss += term(p.movies.row(ex.movie), p.relations.row(rel), p.actors,
                                     ex.actor, n, ex.movie, rel, g_actors);
                }
            }
            if (!std::isfinite(loss))
                throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch));
            epoch_loss += loss;
            lr = cosine_lr(step, t_max, tcfg.lr_initial, tcfg.lr_min, tcfg.cosine_pi_variant);
            struct Slot {
                Table* theta;
                Table* acc;
                SparseGrad* g;
                bool renormalize;
            };
            for (Slot s : {Slot{&p.movies, &acc_movies, &g_movies, true},
                           Slot{&p.actors, &acc_actors, &g_actors, true},
                           Slot{&p.keywords, &acc_keywords, &g_keywords, true},
                           Slot{&p.relations, &acc_relations, &g_relations, false}}) {
                for (auto r : s.g->touched) {
                    rmsprop_update(s.theta->row(r), s.acc->row(r), s.g->g.row(r), lr,
                                   tcfg.rmsprop_decay, tcfg.rmsprop_eps);
                    if (s.renormalize) normalize(s.theta->row(r));
                }
                s.g->reset();
            }
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

void save_transe_checkpoint(const TransEParams& p, const std::filesystem::path& path) {
    std::ostringstream buf(std::ios::binary);
    detail::BinaryWriter w(buf);
    detail::write_header(w, ModelFamily::TransE, static_cast<std::uint32_t>(p.config.dim));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.config.norm));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.config.persona_mode));
    w.put<std::uint64_t>(p.relation_index.size());
    for (const auto& [key, row] : p.relation_index) {
        w.put<std::int32_t>(std::get<0>(key));
        w.put<std::int32_t>(std::get<1>(key));
        w.put<std::int32_t>(std::get<2>(key));
        w.put<std::uint32_t>(row);
    }
    for (const Table* t : {&p.movies, &p.actors, &p.keywords, &p.relations}) w.put_table(*t);
    io::write_file_atomic(path, buf.str());
}

TransEParams load_transe_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    detail::BinaryReader r(in, path.string());
    const auto [family, dim] = detail::read_header(r);
    if (family != ModelFamily::TransE)
        throw std::runtime_error(path.string() + ": checkpoint holds a Gaussian model");
    TransEParams p;
    p.config.dim = static_cast<int>(dim);
    const auto norm = r.get<std::uint32_t>();
    const auto mode = r.get<std::uint32_t>();
    if (norm > 1 || mode > 3) throw std::runtime_error(path.string() + ": bad config flags");
    p.config.norm = static_cast<Norm>(norm);
    p.config.persona_mode = static_cast<PersonaMode>(mode);
    const auto n_rel = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n_rel; ++i) {
        const auto a = r.get<std::int32_t>();
        const auto b = r.get<std::int32_t>();
        const auto c = r.get<std::int32_t>();
        p.relation_index.emplace(RelationKey{a, b, c}, r.get<std::uint32_t>());
    }
    for (Table* t : {&p.movies, &p.actors, &p.keywords, &p.relations}) *t = r.get_table();
    for (const auto& [key, row] : p.relation_index)
        if (row >= p.relations.rows()) throw std::runtime_error(path.string() + ": bad relation row");
    return p;
}

}  // namespace actorgauss
