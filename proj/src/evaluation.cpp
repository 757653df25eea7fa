#include "actorgauss/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "actorgauss/similarity.hpp"

namespace actorgauss {

// ---- cast prediction --------------------------------------------------------

void GaussianScorer::score_actors(std::uint32_t movie, const PersonaDescriptor& desc,
                                  std::span<double> out) const {
    const auto m = params_.movie(movie);
    auto shifted = compose_persona_vector(params_, desc);
    for (std::size_t d = 0; d < shifted.size(); ++d) shifted[d] += m.mean[d];
    for (std::uint32_t a = 0; a < out.size(); ++a) {
        const auto actor = params_.actor(a);
        out[a] = log_overlap(actor.mean, actor.var, shifted, m.var);
    }
}

void TransEScorer::score_actors(std::uint32_t movie, const PersonaDescriptor& desc,
                                std::span<double> out) const {
    for (std::uint32_t a = 0; a < out.size(); ++a) out[a] = params_.triple_score(movie, desc, a);
}

std::size_t rank_of_truth(std::span<const double> scores, std::size_t truth,
                          std::span<const std::uint32_t> excluded) {
    if (truth >= scores.size()) throw std::out_of_range("truth index out of range");
    const double target = scores[truth];
    std::size_t higher = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] > target) ++higher;
    for (auto e : excluded)
        if (e != truth && e < scores.size() && scores[e] > target) --higher;
    return higher + 1;
}

KnownCasts::KnownCasts(const Dataset& d) {
    for (const auto& t : d.triples) known_[{t.movie.index, t.persona}].push_back(t.actor.index);
    for (auto& [key, v] : known_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
}

std::span<const std::uint32_t> KnownCasts::actors(std::uint32_t movie,
                                                  const PersonaDescriptor& desc) const {
    auto it = known_.find({movie, desc});
    if (it == known_.end()) return {};
    return it->second;
}

std::size_t rank_candidates(const CastScorer& scorer, std::uint32_t movie,
                            const PersonaDescriptor& desc, std::uint32_t truth, bool filtered,
                            const KnownCasts* known) {
    std::vector<double> scores(scorer.actor_count());
    scorer.score_actors(movie, desc, scores);
    if (filtered && known) return rank_of_truth(scores, truth, known->actors(movie, desc));
    return rank_of_truth(scores, truth);
}

RankSummary mean_rank_hits(std::span<const std::size_t> ranks, int k) {
    if (ranks.empty()) throw std::invalid_argument("mean_rank_hits: no ranks");
    double sum = 0.0;
    std::size_t hits = 0;
    for (auto r : ranks) {
        sum += static_cast<double>(r);
        if (r <= static_cast<std::size_t>(k)) ++hits;
    }
    const auto n = static_cast<double>(ranks.size());
    return {sum / n, 100.0 * static_cast<double>(hits) / n};
}

CastReport evaluate_cast(const CastScorer& scorer, const Dataset& d, Split split, bool filtered,
                         int k) {
    CastReport report;
    report.k = k;
    const KnownCasts known(d);
    std::vector<double> scores(scorer.actor_count());
    for (std::size_t i = 0; i < d.triples.size(); ++i) {
        if (d.splits[i] != split) continue;
        const auto& t = d.triples[i];
        scorer.score_actors(t.movie.index, t.persona, scores);
        const auto rank = filtered
                              ? rank_of_truth(scores, t.actor.index, known.actors(t.movie.index, t.persona))
                              : rank_of_truth(scores, t.actor.index);
        report.triple_ids.push_back(i);
        report.ranks.push_back(rank);
    }
    report.summary = mean_rank_hits(report.ranks, k);
    return report;
}

// ---- versatility --------------------------------------------------------------

double versatility_score(const ModelParams& params, std::uint32_t actor) {
    const auto var = params.actor(actor).var;
    double acc = 0.0;
    for (double v : var) acc += std::log(v);
    return acc / static_cast<double>(var.size());
}

std::vector<double> versatility_scores(const ModelParams& params) {
    std::vector<double> out(params.table(Block::ActorMean).rows());
    for (std::uint32_t a = 0; a < out.size(); ++a) out[a] = versatility_score(params, a);
    return out;
}

std::vector<RankedPair> resolve_pairs(const Vocabulary& actors, const std::vector<ExpertPair>& pairs) {
    std::vector<RankedPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const auto w = actors.find(p.winner);
        const auto l = actors.find(p.loser);
        if (!w) throw std::invalid_argument("unknown actor '" + p.winner + "'");
        if (!l) throw std::invalid_argument("unknown actor '" + p.loser + "'");
        out.push_back({*w, *l, p.majority_count});
    }
    return out;
}

double pairwise_accuracy(std::span<const double> scores, std::span<const RankedPair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("pairwise_accuracy: no pairs");
    double credit = 0.0;
    for (const auto& p : pairs) {
        const double w = scores[p.winner], l = scores[p.loser];
        if (w > l)
            credit += 1.0;
        else if (w == l)
            credit += 0.5;
    }
    return 100.0 * credit / static_cast<double>(pairs.size());
}

namespace {

// Edge indices of one directed cycle among live edges, or empty.
std::vector<std::size_t> find_cycle(std::span<const RankedPair> edges, const std::vector<char>& live) {
    std::uint32_t n = 0;
    for (const auto& e : edges) n = std::max({n, e.winner + 1, e.loser + 1});
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (live[i]) out[edges[i].winner].push_back(i);

    std::vector<int> color(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::size_t> via(n, 0);
    std::vector<std::size_t> cycle;

    std::function<bool(std::uint32_t)> dfs = [&](std::uint32_t u) {
        color[u] = 1;
        for (auto ei : out[u]) {
            const auto v = edges[ei].loser;
            if (color[v] == 1) {
                cycle.push_back(ei);
                for (auto w = u; w != v; w = edges[via[w]].winner) cycle.push_back(via[w]);
                return true;
            }
            if (color[v] == 0) {
                via[v] = ei;
                if (dfs(v)) return true;
            }
        }
        color[u] = 2;
        return false;
    };
    for (std::uint32_t u = 0; u < n; ++u)
        if (color[u] == 0 && dfs(u)) return cycle;
    return {};
}

}  // namespace

std::vector<RankedPair> repair_cycles(std::span<const RankedPair> pairs,
                                      const std::vector<std::string>* names) {
    std::vector<char> live(pairs.size(), 1);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].winner == pairs[i].loser) live[i] = 0;
    while (true) {
        const auto cycle = find_cycle(pairs, live);
        if (cycle.empty()) break;
        int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
        for (auto ei : cycle) {
            lo = std::min(lo, pairs[ei].majority);
            hi = std::max(hi, pairs[ei].majority);
        }
        if (lo == hi) {
            std::string msg = "unrepairable expert cycle:";
            for (auto it = cycle.rbegin(); it != cycle.rend(); ++it) {
                const auto w = pairs[*it].winner;
                msg += ' ';
                msg += names && w < names->size() ? (*names)[w] : std::to_string(w);
                msg += " >";
            }
            const auto first = pairs[cycle.back()].winner;
            msg += ' ';
            msg += names && first < names->size() ? (*names)[first] : std::to_string(first);
            throw std::runtime_error(msg);
        }
        for (auto ei : cycle)
            if (pairs[ei].majority == lo) live[ei] = 0;
    }
    std::vector<RankedPair> out;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (live[i]) out.push_back(pairs[i]);
    return out;
}

std::vector<std::uint32_t> random_linear_extension(std::span<const std::uint32_t> nodes,
                                                   std::span<const RankedPair> pairs,
                                                   std::mt19937_64& rng) {
    std::map<std::uint32_t, std::size_t> pos;
    for (std::size_t i = 0; i < nodes.size(); ++i) pos.emplace(nodes[i], i);
    std::vector<std::vector<std::size_t>> succ(nodes.size());
    std::vector<std::size_t> indegree(nodes.size(), 0);
    for (const auto& p : pairs) {
        auto w = pos.find(p.winner), l = pos.find(p.loser);
        if (w == pos.end() || l == pos.end()) continue;
        succ[w->second].push_back(l->second);
        ++indegree[l->second];
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::vector<std::uint32_t> order;
    order.reserve(nodes.size());
    while (!ready.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
        const auto j = pick(rng);
        const auto u = ready[j];
        ready[j] = ready.back();
        ready.pop_back();
        order.push_back(nodes[u]);
        for (auto v : succ[u])
            if (--indegree[v] == 0) ready.push_back(v);
    }
    if (order.size() != nodes.size()) throw std::runtime_error("expert order contains a cycle");
    return order;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    const auto n = x.size();
    if (n < 2) return 0.0;
    const auto rx = average_ranks(x), ry = average_ranks(y);
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double rank_correlation(std::span<const double> scores, std::span<const std::uint32_t> nodes,
                        std::span<const RankedPair> pairs, int n_sorts, std::uint64_t seed) {
    if (n_sorts < 1) throw std::invalid_argument("n_sorts must be >= 1");
    const auto dag = repair_cycles(pairs);
    std::mt19937_64 rng(seed);
    std::vector<double> model(nodes.size()), expert(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) model[i] = scores[nodes[i]];
    std::map<std::uint32_t, std::size_t> slot;
    for (std::size_t i = 0; i < nodes.size(); ++i) slot.emplace(nodes[i], i);
    double total = 0.0;
    for (int s = 0; s < n_sorts; ++s) {
        const auto order = random_linear_extension(nodes, dag, rng);
        // Earlier in the extension = more versatile = larger value.
        for (std::size_t p = 0; p < order.size(); ++p)
            expert[slot[order[p]]] = -static_cast<double>(p);
        total += spearman(model, expert);
    }
    return total / n_sorts;
}

// ---- heuristic baselines --------------------------------------------------------

double entropy(std::span<const double> counts) {
    double total = 0.0;
    for (double c : counts) {
        if (c < 0.0) throw std::invalid_argument("entropy: negative count");
        total += c;
    }
    if (total <= 0.0) throw std::invalid_argument("entropy: all counts are zero");
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    return h;
}

std::vector<double> entropy_baseline(const std::vector<std::vector<double>>& counts) {
    std::vector<double> out;
    out.reserve(counts.size());
    for (const auto& c : counts) out.push_back(entropy(c));
    return out;
}

std::vector<std::vector<double>> keyword_counts(const Dataset& d,
                                                std::span<const std::uint32_t> keyword_ids) {
    std::map<std::uint32_t, std::size_t> column;
    for (std::size_t i = 0; i < keyword_ids.size(); ++i) column.emplace(keyword_ids[i], i);
    std::vector<std::vector<std::size_t>> movie_cols(d.movies.size());
    for (const auto& p : d.pairs)
        if (auto it = column.find(p.keyword.index); it != column.end())
            movie_cols[p.movie.index].push_back(it->second);
    std::vector<std::vector<double>> counts(d.actors.size(),
                                            std::vector<double>(keyword_ids.size(), 0.0));
    for (const auto& t : d.triples)
        for (auto c : movie_cols[t.movie.index]) counts[t.actor.index][c] += 1.0;
    return counts;
}

std::vector<std::vector<double>> topic_group_counts(const Dataset& d) {
    std::vector<std::vector<double>> counts(d.actors.size(), std::vector<double>(kTopicGroups, 0.0));
    for (const auto& t : d.triples)
        if (t.persona.topic_group) counts[t.actor.index][*t.persona.topic_group] += 1.0;
    return counts;
}

std::vector<std::vector<double>> keyword_topic_counts(const Dataset& d, const Eigen::MatrixXd& w) {
    if (static_cast<std::size_t>(w.rows()) != d.movies.size())
        throw std::invalid_argument("W rows must match the movie count");
    std::vector<int> topic(d.movies.size(), -1);
    for (Eigen::Index m = 0; m < w.rows(); ++m) {
        Eigen::Index best = 0;
        if (w.row(m).maxCoeff(&best) > 0.0) topic[m] = static_cast<int>(best);
    }
    std::vector<std::vector<double>> counts(d.actors.size(),
                                            std::vector<double>(static_cast<std::size_t>(w.cols()), 0.0));
    for (const auto& t : d.triples)
        if (topic[t.movie.index] >= 0) counts[t.actor.index][topic[t.movie.index]] += 1.0;
    return counts;
}

Eigen::MatrixXd movie_keyword_matrix(const Dataset& d) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.movies.size()),
                                              static_cast<Eigen::Index>(d.keywords.size()));
    for (const auto& p : d.pairs) v(p.movie.index, p.keyword.index) += 1.0;
    return v;
}

NmfResult nmf_topics(const Eigen::MatrixXd& v, int k, int iters, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("nmf: k must be >= 1");
    if (k > v.rows() || k > v.cols())
        throw std::invalid_argument("nmf: k exceeds a matrix dimension");
    if ((v.array() < 0.0).any()) throw std::invalid_argument("nmf: matrix has negative entries");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    NmfResult r;
    r.w = Eigen::MatrixXd::NullaryExpr(v.rows(), k, [&] { return unif(rng); });
    r.h = Eigen::MatrixXd::NullaryExpr(k, v.cols(), [&] { return unif(rng); });
    constexpr double tiny = 1e-300;
    for (int it = 0; it < iters; ++it) {
        const Eigen::MatrixXd wt = r.w.transpose();
        r.h.array() *= (wt * v).array() / ((wt * r.w) * r.h).array().max(tiny);
        const Eigen::MatrixXd ht = r.h.transpose();
        r.w.array() *= (v * ht).array() / (r.w * (r.h * ht)).array().max(tiny);
        r.objective.push_back((v - r.w * r.h).norm());
    }
    return r;
}

// ---- significance -----------------------------------------------------------

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test: each sample needs >= 2 values");
    auto moments = [](std::span<const double> x) {
        const double n = static_cast<double>(x.size());
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        return std::pair{mean, ss / (n - 1.0)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double sa = va / na, sb = vb / nb;
    WelchResult r;
    if (sa + sb == 0.0) {
        r.df = na + nb - 2.0;
        if (ma == mb) return {0.0, r.df, 0.5};
        r.t = ma > mb ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
        r.p_one_tailed = ma > mb ? 0.0 : 1.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    const boost::math::students_t dist(r.df);
    r.p_one_tailed = boost::math::cdf(boost::math::complement(dist, r.t));
    return r;
}

double binomial_upper_tail(std::size_t successes, std::size_t n) {
    if (successes == 0) return 1.0;
    if (successes > n) return 0.0;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(successes - 1)));
}

// ---- nearest neighbours ------------------------------------------------------

namespace {

std::vector<Neighbor> ranked_neighbors(const ModelParams& params, std::uint32_t actor) {
    const auto n = static_cast<std::uint32_t>(params.table(Block::ActorMean).rows());
    if (actor >= n) throw std::out_of_range("actor index out of range");
    const auto a = params.actor(actor);
    std::vector<Neighbor> out;
    out.reserve(n);
    for (std::uint32_t b = 0; b < n; ++b) {
        if (b == actor) continue;
        const auto other = params.actor(b);
        out.push_back({b, 0, log_overlap(a.mean, a.var, other.mean, other.var)});
    }
    std::sort(out.begin(), out.end(), [](const Neighbor& x, const Neighbor& y) {
        if (x.similarity != y.similarity) return x.similarity > y.similarity;
        return x.actor < y.actor;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
    return out;
}

}  // namespace

std::vector<Neighbor> nearest_neighbors(const ModelParams& params, std::uint32_t actor,
                                        std::size_t top_n) {
    auto all = ranked_neighbors(params, actor);
    if (all.size() > top_n) all.resize(top_n);
    return all;
}

std::size_t neighbor_rank(const ModelParams& params, std::uint32_t actor, std::uint32_t other) {
    for (const auto& nb : ranked_neighbors(params, actor))
        if (nb.actor == other) return nb.rank;
    throw std::invalid_argument("neighbor_rank: actor compared with itself");
}

}  // namespace actorgauss
