#include "actorgauss/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "actorgauss/similarity.hpp"

namespace actorgauss {

void WorldConfig::validate() const {
    if (n_movies < 2 || n_actors < 2 || n_keywords < 2 || n_personae < 2 || dim < 1)
        throw std::invalid_argument("world sizes must be >= 2");
    if (n_personae > kTopicGroups) throw std::invalid_argument("at most 50 personae");
    if (versatility_spreads.empty()) throw std::invalid_argument("need at least one spread");
    for (int s : versatility_spreads)
        if (s < 1) throw std::invalid_argument("spreads must be >= 1");
    if (cast_size < 1 || cast_size > n_actors) throw std::invalid_argument("bad cast_size");
    if (keywords_per_movie < 1 || keywords_per_movie > n_keywords)
        throw std::invalid_argument("bad keywords_per_movie");
    if (candidate_pool < 1) throw std::invalid_argument("candidate_pool must be >= 1");
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
}

namespace {

std::string label(const char* prefix, int i) {
    std::string digits = std::to_string(i);
    return std::string(prefix) + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
}

// Softmax draw among the top `pool` candidates (by score) that are still allowed.
// Returns -1 when no allowed candidate is inside the pool.
int draw_from_pool(const std::vector<double>& scores, const std::vector<char>& taken, int pool,
                   double temperature, std::mt19937_64& rng) {
    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(pool), idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](int a, int b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    std::vector<int> allowed;
    for (std::size_t i = 0; i < k; ++i)
        if (!taken[idx[i]]) allowed.push_back(idx[i]);
    if (allowed.empty()) return -1;
    const double top = scores[allowed.front()];
    std::vector<double> w;
    for (int c : allowed) w.push_back(std::exp((scores[c] - top) / temperature));
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    return allowed[pick(rng)];
}

}  // namespace

PlantedWorld generate_planted(const WorldConfig& cfg) {
    cfg.validate();
    PlantedWorld world;
    world.config = cfg;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const int max_spread =
        *std::max_element(cfg.versatility_spreads.begin(), cfg.versatility_spreads.end());
    const int n_clusters = cfg.n_clusters > 0 ? cfg.n_clusters : std::max(5, max_spread);
    if (max_spread > n_clusters) throw std::invalid_argument("spread exceeds cluster count");
    const auto dim = static_cast<std::size_t>(cfg.dim);

    ModelConfig mc;
    mc.dim = cfg.dim;
    mc.spherical = true;
    mc.persona_mode = PersonaMode::Topic;
    mc.var_min = 1e-4;
    mc.var_max = 1e4;
    ModelParams truth = init_params(mc, {static_cast<std::size_t>(cfg.n_movies),
                                         static_cast<std::size_t>(cfg.n_actors),
                                         static_cast<std::size_t>(cfg.n_keywords)},
                                    cfg.seed);
    std::fill(truth.table(Block::Topic).data().begin(), truth.table(Block::Topic).data().end(), 0.0);

    std::vector<std::vector<double>> centers(static_cast<std::size_t>(n_clusters),
                                             std::vector<double>(dim));
    for (auto& c : centers)
        for (double& x : c) x = cfg.center_scale * normal(rng);
    for (int s = 0; s < cfg.n_personae; ++s)
        for (double& x : truth.table(Block::Topic).row(static_cast<std::size_t>(s)))
            x = cfg.persona_scale * normal(rng);

    auto place = [&](std::span<double> mean, const std::vector<double>& at) {
        for (std::size_t d = 0; d < dim; ++d) mean[d] = at[d] + cfg.jitter * normal(rng);
    };

    std::vector<int> keyword_cluster(static_cast<std::size_t>(cfg.n_keywords));
    for (int k = 0; k < cfg.n_keywords; ++k) {
        keyword_cluster[k] = k % n_clusters;
        place(truth.table(Block::KeywordMean).row(k), centers[keyword_cluster[k]]);
        truth.table(Block::KeywordVar).row(k)[0] = 1.0;
    }
    std::uniform_int_distribution<int> cluster_of(0, n_clusters - 1);
    world.movie_cluster.resize(static_cast<std::size_t>(cfg.n_movies));
    for (int m = 0; m < cfg.n_movies; ++m) {
        world.movie_cluster[m] = cluster_of(rng);
        place(truth.table(Block::MovieMean).row(m), centers[world.movie_cluster[m]]);
        truth.table(Block::MovieVar).row(m)[0] = 1.0;
    }

    std::uniform_int_distribution<int> persona_of(0, cfg.n_personae - 1);
    std::uniform_real_distribution<double> age_of(20.0, 70.0);
    std::uniform_int_distribution<int> gender_of(0, 1);
    std::vector<double> actor_age(static_cast<std::size_t>(cfg.n_actors));
    std::vector<Gender> actor_gender(static_cast<std::size_t>(cfg.n_actors));
    world.actor_spread.resize(static_cast<std::size_t>(cfg.n_actors));
    std::vector<int> clusters(static_cast<std::size_t>(n_clusters));
    std::iota(clusters.begin(), clusters.end(), 0);
    for (int a = 0; a < cfg.n_actors; ++a) {
        const int spread = cfg.versatility_spreads[a % cfg.versatility_spreads.size()];
        world.actor_spread[a] = spread;
        std::shuffle(clusters.begin(), clusters.end(), rng);
        std::vector<double> centroid(dim, 0.0);
        for (int h = 0; h < spread; ++h)
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += centers[clusters[h]][d] / spread;
        double spread_sq = 0.0;
        for (int h = 0; h < spread; ++h)
            for (std::size_t d = 0; d < dim; ++d) {
                const double g = centers[clusters[h]][d] - centroid[d];
                spread_sq += g * g / spread;
            }
        const auto pref = truth.table(Block::Topic).row(static_cast<std::size_t>(persona_of(rng)));
        std::vector<double> home(dim);
        for (std::size_t d = 0; d < dim; ++d) home[d] = centroid[d] + pref[d];
        place(truth.table(Block::ActorMean).row(a), home);
        truth.table(Block::ActorVar).row(a)[0] = cfg.base_variance + spread_sq / static_cast<double>(dim);
        actor_age[a] = std::round(age_of(rng));
        actor_gender[a] = gender_of(rng) ? Gender::Male : Gender::Female;
    }

    Dataset& d = world.dataset;
    for (int m = 0; m < cfg.n_movies; ++m) d.movies.intern(label("movie", m));
    for (int a = 0; a < cfg.n_actors; ++a) d.actors.intern(label("actor", a));
    for (int k = 0; k < cfg.n_keywords; ++k) d.keywords.intern(label("keyword", k));

    std::vector<double> scores(static_cast<std::size_t>(cfg.n_actors));
    std::vector<double> kw_scores(static_cast<std::size_t>(cfg.n_keywords));
    const GaussianScorer scorer(truth);
    for (int m = 0; m < cfg.n_movies; ++m) {
        const EntityId movie{EntityKind::Movie, static_cast<std::uint32_t>(m)};
        std::vector<char> cast(static_cast<std::size_t>(cfg.n_actors), 0);
        int slot = 0;
        for (int attempt = 0; slot < cfg.cast_size && attempt < 20 * cfg.cast_size; ++attempt) {
            PersonaDescriptor desc;
            desc.topic_group = persona_of(rng);
            scorer.score_actors(movie.index, desc, scores);
            const int a = draw_from_pool(scores, cast, cfg.candidate_pool, cfg.temperature, rng);
            if (a < 0) continue;
            cast[a] = 1;
            desc.age_bucket = discretize_age(actor_age[a]);
            desc.gender = actor_gender[a];
            d.triples.push_back({movie, {EntityKind::Actor, static_cast<std::uint32_t>(a)}, desc,
                                 ++slot, actor_age[a]});
        }

        for (int k = 0; k < cfg.n_keywords; ++k)
            kw_scores[k] = movie_keyword_similarity(truth, movie,
                                                    {EntityKind::Keyword, static_cast<std::uint32_t>(k)});
        std::vector<char> tagged(static_cast<std::size_t>(cfg.n_keywords), 0);
        const int pool = std::max(cfg.candidate_pool, cfg.keywords_per_movie);
        for (int j = 0; j < cfg.keywords_per_movie; ++j) {
            const int k = draw_from_pool(kw_scores, tagged, pool, cfg.temperature, rng);
            if (k < 0) break;
            tagged[k] = 1;
            d.pairs.push_back({movie, {EntityKind::Keyword, static_cast<std::uint32_t>(k)}});
        }
    }
    d.splits.assign(d.triples.size(), Split::Train);
    world.dataset = split_triples(d, cfg.split_ratios, cfg.seed);
    world.truth = std::move(truth);
    return world;
}

std::vector<RankedPair> planted_versatility_pairs(const PlantedWorld& world) {
    std::vector<RankedPair> pairs;
    const auto n = static_cast<std::uint32_t>(world.actor_spread.size());
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b) {
            const int sa = world.actor_spread[a], sb = world.actor_spread[b];
            if (sa == sb) continue;
            pairs.push_back(sa > sb ? RankedPair{a, b, 4} : RankedPair{b, a, 4});
        }
    return pairs;
}

std::vector<ExpertPair> planted_expert_pairs(const PlantedWorld& world) {
    std::vector<ExpertPair> out;
    const auto& names = world.dataset.actors;
    std::vector<char> cast(names.size(), 0);
    for (const auto& t : world.dataset.triples) cast[t.actor.index] = 1;
    for (const auto& p : planted_versatility_pairs(world))
        if (cast[p.winner] && cast[p.loser])
            out.push_back({names.name(p.winner), names.name(p.loser), p.majority});
    return out;
}

OracleReport oracle_metrics(const PlantedWorld& world, const CastScorer& scorer) {
    OracleReport r;
    const auto cast = evaluate_cast(scorer, world.dataset, Split::Test, false, 10);
    r.mean_rank = cast.summary.mean_rank;
    r.hits_at_10 = cast.summary.hits_at_k;
    r.n_test = cast.ranks.size();
    r.versatility_accuracy = 50.0;
    return r;
}

OracleReport oracle_metrics(const PlantedWorld& world, const ModelParams& trained) {
    OracleReport r = oracle_metrics(world, GaussianScorer(trained));
    const auto pairs = planted_versatility_pairs(world);
    r.n_versatility_pairs = pairs.size();
    if (pairs.empty()) return r;
    const auto scores = versatility_scores(trained);
    r.versatility_accuracy = pairwise_accuracy(scores, pairs);
    for (const auto& p : pairs)
        if (scores[p.winner] > scores[p.loser]) ++r.versatility_correct;
    return r;
}

void write_world(const PlantedWorld& world, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_catalog(world.dataset, dir / "triples.tsv", dir / "pairs.tsv");
    write_splits(world.dataset, dir / "splits.tsv");
    write_expert_pairs(planted_expert_pairs(world), dir / "expert_pairs.tsv");
}

}  // namespace actorgauss
