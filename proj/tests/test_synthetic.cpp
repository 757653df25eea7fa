#include <algorithm>
#include <set>
#include <tuple>

#include "actorgauss/synthetic.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace actorgauss;

namespace {

WorldConfig mixed(std::uint64_t seed) {
    WorldConfig c;
    c.versatility_spreads = {1, 5};
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("uniform spread gives a flat planted order") {
    const auto w = generate_planted(WorldConfig{});
    CHECK(planted_versatility_pairs(w).empty());
    const auto r = oracle_metrics(w, w.truth);
    CHECK(r.n_versatility_pairs == 0);
    CHECK(r.versatility_accuracy == 50.0);
}

TEST_CASE("generation is a pure function of the config") {
    const auto a = generate_planted(mixed(4));
    const auto b = generate_planted(mixed(4));
    CHECK(a.truth == b.truth);
    CHECK(a.dataset.splits == b.dataset.splits);
    REQUIRE(a.dataset.triples.size() == b.dataset.triples.size());
    for (std::size_t i = 0; i < a.dataset.triples.size(); ++i) {
        CHECK(a.dataset.triples[i].actor == b.dataset.triples[i].actor);
        CHECK(a.dataset.triples[i].persona == b.dataset.triples[i].persona);
    }
    CHECK_FALSE(generate_planted(mixed(5)).truth == a.truth);
}

TEST_CASE("sizes and split tags") {
    const auto w = generate_planted(mixed(2));
    const auto& d = w.dataset;
    CHECK(d.movies.size() == 200);
    CHECK(d.actors.size() == 50);
    CHECK(d.keywords.size() == 20);
    CHECK(d.triples.size() == 200 * 4);
    CHECK(d.pairs.size() == 200 * 3);
    CHECK(d.count(Split::Train) == 560);
    CHECK(d.count(Split::Val) == 120);
    CHECK(d.count(Split::Test) == 120);
    for (const auto& t : d.triples) {
        REQUIRE(t.persona.topic_group.has_value());
        CHECK(*t.persona.topic_group < 5);
        CHECK(t.persona.gender.has_value());
        CHECK(t.persona.age_bucket.has_value());
    }
    CHECK_THROWS(generate_planted([] {
        WorldConfig c;
        c.n_actors = 1;
        return c;
    }()));
}

TEST_CASE("planted truth is among the top three planted scores") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (const auto& cfg : {WorldConfig{}, mixed(0)}) {
            auto c = cfg;
            c.seed = seed;
            const auto w = generate_planted(c);
            const GaussianScorer scorer(w.truth);
            std::vector<double> scores(w.dataset.actors.size());
            std::size_t in_top3 = 0;
            for (const auto& t : w.dataset.triples) {
                const PersonaDescriptor topic_only{t.persona.topic_group, std::nullopt, std::nullopt};
                scorer.score_actors(t.movie.index, topic_only, scores);
                if (rank_of_truth(scores, t.actor.index) <= 3) ++in_top3;
            }
            CHECK(static_cast<double>(in_top3) >= 0.95 * static_cast<double>(w.dataset.triples.size()));
        }
    }
}

TEST_CASE("held-out casts never appear in training") {
    const auto w = generate_planted(mixed(7));
    std::set<std::tuple<std::uint32_t, std::uint32_t>> train;
    for (std::size_t i = 0; i < w.dataset.triples.size(); ++i)
        if (w.dataset.splits[i] == Split::Train)
            train.emplace(w.dataset.triples[i].movie.index, w.dataset.triples[i].actor.index);
    for (std::size_t i = 0; i < w.dataset.triples.size(); ++i)
        if (w.dataset.splits[i] != Split::Train)
            CHECK_FALSE(train.count({w.dataset.triples[i].movie.index, w.dataset.triples[i].actor.index}));
}

TEST_CASE("planted variances order every distinct-spread pair") {
    const auto w = generate_planted(mixed(3));
    const auto pairs = planted_versatility_pairs(w);
    CHECK(pairs.size() == 25 * 25);
    const auto r = oracle_metrics(w, w.truth);
    CHECK(r.versatility_accuracy == 100.0);
    CHECK(r.versatility_correct == pairs.size());
}

TEST_CASE("oracle metrics: random parameters sit at chance, the truth beats them") {
    double pooled = 0.0;
    std::size_t n = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto w = generate_planted(mixed(seed));
        ModelConfig c;
        c.dim = 10;
        c.persona_mode = PersonaMode::Topic;
        const auto random = init_params(c, vocab_sizes(w.dataset), seed + 100);
        const auto rr = oracle_metrics(w, random);
        const auto rt = oracle_metrics(w, w.truth);
        CHECK(rt.mean_rank <= rr.mean_rank);
        pooled += rr.mean_rank * static_cast<double>(rr.n_test);
        n += rr.n_test;
    }
    // Pooled standard error is about 0.45.
    CHECK(std::abs(pooled / static_cast<double>(n) - 25.5) < 2.0);
}

TEST_CASE("written worlds flow back through ingestion") {
    const auto w = generate_planted(mixed(9));
    const auto dir = testutil::scratch_dir("world");
    write_world(w, dir);
    auto d = ingest_catalog(dir / "triples.tsv", dir / "pairs.tsv");
    read_splits(d, dir / "splits.tsv");
    CHECK(d.splits == w.dataset.splits);
    // Ingestion numbers actors by first appearance; uncast actors are not written.
    const std::set<std::string> got(d.actors.names().begin(), d.actors.names().end());
    const std::set<std::string> want(w.dataset.actors.names().begin(), w.dataset.actors.names().end());
    CHECK(std::includes(want.begin(), want.end(), got.begin(), got.end()));
    CHECK(d.triples.size() == w.dataset.triples.size());
    const auto experts = read_expert_pairs(dir / "expert_pairs.tsv");
    CHECK(experts.size() == planted_expert_pairs(w).size());
    CHECK_FALSE(experts.empty());
    CHECK_NOTHROW(resolve_pairs(d.actors, experts));
}
