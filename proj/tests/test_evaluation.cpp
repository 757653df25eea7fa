#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "actorgauss/evaluation.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace actorgauss;

namespace {

// Scores 1 for the actor credited on the movie's first test triple, 0 otherwise.
class TruthScorer final : public CastScorer {
public:
    explicit TruthScorer(const Dataset& d) : n_(d.actors.size()), truth_(d.movies.size(), -1) {
        for (std::size_t i = 0; i < d.triples.size(); ++i)
            if (d.splits[i] == Split::Test && truth_[d.triples[i].movie.index] < 0)
                truth_[d.triples[i].movie.index] = static_cast<long>(d.triples[i].actor.index);
    }
    std::size_t actor_count() const override { return n_; }
    void score_actors(std::uint32_t movie, const PersonaDescriptor&, std::span<double> out) const override {
        for (std::size_t a = 0; a < n_; ++a) out[a] = static_cast<long>(a) == truth_[movie] ? 1.0 : 0.0;
    }

private:
    std::size_t n_;
    std::vector<long> truth_;
};

ModelParams actors_on_a_line(const std::vector<double>& means, const std::vector<double>& vars) {
    ModelConfig c;
    c.dim = 1;
    c.persona_mode = PersonaMode::None;
    auto p = init_params(c, {1, means.size(), 1}, 1);
    for (std::size_t a = 0; a < means.size(); ++a) {
        p.table(Block::ActorMean).row(a)[0] = means[a];
        p.table(Block::ActorVar).row(a)[0] = vars[a];
    }
    return p;
}

}  // namespace

TEST_CASE("rank_of_truth tie rule and exclusions") {
    const std::vector<double> unique{0.1, 0.9, 0.3, 0.2, 0.5};
    CHECK(rank_of_truth(unique, 1) == 1);
    CHECK(rank_of_truth(unique, 0) == 5);
    const std::vector<double> flat(5, 0.7);
    for (std::size_t t = 0; t < 5; ++t) CHECK(rank_of_truth(flat, t) == 1);
    const std::vector<std::uint32_t> excluded{1, 4};
    CHECK(rank_of_truth(unique, 2, excluded) == 1);
    CHECK(rank_of_truth(unique, 0, excluded) == 3);
}

TEST_CASE("random scores give an expected rank of (N+1)/2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> scores(10);
    double total = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        for (double& s : scores) s = u(rng);
        total += static_cast<double>(rank_of_truth(scores, 3));
    }
    // Standard error is sqrt(99/12)/100 ~ 0.029.
    CHECK(std::abs(total / draws - 5.5) < 0.1);
}

TEST_CASE("mean_rank_hits") {
    const std::vector<std::size_t> a{1, 3, 5}, b{1, 11, 10}, c{4, 4, 4};
    const auto ra = mean_rank_hits(a, 10);
    CHECK(ra.mean_rank == 3.0);
    CHECK(ra.hits_at_k == 100.0);
    const auto rb = mean_rank_hits(b, 10);
    CHECK(rb.mean_rank == doctest::Approx(22.0 / 3.0));
    CHECK(rb.hits_at_k == doctest::Approx(200.0 / 3.0));
    CHECK(mean_rank_hits(c, 4).hits_at_k == 100.0);
    CHECK(mean_rank_hits(c, 3).hits_at_k == 0.0);
    CHECK(mean_rank_hits(c, 3).mean_rank == 4.0);
    CHECK_THROWS(mean_rank_hits(std::vector<std::size_t>{}, 10));
}

TEST_CASE("a scorer that always ranks the truth first has mean rank exactly 1") {
    fixtures::CatalogBuilder b;
    for (int m = 0; m < 8; ++m) {
        const auto movie = "m" + std::to_string(m);
        b.triple(movie, "a" + std::to_string(m), 0, Split::Test);
        b.triple(movie, "a" + std::to_string((m + 1) % 8), 1);
    }
    const auto report = evaluate_cast(TruthScorer(b.d), b.d, Split::Test, false, 10);
    CHECK(report.ranks.size() == 8);
    CHECK(report.summary.mean_rank == 1.0);
    CHECK(report.summary.hits_at_k == 100.0);
}

TEST_CASE("filtered rank never exceeds the raw rank") {
    fixtures::CatalogBuilder b;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> actor(0, 19), movie(0, 5), topic(0, 1);
    for (int i = 0; i < 150; ++i)
        b.triple("m" + std::to_string(movie(rng)), "a" + std::to_string(actor(rng)), topic(rng),
                 i % 3 == 0 ? Split::Test : Split::Train);
    ModelConfig c;
    c.dim = 3;
    c.persona_mode = PersonaMode::Topic;
    const auto p = init_params(c, vocab_sizes(b.d), 2);
    const GaussianScorer scorer(p);
    const KnownCasts known(b.d);
    int strictly_better = 0;
    for (std::size_t i = 0; i < b.d.triples.size(); ++i) {
        const auto& t = b.d.triples[i];
        const auto raw = rank_candidates(scorer, t.movie.index, t.persona, t.actor.index, false, &known);
        const auto filt = rank_candidates(scorer, t.movie.index, t.persona, t.actor.index, true, &known);
        CHECK(filt <= raw);
        CHECK(raw >= 1);
        CHECK(raw <= b.d.actors.size());
        if (filt < raw) ++strictly_better;
    }
    CHECK(strictly_better > 0);
}

TEST_CASE("versatility_score") {
    ModelConfig c;
    c.dim = 2;
    c.persona_mode = PersonaMode::None;
    auto sph = init_params(c, {1, 1, 1}, 1);
    sph.table(Block::ActorVar).row(0)[0] = 4.0;
    CHECK(versatility_score(sph, 0) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
    c.spherical = false;
    auto diag = init_params(c, {1, 1, 1}, 1);
    diag.table(Block::ActorVar).row(0)[0] = 1.0;
    diag.table(Block::ActorVar).row(0)[1] = 4.0;
    const double before = versatility_score(diag, 0);
    CHECK(before == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    diag.table(Block::ActorVar).row(0)[0] = 1.5;
    CHECK(versatility_score(diag, 0) > before);
}

TEST_CASE("versatility ordering survives a monotone transform of all variances") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    std::vector<double> vars(30);
    for (double& v : vars) v = u(rng);
    const auto p = actors_on_a_line(std::vector<double>(30, 0.0), vars);
    std::vector<double> squared(vars);
    for (double& v : squared) v = v * v + 1.0;
    const auto q = actors_on_a_line(std::vector<double>(30, 0.0), squared);
    auto order = [](const std::vector<double>& s) {
        std::vector<std::size_t> idx(s.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
        return idx;
    };
    CHECK(order(versatility_scores(p)) == order(versatility_scores(q)));
}

TEST_CASE("pairwise_accuracy") {
    const std::vector<double> s{4, 3, 2, 1};
    const std::vector<RankedPair> all_right{{0, 1, 3}, {1, 2, 3}, {0, 3, 3}};
    CHECK(pairwise_accuracy(s, all_right) == 100.0);
    const std::vector<double> flat(4, 1.0);
    CHECK(pairwise_accuracy(flat, all_right) == 50.0);
    const std::vector<RankedPair> three_of_four{{0, 1, 3}, {1, 2, 3}, {2, 3, 3}, {3, 0, 3}};
    CHECK(pairwise_accuracy(s, three_of_four) == 75.0);
    CHECK_THROWS(pairwise_accuracy(s, std::vector<RankedPair>{}));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> scores(200);
    for (double& x : scores) x = u(rng);
    std::vector<RankedPair> pairs;
    for (std::uint32_t i = 0; i + 1 < 200; i += 2) pairs.push_back({i, i + 1, 3});
    for (std::uint32_t i = 1; i + 2 < 200; i += 2) pairs.push_back({i, i + 2, 3});
    // 199 pairs: standard error of the accuracy is about 3.5 points.
    CHECK(std::abs(pairwise_accuracy(scores, pairs) - 50.0) < 12.0);
}

TEST_CASE("resolve_pairs maps names and rejects unknown actors") {
    Vocabulary v;
    v.intern("ann");
    v.intern("bob");
    const auto r = resolve_pairs(v, {{"bob", "ann", 4}});
    REQUIRE(r.size() == 1);
    CHECK(r[0].winner == 1);
    CHECK(r[0].loser == 0);
    CHECK(r[0].majority == 4);
    CHECK_THROWS(resolve_pairs(v, {{"bob", "cy", 3}}));
}

TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 2, 3}, y{1, 2, 3, 4};
    CHECK(spearman(x, y) == doctest::Approx(0.9486832980505139).epsilon(1e-12));
    const std::vector<double> a{3, 1, 4, 1, 5}, b{9, 2, 6, 5, 3};
    CHECK(spearman(a, b) == doctest::Approx(0.20519567041703085).epsilon(1e-12));
    CHECK(spearman(y, std::vector<double>{4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman(y, std::vector<double>(4, 2.0)) == 0.0);
}

TEST_CASE("rank_correlation against total and empty expert orders") {
    const std::vector<std::uint32_t> nodes{0, 1, 2, 3, 4};
    // Expert total order 0 > 1 > 2 > 3 > 4 as a chain.
    std::vector<RankedPair> chain;
    for (std::uint32_t i = 0; i + 1 < 5; ++i) chain.push_back({i, i + 1, 3});
    const std::vector<double> agree{5, 4, 3, 2, 1}, reverse{1, 2, 3, 4, 5};
    CHECK(rank_correlation(agree, nodes, chain, 20, 1) == doctest::Approx(1.0));
    CHECK(rank_correlation(reverse, nodes, chain, 20, 1) == doctest::Approx(-1.0));
    // No constraints: uniform permutations; the per-sort standard deviation is 0.5.
    const double r = rank_correlation(agree, nodes, {}, 4000, 7);
    CHECK(std::abs(r) < 0.05);
    CHECK(rank_correlation(agree, nodes, {}, 4000, 7) == r);
}

TEST_CASE("random linear extensions respect every edge") {
    const std::vector<std::uint32_t> nodes{0, 1, 2, 3, 4, 5};
    const std::vector<RankedPair> pairs{{0, 2, 3}, {1, 2, 3}, {2, 5, 3}, {3, 4, 3}};
    std::mt19937_64 rng(4);
    std::set<std::vector<std::uint32_t>> seen;
    for (int i = 0; i < 500; ++i) {
        const auto order = random_linear_extension(nodes, pairs, rng);
        REQUIRE(order.size() == nodes.size());
        std::vector<std::size_t> pos(6);
        for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
        for (const auto& p : pairs) CHECK(pos[p.winner] < pos[p.loser]);
        seen.insert(order);
    }
    CHECK(seen.size() > 10);
}

TEST_CASE("cycle repair") {
    const std::vector<RankedPair> cyc{{0, 1, 3}, {1, 2, 4}, {2, 0, 5}, {3, 0, 4}};
    const auto fixed = repair_cycles(cyc);
    CHECK(fixed.size() == 3);
    for (const auto& p : fixed) CHECK_FALSE((p.winner == 0 && p.loser == 1));
    const std::vector<RankedPair> acyclic{{0, 1, 3}, {1, 2, 3}};
    CHECK(repair_cycles(acyclic).size() == 2);

    const std::vector<RankedPair> even{{0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
    const std::vector<std::string> names{"ann", "bob", "cy"};
    try {
        repair_cycles(even, &names);
        FAIL("expected an unrepairable cycle");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        for (const auto& n : names) CHECK(msg.find(n) != std::string::npos);
    }
}

TEST_CASE("entropy") {
    CHECK(entropy(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
    CHECK(entropy(std::vector<double>{5, 0, 0}) == 0.0);
    CHECK(entropy(std::vector<double>{3, 1}) == doctest::Approx(0.5623351446188083).epsilon(1e-12));
    CHECK_THROWS(entropy(std::vector<double>{0, 0}));
    CHECK_THROWS(entropy(std::vector<double>{1, -1}));
    const auto e = entropy_baseline({{1, 1}, {2, 0}});
    CHECK(e[0] == doctest::Approx(std::log(2.0)));
    CHECK(e[1] == 0.0);
}

TEST_CASE("count tables for the heuristic baselines") {
    fixtures::CatalogBuilder b;
    b.triple("m0", "a", 1).triple("m1", "a", 1).triple("m1", "b", 2).pair("m0", "drama").pair("m1", "comedy");
    b.pair("m1", "drama");
    const std::vector<std::uint32_t> genres{*b.d.keywords.find("drama"), *b.d.keywords.find("comedy")};
    const auto kc = keyword_counts(b.d, genres);
    CHECK(kc[0] == std::vector<double>{2, 1});
    CHECK(kc[1] == std::vector<double>{1, 1});
    const auto tc = topic_group_counts(b.d);
    REQUIRE(tc[0].size() == static_cast<std::size_t>(kTopicGroups));
    CHECK(tc[0][1] == 2.0);
    CHECK(tc[1][2] == 1.0);
    const auto v = movie_keyword_matrix(b.d);
    CHECK(v.rows() == 2);
    CHECK(v.cols() == 2);
    CHECK(v.sum() == 3.0);
    Eigen::MatrixXd w(2, 2);
    w << 0.9, 0.1, 0.2, 0.8;
    const auto ktc = keyword_topic_counts(b.d, w);
    CHECK(ktc[0] == std::vector<double>{1, 1});
    CHECK(ktc[1] == std::vector<double>{0, 1});
}

TEST_CASE("nmf exact factorizations") {
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
    const auto r1 = nmf_topics(ones, 1, 500, 1);
    CHECK(r1.objective.back() < 1e-3);
    const auto r2 = nmf_topics(Eigen::MatrixXd::Identity(2, 2), 2, 5000, 1);
    CHECK(r2.objective.back() < 1e-3);
    CHECK(r2.w.minCoeff() >= 0.0);
    CHECK(r2.h.minCoeff() >= 0.0);
    CHECK_THROWS(nmf_topics(ones, 3, 10, 1));
    Eigen::MatrixXd neg = ones;
    neg(0, 0) = -1;
    CHECK_THROWS(nmf_topics(neg, 1, 10, 1));
}

TEST_CASE("nmf objective never increases on random matrices") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd v(30, 20);
        for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
        const auto r = nmf_topics(v, 5, 100, static_cast<std::uint64_t>(trial));
        REQUIRE(r.objective.size() == 100);
        for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1] + 1e-10);
        CHECK(r.w.minCoeff() >= 0.0);
        CHECK(r.h.minCoeff() >= 0.0);
    }
}

TEST_CASE("welch t-test") {
    const std::vector<double> a{1.2, 3.4, 2.2, 5.1, 4.4}, b{0.5, 1.1, 2.0, 0.7};
    const auto r = welch_t_test(a, b);
    CHECK(r.t == doctest::Approx(2.7879674359994033).epsilon(1e-12));
    CHECK(r.p_one_tailed == doctest::Approx(0.01706903532083475).epsilon(1e-9));

    const auto same = welch_t_test(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p_one_tailed == doctest::Approx(0.5));
    const std::vector<double> c{2, 2, 2}, d{2, 2};
    CHECK(welch_t_test(c, d).p_one_tailed == 0.5);

    std::vector<double> lo{0.0, 0.01, -0.01, 0.02}, hi(lo);
    for (double& x : hi) x += 10.0;
    CHECK(welch_t_test(hi, lo).p_one_tailed < 0.001);

    // Equal sizes and variances give df = 10; t = 1.812 sits at the 5% point.
    std::vector<double> base{0, 1, 2, 3, 4, 5}, shifted(base);
    for (double& x : shifted) x += 1.957183690919174;
    const auto table = welch_t_test(shifted, base);
    CHECK(table.df == doctest::Approx(10.0));
    CHECK(table.t == doctest::Approx(1.812).epsilon(1e-12));
    CHECK(table.p_one_tailed == doctest::Approx(0.050037631032923566).epsilon(1e-8));
    CHECK_THROWS(welch_t_test(std::vector<double>{1.0}, base));
}

TEST_CASE("binomial upper tail") {
    CHECK(binomial_upper_tail(8, 10) == doctest::Approx(0.0546875).epsilon(1e-12));
    CHECK(binomial_upper_tail(0, 10) == doctest::Approx(1.0));
    CHECK(binomial_upper_tail(10, 10) == doctest::Approx(1.0 / 1024));
}

TEST_CASE("nearest neighbours") {
    // a=0, b=1, c=0.9, d=1.1, and e duplicates a.
    const auto p = actors_on_a_line({0.0, 1.0, 0.9, 1.1, 0.0}, {1, 1, 1, 1, 1});
    const auto of_a = nearest_neighbors(p, 0, 4);
    REQUIRE(of_a.size() == 4);
    CHECK(of_a[0].actor == 4);
    CHECK(of_a[0].rank == 1);
    std::set<std::uint32_t> others;
    for (const auto& n : of_a) others.insert(n.actor);
    CHECK(others == std::set<std::uint32_t>{1, 2, 3, 4});
    CHECK(std::is_sorted(of_a.begin(), of_a.end(),
                         [](const Neighbor& x, const Neighbor& y) { return x.similarity > y.similarity; }));
    // b is third for a (after e and c); for b, a ties e and wins on id.
    CHECK(neighbor_rank(p, 0, 1) == 3);
    CHECK(neighbor_rank(p, 1, 0) == 3);
    // Without the duplicate the ranks differ: 2 one way, 3 the other.
    const auto q = actors_on_a_line({0.0, 1.0, 0.9, 1.1}, {1, 1, 1, 1});
    CHECK(neighbor_rank(q, 0, 1) == 2);
    CHECK(neighbor_rank(q, 1, 0) == 3);
    CHECK(nearest_neighbors(p, 0, 2).size() == 2);
}
