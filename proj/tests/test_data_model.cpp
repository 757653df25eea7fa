#include <algorithm>
#include <set>

#include "actorgauss/data_model.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace actorgauss;

namespace {

Dataset make_catalog(const std::string& triples, const std::string& pairs, const std::string& tag) {
    const auto dir = testutil::scratch_dir(tag);
    return ingest_catalog(testutil::write_text(dir / "t.tsv", triples),
                          testutil::write_text(dir / "p.tsv", pairs));
}

// Recount relations per entity after filtering.
void check_min_relations(const Dataset& d, int min_relations) {
    std::vector<int> movies(d.movies.size()), actors(d.actors.size()), keywords(d.keywords.size());
    for (const auto& t : d.triples) {
        ++movies[t.movie.index];
        ++actors[t.actor.index];
    }
    for (const auto& p : d.pairs) {
        ++movies[p.movie.index];
        ++keywords[p.keyword.index];
    }
    for (const auto* v : {&movies, &actors, &keywords})
        for (int c : *v) CHECK(c >= min_relations);
}

}  // namespace

TEST_CASE("ingest counts distinct names") {
    const auto d = make_catalog("Alien\tWeaver\t1\t3\t30\tF\nHeat\tPacino\t1\t-\t55\tM\n",
                                "Alien\tsci-fi\nHeat\tcrime\n", "ingest_counts");
    CHECK(d.movies.size() == 2);
    CHECK(d.actors.size() == 2);
    CHECK(d.keywords.size() == 2);
    CHECK(d.triples.size() == 2);
    CHECK(d.triples[0].persona.topic_group == 3);
    CHECK(d.triples[0].persona.age_bucket == 6);
    CHECK(d.triples[0].persona.gender == Gender::Female);
    CHECK_FALSE(d.triples[1].persona.topic_group.has_value());
    CHECK(std::all_of(d.splits.begin(), d.splits.end(), [](Split s) { return s == Split::Train; }));
}

TEST_CASE("same actor on two lines shares one id; duplicate lines collapse") {
    const auto d = make_catalog(
        "Alien\tWeaver\t1\t-\t-\t-\nAliens\tWeaver\t1\t-\t-\t-\nAliens\tWeaver\t1\t-\t-\t-\n",
        "Alien\tsci-fi\nAlien\tsci-fi\n", "ingest_dedup");
    CHECK(d.actors.size() == 1);
    CHECK(d.triples.size() == 2);
    CHECK(d.triples[0].actor == d.triples[1].actor);
    CHECK(d.pairs.size() == 1);
}

TEST_CASE("malformed lines name their line number") {
    const auto dir = testutil::scratch_dir("ingest_bad");
    const auto pairs = testutil::write_text(dir / "p.tsv", "Alien\tsci-fi\n");
    const auto bad = testutil::write_text(dir / "t.tsv", "Alien\tWeaver\t1\t-\t-\t-\nHeat\tPacino\t1\t-\n");
    try {
        ingest_catalog(bad, pairs);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("t.tsv:2") != std::string::npos);
    }
    const auto bad_gender = testutil::write_text(dir / "g.tsv", "Alien\tWeaver\t1\t-\t-\tX\n");
    CHECK_THROWS_AS(ingest_catalog(bad_gender, pairs), FormatError);
    const auto bad_age = testutil::write_text(dir / "a.tsv", "Alien\tWeaver\t1\t-\t130\tF\n");
    CHECK_THROWS_AS(ingest_catalog(bad_age, pairs), FormatError);
    CHECK_THROWS(ingest_catalog(dir / "missing.tsv", pairs));
}

TEST_CASE("discretize_age") {
    CHECK(discretize_age(0) == 0);
    CHECK(discretize_age(23) == 4);
    CHECK(discretize_age(115) == 23);
    CHECK(discretize_age(120) == 23);
    CHECK_THROWS(discretize_age(-0.5));
    CHECK_THROWS(discretize_age(120.01));
    int prev = 0;
    for (double a = 0; a <= 120.0; a += 0.25) {
        const int b = discretize_age(a);
        CHECK(b >= prev);
        CHECK(b < kAgeBuckets);
        prev = b;
    }
}

TEST_CASE("filter_entities: cast rank cutoff") {
    const auto d = make_catalog(
        "M1\tLead\t1\t-\t-\t-\nM1\tExtra\t5\t-\t-\t-\nM2\tLead\t2\t-\t-\t-\n", "M1\tk\nM2\tk\n",
        "filter_rank");
    const auto f = filter_entities(d, 1, 4);
    CHECK(f.actors.size() == 1);
    CHECK_FALSE(f.actors.find("Extra").has_value());
    CHECK(f.triples.size() == 2);
}

TEST_CASE("filter_entities: keyword under threshold is removed") {
    std::string triples, pairs;
    for (int m = 0; m < 12; ++m) {
        const auto movie = "M" + std::to_string(m);
        for (int a = 0; a < 10; ++a) triples += movie + "\tA" + std::to_string(a) + "\t1\t-\t-\t-\n";
        pairs += movie + "\tcommon\n";
        if (m < 9) pairs += movie + "\trare\n";
    }
    const auto d = make_catalog(triples, pairs, "filter_kw");
    const auto f = filter_entities(d, 10);
    CHECK(f.keywords.size() == 1);
    CHECK(f.keywords.find("common").has_value());
    CHECK_FALSE(f.keywords.find("rare").has_value());
    check_min_relations(f, 10);
}

TEST_CASE("filter_entities: identity filter and fixpoint") {
    const auto d = make_catalog("M1\tA\t1\t-\t-\t-\nM2\tB\t3\t-\t-\t-\n", "M1\tk\n", "filter_id");
    const auto f = filter_entities(d, 1);
    CHECK(f.triples.size() == d.triples.size());
    CHECK(f.pairs.size() == d.pairs.size());
    CHECK(f.movies.names() == d.movies.names());
    CHECK(f.actors.names() == d.actors.names());

    // Removing B leaves M2 with one relation; D and then M4 follow at min 2.
    const auto chain = make_catalog(
        "M1\tA\t1\t-\t-\t-\nM1\tC\t1\t-\t-\t-\nM3\tA\t1\t-\t-\t-\nM3\tC\t1\t-\t-\t-\n"
        "M2\tB\t1\t-\t-\t-\nM2\tD\t1\t-\t-\t-\nM4\tD\t1\t-\t-\t-\nM4\tA\t1\t-\t-\t-\n",
        "M1\tk\nM3\tk\n", "filter_chain");
    const auto g = filter_entities(chain, 2);
    check_min_relations(g, 2);
    CHECK_FALSE(g.actors.find("B").has_value());
    CHECK_FALSE(g.actors.find("D").has_value());
    CHECK_FALSE(g.movies.find("M4").has_value());
    CHECK(g.actors.find("A").has_value());
    CHECK_THROWS(filter_entities(chain, 50));
}

TEST_CASE("split_triples") {
    std::string triples;
    for (int i = 0; i < 100; ++i) triples += "M" + std::to_string(i % 7) + "\tA" + std::to_string(i) + "\t1\t-\t-\t-\n";
    const auto d = make_catalog(triples, "M0\tk\n", "split");
    const auto s = split_triples(d, {0.70, 0.15, 0.15}, 42);
    CHECK(s.count(Split::Train) == 70);
    CHECK(s.count(Split::Val) == 15);
    CHECK(s.count(Split::Test) == 15);
    CHECK(s.splits == split_triples(d, {0.70, 0.15, 0.15}, 42).splits);
    CHECK(s.splits != split_triples(d, {0.70, 0.15, 0.15}, 43).splits);
    const auto all = split_triples(d, {1.0, 0.0, 0.0}, 7);
    CHECK(all.count(Split::Train) == 100);
    CHECK_THROWS(split_triples(d, {0.5, 0.2, 0.2}, 1));

    for (int n : {3, 7, 10, 31, 99}) {
        Dataset small = d;
        small.triples.resize(static_cast<std::size_t>(n));
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto t = split_triples(small, {0.70, 0.15, 0.15}, seed);
            CHECK(t.splits.size() == static_cast<std::size_t>(n));
            CHECK(std::abs(static_cast<double>(t.count(Split::Train)) - 0.70 * n) <= 1.0);
            CHECK(std::abs(static_cast<double>(t.count(Split::Val)) - 0.15 * n) <= 1.0);
            CHECK(std::abs(static_cast<double>(t.count(Split::Test)) - 0.15 * n) <= 1.0);
        }
    }
    Dataset tiny = d;
    tiny.triples.resize(2);
    CHECK_THROWS(split_triples(tiny, {0.70, 0.15, 0.15}, 1));
}

TEST_CASE("expert pairs partition by actor split") {
    const std::vector<ExpertPair> pairs{{"a", "b", 3}, {"a", "c", 4}, {"c", "d", 3}};
    const auto s = partition_expert_pairs({"a", "b"}, {"c", "d"}, pairs);
    REQUIRE(s.val_pairs.size() == 1);
    CHECK(s.val_pairs[0].winner == "a");
    CHECK(s.val_pairs[0].loser == "b");
    CHECK(s.test_pairs.size() == 2);
    CHECK_THROWS(partition_expert_pairs({"a", "b"}, {"c", "d"}, {{"x", "a", 3}}));
    CHECK_THROWS(split_versatility_actors({"a", "b"}, {}, 1));
}

TEST_CASE("split_versatility_actors is disjoint for any seed") {
    std::vector<std::string> actors;
    for (int i = 0; i < 11; ++i) actors.push_back("actor" + std::to_string(i));
    std::vector<ExpertPair> pairs;
    for (int i = 0; i < 11; ++i)
        for (int j = i + 1; j < 11; ++j) pairs.push_back({actors[i], actors[j], 3});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = split_versatility_actors(actors, pairs, seed);
        CHECK(std::abs(static_cast<long>(s.val_actors.size()) - static_cast<long>(s.test_actors.size())) <= 1);
        const std::set<std::string> val(s.val_actors.begin(), s.val_actors.end());
        for (const auto& a : s.test_actors) CHECK_FALSE(val.count(a));
        CHECK(s.val_pairs.size() + s.test_pairs.size() == pairs.size());
        for (const auto& p : s.test_pairs) CHECK((!val.count(p.winner) || !val.count(p.loser)));
        for (const auto& p : s.val_pairs) CHECK((val.count(p.winner) && val.count(p.loser)));
    }
}

TEST_CASE("catalog and splits round-trip through files") {
    const auto d = make_catalog("Alien\tWeaver\t1\t3\t30.5\tF\nHeat\tPacino\t2\t-\t-\tM\nHeat\tDe Niro\t1\t7\t-\t-\n",
                                "Alien\tsci-fi\nHeat\tcrime\n", "roundtrip");
    const auto s = split_triples(d, {0.34, 0.33, 0.33}, 3);
    const auto dir = testutil::scratch_dir("roundtrip_out");
    write_catalog(s, dir / "t.tsv", dir / "p.tsv");
    write_splits(s, dir / "s.tsv");
    auto back = ingest_catalog(dir / "t.tsv", dir / "p.tsv");
    read_splits(back, dir / "s.tsv");
    CHECK(back.splits == s.splits);
    REQUIRE(back.triples.size() == s.triples.size());
    for (std::size_t i = 0; i < s.triples.size(); ++i) {
        CHECK(back.triples[i].persona == s.triples[i].persona);
        CHECK(back.triples[i].cast_rank == s.triples[i].cast_rank);
    }
    CHECK(testutil::read_text(dir / "t.tsv") ==
          "Alien\tWeaver\t1\t3\t30.5\tF\nHeat\tPacino\t2\t-\t-\tM\nHeat\tDe Niro\t1\t7\t-\t-\n");
}
