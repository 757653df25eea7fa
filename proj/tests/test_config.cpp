#include "actorgauss/config.hpp"
#include "actorgauss/io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace actorgauss;

TEST_CASE("settings and overrides") {
    RunConfig c;
    apply_override(c, "dim=12");
    apply_override(c, " persona_mode = T ");
    apply_override(c, "dropout_rate=0.25");
    apply_override(c, "spherical=false");
    apply_override(c, "norm=l1");
    CHECK(c.model.dim == 12);
    CHECK(c.model.persona_mode == PersonaMode::Topic);
    CHECK(c.train.dropout_keep == doctest::Approx(0.75));
    CHECK_FALSE(c.model.spherical);
    CHECK(c.norm == Norm::L1);
    CHECK_THROWS(apply_override(c, "nonsense=1"));
    CHECK_THROWS(apply_override(c, "dim"));
    CHECK_THROWS(apply_override(c, "dim=ten"));
    CHECK_THROWS(apply_override(c, "persona_mode=XYZ"));
    CHECK(persona_mode_name(PersonaMode::AgeGender) == "AG");
}

TEST_CASE("config file errors name path and line") {
    const auto dir = testutil::scratch_dir("config");
    const auto good = testutil::write_text(dir / "a.cfg", "# comment\n\nepochs = 7\nmargin=2.5\n");
    RunConfig c;
    apply_config_file(c, good);
    CHECK(c.train.epochs == 7);
    CHECK(c.train.margin == 2.5);
    const auto bad = testutil::write_text(dir / "b.cfg", "epochs=3\nlr_initial=fast\n");
    try {
        apply_config_file(c, bad);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("b.cfg:2") != std::string::npos);
    }
}

TEST_CASE("reports round-trip and are written atomically") {
    const auto dir = testutil::scratch_dir("report");
    const std::vector<MetricRow> rows{{"mean_rank", 0.1 + 0.2, 120, 3}, {"hits_at_10", 87.5, 120, 3}};
    write_report(rows, dir / "r.tsv");
    CHECK(testutil::read_text(dir / "r.tsv") ==
          "# name\tvalue\tn\tseed\nmean_rank\t0.30000000000000004\t120\t3\nhits_at_10\t87.5\t120\t3\n");
    CHECK_FALSE(std::filesystem::exists(dir / "r.tsv.tmp"));
    const auto back = read_report(dir / "r.tsv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].value == rows[0].value);
    CHECK(back[1].name == "hits_at_10");
    testutil::write_text(dir / "bad.tsv", "# name\tvalue\tn\tseed\nx\t1\n");
    CHECK_THROWS_AS(read_report(dir / "bad.tsv"), FormatError);
}

TEST_CASE("number formatting is shortest round-trip") {
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(1e-300) == "1e-300");
    CHECK(io::parse_double(io::format_double(1.0 / 3.0), "x") == 1.0 / 3.0);
    CHECK(io::parse_int("42", "x") == 42);
    CHECK_THROWS(io::parse_int("4x", "x"));
}
