#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "pcmc/config.hpp"
#include "pcmc/errors.hpp"
#include "pcmc/presets.hpp"

using namespace pcmc;

namespace {

RunConfig sample_config() {
    RunConfig cfg;
    cfg.name = "sample";
    cfg.structure.a = 15;
    cfg.structure.r_over_a = 0.3;
    cfg.structure.d_over_a = 0.6;
    cfg.structure.num_layers = 4;
    cfg.defects.push_back(IndexChange{2.4});
    cfg.defects.push_back(FractionalEdgeDislocation{Axis::X, 2.0});
    cfg.dipole = DipoleOrientation::Y;
    cfg.atom_x = 0.5;
    cfg.window_lo = 0.22;
    cfg.seed = 42;
    cfg.dump_checkpoint = true;
    return cfg;
}

RunConfig roundtrip(const RunConfig& cfg) {
    std::istringstream in(write_config(cfg));
    return parse_config(in);
}

} // namespace

TEST_CASE("config round-trips losslessly") {
    CHECK(roundtrip(sample_config()) == sample_config());

    RunConfig plain;
    CHECK(roundtrip(plain) == plain);

    RunConfig radius;
    radius.defects.push_back(RadiusChange{0.2});
    CHECK(roundtrip(radius) == radius);

    RunConfig four;
    four.defects.push_back(FourHoleTuning{0.2, 0.225});
    four.coupling_weight = CouplingWeightKind::SqrtEps;
    CHECK(roundtrip(four) == four);

    RunConfig coupled;
    coupled.defects.push_back(CoupledDefects{Axis::Y, 0.2, 2.0});
    CHECK(roundtrip(coupled) == coupled);
}

TEST_CASE("writer output is deterministic") {
    CHECK(write_config(sample_config()) == write_config(sample_config()));
}

TEST_CASE("parse errors carry line numbers") {
    std::istringstream in("structure.a = 15\n\nbogus_key = 3\n");
    try {
        parse_config(in);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }

    std::istringstream bad_num("structure.r_over_a = abc\n");
    CHECK_THROWS_AS(parse_config(bad_num), ConfigError);

    std::istringstream no_eq("structure.a\n");
    try {
        parse_config(no_eq);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("comments and blank lines are ignored") {
    std::istringstream in(
        "# a comment\n\nstructure.a = 18  # trailing comment\n");
    CHECK(parse_config(in).structure.a == 18);
}

TEST_CASE("validation names the violated invariant") {
    RunConfig cfg;
    cfg.structure.r_over_a = 0.25;
    cfg.defects.push_back(RadiusChange{0.3});
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("r_def_over_a") != std::string::npos);
    }

    RunConfig bad_window;
    bad_window.window_lo = 0.5;
    bad_window.window_hi = 0.3;
    CHECK_THROWS_AS(bad_window.validate(), ConfigError);
}

TEST_CASE("presets resolve and validate") {
    CHECK(!presets().empty());
    for (const auto& p : presets()) {
        INFO(p.name);
        CHECK_NOTHROW(p.config.validate());
        CHECK(roundtrip(p.config) == p.config);
    }
    CHECK(preset_config("table1-row2").structure.r_over_a ==
          doctest::Approx(0.275));
    CHECK(preset_config("fig6").structure.d_over_a == doctest::Approx(0.75));
    CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}
