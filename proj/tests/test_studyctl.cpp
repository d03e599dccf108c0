#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nullpulse/errors.hpp"
#include "nullpulse/run_config.hpp"
#include "nullpulse/study.hpp"

using namespace nullpulse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* tiny_config_json() {
    return R"({
        "data": {"delta": 0.05, "amplitude": 1.0, "n_fields": 1},
        "grid": {"ubar_max": 2.5, "h_fine": 0.003125, "h_coarse": 0.05},
        "coupling": {"preset": "q0", "scale": 1.0},
        "norms": {"alpha": 0.9, "max_order": 1},
        "diagnostics": {"decay_t_lo": 1.6, "decay_t_hi": 2.3,
                        "identity_ubar": 2.2}
    })";
}

} // namespace

TEST_CASE("minimal config gets documented defaults") {
    const RunConfig c = parse_run_config(R"({"data": {}})");
    CHECK(c.data.delta == 0.05);
    CHECK(c.data.amplitude == 1.0);
    CHECK(c.data.n_fields == 1);
    CHECK(c.ubar_max == 40.0);
    CHECK(c.h_fine == doctest::Approx(0.05 / 32.0).epsilon(1e-15));
    CHECK(c.h_coarse == 0.02);
    CHECK(c.coupling_preset == "q0");
    CHECK(c.alpha == 0.9);
    CHECK(c.max_order == 2);
    CHECK(c.decay_t_lo == 5.0);
    CHECK(c.decay_t_hi == 40.0);
    CHECK(c.identity_ubar == 8.0);
    CHECK(c.checkpoint_every == 0);
    CHECK(!c.coupling.empty());
    CHECK(c.coupling.all_null());
}

TEST_CASE("canonical serialization round-trips byte for byte") {
    const RunConfig c = parse_run_config(tiny_config_json());
    const std::string first = canonical_json(c);
    const RunConfig back = parse_run_config(first);
    CHECK(canonical_json(back) == first);

    const std::string fp = config_fingerprint(c);
    CHECK(fp.size() == 16);
    CHECK(fp == config_fingerprint(back));

    RunConfig other = c;
    other.data = ShortPulseData::make(0.1, 1.0, c.data.profile, 1);
    CHECK(config_fingerprint(other) != fp);
}

TEST_CASE("config rejections name the offending key") {
    CHECK_THROWS_AS(parse_run_config(R"({"data": {"delta": 0.5}})"), config_error);
    CHECK_THROWS_AS(parse_run_config(
                        R"({"data": {}, "norms": {"alpha": 0.5}})"),
                    config_error);
    CHECK_THROWS_AS(parse_run_config(
                        R"({"data": {}, "coupling": {"preset": "qq"}})"),
                    config_error);
    CHECK_THROWS_AS(
        parse_run_config(
            R"({"data": {}, "coupling": {"preset": "q0", "terms": []}})"),
        config_error);
    CHECK_THROWS_AS(
        parse_run_config(
            R"({"data": {}, "coupling": {"terms": [{"target": 0,
                "matrix": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}]}})"),
        config_error);

    try {
        parse_run_config(R"({"data": {}, "grdi": {}})");
        FAIL("unknown key accepted");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("grdi") != std::string::npos);
    }
}

TEST_CASE("scan helpers rebuild data and couplings") {
    const RunConfig base = parse_run_config(tiny_config_json());

    const RunConfig narrow = with_delta(base, 0.025);
    CHECK(narrow.data.delta == 0.025);
    CHECK(narrow.h_fine ==
          doctest::Approx(0.025 / base.study.h_over_delta).epsilon(1e-15));
    CHECK(narrow.coupling.all_null());
    CHECK(narrow.coupling_preset == "q0");

    const RunConfig hot = with_amplitude_preset(base, 4.0, "dt_squared");
    CHECK(hot.data.amplitude == 4.0);
    CHECK(hot.data.delta == base.data.delta);
    CHECK(hot.coupling_preset == "dt_squared");
    CHECK(!hot.coupling.all_null());

    CHECK(make_preset_coupling("zero", 1.0, 2).empty());
    CHECK(make_preset_coupling("q0", 1.0, 2).all_null());
    CHECK(!make_preset_coupling("dt_squared", 1.0, 1).all_null());
    CHECK_THROWS_AS(make_preset_coupling("bogus", 1.0, 1), config_error);
}

TEST_CASE("power-law slope is exact on synthetic data") {
    std::vector<std::pair<double, double>> series;
    for (int k = 1; k <= 6; ++k) {
        const double x = 0.5 * k;
        series.push_back({x, 3.0 * x * x});
    }
    CHECK(power_law_slope(series) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(power_law_slope({{1.0, 2.0}}), fit_error);
    CHECK_THROWS_AS(power_law_slope({{1.0, 2.0}, {2.0, 0.0}}), fit_error);
}

TEST_CASE("run driver writes the complete diagnostics set deterministically") {
    const RunConfig c = parse_run_config(tiny_config_json());
    const fs::path base = fs::path("unit_tmp") / "study";
    fs::remove_all(base);

    const std::string dir_a = (base / "a").string();
    const RunSummary s = run_one(c, dir_a);
    CHECK(!s.blew_up);
    CHECK(s.top_ubar == doctest::Approx(2.5));
    CHECK(s.region3_sup <= 1e-13);
    CHECK(s.initial_energy > 0.0);
    CHECK(s.flux_tail_final < 1.0);

    const char* files[] = {"manifest.json",    "supnorm.csv",
                           "decay_fits.csv",   "flux_incoming.csv",
                           "cdelta_certificate.csv", "weighted_norms.csv",
                           "energy_identity.csv",    "pointwise_bound.csv",
                           "region3.csv"};
    for (const char* f : files)
        CHECK_MESSAGE(fs::exists(fs::path(dir_a) / f), std::string(f));
    CHECK(!fs::exists(fs::path(dir_a) / "blowup.csv"));

    const std::string dir_b = (base / "b").string();
    run_one(c, dir_b);
    for (const char* f : files) {
        if (std::string(f) == "manifest.json") continue;
        CHECK_MESSAGE(slurp((fs::path(dir_a) / f).string()) ==
                          slurp((fs::path(dir_b) / f).string()),
                      std::string(f));
    }
}

TEST_CASE("checkpointed rerun reproduces the fresh run") {
    RunConfig c = parse_run_config(tiny_config_json());
    const fs::path base = fs::path("unit_tmp") / "resume";
    fs::remove_all(base);

    const std::string fresh_dir = (base / "fresh").string();
    run_one(c, fresh_dir);

    c.checkpoint_every = 64;
    const std::string ck_dir = (base / "ck").string();
    run_one(c, ck_dir);
    REQUIRE(fs::exists(fs::path(ck_dir) / "checkpoint" / "manifest.json"));
    run_one(c, ck_dir);

    CHECK(slurp((fs::path(fresh_dir) / "supnorm.csv").string()) ==
          slurp((fs::path(ck_dir) / "supnorm.csv").string()));
}
