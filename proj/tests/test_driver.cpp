// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "risshare/config.hpp"
#include "risshare/driver.hpp"

using namespace risshare;
using namespace testing;

namespace {

Scenario small_scenario(int n) {
    Scenario s;
    s.n_elements = n;
    return s;
}

bool pair_feasible(const ProblemData& pd, const Scenario& sc, const ReflectVector& th, const BeamVector& v) {
    return within_threshold(v.v.squaredNorm(), sc.p_max_w()) &&
           link_report(pd, th, v, sc.gamma_bar_w()).all_feasible();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("risshare_test_" + name);
}

}  // namespace

TEST_CASE("alternating rounds never lower the SIR") {
    const Scenario sc = small_scenario(8);
    const AoConfig cfg;
    int improved = 0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const ChannelSet ch = generate_channels(sc, trial_seed(7, k));
        const ProblemData pd = problem_for(sc, ch, cfg);
        std::mt19937_64 rng(k);
        const AoResult r = ao_solve(pd, sc, cfg, rng);
        REQUIRE(r.sir_trace.size() >= 2);
        for (std::size_t i = 1; i < r.sir_trace.size(); ++i)
            CHECK(r.sir_trace[i] >= r.sir_trace[i - 1] * (1.0 - 1e-6));
        CHECK(r.rounds <= cfg.max_rounds);
        CHECK(r.inner_failures == 0);
        CHECK(r.worst_inner_kkt <= 1e-8);
        CHECK(pair_feasible(pd, sc, r.theta, r.v));
        CHECK(rel_err(su_sir(pd, r.theta, r.v).sir, r.sir_trace.back()) <= 1e-12);
        improved += r.sir_trace.back() > r.sir_trace.front() * 1.01;
    }
    CHECK(improved >= 40);
}

TEST_CASE("one round is a beamformer solve followed by one reflect solve") {
    const Scenario sc = small_scenario(6);
    AoConfig cfg;
    cfg.max_rounds = 1;
    for (std::uint64_t k = 0; k < 5; ++k) {
        const ProblemData pd = problem_for(sc, generate_channels(sc, 100 + k), cfg);
        std::mt19937_64 rng(k), replay(k);
        const AoResult r = ao_solve(pd, sc, cfg, rng);

        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        CVec u(pd.n());
        for (Index e = 0; e < pd.n(); ++e) u(e) = std::polar(0.9, phase(replay));
        const ReflectVector start = ReflectVector::from_elements(u);
        const BeamformResult bf = solve_beamformer(pd, start, sc.p_max_w(), sc.gamma_bar_w());
        const gld::State st = gld::solve(pd, bf.v, start, sc.gamma_bar_w(), cfg.gld);

        CHECK(r.rounds == 1);
        CHECK(r.sir_trace.size() == 2);
        CHECK((r.v.v - bf.v.v).norm() == 0.0);
        CHECK((r.theta.lifted() - st.theta_hat).norm() == 0.0);
        CHECK(r.sir_trace[0] == su_sir(pd, start, bf.v).sir);
        CHECK(r.sir_trace[1] >= r.sir_trace[0]);
    }
}

TEST_CASE("trials: feasibility, baselines and quantization") {
    const Scenario sc = small_scenario(8);
    const AoConfig cfg;
    int found = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const std::uint64_t seed = trial_seed(3, k);
        const TrialResult t = run_trial(sc, cfg, seed);
        CHECK(t.all_feasible());
        CHECK_FALSE(t.degenerate);
        CHECK(t.rate_continuous >= 0.0);
        CHECK(t.worst_inner_kkt <= 1e-8);
        CHECK(t.inner_failures == 0);
        if (t.rate_discrete) {
            ++found;
            CHECK(*t.rate_discrete <= t.rate_continuous + 1e-9);
        }

        // The RIS-off baseline is the direct-link ratio.
        const ChannelSet ch = generate_channels(sc, seed);
        const ProblemData pd = problem_for(sc, ch, cfg);
        const ReflectVector off = ReflectVector::off(sc.n_elements);
        const BeamVector v = solve_beamformer(pd, off, sc.p_max_w(), sc.gamma_bar_w()).v;
        double den = sc.noise_w();
        for (std::size_t j = 0; j < ch.h_pj_b.size(); ++j) den += sc.p_pap_w()[j] * std::norm(ch.h_pj_b[j]);
        const double direct = std::norm(ch.h_s.dot(v.v)) / den;
        CHECK(rel_err(t.rate_no_ris, std::log2(1.0 + direct)) <= 1e-12);
        CHECK(t.rate_continuous >= t.rate_no_ris);
    }
    CHECK(found >= 1);
}

TEST_CASE("noise folding can be switched off") {
    Scenario sc = small_scenario(4);
    AoConfig cfg;
    cfg.include_noise = false;
    const ChannelSet ch = generate_channels(sc, 5);
    CHECK(problem_for(sc, ch, cfg).noise_w == 0.0);
    cfg.include_noise = true;
    CHECK(problem_for(sc, ch, cfg).noise_w == sc.noise_w());
}

TEST_CASE("seeds are shared across sweep points") {
    const Scenario sc = small_scenario(4);
    const SweepTable t = run_sweep(sc, SweepKind::pmax, {0.0, 6.0, 12.0}, 4, 11, AoConfig{}, 1);
    REQUIRE(t.points.size() == 3);
    // The RIS-off baseline sees the same channels, and more power never hurts it.
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(t.points[1].trials[i].rate_no_ris >= t.points[0].trials[i].rate_no_ris * (1.0 - 1e-9));
        CHECK(t.points[2].trials[i].rate_no_ris >= t.points[1].trials[i].rate_no_ris * (1.0 - 1e-9));
    }
    CHECK(trial_seed(11, 0) != trial_seed(11, 1));
    CHECK(trial_seed(11, 0) != trial_seed(12, 0));
}

TEST_CASE("sweep output is deterministic and independent of the thread count") {
    const Scenario sc = small_scenario(4);
    const SweepTable a = run_sweep(sc, SweepKind::pns, {1, 2}, 3, 99, AoConfig{}, 1);
    const SweepTable b = run_sweep(sc, SweepKind::pns, {1, 2}, 3, 99, AoConfig{}, 3);
    CHECK(to_csv(a) == to_csv(b));
    const SweepTable c = run_sweep(sc, SweepKind::pns, {1, 2}, 3, 100, AoConfig{}, 1);
    CHECK(to_csv(a) != to_csv(c));
}

TEST_CASE("CSV emission") {
    SweepTable empty;
    const auto path = temp_path("empty.csv");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(emit_csv(empty, path.string()), std::invalid_argument);
    CHECK_FALSE(std::filesystem::exists(path));

    const SweepTable one = run_sweep(small_scenario(4), SweepKind::gamma, {-115.0}, 1, 5, AoConfig{}, 1);
    const auto p1 = temp_path("one.csv");
    emit_csv(one, p1.string());
    std::ifstream in(p1);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto rows = parse_csv(ss.str());
    CHECK(rows.size() == 2);
    CHECK(ss.str().rfind(csv_header(), 0) == 0);
    REQUIRE(rows[1].size() == 11);
    CHECK(rows[1][0] == "gamma");
    CHECK(rows[1][3] == "nan");  // one trial has no standard error
    std::filesystem::remove(p1);

    CHECK_THROWS_AS(emit_csv(one, "/nonexistent-dir/x.csv"), std::runtime_error);
    try {
        emit_csv(one, "/nonexistent-dir/x.csv");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
    }
}

TEST_CASE("CSV round trip recovers the means") {
    const SweepTable t = run_sweep(small_scenario(4), SweepKind::n, {1, 4}, 3, 21, AoConfig{}, 1);
    const auto rows = parse_csv(to_csv(t));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "sweep_param");
    for (std::size_t p = 0; p < 2; ++p) {
        const auto& r = rows[p + 1];
        const SweepPoint& pt = t.points[p];
        CHECK(std::stod(r[1]) == pt.value);
        CHECK(rel_err(std::stod(r[2]), pt.continuous.mean) <= 1e-12);
        CHECK(rel_err(std::stod(r[3]), pt.continuous.se) <= 1e-12);
        CHECK(rel_err(std::stod(r[6]), pt.no_ris.mean) <= 1e-12);
        CHECK(rel_err(std::stod(r[7]), pt.random_phase.mean) <= 1e-12);
        CHECK(std::stod(r[8]) == pt.discrete_found_fraction);
        if (pt.discrete.count > 0) CHECK(rel_err(std::stod(r[4]), pt.discrete.mean) <= 1e-12);
        CHECK(r[9] == "3");
        CHECK(r[10] == "21");
    }
}

TEST_CASE("trace output lists every round") {
    const SweepTable t = run_sweep(small_scenario(4), SweepKind::pns, {1}, 2, 3, AoConfig{}, 1);
    const auto path = temp_path("trace.csv");
    emit_trace_csv(t, path.string());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto rows = parse_csv(ss.str());
    CHECK(rows[0] == std::vector<std::string>{"value", "trial", "round", "sir"});
    CHECK(rows.size() == 1 + t.points[0].trials[0].sir_trace.size() + t.points[0].trials[1].sir_trace.size());
    std::filesystem::remove(path);
}

TEST_CASE("summary statistics") {
    const Stat s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(s.count == 4);
    CHECK(std::isnan(summarize({1.0}).se));
    CHECK(std::isnan(summarize({}).mean));
}

TEST_CASE("sweep kinds and values") {
    CHECK(parse_sweep_kind("pmax") == SweepKind::pmax);
    CHECK(parse_sweep_kind("n") == SweepKind::n);
    CHECK_THROWS_AS(parse_sweep_kind("power"), std::invalid_argument);
    const auto pm = default_sweep_values(SweepKind::pmax);
    CHECK(pm.front() == -2.0);
    CHECK(pm.back() == 14.0);
    CHECK(pm.size() == 9);
    const Scenario base;
    CHECK(apply_sweep(base, SweepKind::pns, 3).j_pns == 3);
    CHECK(apply_sweep(base, SweepKind::gamma, -120).gamma_bar_dbm == std::vector<double>{-120, -120});
    CHECK(apply_sweep(base, SweepKind::n, 16).n_elements == 16);
    CHECK_THROWS_AS(apply_sweep(base, SweepKind::pns, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(base, SweepKind::pmax, {0.0}, 0, 1, AoConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(base, SweepKind::pmax, {}, 1, 1, AoConfig{}), std::invalid_argument);

    AoConfig bad;
    bad.max_rounds = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("configuration parsing") {
    const RunConfig d = parse_config("{}");
    CHECK(d.scenario.n_elements == 32);
    CHECK(d.ao.max_rounds == 20);

    const RunConfig c = parse_config(R"({
        "n_elements": 8, "j_pns": 3, "p_pap_dbm": [10, 12, 14], "gamma_bar_dbm": [-110, -115, -120],
        "rician_k_db": "inf", "rng_seed": 18446744073709551615, "max_rounds": 3, "include_noise": false,
        "gld": {"k_bar": 50}, "npsp": {"mu": 0.5, "lagrangian_consistent": true},
        "los_angles_deg": {"sap_ris_aod": 10, "pap_ris_aoa": [1, 2, 3], "ris_pu_aod": [4, 5, 6]}
    })");
    CHECK(c.scenario.n_elements == 8);
    CHECK(c.scenario.gamma_bar_dbm[2] == -120.0);
    CHECK_THROWS_AS(parse_config(R"({"gamma_bar_dbm": [-110, "inf"]})"), ConfigError);
    CHECK(std::isinf(c.scenario.rician_k_db));
    CHECK(c.scenario.rng_seed == 18446744073709551615ULL);
    CHECK(c.ao.max_rounds == 3);
    CHECK_FALSE(c.ao.include_noise);
    CHECK(c.ao.gld.k_bar == 50);
    CHECK(c.ao.gld.init_t_slack == 0.0);
    CHECK(c.ao.npsp.mu == 0.5);
    CHECK(c.ao.npsp.lagrangian_consistent);
    REQUIRE(c.scenario.los_angles_deg.has_value());
    CHECK(c.scenario.los_angles_deg->sap_ris_aod == 10.0);

    CHECK_THROWS_AS(parse_config(R"({"n_elemnts": 8})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"gld": {"kbar": 8}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n_elements": "8"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n_elements": 8.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"p_max_dbm": "lots"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"rng_seed": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"max_rounds": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"j_pns": 3})"), ConfigError);  // per-PN lists stay at length 2
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
