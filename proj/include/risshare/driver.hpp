// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "risshare/beamform.hpp"
#include "risshare/gld.hpp"
#include "risshare/npsp.hpp"

namespace risshare {

struct AoConfig {
    int max_rounds = 20;
    double rel_tol = 1e-4;  // stop once a round improves the SIR by less than this, relative
    /// Fold the SU noise power into the SIR denominator of every optimizer and report.
    bool include_noise = true;
    gld::Config gld{.init_t_slack = 0.0};
    npsp::Config npsp;

    void validate() const;
};

struct AoResult {
    ReflectVector theta = ReflectVector::off(1);
    BeamVector v;
    std::vector<double> sir_trace;  // [0] at the start pair, then one entry per round
    int rounds = 0;
    bool degenerate = false;  // effective channel vanished at the start; baseline returned
    double worst_inner_kkt = 0.0;  // over every certified conic solve
    int inner_failures = 0;        // conic solves that did not certify
    int conic_solves = 0;
};

/// Random start [0.9 u; 1] with unit-modulus u, beam first, then alternate
/// GLD and beamforming until the SIR stalls or max_rounds.
AoResult ao_solve(const ProblemData& pd, const Scenario& scenario, const AoConfig& cfg,
                  std::mt19937_64& rng);

/// Problem matrices with the configured noise folding.
ProblemData problem_for(const Scenario& scenario, const ChannelSet& channels, const AoConfig& cfg);

struct TrialResult {
    double rate_continuous = 0.0;
    std::optional<double> rate_discrete;  // absent when no feasible quantization was found
    double rate_no_ris = 0.0;
    double rate_random_phase = 0.0;
    std::vector<double> sir_trace;
    bool feasible_continuous = false;
    bool feasible_discrete = false;  // true when absent
    bool feasible_no_ris = false;
    bool feasible_random = false;
    bool degenerate = false;
    double worst_inner_kkt = 0.0;
    int inner_failures = 0;
    int conic_solves = 0;

    bool all_feasible() const {
        return feasible_continuous && feasible_discrete && feasible_no_ris && feasible_random;
    }
};

/// Seed of trial `index` under base seed `seed`; shared by every sweep point.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

/// Channels, AO, quantization and both baselines for one trial.
TrialResult run_trial(const Scenario& scenario, const AoConfig& cfg, std::uint64_t trial_seed);

enum class SweepKind { pmax, pns, gamma, n };

const char* to_string(SweepKind k);
/// Parses "pmax", "pns", "gamma" or "n"; throws std::invalid_argument otherwise.
SweepKind parse_sweep_kind(const std::string& s);

/// P_max -2..14 dBm step 2; J 1..4; Gamma_bar -125..-105 dBm step 5; N {1, 4, 8, 16, 32}.
std::vector<double> default_sweep_values(SweepKind k);

/// Copy of `base` with the swept parameter set to `value`.
Scenario apply_sweep(const Scenario& base, SweepKind k, double value);

struct Stat {
    double mean = 0.0;
    double se = 0.0;  // NaN with fewer than two samples
    int count = 0;
};

Stat summarize(const std::vector<double>& xs);

struct SweepPoint {
    double value = 0.0;
    std::vector<TrialResult> trials;
    Stat continuous, discrete, no_ris, random_phase;
    double discrete_found_fraction = 0.0;
};

struct SweepTable {
    SweepKind kind = SweepKind::pmax;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<SweepPoint> points;
};

/// Trial i uses trial_seed(seed, i) at every point. `threads` = 0 picks the
/// hardware concurrency; results do not depend on it.
SweepTable run_sweep(const Scenario& base, SweepKind kind, const std::vector<double>& values,
                     int trials, std::uint64_t seed, const AoConfig& cfg, int threads = 0);

std::string csv_header();
std::string to_csv(const SweepTable& table);
/// Throws std::invalid_argument on an empty table and std::runtime_error naming
/// the path when the file cannot be written.
void emit_csv(const SweepTable& table, const std::string& path);
/// Per-round SIR of every trial: value, trial, round, sir.
void emit_trace_csv(const SweepTable& table, const std::string& path);

}  // namespace risshare
