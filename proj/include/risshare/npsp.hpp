// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "risshare/metrics.hpp"

/// Quantization of continuous reflecting coefficients onto a discrete phase
/// codebook under the PN interference limits: a penalized nearest-point
/// search with an auxiliary copy b of the discrete vector, plus an
/// exhaustive reference for small N.
///
/// Vectors passed in and out are the N lifted elements (ReflectVector::elements()).
/// Codebook levels are physical phases, so a lifted entry with phase -phi
/// realizes level phi.
namespace risshare::npsp {

struct PhaseCodebook {
    std::vector<double> levels;  // radians

    /// Uniform grid 2 pi l / L.
    static PhaseCodebook uniform(int l);

    /// Throws std::invalid_argument for fewer than 2 levels, non-finite or
    /// coincident (mod 2 pi) levels.
    void validate() const;

    int size() const { return int(levels.size()); }
    /// Index of the level with the smallest circular distance; ties go to the lower index.
    int nearest(double physical_angle) const;
    /// Lifted coefficient of amplitude `amplitude` realizing level `index`.
    cdouble lifted(double amplitude, int index) const;
};

/// Circular distance between two angles, in [0, pi].
double circular_distance(double a, double b);

struct Config {
    double mu = 1.0;
    int n_itr = 200;
    double varsigma = 1e-8;
    /// false: auxiliary update with the printed system matrix
    ///   Y = (2 + mu) I + 2 sum_j w_j g_j g_j^H and right side 2 theta_bar + mu theta_d + lambda.
    /// true: the stationarity condition of the Lagrangian in b,
    ///   Y = (2 + mu) I and right side 2 theta_bar + mu theta_d - lambda.
    bool lagrangian_consistent = false;
    /// Express each interference limit in units of its threshold, so that
    /// the multipliers w_j are dimensionless. Thresholds of 0 or +inf keep raw units.
    bool normalize_interference = false;

    void validate() const;
};

/// Interference of a candidate: Gamma_j(theta) = |theta^H g_j + d_j|^2 <= limit_j,
/// where (g_j, d_j) split H_hat_sj v into its RIS and direct parts.
struct Constraints {
    std::vector<CVec> g;
    std::vector<cdouble> d;
    std::vector<double> limit;

    double value(Index j, const CVec& theta) const;
};

Constraints interference_constraints(const ProblemData& pd, const BeamVector& v,
                                     const std::vector<double>& gamma_bar_w, bool normalize);

struct State {
    CVec theta_d;
    CVec b;
    CVec lambda;
    std::vector<double> w;
    double f_obj = 0.0;  // +inf until a feasible iterate appears
    CVec theta_o;
    int iteration = 0;
};

/// b = theta_bar, lambda = 0, w = 0, no feasible point yet.
State initial_state(const CVec& theta_bar, Index j);

CVec theta_step(const State& s, const CVec& theta_bar, const PhaseCodebook& codebook,
                const Config& cfg);
CVec b_step(const State& s, const CVec& theta_bar, const Constraints& k, const Config& cfg);
/// lambda += mu (b - theta_d); w_j += mu max(0, Gamma_j(theta_d) - limit_j).
void dual_step(State& s, const Constraints& k, const Config& cfg);

struct Result {
    bool found = false;
    CVec theta_o;  // lifted elements, valid when found
    double f_obj = 0.0;  // +inf when not found
    int iterations = 0;
};

Result solve(const CVec& theta_bar, const ProblemData& pd, const BeamVector& v,
             const PhaseCodebook& codebook, const std::vector<double>& gamma_bar_w,
             const Config& cfg = {});

inline constexpr std::uint64_t kExhaustiveBudget = 1000000;

/// Minimum-distance feasible codebook assignment by enumeration.
/// Throws std::length_error when L^N exceeds kExhaustiveBudget.
Result exhaustive_quantize(const CVec& theta_bar, const ProblemData& pd, const BeamVector& v,
                           const PhaseCodebook& codebook, const std::vector<double>& gamma_bar_w);

/// Feasibility of a quantized candidate with the same test as the metrics module.
bool feasible(const CVec& theta, const ProblemData& pd, const BeamVector& v,
              const std::vector<double>& gamma_bar_w);

}  // namespace risshare::npsp
