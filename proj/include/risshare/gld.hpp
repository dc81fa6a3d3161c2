// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "risshare/metrics.hpp"
#include "risshare/socp.hpp"

/// Reflect-vector design with the beam fixed: minimize
///   q(theta_hat, t) = -|(H_hat_s v)^H theta_hat|^2 / t
/// subject to the element modulus limits, the fixed last entry, the PN
/// interference limits and theta_hat^H Phi theta_hat <= t, by repeatedly
/// minimizing the first-order model of q over that convex domain.
namespace risshare::gld {

struct Config {
    int k_bar = 100;
    double epsilon = 0.9;          // damping toward the previous iterate
    double descent_tol = 1e-6;     // minimum relative decrease of q
    double boundary_margin = 1e-6; // relative slack counted as interior
    double init_t_slack = 0.1;     // starting t = (1 + slack) theta^H Phi theta

    void validate() const;
};

enum class Status { converged, iteration_cap, stationary, inner_failure };

const char* to_string(Status s);

struct TraceRow {
    int iteration = 0;
    double q = 0.0;
    double t = 0.0;
    double max_residual = 0.0;
};

struct State {
    CVec theta_hat;  // lifted, last entry 1
    double t = 0.0;
    double q_value = 0.0;
    int iteration = 0;
    std::vector<double> trace;  // q after each iteration, trace[0] at the start point
    std::vector<TraceRow> rows;
    std::vector<double> inner_kkt;  // independent recheck of every inner solve
    Status status = Status::converged;

    ReflectVector reflect() const { return ReflectVector::from_lifted(theta_hat); }
};

struct Gradient {
    CVec theta_block;  // -(H_hat_s v)((H_hat_s v)^H theta_hat) / t
    double t_component = 0.0;

    /// Gradient over the interleaved real embedding of theta_hat followed by t.
    RVec real_embedding() const;
};

double q_eval(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t);
Gradient q_gradient(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t);

/// Model problem at (theta_hat, t). Variables: interleaved theta_hat, then t / t_ref.
socp::Problem linearize(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t,
                        const std::vector<double>& gamma_bar_w, double t_ref);

/// Largest violation of the domain constraints, relative to each bound.
double domain_residual(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t,
                       const std::vector<double>& gamma_bar_w);

/// Feasible starting point [delta u; 1] with random unit-modulus u, halving
/// delta until every interference limit holds with margin. Falls back to the
/// RIS-off vector when no such delta is found.
ReflectVector interior_start(const ProblemData& pd, const BeamVector& v,
                             const std::vector<double>& gamma_bar_w, std::mt19937_64& rng,
                             double delta = 0.9);

/// Throws std::invalid_argument when `init` violates the domain.
State solve(const ProblemData& pd, const BeamVector& v, const ReflectVector& init,
            const std::vector<double>& gamma_bar_w, const Config& cfg = {},
            const socp::Settings& settings = {});

}  // namespace risshare::gld
