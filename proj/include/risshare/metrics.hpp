// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "risshare/scenario.hpp"

namespace risshare {

struct BeamVector {
    CVec v;
};

/// SU signal-to-interference ratio. When the interference power falls below
/// kDegenerateFloor the ratio is reported as +inf with `degenerate` set.
struct SirValue {
    static constexpr double kDegenerateFloor = 1e-30;
    double sir = 0.0;
    bool degenerate = false;
};

struct LinkReport {
    double sir = 0.0;
    double rate_bpshz = 0.0;
    std::vector<double> interference_w;
    std::vector<bool> feasible;
    bool degenerate = false;

    bool all_feasible() const;
};

/// Relative slack granted to every interference and power check.
inline constexpr double kFeasibilityTol = 1e-9;

inline bool within_threshold(double value, double threshold) {
    return value <= threshold * (1.0 + kFeasibilityTol);
}

double rate_bpshz(double sir);

/// |theta_hat^H H_hat_s v|^2.
double su_signal_power(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v);
/// sum_j P_j |h~_j^H theta_hat|^2, primary interference only.
double su_interference_power(const ProblemData& pd, const ReflectVector& theta);
/// theta_hat^H Phi_sum theta_hat: interference plus the folded noise floor.
double su_denominator(const ProblemData& pd, const ReflectVector& theta);

/// Ratio of the signal power to su_denominator.
SirValue su_sir(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v);

/// Per-PN interference |theta_hat^H H_hat_sj v|^2 in watts.
std::vector<double> pn_interference(const ProblemData& pd, const ReflectVector& theta,
                                    const BeamVector& v);

/// SINR of PU j with the secondary link treated as interference.
double pu_sinr(const ChannelSet& channels, const ReflectVector& theta, const BeamVector& v, Index j,
               double p_pap_w, double noise_w);

LinkReport link_report(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v,
                       const std::vector<double>& gamma_bar_w);

}  // namespace risshare
