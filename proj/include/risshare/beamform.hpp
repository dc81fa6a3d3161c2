// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "risshare/metrics.hpp"
#include "risshare/socp.hpp"

namespace risshare {

struct BeamformResult {
    BeamVector v;
    double objective = 0.0;  // Re(theta_hat^H H_hat_s v)
    socp::Status status = socp::Status::optimal;
    bool degenerate = false;  // effective channel is zero, any v is optimal
    bool power_active = false;
    std::vector<bool> interference_active;
    double kkt_residual = 0.0;
};

/// Conic program over the normalized beam u = v / sqrt(P_max), interleaved
/// real/imaginary coordinates: max Re(a^H u) s.t. ||u|| <= 1, the per-PN
/// interference cones and Im(a^H u) = 0, with a = H_hat_s^H theta_hat.
/// The objective is scaled by 1 / ||a||.
socp::Problem beamform_problem(const ProblemData& pd, const ReflectVector& theta, double p_max_w,
                               const std::vector<double>& gamma_bar_w);

/// Optimal S-AP beamformer for a fixed reflect vector.
BeamformResult solve_beamformer(const ProblemData& pd, const ReflectVector& theta, double p_max_w,
                                const std::vector<double>& gamma_bar_w,
                                const socp::Settings& settings = {});

}  // namespace risshare
