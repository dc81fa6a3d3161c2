// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "risshare/types.hpp"

/// Dense second-order cone programming.
///
///   minimize    c^T x
///   subject to  ||A_i x + b_i|| <= g_i^T x + d_i     for every cone i
///               F x = h
///
/// A cone with zero rows in A_i is a linear inequality g_i^T x + d_i >= 0.
/// Equalities are eliminated by a null-space substitution before the conic
/// solve, which runs a homogeneous self-dual primal-dual interior-point method
/// with Nesterov-Todd scaling and Mehrotra correction.
namespace risshare::socp {

struct Cone {
    RMat A;
    RVec b;
    RVec g;
    double d = 0.0;

    Index rows() const { return A.rows(); }
};

struct Problem {
    RVec c;
    std::vector<Cone> cones;
    RMat F;  // equality rows, may be empty (0 x dim)
    RVec h;

    Index dim() const { return c.size(); }

    /// Throws std::invalid_argument on any dimension mismatch.
    void validate() const;
};

enum class Status { optimal, infeasible, unbounded, max_iter, numerical_error };

std::string to_string(Status s);

struct Settings {
    double tol_kkt = 1e-8;    // certification threshold for `optimal`
    double tol_inner = 1e-10; // interior-point stopping target
    int max_iter = 200;
};

struct Solution {
    RVec x;
    double obj = 0.0;
    Status status = Status::max_iter;
    double kkt_residual = 0.0;
    int iterations = 0;
    /// Dual multiplier per cone, ordered as (scalar part, vector part) to match
    /// the slack (g^T x + d, A x + b).
    std::vector<RVec> cone_duals;
    RVec eq_duals;
    /// infeasible: stacked z with G^T z = 0, h^T z = -1 (z in K).
    /// unbounded: a recession direction x with c^T x = -1.
    RVec certificate;
};

Solution solve(const Problem& p, const Settings& settings = {});

/// Independent KKT recheck evaluated from the original problem data.
struct KktReport {
    double primal = 0.0;         // cone and equality violation
    double dual = 0.0;           // stationarity and dual-cone violation
    double complementarity = 0.0;
    double max() const;
};

KktReport check_kkt(const Problem& p, const RVec& x, const std::vector<RVec>& cone_duals,
                    const RVec& eq_duals);

/// Outside-distance of (g^T x + d, A x + b) from the cone; 0 when inside.
double cone_violation(const Cone& cone, const RVec& x);

/// Realification of C^M as R^{2M}, interleaved (re_0, im_0, re_1, im_1, ...).
class ComplexEmbedding {
public:
    explicit ComplexEmbedding(Index complex_dim);

    Index complex_dim() const { return m_; }
    Index real_dim() const { return 2 * m_; }

    RVec embed(const CVec& v) const;
    CVec lift(const RVec& x) const;

    /// 2 x 2M block mapping x to (Re(a^H v), Im(a^H v)).
    RMat conj_dot_rows(const CVec& a) const;

    /// Real 2R x 2M matrix of the complex linear map v -> B v.
    RMat linear_map(const CMat& B) const;

private:
    Index m_;
};

/// Rotated-cone embedding of ||B x||^2 <= t over `n_vars` real variables,
/// where x occupies columns [x_offset, x_offset + B.cols()) and t column t_index:
/// ||[2 B x; t - 1]|| <= t + 1.
Cone quad_leq_linear_cone(const RMat& B, Index x_offset, Index t_index, Index n_vars);

/// Factor a Hermitian PSD matrix as Phi = B^H B with B of size rank x n.
/// Throws std::domain_error when an eigenvalue is below -tol * trace.
CMat factor_psd(const CMat& phi, double tol = 1e-12);

}  // namespace risshare::socp
