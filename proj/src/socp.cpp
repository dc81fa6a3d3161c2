// SPDX-License-Identifier: Apache-2.0
#include "risshare/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace risshare::socp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Seg = Eigen::Ref<RVec>;
using CSeg = Eigen::Ref<const RVec>;

// One cone block of the stacked standard form G x + s = h, s in K.
struct Block {
    Index offset = 0;
    Index size = 0;
    std::vector<Index> support;  // columns of G with a nonzero in this block
    bool contiguous = false;     // support is a single column range
    RMat g_support;              // size x support.size()
};

// Nesterov-Todd scaling of one cone: W z = W^{-1} s = lambda.
struct Scaling {
    double beta = 1.0;  // m >= 2: W = beta (2 v v^T - J); m == 1: W = beta
    RVec v;
    RVec lambda;
};

double soc_residual(double u0, double norm1) { return (u0 - norm1) * (u0 + norm1); }

// out = u o w on one block; out must not alias u or w.
void jordan(const CSeg& u, const CSeg& w, Seg out) {
    if (u.size() == 1) {
        out(0) = u(0) * w(0);
        return;
    }
    const Index t = u.size() - 1;
    out(0) = u.dot(w);
    out.tail(t) = u(0) * w.tail(t) + w(0) * u.tail(t);
}

// Solve lambda o x = y for x in place of y.
void jordan_div(const CSeg& lambda, Seg y) {
    if (y.size() == 1) {
        y(0) /= lambda(0);
        return;
    }
    const Index t = y.size() - 1;
    const double l0 = lambda(0);
    const double det = soc_residual(l0, lambda.tail(t).norm());
    const double x0 = (l0 * y(0) - lambda.tail(t).dot(y.tail(t))) / det;
    y.tail(t) = (y.tail(t) - x0 * lambda.tail(t)) / l0;
    y(0) = x0;
}

// u <- W u
void w_apply(const Scaling& sc, Seg u) {
    if (u.size() == 1) {
        u(0) *= sc.beta;
        return;
    }
    const double vu = sc.v.dot(u);
    u(0) = -u(0);
    u += (2.0 * vu) * sc.v;
    u *= sc.beta;
}

// u <- W^{-1} u, with W^{-1} = (2 J v v^T J - J) / beta
void w_inv_apply(const Scaling& sc, Seg u) {
    if (u.size() == 1) {
        u(0) /= sc.beta;
        return;
    }
    const Index t = u.size() - 1;
    const double jvu = sc.v(0) * u(0) - sc.v.tail(t).dot(u.tail(t));
    u(0) = 2.0 * jvu * sc.v(0) - u(0);
    u.tail(t) -= (2.0 * jvu) * sc.v.tail(t);
    u /= sc.beta;
}

RVec apply_w(const Scaling& sc, const RVec& u) {
    RVec out = u;
    w_apply(sc, out);
    return out;
}

bool compute_scaling(const CSeg& s, const CSeg& z, Scaling& sc) {
    if (s.size() == 1) {
        if (!(s(0) > 0.0) || !(z(0) > 0.0)) return false;
        sc.beta = std::sqrt(s(0) / z(0));
        sc.lambda = RVec::Constant(1, std::sqrt(s(0) * z(0)));
        return true;
    }
    const Index t = s.size() - 1;
    const double sres = soc_residual(s(0), s.tail(t).norm());
    const double zres = soc_residual(z(0), z.tail(t).norm());
    if (!(sres > 0.0) || !(zres > 0.0) || s(0) <= 0.0 || z(0) <= 0.0) return false;
    const double a = std::sqrt(sres);
    const double b = std::sqrt(zres);
    const RVec sb = s / a;
    const RVec zb = z / b;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    RVec wb(s.size());
    wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    wb.tail(t) = (sb.tail(t) - zb.tail(t)) / (2.0 * gamma);
    sc.beta = std::sqrt(a / b);
    const double denom = std::sqrt(2.0 * (wb(0) + 1.0));
    sc.v = wb / denom;
    sc.v(0) = (wb(0) + 1.0) / denom;
    sc.lambda = apply_w(sc, z);
    return true;
}

// Largest alpha with u + alpha * d in the cone, for u interior.
double max_step(const CSeg& u, const CSeg& d) {
    if (u.size() == 1) return d(0) < 0.0 ? -u(0) / d(0) : kInf;
    const Index t = u.size() - 1;
    const double c = soc_residual(u(0), u.tail(t).norm());
    const double b = 2.0 * (u(0) * d(0) - u.tail(t).dot(d.tail(t)));
    const double a = d(0) * d(0) - d.tail(t).squaredNorm();
    double alpha = kInf;
    const double scale = std::max({std::abs(a), std::abs(b), c});
    if (std::abs(a) <= 1e-15 * scale) {
        if (b < 0.0) alpha = -c / b;
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            for (double r : {q / a, q != 0.0 ? c / q : kInf}) {
                if (r > 0.0) alpha = std::min(alpha, r);
            }
        }
    }
    // The scalar part must stay nonnegative along the way as well.
    if (d(0) < 0.0) alpha = std::min(alpha, -u(0) / d(0));
    return alpha;
}

double unit_shift(const CSeg& u) {
    if (u.size() == 1) return -u(0);
    return u.tail(u.size() - 1).norm() - u(0);
}

double infnorm(const RVec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Reduced, equilibrated problem in standard form.
struct Standard {
    RVec c;
    RMat G;
    RVec h;
    std::vector<Block> blocks;
    Index n = 0;
    Index m = 0;
};

class Ipm {
public:
    Ipm(const Standard& p, const Settings& settings);

    enum class Outcome { converged, infeasible, unbounded, max_iter, numerical };

    Outcome run();

    RVec x, s, z;
    double tau = 1.0, kappa = 1.0;
    int iterations = 0;
    RVec cert;

private:
    enum class Op { w, w_inv, w2, w_inv2 };
    void apply_blocks(Op op, Seg u) const;
    bool factor_normal(bool identity);
    RVec g_t(const RVec& u) const;
    RVec g_mul(const RVec& x) const;
    // Solves G^T dz = a, G dx - W^2 dz = b with refinement on the block residual.
    void solve_kkt(const RVec& a, const RVec& b, RVec& dx, RVec& dz) const;

    struct Direction {
        RVec dx, dz, ds;
        double dtau = 0.0, dkappa = 0.0;
    };
    void direction(double gamma, const RVec& d_s, double d_k, const RVec& x1, const RVec& z1,
                   Direction& d);
    double step_length(const Direction& d);
    double metric() const;

    const Standard& p_;
    const Settings& settings_;
    std::vector<Scaling> sc_;
    std::vector<RMat> wg_;
    RMat normal_;
    Eigen::LLT<RMat> llt_;
    RVec rx_, rz_;
    double rt_ = 0.0;
    RVec work_;
};

Ipm::Ipm(const Standard& p, const Settings& settings)
    : p_(p), settings_(settings), sc_(p.blocks.size()), wg_(p.blocks.size()), work_(p.m) {}

RVec Ipm::g_t(const RVec& u) const {
    RVec out = RVec::Zero(p_.n);
    for (const Block& bl : p_.blocks) {
        if (bl.support.empty()) continue;
        const auto k = Index(bl.support.size());
        const auto seg = u.segment(bl.offset, bl.size);
        if (bl.contiguous) {
            out.segment(bl.support[0], k).noalias() += bl.g_support.transpose() * seg;
        } else {
            for (Index a = 0; a < k; ++a) out(bl.support[std::size_t(a)]) += bl.g_support.col(a).dot(seg);
        }
    }
    return out;
}

RVec Ipm::g_mul(const RVec& x) const {
    RVec out(p_.m);
    for (const Block& bl : p_.blocks) {
        auto seg = out.segment(bl.offset, bl.size);
        const auto k = Index(bl.support.size());
        if (bl.contiguous) {
            seg.noalias() = bl.g_support * x.segment(bl.support[0], k);
        } else {
            seg.setZero();
            for (Index a = 0; a < k; ++a) seg += x(bl.support[std::size_t(a)]) * bl.g_support.col(a);
        }
    }
    return out;
}

void Ipm::apply_blocks(Op op, Seg u) const {
    for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
        const Block& bl = p_.blocks[i];
        auto seg = u.segment(bl.offset, bl.size);
        switch (op) {
            case Op::w: w_apply(sc_[i], seg); break;
            case Op::w_inv: w_inv_apply(sc_[i], seg); break;
            case Op::w2:
                w_apply(sc_[i], seg);
                w_apply(sc_[i], seg);
                break;
            case Op::w_inv2:
                w_inv_apply(sc_[i], seg);
                w_inv_apply(sc_[i], seg);
                break;
        }
    }
}

bool Ipm::factor_normal(bool identity) {
    const Index n = p_.n;
    normal_.setZero(n, n);
    for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
        const Block& bl = p_.blocks[i];
        const auto k = Index(bl.support.size());
        if (k == 0) continue;
        RMat& wg = wg_[i];
        wg = bl.g_support;
        if (!identity)
            for (Index c = 0; c < k; ++c) w_inv_apply(sc_[i], wg.col(c));
        if (bl.contiguous) {
            normal_.block(bl.support[0], bl.support[0], k, k).selfadjointView<Eigen::Lower>().rankUpdate(
                wg.transpose());
        } else {
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b <= a; ++b)
                    normal_(bl.support[std::size_t(a)], bl.support[std::size_t(b)]) += wg.col(a).dot(wg.col(b));
        }
    }
    const double diag = n > 0 ? normal_.diagonal().cwiseAbs().maxCoeff() : 1.0;
    normal_.diagonal().array() += 1e-14 * std::max(diag, 1.0);
    llt_.compute(normal_);
    if (llt_.info() != Eigen::Success) {
        normal_.diagonal().array() += 1e-10 * std::max(diag, 1.0);
        llt_.compute(normal_);
    }
    return llt_.info() == Eigen::Success;
}

void Ipm::solve_kkt(const RVec& a, const RVec& b, RVec& dx, RVec& dz) const {
    RVec t = b;
    apply_blocks(Op::w_inv2, t);
    dx = llt_.solve(a + g_t(t));
    dz = g_mul(dx) - b;
    apply_blocks(Op::w_inv2, dz);
    const double scale = 1.0 + std::max(infnorm(a), infnorm(b));
    for (int k = 0; k < 3; ++k) {
        const RVec ra = a - g_t(dz);
        RVec w2dz = dz;
        apply_blocks(Op::w2, w2dz);
        const RVec rb = b - (g_mul(dx) - w2dz);
        if (std::max(infnorm(ra), infnorm(rb)) <= 1e-15 * scale) break;
        t = rb;
        apply_blocks(Op::w_inv2, t);
        const RVec ex = llt_.solve(ra + g_t(t));
        RVec ez = g_mul(ex) - rb;
        apply_blocks(Op::w_inv2, ez);
        dx += ex;
        dz += ez;
    }
}

void Ipm::direction(double gamma, const RVec& d_s, double d_k, const RVec& x1, const RVec& z1,
                    Direction& d) {
    const double keep = 1.0 - gamma;
    // wt = W (lambda \ d_s)
    RVec wt = d_s;
    for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
        const Block& bl = p_.blocks[i];
        jordan_div(sc_[i].lambda, wt.segment(bl.offset, bl.size));
    }
    apply_blocks(Op::w, wt);
    const RVec r1 = -keep * rx_;
    const RVec r2 = -keep * rz_ - wt;
    RVec x2, z2;
    solve_kkt(r1, r2, x2, z2);

    const double num = -keep * rt_ - d_k / tau - p_.c.dot(x2) - p_.h.dot(z2);
    const double den = p_.c.dot(x1) + p_.h.dot(z1) - kappa / tau;
    d.dtau = num / den;
    d.dx = x2 + d.dtau * x1;
    d.dz = z2 + d.dtau * z1;
    d.ds = d.dz;
    apply_blocks(Op::w2, d.ds);
    d.ds = wt - d.ds;
    d.dkappa = (d_k - kappa * d.dtau) / tau;
}

double Ipm::step_length(const Direction& d) {
    double alpha = kInf;
    RVec dss = d.ds;
    apply_blocks(Op::w_inv, dss);
    RVec dzs = d.dz;
    apply_blocks(Op::w, dzs);
    for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
        const Block& bl = p_.blocks[i];
        alpha = std::min({alpha, max_step(sc_[i].lambda, dss.segment(bl.offset, bl.size)),
                          max_step(sc_[i].lambda, dzs.segment(bl.offset, bl.size))});
    }
    if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
    if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
    return alpha;
}

// Same quantities as check_kkt, evaluated on the reduced scaled problem.
double Ipm::metric() const {
    const RVec xh = x / tau;
    const RVec zh = z / tau;
    const RVec st = p_.h - g_mul(xh);
    double primal = 0.0;
    double comp = 0.0;
    for (const Block& bl : p_.blocks) {
        const auto si = st.segment(bl.offset, bl.size);
        const double viol = std::max(0.0, unit_shift(si));
        const double hn = p_.h.segment(bl.offset, bl.size).cwiseAbs().maxCoeff();
        primal = std::max(primal, viol / (1.0 + hn));
        comp += std::abs(si.dot(zh.segment(bl.offset, bl.size)));
    }
    const double dual = infnorm(p_.c + g_t(zh)) / (1.0 + infnorm(p_.c));
    comp /= (1.0 + std::abs(p_.c.dot(xh)));
    return std::max({primal, dual, comp});
}

Ipm::Outcome Ipm::run() {
    const Index m = p_.m;
    const double degree = double(p_.blocks.size()) + 1.0;

    // Initial point: least-squares primal and least-norm dual, shifted into K.
    if (!factor_normal(true)) return Outcome::numerical;
    x = llt_.solve(g_t(p_.h));
    s = p_.h - g_mul(x);
    z = -(g_mul(llt_.solve(p_.c)));
    for (RVec* u : {&s, &z}) {
        for (const Block& bl : p_.blocks) {
            auto seg = u->segment(bl.offset, bl.size);
            const double shift = unit_shift(seg);
            if (shift >= 0.0) seg(0) += 1.0 + shift;
        }
    }
    tau = 1.0;
    kappa = 1.0;

    RVec e = RVec::Zero(m);
    for (const Block& bl : p_.blocks) e(bl.offset) = 1.0;

    // Late iterations can lose accuracy; the caller gets the best iterate seen.
    struct Snapshot {
        double merit = kInf;
        RVec x, s, z;
        double tau = 1.0, kappa = 1.0;
    } best;
    auto give_up = [&](Outcome o) {
        if (best.merit < kInf) {
            x = best.x;
            s = best.s;
            z = best.z;
            tau = best.tau;
            kappa = best.kappa;
        }
        return o;
    };

    RVec lam(m), lam_sq(m), d_s(m), dss(m), dzs(m);
    RVec x1, z1;
    Direction aff, dir;
    for (iterations = 0; iterations <= settings_.max_iter; ++iterations) {
        rx_ = g_t(z) + p_.c * tau;
        rz_ = s + g_mul(x) - p_.h * tau;
        rt_ = kappa + p_.c.dot(x) + p_.h.dot(z);
        const double mu = (s.dot(z) + tau * kappa) / degree;

        const double merit = metric();
        if (merit <= settings_.tol_inner) return Outcome::converged;
        if (merit < best.merit) best = {merit, x, s, z, tau, kappa};

        const double hz = p_.h.dot(z);
        if (hz < 0.0) {
            const double r = infnorm(g_t(z)) / -hz;
            if (r < settings_.tol_inner) {
                cert = z / -hz;
                return Outcome::infeasible;
            }
        }
        const double cx = p_.c.dot(x);
        if (cx < 0.0) {
            const double r = infnorm(g_mul(x) + s) / -cx;
            if (r < settings_.tol_inner) {
                cert = x / -cx;
                return Outcome::unbounded;
            }
        }
        if (iterations == settings_.max_iter) break;

        for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
            const Block& bl = p_.blocks[i];
            if (!compute_scaling(s.segment(bl.offset, bl.size), z.segment(bl.offset, bl.size), sc_[i]))
                return give_up(Outcome::numerical);
        }
        if (!factor_normal(false)) return give_up(Outcome::numerical);
        solve_kkt(-p_.c, p_.h, x1, z1);

        for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
            const Block& bl = p_.blocks[i];
            lam.segment(bl.offset, bl.size) = sc_[i].lambda;
            jordan(sc_[i].lambda, sc_[i].lambda, lam_sq.segment(bl.offset, bl.size));
        }

        // Affine predictor.
        direction(0.0, -lam_sq, -tau * kappa, x1, z1, aff);
        const double alpha_aff = std::min(1.0, step_length(aff));
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 1e-4, 1.0);

        // Combined corrector.
        dss = aff.ds;
        apply_blocks(Op::w_inv, dss);
        dzs = aff.dz;
        apply_blocks(Op::w, dzs);
        for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
            const Block& bl = p_.blocks[i];
            jordan(dss.segment(bl.offset, bl.size), dzs.segment(bl.offset, bl.size),
                   d_s.segment(bl.offset, bl.size));
        }
        d_s = -lam_sq - d_s + (sigma * mu) * e;
        const double d_k = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
        direction(sigma, d_s, d_k, x1, z1, dir);
        const double alpha = std::min(1.0, 0.99 * step_length(dir));
        if (!(alpha > 1e-14)) return give_up(Outcome::numerical);

        x += alpha * dir.dx;
        s += alpha * dir.ds;
        z += alpha * dir.dz;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }
    return give_up(Outcome::max_iter);
}

// Null-space substitution x = x0 + Z y for F x = h.
struct Elimination {
    RVec x0;
    RMat Z;
    std::vector<Index> free_cols;  // set when Z is a column selection

    RVec expand(const RVec& y) const {
        if (free_cols.empty() && Z.cols() > 0) return Z * y;
        RVec out = RVec::Zero(Z.rows());
        for (std::size_t k = 0; k < free_cols.size(); ++k) out(free_cols[k]) = y(Index(k));
        return out;
    }
    bool consistent = true;
};

Elimination eliminate(const Problem& p) {
    const Index n = p.dim();
    Elimination el;
    if (p.F.rows() == 0) {
        el.x0 = RVec::Zero(n);
        el.Z = RMat::Identity(n, n);
        for (Index j = 0; j < n; ++j) el.free_cols.push_back(j);
        return el;
    }
    // Fast path: every equality fixes a single variable.
    bool singleton = true;
    for (Index r = 0; r < p.F.rows() && singleton; ++r)
        singleton = (p.F.row(r).array() != 0.0).count() == 1;
    if (singleton) {
        el.x0 = RVec::Zero(n);
        std::vector<bool> fixed(std::size_t(n), false);
        for (Index r = 0; r < p.F.rows(); ++r) {
            Index col = 0;
            p.F.row(r).cwiseAbs().maxCoeff(&col);
            const double val = p.h(r) / p.F(r, col);
            if (fixed[std::size_t(col)] &&
                std::abs(el.x0(col) - val) > 1e-12 * (1.0 + std::abs(val)))
                el.consistent = false;
            fixed[std::size_t(col)] = true;
            el.x0(col) = val;
        }
        const auto n_free = Index(std::count(fixed.begin(), fixed.end(), false));
        el.Z = RMat::Zero(n, n_free);
        Index k = 0;
        for (Index j = 0; j < n; ++j)
            if (!fixed[std::size_t(j)]) {
                el.Z(j, k++) = 1.0;
                el.free_cols.push_back(j);
            }
        return el;
    }
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(p.F);
    cod.setThreshold(1e-12);
    el.x0 = cod.solve(p.h);
    el.consistent = infnorm(p.F * el.x0 - p.h) <= 1e-10 * (1.0 + infnorm(p.h));
    Eigen::ColPivHouseholderQR<RMat> qr(p.F.transpose());
    qr.setThreshold(1e-12);
    const Index rank = qr.rank();
    const RMat q = qr.householderQ();
    el.Z = q.rightCols(n - rank);
    return el;
}

RVec eq_multipliers(const Problem& p, const RVec& stationarity) {
    if (p.F.rows() == 0) return RVec();
    // F^T y = -(c + G^T z)
    return p.F.transpose().completeOrthogonalDecomposition().solve(-stationarity);
}

RVec cone_stationarity(const Problem& p, const std::vector<RVec>& z) {
    RVec r = p.c;
    for (std::size_t i = 0; i < p.cones.size(); ++i) {
        const Cone& k = p.cones[i];
        r -= k.g * z[i](0);
        if (k.rows() > 0) r -= k.A.transpose() * z[i].tail(k.rows());
    }
    return r;
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::max_iter: return "max_iter";
        case Status::numerical_error: return "numerical_error";
    }
    return "unknown";
}

void Problem::validate() const {
    const Index n = dim();
    for (const Cone& k : cones) {
        if (k.A.cols() != n && k.A.rows() > 0)
            throw std::invalid_argument("socp: cone matrix column count does not match dim");
        if (k.b.size() != k.A.rows())
            throw std::invalid_argument("socp: cone offset length does not match cone rows");
        if (k.g.size() != n) throw std::invalid_argument("socp: cone g length does not match dim");
    }
    if (F.rows() > 0 && F.cols() != n)
        throw std::invalid_argument("socp: equality matrix column count does not match dim");
    if (h.size() != F.rows())
        throw std::invalid_argument("socp: equality right-hand side length mismatch");
}

double KktReport::max() const { return std::max({primal, dual, complementarity}); }

double cone_violation(const Cone& cone, const RVec& x) {
    const double s0 = cone.g.dot(x) + cone.d;
    if (cone.rows() == 0) return std::max(0.0, -s0);
    return std::max(0.0, (cone.A * x + cone.b).norm() - s0);
}

KktReport check_kkt(const Problem& p, const RVec& x, const std::vector<RVec>& cone_duals,
                    const RVec& eq_duals) {
    KktReport rep;
    double cx = p.c.dot(x);
    for (std::size_t i = 0; i < p.cones.size(); ++i) {
        const Cone& k = p.cones[i];
        const double scale = 1.0 + std::max(std::abs(k.d), infnorm(k.b));
        rep.primal = std::max(rep.primal, cone_violation(k, x) / scale);

        const RVec& zi = cone_duals[i];
        const double zviol = zi.size() > 1 ? std::max(0.0, zi.tail(zi.size() - 1).norm() - zi(0))
                                           : std::max(0.0, -zi(0));
        rep.dual = std::max(rep.dual, zviol / (1.0 + infnorm(zi)));

        double sz = (k.g.dot(x) + k.d) * zi(0);
        if (k.rows() > 0) sz += (k.A * x + k.b).dot(zi.tail(k.rows()));
        rep.complementarity += std::abs(sz);
    }
    rep.complementarity /= (1.0 + std::abs(cx));
    if (p.F.rows() > 0)
        rep.primal = std::max(rep.primal, infnorm(p.F * x - p.h) / (1.0 + infnorm(p.h)));
    RVec r = cone_stationarity(p, cone_duals);
    if (p.F.rows() > 0 && eq_duals.size() == p.F.rows()) r += p.F.transpose() * eq_duals;
    rep.dual = std::max(rep.dual, infnorm(r) / (1.0 + infnorm(p.c)));
    return rep;
}

Solution solve(const Problem& p, const Settings& settings) {
    p.validate();
    const Index n = p.dim();
    Solution sol;
    sol.cone_duals.assign(p.cones.size(), RVec());
    for (std::size_t i = 0; i < p.cones.size(); ++i)
        sol.cone_duals[i] = RVec::Zero(p.cones[i].rows() + 1);

    const Elimination el = eliminate(p);
    if (!el.consistent) {
        sol.x = el.x0;
        sol.obj = p.c.dot(sol.x);
        sol.status = Status::infeasible;
        sol.kkt_residual = kInf;
        return sol;
    }

    // Stack cones as G x + s = h with s = (g^T x + d, A x + b).
    Index m = 0;
    for (const Cone& k : p.cones) m += k.rows() + 1;
    RMat G(m, n);
    RVec h(m);
    std::vector<Block> blocks(p.cones.size());
    {
        Index off = 0;
        for (std::size_t i = 0; i < p.cones.size(); ++i) {
            const Cone& k = p.cones[i];
            G.row(off) = -k.g.transpose();
            h(off) = k.d;
            if (k.rows() > 0) {
                G.middleRows(off + 1, k.rows()) = -k.A;
                h.segment(off + 1, k.rows()) = k.b;
            }
            blocks[i].offset = off;
            blocks[i].size = k.rows() + 1;
            off += blocks[i].size;
        }
    }

    Standard st;
    st.n = el.Z.cols();
    st.m = m;
    if (!el.free_cols.empty()) {
        st.c.resize(st.n);
        st.G.resize(m, st.n);
        for (Index k = 0; k < st.n; ++k) {
            st.c(k) = p.c(el.free_cols[std::size_t(k)]);
            st.G.col(k) = G.col(el.free_cols[std::size_t(k)]);
        }
    } else {
        st.c = el.Z.transpose() * p.c;
        st.G = G * el.Z;
    }
    st.h = h - G * el.x0;

    auto finish = [&](const RVec& y_red, const RVec& z_std) {
        sol.x = el.x0 + el.expand(y_red);
        sol.obj = p.c.dot(sol.x);
        for (std::size_t i = 0; i < blocks.size(); ++i)
            sol.cone_duals[i] = z_std.segment(blocks[i].offset, blocks[i].size);
        sol.eq_duals = eq_multipliers(p, cone_stationarity(p, sol.cone_duals));
        sol.kkt_residual = check_kkt(p, sol.x, sol.cone_duals, sol.eq_duals).max();
    };

    if (st.n == 0 || m == 0) {
        RVec y = RVec::Zero(st.n);
        if (m == 0 && st.n > 0 && infnorm(st.c) > 1e-14 * (1.0 + infnorm(p.c))) {
            sol.x = el.x0;
            sol.obj = -kInf;
            sol.status = Status::unbounded;
            sol.certificate = -el.expand(st.c) / st.c.squaredNorm();
            return sol;
        }
        finish(y, RVec::Zero(m));
        bool feasible = true;
        for (const Cone& k : p.cones)
            feasible = feasible && cone_violation(k, sol.x) <= settings.tol_kkt * (1.0 + std::abs(k.d) + infnorm(k.b));
        sol.status = feasible ? Status::optimal : Status::infeasible;
        return sol;
    }

    // Equilibrate: one positive factor per cone keeps cone membership intact.
    RVec rho(Index(blocks.size()));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& bl = blocks[i];
        const double mag = std::max(st.G.middleRows(bl.offset, bl.size).cwiseAbs().maxCoeff(),
                                    infnorm(st.h.segment(bl.offset, bl.size)));
        rho(Index(i)) = mag > 0.0 ? 1.0 / mag : 1.0;
        st.G.middleRows(bl.offset, bl.size) *= rho(Index(i));
        st.h.segment(bl.offset, bl.size) *= rho(Index(i));
    }
    const double cnorm = infnorm(st.c);
    const double sigma_c = cnorm > 0.0 ? cnorm : 1.0;
    st.c /= sigma_c;

    for (auto& bl : blocks) {
        for (Index j = 0; j < st.n; ++j) {
            if ((st.G.block(bl.offset, j, bl.size, 1).array() != 0.0).any())
                bl.support.push_back(j);
        }
        bl.contiguous = !bl.support.empty() &&
                        bl.support.back() - bl.support.front() + 1 == Index(bl.support.size());
        bl.g_support.resize(bl.size, Index(bl.support.size()));
        for (std::size_t a = 0; a < bl.support.size(); ++a)
            bl.g_support.col(Index(a)) = st.G.block(bl.offset, bl.support[a], bl.size, 1);
    }
    st.blocks = blocks;

    Ipm ipm(st, settings);
    const Ipm::Outcome out = ipm.run();
    sol.iterations = ipm.iterations;

    auto unscale_z = [&](const RVec& zs) {
        RVec zo(m);
        for (std::size_t i = 0; i < blocks.size(); ++i)
            zo.segment(blocks[i].offset, blocks[i].size) =
                zs.segment(blocks[i].offset, blocks[i].size) * rho(Index(i));
        return zo;
    };

    switch (out) {
        case Ipm::Outcome::infeasible: {
            RVec zo = unscale_z(ipm.cert);
            const double denom = -(h - G * el.x0).dot(zo);
            sol.certificate = denom > 0.0 ? RVec(zo / denom) : zo;
            sol.x = el.x0;
            sol.obj = p.c.dot(sol.x);
            sol.status = Status::infeasible;
            sol.kkt_residual = kInf;
            return sol;
        }
        case Ipm::Outcome::unbounded: {
            const RVec dir = el.expand(ipm.cert);
            const double cd = p.c.dot(dir);
            sol.certificate = cd < 0.0 ? RVec(dir / -cd) : dir;
            sol.x = el.x0;
            sol.obj = -kInf;
            sol.status = Status::unbounded;
            sol.kkt_residual = kInf;
            return sol;
        }
        default: break;
    }

    const RVec zs = ipm.z / ipm.tau * sigma_c;
    finish(ipm.x / ipm.tau, unscale_z(zs));
    if (sol.kkt_residual <= settings.tol_kkt) {
        sol.status = Status::optimal;
    } else {
        sol.status = out == Ipm::Outcome::numerical ? Status::numerical_error : Status::max_iter;
    }
    return sol;
}

ComplexEmbedding::ComplexEmbedding(Index complex_dim) : m_(complex_dim) {
    if (complex_dim < 1) throw std::invalid_argument("ComplexEmbedding: dimension must be >= 1");
}

RVec ComplexEmbedding::embed(const CVec& v) const {
    if (v.size() != m_) throw std::invalid_argument("ComplexEmbedding::embed: size mismatch");
    RVec x(2 * m_);
    for (Index k = 0; k < m_; ++k) {
        x(2 * k) = v(k).real();
        x(2 * k + 1) = v(k).imag();
    }
    return x;
}

CVec ComplexEmbedding::lift(const RVec& x) const {
    if (x.size() != 2 * m_) throw std::invalid_argument("ComplexEmbedding::lift: size mismatch");
    CVec v(m_);
    for (Index k = 0; k < m_; ++k) v(k) = cdouble(x(2 * k), x(2 * k + 1));
    return v;
}

RMat ComplexEmbedding::conj_dot_rows(const CVec& a) const {
    if (a.size() != m_) throw std::invalid_argument("ComplexEmbedding::conj_dot_rows: size mismatch");
    // a^H v = sum (ar - i ai)(vr + i vi)
    RMat rows(2, 2 * m_);
    for (Index k = 0; k < m_; ++k) {
        rows(0, 2 * k) = a(k).real();
        rows(0, 2 * k + 1) = a(k).imag();
        rows(1, 2 * k) = -a(k).imag();
        rows(1, 2 * k + 1) = a(k).real();
    }
    return rows;
}

RMat ComplexEmbedding::linear_map(const CMat& B) const {
    if (B.cols() != m_) throw std::invalid_argument("ComplexEmbedding::linear_map: size mismatch");
    RMat out(2 * B.rows(), 2 * m_);
    for (Index r = 0; r < B.rows(); ++r) {
        for (Index k = 0; k < m_; ++k) {
            const cdouble b = B(r, k);
            out(2 * r, 2 * k) = b.real();
            out(2 * r, 2 * k + 1) = -b.imag();
            out(2 * r + 1, 2 * k) = b.imag();
            out(2 * r + 1, 2 * k + 1) = b.real();
        }
    }
    return out;
}

Cone quad_leq_linear_cone(const RMat& B, Index x_offset, Index t_index, Index n_vars) {
    if (x_offset < 0 || x_offset + B.cols() > n_vars || t_index < 0 || t_index >= n_vars)
        throw std::invalid_argument("quad_leq_linear_cone: variable indices out of range");
    Cone k;
    k.A = RMat::Zero(B.rows() + 1, n_vars);
    k.A.block(0, x_offset, B.rows(), B.cols()) = 2.0 * B;
    k.A(B.rows(), t_index) = 1.0;
    k.b = RVec::Zero(B.rows() + 1);
    k.b(B.rows()) = -1.0;
    k.g = RVec::Zero(n_vars);
    k.g(t_index) = 1.0;
    k.d = 1.0;
    return k;
}

CMat factor_psd(const CMat& phi, double tol) {
    if (phi.rows() != phi.cols()) throw std::invalid_argument("factor_psd: matrix must be square");
    Eigen::SelfAdjointEigenSolver<CMat> es(phi);
    const RVec& ev = es.eigenvalues();
    const double trace = std::max(phi.trace().real(), 0.0);
    if (ev.size() > 0 && ev.minCoeff() < -tol * std::max(trace, 1e-300))
        throw std::domain_error("factor_psd: matrix has a negative eigenvalue beyond tolerance");
    const double cut = tol * std::max(trace, 1e-300);
    std::vector<Index> keep;
    for (Index k = 0; k < ev.size(); ++k)
        if (ev(k) > cut) keep.push_back(k);
    CMat B(Index(keep.size()), phi.cols());
    for (std::size_t r = 0; r < keep.size(); ++r)
        B.row(Index(r)) = std::sqrt(ev(keep[r])) * es.eigenvectors().col(keep[r]).adjoint();
    return B;
}

}  // namespace risshare::socp
