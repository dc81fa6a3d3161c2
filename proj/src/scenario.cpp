// SPDX-License-Identifier: Apache-2.0
#include "risshare/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace risshare {

namespace {

// Stream identifiers. Each link has its own generator so that direct links
// (and the links of PN j) are identical across changes of N, M or J.
enum Stream : std::uint32_t {
    kHs = 1,
    kHsj,
    kHj,
    kHpjb,
    kHsr,
    kHrb,
    kHpjr,
    kHrj,
};

std::mt19937_64 substream(std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), stream, index};
    return std::mt19937_64(seq);
}

class Gaussian {
public:
    explicit Gaussian(std::mt19937_64& rng) : rng_(rng) {}
    // Circularly-symmetric complex Gaussian with E|x|^2 = 1.
    cdouble operator()() {
        const double re = normal_(rng_);
        const double im = normal_(rng_);
        return cdouble(re, im) * std::sqrt(0.5);
    }

private:
    std::mt19937_64& rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

CVec rayleigh(std::mt19937_64& rng, Index len, double amplitude) {
    Gaussian g(rng);
    CVec out(len);
    for (Index k = 0; k < len; ++k) out(k) = amplitude * g();
    return out;
}

double draw_angle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-90.0, 90.0);
    return u(rng);
}

CVec steering(Index len, double angle_deg) {
    const double phase = std::numbers::pi * std::sin(angle_deg * std::numbers::pi / 180.0);
    CVec a(len);
    for (Index k = 0; k < len; ++k) a(k) = std::polar(1.0, phase * double(k));
    return a;
}

struct RicianWeights {
    double los;
    double nlos;
};

RicianWeights rician_weights(double k_db) {
    if (std::isinf(k_db) && k_db > 0) return {1.0, 0.0};
    const double k = db_to_linear(k_db);
    return {std::sqrt(k / (k + 1.0)), std::sqrt(1.0 / (k + 1.0))};
}

// Rician vector link: LoS steering plus scattered part, unit mean-square per entry.
CVec rician_vector(std::mt19937_64& rng, Index len, const std::optional<double>& fixed_angle,
                   RicianWeights w, double amplitude) {
    const double angle = fixed_angle ? *fixed_angle : draw_angle(rng);
    CVec out = w.los * steering(len, angle);
    if (w.nlos > 0.0) out += w.nlos * rayleigh(rng, len, 1.0);
    return amplitude * out;
}

bool all_finite(const CVec& v) { return v.allFinite(); }

}  // namespace

void Scenario::validate() const {
    if (j_pns < 1) throw std::invalid_argument("scenario: j_pns must be >= 1");
    if (m_antennas < 1) throw std::invalid_argument("scenario: m_antennas must be >= 1");
    if (n_elements < 1) throw std::invalid_argument("scenario: n_elements must be >= 1");
    if (codebook_bits < 1 || codebook_bits > 16)
        throw std::invalid_argument("scenario: codebook_bits must be in [1, 16]");
    if (p_pap_dbm.size() != std::size_t(j_pns))
        throw std::invalid_argument("scenario: p_pap_dbm must have j_pns entries");
    if (gamma_bar_dbm.size() != std::size_t(j_pns))
        throw std::invalid_argument("scenario: gamma_bar_dbm must have j_pns entries");
    auto finite = [](double x, const char* name) {
        if (!std::isfinite(x)) throw std::invalid_argument(std::string("scenario: ") + name + " must be finite");
    };
    finite(p_max_dbm, "p_max_dbm");
    finite(noise_power_dbm, "noise_power_dbm");
    finite(direct_pl_db, "direct_pl_db");
    finite(cascade_pl_db, "cascade_pl_db");
    for (double x : p_pap_dbm) finite(x, "p_pap_dbm");
    for (double x : gamma_bar_dbm) finite(x, "gamma_bar_dbm");
    if (std::isnan(rician_k_db)) throw std::invalid_argument("scenario: rician_k_db is NaN");
    if (los_angles_deg) {
        if (los_angles_deg->pap_ris_aoa.size() != std::size_t(j_pns) ||
            los_angles_deg->ris_pu_aod.size() != std::size_t(j_pns))
            throw std::invalid_argument("scenario: los_angles_deg per-PN lists must have j_pns entries");
    }
}

std::vector<double> Scenario::p_pap_w() const {
    std::vector<double> out;
    for (double x : p_pap_dbm) out.push_back(dbm_to_watts(x));
    return out;
}

std::vector<double> Scenario::gamma_bar_w() const {
    std::vector<double> out;
    for (double x : gamma_bar_dbm) out.push_back(dbm_to_watts(x));
    return out;
}

Scenario Scenario::with_pns(int j) const {
    Scenario s = *this;
    s.j_pns = j;
    auto resize = [j](std::vector<double>& v) {
        const double fill = v.empty() ? 0.0 : v.front();
        v.resize(std::size_t(j), fill);
    };
    resize(s.p_pap_dbm);
    resize(s.gamma_bar_dbm);
    if (s.los_angles_deg) {
        resize(s.los_angles_deg->pap_ris_aoa);
        resize(s.los_angles_deg->ris_pu_aod);
    }
    return s;
}

void ChannelSet::validate() const {
    const auto jn = h_j.size();
    if (h_pj_b.size() != jn || h_sj.size() != jn || h_pj_r.size() != jn || h_rj.size() != jn)
        throw std::invalid_argument("channels: per-PN lists have inconsistent lengths");
    if (jn == 0) throw std::invalid_argument("channels: at least one PN is required");
    if (H_sr.rows() != n() || H_sr.cols() != m())
        throw std::invalid_argument("channels: H_sr must be N x M");
    for (std::size_t k = 0; k < jn; ++k) {
        if (h_sj[k].size() != m()) throw std::invalid_argument("channels: h_sj must have M entries");
        if (h_pj_r[k].size() != n() || h_rj[k].size() != n())
            throw std::invalid_argument("channels: RIS vectors must have N entries");
        if (!std::isfinite(std::abs(h_j[k])) || !std::isfinite(std::abs(h_pj_b[k])) ||
            !all_finite(h_sj[k]) || !all_finite(h_pj_r[k]) || !all_finite(h_rj[k]))
            throw std::invalid_argument("channels: non-finite entry");
    }
    if (!all_finite(h_s) || !all_finite(h_rb) || !H_sr.allFinite())
        throw std::invalid_argument("channels: non-finite entry");
}

double path_loss_db(LinkModel model, double distance_m) {
    if (!(distance_m > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
    const double lg = std::log10(distance_m);
    return model == LinkModel::direct ? 32.6 + 36.7 * lg : 35.6 + 22.0 * lg;
}

ChannelSet generate_channels(const Scenario& sc, std::uint64_t seed) {
    sc.validate();
    const Index n = sc.n_elements;
    const Index m = sc.m_antennas;
    const auto j = std::size_t(sc.j_pns);
    const double direct_amp = std::sqrt(db_to_linear(-sc.direct_pl_db));
    // Cascade loss is a total over the product link, split evenly between segments.
    const double segment_amp = std::pow(10.0, -sc.cascade_pl_db / 40.0);
    const RicianWeights w = rician_weights(sc.rician_k_db);
    const auto& los = sc.los_angles_deg;

    ChannelSet ch;
    {
        auto rng = substream(seed, kHs, 0);
        ch.h_s = rayleigh(rng, m, direct_amp);
    }
    for (std::size_t k = 0; k < j; ++k) {
        const auto idx = std::uint32_t(k);
        auto r1 = substream(seed, kHsj, idx);
        ch.h_sj.push_back(rayleigh(r1, m, direct_amp));
        auto r2 = substream(seed, kHj, idx);
        ch.h_j.push_back(rayleigh(r2, 1, direct_amp)(0));
        auto r3 = substream(seed, kHpjb, idx);
        ch.h_pj_b.push_back(rayleigh(r3, 1, direct_amp)(0));
        auto r4 = substream(seed, kHpjr, idx);
        ch.h_pj_r.push_back(rician_vector(r4, n, los ? std::optional(los->pap_ris_aoa[k]) : std::nullopt,
                                          w, segment_amp));
        auto r5 = substream(seed, kHrj, idx);
        ch.h_rj.push_back(rician_vector(r5, n, los ? std::optional(los->ris_pu_aod[k]) : std::nullopt,
                                        w, segment_amp));
    }
    {
        auto rng = substream(seed, kHrb, 0);
        ch.h_rb = rician_vector(rng, n, los ? std::optional(los->ris_su_aod) : std::nullopt, w, segment_amp);
    }
    {
        auto rng = substream(seed, kHsr, 0);
        const double aod = los ? los->sap_ris_aod : draw_angle(rng);
        const double aoa = los ? los->sap_ris_aoa : draw_angle(rng);
        CMat h = w.los * (steering(n, aoa) * steering(m, aod).adjoint());
        if (w.nlos > 0.0) {
            Gaussian g(rng);
            for (Index c = 0; c < m; ++c)
                for (Index r = 0; r < n; ++r) h(r, c) += w.nlos * g();
        }
        ch.H_sr = segment_amp * h;
    }
    return ch;
}

ProblemData assemble_problem(const std::vector<double>& p_pap_w, const ChannelSet& ch,
                             double noise_w) {
    ch.validate();
    if (!(noise_w >= 0.0) || !std::isfinite(noise_w))
        throw std::invalid_argument("assemble_problem: noise power must be finite and nonnegative");
    if (p_pap_w.size() != std::size_t(ch.j()))
        throw std::invalid_argument("assemble_problem: one P-AP power per PN is required");
    const Index n = ch.n();
    const Index m = ch.m();
    const Index j = ch.j();

    auto lift_matrix = [&](const CVec& h_r, const CVec& h_direct) {
        CMat out(n + 1, m);
        out.topRows(n) = h_r.conjugate().asDiagonal() * ch.H_sr;
        out.row(n) = h_direct.adjoint();
        return out;
    };

    ProblemData pd;
    pd.p_pap_w = p_pap_w;
    pd.noise_w = noise_w;
    pd.H_hat_s = lift_matrix(ch.h_rb, ch.h_s);
    pd.phi_sum = CMat::Zero(n + 1, n + 1);
    pd.phi_factor = CMat::Zero(j + (noise_w > 0.0 ? 1 : 0), n + 1);
    for (Index k = 0; k < j; ++k) {
        const auto ku = std::size_t(k);
        pd.H_hat_sj.push_back(lift_matrix(ch.h_rj[ku], ch.h_sj[ku]));
        CVec ht(n + 1);
        ht.head(n) = ch.h_rb.conjugate().cwiseProduct(ch.h_pj_r[ku]);
        ht(n) = ch.h_pj_b[ku];
        pd.h_tilde.push_back(ht);
        pd.phi_sum += p_pap_w[ku] * ht * ht.adjoint();
        pd.phi_factor.row(k) = std::sqrt(p_pap_w[ku]) * ht.adjoint();
    }
    if (noise_w > 0.0) {
        pd.phi_sum(n, n) += noise_w;
        pd.phi_factor(j, n) = std::sqrt(noise_w);
    }
    return pd;
}

ProblemData assemble_problem(const Scenario& sc, const ChannelSet& ch, double noise_w) {
    sc.validate();
    if (ch.j() != sc.j_pns || ch.m() != sc.m_antennas || ch.n() != sc.n_elements)
        throw std::invalid_argument("assemble_problem: channel dimensions do not match the scenario");
    return assemble_problem(sc.p_pap_w(), ch, noise_w);
}

ReflectVector ReflectVector::from_lifted(CVec theta_hat) {
    if (theta_hat.size() < 2) throw std::invalid_argument("ReflectVector: needs at least one element");
    const Index n = theta_hat.size() - 1;
    if (theta_hat(n) != cdouble(1.0, 0.0))
        throw std::invalid_argument("ReflectVector: last entry must be exactly 1");
    for (Index k = 0; k < n; ++k) {
        if (!std::isfinite(std::abs(theta_hat(k))) || std::abs(theta_hat(k)) > 1.0 + kModulusTol)
            throw std::invalid_argument("ReflectVector: element modulus exceeds 1");
    }
    return ReflectVector(std::move(theta_hat));
}

ReflectVector ReflectVector::from_elements(const CVec& theta) {
    CVec th(theta.size() + 1);
    th.head(theta.size()) = theta;
    th(theta.size()) = 1.0;
    return from_lifted(std::move(th));
}

ReflectVector ReflectVector::off(Index n) { return from_elements(CVec::Zero(n)); }

}  // namespace risshare
