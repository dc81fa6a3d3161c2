// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "risshare/types.hpp"

namespace risshare {

/// Line-of-sight angles (degrees from broadside) of the RIS-side links.
/// When absent from a Scenario each trial draws them uniformly in [-90, 90).
struct LosAngles {
    double sap_ris_aod = 0.0;
    double sap_ris_aoa = 0.0;
    double ris_su_aod = 0.0;
    std::vector<double> pap_ris_aoa;  // one per PN
    std::vector<double> ris_pu_aod;   // one per PN
};

/// Physical configuration of one RIS-aided spectrum-sharing deployment.
struct Scenario {
    int j_pns = 2;
    int m_antennas = 4;
    int n_elements = 32;
    double p_max_dbm = 10.0;
    std::vector<double> p_pap_dbm{10.0, 10.0};
    std::vector<double> gamma_bar_dbm{-115.0, -115.0};
    double noise_power_dbm = -110.0;
    double direct_pl_db = 106.0;
    double cascade_pl_db = 123.0;
    double rician_k_db = 10.0;  // +inf gives pure line-of-sight RIS links
    int codebook_bits = 2;
    std::uint64_t rng_seed = 1;
    std::optional<LosAngles> los_angles_deg;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;

    int levels() const { return 1 << codebook_bits; }
    double p_max_w() const { return dbm_to_watts(p_max_dbm); }
    std::vector<double> p_pap_w() const;
    std::vector<double> gamma_bar_w() const;
    double noise_w() const { return dbm_to_watts(noise_power_dbm); }

    /// Copy with J PNs; per-PN vectors are truncated or padded with their first entry.
    Scenario with_pns(int j) const;
};

/// One realization of every channel in the downlink model.
struct ChannelSet {
    std::vector<cdouble> h_j;     // P-AP_j -> PU_j
    std::vector<cdouble> h_pj_b;  // P-AP_j -> SU
    CVec h_s;                     // S-AP -> SU, M
    std::vector<CVec> h_sj;       // S-AP -> PU_j, M each
    std::vector<CVec> h_pj_r;     // P-AP_j -> RIS, N each
    CMat H_sr;                    // S-AP -> RIS, N x M
    std::vector<CVec> h_rj;       // RIS -> PU_j, N each
    CVec h_rb;                    // RIS -> SU, N

    Index j() const { return Index(h_j.size()); }
    Index m() const { return h_s.size(); }
    Index n() const { return h_rb.size(); }

    /// Throws std::invalid_argument on inconsistent sizes or non-finite entries.
    void validate() const;
};

/// Lifted matrices shared by every optimizer.
struct ProblemData {
    CMat H_hat_s;                 // (N+1) x M
    std::vector<CMat> H_hat_sj;   // (N+1) x M per PN
    std::vector<CVec> h_tilde;    // (N+1) per PN
    CMat phi_sum;                 // sum_j P_j h~_j h~_j^H + noise_w e e^H, e the last unit vector
    CMat phi_factor;              // rows sqrt(P_j) h~_j^H, then sqrt(noise_w) e^T if noise_w > 0
    std::vector<double> p_pap_w;
    double noise_w = 0.0;         // SU noise floor folded into the SIR denominator

    Index n() const { return H_hat_s.rows() - 1; }
    Index m() const { return H_hat_s.cols(); }
    Index j() const { return Index(H_hat_sj.size()); }
};

/// Augmented reflecting-coefficient vector [theta; 1].
///
/// Stored in the lifted coordinates of the quadratic forms: the physical
/// coefficient applied by element n is conj(theta_n), which makes
/// theta_hat^H H_hat_s v equal to (h_rb^H diag(conj theta) H_sr + h_s^H) v.
class ReflectVector {
public:
    static constexpr double kModulusTol = 1e-9;

    /// Validates |theta_n| <= 1 + 1e-9 and a last entry of exactly 1.
    static ReflectVector from_lifted(CVec theta_hat);
    /// Appends the fixed entry to N lifted coefficients.
    static ReflectVector from_elements(const CVec& theta);
    /// All amplitudes zero: the RIS contributes nothing.
    static ReflectVector off(Index n);

    const CVec& lifted() const { return theta_hat_; }
    Index n() const { return theta_hat_.size() - 1; }
    CVec elements() const { return theta_hat_.head(n()); }
    /// Coefficients as applied by the hardware, conj of the lifted entries.
    CVec physical() const { return elements().conjugate(); }

private:
    explicit ReflectVector(CVec theta_hat) : theta_hat_(std::move(theta_hat)) {}
    CVec theta_hat_;
};

enum class LinkModel { direct, cascade };

/// Path loss in dB for a link of the given model at `distance_m` meters.
double path_loss_db(LinkModel model, double distance_m);

ChannelSet generate_channels(const Scenario& scenario, std::uint64_t seed);
inline ChannelSet generate_channels(const Scenario& scenario) {
    return generate_channels(scenario, scenario.rng_seed);
}

/// `noise_w` = 0 gives the pure interference-limited objective.
ProblemData assemble_problem(const Scenario& scenario, const ChannelSet& channels,
                             double noise_w = 0.0);
ProblemData assemble_problem(const std::vector<double>& p_pap_w, const ChannelSet& channels,
                             double noise_w = 0.0);

}  // namespace risshare
