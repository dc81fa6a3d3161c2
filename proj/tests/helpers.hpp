// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>

#include "risshare/metrics.hpp"

namespace testing {

using namespace risshare;

inline cdouble cgauss(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    const double re = g(rng);
    return cdouble(re, g(rng));
}

inline CVec random_cvec(Index n, std::mt19937_64& rng, double scale = 1.0) {
    CVec v(n);
    for (Index k = 0; k < n; ++k) v(k) = scale * cgauss(rng);
    return v;
}

inline CMat random_cmat(Index r, Index c, std::mt19937_64& rng, double scale = 1.0) {
    CMat a(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index k = 0; k < c; ++k) a(i, k) = scale * cgauss(rng);
    return a;
}

/// Well-scaled unit-variance channels; `ris` scales every RIS-side link.
inline ChannelSet random_channels(Index n, Index m, Index j, std::mt19937_64& rng, double ris = 1.0) {
    ChannelSet ch;
    ch.h_s = random_cvec(m, rng);
    ch.h_rb = random_cvec(n, rng, ris);
    ch.H_sr = random_cmat(n, m, rng, ris);
    for (Index k = 0; k < j; ++k) {
        ch.h_j.push_back(cgauss(rng));
        ch.h_pj_b.push_back(cgauss(rng));
        ch.h_sj.push_back(random_cvec(m, rng));
        ch.h_pj_r.push_back(random_cvec(n, rng, ris));
        ch.h_rj.push_back(random_cvec(n, rng, ris));
    }
    return ch;
}

inline ChannelSet unit_channels(Index n, Index m, Index j) {
    ChannelSet ch;
    ch.h_s = CVec::Ones(m);
    ch.h_rb = CVec::Ones(n);
    ch.H_sr = CMat::Ones(n, m);
    for (Index k = 0; k < j; ++k) {
        ch.h_j.push_back(1.0);
        ch.h_pj_b.push_back(1.0);
        ch.h_sj.push_back(CVec::Ones(m));
        ch.h_pj_r.push_back(CVec::Ones(n));
        ch.h_rj.push_back(CVec::Ones(n));
    }
    return ch;
}

/// Random lifted coefficients with amplitudes uniform in [0, amp_max].
inline ReflectVector random_reflect(Index n, std::mt19937_64& rng, double amp_max = 1.0) {
    std::uniform_real_distribution<double> a(0.0, amp_max), ph(0.0, 2.0 * 3.141592653589793);
    CVec th(n);
    for (Index k = 0; k < n; ++k) th(k) = std::polar(a(rng), ph(rng));
    return ReflectVector::from_elements(th);
}

/// Received SU amplitude from the channels directly: h_rb^H diag(phys) H_sr v + h_s^H v.
inline cdouble su_amplitude(const ChannelSet& ch, const CVec& phys, const CVec& v) {
    return ch.h_rb.dot(phys.cwiseProduct(ch.H_sr * v)) + ch.h_s.dot(v);
}

inline cdouble pn_amplitude(const ChannelSet& ch, std::size_t j, const CVec& phys, const CVec& v) {
    return ch.h_rj[j].dot(phys.cwiseProduct(ch.H_sr * v)) + ch.h_sj[j].dot(v);
}

inline cdouble pap_su_amplitude(const ChannelSet& ch, std::size_t j, const CVec& phys) {
    return ch.h_rb.dot(phys.cwiseProduct(ch.h_pj_r[j])) + ch.h_pj_b[j];
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
