// SPDX-License-Identifier: Apache-2.0
#include "risshare/driver.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace risshare {

namespace {

enum Stream : std::uint32_t { kStart = 1, kRandomPhase = 2 };

std::mt19937_64 trial_rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream)};
    return std::mt19937_64(seq);
}

bool power_ok(const BeamVector& v, double p_max_w) { return within_threshold(v.v.squaredNorm(), p_max_w); }

bool pair_feasible(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v,
                   const Scenario& sc) {
    const LinkReport r = link_report(pd, theta, v, sc.gamma_bar_w());
    return r.all_feasible() && power_ok(v, sc.p_max_w());
}

// Folds one beamformer solve into the running certification record.
void note_solve(const BeamformResult& bf, double& worst_kkt, int& failures, int& solves) {
    if (bf.degenerate) return;
    ++solves;
    if (bf.status == socp::Status::optimal)
        worst_kkt = std::max(worst_kkt, bf.kkt_residual);
    else
        ++failures;
}

void append_double(std::ostringstream& os, double x) {
    if (std::isnan(x)) {
        os << "nan";
        return;
    }
    if (std::isinf(x)) {
        os << (x > 0 ? "inf" : "-inf");
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void AoConfig::validate() const {
    if (max_rounds < 1) throw std::invalid_argument("ao: max_rounds must be at least 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("ao: rel_tol must be positive");
    gld.validate();
    npsp.validate();
}

ProblemData problem_for(const Scenario& sc, const ChannelSet& ch, const AoConfig& cfg) {
    return assemble_problem(sc, ch, cfg.include_noise ? sc.noise_w() : 0.0);
}

AoResult ao_solve(const ProblemData& pd, const Scenario& sc, const AoConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    const double p_max = sc.p_max_w();
    const std::vector<double> gb = sc.gamma_bar_w();
    const Index n = pd.n();

    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    CVec u(n);
    for (Index k = 0; k < n; ++k) u(k) = std::polar(0.9, phase(rng));

    AoResult res;
    res.theta = ReflectVector::from_elements(u);
    BeamformResult bf = solve_beamformer(pd, res.theta, p_max, gb);
    note_solve(bf, res.worst_inner_kkt, res.inner_failures, res.conic_solves);
    res.v = bf.v;
    if (bf.degenerate) {
        res.degenerate = true;
        res.theta = ReflectVector::off(n);
        bf = solve_beamformer(pd, res.theta, p_max, gb);
        note_solve(bf, res.worst_inner_kkt, res.inner_failures, res.conic_solves);
        res.v = bf.v;
        res.sir_trace.push_back(su_sir(pd, res.theta, res.v).sir);
        return res;
    }
    double sir = su_sir(pd, res.theta, res.v).sir;
    res.sir_trace.push_back(sir);

    for (int round = 0; round < cfg.max_rounds; ++round) {
        if (round > 0) {
            bf = solve_beamformer(pd, res.theta, p_max, gb);
            note_solve(bf, res.worst_inner_kkt, res.inner_failures, res.conic_solves);
            if (bf.degenerate) break;
            res.v = bf.v;
        }
        const gld::State st = gld::solve(pd, res.v, res.theta, gb, cfg.gld);
        res.conic_solves += int(st.inner_kkt.size());
        for (std::size_t k = 0; k < st.inner_kkt.size(); ++k) {
            const bool failed = st.status == gld::Status::inner_failure && k + 1 == st.inner_kkt.size();
            if (failed)
                ++res.inner_failures;
            else
                res.worst_inner_kkt = std::max(res.worst_inner_kkt, st.inner_kkt[k]);
        }
        res.theta = st.reflect();
        const double next = su_sir(pd, res.theta, res.v).sir;
        res.sir_trace.push_back(next);
        ++res.rounds;
        const bool stalled = !(next > sir * (1.0 + cfg.rel_tol));
        sir = next;
        if (stalled) break;
    }
    return res;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the pair.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

TrialResult run_trial(const Scenario& sc, const AoConfig& cfg, std::uint64_t seed) {
    const ChannelSet ch = generate_channels(sc, seed);
    const ProblemData pd = problem_for(sc, ch, cfg);
    const std::vector<double> gb = sc.gamma_bar_w();
    const double p_max = sc.p_max_w();

    TrialResult tr;
    std::mt19937_64 start_rng = trial_rng(seed, kStart);
    const AoResult ao = ao_solve(pd, sc, cfg, start_rng);
    tr.sir_trace = ao.sir_trace;
    tr.degenerate = ao.degenerate;
    tr.worst_inner_kkt = ao.worst_inner_kkt;
    tr.inner_failures = ao.inner_failures;
    tr.conic_solves = ao.conic_solves;
    tr.rate_continuous = rate_bpshz(su_sir(pd, ao.theta, ao.v).sir);
    tr.feasible_continuous = pair_feasible(pd, ao.theta, ao.v, sc);

    const npsp::PhaseCodebook book = npsp::PhaseCodebook::uniform(sc.levels());
    const npsp::Result q = npsp::solve(ao.theta.elements(), pd, ao.v, book, gb, cfg.npsp);
    tr.feasible_discrete = true;
    if (q.found) {
        const ReflectVector th = ReflectVector::from_elements(q.theta_o);
        tr.rate_discrete = rate_bpshz(su_sir(pd, th, ao.v).sir);
        tr.feasible_discrete = pair_feasible(pd, th, ao.v, sc);
    }

    const ReflectVector off = ReflectVector::off(pd.n());
    const BeamformResult bf_off = solve_beamformer(pd, off, p_max, gb);
    note_solve(bf_off, tr.worst_inner_kkt, tr.inner_failures, tr.conic_solves);
    const BeamVector& v_off = bf_off.v;
    tr.rate_no_ris = rate_bpshz(su_sir(pd, off, v_off).sir);
    tr.feasible_no_ris = pair_feasible(pd, off, v_off, sc);

    std::mt19937_64 phase_rng = trial_rng(seed, kRandomPhase);
    std::uniform_int_distribution<int> level(0, book.size() - 1);
    CVec rp(pd.n());
    for (Index k = 0; k < pd.n(); ++k) rp(k) = book.lifted(1.0, level(phase_rng));
    const ReflectVector th_rand = ReflectVector::from_elements(rp);
    const BeamformResult bf_rand = solve_beamformer(pd, th_rand, p_max, gb);
    note_solve(bf_rand, tr.worst_inner_kkt, tr.inner_failures, tr.conic_solves);
    const BeamVector& v_rand = bf_rand.v;
    tr.rate_random_phase = rate_bpshz(su_sir(pd, th_rand, v_rand).sir);
    tr.feasible_random = pair_feasible(pd, th_rand, v_rand, sc);
    return tr;
}

const char* to_string(SweepKind k) {
    switch (k) {
        case SweepKind::pmax: return "pmax";
        case SweepKind::pns: return "pns";
        case SweepKind::gamma: return "gamma";
        case SweepKind::n: return "n";
    }
    return "?";
}

SweepKind parse_sweep_kind(const std::string& s) {
    for (SweepKind k : {SweepKind::pmax, SweepKind::pns, SweepKind::gamma, SweepKind::n})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown sweep '" + s + "' (expected pmax, pns, gamma or n)");
}

std::vector<double> default_sweep_values(SweepKind k) {
    switch (k) {
        case SweepKind::pmax: return {-2, 0, 2, 4, 6, 8, 10, 12, 14};
        case SweepKind::pns: return {1, 2, 3, 4};
        case SweepKind::gamma: return {-125, -120, -115, -110, -105};
        case SweepKind::n: return {1, 4, 8, 16, 32};
    }
    return {};
}

Scenario apply_sweep(const Scenario& base, SweepKind k, double value) {
    Scenario s = base;
    switch (k) {
        case SweepKind::pmax: s.p_max_dbm = value; break;
        case SweepKind::pns: s = base.with_pns(int(value)); break;
        case SweepKind::gamma:
            for (double& g : s.gamma_bar_dbm) g = value;
            break;
        case SweepKind::n: s.n_elements = int(value); break;
    }
    s.validate();
    return s;
}

Stat summarize(const std::vector<double>& xs) {
    Stat s;
    s.count = int(xs.size());
    if (xs.empty()) {
        s.mean = s.se = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / double(xs.size());
    if (xs.size() < 2) {
        s.se = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / double(xs.size() - 1) / double(xs.size()));
    return s;
}

SweepTable run_sweep(const Scenario& base, SweepKind kind, const std::vector<double>& values,
                     int trials, std::uint64_t seed, const AoConfig& cfg, int threads) {
    if (trials < 1) throw std::invalid_argument("run_sweep: trials must be at least 1");
    if (values.empty()) throw std::invalid_argument("run_sweep: empty sweep");
    cfg.validate();
    SweepTable table;
    table.kind = kind;
    table.seed = seed;
    table.trials = trials;

    std::vector<Scenario> scenarios;
    for (double v : values) scenarios.push_back(apply_sweep(base, kind, v));
    const std::size_t per = std::size_t(trials);
    const std::size_t jobs = per * values.size();
    std::vector<TrialResult> results(jobs);

    unsigned workers = threads > 0 ? unsigned(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = unsigned(std::min<std::size_t>(workers, jobs));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned id) {
        try {
            for (std::size_t job = next++; job < jobs; job = next++) {
                const std::size_t point = job / per;
                const std::size_t trial = job % per;
                results[job] = run_trial(scenarios[point], cfg, trial_seed(seed, trial));
            }
        } catch (...) {
            errors[id] = std::current_exception();
            next = jobs;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    for (std::size_t p = 0; p < values.size(); ++p) {
        SweepPoint pt;
        pt.value = values[p];
        pt.trials.assign(results.begin() + std::ptrdiff_t(p * per),
                         results.begin() + std::ptrdiff_t((p + 1) * per));
        std::vector<double> c, d, o, r;
        for (const TrialResult& t : pt.trials) {
            c.push_back(t.rate_continuous);
            if (t.rate_discrete) d.push_back(*t.rate_discrete);
            o.push_back(t.rate_no_ris);
            r.push_back(t.rate_random_phase);
        }
        pt.continuous = summarize(c);
        pt.discrete = summarize(d);
        pt.no_ris = summarize(o);
        pt.random_phase = summarize(r);
        pt.discrete_found_fraction = double(d.size()) / double(per);
        table.points.push_back(std::move(pt));
    }
    return table;
}

std::string csv_header() {
    return "sweep_param,value,rate_continuous_mean,rate_continuous_se,rate_discrete_mean,"
           "rate_discrete_se,rate_no_ris_mean,rate_random_mean,discrete_found_fraction,trials,seed\n";
}

std::string to_csv(const SweepTable& table) {
    if (table.points.empty()) throw std::invalid_argument("emit_csv: empty table");
    std::ostringstream os;
    os << csv_header();
    for (const SweepPoint& p : table.points) {
        os << to_string(table.kind) << ',';
        for (double x : {p.value, p.continuous.mean, p.continuous.se, p.discrete.mean, p.discrete.se,
                         p.no_ris.mean, p.random_phase.mean, p.discrete_found_fraction}) {
            append_double(os, x);
            os << ',';
        }
        os << table.trials << ',' << table.seed << '\n';
    }
    return os.str();
}

void emit_csv(const SweepTable& table, const std::string& path) { write_file(path, to_csv(table)); }

void emit_trace_csv(const SweepTable& table, const std::string& path) {
    std::ostringstream os;
    os << "value,trial,round,sir\n";
    for (const SweepPoint& p : table.points) {
        for (std::size_t t = 0; t < p.trials.size(); ++t) {
            const std::vector<double>& tr = p.trials[t].sir_trace;
            for (std::size_t r = 0; r < tr.size(); ++r) {
                append_double(os, p.value);
                os << ',' << t << ',' << r << ',';
                append_double(os, tr[r]);
                os << '\n';
            }
        }
    }
    write_file(path, os.str());
}

}  // namespace risshare
