// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "risshare/config.hpp"
#include "risshare/driver.hpp"

namespace py = pybind11;
using namespace risshare;

PYBIND11_MODULE(_core, m) {
    m.doc() = "RIS-aided spectrum sharing: scenario, alternating optimization and sweeps";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<LosAngles>(m, "LosAngles")
        .def(py::init<>())
        .def_readwrite("sap_ris_aod", &LosAngles::sap_ris_aod)
        .def_readwrite("sap_ris_aoa", &LosAngles::sap_ris_aoa)
        .def_readwrite("ris_su_aod", &LosAngles::ris_su_aod)
        .def_readwrite("pap_ris_aoa", &LosAngles::pap_ris_aoa)
        .def_readwrite("ris_pu_aod", &LosAngles::ris_pu_aod);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("j_pns", &Scenario::j_pns)
        .def_readwrite("m_antennas", &Scenario::m_antennas)
        .def_readwrite("n_elements", &Scenario::n_elements)
        .def_readwrite("p_max_dbm", &Scenario::p_max_dbm)
        .def_readwrite("p_pap_dbm", &Scenario::p_pap_dbm)
        .def_readwrite("gamma_bar_dbm", &Scenario::gamma_bar_dbm)
        .def_readwrite("noise_power_dbm", &Scenario::noise_power_dbm)
        .def_readwrite("direct_pl_db", &Scenario::direct_pl_db)
        .def_readwrite("cascade_pl_db", &Scenario::cascade_pl_db)
        .def_readwrite("rician_k_db", &Scenario::rician_k_db)
        .def_readwrite("codebook_bits", &Scenario::codebook_bits)
        .def_readwrite("rng_seed", &Scenario::rng_seed)
        .def_readwrite("los_angles_deg", &Scenario::los_angles_deg)
        .def("validate", &Scenario::validate)
        .def("with_pns", &Scenario::with_pns, py::arg("j"));

    py::class_<ChannelSet>(m, "ChannelSet")
        .def_readonly("h_j", &ChannelSet::h_j)
        .def_readonly("h_pj_b", &ChannelSet::h_pj_b)
        .def_readonly("h_s", &ChannelSet::h_s)
        .def_readonly("h_sj", &ChannelSet::h_sj)
        .def_readonly("h_pj_r", &ChannelSet::h_pj_r)
        .def_readonly("H_sr", &ChannelSet::H_sr)
        .def_readonly("h_rj", &ChannelSet::h_rj)
        .def_readonly("h_rb", &ChannelSet::h_rb);
    m.def("generate_channels", py::overload_cast<const Scenario&, std::uint64_t>(&generate_channels),
          py::arg("scenario"), py::arg("seed"));

    py::class_<gld::Config>(m, "GldConfig")
        .def(py::init<>())
        .def_readwrite("k_bar", &gld::Config::k_bar)
        .def_readwrite("epsilon", &gld::Config::epsilon)
        .def_readwrite("descent_tol", &gld::Config::descent_tol)
        .def_readwrite("boundary_margin", &gld::Config::boundary_margin)
        .def_readwrite("init_t_slack", &gld::Config::init_t_slack);

    py::class_<npsp::Config>(m, "NpspConfig")
        .def(py::init<>())
        .def_readwrite("mu", &npsp::Config::mu)
        .def_readwrite("n_itr", &npsp::Config::n_itr)
        .def_readwrite("varsigma", &npsp::Config::varsigma)
        .def_readwrite("lagrangian_consistent", &npsp::Config::lagrangian_consistent)
        .def_readwrite("normalize_interference", &npsp::Config::normalize_interference);

    py::class_<AoConfig>(m, "AoConfig")
        .def(py::init<>())
        .def_readwrite("max_rounds", &AoConfig::max_rounds)
        .def_readwrite("rel_tol", &AoConfig::rel_tol)
        .def_readwrite("include_noise", &AoConfig::include_noise)
        .def_readwrite("gld", &AoConfig::gld)
        .def_readwrite("npsp", &AoConfig::npsp)
        .def("validate", &AoConfig::validate);

    m.def(
        "parse_config",
        [](const std::string& text) {
            const RunConfig rc = parse_config(text);
            return py::make_tuple(rc.scenario, rc.ao);
        },
        py::arg("json_text"), "Parse a JSON configuration into (Scenario, AoConfig).");

    py::class_<TrialResult>(m, "TrialResult")
        .def_readonly("rate_continuous", &TrialResult::rate_continuous)
        .def_readonly("rate_discrete", &TrialResult::rate_discrete)
        .def_readonly("rate_no_ris", &TrialResult::rate_no_ris)
        .def_readonly("rate_random_phase", &TrialResult::rate_random_phase)
        .def_readonly("sir_trace", &TrialResult::sir_trace)
        .def_readonly("degenerate", &TrialResult::degenerate)
        .def_readonly("worst_inner_kkt", &TrialResult::worst_inner_kkt)
        .def_property_readonly("all_feasible", &TrialResult::all_feasible);

    m.def("trial_seed", &trial_seed, py::arg("seed"), py::arg("index"));
    m.def("run_trial", &run_trial, py::arg("scenario"), py::arg("config"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<Stat>(m, "Stat")
        .def_readonly("mean", &Stat::mean)
        .def_readonly("se", &Stat::se)
        .def_readonly("count", &Stat::count);
    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("value", &SweepPoint::value)
        .def_readonly("trials", &SweepPoint::trials)
        .def_readonly("continuous", &SweepPoint::continuous)
        .def_readonly("discrete", &SweepPoint::discrete)
        .def_readonly("no_ris", &SweepPoint::no_ris)
        .def_readonly("random_phase", &SweepPoint::random_phase)
        .def_readonly("discrete_found_fraction", &SweepPoint::discrete_found_fraction);
    py::class_<SweepTable>(m, "SweepTable")
        .def_readonly("seed", &SweepTable::seed)
        .def_readonly("trials", &SweepTable::trials)
        .def_readonly("points", &SweepTable::points)
        .def_property_readonly("kind", [](const SweepTable& t) { return std::string(to_string(t.kind)); })
        .def("to_csv", &to_csv)
        .def("emit_csv", &emit_csv, py::arg("path"));

    m.def("default_sweep_values",
          [](const std::string& kind) { return default_sweep_values(parse_sweep_kind(kind)); }, py::arg("kind"));
    m.def(
        "run_sweep",
        [](const Scenario& base, const std::string& kind, std::optional<std::vector<double>> values, int trials,
           std::uint64_t seed, const AoConfig& cfg, int threads) {
            const SweepKind k = parse_sweep_kind(kind);
            const std::vector<double> vals = values ? *values : default_sweep_values(k);
            py::gil_scoped_release release;
            return run_sweep(base, k, vals, trials, seed, cfg, threads);
        },
        py::arg("scenario"), py::arg("kind"), py::arg("values") = py::none(), py::arg("trials") = 1,
        py::arg("seed") = 0, py::arg("config") = AoConfig{}, py::arg("threads") = 0);

    m.def("rate_bpshz", &rate_bpshz, py::arg("sir"));
    m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
}
