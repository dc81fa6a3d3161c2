// SPDX-License-Identifier: Apache-2.0
#include "risshare/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace risshare {

namespace {

using nlohmann::json;

class Reader {
public:
    Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }

    template <class F>
    void with(const char* key, F&& f) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            f(*it);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(path(key) + ": " + e.what());
        }
    }

    void number(const char* key, double& out) {
        with(key, [&](const json& v) { out = to_double(v, path(key)); });
    }
    void integer(const char* key, int& out) {
        with(key, [&](const json& v) {
            if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
            out = v.get<int>();
        });
    }
    void boolean(const char* key, bool& out) {
        with(key, [&](const json& v) {
            if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
            out = v.get<bool>();
        });
    }
    void numbers(const char* key, std::vector<double>& out) {
        with(key, [&](const json& v) {
            if (!v.is_array()) throw ConfigError(path(key) + ": expected an array");
            out.clear();
            for (const json& x : v) out.push_back(to_double(x, path(key)));
        });
    }

    void finish() const {
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    static double to_double(const json& v, const std::string& at) {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
        }
        throw ConfigError(at + ": expected a number, \"inf\" or \"-inf\"");
    }

private:
    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

void read_los(const json& v, std::optional<LosAngles>& out) {
    Reader r(v, "config.los_angles_deg");
    LosAngles a;
    r.number("sap_ris_aod", a.sap_ris_aod);
    r.number("sap_ris_aoa", a.sap_ris_aoa);
    r.number("ris_su_aod", a.ris_su_aod);
    r.numbers("pap_ris_aoa", a.pap_ris_aoa);
    r.numbers("ris_pu_aod", a.ris_pu_aod);
    r.finish();
    out = a;
}

void read_gld(const json& v, gld::Config& g) {
    Reader r(v, "config.gld");
    r.integer("k_bar", g.k_bar);
    r.number("epsilon", g.epsilon);
    r.number("descent_tol", g.descent_tol);
    r.number("boundary_margin", g.boundary_margin);
    r.number("init_t_slack", g.init_t_slack);
    r.finish();
}

void read_npsp(const json& v, npsp::Config& c) {
    Reader r(v, "config.npsp");
    r.number("mu", c.mu);
    r.integer("n_itr", c.n_itr);
    r.number("varsigma", c.varsigma);
    r.boolean("lagrangian_consistent", c.lagrangian_consistent);
    r.boolean("normalize_interference", c.normalize_interference);
    r.finish();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig rc;
    Scenario& s = rc.scenario;
    AoConfig& ao = rc.ao;
    Reader r(doc, "config");
    r.integer("j_pns", s.j_pns);
    r.integer("m_antennas", s.m_antennas);
    r.integer("n_elements", s.n_elements);
    r.number("p_max_dbm", s.p_max_dbm);
    r.numbers("p_pap_dbm", s.p_pap_dbm);
    r.numbers("gamma_bar_dbm", s.gamma_bar_dbm);
    r.number("noise_power_dbm", s.noise_power_dbm);
    r.number("direct_pl_db", s.direct_pl_db);
    r.number("cascade_pl_db", s.cascade_pl_db);
    r.number("rician_k_db", s.rician_k_db);
    r.integer("codebook_bits", s.codebook_bits);
    r.with("rng_seed", [&](const json& v) {
        if (!v.is_number_unsigned()) throw ConfigError("config.rng_seed: expected a nonnegative integer");
        s.rng_seed = v.get<std::uint64_t>();
    });
    r.with("los_angles_deg", [&](const json& v) { read_los(v, s.los_angles_deg); });
    r.integer("max_rounds", ao.max_rounds);
    r.number("rel_tol", ao.rel_tol);
    r.boolean("include_noise", ao.include_noise);
    r.with("gld", [&](const json& v) { read_gld(v, ao.gld); });
    r.with("npsp", [&](const json& v) { read_npsp(v, ao.npsp); });
    r.finish();
    try {
        s.validate();
        ao.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace risshare
