// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace risdma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& origin, int line, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        fail(origin, line, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& origin, int line, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int d = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        fail(origin, line, "expected an integer, got '" + v + "'");
    }
}

// "a,b,c" or "start:step:stop" (inclusive stop within half a step).
std::vector<double> parse_grid(const std::string& origin, int line,
                               const std::string& v) {
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
        std::stringstream ss(v);
        std::string part;
        std::vector<double> abc;
        while (std::getline(ss, part, ':')) {
            abc.push_back(parse_double(origin, line, trim(part)));
        }
        if (abc.size() != 3 || abc[1] <= 0.0) {
            fail(origin, line, "range must be start:step:stop with step > 0");
        }
        for (double x = abc[0]; x <= abc[2] + 0.5 * abc[1]; x += abc[1]) {
            out.push_back(x);
        }
        return out;
    }
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) {
        out.push_back(parse_double(origin, line, trim(part)));
    }
    if (out.empty()) fail(origin, line, "empty list");
    return out;
}

std::string grid_to_string(const std::vector<double>& g) {
    std::ostringstream os;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) os << ", ";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", g[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace

std::string to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::Convergence: return "convergence";
        case ExperimentId::SeVsPower: return "se_vs_power";
        case ExperimentId::RisAblation: return "ris_ablation";
        case ExperimentId::DmaSets: return "dma_sets";
        case ExperimentId::Baselines: return "baselines";
        case ExperimentId::DeAccuracy: return "de_accuracy";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    dims.validate();
    if (pmax_dbm.empty()) throw std::invalid_argument("pmax_dbm grid is empty");
    if (sar_budget_wkg.empty()) {
        throw std::invalid_argument("sar_budget_wkg grid is empty");
    }
    for (double d : sar_budget_wkg) {
        if (!(d > 0.0)) throw std::invalid_argument("SAR budgets must be positive");
    }
    if (num_seeds < 1) throw std::invalid_argument("seeds must be >= 1");
    if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
    if (h1_pathloss_db < 0.0 || h1_pathloss_db > pathloss_db) {
        throw std::invalid_argument("h1_pathloss_db must lie within [0, pathloss_db]");
    }
    const AoConfig& a = ao;
    for (double e : {a.eps1, a.eps2, a.eps3, a.eps4, a.eps5, a.eps6}) {
        if (!(e > 0.0)) throw std::invalid_argument("thresholds must be positive");
    }
}

ExperimentSpec default_spec() {
    ExperimentSpec s;
    s.experiment = ExperimentId::SeVsPower;
    s.dims.num_users = 4;
    s.dims.num_antennas = {4, 4, 4, 4};
    s.dims.n_ris = 16;
    s.dims.n_strips = 8;
    s.dims.elements_per_strip = 8;
    for (double p = -10.0; p <= 40.0 + 1e-9; p += 5.0) s.pmax_dbm.push_back(p);
    s.sar_budget_wkg = {0.8};
    return s;
}

ExperimentSpec parse_config(std::istream& in, const std::string& origin) {
    ExperimentSpec spec = default_spec();
    std::map<std::string, int> seen_lines;
    bool nk_set = false;
    int nk_value = 4;
    int nk_line = 0;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            fail(origin, line, "expected 'key = value'");
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (val.empty()) fail(origin, line, "missing value for '" + key + "'");
        seen_lines[key] = line;

        if (key == "experiment") {
            if (val == "convergence") spec.experiment = ExperimentId::Convergence;
            else if (val == "se_vs_power") spec.experiment = ExperimentId::SeVsPower;
            else if (val == "ris_ablation") spec.experiment = ExperimentId::RisAblation;
            else if (val == "dma_sets") spec.experiment = ExperimentId::DmaSets;
            else if (val == "baselines") spec.experiment = ExperimentId::Baselines;
            else if (val == "de_accuracy") spec.experiment = ExperimentId::DeAccuracy;
            else fail(origin, line, "unknown experiment '" + val + "'");
        } else if (key == "K") {
            spec.dims.num_users = parse_int(origin, line, val);
        } else if (key == "N_k") {
            nk_set = true;
            nk_value = parse_int(origin, line, val);
            nk_line = line;
        } else if (key == "N_R") {
            spec.dims.n_ris = parse_int(origin, line, val);
        } else if (key == "S") {
            spec.dims.n_strips = parse_int(origin, line, val);
        } else if (key == "L") {
            spec.dims.elements_per_strip = parse_int(origin, line, val);
        } else if (key == "noise_dbm") {
            spec.noise_dbm = parse_double(origin, line, val);
        } else if (key == "pathloss_db") {
            spec.pathloss_db = parse_double(origin, line, val);
        } else if (key == "h1_pathloss_db") {
            spec.h1_pathloss_db = parse_double(origin, line, val);
        } else if (key == "omega_row_decay") {
            spec.omega_row_decay = parse_double(origin, line, val);
        } else if (key == "omega_col_decay") {
            spec.omega_col_decay = parse_double(origin, line, val);
        } else if (key == "pmax_dbm") {
            spec.pmax_dbm = parse_grid(origin, line, val);
        } else if (key == "sar_budget_wkg") {
            spec.sar_budget_wkg = parse_grid(origin, line, val);
        } else if (key == "seeds") {
            spec.num_seeds = parse_int(origin, line, val);
        } else if (key == "seed_base") {
            spec.seed_base = static_cast<std::uint64_t>(
                parse_double(origin, line, val));
        } else if (key == "mc_samples") {
            spec.mc_samples = parse_int(origin, line, val);
        } else if (key == "csi_mode") {
            if (val == "full") spec.ao.csi_mode = CsiMode::Full;
            else if (val == "partial") spec.ao.csi_mode = CsiMode::Partial;
            else fail(origin, line, "csi_mode must be full or partial");
        } else if (key == "dma_set") {
            if (val == "UC") spec.ao.dma_set = FeasibleSet::uc();
            else if (val == "AO") spec.ao.dma_set = FeasibleSet::amplitude();
            else if (val == "BA") spec.ao.dma_set = FeasibleSet::binary();
            else if (val == "LP") spec.ao.dma_set = FeasibleSet::lorentzian();
            else fail(origin, line, "dma_set must be one of UC, AO, BA, LP");
        } else if (key == "phase_init") {
            if (val == "ones") spec.ao.phase_init = PhaseInit::Ones;
            else if (val == "random") spec.ao.phase_init = PhaseInit::SeededRandom;
            else fail(origin, line, "phase_init must be ones or random");
        } else if (key == "eps1") {
            spec.ao.eps1 = parse_double(origin, line, val);
        } else if (key == "eps2") {
            spec.ao.eps2 = parse_double(origin, line, val);
        } else if (key == "eps3") {
            spec.ao.eps3 = parse_double(origin, line, val);
        } else if (key == "eps4") {
            spec.ao.eps4 = parse_double(origin, line, val);
        } else if (key == "eps5") {
            spec.ao.eps5 = parse_double(origin, line, val);
        } else if (key == "eps6") {
            spec.ao.eps6 = parse_double(origin, line, val);
        } else if (key == "max_outer") {
            spec.ao.max_outer = parse_int(origin, line, val);
        } else if (key == "out") {
            spec.out = val;
        } else {
            fail(origin, line, "unknown key '" + key + "'");
        }
    }

    if (!nk_set) nk_value = 4;
    if (spec.dims.num_users >= 1) {
        spec.dims.num_antennas.assign(spec.dims.num_users, nk_value);
    } else {
        spec.dims.num_antennas.clear();
    }

    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        // Point at the key named in the message when it appeared in the file.
        const std::string what = e.what();
        int ref_line = nk_line;
        for (const auto& [key, ln] : seen_lines) {
            if (what.find(key) != std::string::npos) ref_line = ln;
        }
        fail(origin, std::max(ref_line, 1), what);
    }
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    return parse_config(in, path);
}

std::string serialize_config(const ExperimentSpec& spec) {
    std::ostringstream os;
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "# risdma benchmark configuration\n";
    os << "experiment = " << to_string(spec.experiment) << "\n";
    os << "K = " << spec.dims.num_users << "\n";
    os << "N_k = " << spec.dims.num_antennas.front() << "\n";
    os << "N_R = " << spec.dims.n_ris << "\n";
    os << "S = " << spec.dims.n_strips << "\n";
    os << "L = " << spec.dims.elements_per_strip << "\n";
    os << "noise_dbm = " << num(spec.noise_dbm) << "\n";
    os << "pathloss_db = " << num(spec.pathloss_db) << "\n";
    os << "h1_pathloss_db = " << num(spec.h1_pathloss_db) << "\n";
    os << "omega_row_decay = " << num(spec.omega_row_decay) << "\n";
    os << "omega_col_decay = " << num(spec.omega_col_decay) << "\n";
    os << "pmax_dbm = " << grid_to_string(spec.pmax_dbm) << "\n";
    os << "sar_budget_wkg = " << grid_to_string(spec.sar_budget_wkg) << "\n";
    os << "seeds = " << spec.num_seeds << "\n";
    os << "seed_base = " << spec.seed_base << "\n";
    os << "mc_samples = " << spec.mc_samples << "\n";
    os << "csi_mode = " << to_string(spec.ao.csi_mode) << "\n";
    os << "dma_set = " << to_string(spec.ao.dma_set.tag) << "\n";
    os << "phase_init = "
       << (spec.ao.phase_init == PhaseInit::Ones ? "ones" : "random") << "\n";
    os << "eps1 = " << num(spec.ao.eps1) << "\n";
    os << "eps2 = " << num(spec.ao.eps2) << "\n";
    os << "eps3 = " << num(spec.ao.eps3) << "\n";
    os << "eps4 = " << num(spec.ao.eps4) << "\n";
    os << "eps5 = " << num(spec.ao.eps5) << "\n";
    os << "eps6 = " << num(spec.ao.eps6) << "\n";
    os << "max_outer = " << spec.ao.max_outer << "\n";
    os << "out = " << spec.out << "\n";
    return os.str();
}

ChannelStatistics spec_stats(const ExperimentSpec& spec) {
    return make_default_stats(spec.dims, spec.h2_pathloss_db(),
                              spec.omega_row_decay, spec.omega_col_decay);
}

UplinkConstraints spec_constraints(const ExperimentSpec& spec, double pmax_watt,
                                   double sar_budget) {
    UplinkConstraints c;
    c.link.Pmax.assign(spec.dims.num_users, pmax_watt);
    c.link.sigma2 = spec.sigma2();
    c.link.pathloss_db = spec.pathloss_db;
    c.sar.R.resize(spec.dims.num_users);
    c.sar.D.resize(spec.dims.num_users);
    for (int k = 0; k < spec.dims.num_users; ++k) {
        // The reference 4x4 exposure matrix when it fits; identity otherwise.
        const int nk = spec.dims.num_antennas[k];
        CMat r = nk == 4 ? reference_sar_matrix()
                         : CMat(CMat::Identity(nk, nk));
        c.sar.R[k] = {std::move(r)};
        c.sar.D[k] = {sar_budget};
    }
    return c;
}

}  // namespace risdma
