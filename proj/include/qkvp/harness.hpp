// Copyright 2026 The qkvp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Run configuration and drivers behind the command-line tool: energy scans,
 * basis convergence, fidelity tables, resource counts and CC-only scans.
 *
 * Configs are JSON objects; every key is optional and falls back to the
 * built-in defaults. Unknown keys are rejected.
 */
#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkvp/ccref.hpp"
#include "qkvp/kvp.hpp"
#include "qkvp/matelem.hpp"
#include "qkvp/scaling.hpp"
#include "qkvp/vqls.hpp"

namespace qkvp::cli {

using Json = nlohmann::ordered_json;

/// Invalid or unreadable configuration; maps to exit code 1.
class ConfigError : public Error {
  public:
    using Error::Error;
};

enum class EnergyConvention { Wavenumber, TotalEnergy };

inline std::string to_string(EnergyConvention c) { return c == EnergyConvention::Wavenumber ? "wavenumber" : "total_energy"; }

struct CcOptions {
    int n_channels = 8;
    std::optional<double> step; ///< default: min(0.005, 0.1 / k_max)
    double wall = 1e10;
};

struct ConvergenceOptions {
    std::vector<int> n_radial{2, 3, 4, 5, 6, 8};
    std::vector<double> gamma{1.0, 1.5, 2.0};
    std::vector<double> energies{0.55};
};

struct FidelityOptions {
    std::vector<int> depths{1, 3};
    std::optional<double> energy; ///< default: 0.55 for the well, 3.8 for the collinear model
};

struct RunConfig {
    ProblemKind problem = ProblemKind::SecrestJohnson;
    ExpWellParams exp_well;
    SecrestJohnsonParams sj;
    std::vector<double> energies;
    EnergyConvention convention = EnergyConvention::Wavenumber;
    InverterKind inverter = InverterKind::Classical;
    vqls::VqlsConfig vqls;
    CcOptions cc;
    ConvergenceOptions convergence;
    FidelityOptions fidelity;
    std::vector<scaling::MoleculePair> pairs = scaling::table_pairs();
    int jobs = 1;
};

inline std::vector<double> linspace(double start, double stop, int count) {
    if (count < 1) {
        throw ConfigError("energy grid: count must be at least 1");
    }
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
        out[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    }
    return out;
}

inline RunConfig default_config(ProblemKind kind = ProblemKind::SecrestJohnson) {
    RunConfig c;
    c.problem = kind;
    // the KVP pipeline gates the quantum inverse at 1e-3, which needs a
    // tighter cost than the solver's own default
    c.vqls.optimizer.target = 1e-9;
    if (kind == ProblemKind::SecrestJohnson) {
        c.energies = linspace(3.05, 4.95, 20);
    } else {
        c.energies = linspace(0.1, 2.0, 20);
    }
    return c;
}

namespace detail {

inline void check_keys(const Json &obj, std::initializer_list<const char *> allowed, const std::string &where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto &[key, _] : obj.items()) {
        bool known = false;
        for (const char *a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const Json &obj, const char *key, T &out, const std::string &where) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void read_optional(const Json &obj, const char *key, std::optional<T> &out, const std::string &where) {
    if (!obj.contains(key)) {
        return;
    }
    if (obj.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(obj, key, v, where);
    out = v;
}

inline void read_quadrature(const Json &obj, RadialQuadrature &q, const std::string &where) {
    read(obj, "r_max", q.r_max, where);
    read(obj, "panels", q.panels, where);
    read(obj, "points", q.points, where);
    if (!(q.r_max > 0.0) || q.panels < 1 || q.points < 1) {
        throw ConfigError(where + ": quadrature needs r_max > 0, panels >= 1, points >= 1");
    }
}

inline Json quadrature_json(const RadialQuadrature &q) {
    return Json{{"r_max", q.r_max}, {"panels", q.panels}, {"points", q.points}};
}

template <typename T>
Json optional_json(const std::optional<T> &v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace detail

inline ProblemKind parse_problem(const std::string &s) {
    if (s == "exp_well") {
        return ProblemKind::OneChannelExpWell;
    }
    if (s == "secrest_johnson") {
        return ProblemKind::SecrestJohnson;
    }
    throw ConfigError("problem: expected 'exp_well' or 'secrest_johnson', got '" + s + "'");
}

inline InverterKind parse_inverter(const std::string &s) {
    if (s.empty() || s == "classical") {
        return InverterKind::Classical;
    }
    if (s == "vqls") {
        return InverterKind::Vqls;
    }
    throw ConfigError("inverter: expected 'classical' or 'vqls', got '" + s + "'");
}

/// Overlays `j` on the defaults of its problem kind.
inline RunConfig parse_config(const Json &j) {
    using detail::read;
    detail::check_keys(j,
                       {"problem", "exp_well", "secrest_johnson", "energy", "inverter", "vqls", "cc", "convergence",
                        "fidelity", "scaling", "jobs"},
                       "config");
    std::string problem = "secrest_johnson";
    read(j, "problem", problem, "config");
    RunConfig c = default_config(parse_problem(problem));

    if (j.contains("exp_well")) {
        const Json &o = j.at("exp_well");
        detail::check_keys(o, {"mu", "gamma", "n_radial", "quadrature"}, "exp_well");
        read(o, "mu", c.exp_well.mu, "exp_well");
        read(o, "gamma", c.exp_well.gamma, "exp_well");
        read(o, "n_radial", c.exp_well.n_radial, "exp_well");
        if (o.contains("quadrature")) {
            detail::check_keys(o.at("quadrature"), {"r_max", "panels", "points"}, "exp_well.quadrature");
            detail::read_quadrature(o.at("quadrature"), c.exp_well.quadrature, "exp_well.quadrature");
        }
    }
    if (j.contains("secrest_johnson")) {
        const Json &o = j.at("secrest_johnson");
        const std::string w = "secrest_johnson";
        detail::check_keys(o,
                           {"mu", "m", "a", "alpha", "beta", "gamma", "n_channels", "n_radial", "quadrature",
                            "hermite_order", "ortho_cutoff", "target_n_q"},
                           w);
        read(o, "mu", c.sj.mu, w);
        read(o, "m", c.sj.m, w);
        read(o, "a", c.sj.a, w);
        read(o, "alpha", c.sj.alpha, w);
        read(o, "beta", c.sj.beta, w);
        read(o, "gamma", c.sj.gamma, w);
        read(o, "n_channels", c.sj.n_channels, w);
        read(o, "n_radial", c.sj.n_radial, w);
        read(o, "hermite_order", c.sj.hermite_order, w);
        detail::read_optional(o, "ortho_cutoff", c.sj.ortho.cutoff, w);
        detail::read_optional(o, "target_n_q", c.sj.ortho.target_n_q, w);
        if (o.contains("quadrature")) {
            detail::check_keys(o.at("quadrature"), {"r_max", "panels", "points"}, w + ".quadrature");
            detail::read_quadrature(o.at("quadrature"), c.sj.quadrature, w + ".quadrature");
        }
    }
    if (j.contains("energy")) {
        const Json &o = j.at("energy");
        detail::check_keys(o, {"start", "stop", "count", "values", "convention"}, "energy");
        std::string conv = "wavenumber";
        read(o, "convention", conv, "energy");
        if (conv == "wavenumber") {
            c.convention = EnergyConvention::Wavenumber;
        } else if (conv == "total_energy") {
            c.convention = EnergyConvention::TotalEnergy;
        } else {
            throw ConfigError("energy.convention: expected 'wavenumber' or 'total_energy'");
        }
        if (o.contains("values")) {
            if (o.contains("start") || o.contains("stop") || o.contains("count")) {
                throw ConfigError("energy: give either values or start/stop/count");
            }
            read(o, "values", c.energies, "energy");
        } else if (o.contains("start") || o.contains("stop") || o.contains("count")) {
            if (!o.contains("start") || !o.contains("stop") || !o.contains("count")) {
                throw ConfigError("energy: start, stop and count must be given together");
            }
            double start = 0.0, stop = 0.0;
            int count = 0;
            read(o, "start", start, "energy");
            read(o, "stop", stop, "energy");
            read(o, "count", count, "energy");
            c.energies = linspace(start, stop, count);
        }
        if (c.energies.empty()) {
            throw ConfigError("energy: grid is empty");
        }
    }
    std::string inverter;
    read(j, "inverter", inverter, "config");
    c.inverter = parse_inverter(inverter);
    if (j.contains("vqls")) {
        const Json &o = j.at("vqls");
        detail::check_keys(o,
                           {"depth", "restarts", "max_iterations", "target", "seed", "initial_step",
                            "drop_tolerance"},
                           "vqls");
        read(o, "depth", c.vqls.depth, "vqls");
        read(o, "restarts", c.vqls.optimizer.restarts, "vqls");
        read(o, "max_iterations", c.vqls.optimizer.max_iterations, "vqls");
        read(o, "target", c.vqls.optimizer.target, "vqls");
        read(o, "seed", c.vqls.optimizer.seed, "vqls");
        read(o, "initial_step", c.vqls.optimizer.initial_step, "vqls");
        read(o, "drop_tolerance", c.vqls.drop_tolerance, "vqls");
    }
    if (j.contains("cc")) {
        const Json &o = j.at("cc");
        detail::check_keys(o, {"n_channels", "step", "wall"}, "cc");
        read(o, "n_channels", c.cc.n_channels, "cc");
        detail::read_optional(o, "step", c.cc.step, "cc");
        read(o, "wall", c.cc.wall, "cc");
    }
    if (j.contains("convergence")) {
        const Json &o = j.at("convergence");
        detail::check_keys(o, {"n_radial", "gamma", "energies"}, "convergence");
        read(o, "n_radial", c.convergence.n_radial, "convergence");
        read(o, "gamma", c.convergence.gamma, "convergence");
        read(o, "energies", c.convergence.energies, "convergence");
    }
    if (j.contains("fidelity")) {
        const Json &o = j.at("fidelity");
        detail::check_keys(o, {"depths", "energy"}, "fidelity");
        read(o, "depths", c.fidelity.depths, "fidelity");
        detail::read_optional(o, "energy", c.fidelity.energy, "fidelity");
    }
    if (j.contains("scaling")) {
        const Json &o = j.at("scaling");
        detail::check_keys(o, {"pairs"}, "scaling");
        if (o.contains("pairs")) {
            c.pairs.clear();
            for (const Json &p : o.at("pairs")) {
                const std::string w = "scaling.pairs";
                detail::check_keys(p,
                                   {"name", "n_atoms_total", "n_angular", "n_scatter_qubits", "n_scatter_terms",
                                    "n_vib_basis", "n_vib_qubits_per_mode", "anharmonic_order", "reference_n_p"},
                                   w);
                scaling::MoleculePair m;
                read(p, "name", m.name, w);
                read(p, "n_atoms_total", m.n_atoms_total, w);
                read(p, "n_angular", m.n_angular, w);
                read(p, "n_scatter_qubits", m.n_scatter_qubits, w);
                read(p, "n_scatter_terms", m.n_scatter_terms, w);
                read(p, "n_vib_basis", m.n_vib_basis, w);
                m.n_vib_qubits_per_mode = scaling::ceil_log2(std::max(1, m.n_vib_basis));
                read(p, "n_vib_qubits_per_mode", m.n_vib_qubits_per_mode, w);
                read(p, "anharmonic_order", m.anharmonic_order, w);
                detail::read_optional(p, "reference_n_p", m.reference_n_p, w);
                c.pairs.push_back(std::move(m));
            }
        }
    }
    read(j, "jobs", c.jobs, "config");

    if (c.vqls.depth < 1) {
        throw ConfigError("vqls.depth must be at least 1");
    }
    if (c.vqls.optimizer.restarts < 1 || c.vqls.optimizer.max_iterations < 1) {
        throw ConfigError("vqls: restarts and max_iterations must be positive");
    }
    if (c.jobs < 1) {
        throw ConfigError("jobs must be at least 1");
    }
    if (c.cc.n_channels < 1 || !(c.cc.wall > 0.0) || (c.cc.step && !(*c.cc.step > 0.0))) {
        throw ConfigError("cc: n_channels >= 1, wall > 0 and step > 0 required");
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

/// Fully resolved config, used as the echo and as the hash input.
inline Json to_json(const RunConfig &c) {
    Json j;
    j["problem"] = to_string(c.problem);
    if (c.problem == ProblemKind::OneChannelExpWell) {
        j["exp_well"] = Json{{"mu", c.exp_well.mu},
                             {"gamma", c.exp_well.gamma},
                             {"n_radial", c.exp_well.n_radial},
                             {"quadrature", detail::quadrature_json(c.exp_well.quadrature)}};
    } else {
        j["secrest_johnson"] = Json{{"mu", c.sj.mu},
                                    {"m", c.sj.m},
                                    {"a", c.sj.a},
                                    {"alpha", c.sj.alpha},
                                    {"beta", c.sj.beta},
                                    {"gamma", c.sj.gamma},
                                    {"n_channels", c.sj.n_channels},
                                    {"n_radial", c.sj.n_radial},
                                    {"quadrature", detail::quadrature_json(c.sj.quadrature)},
                                    {"hermite_order", c.sj.hermite_order},
                                    {"ortho_cutoff", detail::optional_json(c.sj.ortho.cutoff)},
                                    {"target_n_q", detail::optional_json(c.sj.ortho.target_n_q)}};
    }
    j["energy"] = Json{{"values", c.energies}, {"convention", to_string(c.convention)}};
    j["inverter"] = to_string(c.inverter);
    j["vqls"] = Json{{"depth", c.vqls.depth},
                     {"restarts", c.vqls.optimizer.restarts},
                     {"max_iterations", c.vqls.optimizer.max_iterations},
                     {"target", c.vqls.optimizer.target},
                     {"seed", c.vqls.optimizer.seed},
                     {"initial_step", c.vqls.optimizer.initial_step},
                     {"drop_tolerance", c.vqls.drop_tolerance}};
    j["cc"] = Json{{"n_channels", c.cc.n_channels}, {"step", detail::optional_json(c.cc.step)}, {"wall", c.cc.wall}};
    j["convergence"] = Json{{"n_radial", c.convergence.n_radial},
                            {"gamma", c.convergence.gamma},
                            {"energies", c.convergence.energies}};
    j["fidelity"] = Json{{"depths", c.fidelity.depths}, {"energy", detail::optional_json(c.fidelity.energy)}};
    Json pairs = Json::array();
    for (const auto &p : c.pairs) {
        pairs.push_back(Json{{"name", p.name},
                             {"n_atoms_total", p.n_atoms_total},
                             {"n_angular", p.n_angular},
                             {"n_scatter_qubits", p.n_scatter_qubits},
                             {"n_scatter_terms", p.n_scatter_terms},
                             {"n_vib_basis", p.n_vib_basis},
                             {"n_vib_qubits_per_mode", p.n_vib_qubits_per_mode},
                             {"anharmonic_order", p.anharmonic_order},
                             {"reference_n_p", detail::optional_json(p.reference_n_p)}});
    }
    j["scaling"] = Json{{"pairs", pairs}};
    return j;
}

/// FNV-1a over the resolved config; worker count is excluded since it never
/// changes results.
inline std::string config_hash(const RunConfig &c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Builds the physical problem at one grid value.
inline ScatteringProblem make_problem(const RunConfig &c, double grid_value) {
    if (c.problem == ProblemKind::OneChannelExpWell) {
        ExpWellParams p = c.exp_well;
        p.energy = c.convention == EnergyConvention::Wavenumber ? grid_value * grid_value / (2.0 * p.mu) : grid_value;
        return make_exp_well(p);
    }
    SecrestJohnsonParams p = c.sj;
    p.energy = grid_value;
    return make_secrest_johnson(p);
}

inline CcSettings cc_settings(const RunConfig &c, const ScatteringProblem &prob) {
    CcSettings s = default_cc_settings(prob);
    s.n_channels = c.cc.n_channels;
    s.wall = c.cc.wall;
    if (c.cc.step) {
        s.grid.n_steps = static_cast<int>(std::ceil((s.grid.r_max - s.grid.r_min) / *c.cc.step));
    }
    return s;
}

inline Inverter make_inverter(const RunConfig &c, int column_jobs = 1) {
    if (c.inverter == InverterKind::Vqls) {
        VqlsInverter v;
        v.config = c.vqls;
        v.config.jobs = column_jobs;
        return v;
    }
    return ClassicalInverter{};
}

/// Runs fn(i) for i in [0, n) on `jobs` threads. Exceptions escape only
/// after all workers finish; the first one is rethrown.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const std::size_t k = std::min<std::size_t>(std::max(1, jobs), std::max<std::size_t>(n, 1));
    if (k <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < k; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

/// Round-trip formatting; output is locale independent for finite values.
inline std::string fmt(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct EnergyPoint {
    double value = 0.0;
    std::optional<SMatrixResult> kvp;
    std::optional<SMatrixResult> cc;
    std::string error;
};

struct RunOutcome {
    int failures = 0;
    std::vector<std::filesystem::path> files;
    Json summary;
};

namespace detail {

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

inline std::filesystem::path prepare_dir(const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    return dir;
}

inline double min_or_nan(const std::optional<std::vector<double>> &v) {
    if (!v || v->empty()) {
        return std::nan("");
    }
    return *std::min_element(v->begin(), v->end());
}

inline Json failures_json(const std::vector<EnergyPoint> &pts) {
    Json f = Json::array();
    for (const auto &p : pts) {
        if (!p.error.empty()) {
            f.push_back(Json{{"energy", p.value}, {"error", p.error}});
        }
    }
    return f;
}

/// Whether |S_10|^2 grows along the successful points.
inline Json monotone_json(const std::vector<EnergyPoint> &pts, bool use_kvp) {
    double prev = -1.0;
    int seen = 0;
    bool mono = true;
    for (const auto &p : pts) {
        const auto &r = use_kvp ? p.kvp : p.cc;
        if (!r || r->s.rows() < 2) {
            continue;
        }
        const double v = std::norm(r->s(1, 0));
        mono = mono && v > prev;
        prev = v;
        ++seen;
    }
    return seen >= 2 ? Json(mono) : Json(nullptr);
}

} // namespace detail

inline const char *kScanHeader = "energy,channel_from,channel_to,re_s_kvp,im_s_kvp,re_s_cc,im_s_cc,prob_kvp,prob_cc,"
                                 "unitarity_defect,fidelity_min,config_hash\n";

/// KVP (configured inverter) against CC at every grid energy.
inline RunOutcome run_scan(const RunConfig &c, const std::filesystem::path &out_dir) {
    detail::prepare_dir(out_dir);
    const std::string hash = config_hash(c);
    std::vector<EnergyPoint> pts(c.energies.size());
    parallel_for(pts.size(), c.jobs, [&](std::size_t i) {
        EnergyPoint &p = pts[i];
        p.value = c.energies[i];
        try {
            const ScatteringProblem prob = make_problem(c, p.value);
            SMatrixResult kvp = solve(prob, make_inverter(c));
            SMatrixResult cc = solve_cc(prob, cc_settings(c, prob));
            p.kvp = std::move(kvp);
            p.cc = std::move(cc);
        } catch (const std::exception &e) {
            p.kvp.reset();
            p.cc.reset();
            p.error = e.what();
        }
    });

    std::ostringstream csv;
    csv << kScanHeader;
    double max_ds = 0.0, max_dp = 0.0, max_ud = 0.0, min_fid = std::nan("");
    int failures = 0;
    for (const auto &p : pts) {
        if (!p.error.empty()) {
            ++failures;
            continue;
        }
        const ComplexMatrix &sk = p.kvp->s;
        const ComplexMatrix &sc = p.cc->s;
        const double fid = detail::min_or_nan(p.kvp->fidelities);
        if (!std::isnan(fid)) {
            min_fid = std::isnan(min_fid) ? fid : std::min(min_fid, fid);
        }
        max_ud = std::max(max_ud, p.kvp->unitarity_defect);
        for (Eigen::Index from = 0; from < sk.cols(); ++from) {
            for (Eigen::Index to = 0; to < sk.rows(); ++to) {
                const Complex a = sk(to, from);
                const Complex b = sc(to, from);
                const double pa = std::norm(a);
                const double pb = std::norm(b);
                max_ds = std::max({max_ds, std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag())});
                max_dp = std::max(max_dp, std::abs(pa - pb));
                csv << fmt(p.value) << ',' << from << ',' << to << ',' << fmt(a.real()) << ',' << fmt(a.imag()) << ','
                    << fmt(b.real()) << ',' << fmt(b.imag()) << ',' << fmt(pa) << ',' << fmt(pb) << ','
                    << fmt(p.kvp->unitarity_defect) << ',' << (std::isnan(fid) ? std::string() : fmt(fid)) << ','
                    << hash << '\n';
            }
        }
    }
    RunOutcome out;
    out.failures = failures;
    const auto csv_path = out_dir / "scan.csv";
    detail::write_text(csv_path, csv.str());
    out.summary = Json{{"command", "scan"},
                       {"config_hash", hash},
                       {"config", to_json(c)},
                       {"n_energies", pts.size()},
                       {"n_failed", failures},
                       {"max_abs_ds_component", max_ds},
                       {"max_abs_dprob", max_dp},
                       {"max_unitarity_defect", max_ud},
                       {"min_fidelity", std::isnan(min_fid) ? Json(nullptr) : Json(min_fid)},
                       {"p10_monotonic_kvp", detail::monotone_json(pts, true)},
                       {"p10_monotonic_cc", detail::monotone_json(pts, false)},
                       {"failures", detail::failures_json(pts)}};
    const auto json_path = out_dir / "scan_summary.json";
    detail::write_text(json_path, out.summary.dump(2) + "\n");
    out.files = {csv_path, json_path};
    return out;
}

/// CC reference alone over the grid.
inline RunOutcome run_cc_only(const RunConfig &c, const std::filesystem::path &out_dir) {
    detail::prepare_dir(out_dir);
    const std::string hash = config_hash(c);
    std::vector<EnergyPoint> pts(c.energies.size());
    parallel_for(pts.size(), c.jobs, [&](std::size_t i) {
        EnergyPoint &p = pts[i];
        p.value = c.energies[i];
        try {
            const ScatteringProblem prob = make_problem(c, p.value);
            p.cc = solve_cc(prob, cc_settings(c, prob));
        } catch (const std::exception &e) {
            p.cc.reset();
            p.error = e.what();
        }
    });
    std::ostringstream csv;
    csv << "energy,channel_from,channel_to,re_s_cc,im_s_cc,prob_cc,unitarity_defect,symmetry_defect,config_hash\n";
    double max_ud = 0.0, max_sd = 0.0;
    int failures = 0;
    for (const auto &p : pts) {
        if (!p.error.empty()) {
            ++failures;
            continue;
        }
        const ComplexMatrix &s = p.cc->s;
        max_ud = std::max(max_ud, p.cc->unitarity_defect);
        max_sd = std::max(max_sd, p.cc->symmetry_defect);
        for (Eigen::Index from = 0; from < s.cols(); ++from) {
            for (Eigen::Index to = 0; to < s.rows(); ++to) {
                csv << fmt(p.value) << ',' << from << ',' << to << ',' << fmt(s(to, from).real()) << ','
                    << fmt(s(to, from).imag()) << ',' << fmt(std::norm(s(to, from))) << ','
                    << fmt(p.cc->unitarity_defect) << ',' << fmt(p.cc->symmetry_defect) << ',' << hash << '\n';
            }
        }
    }
    RunOutcome out;
    out.failures = failures;
    const auto csv_path = out_dir / "cc.csv";
    detail::write_text(csv_path, csv.str());
    out.summary = Json{{"command", "cc-only"},
                       {"config_hash", hash},
                       {"config", to_json(c)},
                       {"n_energies", pts.size()},
                       {"n_failed", failures},
                       {"max_unitarity_defect", max_ud},
                       {"max_symmetry_defect", max_sd},
                       {"failures", detail::failures_json(pts)}};
    const auto json_path = out_dir / "cc_summary.json";
    detail::write_text(json_path, out.summary.dump(2) + "\n");
    out.files = {csv_path, json_path};
    return out;
}

struct ConvergenceRow {
    int n_radial = 0;
    double gamma = 0.0;
    double energy = 0.0;
    Complex s_kvp;
    Complex s_cc;
    Complex fractional_error; ///< (S_cc - S_kvp) / S_cc
    std::string error;
};

inline std::vector<ConvergenceRow> convergence_rows(const RunConfig &c) {
    if (c.problem != ProblemKind::OneChannelExpWell) {
        throw ConfigError("convergence: requires problem 'exp_well'");
    }
    if (c.convergence.n_radial.empty() || c.convergence.gamma.empty() || c.convergence.energies.empty()) {
        throw ConfigError("convergence: n_radial, gamma and energies must be nonempty");
    }
    std::vector<ConvergenceRow> rows;
    for (double e : c.convergence.energies) {
        for (double g : c.convergence.gamma) {
            for (int n : c.convergence.n_radial) {
                rows.push_back({n, g, e, {}, {}, {}, {}});
            }
        }
    }
    // CC depends only on the energy
    std::vector<std::optional<Complex>> cc(c.convergence.energies.size());
    std::vector<std::string> cc_error(cc.size());
    parallel_for(cc.size(), c.jobs, [&](std::size_t i) {
        try {
            const ScatteringProblem prob = make_problem(c, c.convergence.energies[i]);
            cc[i] = solve_cc(prob, cc_settings(c, prob)).s(0, 0);
        } catch (const std::exception &ex) {
            cc_error[i] = ex.what();
        }
    });
    const std::size_t per_energy = c.convergence.gamma.size() * c.convergence.n_radial.size();
    parallel_for(rows.size(), c.jobs, [&](std::size_t i) {
        ConvergenceRow &r = rows[i];
        const std::size_t ie = i / per_energy;
        if (!cc[ie]) {
            r.error = "cc: " + cc_error[ie];
            return;
        }
        try {
            RunConfig local = c;
            local.exp_well.gamma = r.gamma;
            local.exp_well.n_radial = r.n_radial;
            r.s_kvp = solve(make_problem(local, r.energy), make_inverter(local)).s(0, 0);
            r.s_cc = *cc[ie];
            r.fractional_error = (r.s_cc - r.s_kvp) / r.s_cc;
        } catch (const std::exception &ex) {
            r.error = ex.what();
        }
    });
    return rows;
}

/// Fractional error of the single-channel S against CC per (N_l, gamma).
inline RunOutcome run_convergence(const RunConfig &c, const std::filesystem::path &out_dir) {
    detail::prepare_dir(out_dir);
    const std::string hash = config_hash(c);
    const auto rows = convergence_rows(c);
    std::ostringstream csv;
    csv << "energy,n_radial,gamma,re_s_kvp,im_s_kvp,re_s_cc,im_s_cc,re_frac_err,im_frac_err,abs_frac_err,config_hash\n";
    int failures = 0;
    Json curves = Json::array();
    for (const auto &r : rows) {
        if (!r.error.empty()) {
            ++failures;
            continue;
        }
        csv << fmt(r.energy) << ',' << r.n_radial << ',' << fmt(r.gamma) << ',' << fmt(r.s_kvp.real()) << ','
            << fmt(r.s_kvp.imag()) << ',' << fmt(r.s_cc.real()) << ',' << fmt(r.s_cc.imag()) << ','
            << fmt(r.fractional_error.real()) << ',' << fmt(r.fractional_error.imag()) << ','
            << fmt(std::abs(r.fractional_error)) << ',' << hash << '\n';
    }
    // worst component per basis size across gamma and energy
    Json by_size = Json::object();
    for (int n : c.convergence.n_radial) {
        double worst = 0.0;
        for (const auto &r : rows) {
            if (r.error.empty() && r.n_radial == n) {
                worst = std::max({worst, std::abs(r.fractional_error.real()), std::abs(r.fractional_error.imag())});
            }
        }
        by_size[std::to_string(n)] = worst;
    }
    Json fails = Json::array();
    for (const auto &r : rows) {
        if (!r.error.empty()) {
            fails.push_back(Json{{"energy", r.energy}, {"n_radial", r.n_radial}, {"gamma", r.gamma}, {"error", r.error}});
        }
    }
    RunOutcome out;
    out.failures = failures;
    const auto csv_path = out_dir / "convergence.csv";
    detail::write_text(csv_path, csv.str());
    out.summary = Json{{"command", "convergence"},
                       {"config_hash", hash},
                       {"config", to_json(c)},
                       {"max_abs_frac_err_component_by_n_radial", by_size},
                       {"n_failed", failures},
                       {"failures", fails}};
    const auto json_path = out_dir / "convergence_summary.json";
    detail::write_text(json_path, out.summary.dump(2) + "\n");
    out.files = {csv_path, json_path};
    return out;
}

struct FidelityEntry {
    int depth = 0;
    std::size_t column = 0;
    double fidelity = 0.0;
    double wall_time = 0.0;
    int iterations = 0;
    int restarts = 0;
    double cost_local = 0.0;
    double cost_global = 0.0;
    double norm_q = 0.0;
    bool converged = false;
};

inline double fidelity_energy(const RunConfig &c) {
    if (c.fidelity.energy) {
        return *c.fidelity.energy;
    }
    return c.problem == ProblemKind::OneChannelExpWell ? 0.55 : 3.8;
}

/// Column fidelities of the VQLS inverse for each depth.
inline std::vector<FidelityEntry> fidelity_entries(const RunConfig &c, const RealMatrix &m) {
    if (c.fidelity.depths.empty()) {
        throw ConfigError("fidelity: depths must be nonempty");
    }
    const RealMatrix m_padded = vqls::pad_to_power_of_two(m);
    const vqls::PauliDecomposition decomp = vqls::decompose(m_padded, c.vqls.drop_tolerance);
    const RealMatrix oracle = classical_inverse(m);
    const std::size_t dim = static_cast<std::size_t>(m.rows());
    std::vector<FidelityEntry> entries;
    for (int d : c.fidelity.depths) {
        if (d < 1) {
            throw ConfigError("fidelity: depths must be at least 1");
        }
        for (std::size_t k = 0; k < dim; ++k) {
            entries.push_back({d, k, 0, 0, 0, 0, 0, 0, 0, false});
        }
    }
    parallel_for(entries.size(), c.jobs, [&](std::size_t i) {
        FidelityEntry &e = entries[i];
        const auto t0 = std::chrono::steady_clock::now();
        const vqls::VqlsSolution sol = vqls::solve_column(decomp, e.column, e.depth, c.vqls.optimizer);
        e.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        RealVector xc = RealVector::Zero(m_padded.rows());
        xc.head(m.rows()) = oracle.col(static_cast<Eigen::Index>(e.column));
        xc.normalize();
        e.fidelity = vqls::fidelity(sol.x_state, xc);
        e.iterations = sol.iterations;
        e.restarts = sol.restarts_used;
        e.cost_local = sol.cost_final;
        e.cost_global = sol.cost_global;
        e.norm_q = sol.norm_q;
        e.converged = sol.converged;
    });
    return entries;
}

/// Table of per-column fidelity by depth. Wall times go to the JSON so that
/// the CSV stays reproducible.
inline RunOutcome run_fidelity_table(const RunConfig &c, const std::filesystem::path &out_dir) {
    detail::prepare_dir(out_dir);
    const std::string hash = config_hash(c);
    const double e = fidelity_energy(c);
    const KvpMatrices mats = solver_matrices(make_problem(c, e));
    const auto entries = fidelity_entries(c, mats.m);

    std::ostringstream csv;
    csv << "energy,depth,column,fidelity,iterations,restarts,cost_local,cost_global,norm_q,converged,config_hash\n";
    Json timing = Json::array();
    Json min_by_depth = Json::object();
    for (const auto &x : entries) {
        csv << fmt(e) << ',' << x.depth << ',' << x.column << ',' << fmt(x.fidelity) << ',' << x.iterations << ','
            << x.restarts << ',' << fmt(x.cost_local) << ',' << fmt(x.cost_global) << ',' << fmt(x.norm_q) << ','
            << (x.converged ? 1 : 0) << ',' << hash << '\n';
        timing.push_back(Json{{"depth", x.depth}, {"column", x.column}, {"wall_time_s", x.wall_time}});
        const std::string key = std::to_string(x.depth);
        min_by_depth[key] = min_by_depth.contains(key) ? std::min(min_by_depth[key].get<double>(), x.fidelity)
                                                        : x.fidelity;
    }
    RunOutcome out;
    const auto csv_path = out_dir / "fidelity.csv";
    detail::write_text(csv_path, csv.str());
    out.summary = Json{{"command", "fidelity"},
                       {"config_hash", hash},
                       {"config", to_json(c)},
                       {"energy", e},
                       {"matrix_dim", mats.m.rows()},
                       {"min_fidelity_by_depth", min_by_depth},
                       {"timing", timing}};
    const auto json_path = out_dir / "fidelity_summary.json";
    detail::write_text(json_path, out.summary.dump(2) + "\n");
    out.files = {csv_path, json_path};
    return out;
}

inline RunOutcome run_scaling(const RunConfig &c, const std::filesystem::path &out_dir) {
    detail::prepare_dir(out_dir);
    const std::string hash = config_hash(c);
    std::ostringstream csv;
    csv << "name,n_atoms_total,n_m,n_q,n_p,reference_n_p,delta,config_hash\n";
    Json rows = Json::array();
    for (const auto &p : c.pairs) {
        const scaling::ScalingRow r = scaling::estimate(p);
        csv << r.name << ',' << p.n_atoms_total << ',' << r.n_m << ',' << r.n_q << ',' << r.n_p << ','
            << (r.reference_n_p ? fmt(*r.reference_n_p) : std::string()) << ','
            << (r.delta ? fmt(*r.delta) : std::string()) << ',' << hash << '\n';
        rows.push_back(Json{{"name", r.name},
                            {"n_m", r.n_m},
                            {"n_q", r.n_q},
                            {"n_p", r.n_p},
                            {"reference_n_p", detail::optional_json(r.reference_n_p)},
                            {"delta", detail::optional_json(r.delta)}});
    }
    RunOutcome out;
    const auto csv_path = out_dir / "scaling.csv";
    detail::write_text(csv_path, csv.str());
    out.summary = Json{{"command", "scaling"}, {"config_hash", hash}, {"config", to_json(c)}, {"rows", rows}};
    const auto json_path = out_dir / "scaling_summary.json";
    detail::write_text(json_path, out.summary.dump(2) + "\n");
    out.files = {csv_path, json_path};
    return out;
}

} // namespace qkvp::cli
