#include "retsim/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retsim/constants.hpp"
#include "retsim/csv.hpp"
#include "retsim/golden_rule.hpp"
#include "retsim/kinetics.hpp"
#include "retsim/parallel.hpp"

namespace retsim {

namespace {

double parse_number(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(out))
        throw ConfigError("malformed number for key '" + key + "': " + value);
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    if (v != std::floor(v)) throw ConfigError("key '" + key + "' expects an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "' expects a boolean, got: " + value);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_number(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "' expects a number list");
    return out;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
    if (name == "case1") {
        cfg.donor_bath = {2.0, 1000.0, 300.0};
    } else if (name == "case2") {
        cfg.donor_bath = {5.0, 400.0, 300.0};
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected case1 or case2)");
    }
    cfg.acceptor_bath = cfg.donor_bath;
    cfg.J0 = 5.0;
    cfg.dE_list = {400.0, 800.0};
    cfg.preset = name;
}

unsigned env_workers() {
    const char* env = std::getenv("RETSIM_WORKERS");
    if (env == nullptr || *env == '\0') return 0;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<unsigned>(v) : 0;
}

std::string join_list(const std::vector<double>& vals) {
    std::string out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i > 0) out += ',';
        out += csv::format(vals[i]);
    }
    return out;
}

// Propagates with a doubling horizon until the plateau converges or the cap
// is reached; t_start lets callers seed a physically informed horizon.
template <typename Propagate>
PopulationTrajectory until_plateau(Propagate&& prop, double t_start, double t_cap) {
    double t = std::min(t_start, t_cap);
    for (;;) {
        PopulationTrajectory traj = prop(t);
        if (traj.plateau_converged || t >= t_cap) return traj;
        t = std::min(2.0 * t, t_cap);
    }
}

}  // namespace

void RunConfig::validate() const {
    donor_bath.validate();
    acceptor_bath.validate();
    if (dE_list.empty()) throw ConfigError("missing required key 'dE'");
    if (!(J0 >= 0.0)) throw ConfigError("key 'J0' must be >= 0");
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw ConfigError("keys 'r_min'/'r_max' must satisfy 0 < r_min < r_max");
    if (r_count < 2) throw ConfigError("key 'r_count' must be >= 2");
    for (double r : r_list)
        if (!(r > 0.0)) throw ConfigError("key 'r' entries must be > 0");
    if (!method_cret && !method_fret)
        throw ConfigError("key 'methods' must enable at least one of cret,fret");
    if (!(t_max > 0.0) || !(t_cap >= t_max))
        throw ConfigError("keys 't_max'/'t_cap' must satisfy 0 < t_max <= t_cap");
    if (!(dt_report > 0.0)) throw ConfigError("key 'dt' must be > 0");
}

KeyValues read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key=value, got: " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

RunConfig parse_config(const KeyValues& kv) {
    RunConfig cfg;
    bool have_bath = false, have_T = false, have_J0 = false;
    for (const auto& [key, value] : kv) {
        if (key == "preset") {
            apply_preset(cfg, value);
            have_bath = have_T = have_J0 = true;
        } else if (key == "eta") {
            cfg.donor_bath.eta = cfg.acceptor_bath.eta = parse_number(key, value);
            have_bath = true;
        } else if (key == "eta_D") {
            cfg.donor_bath.eta = parse_number(key, value);
            have_bath = true;
        } else if (key == "eta_A") {
            cfg.acceptor_bath.eta = parse_number(key, value);
            have_bath = true;
        } else if (key == "omega_c") {
            cfg.donor_bath.omega_c = cfg.acceptor_bath.omega_c = parse_number(key, value);
            have_bath = true;
        } else if (key == "temperature") {
            cfg.donor_bath.temperature = cfg.acceptor_bath.temperature =
                parse_number(key, value);
            have_T = true;
        } else if (key == "J0") {
            cfg.J0 = parse_number(key, value);
            have_J0 = true;
        } else if (key == "dE") {
            cfg.dE_list = parse_list(key, value);
        } else if (key == "r_min") {
            cfg.r_min = parse_number(key, value);
        } else if (key == "r_max") {
            cfg.r_max = parse_number(key, value);
        } else if (key == "r_count") {
            cfg.r_count = parse_int(key, value);
        } else if (key == "r") {
            cfg.r_list = parse_list(key, value);
        } else if (key == "methods") {
            cfg.method_cret = cfg.method_fret = false;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item == "cret") cfg.method_cret = true;
                else if (item == "fret") cfg.method_fret = true;
                else if (!item.empty())
                    throw ConfigError("key 'methods': unknown method '" + item + "'");
            }
        } else if (key == "t_max") {
            cfg.t_max = parse_number(key, value);
        } else if (key == "t_cap") {
            cfg.t_cap = parse_number(key, value);
        } else if (key == "dt") {
            cfg.dt_report = parse_number(key, value);
        } else if (key == "exp_compare") {
            cfg.exp_compare = parse_bool(key, value);
        } else if (key == "strict") {
            cfg.strict = parse_bool(key, value);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "workers") {
            const int w = parse_int(key, value);
            if (w < 0) throw ConfigError("key 'workers' must be >= 0");
            cfg.workers = static_cast<unsigned>(w);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    if (!have_bath)
        throw ConfigError("missing bath parameters: give 'preset' or 'eta'/'omega_c'");
    if (!have_T) throw ConfigError("missing required key 'temperature'");
    if (!have_J0) throw ConfigError("missing required key 'J0'");
    if (cfg.workers == 0) cfg.workers = env_workers();
    if (cfg.r_list.empty()) cfg.r_list = {0.2, 0.5};
    cfg.validate();
    return cfg;
}

std::string describe_config(const RunConfig& cfg) {
    std::string s;
    if (!cfg.preset.empty()) s += "preset=" + cfg.preset + " ";
    s += "eta_D=" + csv::format(cfg.donor_bath.eta);
    s += " eta_A=" + csv::format(cfg.acceptor_bath.eta);
    s += " omega_c=" + csv::format(cfg.donor_bath.omega_c);
    s += " temperature=" + csv::format(cfg.donor_bath.temperature);
    s += " J0=" + csv::format(cfg.J0);
    s += " dE=" + join_list(cfg.dE_list);
    s += " r_min=" + csv::format(cfg.r_min);
    s += " r_max=" + csv::format(cfg.r_max);
    s += " r_count=" + std::to_string(cfg.r_count);
    s += " r=" + join_list(cfg.r_list);
    s += " methods=";
    if (cfg.method_cret) s += "cret";
    if (cfg.method_cret && cfg.method_fret) s += ",";
    if (cfg.method_fret) s += "fret";
    s += " t_max=" + csv::format(cfg.t_max);
    s += " t_cap=" + csv::format(cfg.t_cap);
    s += " dt=" + csv::format(cfg.dt_report);
    s += std::string(" exp_compare=") + (cfg.exp_compare ? "true" : "false");
    s += std::string(" strict=") + (cfg.strict ? "true" : "false");
    return s;
}

std::vector<SweepResult> run_sweep(const RunConfig& cfg, const DynamicsEngine& engine) {
    std::vector<double> grid(static_cast<std::size_t>(cfg.r_count));
    for (int i = 0; i < cfg.r_count; ++i)
        grid[static_cast<std::size_t>(i)] =
            cfg.r_min + (cfg.r_max - cfg.r_min) * i / (cfg.r_count - 1);

    std::vector<SweepResult> results;
    for (double dE : cfg.dE_list) {
        // Stationary rates give a per-point horizon estimate and warm the
        // per-gap kernel cache before the parallel loop starts.
        double kf_per_J2 = 0.0, kb_per_J2 = 0.0;
        engine.stationary_rates_per_J2(dE, 0.0, &kf_per_J2, &kb_per_J2);

        SweepResult res;
        res.dE = dE;
        res.rows.resize(grid.size());
        auto point = [&](std::size_t i) {
            SweepRow row;
            row.r = grid[i];
            const DimerSpec dimer{dE, 0.0, cfg.J0, row.r};
            const double J = dimer.coupling();
            const double k_tot = (kf_per_J2 + kb_per_J2) * J * J;
            const double t_start =
                std::max(cfg.t_max, k_tot > 0.0 ? 14.0 / k_tot : cfg.t_cap);
            if (cfg.method_fret) {
                auto traj = until_plateau(
                    [&](double t) { return engine.propagate_fret(dimer, t); }, t_start,
                    cfg.t_cap);
                row.fret_converged = traj.plateau_converged;
                if (traj.plateau_converged) row.k_fret = effective_rate(traj).k_eff;
            }
            if (cfg.method_cret) {
                auto traj = until_plateau(
                    [&](double t) { return engine.cret_propagate(dimer, t); }, t_start,
                    cfg.t_cap);
                row.cret_converged = traj.plateau_converged;
                if (traj.plateau_converged) row.k_cret = effective_rate(traj).k_eff;
            }
            res.rows[i] = row;
        };
        parallel_for(grid.size(), point, cfg.workers);
        std::sort(res.rows.begin(), res.rows.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.r < b.r; });
        if (cfg.strict) {
            for (const auto& row : res.rows) {
                if ((cfg.method_cret && !row.cret_converged) ||
                    (cfg.method_fret && !row.fret_converged))
                    throw ConvergenceError("no converged plateau at r=" +
                                           csv::format(row.r) + " within t_cap");
            }
        }
        results.push_back(std::move(res));
    }
    return results;
}

void write_sweep_csv(const SweepResult& res, const RunConfig& cfg,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "# " << describe_config(cfg) << " | dE=" << csv::format(res.dE) << "\n";
    out << "R_over_R0,k_eff_CRET,k_eff_FRET,k_eff_CRET_r6,k_eff_FRET_r6\n";
    for (const auto& row : res.rows) {
        const double r6 = std::pow(row.r, 6);
        out << csv::format(row.r) << ',';
        if (cfg.method_cret) out << csv::format(row.k_cret);
        out << ',';
        if (cfg.method_fret) out << csv::format(row.k_fret);
        out << ',';
        if (cfg.method_cret) out << csv::format(row.k_cret * r6);
        out << ',';
        if (cfg.method_fret) out << csv::format(row.k_fret * r6);
        out << '\n';
    }
}

double deduce_lifetime(const std::vector<SweepRow>& rows, bool use_cret) {
    if (rows.empty()) throw std::domain_error("empty sweep");
    auto value = [&](const SweepRow& row) { return use_cret ? row.k_cret : row.k_fret; };
    const double target = 0.5;
    double k = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i].r - target) < 1e-9) {
            k = value(rows[i]);
            found = true;
            break;
        }
        if (i + 1 < rows.size() && rows[i].r < target && rows[i + 1].r > target) {
            const double w = (target - rows[i].r) / (rows[i + 1].r - rows[i].r);
            k = (1.0 - w) * value(rows[i]) + w * value(rows[i + 1]);
            found = true;
            break;
        }
    }
    if (!found) throw std::domain_error("sweep grid does not cover r = 0.5");
    if (!(k > 0.0)) throw std::domain_error("effective rate at r = 0.5 is not positive");
    return 64.0 / k / constants::fs_per_ns;
}

namespace {

void write_population_csv(const PopulationTrajectory& traj, const RunConfig& cfg,
                          double dE, double r, const std::string& method,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "# " << describe_config(cfg) << " | method=" << method
        << " dE=" << csv::format(dE) << " r=" << csv::format(r) << "\n";

    bool have_exp = false;
    double tau_ret = 0.0;
    if (cfg.exp_compare && traj.plateau_converged && traj.P_A_inf > 0.0) {
        tau_ret = effective_rate(traj).tau_RET;
        have_exp = true;
    }
    out << "t_fs,P_D,P_A,coh_re,coh_im,converged";
    if (have_exp) out << ",P_D_exp,P_A_exp";
    out << "\n";
    const bool have_coh = !traj.coherence_re.empty();
    for (std::size_t i = 0; i < traj.t_grid.size(); ++i) {
        out << csv::format(traj.t_grid[i]) << ',' << csv::format(traj.P_D[i]) << ','
            << csv::format(traj.P_A[i]) << ','
            << csv::format(have_coh ? traj.coherence_re[i] : 0.0) << ','
            << csv::format(have_coh ? traj.coherence_im[i] : 0.0) << ','
            << (traj.plateau_converged ? "true" : "false");
        if (have_exp) {
            const double decay = std::exp(-traj.t_grid[i] / tau_ret);
            out << ',' << csv::format(traj.P_D_inf + (1.0 - traj.P_D_inf) * decay) << ','
                << csv::format(traj.P_A_inf * (1.0 - decay));
        }
        out << '\n';
    }
}

}  // namespace

std::vector<std::string> run_population(const RunConfig& cfg,
                                        const DynamicsEngine& engine) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> paths;
    bool all_converged = true;
    for (double dE : cfg.dE_list) {
        for (double r : cfg.r_list) {
            const DimerSpec dimer{dE, 0.0, cfg.J0, r};
            for (int m = 0; m < 2; ++m) {
                const bool cret = (m == 0);
                if (cret && !cfg.method_cret) continue;
                if (!cret && !cfg.method_fret) continue;
                auto traj = until_plateau(
                    [&](double t) {
                        return cret ? engine.cret_propagate(dimer, t)
                                    : engine.propagate_fret(dimer, t);
                    },
                    cfg.t_max, cfg.t_cap);
                all_converged = all_converged && traj.plateau_converged;
                const std::string name = std::string("pop_") + (cret ? "cret" : "fret") +
                                         "_dE" + csv::format(dE) + "_r" + csv::format(r) +
                                         ".csv";
                const std::string path =
                    (std::filesystem::path(cfg.out_dir) / name).string();
                write_population_csv(traj, cfg, dE, r, cret ? "cret" : "fret", path);
                paths.push_back(path);
            }
        }
    }
    if (cfg.strict && !all_converged)
        throw ConvergenceError("a trajectory failed to plateau within t_cap");
    return paths;
}

void run_efficiency(const RunConfig& cfg, const SweepResult& sweep, double tau_D_ns,
                    const std::string& path) {
    const double tau_fs = tau_D_ns * constants::fs_per_ns;
    if (!(tau_fs > 0.0)) throw std::domain_error("tau_D must be positive");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "# " << describe_config(cfg) << " | dE=" << csv::format(sweep.dE)
        << " tau_D_ns=" << csv::format(tau_D_ns) << "\n";
    out << "R_over_R0,E_CRET,E_FRET,E_ideal\n";
    const double gamma = 1.0 / tau_fs;
    for (const auto& row : sweep.rows) {
        out << csv::format(row.r) << ',';
        if (cfg.method_cret) out << csv::format(row.k_cret / (row.k_cret + gamma));
        out << ',';
        if (cfg.method_fret) out << csv::format(row.k_fret / (row.k_fret + gamma));
        out << ',' << csv::format(efficiency_distance(row.r)) << '\n';
    }
}

void run_bath_probe(const RunConfig& cfg, double E_site, const std::string& prefix) {
    std::filesystem::create_directories(
        std::filesystem::path(prefix).parent_path().empty()
            ? "."
            : std::filesystem::path(prefix).parent_path().string());
    const auto table =
        build_lineshape_table(cfg.donor_bath, 'D', cfg.t_max, cfg.dt_report, cfg.workers);
    write_lineshape_csv(table, prefix + "_g.csv");
    write_spectrum_csv(emission_lineshape(table, E_site), prefix + "_emission.csv");
    write_spectrum_csv(absorption_lineshape(table, E_site), prefix + "_absorption.csv");
}

}  // namespace retsim
