// Command-line front end: builds the shared dynamics engine from a config
// (file, preset, and/or flags) and drives the population, sweep, lifetime,
// efficiency, and bath-probe operations, writing CSV outputs.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "retsim/csv.hpp"
#include "retsim/sweep.hpp"

namespace {

using retsim::KeyValues;

// Registers the shared config surface on a subcommand. Every flag maps to a
// config key; flag values are appended after the config file and preset so
// explicit flags win.
struct ConfigFlags {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> seen;  // key -> raw value

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "flat key=value config file");
        auto bind = [this, app](const std::string& flag, const std::string& key,
                                const std::string& help) {
            app->add_option_function<std::string>(
                flag, [this, key](const std::string& v) { seen.emplace_back(key, v); },
                help);
        };
        bind("--preset", "preset", "parameter preset: case1 or case2");
        bind("--eta", "eta", "bath coupling strength (both sites)");
        bind("--eta-D", "eta_D", "donor bath coupling strength");
        bind("--eta-A", "eta_A", "acceptor bath coupling strength");
        bind("--omega-c", "omega_c", "bath cutoff frequency, cm^-1");
        bind("--temperature", "temperature", "temperature, K");
        bind("--J0", "J0", "electronic coupling at R = R0, cm^-1");
        bind("--dE", "dE", "comma list of donor-acceptor energy gaps, cm^-1");
        bind("--r-min", "r_min", "sweep grid minimum R/R0");
        bind("--r-max", "r_max", "sweep grid maximum R/R0");
        bind("--r-count", "r_count", "sweep grid point count");
        bind("--r", "r", "comma list of R/R0 values for trajectories");
        bind("--methods", "methods", "comma subset of cret,fret");
        bind("--t-max", "t_max", "initial propagation horizon, fs");
        bind("--t-cap", "t_cap", "horizon-doubling cap, fs");
        bind("--dt", "dt", "reporting time step, fs");
        bind("--exp-compare", "exp_compare", "add effective-rate exponential columns");
        bind("--strict", "strict", "fail (exit 3) on unconverged plateaus");
        bind("--out-dir", "out_dir", "output directory");
        bind("--workers", "workers", "worker threads (0 = RETSIM_WORKERS or hardware)");
    }

    retsim::RunConfig resolve() const {
        KeyValues kv;
        if (!config_path.empty()) kv = retsim::read_config_file(config_path);
        // Apply the preset before other flags regardless of flag order.
        for (const auto& p : seen)
            if (p.first == "preset") kv.push_back(p);
        for (const auto& p : seen)
            if (p.first != "preset") kv.push_back(p);
        return retsim::parse_config(kv);
    }
};

std::unique_ptr<retsim::DynamicsEngine> make_engine(const retsim::RunConfig& cfg) {
    retsim::DynamicsOptions opt;
    opt.dt_report = cfg.dt_report;
    opt.workers = cfg.workers;
    return std::make_unique<retsim::DynamicsEngine>(
        retsim::SiteBaths{cfg.donor_bath, cfg.acceptor_bath}, opt);
}

std::string sweep_path(const retsim::RunConfig& cfg, double dE) {
    return (std::filesystem::path(cfg.out_dir) /
            ("sweep_dE" + retsim::csv::format(dE) + ".csv"))
        .string();
}

// Reads a sweep CSV previously written by write_sweep_csv.
std::vector<retsim::SweepRow> load_sweep_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw retsim::ConfigError("cannot open sweep file: " + path);
    std::vector<retsim::SweepRow> rows;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_done) {  // column header
            header_done = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ','))
            vals.push_back(cell.empty() ? 0.0 : std::stod(cell));
        if (vals.size() < 3)
            throw retsim::ConfigError("malformed sweep row in " + path + ": " + line);
        retsim::SweepRow row;
        row.r = vals[0];
        row.k_cret = vals[1];
        row.k_fret = vals[2];
        rows.push_back(row);
    }
    if (rows.empty()) throw retsim::ConfigError("no data rows in " + path);
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Resonance energy-transfer simulator: two-site dynamics with a "
        "structured vibrational bath, distance sweeps, and efficiency curves"};
    app.require_subcommand(1);

    ConfigFlags pop_flags, sweep_flags, life_flags, eff_flags, bath_flags;

    auto* pop = app.add_subcommand(
        "populate", "write population trajectory CSVs for each (method, gap, distance)");
    pop_flags.attach(pop);

    auto* sweep = app.add_subcommand(
        "sweep", "write effective-rate vs distance CSVs over the configured grid");
    sweep_flags.attach(sweep);

    auto* life = app.add_subcommand(
        "lifetime", "deduce the donor lifetime from the effective rate at R/R0 = 1/2");
    life_flags.attach(life);
    std::string life_from;
    life->add_option("--from", life_from,
                     "existing sweep CSV to read instead of recomputing");

    auto* eff = app.add_subcommand(
        "efficiency", "write transfer-efficiency vs distance CSVs");
    eff_flags.attach(eff);
    double tau_D_ns = 0.0;
    eff->add_option("--tau-D", tau_D_ns,
                    "donor lifetime in ns (default: deduced from the sweep)");

    auto* bath = app.add_subcommand(
        "bath-probe", "dump the lineshape function and emission/absorption spectra");
    bath_flags.attach(bath);
    double E_site = 12000.0;
    std::string bath_prefix = "bath";
    bath->add_option("--E-site", E_site, "site energy for the spectra, cm^-1");
    bath->add_option("--prefix", bath_prefix, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*pop) {
            auto cfg = pop_flags.resolve();
            auto engine = make_engine(cfg);
            for (const auto& path : retsim::run_population(cfg, *engine))
                std::cout << path << "\n";
        } else if (*sweep) {
            auto cfg = sweep_flags.resolve();
            auto engine = make_engine(cfg);
            std::filesystem::create_directories(cfg.out_dir);
            for (const auto& res : retsim::run_sweep(cfg, *engine)) {
                const auto path = sweep_path(cfg, res.dE);
                retsim::write_sweep_csv(res, cfg, path);
                std::cout << path << "\n";
            }
        } else if (*life) {
            auto cfg = life_flags.resolve();
            if (!life_from.empty()) {
                const auto rows = load_sweep_rows(life_from);
                auto has = [&](bool cret) {
                    for (const auto& row : rows)
                        if ((cret ? row.k_cret : row.k_fret) > 0.0) return true;
                    return false;
                };
                if (cfg.method_cret && has(true))
                    std::cout << "tau_D_ns_CRET="
                              << retsim::csv::format(retsim::deduce_lifetime(rows, true))
                              << "\n";
                if (cfg.method_fret && has(false))
                    std::cout << "tau_D_ns_FRET="
                              << retsim::csv::format(retsim::deduce_lifetime(rows, false))
                              << "\n";
            } else {
                auto engine = make_engine(cfg);
                for (const auto& res : retsim::run_sweep(cfg, *engine)) {
                    std::cout << "dE=" << retsim::csv::format(res.dE);
                    if (cfg.method_cret)
                        std::cout << " tau_D_ns_CRET="
                                  << retsim::csv::format(
                                         retsim::deduce_lifetime(res.rows, true));
                    if (cfg.method_fret)
                        std::cout << " tau_D_ns_FRET="
                                  << retsim::csv::format(
                                         retsim::deduce_lifetime(res.rows, false));
                    std::cout << "\n";
                }
            }
        } else if (*eff) {
            auto cfg = eff_flags.resolve();
            auto engine = make_engine(cfg);
            std::filesystem::create_directories(cfg.out_dir);
            for (const auto& res : retsim::run_sweep(cfg, *engine)) {
                double tau = tau_D_ns;
                if (!(tau > 0.0))
                    tau = retsim::deduce_lifetime(res.rows, !cfg.method_fret);
                const auto path = (std::filesystem::path(cfg.out_dir) /
                                   ("efficiency_dE" + retsim::csv::format(res.dE) + ".csv"))
                                      .string();
                retsim::run_efficiency(cfg, res, tau, path);
                std::cout << path << "\n";
            }
        } else if (*bath) {
            auto cfg = bath_flags.resolve();
            retsim::run_bath_probe(cfg, E_site, bath_prefix);
            std::cout << bath_prefix << "_g.csv\n"
                      << bath_prefix << "_emission.csv\n"
                      << bath_prefix << "_absorption.csv\n";
        }
    } catch (const retsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const retsim::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
