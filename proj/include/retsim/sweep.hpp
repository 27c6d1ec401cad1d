#ifndef RETSIM_SWEEP_HPP
#define RETSIM_SWEEP_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "retsim/dynamics.hpp"
#include "retsim/model.hpp"

namespace retsim {

// Raised on unknown keys, malformed numbers, or out-of-range values; the
// message names the offending key. Mapped to process exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised in strict mode when a trajectory fails to reach a converged plateau
// within the horizon cap. Mapped to process exit code 3 by the CLI.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    BathSpec donor_bath{0.0, 0.0, 0.0};
    BathSpec acceptor_bath{0.0, 0.0, 0.0};
    std::vector<double> dE_list;     // site energy gaps E_D - E_A, cm^-1
    double J0 = 0.0;                 // coupling at the reference distance, cm^-1
    double r_min = 0.2;              // distance grid, units of R0
    double r_max = 0.5;
    int r_count = 1000;
    std::vector<double> r_list;      // populate/efficiency grid; defaults below
    bool method_cret = true;
    bool method_fret = true;
    double t_max = 2000.0;           // fs, initial propagation horizon
    double t_cap = 64000.0;          // fs, horizon-doubling cap
    double dt_report = 0.25;         // fs
    bool exp_compare = false;        // add effective-rate exponential columns
    bool strict = false;             // unconverged plateau -> ConvergenceError
    std::string out_dir = ".";
    std::string preset;              // recorded for the config comment line
    unsigned workers = 0;            // 0 -> RETSIM_WORKERS env or hardware

    void validate() const;
};

// Ordered key=value pairs, applied left to right (later keys override).
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Reads a flat key=value file ('#' comments and blank lines ignored).
KeyValues read_config_file(const std::string& path);

// Builds a config from key=value pairs. A "preset" key (case1 or case2) seeds
// the bath, coupling, temperature, and gap list; explicit keys override it.
// There are no built-in physics defaults beyond the presets.
RunConfig parse_config(const KeyValues& kv);

// One line of "key=value" pairs describing the fully resolved config; written
// as the '#' comment heading every output file.
std::string describe_config(const RunConfig& cfg);

struct SweepRow {
    double r = 0.0;
    double k_cret = 0.0;  // 1/fs; 0 when the method is disabled
    double k_fret = 0.0;
    bool cret_converged = true;
    bool fret_converged = true;
};

struct SweepResult {
    double dE = 0.0;
    std::vector<SweepRow> rows;  // ascending r
};

// Effective rates over the distance grid, one result per energy gap. Distance
// points are independent and distributed over the worker pool; rows come back
// sorted by ascending r and the output is worker-count independent.
std::vector<SweepResult> run_sweep(const RunConfig& cfg, const DynamicsEngine& engine);
void write_sweep_csv(const SweepResult& res, const RunConfig& cfg, const std::string& path);

// 2^6 / k_eff at r = 1/2 (linear interpolation on the sweep grid), in ns.
double deduce_lifetime(const std::vector<SweepRow>& rows, bool use_cret);

// Population trajectories for every (method, gap, distance) combination.
// Returns the emitted file paths; throws ConvergenceError in strict mode if
// any trajectory fails to plateau within the horizon cap.
std::vector<std::string> run_population(const RunConfig& cfg, const DynamicsEngine& engine);

// Transfer efficiency k_eff/(k_eff + 1/tau_D) over the sweep grid, against
// the ideal sixth-power law 1/(1 + r^6). tau_D in ns.
void run_efficiency(const RunConfig& cfg, const SweepResult& sweep, double tau_D_ns,
                    const std::string& path);

// Bath response dump: lineshape-function table plus emission and absorption
// spectra for a probe site energy.
void run_bath_probe(const RunConfig& cfg, double E_site, const std::string& prefix);

}  // namespace retsim

#endif
