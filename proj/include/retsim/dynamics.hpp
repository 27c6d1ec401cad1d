#ifndef RETSIM_DYNAMICS_HPP
#define RETSIM_DYNAMICS_HPP

#include <memory>

#include "retsim/bath.hpp"
#include "retsim/model.hpp"
#include "retsim/trajectory.hpp"

namespace retsim {

struct SiteBaths {
    BathSpec donor;
    BathSpec acceptor;
};

struct DynamicsOptions {
    double dt_report = 0.25;         // fs, dense reporting grid
    double t_report_fine = 2000.0;   // fs, dense reporting horizon
    double dt_report_coarse = 2.5;   // fs, reporting step beyond the dense horizon
    double dt_kernel = 0.1;          // fs, memory-kernel tabulation step
    double t_kernel = 2000.0;        // fs, kernel horizon; generator frozen beyond
    unsigned workers = 0;            // threads for table building
};

struct PlateauResult {
    double P_D_inf = 0.0;
    double P_A_inf = 0.0;
    bool converged = false;
};

// Long-time estimate: mean over the final window (last 15% of the time span)
// after a moving-average smoothing that washes out residual coherent
// oscillation; converged when the smoothed window spread is below 1e-3.
PlateauResult plateau_value(const PopulationTrajectory& traj);
void apply_plateau(PopulationTrajectory& traj);

// Shared machinery for one (donor bath, acceptor bath) pair: lineshape tables,
// polaron response phases, and per-energy-gap transfer kernels are built once
// and reused across distances, so sweeping R only rescales couplings.
class DynamicsEngine {
public:
    DynamicsEngine(const SiteBaths& baths, DynamicsOptions opt = {});
    ~DynamicsEngine();
    DynamicsEngine(const DynamicsEngine&) = delete;
    DynamicsEngine& operator=(const DynamicsEngine&) = delete;

    // Time-dependent forward/backward transfer rates for a donor excited into
    // an unrelaxed bath, reported on a uniform grid of step dt.
    RateTrajectory neq_fret_rate(const DimerSpec& dimer, double t_max, double dt) const;

    // Rate-equation propagation under the time-dependent kernels.
    PopulationTrajectory propagate_fret(const DimerSpec& dimer, double t_max) const;

    // Second-order time-local propagation of the dressed-frame density matrix,
    // including the first- and second-order terms driven by the initially
    // displaced donor bath. Populations are reported in the dressed frame.
    PopulationTrajectory cret_propagate(const DimerSpec& dimer, double t_max) const;

    // Stationary (equilibrated-donor) rates per unit J^2, 1/(fs cm^-2).
    void stationary_rates_per_J2(double E_D, double E_A, double* forward,
                                 double* backward) const;

    const LineshapeTable& donor_table() const;
    const LineshapeTable& acceptor_table() const;
    double dressing() const;  // w_D * w_A
    const DynamicsOptions& options() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot wrappers; prefer a shared DynamicsEngine when varying distance.
RateTrajectory neq_fret_rate(const DimerSpec& dimer, const SiteBaths& baths,
                             double t_max, double dt);
PopulationTrajectory propagate_fret(const DimerSpec& dimer, const SiteBaths& baths,
                                    double t_max);
PopulationTrajectory cret_propagate(const DimerSpec& dimer, const SiteBaths& baths,
                                    double t_max);

}  // namespace retsim

#endif
