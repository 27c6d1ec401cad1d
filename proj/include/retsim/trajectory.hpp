#ifndef RETSIM_TRAJECTORY_HPP
#define RETSIM_TRAJECTORY_HPP

#include <string>
#include <vector>

namespace retsim {

// Populations of the two-site system on a uniform reporting grid. Coherence
// columns are filled only by the coherent propagator; the plateau fields are
// set by plateau_value once a converged long-time window is found.
struct PopulationTrajectory {
    std::vector<double> t_grid;  // fs
    std::vector<double> P_D;
    std::vector<double> P_A;
    std::vector<double> coherence_re;  // empty for rate-equation propagation
    std::vector<double> coherence_im;

    double P_D_inf = 0.0;
    double P_A_inf = 0.0;
    bool plateau_converged = false;

    // Set when populations stray outside [0, 1] by more than 1e-3; the
    // second-order master equation is approximate and this is a caveat, not
    // a hard failure.
    bool positivity_flagged = false;
};

// Time-dependent forward/backward transfer rates in 1/fs.
struct RateTrajectory {
    std::vector<double> t_grid;  // fs
    std::vector<double> k_forward;
    std::vector<double> k_backward;

    double k_forward_inf = 0.0;   // stationary (equilibrated-bath) values
    double k_backward_inf = 0.0;
    bool plateau_converged = false;
};

void write_trajectory_csv(const PopulationTrajectory& traj, const std::string& path);

}  // namespace retsim

#endif
