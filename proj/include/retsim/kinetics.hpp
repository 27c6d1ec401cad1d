#ifndef RETSIM_KINETICS_HPP
#define RETSIM_KINETICS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "retsim/trajectory.hpp"

namespace retsim {

// Raised when the bi-exponential closed forms degenerate (k_F = 0 or B = 0).
class DegenerateKineticsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kInfiniteLifetime = std::numeric_limits<double>::infinity();

// Rate-equation parameters: forward/backward transfer plus spontaneous decay
// of each site. Lifetimes in fs; infinity switches decay off.
struct KineticRates {
    double k_F = 0.0;    // 1/fs, D -> A
    double k_F_r = 0.0;  // 1/fs, A -> D
    double tau_D = kInfiniteLifetime;  // fs
    double tau_A = kInfiniteLifetime;  // fs
    double I_r = 0.0;       // excitation rate under steady irradiation, 1/fs
    double D_conc = 1.0;    // ground-state donor concentration, arbitrary unit

    void validate() const {
        if (k_F < 0.0 || k_F_r < 0.0) throw std::domain_error("rates must be >= 0");
        if (!(tau_D > 0.0) || !(tau_A > 0.0))
            throw std::domain_error("lifetimes must be positive (or infinite)");
    }
    double gamma_D() const { return std::isinf(tau_D) ? 0.0 : 1.0 / tau_D; }
    double gamma_A() const { return std::isinf(tau_A) ? 0.0 : 1.0 / tau_A; }
};

struct EffectiveRate {
    double tau_RET = 0.0;  // fs
    double k_eff = 0.0;    // 1/fs; equals P_A_inf / tau_RET
    double P_A_inf = 0.0;
};

// Transfer time and effective rate from a population trajectory: tau_RET is
// the first time where P_D(t) - P_A(t) * P_D(inf)/P_A(inf) crosses 1/e
// (linear interpolation between samples), and k_eff = P_A(inf)/tau_RET.
EffectiveRate effective_rate(const PopulationTrajectory& traj);

// Closed-form eigenvalues of the two-state rate matrix; lambda_plus >= lambda_minus.
std::pair<double, double> biexp_eigenvalues(const KineticRates& rates);

// The (A, B) coefficients of the bi-exponential concentration solutions.
std::pair<double, double> biexp_coefficients(const KineticRates& rates);

// Concentrations ([D*](t), [A*](t)) for the pulsed initial condition
// [D*](0) = D0, [A*](0) = 0.
std::pair<double, double> biexp_solution(const KineticRates& rates, double D0, double t_fs);

// Steady state under weak continuous irradiation, with reverse transfer.
struct ReverseSteadyState {
    double D_star = 0.0;
    double A_star = 0.0;
    double efficiency = 0.0;
};
ReverseSteadyState steady_state_with_reverse(const KineticRates& rates);

// Long-time concentration ratio [D*]/[A*] against the detailed-balance target
// k_F_r / k_F.
struct DetailedBalance {
    double ratio = 0.0;
    double target = 0.0;
};
DetailedBalance detailed_balance_check(const KineticRates& rates);
double detailed_balance_check(const PopulationTrajectory& traj);

}  // namespace retsim

#endif
