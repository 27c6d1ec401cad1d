#include "retsim/model.hpp"

#include <cmath>

namespace retsim {

double coupling_at_distance(double J0, double r_over_r0) {
    if (!(r_over_r0 > 0.0))
        throw std::domain_error("coupling_at_distance: R/R0 must be positive");
    return J0 / (r_over_r0 * r_over_r0 * r_over_r0);
}

double DimerSpec::coupling() const {
    return coupling_at_distance(J0, R_over_R0);
}

double spectral_density(double omega, double eta, double omega_c) {
    if (omega < 0.0)
        throw std::domain_error("spectral_density: omega must be >= 0");
    const double x = omega / omega_c;
    return M_PI * (eta / 6.0) * (omega * omega / omega_c) * x * std::exp(-x);
}

double reorganization_energy(double eta, double omega_c) {
    return eta * omega_c / 3.0;
}

double orientation_factor(const DipoleGeometry& g) {
    return std::sin(g.theta_D) * std::sin(g.theta_A) * std::cos(g.phi_D - g.phi_A) -
           2.0 * std::cos(g.theta_D) * std::cos(g.theta_A);
}

}  // namespace retsim
