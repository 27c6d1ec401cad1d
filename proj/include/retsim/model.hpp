#ifndef RETSIM_MODEL_HPP
#define RETSIM_MODEL_HPP

#include <stdexcept>
#include <string>

namespace retsim {

// Electronic parameters of the donor-acceptor dimer. Energies in cm^-1,
// distance as the dimensionless ratio R/R0.
struct DimerSpec {
    double E_D = 0.0;        // donor excitation energy, cm^-1
    double E_A = 0.0;        // acceptor excitation energy, cm^-1
    double J0 = 0.0;         // electronic coupling at R = R0, cm^-1
    double R_over_R0 = 1.0;  // dimensionless

    void validate() const {
        if (!(R_over_R0 > 0.0))
            throw std::domain_error("DimerSpec: R/R0 must be positive");
    }

    // J = J0 (R0/R)^3, the transition-dipole coupling at this separation.
    double coupling() const;
};

// Super-Ohmic spectral density parameters for one site's bath.
struct BathSpec {
    double eta = 0.0;          // dimensionless coupling strength
    double omega_c = 0.0;      // cutoff, cm^-1 (as hbar*omega_c)
    double temperature = 0.0;  // K

    void validate() const {
        if (eta < 0.0) throw std::domain_error("BathSpec: eta must be >= 0");
        if (!(omega_c > 0.0)) throw std::domain_error("BathSpec: omega_c must be positive");
        if (!(temperature > 0.0)) throw std::domain_error("BathSpec: temperature must be positive");
    }
};

// Transition-dipole geometry. Angles in radians; magnitudes in Debye.
struct DipoleGeometry {
    double mu_D = 0.0;
    double mu_A = 0.0;
    double theta_D = 0.0;
    double phi_D = 0.0;
    double theta_A = 0.0;
    double phi_A = 0.0;
    double n_r = 1.0;        // refractive index for the coupling
    double n_r_prime = 1.0;  // effective refractive index for emission
};

// J(R) = J0 / (R/R0)^3
double coupling_at_distance(double J0, double r_over_r0);

// Value of the super-Ohmic spectral density at E = hbar*omega (cm^-1).
// Convention: includes the full pi*hbar prefactor of the definition
// J(omega) = pi*hbar*(eta/3!)*(omega^3/omega_c^2) e^{-omega/omega_c};
// parametrized by energy E the hbar is absorbed and the returned value is
// pi*(eta/6)*(E^3/omega_c^2) e^{-E/omega_c} in cm^-1. Every consumer divides
// the pi*hbar convention out consistently (see bath.cpp).
double spectral_density(double omega, double eta, double omega_c);

// Reorganization energy lambda = hbar*eta*omega_c/3, cm^-1.
double reorganization_energy(double eta, double omega_c);

// kappa = sin(tD) sin(tA) cos(pD - pA) - 2 cos(tD) cos(tA)
double orientation_factor(const DipoleGeometry& geom);

inline double spectral_density(double omega, const BathSpec& bath) {
    return spectral_density(omega, bath.eta, bath.omega_c);
}

inline double reorganization_energy(const BathSpec& bath) {
    return reorganization_energy(bath.eta, bath.omega_c);
}

}  // namespace retsim

#endif
