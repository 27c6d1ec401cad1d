#ifndef RETSIM_GOLDEN_RULE_HPP
#define RETSIM_GOLDEN_RULE_HPP

#include <string>

#include "retsim/bath.hpp"

namespace retsim {

// Overlap of two normalized spectral profiles on their common grid support,
// in 1/cm^-1. Zero if the grids do not intersect.
struct SpectralOverlap {
    double value = 0.0;      // per cm^-1
    bool empty = false;      // grids share no support
};
SpectralOverlap spectral_overlap(const SpectrumTable& a, const SpectrumTable& b);

// Golden-rule transfer rate from the emission/absorption overlap. Both tables
// must be unit-normalized per cm^-1; J in cm^-1; result in 1/fs.
struct OverlapRate {
    double rate = 0.0;       // 1/fs
    double overlap = 0.0;    // per cm^-1
    bool empty_overlap = false;
};
OverlapRate fgr_rate_overlap(double J, const SpectrumTable& emission,
                             const SpectrumTable& absorption);

// Same rate written against wavenumber-scaled coupling J_wn = J / (2*pi*c*hbar)
// (numerically equal to J in cm^-1 in this unit system). Must agree with
// fgr_rate_overlap identically.
OverlapRate fgr_rate_wavenumber(double J_wn, const SpectrumTable& emission,
                                const SpectrumTable& absorption);

// Standard distance form: rate = (1/tau_D) * (R0/R)^6, returned in 1/fs.
double fret_rate_standard(double tau_D_ns, double R_over_R0);

// Critical-distance radius from donor emission profile f_D (normalized per
// cm^-1) and acceptor molar extinction eps_A (values in M^-1 cm^-1 on a cm^-1
// grid). Returns R0 in cm.
double forster_radius_spectroscopic(const SpectrumTable& f_D,
                                    const SpectrumTable& eps_A,
                                    double kappa_sq, double n_r);

// Radius from the lifetime and the normalized lineshape overlap; dipoles in
// Debye, tau_D in ns. Returns R0 in cm.
double forster_radius_lineshape(double tau_D_ns, double mu_D_debye,
                                double mu_A_debye, double kappa, double n_r,
                                const SpectrumTable& emission,
                                const SpectrumTable& absorption);

// Purely radiative donor lifetime in ns from the emission profile (normalized
// per cm^-1) and the screened refractive index n_r_prime.
double radiative_lifetime(double mu_D_debye, double n_r_prime,
                          const SpectrumTable& emission);

// Three routes to the coupling at the critical distance, all in cm^-1 and
// mutually consistent when fed linked inputs.
double j0_point_dipole(double mu_D_debye, double mu_A_debye, double kappa,
                       double n_r, double R0_cm);
double j0_from_lifetime(double tau_D_ns, const SpectrumTable& emission,
                        const SpectrumTable& absorption);
double j0_from_emission(double mu_D_debye, double n_r_prime,
                        const SpectrumTable& emission,
                        const SpectrumTable& absorption);

// Isotropic orientational average of kappa^2; provided for reference, never
// applied implicitly.
constexpr double kappa_sq_isotropic() { return 2.0 / 3.0; }

// Transfer efficiencies.
double efficiency_forward(double k_F_per_fs, double tau_D_ns);
double efficiency_distance(double R_over_R0);
double efficiency_from_lifetimes(double tau_DF_ns, double tau_D_ns);

// Steady excited-donor concentrations under constant irradiation I_r (per fs),
// without and with transfer, plus the implied efficiency.
struct SteadyState {
    double without_transfer = 0.0;
    double with_transfer = 0.0;
    double efficiency = 0.0;
};
SteadyState steady_state_populations(double I_r_per_fs, double donor_conc,
                                     double tau_D_ns, double k_F_per_fs);

// Two-column CSV (x in cm^-1, y density); values are normalized on load and
// the raw grid integral is kept in raw_integral.
SpectrumTable load_spectrum_csv(const std::string& path);

}  // namespace retsim

#endif
