#ifndef RETSIM_CONSTANTS_HPP
#define RETSIM_CONSTANTS_HPP

// Unit system used throughout: energies and wavenumbers in cm^-1, time in fs,
// temperature in K, transition dipoles in Debye. Distances enter only as the
// dimensionless ratio R/R0. With energies in cm^-1 and time in fs,
// hbar = 1/(2 pi c) in cm^-1 fs.

namespace retsim::constants {

// CODATA speed of light, cm/fs
inline constexpr double c_cm_per_fs = 2.99792458e-5;

// hbar in cm^-1 fs  (= 1/(2 pi c))
inline constexpr double hbar = 5308.837458876145;

// Boltzmann constant in cm^-1 / K
inline constexpr double k_B = 0.6950348004;

// Avogadro's number, 1/mol
inline constexpr double N_A = 6.02214076e23;

// CGS values used only by the spectroscopic Forster-radius / radiative
// lifetime expressions (isolated in golden_rule.cpp).
inline constexpr double hbar_erg_s = 1.054571817e-27;
inline constexpr double c_cm_per_s = 2.99792458e10;
inline constexpr double debye_esu_cm = 1.0e-18;

inline constexpr double fs_per_ns = 1.0e6;

}  // namespace retsim::constants

#endif
