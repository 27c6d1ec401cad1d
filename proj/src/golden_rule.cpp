#include "retsim/golden_rule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "retsim/constants.hpp"

namespace retsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double interp(const SpectrumTable& s, double x) {
    if (x <= s.omega.front() || x >= s.omega.back()) return 0.0;
    const auto it = std::upper_bound(s.omega.begin(), s.omega.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - s.omega.begin()) - 1;
    const double f = (x - s.omega[i]) / (s.omega[i + 1] - s.omega[i]);
    return s.value[i] + f * (s.value[i + 1] - s.value[i]);
}

double debye_to_esu(double mu_debye) { return mu_debye * constants::debye_esu_cm; }

double tau_ns_to_s(double tau_ns) { return tau_ns * 1e-9; }

// Weighted overlap ∫ a(x) b(x) w(x) dx on the union of both grids restricted
// to the common support.
template <typename W>
double weighted_overlap(const SpectrumTable& a, const SpectrumTable& b, W&& weight,
                        bool* empty = nullptr) {
    const double lo = std::max(a.omega.front(), b.omega.front());
    const double hi = std::min(a.omega.back(), b.omega.back());
    if (empty) *empty = !(hi > lo);
    if (!(hi > lo)) return 0.0;
    std::vector<double> grid;
    grid.reserve(a.omega.size() + b.omega.size());
    for (double x : a.omega)
        if (x >= lo && x <= hi) grid.push_back(x);
    for (double x : b.omega)
        if (x >= lo && x <= hi) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    double sum = 0.0;
    double prev_x = grid.front();
    double prev_y = interp(a, prev_x) * interp(b, prev_x) * weight(prev_x);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i];
        const double y = interp(a, x) * interp(b, x) * weight(x);
        sum += 0.5 * (y + prev_y) * (x - prev_x);
        prev_x = x;
        prev_y = y;
    }
    return sum;
}

}  // namespace

SpectralOverlap spectral_overlap(const SpectrumTable& a, const SpectrumTable& b) {
    SpectralOverlap out;
    out.value = weighted_overlap(a, b, [](double) { return 1.0; }, &out.empty);
    return out;
}

OverlapRate fgr_rate_overlap(double J, const SpectrumTable& emission,
                             const SpectrumTable& absorption) {
    const SpectralOverlap ov = spectral_overlap(emission, absorption);
    OverlapRate out;
    out.overlap = ov.value;
    out.empty_overlap = ov.empty;
    out.rate = 2.0 * kPi * J * J * ov.value / constants::hbar;
    return out;
}

OverlapRate fgr_rate_wavenumber(double J_wn, const SpectrumTable& emission,
                                const SpectrumTable& absorption) {
    const SpectralOverlap ov = spectral_overlap(emission, absorption);
    OverlapRate out;
    out.overlap = ov.value;
    out.empty_overlap = ov.empty;
    out.rate = 4.0 * kPi * kPi * constants::c_cm_per_fs * J_wn * J_wn * ov.value;
    return out;
}

double fret_rate_standard(double tau_D_ns, double R_over_R0) {
    if (tau_D_ns <= 0.0) throw std::domain_error("lifetime must be positive");
    if (R_over_R0 <= 0.0) throw std::domain_error("distance ratio must be positive");
    const double r6 = std::pow(R_over_R0, 6);
    return 1.0 / (tau_D_ns * constants::fs_per_ns * r6);
}

double forster_radius_spectroscopic(const SpectrumTable& f_D,
                                    const SpectrumTable& eps_A,
                                    double kappa_sq, double n_r) {
    if (kappa_sq < 0.0) throw std::domain_error("kappa_sq must be nonnegative");
    if (n_r <= 0.0) throw std::domain_error("refractive index must be positive");
    const double theta = weighted_overlap(
        f_D, eps_A, [](double nu) { return 1.0 / (nu * nu * nu * nu); });
    if (!(theta > 0.0)) throw std::domain_error("nonpositive spectral overlap");
    const double pi5 = kPi * kPi * kPi * kPi * kPi;
    const double r6 = 9000.0 * std::log(10.0) * kappa_sq * theta /
                      (128.0 * pi5 * constants::N_A * std::pow(n_r, 4));
    return std::pow(r6, 1.0 / 6.0);
}

double forster_radius_lineshape(double tau_D_ns, double mu_D_debye,
                                double mu_A_debye, double kappa, double n_r,
                                const SpectrumTable& emission,
                                const SpectrumTable& absorption) {
    if (tau_D_ns <= 0.0) throw std::domain_error("lifetime must be positive");
    const double theta = spectral_overlap(emission, absorption).value;  // cm
    if (!(theta > 0.0)) throw std::domain_error("nonpositive spectral overlap");
    const double mu_D = debye_to_esu(mu_D_debye);
    const double mu_A = debye_to_esu(mu_A_debye);
    const double r6 = tau_ns_to_s(tau_D_ns) * mu_D * mu_D * mu_A * mu_A * kappa *
                      kappa * theta /
                      (constants::c_cm_per_s * constants::hbar_erg_s *
                       constants::hbar_erg_s * std::pow(n_r, 4));
    return std::pow(r6, 1.0 / 6.0);
}

double radiative_lifetime(double mu_D_debye, double n_r_prime,
                          const SpectrumTable& emission) {
    if (mu_D_debye <= 0.0) throw std::domain_error("dipole must be positive");
    double m3 = 0.0;  // third wavenumber moment, cm^-3
    for (std::size_t i = 1; i < emission.omega.size(); ++i) {
        const double x0 = emission.omega[i - 1], x1 = emission.omega[i];
        const double y0 = emission.value[i - 1] * x0 * x0 * x0;
        const double y1 = emission.value[i] * x1 * x1 * x1;
        m3 += 0.5 * (y0 + y1) * (x1 - x0);
    }
    if (!(m3 > 0.0)) throw std::domain_error("emission profile has no support");
    const double mu = debye_to_esu(mu_D_debye);
    const double rate_per_s = 32.0 * kPi * kPi * kPi * n_r_prime * mu * mu * m3 /
                              (3.0 * constants::hbar_erg_s);
    return 1e9 / rate_per_s;
}

double j0_point_dipole(double mu_D_debye, double mu_A_debye, double kappa,
                       double n_r, double R0_cm) {
    if (R0_cm <= 0.0) throw std::domain_error("R0 must be positive");
    const double J_erg = debye_to_esu(mu_D_debye) * debye_to_esu(mu_A_debye) *
                         kappa / (n_r * n_r * R0_cm * R0_cm * R0_cm);
    return J_erg / (2.0 * kPi * constants::hbar_erg_s * constants::c_cm_per_s);
}

double j0_from_lifetime(double tau_D_ns, const SpectrumTable& emission,
                        const SpectrumTable& absorption) {
    const double theta = spectral_overlap(emission, absorption).value;
    if (!(theta > 0.0)) throw std::domain_error("nonpositive spectral overlap");
    const double J_erg = constants::hbar_erg_s *
                         std::sqrt(constants::c_cm_per_s /
                                   (tau_ns_to_s(tau_D_ns) * theta));
    return J_erg / (2.0 * kPi * constants::hbar_erg_s * constants::c_cm_per_s);
}

double j0_from_emission(double mu_D_debye, double n_r_prime,
                        const SpectrumTable& emission,
                        const SpectrumTable& absorption) {
    const double tau_ns = radiative_lifetime(mu_D_debye, n_r_prime, emission);
    return j0_from_lifetime(tau_ns, emission, absorption);
}

double efficiency_forward(double k_F_per_fs, double tau_D_ns) {
    if (tau_D_ns <= 0.0) throw std::domain_error("lifetime must be positive");
    const double decay = 1.0 / (tau_D_ns * constants::fs_per_ns);
    return k_F_per_fs / (k_F_per_fs + decay);
}

double efficiency_distance(double R_over_R0) {
    if (R_over_R0 < 0.0) throw std::domain_error("distance ratio must be nonnegative");
    return 1.0 / (1.0 + std::pow(R_over_R0, 6));
}

double efficiency_from_lifetimes(double tau_DF_ns, double tau_D_ns) {
    if (tau_DF_ns <= 0.0 || tau_D_ns <= 0.0)
        throw std::domain_error("lifetimes must be positive");
    return 1.0 - tau_DF_ns / tau_D_ns;
}

SteadyState steady_state_populations(double I_r_per_fs, double donor_conc,
                                     double tau_D_ns, double k_F_per_fs) {
    if (tau_D_ns <= 0.0) throw std::domain_error("lifetime must be positive");
    const double decay = 1.0 / (tau_D_ns * constants::fs_per_ns);
    SteadyState out;
    out.without_transfer = I_r_per_fs * donor_conc / decay;
    out.with_transfer = I_r_per_fs * donor_conc / (decay + k_F_per_fs);
    out.efficiency = 1.0 - out.with_transfer / out.without_transfer;
    return out;
}

SpectrumTable load_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    SpectrumTable out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, y;
        if (row >> x >> y) {
            out.omega.push_back(x);
            out.value.push_back(y);
        }
    }
    if (out.omega.size() < 2) throw std::runtime_error("spectrum file too short: " + path);
    for (std::size_t i = 1; i < out.omega.size(); ++i) {
        if (out.omega[i] <= out.omega[i - 1])
            throw std::runtime_error("spectrum grid must be strictly increasing");
    }
    const double norm = out.integral();
    if (!(norm > 0.0)) throw std::runtime_error("spectrum has nonpositive integral");
    out.raw_integral = norm;
    for (double& v : out.value) v /= norm;
    out.center = out.first_moment();
    return out;
}

}  // namespace retsim
