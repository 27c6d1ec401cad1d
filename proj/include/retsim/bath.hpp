#ifndef RETSIM_BATH_HPP
#define RETSIM_BATH_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "retsim/model.hpp"

namespace retsim {

// Raised when a lineshape has collapsed to a delta function (no coupling to
// the bath), so no finite-width spectrum can be tabulated.
class DegenerateLineshapeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Frequency-integral evaluations of the bath response for one site.
// All time arguments in fs; returned phases are dimensionless.
class BathResponse {
public:
    explicit BathResponse(const BathSpec& spec);

    const BathSpec& spec() const { return spec_; }
    double reorganization() const { return lambda_; }

    // Two-time correlation function of the bath force, d^2 g / dt^2.
    // Units 1/fs^2; satisfies C(-t) = conj(C(t)).
    std::complex<double> correlation(double t_fs) const;

    // Cumulant lineshape exponent g(t); g(0) = 0, Im g -> -lambda*t/hbar.
    std::complex<double> lineshape_g(double t_fs) const;

    // Phonon-dressing phase phi(t); g(t) = phi(0) - phi(t) - i*lambda*t/hbar.
    std::complex<double> phi(double t_fs) const;

    // exp(-phi(0)/2), the single-site dressing factor in (0, 1].
    double dressing() const;

private:
    enum class Kernel { correlation, lineshape, phi };
    std::complex<double> integrate(Kernel kind, double t_fs) const;

    BathSpec spec_;
    double lambda_;
};

// Uniform-grid tabulation of g(t) and phi(t) for one site, used by the
// transfer-kernel and propagator code. Values beyond t_grid.back() are
// extrapolated from the asymptotic form (Re saturates, Im drifts linearly
// for g; phi decays to zero).
struct LineshapeTable {
    char site = '?';                     // 'D' or 'A'
    double temperature = 0.0;            // K
    double lambda = 0.0;                 // cm^-1
    double dressing = 1.0;               // exp(-phi(0)/2)
    double dt = 0.0;                     // fs
    std::vector<double> t_grid;          // t_grid[i] = i*dt
    std::vector<std::complex<double>> g_values;
    std::vector<std::complex<double>> phi_values;

    std::complex<double> g_at(double t_fs) const;
    std::complex<double> phi_at(double t_fs) const;
    double t_max() const { return t_grid.empty() ? 0.0 : t_grid.back(); }
};

LineshapeTable build_lineshape_table(const BathSpec& spec, char site,
                                     double t_max_fs, double dt_fs,
                                     unsigned workers = 0);

// Normalized spectral line profile on an energy grid (cm^-1); value has
// units 1/cm^-1 and integrates to one.
struct SpectrumTable {
    std::vector<double> omega;           // cm^-1
    std::vector<double> value;           // per cm^-1
    double center = 0.0;                 // nominal first moment, cm^-1
    double window_fs = 0.0;              // Gaussian window width used in FT
    double raw_integral = 1.0;           // grid integral before normalization

    double first_moment() const;
    double integral() const;
};

struct SpectrumOptions {
    // Gaussian truncation window exp(-0.5 (t/t_w)^2) applied to the
    // half-Fourier transform; 0 selects t_max/5 automatically. The window is
    // skipped when Re g already suppresses the integrand at t_max.
    double window_fs = 0.0;
    double grid_step = 0.0;              // cm^-1; 0 -> auto
    double grid_halfwidth = 0.0;         // cm^-1; 0 -> auto
};

// Emission profile of the donor: peaks near E_site - 2*lambda.
SpectrumTable emission_lineshape(const LineshapeTable& table, double E_site,
                                 const SpectrumOptions& opt = {});

// Absorption profile of the acceptor: first moment at E_site.
SpectrumTable absorption_lineshape(const LineshapeTable& table, double E_site,
                                   const SpectrumOptions& opt = {});

void write_lineshape_csv(const LineshapeTable& table, const std::string& path);
void write_spectrum_csv(const SpectrumTable& table, const std::string& path);

}  // namespace retsim

#endif
