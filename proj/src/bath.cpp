#include "retsim/bath.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "retsim/constants.hpp"
#include "retsim/csv.hpp"
#include "retsim/parallel.hpp"
#include "retsim/quadrature.hpp"

namespace retsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// coth(E / 2kT) with a Laurent series near zero; the 1/x pole cancels against
// the spectral density in every integrand that uses it.
double coth_thermal(double E, double temperature) {
    const double x = E / (2.0 * constants::k_B * temperature);
    if (x < 2e-2) {
        const double x2 = x * x;
        return 1.0 / x + x * (1.0 / 3.0 - x2 / 45.0);
    }
    return 1.0 / std::tanh(x);
}

// Panel count that keeps > 12 Gauss nodes per oscillation of cos(E t / hbar)
// over [0, E_max].
std::size_t oscillation_panels(double E_max, double t_fs, double per_period = 1.5) {
    const double periods = E_max * std::abs(t_fs) / (2.0 * kPi * constants::hbar);
    const auto n = static_cast<std::size_t>(std::ceil(per_period * periods));
    return std::max<std::size_t>(16, n);
}

}  // namespace

BathResponse::BathResponse(const BathSpec& spec) : spec_(spec) {
    spec_.validate();
    lambda_ = reorganization_energy(spec_);
}

std::complex<double> BathResponse::integrate(Kernel kind, double t_fs) const {
    const double E_max = 40.0 * spec_.omega_c;
    const double T = spec_.temperature;
    const double w_t = t_fs / constants::hbar;  // rad per cm^-1
    const std::size_t seed = oscillation_panels(E_max, t_fs);

    auto run = [&](auto&& f) {
        return quad::integrate_adaptive(f, 0.0, E_max, 1e-10, seed);
    };

    double re = 0.0, im = 0.0;
    switch (kind) {
        case Kernel::correlation: {
            const double s = 1.0 / (kPi * constants::hbar * constants::hbar);
            re = run([&](double E) {
                return s * spectral_density(E, spec_) * coth_thermal(E, T) * std::cos(E * w_t);
            });
            im = -run([&](double E) {
                return s * spectral_density(E, spec_) * std::sin(E * w_t);
            });
            break;
        }
        case Kernel::lineshape: {
            re = run([&](double E) {
                return spectral_density(E, spec_) / (kPi * E * E) * coth_thermal(E, T) *
                       (1.0 - std::cos(E * w_t));
            });
            im = run([&](double E) {
                return spectral_density(E, spec_) / (kPi * E * E) *
                       (std::sin(E * w_t) - E * w_t);
            });
            break;
        }
        case Kernel::phi: {
            re = run([&](double E) {
                return spectral_density(E, spec_) / (kPi * E * E) * coth_thermal(E, T) *
                       std::cos(E * w_t);
            });
            im = -run([&](double E) {
                return spectral_density(E, spec_) / (kPi * E * E) * std::sin(E * w_t);
            });
            break;
        }
    }
    return {re, im};
}

std::complex<double> BathResponse::correlation(double t_fs) const {
    if (t_fs < 0.0) return std::conj(correlation(-t_fs));
    return integrate(Kernel::correlation, t_fs);
}

std::complex<double> BathResponse::lineshape_g(double t_fs) const {
    if (t_fs < 0.0) return std::conj(lineshape_g(-t_fs));
    return integrate(Kernel::lineshape, t_fs);
}

std::complex<double> BathResponse::phi(double t_fs) const {
    if (t_fs < 0.0) return std::conj(phi(-t_fs));
    return integrate(Kernel::phi, t_fs);
}

double BathResponse::dressing() const {
    const double phi0 = integrate(Kernel::phi, 0.0).real();
    if (!std::isfinite(phi0)) {
        throw std::domain_error("phonon dressing integral diverges for this spectral density");
    }
    return std::exp(-0.5 * phi0);
}

// --- table builder --------------------------------------------------------

LineshapeTable build_lineshape_table(const BathSpec& spec, char site,
                                     double t_max_fs, double dt_fs,
                                     unsigned workers) {
    spec.validate();
    if (t_max_fs <= 0.0 || dt_fs <= 0.0 || dt_fs > t_max_fs) {
        throw std::domain_error("lineshape table needs 0 < dt <= t_max");
    }

    // exp(-30) ~ 1e-13 already buries the integrand relative to the 1e-8
    // convergence check below.
    const double E_max = 30.0 * spec.omega_c;
    const std::size_t n_t = static_cast<std::size_t>(std::llround(t_max_fs / dt_fs)) + 1;

    // Fixed Gauss-Legendre node set sized for the fastest oscillation in the
    // table; the frequency-dependent factors are hoisted out of the t loop.
    struct Nodes {
        std::vector<double> E, wJc, wJ2;  // node energy, w*(J/pi E^2)*coth, w*(J/pi E^2)
        double phi0 = 0.0, lam = 0.0, c0 = 0.0;
    };
    auto make_nodes = [&](std::size_t panels) {
        Nodes nd;
        const double h = E_max / static_cast<double>(panels);
        nd.E.reserve(panels * quad::kGaussOrder);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = h * (static_cast<double>(p) + 0.5);
            for (int i = 0; i < quad::kGaussOrder; ++i) {
                const double E = mid + 0.5 * h * quad::kGaussNodes[i];
                const double wq = 0.5 * h * quad::kGaussWeights[i];
                const double j2 = wq * spectral_density(E, spec) / (kPi * E * E);
                nd.E.push_back(E);
                nd.wJ2.push_back(j2);
                nd.wJc.push_back(j2 * coth_thermal(E, spec.temperature));
            }
        }
        for (std::size_t k = 0; k < nd.E.size(); ++k) {
            nd.phi0 += nd.wJc[k];
            nd.lam += nd.wJ2[k] * nd.E[k];
            nd.c0 += nd.wJc[k] * nd.E[k] * nd.E[k];
        }
        return nd;
    };
    auto phi_on = [&](const Nodes& nd, double t_fs) {
        const double w_t = t_fs / constants::hbar;
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < nd.E.size(); ++k) {
            const double a = nd.E[k] * w_t;
            re += nd.wJc[k] * std::cos(a);
            im -= nd.wJ2[k] * std::sin(a);
        }
        return std::complex<double>(re, im);
    };

    const std::size_t panels = oscillation_panels(E_max, t_max_fs, 1.3);
    const Nodes nd = make_nodes(panels);

    // Spot-check the fixed node set against a doubled one.
    {
        const Nodes fine = make_nodes(panels * 2);
        const double scale = std::abs(fine.phi0);
        double worst = std::abs(nd.phi0 - fine.phi0) / scale;
        for (int s = 1; s <= 8; ++s) {
            const double t = t_max_fs * static_cast<double>(s) / 8.0;
            worst = std::max(worst, std::abs(phi_on(nd, t) - phi_on(fine, t)) / scale);
        }
        if (worst > 1e-8) {
            throw AccuracyError("lineshape table quadrature not converged", worst);
        }
    }

    LineshapeTable table;
    table.site = site;
    table.temperature = spec.temperature;
    table.lambda = nd.lam;
    table.dressing = std::exp(-0.5 * nd.phi0);
    table.dt = dt_fs;
    table.t_grid.resize(n_t);
    table.g_values.resize(n_t);
    table.phi_values.resize(n_t);

    // Fixed-size tiles over the time grid; inside a tile each node advances
    // its phase by one rotation per step instead of calling sin/cos. Tiling
    // keeps the per-time summation order independent of the worker count.
    constexpr std::size_t kTile = 2048;
    const std::size_t n_tiles = (n_t + kTile - 1) / kTile;
    const std::size_t n_nodes = nd.E.size();
    std::vector<double> rot_c(n_nodes), rot_s(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double a = nd.E[k] * dt_fs / constants::hbar;
        rot_c[k] = std::cos(a);
        rot_s[k] = std::sin(a);
    }

    parallel_for(n_tiles, [&](std::size_t tile) {
        const std::size_t i0 = tile * kTile;
        const std::size_t i1 = std::min(n_t, i0 + kTile);
        const std::size_t m = i1 - i0;
        std::vector<double> acc_re(m, 0.0), acc_im(m, 0.0);
        const double t0 = dt_fs * static_cast<double>(i0) / constants::hbar;
        for (std::size_t k = 0; k < n_nodes; ++k) {
            double zc = std::cos(nd.E[k] * t0);
            double zs = std::sin(nd.E[k] * t0);
            const double rc = rot_c[k], rs = rot_s[k];
            const double wc = nd.wJc[k], w2 = nd.wJ2[k];
            for (std::size_t j = 0; j < m; ++j) {
                acc_re[j] += wc * zc;
                acc_im[j] -= w2 * zs;
                const double nzc = zc * rc - zs * rs;
                zs = zc * rs + zs * rc;
                zc = nzc;
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t i = i0 + j;
            const double t = dt_fs * static_cast<double>(i);
            const std::complex<double> ph(acc_re[j], acc_im[j]);
            table.t_grid[i] = t;
            table.phi_values[i] = ph;
            table.g_values[i] = std::complex<double>(nd.phi0, 0.0) - ph -
                                std::complex<double>(0.0, nd.lam * t / constants::hbar);
        }
    }, workers);
    return table;
}

namespace {

std::complex<double> lerp(const std::vector<std::complex<double>>& v, double dt, double t) {
    const double x = t / dt;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= v.size()) return v.back();
    const double f = x - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
}

}  // namespace

std::complex<double> LineshapeTable::g_at(double t_fs) const {
    if (t_fs < 0.0) return std::conj(g_at(-t_fs));
    if (t_fs >= t_max()) {
        // Re g has saturated; Im g keeps the linear reorganization drift.
        const std::complex<double> tail = g_values.back();
        return {tail.real(), tail.imag() - lambda * (t_fs - t_max()) / constants::hbar};
    }
    return lerp(g_values, dt, t_fs);
}

std::complex<double> LineshapeTable::phi_at(double t_fs) const {
    if (t_fs < 0.0) return std::conj(phi_at(-t_fs));
    if (t_fs >= t_max()) return phi_values.back();
    return lerp(phi_values, dt, t_fs);
}

// --- spectra --------------------------------------------------------------

namespace {

SpectrumTable half_fourier_spectrum(const LineshapeTable& table, double center,
                                    bool conjugate_g, const SpectrumOptions& opt) {
    if (table.g_values.empty()) throw std::domain_error("empty lineshape table");
    const double g_end = table.g_values.back().real();
    if (g_end < 1e-12) {
        throw DegenerateLineshapeError(
            "lineshape has no phonon broadening; spectrum is a delta function");
    }

    // Window off only when the integrand has already decayed at the end of
    // the table; otherwise the truncated transform would ring.
    double t_w = 0.0;
    if (g_end < 30.0) t_w = opt.window_fs > 0.0 ? opt.window_fs : table.t_max() / 5.0;

    // Variance of the bare profile is hbar^2 g''(0), read off the table head;
    // the window convolves in an extra Gaussian of width hbar / t_w.
    const double d2 = (table.g_values[2].real() - 2.0 * table.g_values[1].real() +
                       table.g_values[0].real()) / (table.dt * table.dt);
    const double sigma2 = d2 * constants::hbar * constants::hbar;
    const double sigma_zpl = t_w > 0.0 ? constants::hbar / t_w : std::sqrt(sigma2);
    const double sigma = std::sqrt(std::max(sigma2, 1e-12));

    const double halfwidth = opt.grid_halfwidth > 0.0
                                 ? opt.grid_halfwidth
                                 : 12.0 * sigma + 6.0 * table.lambda + 10.0 * sigma_zpl;
    const double step = opt.grid_step > 0.0
                            ? opt.grid_step
                            : std::min(sigma / 8.0, sigma_zpl / 4.0);

    const auto n_omega = static_cast<std::size_t>(std::ceil(2.0 * halfwidth / step)) + 1;
    SpectrumTable out;
    out.center = center;
    out.window_fs = t_w;
    out.omega.resize(n_omega);
    out.value.resize(n_omega);

    const std::size_t n_t = table.t_grid.size();
    std::vector<double> fr(n_t), fi(n_t);  // windowed exp(-g) samples
    for (std::size_t k = 0; k < n_t; ++k) {
        std::complex<double> g = table.g_values[k];
        if (conjugate_g) g = std::conj(g);
        double win = 1.0;
        if (t_w > 0.0) {
            const double u = table.t_grid[k] / t_w;
            win = std::exp(-0.5 * u * u);
        }
        const std::complex<double> f = win * std::exp(-g);
        fr[k] = f.real();
        fi[k] = f.imag();
    }

    parallel_for(n_omega, [&](std::size_t j) {
        const double E = center - halfwidth + step * static_cast<double>(j);
        const double a = (E - center) * table.dt / constants::hbar;
        const double rc = std::cos(a), rs = std::sin(a);
        // Trapezoid rule over the table grid; the phase advances by a fixed
        // rotation per sample.
        double zc = 1.0, zs = 0.0;
        double acc = 0.5 * fr[0];
        for (std::size_t k = 1; k < n_t; ++k) {
            const double nzc = zc * rc - zs * rs;
            zs = zc * rs + zs * rc;
            zc = nzc;
            acc += fr[k] * zc - fi[k] * zs;
        }
        acc -= 0.5 * (fr[n_t - 1] * zc - fi[n_t - 1] * zs);
        out.omega[j] = E;
        out.value[j] = std::max(0.0, acc * table.dt / (kPi * constants::hbar));
    });

    // Renormalize away truncation/discretization residue.
    const double norm = out.integral();
    if (!(norm > 0.0)) throw AccuracyError("spectrum normalization vanished", norm);
    out.raw_integral = norm;
    for (double& v : out.value) v /= norm;
    return out;
}

}  // namespace

SpectrumTable emission_lineshape(const LineshapeTable& table, double E_site,
                                 const SpectrumOptions& opt) {
    return half_fourier_spectrum(table, E_site - 2.0 * table.lambda, true, opt);
}

SpectrumTable absorption_lineshape(const LineshapeTable& table, double E_site,
                                   const SpectrumOptions& opt) {
    return half_fourier_spectrum(table, E_site, false, opt);
}

double SpectrumTable::integral() const {
    if (omega.size() < 2) return 0.0;
    const double h = omega[1] - omega[0];
    double s = 0.5 * (value.front() + value.back());
    for (std::size_t i = 1; i + 1 < value.size(); ++i) s += value[i];
    return s * h;
}

double SpectrumTable::first_moment() const {
    if (omega.size() < 2) return 0.0;
    const double h = omega[1] - omega[0];
    double s = 0.5 * (omega.front() * value.front() + omega.back() * value.back());
    for (std::size_t i = 1; i + 1 < value.size(); ++i) s += omega[i] * value[i];
    return s * h / integral();
}

void write_lineshape_csv(const LineshapeTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t_fs,g_re,g_im,phi_re,phi_im\n";
    for (std::size_t i = 0; i < table.t_grid.size(); ++i) {
        out << csv::format(table.t_grid[i]) << ',' << csv::format(table.g_values[i].real())
            << ',' << csv::format(table.g_values[i].imag()) << ','
            << csv::format(table.phi_values[i].real()) << ','
            << csv::format(table.phi_values[i].imag()) << '\n';
    }
}

void write_spectrum_csv(const SpectrumTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "omega_cm1,density_per_cm1\n";
    for (std::size_t i = 0; i < table.omega.size(); ++i) {
        out << csv::format(table.omega[i]) << ',' << csv::format(table.value[i]) << '\n';
    }
}

}  // namespace retsim
