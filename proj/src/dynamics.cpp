#include "retsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "retsim/constants.hpp"
#include "retsim/csv.hpp"
#include "retsim/kinetics.hpp"
#include "retsim/ode.hpp"

namespace retsim {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// Row-major 2x2 complex matrix in the {D, A} site basis.
struct Mat2 {
    cplx m00{}, m01{}, m10{}, m11{};
};

Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.m00 + y.m00, x.m01 + y.m01, x.m10 + y.m10, x.m11 + y.m11};
}
Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.m00 - y.m00, x.m01 - y.m01, x.m10 - y.m10, x.m11 - y.m11};
}
Mat2 operator*(const cplx& s, const Mat2& x) {
    return {s * x.m00, s * x.m01, s * x.m10, s * x.m11};
}
Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
            x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
}
Mat2 dagger(const Mat2& x) {
    return {std::conj(x.m00), std::conj(x.m10), std::conj(x.m01), std::conj(x.m11)};
}
Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

const Mat2 kV1{0.0, 1.0, 0.0, 0.0};  // |D><A|
const Mat2 kV2{0.0, 0.0, 1.0, 0.0};  // |A><D|

template <typename T>
T lerp_tab(const std::vector<T>& v, double dt, double t) {
    if (t <= 0.0) return v.front();
    const double x = t / dt;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= v.size()) return v.back();
    const double f = x - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
}

Mat2 lerp_tab(const std::vector<Mat2>& v, double dt, double t) {
    if (t <= 0.0) return v.front();
    const double x = t / dt;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= v.size()) return v.back();
    const cplx f{x - static_cast<double>(i), 0.0};
    return v[i] + f * (v[i + 1] - v[i]);
}

// Eigen-decomposition of H = [[delta, v], [v, 0]] (real symmetric):
// H = R diag(e_plus, e_minus) R^T with R a rotation by angle `phi`.
struct EigenH {
    double e_plus = 0.0, e_minus = 0.0;
    double c = 1.0, s = 0.0;  // cos(phi), sin(phi)

    // U(tau) = exp(-i H tau / hbar)
    Mat2 U(double tau_fs) const {
        const cplx ep = std::exp(-kI * (e_plus * tau_fs / constants::hbar));
        const cplx em = std::exp(-kI * (e_minus * tau_fs / constants::hbar));
        const double cc = c * c, ss = s * s, cs = c * s;
        return {cc * ep + ss * em, cs * (ep - em), cs * (ep - em), ss * ep + cc * em};
    }
};

EigenH diagonalize(double delta, double v) {
    EigenH e;
    const double mid = 0.5 * delta;
    const double omega = std::sqrt(mid * mid + v * v);
    e.e_plus = mid + omega;
    e.e_minus = mid - omega;
    const double phi = 0.5 * std::atan2(2.0 * v, delta);
    e.c = std::cos(phi);
    e.s = std::sin(phi);
    return e;
}

}  // namespace

// --- engine internals -----------------------------------------------------

struct DynamicsEngine::Impl {
    DynamicsOptions opt;
    LineshapeTable tD, tA;
    double w_D = 1.0, w_A = 1.0, w = 1.0, W2 = 1.0;

    std::size_t n_k = 0;   // kernel grid length
    double dt_k = 0.0;

    std::vector<cplx> g_sum;   // g_D + g_A on the kernel grid
    std::vector<cplx> K;       // phi_D + phi_A
    std::vector<cplx> Cx, Cy;  // dressed-frame bath correlations W2*(e^{+-K}-1)
    std::vector<cplx> qD, qA;  // exp(-2i Im phi_X(t)): displaced-bath phases
    std::size_t n_qD = 0, n_qA = 0;  // cutoff: q == 1 beyond these indices
    std::size_t n_K = 0;             // cutoff: Cx, Cy negligible beyond

    // Forward/backward kernels per unit J^2 for one donor-acceptor gap.
    struct FretKernel {
        std::vector<double> kf, kb;  // 1/(fs cm^-2) on the kernel grid
        double kf_inf = 0.0, kb_inf = 0.0;
    };
    mutable std::map<double, FretKernel> kernels;
    mutable std::mutex kernel_mutex;

    explicit Impl(const SiteBaths& baths, DynamicsOptions o) : opt(o) {
        tD = build_lineshape_table(baths.donor, 'D', opt.t_kernel, opt.dt_kernel,
                                   opt.workers);
        const bool same = baths.acceptor.eta == baths.donor.eta &&
                          baths.acceptor.omega_c == baths.donor.omega_c &&
                          baths.acceptor.temperature == baths.donor.temperature;
        if (same) {
            tA = tD;
            tA.site = 'A';
        } else {
            tA = build_lineshape_table(baths.acceptor, 'A', opt.t_kernel,
                                       opt.dt_kernel, opt.workers);
        }
        w_D = tD.dressing;
        w_A = tA.dressing;
        w = w_D * w_A;
        W2 = w * w;
        n_k = tD.t_grid.size();
        dt_k = opt.dt_kernel;

        g_sum.resize(n_k);
        K.resize(n_k);
        Cx.resize(n_k);
        Cy.resize(n_k);
        qD.resize(n_k);
        qA.resize(n_k);
        for (std::size_t i = 0; i < n_k; ++i) {
            g_sum[i] = tD.g_values[i] + tA.g_values[i];
            K[i] = tD.phi_values[i] + tA.phi_values[i];
            Cx[i] = W2 * (std::exp(K[i]) - 1.0);
            Cy[i] = W2 * (std::exp(-K[i]) - 1.0);
            qD[i] = std::exp(cplx(0.0, -2.0 * tD.phi_values[i].imag()));
            qA[i] = std::exp(cplx(0.0, -2.0 * tA.phi_values[i].imag()));
        }
        auto cutoff = [&](auto&& pred) {
            std::size_t n = n_k;
            while (n > 1 && pred(n - 1)) --n;
            return n;
        };
        // Beyond these indices the displaced-bath phases are within 2e-5 of
        // unity; treating them as exactly 1 turns the kernel convolution into
        // a prefix sum there, at an error far inside the 1e-3 rate budget.
        n_qD = cutoff([&](std::size_t i) {
            return std::abs(tD.phi_values[i].imag()) < 1e-5;
        });
        n_qA = cutoff([&](std::size_t i) {
            return std::abs(tA.phi_values[i].imag()) < 1e-5;
        });
        n_K = cutoff([&](std::size_t i) {
            return std::abs(Cx[i]) + std::abs(Cy[i]) < 1e-10;
        });
    }

    // k(t)/J^2 = (2/hbar^2) Re[ q(t) * trapz_tau F(tau) conj(q(t - tau)) ]
    // where the displaced-bath phase q differs from 1 only below index M.
    std::vector<double> kernel_convolution(const std::vector<cplx>& F,
                                           const std::vector<cplx>& q,
                                           std::size_t M) const {
        const double pref = 2.0 * dt_k / (constants::hbar * constants::hbar);
        std::vector<cplx> prefix(n_k);
        cplx run = 0.0;
        for (std::size_t j = 0; j < n_k; ++j) {
            run += F[j];
            prefix[j] = run;
        }
        std::vector<double> out(n_k);
        for (std::size_t i = 0; i < n_k; ++i) {
            const std::size_t jlo = i > M ? i - M : 0;
            cplx sum = jlo > 0 ? prefix[jlo - 1] : cplx(0.0);
            for (std::size_t j = jlo; j <= i; ++j) sum += F[j] * std::conj(q[i - j]);
            sum -= 0.5 * F[0] * std::conj(q[i]) + 0.5 * F[i];  // trapezoid ends; q[0]=1
            out[i] = pref * (q[i] * sum).real();
        }
        return out;
    }

    // Stationary rate per J^2: the integrand minus its persistent zero-phonon
    // tail, which contributes zero to the real part off resonance.
    double stationary_per_J2(double delta, double delta_tail) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_k; ++j) {
            const double tau = dt_k * static_cast<double>(j);
            const cplx full = std::exp(cplx(0.0, delta * tau / constants::hbar) - g_sum[j]);
            const cplx tail = W2 * std::exp(cplx(0.0, delta_tail * tau / constants::hbar));
            double v = (full - tail).real();
            if (j == 0 || j + 1 == n_k) v *= 0.5;
            acc += v;
        }
        return 2.0 * dt_k * acc / (constants::hbar * constants::hbar);
    }

    const FretKernel& kernel_for(double dE) const {
        std::lock_guard<std::mutex> lock(kernel_mutex);
        auto it = kernels.find(dE);
        if (it != kernels.end()) return it->second;

        const double lamD = tD.lambda, lamA = tA.lambda;
        FretKernel k;
        std::vector<cplx> Ff(n_k), Fb(n_k);
        const double df = dE - 2.0 * lamD;    // forward vertical gap
        const double db = -dE - 2.0 * lamA;   // backward vertical gap
        for (std::size_t j = 0; j < n_k; ++j) {
            const double tau = dt_k * static_cast<double>(j);
            Ff[j] = std::exp(cplx(0.0, df * tau / constants::hbar) - g_sum[j]);
            Fb[j] = std::exp(cplx(0.0, db * tau / constants::hbar) - g_sum[j]);
        }
        k.kf = kernel_convolution(Ff, qD, n_qD);
        k.kb = kernel_convolution(Fb, qA, n_qA);
        k.kf_inf = stationary_per_J2(df, dE - lamD + lamA);
        k.kb_inf = stationary_per_J2(db, -(dE - lamD + lamA));
        return kernels.emplace(dE, std::move(k)).first->second;
    }

    double rate_at(const std::vector<double>& k, double k_inf, double t) const {
        if (t >= opt.t_kernel) return k_inf;
        return lerp_tab(k, dt_k, t);
    }
};

DynamicsEngine::DynamicsEngine(const SiteBaths& baths, DynamicsOptions opt)
    : impl_(std::make_unique<Impl>(baths, opt)) {}
DynamicsEngine::~DynamicsEngine() = default;

const LineshapeTable& DynamicsEngine::donor_table() const { return impl_->tD; }
const LineshapeTable& DynamicsEngine::acceptor_table() const { return impl_->tA; }
double DynamicsEngine::dressing() const { return impl_->w; }
const DynamicsOptions& DynamicsEngine::options() const { return impl_->opt; }

void DynamicsEngine::stationary_rates_per_J2(double E_D, double E_A,
                                             double* forward, double* backward) const {
    const auto& k = impl_->kernel_for(E_D - E_A);
    if (forward) *forward = k.kf_inf;
    if (backward) *backward = k.kb_inf;
}

RateTrajectory DynamicsEngine::neq_fret_rate(const DimerSpec& dimer, double t_max,
                                             double dt) const {
    dimer.validate();
    if (!(t_max > 0.0) || !(dt > 0.0)) throw std::domain_error("need t_max, dt > 0");
    const double J = dimer.coupling();
    const double J2 = J * J;
    const auto& k = impl_->kernel_for(dimer.E_D - dimer.E_A);

    RateTrajectory out;
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    out.t_grid.resize(n);
    out.k_forward.resize(n);
    out.k_backward.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        out.t_grid[i] = t;
        out.k_forward[i] = J2 * impl_->rate_at(k.kf, k.kf_inf, t);
        out.k_backward[i] = J2 * impl_->rate_at(k.kb, k.kb_inf, t);
    }
    out.k_forward_inf = J2 * k.kf_inf;
    out.k_backward_inf = J2 * k.kb_inf;

    // Converged when the trailing average (one-window mean, which washes out
    // the persistent zero-phonon beat) matches the stationary value.
    const std::size_t win = std::max<std::size_t>(2, n / 10);
    double acc = 0.0;
    for (std::size_t i = n - win; i < n; ++i) acc += out.k_forward[i];
    acc /= static_cast<double>(win);
    const double scale = std::max(std::abs(out.k_forward_inf), 1e-300);
    out.plateau_converged = std::abs(acc - out.k_forward_inf) <= 1e-3 * scale;
    return out;
}

PopulationTrajectory DynamicsEngine::propagate_fret(const DimerSpec& dimer,
                                                    double t_max) const {
    dimer.validate();
    const double J = dimer.coupling();
    const double J2 = J * J;
    const auto& ker = impl_->kernel_for(dimer.E_D - dimer.E_A);
    const auto& opt = impl_->opt;

    PopulationTrajectory out;
    auto push = [&](double t, double pd) {
        out.t_grid.push_back(t);
        out.P_D.push_back(pd);
        out.P_A.push_back(1.0 - pd);
    };

    auto deriv = [&](double t, const std::array<double, 1>& y) {
        const double kf = J2 * impl_->rate_at(ker.kf, ker.kf_inf, t);
        const double kb = J2 * impl_->rate_at(ker.kb, ker.kb_inf, t);
        return std::array<double, 1>{-kf * y[0] + kb * (1.0 - y[0])};
    };

    std::array<double, 1> y{1.0};
    push(0.0, 1.0);
    const double t_fine = std::min(t_max, opt.t_report_fine);
    const auto n_fine = static_cast<std::size_t>(std::floor(t_fine / opt.dt_report + 1e-9));
    double t = 0.0;
    for (std::size_t i = 1; i <= n_fine; ++i) {
        const double t_next = opt.dt_report * static_cast<double>(i);
        ode::integrate(deriv, y, t, t_next, 1e-11, 1e-13, 1.0);
        t = t_next;
        push(t, y[0]);
    }
    if (t_max > t) {
        // Kernels are frozen at their stationary values past the kernel
        // horizon, so the remaining relaxation is a single exponential.
        if (t < opt.t_kernel) {
            ode::integrate(deriv, y, t, std::min(t_max, opt.t_kernel), 1e-11, 1e-13, 1.0);
            push(std::min(t_max, opt.t_kernel), y[0]);
            t = std::min(t_max, opt.t_kernel);
        }
        const double kf = J2 * ker.kf_inf, kb = J2 * ker.kb_inf;
        const double ktot = kf + kb;
        const double p_eq = ktot > 0.0 ? kb / ktot : y[0];
        const double p0 = y[0], t0 = t;
        for (double tc = t0 + opt.dt_report_coarse; tc <= t_max + 1e-9;
             tc += opt.dt_report_coarse) {
            const double pd = p_eq + (p0 - p_eq) * std::exp(-ktot * (tc - t0));
            push(tc, pd);
        }
    }
    apply_plateau(out);
    return out;
}

PopulationTrajectory DynamicsEngine::cret_propagate(const DimerSpec& dimer,
                                                    double t_max) const {
    dimer.validate();
    const Impl& im = *impl_;
    const auto& opt = im.opt;
    const double J = dimer.coupling();
    const double Jw = J * im.w;
    const double lamD = im.tD.lambda, lamA = im.tA.lambda;
    const double delta = (dimer.E_D - lamD) - (dimer.E_A - lamA);  // dressed gap
    const EigenH eig = diagonalize(delta, Jw);
    const Mat2 H{cplx(delta), cplx(Jw), cplx(Jw), cplx(0.0)};
    const double J2h2 = J * J / (constants::hbar * constants::hbar);

    // Time-local relaxation operators S_a(t) = int_0^t dtau
    // [C_x(tau) V_b(-tau) + C_y(tau) V_a(-tau)], tabulated by cumulative
    // trapezoid; the integrand dies with the bath correlations.
    const std::size_t n_S = std::min(im.n_k, im.n_K + 2);
    std::vector<Mat2> S1(im.n_k), S2(im.n_k);
    {
        Mat2 s1{}, s2{}, f1_prev{}, f2_prev{};
        for (std::size_t j = 0; j < n_S; ++j) {
            const double tau = im.dt_k * static_cast<double>(j);
            const Mat2 U = eig.U(tau);
            const Mat2 Ud = dagger(U);
            const Mat2 V1m = U * kV1 * Ud;  // V_1(-tau)
            const Mat2 V2m = U * kV2 * Ud;
            const Mat2 f1 = im.Cx[j] * V2m + im.Cy[j] * V1m;
            const Mat2 f2 = im.Cx[j] * V1m + im.Cy[j] * V2m;
            if (j > 0) {
                const cplx h{0.5 * im.dt_k, 0.0};
                s1 = s1 + h * (f1_prev + f1);
                s2 = s2 + h * (f2_prev + f2);
            }
            f1_prev = f1;
            f2_prev = f2;
            S1[j] = s1;
            S2[j] = s2;
        }
        for (std::size_t j = n_S; j < im.n_k; ++j) {
            S1[j] = S1[n_S - 1];
            S2[j] = S2[n_S - 1];
        }
    }

    // Driving terms from the initially displaced donor bath, tabulated on a
    // coarser grid. The first-order term carries the displacement phase
    // q_D(t); the second-order term carries the excess two-time correlations
    // of the displaced state over the equilibrium ones already inside S_a(t).
    // Both vanish once the displacement phase and the dressed correlations
    // have decayed, which bounds the double-sum support.
    const double dt_inh = 1.0;
    std::vector<Mat2> G;
    double t_inh = 0.0;
    {
        const auto stride = static_cast<std::size_t>(std::llround(dt_inh / im.dt_k));
        const std::size_t n_grid = (im.n_k - 1) / stride + 1;
        std::vector<cplx> dq(n_grid), eKp(n_grid), eKm(n_grid);
        for (std::size_t m = 0; m < n_grid; ++m) {
            const std::size_t j = m * stride;
            dq[m] = im.qD[j] - 1.0;
            eKp[m] = std::exp(im.K[j]) - 1.0;
            eKm[m] = std::exp(-im.K[j]) - 1.0;
        }
        // Support cutoffs; the dropped tails are O(1e-4) phase corrections on
        // an already second-order term.
        auto support = [&](auto&& mag) {
            std::size_t n = n_grid;
            while (n > 1 && mag(n - 1) < 1e-4) --n;
            return n;
        };
        const std::size_t m_q = support([&](std::size_t i) { return std::abs(dq[i]); });
        const std::size_t m_K = support([&](std::size_t i) {
            return std::max(std::abs(eKp[i]), std::abs(eKm[i]));
        });
        for (std::size_t m = m_q; m < n_grid; ++m) dq[m] = 0.0;

        const std::size_t n_inh = std::min(n_grid, m_q + m_K + 2);
        t_inh = dt_inh * static_cast<double>(n_inh - 1);
        G.resize(n_inh);

        const Mat2 rho0{cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0)};
        std::vector<std::array<Mat2, 2>> Vt(n_inh);    // interaction-picture V_a
        std::vector<std::array<Mat2, 2>> VR(n_inh);    // V_a(t) rho0
        std::vector<std::array<Mat2, 2>> RV(n_inh);    // rho0 V_a(t)
        std::vector<Mat2> Ut(n_inh);
        for (std::size_t m = 0; m < n_inh; ++m) {
            const double t = dt_inh * static_cast<double>(m);
            Ut[m] = eig.U(t);
            const Mat2 Ud = dagger(Ut[m]);
            Vt[m][0] = Ud * kV1 * Ut[m];
            Vt[m][1] = Ud * kV2 * Ut[m];
            for (int a = 0; a < 2; ++a) {
                VR[m][a] = Vt[m][a] * rho0;
                RV[m][a] = rho0 * Vt[m][a];
            }
        }
        for (std::size_t m = 0; m < n_inh; ++m) {
            const cplx qt = 1.0 + dq[m];
            const Mat2& U = Ut[m];
            const Mat2 Ud = dagger(U);

            const Mat2 rho_free = U * rho0 * Ud;
            Mat2 g1 = (-kI * (J * im.w / constants::hbar)) *
                      ((qt - 1.0) * commutator(kV1, rho_free) +
                       (std::conj(qt) - 1.0) * commutator(kV2, rho_free));

            Mat2 acc{};
            const std::size_t n_lo = (m <= m_q || m_K + 1 >= m) ? 0 : m - m_K - 1;
            const std::size_t n_hi = m;
            for (std::size_t n = n_lo; n <= n_hi; ++n) {
                const cplx qs = 1.0 + dq[n];
                const std::size_t u = m - n;
                const bool have_K = u < m_K;
                const double wt = (n == 0 || n == m) ? 0.5 : 1.0;
                for (int a = 0; a < 2; ++a) {
                    const cplx qa = a == 0 ? qt : std::conj(qt);
                    for (int b = 0; b < 2; ++b) {
                        const cplx qb = b == 0 ? qs : std::conj(qs);
                        // sigma = +1 for cross pairs (1,2)/(2,1), -1 diagonal
                        const bool diag = a == b;
                        cplx e1{}, e2{};  // e^{sigma K(t-s)}-1 and its conjugate-K twin
                        if (have_K) {
                            e1 = diag ? eKm[u] : eKp[u];
                            e2 = std::conj(e1);
                        }
                        const cplx cross = qa * qb - 1.0;
                        const cplx common = (qa - 1.0) * (qb - 1.0);
                        const cplx d1 = im.W2 * (e1 * cross + common);
                        const cplx d2 = im.W2 * (e2 * cross + common);
                        if (std::abs(d1) + std::abs(d2) < 1e-14) continue;
                        const Mat2& Va = Vt[m][a];
                        const Mat2& Vb = Vt[n][b];
                        acc = acc +
                              (wt * d1) * (Va * VR[n][b] - VR[n][b] * Va) +
                              (wt * d2) * (RV[n][b] * Va - VR[m][a] * Vb);
                    }
                }
            }
            const cplx pref(-J2h2 * dt_inh, 0.0);
            G[m] = g1 + U * (pref * acc) * Ud;
        }
    }

    // Equation of motion.
    auto unpack = [](const std::array<double, 8>& y) {
        return Mat2{{y[0], y[1]}, {y[2], y[3]}, {y[4], y[5]}, {y[6], y[7]}};
    };
    auto pack = [](const Mat2& m) {
        return std::array<double, 8>{m.m00.real(), m.m00.imag(), m.m01.real(),
                                     m.m01.imag(), m.m10.real(), m.m10.imag(),
                                     m.m11.real(), m.m11.imag()};
    };
    auto deriv = [&](double t, const std::array<double, 8>& y) {
        const Mat2 rho = unpack(y);
        const Mat2 s1 = lerp_tab(S1, im.dt_k, t);
        const Mat2 s2 = lerp_tab(S2, im.dt_k, t);
        Mat2 d = (-kI * (1.0 / constants::hbar)) * commutator(H, rho);
        const Mat2 s1r = s1 * rho, s2r = s2 * rho;
        const Mat2 rs1 = rho * dagger(s1), rs2 = rho * dagger(s2);
        Mat2 relax = commutator(kV1, s1r) + commutator(kV2, s2r) +
                     (rs1 * kV2 - kV2 * rs1) + (rs2 * kV1 - kV1 * rs2);
        d = d - cplx(J2h2, 0.0) * relax;
        if (t < t_inh) d = d + lerp_tab(G, dt_inh, t);
        return pack(d);
    };

    PopulationTrajectory out;
    auto push = [&](double t, const Mat2& rho) {
        out.t_grid.push_back(t);
        out.P_D.push_back(rho.m00.real());
        out.P_A.push_back(rho.m11.real());
        out.coherence_re.push_back(rho.m01.real());
        out.coherence_im.push_back(rho.m01.imag());
    };

    std::array<double, 8> y = pack({cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0)});
    push(0.0, unpack(y));
    double t = 0.0;
    const double t_fine = std::min(t_max, opt.t_report_fine);
    const auto n_fine = static_cast<std::size_t>(std::floor(t_fine / opt.dt_report + 1e-9));
    for (std::size_t i = 1; i <= n_fine; ++i) {
        const double t_next = opt.dt_report * static_cast<double>(i);
        ode::integrate(deriv, y, t, t_next, 1e-10, 1e-12, opt.dt_report);
        t = t_next;
        push(t, unpack(y));
    }
    while (t + opt.dt_report_coarse <= t_max + 1e-9) {
        const double t_next = t + opt.dt_report_coarse;
        ode::integrate(deriv, y, t, t_next, 1e-10, 1e-12, opt.dt_report_coarse);
        t = t_next;
        push(t, unpack(y));
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < out.P_D.size(); ++i) {
        worst = std::max({worst, -out.P_D[i], out.P_D[i] - 1.0, -out.P_A[i],
                          out.P_A[i] - 1.0});
    }
    out.positivity_flagged = worst > 1e-3;
    apply_plateau(out);
    return out;
}

// --- plateau --------------------------------------------------------------

PlateauResult plateau_value(const PopulationTrajectory& traj) {
    PlateauResult res;
    const std::size_t n = traj.t_grid.size();
    if (n < 8) return res;
    const double t_end = traj.t_grid.back();
    const double t_lo = t_end - 0.15 * (t_end - traj.t_grid.front());
    std::size_t i_lo = n - 1;
    while (i_lo > 0 && traj.t_grid[i_lo - 1] >= t_lo) --i_lo;
    const std::size_t win = n - i_lo;
    if (win < 4) return res;

    // Moving average over a fraction of the window to suppress residual
    // coherent oscillation before testing flatness.
    const std::size_t half = std::max<std::size_t>(1, win / 8);
    auto smooth_at = [&](const std::vector<double>& v, std::size_t i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(n - 1, i + half);
        double s = 0.0;
        for (std::size_t k = a; k <= b; ++k) s += v[k];
        return s / static_cast<double>(b - a + 1);
    };
    double lo = 1e300, hi = -1e300, mean_d = 0.0, mean_a = 0.0;
    for (std::size_t i = i_lo; i < n; ++i) {
        const double sd = smooth_at(traj.P_D, i);
        lo = std::min(lo, sd);
        hi = std::max(hi, sd);
        mean_d += traj.P_D[i];
        mean_a += traj.P_A[i];
    }
    res.P_D_inf = mean_d / static_cast<double>(win);
    res.P_A_inf = mean_a / static_cast<double>(win);
    res.converged = (hi - lo) < 1e-3;
    return res;
}

void apply_plateau(PopulationTrajectory& traj) {
    const PlateauResult res = plateau_value(traj);
    traj.P_D_inf = res.P_D_inf;
    traj.P_A_inf = res.P_A_inf;
    traj.plateau_converged = res.converged;
}

// --- one-shot wrappers ----------------------------------------------------

RateTrajectory neq_fret_rate(const DimerSpec& dimer, const SiteBaths& baths,
                             double t_max, double dt) {
    DynamicsEngine engine(baths);
    return engine.neq_fret_rate(dimer, t_max, dt);
}

PopulationTrajectory propagate_fret(const DimerSpec& dimer, const SiteBaths& baths,
                                    double t_max) {
    DynamicsEngine engine(baths);
    return engine.propagate_fret(dimer, t_max);
}

PopulationTrajectory cret_propagate(const DimerSpec& dimer, const SiteBaths& baths,
                                    double t_max) {
    DynamicsEngine engine(baths);
    return engine.cret_propagate(dimer, t_max);
}

// --- trajectory CSV -------------------------------------------------------

void write_trajectory_csv(const PopulationTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const bool coh = !traj.coherence_re.empty();
    out << "t_fs,P_D,P_A,coh_re,coh_im\n";
    for (std::size_t i = 0; i < traj.t_grid.size(); ++i) {
        out << csv::format(traj.t_grid[i]) << ',' << csv::format(traj.P_D[i]) << ','
            << csv::format(traj.P_A[i]) << ',' << csv::format(coh ? traj.coherence_re[i] : 0.0)
            << ',' << csv::format(coh ? traj.coherence_im[i] : 0.0) << '\n';
    }
}

}  // namespace retsim
