#ifndef RETSIM_ODE_HPP
#define RETSIM_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace retsim {
namespace ode {

// Explicit Dormand-Prince 5(4) pair with step-size control. The derivative
// callback has signature deriv(t, y) -> std::array<double, N>. Advances y in
// place from t0 to t1; the step never exceeds max_step so time-dependent
// coefficients tabulated on a grid are sampled densely enough.
template <std::size_t N, typename F>
void integrate(F&& deriv, std::array<double, N>& y, double t0, double t1,
               double rel_tol = 1e-10, double abs_tol = 1e-12,
               double max_step = 0.0) {
    if (t1 <= t0) return;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    using State = std::array<double, N>;
    auto axpy = [](State& out, const State& base, double h,
                   std::initializer_list<std::pair<double, const State*>> terms) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            out[i] = base[i] + h * acc;
        }
    };

    double t = t0;
    double span = t1 - t0;
    double h = span / 100.0;
    if (max_step > 0.0) h = std::min(h, max_step);
    State k1 = deriv(t, y);
    int rejects_in_a_row = 0;
    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        State tmp, k2, k3, k4, k5, k6, k7, y5;
        axpy(tmp, y, h, {{a21, &k1}});
        k2 = deriv(t + c2 * h, tmp);
        axpy(tmp, y, h, {{a31, &k1}, {a32, &k2}});
        k3 = deriv(t + c3 * h, tmp);
        axpy(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        k4 = deriv(t + c4 * h, tmp);
        axpy(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        k5 = deriv(t + c5 * h, tmp);
        axpy(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        k6 = deriv(t + h, tmp);
        axpy(y5, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        k7 = deriv(t + h, y5);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7;  // first-same-as-last
            rejects_in_a_row = 0;
        } else if (++rejects_in_a_row > 60) {
            throw std::runtime_error("ODE step control failed to converge");
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        if (max_step > 0.0) h = std::min(h, max_step);
        if (!(h > 0.0) || t + h == t) throw std::runtime_error("ODE step underflow");
    }
}

}  // namespace ode
}  // namespace retsim

#endif
