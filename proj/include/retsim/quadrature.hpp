#ifndef RETSIM_QUADRATURE_HPP
#define RETSIM_QUADRATURE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace retsim {

// Raised when a quadrature fails to reach the requested tolerance; carries the
// tolerance that was actually achieved.
class AccuracyError : public std::runtime_error {
  public:
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const { return achieved_; }

  private:
    double achieved_;
};

namespace quad {

// 12-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr int kGaussOrder = 12;
extern const double kGaussNodes[kGaussOrder];
extern const double kGaussWeights[kGaussOrder];

// Composite Gauss-Legendre over [a, b] with a fixed number of equal panels.
template <typename F>
double gauss_panels(F&& f, double a, double b, std::size_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        double local = 0.0;
        for (int i = 0; i < kGaussOrder; ++i)
            local += kGaussWeights[i] * f(mid + 0.5 * h * kGaussNodes[i]);
        sum += local;
    }
    return sum * 0.5 * h;
}

// Panel-doubling adaptive integration. `min_panels` lets the caller seed the
// panel count from a known oscillation scale (for integrands carrying
// cos(E t / hbar), one panel per period is already very accurate at order 12).
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol,
                          std::size_t min_panels = 8, std::size_t max_panels = 1u << 22) {
    std::size_t n = min_panels < 1 ? 1 : min_panels;
    double prev = gauss_panels(f, a, b, n);
    double achieved = 1.0;
    for (n *= 2; n <= max_panels; n *= 2) {
        const double cur = gauss_panels(f, a, b, n);
        const double scale = std::abs(cur) > 1e-300 ? std::abs(cur) : 1.0;
        achieved = std::abs(cur - prev) / scale;
        prev = cur;
        if (achieved <= rel_tol) return cur;
    }
    throw AccuracyError("quadrature did not converge", achieved);
}

}  // namespace quad
}  // namespace retsim

#endif
