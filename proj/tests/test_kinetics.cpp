#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "retsim/kinetics.hpp"

using namespace retsim;

namespace {

// Independent fixed-step classical RK4 oracle for the two-state rate system,
// deliberately not sharing code with the library's adaptive integrator.
std::pair<double, double> rk4_solution(const KineticRates& r, double D0, double T,
                                       int steps) {
    const double gD = r.gamma_D(), gA = r.gamma_A();
    auto deriv = [&](double D, double A, double& dD, double& dA) {
        dD = -(r.k_F + gD) * D + r.k_F_r * A;
        dA = r.k_F * D - (r.k_F_r + gA) * A;
    };
    double D = D0, A = 0.0;
    const double h = T / steps;
    for (int i = 0; i < steps; ++i) {
        double k1D, k1A, k2D, k2A, k3D, k3A, k4D, k4A;
        deriv(D, A, k1D, k1A);
        deriv(D + 0.5 * h * k1D, A + 0.5 * h * k1A, k2D, k2A);
        deriv(D + 0.5 * h * k2D, A + 0.5 * h * k2A, k3D, k3A);
        deriv(D + h * k3D, A + h * k3A, k4D, k4A);
        D += h / 6.0 * (k1D + 2.0 * k2D + 2.0 * k3D + k4D);
        A += h / 6.0 * (k1A + 2.0 * k2A + 2.0 * k3A + k4A);
    }
    return {D, A};
}

}  // namespace

TEST_CASE("bi-exponential solution matches an independent ODE oracle") {
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> logk(-5.0, -2.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        KineticRates r;
        r.k_F = std::pow(10.0, logk(rng));
        r.k_F_r = frac(rng) * r.k_F;
        // keep decay comparable to transfer so the fixed-step oracle resolves
        // every mode of the system within its own error budget
        r.tau_D = frac(rng) < 0.25 ? kInfiniteLifetime : 1.0 / (frac(rng) * r.k_F + 1e-12);
        r.tau_A = frac(rng) < 0.25 ? kInfiniteLifetime : 1.0 / (frac(rng) * r.k_F + 1e-12);
        r.validate();
        const double T = 20.0 / (r.k_F + r.k_F_r);
        double worst = 0.0;
        for (double f : {0.1, 0.3, 0.5, 0.8, 1.0}) {
            const auto exact = biexp_solution(r, 1.0, f * T);
            const auto oracle = rk4_solution(r, 1.0, f * T, 200000);
            worst = std::max(worst, std::abs(exact.first - oracle.first));
            worst = std::max(worst, std::abs(exact.second - oracle.second));
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("closed-form eigenvalues match the 2x2 characteristic polynomial") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> u(1e-5, 1e-2);
    for (int trial = 0; trial < 50; ++trial) {
        KineticRates r;
        r.k_F = u(rng);
        r.k_F_r = u(rng);
        r.tau_D = 1.0 / u(rng);
        r.tau_A = 1.0 / u(rng);
        const auto [lp, lm] = biexp_eigenvalues(r);
        // rate matrix [[-kF-gD, kFr], [kF, -kFr-gA]]
        const double a = -r.k_F - r.gamma_D(), b = r.k_F_r;
        const double c = r.k_F, d = -r.k_F_r - r.gamma_A();
        const double tr = a + d, det = a * d - b * c;
        const double disc = std::sqrt(tr * tr / 4.0 - det);
        CHECK(lp == doctest::Approx(tr / 2.0 + disc).epsilon(1e-12));
        CHECK(lm == doctest::Approx(tr / 2.0 - disc).epsilon(1e-12));
        CHECK(lp >= lm);
        const auto [A, B] = biexp_coefficients(r);
        CHECK(B >= std::abs(A));
    }
}

TEST_CASE("irreversible no-decay limit is a single exponential") {
    KineticRates r;
    r.k_F = 3e-4;
    const auto [lp, lm] = biexp_eigenvalues(r);
    CHECK(lp == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(lm == doctest::Approx(-r.k_F).epsilon(1e-12));
    for (double t : {0.0, 1000.0, 5000.0, 20000.0}) {
        const auto [D, A] = biexp_solution(r, 2.0, t);
        CHECK(D == doctest::Approx(2.0 * std::exp(-r.k_F * t)).epsilon(1e-12));
        CHECK(A == doctest::Approx(2.0 * (1.0 - std::exp(-r.k_F * t))).epsilon(1e-12));
    }
}

TEST_CASE("initial acceptor growth rate equals the forward rate") {
    KineticRates r;
    r.k_F = 2e-4;
    r.k_F_r = 5e-5;
    r.tau_D = 3e5;
    r.tau_A = 8e5;
    const double h = 1e-3;
    const auto [D1, A1] = biexp_solution(r, 1.0, h);
    CHECK(A1 / h == doctest::Approx(r.k_F).epsilon(1e-6));
    CHECK(D1 <= 1.0);
}

TEST_CASE("long-time ratio obeys detailed balance without decay") {
    std::mt19937 rng(99u);
    std::uniform_real_distribution<double> u(1e-5, 1e-2);
    for (int trial = 0; trial < 20; ++trial) {
        KineticRates r;
        r.k_F = u(rng);
        r.k_F_r = u(rng);
        const auto db = detailed_balance_check(r);
        CHECK(db.ratio == doctest::Approx(db.target).epsilon(1e-10));
    }
}

TEST_CASE("degenerate closed forms are rejected") {
    KineticRates r;  // k_F = 0
    CHECK_THROWS_AS(biexp_coefficients(r), DegenerateKineticsError);
    KineticRates bad;
    bad.k_F = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("steady state with reverse transfer handles the no-reverse limit") {
    KineticRates r;
    r.k_F = 1e-4;
    r.tau_D = 1e5;
    r.tau_A = kInfiniteLifetime;
    r.I_r = 1e-8;
    const auto ss = steady_state_with_reverse(r);
    CHECK(std::isfinite(ss.D_star));
    CHECK(std::isfinite(ss.efficiency));
    CHECK(ss.efficiency == doctest::Approx(r.k_F / (r.k_F + 1.0 / r.tau_D)).epsilon(1e-12));
}

TEST_CASE("effective rate recovers the rate constant of an exponential decay") {
    const double k = 4e-4, dt = 0.25;
    PopulationTrajectory traj;
    for (double t = 0.0; t <= 30000.0; t += dt) {
        traj.t_grid.push_back(t);
        traj.P_D.push_back(std::exp(-k * t));
        traj.P_A.push_back(1.0 - std::exp(-k * t));
    }
    traj.P_D_inf = 0.0;
    traj.P_A_inf = 1.0;
    traj.plateau_converged = true;
    const auto eff = effective_rate(traj);
    CHECK(eff.k_eff == doctest::Approx(k).epsilon(5e-3));
    CHECK(eff.tau_RET == doctest::Approx(1.0 / k).epsilon(5e-3));
    CHECK(eff.P_A_inf == 1.0);
}
