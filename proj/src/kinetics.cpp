#include "retsim/kinetics.hpp"

#include <cmath>
#include <stdexcept>

namespace retsim {

EffectiveRate effective_rate(const PopulationTrajectory& traj) {
    if (!traj.plateau_converged)
        throw std::runtime_error("effective_rate needs a converged plateau");
    if (!(traj.P_A_inf > 0.0))
        throw std::runtime_error("effective_rate: no transfer (P_A(inf) = 0)");
    const double ratio = traj.P_D_inf / traj.P_A_inf;
    const double target = std::exp(-1.0);
    double prev = traj.P_D.front() - traj.P_A.front() * ratio;
    for (std::size_t i = 1; i < traj.t_grid.size(); ++i) {
        const double cur = traj.P_D[i] - traj.P_A[i] * ratio;
        if (prev > target && cur <= target) {
            const double f = (prev - target) / (prev - cur);
            EffectiveRate out;
            out.tau_RET = traj.t_grid[i - 1] + f * (traj.t_grid[i] - traj.t_grid[i - 1]);
            out.P_A_inf = traj.P_A_inf;
            out.k_eff = traj.P_A_inf / out.tau_RET;
            return out;
        }
        prev = cur;
    }
    throw std::runtime_error("effective_rate: 1/e criterion never crossed");
}

std::pair<double, double> biexp_eigenvalues(const KineticRates& rates) {
    rates.validate();
    const double gD = rates.gamma_D(), gA = rates.gamma_A();
    const double half_sum = 0.5 * (rates.k_F + rates.k_F_r + gD + gA);
    const double asym = 0.5 * (rates.k_F - rates.k_F_r + gD - gA);
    const double disc = std::sqrt(asym * asym + rates.k_F * rates.k_F_r);
    return {-half_sum + disc, -half_sum - disc};
}

std::pair<double, double> biexp_coefficients(const KineticRates& rates) {
    rates.validate();
    if (!(rates.k_F > 0.0))
        throw DegenerateKineticsError("biexp coefficients undefined for k_F = 0");
    const double A = 0.5 * (1.0 - rates.k_F_r / rates.k_F +
                            (rates.gamma_D() - rates.gamma_A()) / rates.k_F);
    const double B = std::sqrt(A * A + rates.k_F_r / rates.k_F);
    return {A, B};
}

std::pair<double, double> biexp_solution(const KineticRates& rates, double D0,
                                         double t_fs) {
    const auto [A, B] = biexp_coefficients(rates);
    if (!(B > 0.0)) throw DegenerateKineticsError("biexp solution degenerate (B = 0)");
    const auto [lp, lm] = biexp_eigenvalues(rates);
    const double ep = std::exp(lp * t_fs), em = std::exp(lm * t_fs);
    const double scale = D0 / (2.0 * B);
    return {scale * ((-A + B) * ep + (A + B) * em), scale * (ep - em)};
}

ReverseSteadyState steady_state_with_reverse(const KineticRates& rates) {
    rates.validate();
    const double gD = rates.gamma_D(), gA = rates.gamma_A();
    if (!(gD > 0.0)) throw std::domain_error("steady state needs a finite donor lifetime");
    ReverseSteadyState out;
    // k_F_r * tau_A, algebraically continued to tau_A = inf (0 * inf -> 0
    // when there is no reverse transfer at all).
    const double tau_A_term = rates.k_F_r == 0.0 ? 0.0 : rates.k_F_r / gA;
    out.D_star = rates.I_r * rates.D_conc /
                 (gD + rates.k_F / (tau_A_term + 1.0));
    out.A_star = rates.k_F * out.D_star / (rates.k_F_r + gA);
    out.efficiency = (rates.k_F / gD) /
                     (rates.k_F / gD + tau_A_term + 1.0);
    return out;
}

DetailedBalance detailed_balance_check(const KineticRates& rates) {
    const auto [A, B] = biexp_coefficients(rates);
    DetailedBalance out;
    // Long-time limit of [D*]/[A*] is set by the slow eigenmode: (B - A)/1.
    out.ratio = B - A;
    out.target = rates.k_F_r / rates.k_F;
    return out;
}

double detailed_balance_check(const PopulationTrajectory& traj) {
    if (!traj.plateau_converged)
        throw std::runtime_error("detailed_balance_check needs a converged plateau");
    if (!(traj.P_A_inf > 0.0))
        throw std::runtime_error("detailed_balance_check: P_A(inf) = 0");
    return traj.P_D_inf / traj.P_A_inf;
}

}  // namespace retsim
