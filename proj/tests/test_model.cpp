#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "retsim/constants.hpp"
#include "retsim/model.hpp"

using namespace retsim;

TEST_CASE("coupling scales as the inverse cube of distance") {
    CHECK(coupling_at_distance(5.0, 1.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(coupling_at_distance(5.0, 0.5) == doctest::Approx(40.0).epsilon(1e-14));
    CHECK(coupling_at_distance(5.0, 2.0) == doctest::Approx(0.625).epsilon(1e-14));

    DimerSpec dimer{12000.0, 11200.0, 5.0, 0.2};
    CHECK(dimer.coupling() == doctest::Approx(5.0 / std::pow(0.2, 3)).epsilon(1e-14));
    CHECK(dimer.coupling() == coupling_at_distance(dimer.J0, dimer.R_over_R0));
}

TEST_CASE("dimer validation rejects non-positive distance") {
    DimerSpec dimer{1.0, 0.0, 1.0, 0.0};
    CHECK_THROWS_AS(dimer.validate(), std::domain_error);
    dimer.R_over_R0 = -1.0;
    CHECK_THROWS_AS(dimer.validate(), std::domain_error);
    dimer.R_over_R0 = 0.3;
    CHECK_NOTHROW(dimer.validate());
}

TEST_CASE("spectral density: cubic super-Ohmic form with exponential cutoff") {
    const double eta = 2.0, wc = 1000.0;
    // closed form at E = wc
    const double expected = M_PI * (eta / 6.0) * wc * std::exp(-1.0);
    CHECK(spectral_density(wc, eta, wc) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(spectral_density(0.0, eta, wc) == 0.0);

    // maximum sits at E = 3 wc
    const double peak = spectral_density(3.0 * wc, eta, wc);
    CHECK(peak > spectral_density(2.9 * wc, eta, wc));
    CHECK(peak > spectral_density(3.1 * wc, eta, wc));

    // linear in eta
    CHECK(spectral_density(700.0, 2.0 * eta, wc) ==
          doctest::Approx(2.0 * spectral_density(700.0, eta, wc)).epsilon(1e-14));

    // BathSpec overload agrees
    BathSpec bath{eta, wc, 300.0};
    CHECK(spectral_density(1234.5, bath) == spectral_density(1234.5, eta, wc));
}

TEST_CASE("reorganization energy equals eta*omega_c/3") {
    CHECK(reorganization_energy(2.0, 1000.0) ==
          doctest::Approx(2000.0 / 3.0).epsilon(1e-14));
    CHECK(reorganization_energy(5.0, 400.0) ==
          doctest::Approx(2000.0 / 3.0).epsilon(1e-14));
    BathSpec bath{5.0, 400.0, 300.0};
    CHECK(reorganization_energy(bath) == reorganization_energy(5.0, 400.0));
}

TEST_CASE("bath validation") {
    CHECK_THROWS_AS((BathSpec{-1.0, 1000.0, 300.0}).validate(), std::domain_error);
    CHECK_THROWS_AS((BathSpec{2.0, 0.0, 300.0}).validate(), std::domain_error);
    CHECK_THROWS_AS((BathSpec{2.0, 1000.0, 0.0}).validate(), std::domain_error);
    CHECK_NOTHROW((BathSpec{0.0, 1000.0, 300.0}).validate());
}

TEST_CASE("orientation factor limits") {
    DipoleGeometry geom;
    // collinear head-to-tail dipoles: kappa = -2
    geom.theta_D = 0.0;
    geom.theta_A = 0.0;
    CHECK(orientation_factor(geom) == doctest::Approx(-2.0).epsilon(1e-14));
    // parallel dipoles perpendicular to the separation axis: kappa = 1
    geom.theta_D = M_PI / 2.0;
    geom.theta_A = M_PI / 2.0;
    geom.phi_D = 0.3;
    geom.phi_A = 0.3;
    CHECK(orientation_factor(geom) == doctest::Approx(1.0).epsilon(1e-14));
    // crossed perpendicular dipoles: kappa = 0
    geom.phi_A = 0.3 + M_PI / 2.0;
    CHECK(orientation_factor(geom) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unit-system identity: 2 pi c hbar = 1 in cm^-1 fs units") {
    CHECK(2.0 * M_PI * constants::c_cm_per_fs * constants::hbar ==
          doctest::Approx(1.0).epsilon(1e-12));
}
