#include "faskit/chi_square.hpp"

#include "test_util.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace faskit;

TEST_CASE("chi-square survival function against boost") {
    double worst = 0.0;
    for (int dof = 1; dof <= 60; ++dof) {
        for (double stat = 0.01; stat < 200.0; stat *= 1.07) {
            const double expected = boost::math::gamma_q(0.5 * dof, 0.5 * stat);
            worst = std::max(worst, std::abs(chi_square_sf(stat, dof) - expected));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("incomplete gamma pieces add to one") {
    for (double a : {0.5, 1.0, 2.5, 10.0, 40.0}) {
        for (double x : {0.1, 1.0, a, a + 1.0, 3.0 * a, 100.0}) {
            CHECK(std::abs(gamma_p(a, x) + gamma_q(a, x) - 1.0) < 1e-12);
            CHECK(std::abs(gamma_p(a, x) - boost::math::gamma_p(a, x)) < 1e-10);
        }
    }
}

TEST_CASE("chi-square closed forms") {
    // dof 2: exp(-x/2); dof 1: erfc(sqrt(x/2)).
    for (double x : {0.0, 0.3, 1.0, 5.0, 30.0}) {
        CHECK(std::abs(chi_square_sf(x, 2) - std::exp(-0.5 * x)) < 1e-14);
        CHECK(std::abs(chi_square_sf(x, 1) - std::erfc(std::sqrt(0.5 * x))) < 1e-12);
    }
    CHECK(chi_square_sf(0.0, 3) == 1.0);
    CHECK(chi_square_sf(-1.0, 3) == 1.0);
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-12));
}
