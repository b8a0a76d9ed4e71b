#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plkt/rng.hpp"
#include "plkt/special.hpp"

using plkt::Rng;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("lgamma known values") {
    CHECK(std::fabs(plkt::lgamma(1.0)) < 1e-12);
    CHECK(std::fabs(plkt::lgamma(2.0)) < 1e-12);
    // Gamma(1/2) = sqrt(pi)
    CHECK(std::fabs(plkt::lgamma(0.5) - 0.5 * std::log(kPi)) < 1e-12);
}

TEST_CASE("lgamma matches the standard library across the contract range") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(rng.uniform(std::log(1e-3), std::log(1e4)));
        CHECK(std::fabs(plkt::lgamma(x) - std::lgamma(x)) < 1e-10 * std::max(1.0, std::fabs(std::lgamma(x))));
        CHECK(std::fabs(plkt::lgamma(x) - std::lgamma(x)) < 2e-10 + 4e-15 * std::fabs(std::lgamma(x)));
    }
}

TEST_CASE("digamma known values") {
    const double gamma_em = oracle::euler_mascheroni();
    CHECK(std::fabs(gamma_em - 0.5772156649015329) < 1e-12); // oracle self-check
    CHECK(std::fabs(plkt::digamma(1.0) - (-gamma_em)) < 1e-10);
    // psi(2) = psi(1) + 1
    CHECK(std::fabs(plkt::digamma(2.0) - (1.0 - gamma_em)) < 1e-10);
    // psi(1/2) = -gamma - 2 ln 2, cross-checked against d/dx lgamma
    CHECK(std::fabs(plkt::digamma(0.5) - (-gamma_em - 2.0 * std::log(2.0))) < 1e-10);
    const double numeric = oracle::central_diff([](double x) { return plkt::lgamma(x); }, 0.5, 1e-6);
    CHECK(std::fabs(plkt::digamma(0.5) - numeric) < 1e-7);
}

TEST_CASE("trigamma known values") {
    CHECK(std::fabs(plkt::trigamma(1.0) - kPi * kPi / 6.0) < 1e-10);
    CHECK(std::fabs(plkt::trigamma(2.0) - (kPi * kPi / 6.0 - 1.0)) < 1e-10);
    // psi'(1/2) = pi^2/2, cross-checked against d/dx digamma
    CHECK(std::fabs(plkt::trigamma(0.5) - kPi * kPi / 2.0) < 1e-9);
    const double numeric = oracle::central_diff([](double x) { return plkt::digamma(x); }, 0.5, 1e-6);
    CHECK(std::fabs(plkt::trigamma(0.5) - numeric) < 1e-5);
}

TEST_CASE("recurrence identities over random arguments") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::exp(rng.uniform(std::log(0.01), std::log(100.0)));
        CHECK(std::fabs(plkt::lgamma(x + 1.0) - (plkt::lgamma(x) + std::log(x))) < 1e-10);
        CHECK(std::fabs(plkt::digamma(x + 1.0) - (plkt::digamma(x) + 1.0 / x)) < 1e-10);
        const double t = plkt::trigamma(x);
        CHECK(std::fabs(plkt::trigamma(x + 1.0) - (t - 1.0 / (x * x))) < 1e-8 * std::fabs(t) + 1e-12);
    }
}

TEST_CASE("domain errors for nonpositive arguments") {
    CHECK_THROWS_AS(plkt::lgamma(0.0), std::domain_error);
    CHECK_THROWS_AS(plkt::lgamma(-1.5), std::domain_error);
    CHECK_THROWS_AS(plkt::digamma(0.0), std::domain_error);
    CHECK_THROWS_AS(plkt::digamma(-0.1), std::domain_error);
    CHECK_THROWS_AS(plkt::trigamma(0.0), std::domain_error);
    CHECK_THROWS_AS(plkt::trigamma(-2.0), std::domain_error);
}
