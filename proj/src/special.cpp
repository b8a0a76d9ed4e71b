#include "plkt/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace plkt {

namespace {

constexpr double kShiftCutoff = 8.0;
constexpr double kHalfLogTwoPi = 0.91893853320467274178; // 0.5*ln(2*pi)

void check_domain(double x, const char* fn) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error(std::string(fn) + ": argument must be finite and > 0");
    }
}

// Stirling series for ln Gamma(y), y >= 8. Terms are B_{2k}/(2k(2k-1) y^{2k-1}).
double lgamma_asymptotic(double y) {
    const double inv = 1.0 / y;
    const double inv2 = inv * inv;
    // Coefficients 1/12, -1/360, 1/1260, -1/1680, 1/1188, -691/360360, 1/156, -3617/122400
    double series = inv * (1.0 / 12.0
        + inv2 * (-1.0 / 360.0
        + inv2 * (1.0 / 1260.0
        + inv2 * (-1.0 / 1680.0
        + inv2 * (1.0 / 1188.0
        + inv2 * (-691.0 / 360360.0
        + inv2 * (1.0 / 156.0
        + inv2 * (-3617.0 / 122400.0))))))));
    return (y - 0.5) * std::log(y) - y + kHalfLogTwoPi + series;
}

// psi(y) = ln y - 1/(2y) - sum B_{2k}/(2k y^{2k}), y >= 8.
double digamma_asymptotic(double y) {
    const double inv = 1.0 / y;
    const double inv2 = inv * inv;
    double series = inv2 * (1.0 / 12.0
        + inv2 * (-1.0 / 120.0
        + inv2 * (1.0 / 252.0
        + inv2 * (-1.0 / 240.0
        + inv2 * (1.0 / 132.0
        + inv2 * (-691.0 / 32760.0
        + inv2 * (1.0 / 12.0)))))));
    return std::log(y) - 0.5 * inv - series;
}

// psi'(y) = 1/y + 1/(2y^2) + sum B_{2k}/y^{2k+1}, y >= 8.
double trigamma_asymptotic(double y) {
    const double inv = 1.0 / y;
    const double inv2 = inv * inv;
    double series = inv * inv2 * (1.0 / 6.0
        + inv2 * (-1.0 / 30.0
        + inv2 * (1.0 / 42.0
        + inv2 * (-1.0 / 30.0
        + inv2 * (5.0 / 66.0
        + inv2 * (-691.0 / 2730.0
        + inv2 * (7.0 / 6.0)))))));
    return inv + 0.5 * inv2 + series;
}

} // namespace

double lgamma(double x) {
    check_domain(x, "lgamma");
    // ln Gamma(x) = ln Gamma(x + n) - sum_{i=0}^{n-1} ln(x + i)
    double shift = 0.0;
    double y = x;
    while (y < kShiftCutoff) {
        shift += std::log(y);
        y += 1.0;
    }
    return lgamma_asymptotic(y) - shift;
}

double digamma(double x) {
    check_domain(x, "digamma");
    // psi(x) = psi(x + n) - sum_{i=0}^{n-1} 1/(x + i)
    double shift = 0.0;
    double y = x;
    while (y < kShiftCutoff) {
        shift += 1.0 / y;
        y += 1.0;
    }
    return digamma_asymptotic(y) - shift;
}

double trigamma(double x) {
    check_domain(x, "trigamma");
    // psi'(x) = psi'(x + n) + sum_{i=0}^{n-1} 1/(x + i)^2
    double shift = 0.0;
    double y = x;
    while (y < kShiftCutoff) {
        shift += 1.0 / (y * y);
        y += 1.0;
    }
    return trigamma_asymptotic(y) + shift;
}

} // namespace plkt
