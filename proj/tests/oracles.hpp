#pragma once

// Independent numerical oracles used by the tests. Nothing here touches the
// library's implementation paths: the KL oracle integrates the defining
// integral, the AUC oracle enumerates pairs, and the derivative oracle uses
// central differences.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// Euler-Mascheroni via Kahan-summed harmonic series with Euler-Maclaurin
// tail: H_n - ln n - 1/(2n) + 1/(12n^2) - 1/(120n^4).
inline double euler_mascheroni() {
    const int n = 1000000;
    double sum = 0.0, comp = 0.0;
    for (int k = 1; k <= n; ++k) {
        double y = 1.0 / k - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double nn = static_cast<double>(n);
    return sum - std::log(nn) - 0.5 / nn + 1.0 / (12.0 * nn * nn) -
           1.0 / (120.0 * nn * nn * nn * nn);
}

// Central difference df/dx.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double eps,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 48);
}

} // namespace detail

// KL(Beta(a1,b1) || Beta(a2,b2)) by integrating p(x) * ln(p(x)/q(x)) over
// (0,1). Endpoint singularities for shape parameters < 1 are softened by the
// power substitutions x = u^c (left half) and 1-x = u^c (right half).
inline double beta_kl_quadrature(double a1, double b1, double a2, double b2,
                                 double eps = 1e-10) {
    if (a1 <= 0 || b1 <= 0 || a2 <= 0 || b2 <= 0) {
        throw std::domain_error("beta_kl_quadrature: parameters must be positive");
    }
    const double lb1 = std::lgamma(a1) + std::lgamma(b1) - std::lgamma(a1 + b1);
    const double lb2 = std::lgamma(a2) + std::lgamma(b2) - std::lgamma(a2 + b2);
    // p(x) ln(p/q) = exp(-lb1) x^{a1-1} (1-x)^{b1-1} *
    //               [lb2 - lb1 + (a1-a2) ln x + (b1-b2) ln(1-x)]
    auto integrand = [&](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        const double lx = std::log(x), l1x = std::log1p(-x);
        const double logp = -lb1 + (a1 - 1.0) * lx + (b1 - 1.0) * l1x;
        const double ratio = (lb2 - lb1) + (a1 - a2) * lx + (b1 - b2) * l1x;
        return std::exp(logp) * ratio;
    };

    const double cl = std::max(1.0, 2.0 / a1); // left exponent so u^{c*a1 - 1} stays bounded
    const double cr = std::max(1.0, 2.0 / b1);
    const double split = 0.5;
    // left: x = u^cl, dx = cl u^{cl-1} du, u in (0, split^{1/cl})
    auto left = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = std::pow(u, cl);
        return integrand(x) * cl * std::pow(u, cl - 1.0);
    };
    // right: 1-x = u^cr
    auto right = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = 1.0 - std::pow(u, cr);
        return integrand(x) * cr * std::pow(u, cr - 1.0);
    };
    const double ul = std::pow(split, 1.0 / cl);
    const double ur = std::pow(1.0 - split, 1.0 / cr);
    return detail::integrate(left, 0.0, ul, eps) + detail::integrate(right, 0.0, ur, eps);
}

// AUC by brute-force enumeration of positive-negative pairs; ties count 1/2.
// Returns NaN when only one class is present.
inline double auc_pair_counting(const std::vector<double>& preds,
                                const std::vector<int>& labels) {
    double concordant = 0.0;
    long long pairs = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < preds.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (preds[i] > preds[j]) concordant += 1.0;
            else if (preds[i] == preds[j]) concordant += 0.5;
        }
    }
    if (pairs == 0) return std::nan("");
    return concordant / static_cast<double>(pairs);
}

} // namespace oracle
