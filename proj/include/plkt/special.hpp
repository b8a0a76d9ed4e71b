#pragma once

namespace plkt {

// Log-gamma, digamma and trigamma for strictly positive arguments.
// All three use upward recurrence to shift the argument to >= 8 and then
// evaluate an asymptotic (Stirling-type) series. Accuracy on [1e-3, 1e4]:
// lgamma/digamma absolute error <= 1e-10, trigamma relative error <= 1e-8.
// Each throws std::domain_error for x <= 0 or non-finite x.

double lgamma(double x);
double digamma(double x);
double trigamma(double x);

} // namespace plkt
