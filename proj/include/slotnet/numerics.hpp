#pragma once

#include <stdexcept>
#include <string>

namespace slotnet {

// Raised for NaN/inf inputs, non-positive steps and negative elapsed times.
class NumericDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Fixed-step clock shared by every dynamical module. All rates in the
// library are per abstract time unit.
struct TimeStep {
    double dt = 0.1;
    double t = 0.0;

    explicit TimeStep(double step = 0.1);

    void advance() { t += dt; }
};

// Explicit Euler: x + dxdt * dt.
double euler_step(double x, double dxdt, double dt);

// Closed form of dx/dt = rate * (target - x) after time t.
double exp_relax(double x0, double target, double rate, double t);

// Closed form of dx/dt = -rate * x after time t.
double exp_decay(double x0, double rate, double t);

// Least-squares slope of ln(y) against x. Every y must be positive.
double log_linear_slope(const double* x, const double* y, std::size_t n);

void require_finite(double value, const char* what);

}  // namespace slotnet
