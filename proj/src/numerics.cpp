#include "slotnet/numerics.hpp"

#include <cmath>

namespace slotnet {

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw NumericDomainError(std::string(what) + " must be finite");
    }
}

TimeStep::TimeStep(double step) : dt(step)
{
    require_finite(step, "dt");
    if (step <= 0.0) {
        throw NumericDomainError("dt must be positive");
    }
}

double euler_step(double x, double dxdt, double dt)
{
    require_finite(x, "x");
    require_finite(dxdt, "dxdt");
    require_finite(dt, "dt");
    if (dt <= 0.0) {
        throw NumericDomainError("dt must be positive");
    }
    return x + dxdt * dt;
}

double exp_relax(double x0, double target, double rate, double t)
{
    require_finite(x0, "x0");
    require_finite(target, "target");
    require_finite(rate, "rate");
    if (rate < 0.0) {
        throw NumericDomainError("rate must be non-negative");
    }
    if (!(t >= 0.0)) {
        throw NumericDomainError("elapsed time must be non-negative");
    }
    if (std::isinf(t)) {
        return rate > 0.0 ? target : x0;
    }
    return target + (x0 - target) * std::exp(-rate * t);
}

double exp_decay(double x0, double rate, double t)
{
    return exp_relax(x0, 0.0, rate, t);
}

double log_linear_slope(const double* x, const double* y, std::size_t n)
{
    if (n < 2) {
        throw NumericDomainError("log-linear fit needs at least two points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) {
            throw NumericDomainError("log-linear fit needs positive samples");
        }
        const double ly = std::log(y[i]);
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) {
        throw NumericDomainError("log-linear fit needs distinct abscissae");
    }
    return (dn * sxy - sx * sy) / denom;
}

}  // namespace slotnet
