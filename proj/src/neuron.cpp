#include "slotnet/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slotnet/numerics.hpp"

namespace slotnet {

namespace {

void require_positive(double v, const char* name)
{
    if (!std::isfinite(v) || v <= 0.0) {
        throw ConfigError(std::string("neuron.") + name + " must be positive");
    }
}

}  // namespace

void NeuronParams::validate() const
{
    require_positive(c0, "c0");
    require_positive(c1, "c1");
    require_positive(c2, "c2");
    require_positive(c3_epsp, "c3_epsp");
    require_positive(c4_epsp, "c4_epsp");
    require_positive(c5, "c5");
    require_positive(c6_chan, "c6_chan");
    require_positive(c7, "c7");
    require_positive(c8, "c8");
    require_positive(k_fatigue, "k_fatigue");
    require_positive(refractory_period, "refractory_period");
    require_positive(rate_tau, "rate_tau");
    if (c3_epsp / c4_epsp < 10.0) {
        throw ConfigError("neuron.c3_epsp / neuron.c4_epsp must be at least 10");
    }
    if (c6_chan < 10.0 * c4_epsp) {
        throw ConfigError("neuron.c6_chan must be at least 10 * neuron.c4_epsp");
    }
}

void ModulationContext::validate() const
{
    if (!(m >= 0.0) || !(h >= 0.0) || !std::isfinite(m) || !std::isfinite(h)) {
        throw ConfigError("modulation factors m and h must be finite and non-negative");
    }
}

double drive(const NeuronState& neuron, const ModulationContext& modulation)
{
    double sum = 0.0;
    for (const auto& d : neuron.dendrites) {
        sum += d.p * d.a;
    }
    return modulation.m * sum;
}

NeuronState charge_step(NeuronState neuron, double sigma, double dt, const NeuronParams& params)
{
    require_finite(sigma, "sigma");
    if (sigma < 0.0) {
        throw NumericDomainError("drive sigma must be non-negative");
    }
    if (neuron.refractory > 0.0) {
        neuron.refractory = std::max(0.0, neuron.refractory - dt);
        return neuron;
    }
    const double dq = params.c1 * (1.0 - std::exp(-params.c2 * sigma));
    neuron.q = std::max(0.0, euler_step(neuron.q, dq, dt));
    return neuron;
}

std::pair<NeuronState, std::optional<FiringEvent>> fire_check(NeuronState neuron,
                                                             const NeuronParams& params)
{
    if (!(neuron.q > params.c0)) {
        neuron.fired = false;
        return {std::move(neuron), std::nullopt};
    }
    FiringEvent event{neuron.q};
    neuron.fired = true;
    neuron.q = 0.0;
    for (auto& d : neuron.dendrites) {
        d.a = 0.0;
    }
    neuron.refractory = params.refractory_period;
    neuron.f += 1.0 / params.rate_tau;
    return {std::move(neuron), event};
}

NeuronState decay_rate_estimate(NeuronState neuron, double dt, const NeuronParams& params)
{
    neuron.f = exp_decay(neuron.f, 1.0 / params.rate_tau, dt);
    return neuron;
}

DendriteState epsp_step(DendriteState d, double w_eff, double f_in, double dt,
                        const NeuronParams& params)
{
    if (w_eff < 0.0 || f_in < 0.0) {
        throw NumericDomainError("effective strength and input frequency must be non-negative");
    }
    const double dpdt = params.c3_epsp * w_eff * f_in - params.c4_epsp * d.p;
    d.p = std::max(0.0, euler_step(d.p, dpdt, dt));
    return d;
}

double epsp_closed_form(double w_eff, double f_in, double t, const NeuronParams& params)
{
    const double plateau = params.c3_epsp * w_eff * f_in / params.c4_epsp;
    return exp_relax(0.0, plateau, params.c4_epsp, t);
}

DendriteState channel_step(DendriteState d, bool subthreshold_epsp, double dt,
                           const NeuronParams& params)
{
    double dadt = params.c6_chan * (params.c7 - d.a);
    if (subthreshold_epsp) {
        dadt -= params.k_fatigue * d.p;
    }
    d.a = std::clamp(euler_step(d.a, dadt, dt), 0.0, params.c7);
    return d;
}

double ltp_signal(const DendriteState& d, double f_post, const NeuronParams& params)
{
    if (!(f_post > 0.0)) {
        throw ContractViolation("LTP signal requested for a neuron that is not firing");
    }
    return params.c5 * d.p * f_post;
}

double ltp_signal(const NeuronState& post, std::size_t dendrite, const NeuronParams& params)
{
    if (!post.fired) {
        throw ContractViolation("LTP signal requested for a neuron that did not fire");
    }
    return params.c5 * post.dendrites.at(dendrite).p * post.f;
}

double ltd_signal(const DendriteState& d, const NeuronParams& params)
{
    return params.c8 * d.p * std::max(0.0, params.c7 - d.a);
}

double ltd_signal(const NeuronState& post, std::size_t dendrite, const NeuronParams& params)
{
    if (post.fired) {
        throw ContractViolation("LTD signal requested for a neuron that fired");
    }
    return ltd_signal(post.dendrites.at(dendrite), params);
}

double rate_transfer(double sigma, const NeuronParams& params)
{
    if (sigma < 0.0) {
        throw NumericDomainError("drive sigma must be non-negative");
    }
    return params.c1 * (1.0 - std::exp(-params.c2 * sigma)) / params.c0;
}

double object_probability(double sigma, double c_prob)
{
    if (sigma < 0.0 || !(c_prob > 0.0)) {
        throw NumericDomainError("object probability needs sigma >= 0 and c_prob > 0");
    }
    return 1.0 - std::exp(-c_prob * sigma);
}

}  // namespace slotnet
