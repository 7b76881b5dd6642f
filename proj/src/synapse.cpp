#include "slotnet/synapse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slotnet/neuron.hpp"
#include "slotnet/numerics.hpp"

namespace slotnet {

namespace {

void require_positive(double v, const char* name)
{
    if (!std::isfinite(v) || v <= 0.0) {
        throw ConfigError(std::string("synapse.") + name + " must be positive");
    }
}

void require_unit_open(double v, const char* name)
{
    if (!(v > 0.0 && v < 1.0)) {
        throw ConfigError(std::string("synapse.") + name + " must lie in (0, 1)");
    }
}

SynapseState clamp_ranges(SynapseState s, const SynapseParams& params)
{
    s.w = std::clamp(s.w, 0.0, params.w_max);
    s.r = std::clamp(s.r, 1e-12, kUnitCeiling);
    s.w_d = std::clamp(s.w_d, kDevaluationFloor, 1.0);
    s.r_d = std::clamp(s.r_d, kDevaluationFloor, kUnitCeiling);
    return s;
}

}  // namespace

void SynapseParams::validate() const
{
    require_positive(k_w, "k_w");
    require_positive(w_max, "w_max");
    require_positive(k_r, "k_r");
    require_positive(k_decay, "k_decay");
    require_positive(k_wd, "k_wd");
    require_positive(k_rd, "k_rd");
    require_positive(k_recover, "k_recover");
    require_positive(w_init, "w_init");
    require_positive(w_prune, "w_prune");
    require_unit_open(r_init, "r_init");
    require_unit_open(r_d_init, "r_d_init");
    if (!(w_init > w_prune)) {
        throw ConfigError("synapse.w_init must exceed synapse.w_prune");
    }
    if (!(w_max > w_init)) {
        throw ConfigError("synapse.w_max must exceed synapse.w_init");
    }
}

SynapseState make_synapse(const SynapseParams& params)
{
    return SynapseState{params.w_init, params.r_init, 1.0, params.r_d_init, true};
}

SynapseState ltp_update(SynapseState s, double s_p, double h, double dt, const SynapseParams& params)
{
    if (s_p < 0.0 || h < 0.0) {
        throw NumericDomainError("LTP signal and hormone factor must be non-negative");
    }
    if (!s.alive || s_p == 0.0 || h == 0.0) {
        return s;
    }
    const double drive = s_p * h;
    s.w = euler_step(s.w, params.k_w * drive * (params.w_max - s.w), dt);
    s.r = euler_step(s.r, params.k_r * drive * (1.0 - s.r), dt);
    return clamp_ranges(s, params);
}

SynapseState ltp_integrated(SynapseState s, double exposure, const SynapseParams& params)
{
    if (exposure < 0.0) {
        throw NumericDomainError("LTP exposure must be non-negative");
    }
    if (!s.alive || exposure == 0.0) {
        return s;
    }
    s.w = exp_relax(s.w, params.w_max, params.k_w, exposure);
    s.r = exp_relax(s.r, 1.0, params.k_r, exposure);
    return clamp_ranges(s, params);
}

SynapseState passive_decay(SynapseState s, double dt, const SynapseParams& params)
{
    if (!s.alive) {
        return s;
    }
    s.w = exp_decay(s.w, -params.k_decay * std::log(s.r), dt);
    return clamp_ranges(s, params);
}

SynapseState ltd_update(SynapseState s, double s_d, double dt, const SynapseParams& params)
{
    if (s_d < 0.0) {
        throw NumericDomainError("LTD signal must be non-negative");
    }
    if (!s.alive || s_d == 0.0) {
        return s;
    }
    s.w_d = euler_step(s.w_d, -params.k_wd * s_d * s.w_d, dt);
    s.r_d = euler_step(s.r_d, -params.k_rd * s_d * s.r_d, dt);
    return clamp_ranges(s, params);
}

SynapseState ltd_integrated(SynapseState s, double exposure, const SynapseParams& params)
{
    if (exposure < 0.0) {
        throw NumericDomainError("LTD exposure must be non-negative");
    }
    if (!s.alive || exposure == 0.0) {
        return s;
    }
    s.w_d = exp_decay(s.w_d, params.k_wd, exposure);
    s.r_d = exp_decay(s.r_d, params.k_rd, exposure);
    return clamp_ranges(s, params);
}

SynapseState ltd_recovery(SynapseState s, double dt, const SynapseParams& params)
{
    if (!s.alive) {
        return s;
    }
    const double rate = -params.k_recover * std::log(s.r_d);
    s.w_d = euler_step(s.w_d, rate * (1.0 - s.w_d), dt);
    return clamp_ranges(s, params);
}

SynapseState ltd_recovery_closed(SynapseState s, double elapsed, const SynapseParams& params)
{
    if (!s.alive) {
        return s;
    }
    s.w_d = exp_relax(s.w_d, 1.0, -params.k_recover * std::log(s.r_d), elapsed);
    return clamp_ranges(s, params);
}

double effective_strength(const SynapseState& s)
{
    return s.alive ? s.w * s.w_d : 0.0;
}

SynapseState prune_check(SynapseState s, const SynapseParams& params)
{
    if (s.alive && s.w < params.w_prune) {
        s.alive = false;
    }
    return s;
}

double decay_half_life(double r, const SynapseParams& params)
{
    return std::log(2.0) / (params.k_decay * std::abs(std::log(r)));
}

}  // namespace slotnet
