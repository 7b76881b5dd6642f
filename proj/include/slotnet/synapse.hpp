#pragma once

namespace slotnet {

struct SynapseParams {
    double k_w = 1.0;        // LTP strength gain
    double w_max = 1.0;      // strength ceiling
    double k_r = 0.5;        // persistence gain
    double k_decay = 0.001;  // passive decay coefficient, dw/dt = k_decay * w * ln(r)
    double k_wd = 0.1;       // devaluation gain
    double k_rd = 0.5;       // devaluation-persistence gain
    double k_recover = 1.0;  // devaluation recovery coefficient
    double w_init = 0.1;
    double w_prune = 0.01;
    double r_init = 0.5;
    double r_d_init = 0.5;

    void validate() const;
};

struct SynapseState {
    double w = 0.1;
    double r = 0.5;
    double w_d = 1.0;
    double r_d = 0.5;
    bool alive = true;
};

inline constexpr double kDevaluationFloor = 1e-6;
// Upper bound kept on the open unit-interval variables r and r_d.
inline constexpr double kUnitCeiling = 1.0 - 1e-12;

SynapseState make_synapse(const SynapseParams& params);

SynapseState ltp_update(SynapseState s, double s_p, double h, double dt, const SynapseParams& params);

// Exact solution of the LTP laws for a time-varying signal, given
// exposure = integral of s_p * h dt.
SynapseState ltp_integrated(SynapseState s, double exposure, const SynapseParams& params);

// Exact per-step solution of dw/dt = k_decay * w * ln(r).
SynapseState passive_decay(SynapseState s, double dt, const SynapseParams& params);

SynapseState ltd_update(SynapseState s, double s_d, double dt, const SynapseParams& params);

// Exact solution of the LTD laws for exposure = integral of s_d dt.
SynapseState ltd_integrated(SynapseState s, double exposure, const SynapseParams& params);

SynapseState ltd_recovery(SynapseState s, double dt, const SynapseParams& params);

// Closed-form recovery over an arbitrary interval (used by long decay epochs).
SynapseState ltd_recovery_closed(SynapseState s, double elapsed, const SynapseParams& params);

double effective_strength(const SynapseState& s);

SynapseState prune_check(SynapseState s, const SynapseParams& params);

// Passive half-life of strength at persistence r.
double decay_half_life(double r, const SynapseParams& params);

}  // namespace slotnet
