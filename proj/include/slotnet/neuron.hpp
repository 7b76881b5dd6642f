#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace slotnet {

// Thrown when a plasticity signal is requested in the wrong firing state.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Constants of the neuron model. Names carry the role because the model
// reuses the symbols c_0..c_8 in every law.
struct NeuronParams {
    double c0 = 1.0;       // firing threshold on accumulated charge
    double c1 = 1.0;       // maximal charge rate
    double c2 = 1.0;       // drive sensitivity of the charge rate
    double c3_epsp = 1.0;  // EPSP growth per unit strength and frequency
    double c4_epsp = 0.1;  // EPSP decay rate
    double c5 = 1.0;       // LTP gain, s_p = c5 * p * f
    double c6_chan = 5.0;  // channel recovery rate
    double c7 = 1.0;       // channel ceiling
    double c8 = 1.0;       // LTD gain, s_d = c8 * p * (c7 - a)

    double k_fatigue = 0.1;        // partial fatigue per unit EPSP
    double refractory_period = 1.0;
    double rate_tau = 5.0;         // time constant of the firing-rate estimate

    void validate() const;
};

struct DendriteState {
    double p = 0.0;  // EPSP trace
    double a = 1.0;  // channel activation in [0, c7]
    std::size_t synapse_id = 0;
};

struct NeuronState {
    double q = 0.0;
    double f = 0.0;
    bool fired = false;
    double refractory = 0.0;
    std::vector<DendriteState> dendrites;
};

// Neuromodulator m scales drive; hormone h scales learning rate.
struct ModulationContext {
    double m = 1.0;
    double h = 1.0;

    void validate() const;
};

struct FiringEvent {
    double charge_at_fire = 0.0;
};

// sigma = m * sum_i p_i * a_i
double drive(const NeuronState& neuron, const ModulationContext& modulation);

// Accumulates charge at c1 * (1 - exp(-c2 * sigma)); refractory neurons only
// count their timer down.
NeuronState charge_step(NeuronState neuron, double sigma, double dt, const NeuronParams& params);

std::pair<NeuronState, std::optional<FiringEvent>> fire_check(NeuronState neuron,
                                                             const NeuronParams& params);

// Leaky estimate of the firing frequency; fire_check adds 1/rate_tau per event.
NeuronState decay_rate_estimate(NeuronState neuron, double dt, const NeuronParams& params);

DendriteState epsp_step(DendriteState d, double w_eff, double f_in, double dt,
                        const NeuronParams& params);

// EPSP after time t under constant presynaptic frequency, starting from 0.
double epsp_closed_form(double w_eff, double f_in, double t, const NeuronParams& params);

DendriteState channel_step(DendriteState d, bool subthreshold_epsp, double dt,
                           const NeuronParams& params);

// Rate-mode form: f_post must be positive (a silent neuron has no LTP signal).
double ltp_signal(const DendriteState& d, double f_post, const NeuronParams& params);
// Event-mode form: the neuron must have fired this step; uses its rate estimate.
double ltp_signal(const NeuronState& post, std::size_t dendrite, const NeuronParams& params);

double ltd_signal(const DendriteState& d, const NeuronParams& params);
double ltd_signal(const NeuronState& post, std::size_t dendrite, const NeuronParams& params);

// Time-to-threshold inverted: c1 * (1 - exp(-c2 sigma)) / c0.
double rate_transfer(double sigma, const NeuronParams& params);

double object_probability(double sigma, double c_prob);

}  // namespace slotnet
