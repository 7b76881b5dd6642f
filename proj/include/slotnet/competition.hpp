#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "slotnet/model.hpp"
#include "slotnet/neuron.hpp"

namespace slotnet {

struct DendriteRef {
    std::size_t neuron = 0;
    std::size_t dendrite = 0;

    friend bool operator==(const DendriteRef&, const DendriteRef&) = default;
};

// Dendrites attached to one presynaptic axonal branch.
struct AxonalBranchGroup {
    std::size_t source = 0;
    std::vector<DendriteRef> members;
};

// Retrograde messengers released by every other firing member depress each
// member's EPSP: p_i -= k_retro * (1 - exp(-k_sat * sigma_i)) * dt with
// sigma_i the summed rate of the members on other neurons. Rates are the
// previous step's, so member order never matters.
std::vector<DendriteState> retrograde_depress(const AxonalBranchGroup& group,
                                              std::span<const double> member_rates,
                                              std::span<const DendriteState> member_states,
                                              double dt, const CompetitionParams& params);

// Scalar kernel used by the network simulator.
double retrograde_loss(double rival_rate_sum, double dt, const CompetitionParams& params);

// Index of the maximal rate when it reaches eps_silent; ties go to the lowest index.
std::optional<std::size_t> winner(std::span<const double> slot_rates, const CompetitionParams& params);

// Same, but ties are broken uniformly at random.
std::optional<std::size_t> winner(std::span<const double> slot_rates, const CompetitionParams& params,
                                  std::mt19937_64& rng);

// True when at most one rate exceeds eps.
bool slot_satisfied(std::span<const double> slot_rates, double eps);

// Neurons that share every input branch, driven by constant input in rate
// mode until the slot settles on one active neuron. Messenger release
// follows each neuron's leaky rate estimate (time constant rate_tau).
struct ContestSetup {
    std::vector<std::vector<double>> strengths;  // [neuron][line] effective strength
    double f_in = 0.5;
    std::size_t max_steps = 500;
    double rel_eps = 0.05;  // slot tolerance relative to the maximal rate
};

struct ContestResult {
    std::optional<std::size_t> winner;
    bool satisfied = false;
    std::size_t steps = 0;
    std::vector<double> rates;
};

ContestResult run_contest(const ContestSetup& setup, const ModelParams& params,
                          const ModulationContext& modulation = {});

}  // namespace slotnet
