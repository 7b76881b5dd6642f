#pragma once

#include <cstdint>

#include "slotnet/neuron.hpp"
#include "slotnet/synapse.hpp"

namespace slotnet {

struct CompetitionParams {
    double k_retro = 2.0;      // messenger gain
    double k_sat = 1.0;        // messenger saturation
    double eps_silent = 1e-3;  // rates below this count as unfired

    void validate() const;
};

enum class Mode { Event, Rate };

// Every constant of the model in one place.
struct ModelParams {
    NeuronParams neuron;
    SynapseParams synapse;
    CompetitionParams competition;
    double dt = 0.1;
    std::uint64_t seed = 1;
    Mode mode = Mode::Rate;

    void validate() const;
};

}  // namespace slotnet
