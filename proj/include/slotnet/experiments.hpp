#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slotnet/growth.hpp"
#include "slotnet/model.hpp"

namespace slotnet {

// Tabular output of a protocol plus the settings needed to regenerate it.
struct ProtocolResult {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::pair<std::string, double>> summary;  // derived scalars (fits, crossovers)

    std::optional<double> summary_value(const std::string& key) const;
};

// Stimulus strength and learning gain used by the network protocols.
struct GrowthScenario {
    double input_rate = 0.7;  // frequency of an active input line
    double m = 0.05;          // neuromodulator during presentation
    double h = 2.0;           // hormone during learning
    double duration = 30.0;   // presentation time

    ModulationContext modulation() const { return {m, h}; }
    void validate() const;
};

struct StdpOptions {
    // Positive entries are pre-before-post, negative post-before-pre. Empty
    // means +k/c4_epsp and -k/c6_chan for k = 1..10.
    std::vector<double> delta_ts;
    double w_eff = 0.1;
    double dt_scale = 0.01;  // step = dt_scale / max(c4_epsp, c6_chan)
};

ProtocolResult stdp_protocol(const StdpOptions& options, const ModelParams& params);
std::vector<double> default_stdp_delta_ts(const NeuronParams& params);

struct HebbOptions {
    double f_pre = 1.0;
    double f_post = 1.0;
    double duration = 60.0;
    double w_eff = 0.1;
};

ProtocolResult hebb_protocol(const HebbOptions& options, const ModelParams& params);

struct FrequencyOptions {
    std::vector<double> freqs{0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
    double duration = 20.0;
    double w_eff = 0.1;
    double step = 0.01;
    std::size_t bisection_steps = 30;
};

ProtocolResult frequency_protocol(const FrequencyOptions& options, const ModelParams& params);

struct ForgettingOptions {
    std::vector<std::size_t> rehearsals{0, 1, 5, 20};
    double horizon = 5000.0;
    std::size_t samples = 50;
    double pulse_exposure = 0.5;  // integral of s_p * h per rehearsal
    double spacing = 10.0;        // idle time between rehearsals
    double recall_exposure = 0.0; // consolidation caused by each test, 0 disables
};

ProtocolResult forgetting_protocol(const ForgettingOptions& options, const ModelParams& params);

enum class LearnOrder { AThenB, BThenA };

struct InterferenceOptions {
    std::vector<double> overlaps{0.0, 0.25, 0.5, 0.75};
    LearnOrder order = LearnOrder::AThenB;
    std::size_t epochs_first = 5;   // rehearsals of the pattern learned first
    std::size_t epochs_second = 1;
    std::size_t slots = 8;
    std::size_t lines_per_slot = 4;
    std::size_t neurons = 16;
    GrowthScenario scenario{0.7, 0.025, 1.0, 30.0};
};

ProtocolResult interference_protocol(const InterferenceOptions& options, const ModelParams& params);

struct SavingsOptions {
    std::vector<std::size_t> consolidations{0};  // rehearsals after reaching criterion
    double criterion_rate = 0.5;     // winner rate that counts as recall
    std::size_t max_epochs = 50;
    double decay_chunk = 100.0;      // decay applied between recall checks
    std::size_t max_decay_chunks = 10000;
    std::optional<double> fixed_decay;  // decay this long instead of until failure
    std::size_t slots = 8;
    std::size_t lines_per_slot = 4;
    std::size_t neurons = 16;
    GrowthScenario scenario{0.7, 0.025, 0.3, 30.0};
};

ProtocolResult savings_protocol(const SavingsOptions& options, const ModelParams& params);

// Pattern sets with at most one shared slot value per receptive field
// between any two patterns (needs slot sizes that are 4 or prime powers <= 4).
std::vector<std::vector<std::size_t>> distinct_patterns(const GrowthConfig& config, std::size_t count,
                                                        std::uint64_t seed);

struct GrowOptions {
    std::size_t patterns = 10;
    std::size_t epochs = 1;
    GrowthScenario scenario;
};

// Learns a seeded pattern set and reports retrieval per pattern.
ProtocolResult grow_protocol(Network& net, const GrowOptions& options);

// Index of the coding neuron whose tree reproduces `lines` exactly, if any.
std::optional<NeuronId> coding_neuron_for(const Network& net, const std::vector<std::size_t>& lines);

}  // namespace slotnet
