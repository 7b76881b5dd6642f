#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "slotnet/competition.hpp"
#include "slotnet/model.hpp"
#include "slotnet/neuron.hpp"
#include "slotnet/synapse.hpp"

namespace slotnet {

enum class Attachment { Exact, Random };

// Shape of a self-organizing network. Layer 0 is the sensory input, split
// into attribute slots; every neuron layer is split into `layer_fields`
// receptive fields, and the neurons sharing a field form one attribute slot
// of that layer. Feedback fibres are modelled as extra input slots.
struct GrowthConfig {
    std::vector<std::size_t> slot_sizes = std::vector<std::size_t>(16, 4);
    std::vector<std::size_t> layer_sizes{64, 16};
    std::vector<std::size_t> layer_fields{4, 1};
    std::size_t d_max = 8;
    double recruit_threshold = 0.3;  // fraction of the maximal rate c1/c0
    std::size_t max_steps = 500;
    std::size_t settle_steps = 5;
    double slot_rel_eps = 0.05;
    Attachment attachment = Attachment::Exact;

    void validate() const;
};

struct NeuronId {
    std::uint32_t layer = 1;  // 1-based; layer 0 holds input lines
    std::uint32_t index = 0;

    friend auto operator<=>(const NeuronId&, const NeuronId&) = default;
};

struct SlotValue {
    std::size_t line = 0;    // active line inside the slot
    double frequency = 0.0;  // 0 leaves the slot silent
};

struct InputPattern {
    std::vector<SlotValue> slots;
    double duration = 30.0;

    // Active line per slot, or nullopt for silent slots.
    std::vector<std::optional<std::size_t>> active_lines() const;
};

// Builds a pattern with every slot active at the same frequency.
InputPattern make_pattern(const std::vector<std::size_t>& lines, double frequency, double duration = 30.0);

enum class NeuronStatus : std::uint8_t { Free, Coding, Dead };

struct Dendrite {
    std::size_t line = 0;  // index into the previous layer's lines
    SynapseState synapse;
};

struct GrowthNeuron {
    std::size_t field = 0;
    NeuronStatus status = NeuronStatus::Free;
    double bias = 0.0;  // supervised facilitation added to the drive
    std::vector<Dendrite> dendrites;
};

struct Network {
    GrowthConfig config;
    ModelParams params;
    std::uint64_t rng_seed = 0;
    std::vector<std::vector<GrowthNeuron>> layers;  // layers[l - 1] is neuron layer l

    std::size_t layer_count() const { return layers.size(); }
    const GrowthNeuron& neuron(NeuronId id) const;
    GrowthNeuron& neuron(NeuronId id);

    std::size_t input_line_count() const;
    // Input slot that holds global input line x, and its offset inside the slot.
    std::pair<std::size_t, std::size_t> input_slot_of(std::size_t line) const;
    std::size_t input_line(std::size_t slot, std::size_t line_in_slot) const;

    // Slots (fields) of layer l; layer 0 means the input slots.
    std::size_t slot_count(std::size_t layer) const;
    // Slot of line x of layer l (input slot for l = 0, field for l >= 1).
    std::size_t slot_of_line(std::size_t layer, std::size_t line) const;
    // Lines of layer l - 1 that field k of layer l may attach to.
    std::vector<std::size_t> field_lines(std::size_t layer, std::size_t field) const;
    // Slots of layer l - 1 covered by field k of layer l.
    std::pair<std::size_t, std::size_t> child_slots(std::size_t layer, std::size_t field) const;

    std::size_t free_pool(std::size_t layer) const;
    std::vector<NeuronId> coding_neurons(std::size_t layer) const;
};

struct EncodeResult {
    std::vector<std::optional<NeuronId>> winners;  // one per top-layer slot
    std::vector<std::vector<double>> firing_map;   // [layer - 1][neuron] rate
    bool converged = false;
    std::size_t steps_used = 0;
};

struct LearnReport {
    EncodeResult encoding;                       // before any change
    std::vector<NeuronId> recruited;
    std::vector<std::optional<NeuronId>> winners;  // learning winner per top-layer slot
    bool capacity_exhausted = false;
};

struct RetrieveResult {
    std::optional<NeuronId> winner;
    InputPattern reconstruction;
    EncodeResult encoding;
};

struct CodingTree {
    std::size_t layer = 0;    // 0 for a sensory line
    std::size_t index = 0;    // neuron index, or global input line for layer 0
    double strength = 0.0;    // effective strength of the synapse into the parent
    std::vector<CodingTree> children;

    std::vector<std::size_t> leaves() const;
    bool contains(std::size_t layer, std::size_t index) const;
};

Network init_network(const GrowthConfig& config, const ModelParams& params, std::uint64_t seed);

EncodeResult present(const Network& net, const InputPattern& pattern,
                     const ModulationContext& modulation = {}, std::size_t max_steps = 0);

LearnReport learn(Network& net, const InputPattern& pattern, const ModulationContext& modulation = {});

RetrieveResult retrieve(const Network& net, const InputPattern& pattern,
                        const ModulationContext& modulation = {});

CodingTree coding_tree(const Network& net, NeuronId root);

void decay_epoch(Network& net, double elapsed);

void supervised_bias(Network& net, const std::vector<NeuronId>& targets, double facilitation);
void clear_bias(Network& net);

// Removes a neuron and all of its synapses for good.
void kill_neuron(Network& net, NeuronId id);

// Every live synapse grouped by presynaptic line, per layer.
std::vector<std::vector<AxonalBranchGroup>> branch_groups(const Network& net);

// Margin of `target` over the strongest rival in its slot, scaled by c1/c0;
// zero when target is not the slot winner.
double retrieval_score(const Network& net, const EncodeResult& encoding, NeuronId target);

}  // namespace slotnet
