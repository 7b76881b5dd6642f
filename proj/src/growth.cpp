#include "slotnet/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slotnet/numerics.hpp"
#include "slotnet/rng.hpp"

namespace slotnet {

namespace {

std::vector<Dendrite> random_dendrites(std::vector<std::size_t> lines, std::size_t count,
                                       SplitMix64& rng, const SynapseParams& sp)
{
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(lines[i], lines[i + rng.below(lines.size() - i)]);
    }
    lines.resize(count);
    std::sort(lines.begin(), lines.end());
    std::vector<Dendrite> out;
    out.reserve(count);
    for (std::size_t line : lines) {
        out.push_back(Dendrite{line, make_synapse(sp)});
    }
    return out;
}

double max_rate(const NeuronParams& np)
{
    return np.c1 / np.c0;
}

}  // namespace

void GrowthConfig::validate() const
{
    if (slot_sizes.empty()) {
        throw ConfigError("growth.slot_sizes must not be empty");
    }
    for (std::size_t s : slot_sizes) {
        if (s == 0) throw ConfigError("growth.slot_sizes entries must be positive");
    }
    if (layer_sizes.empty() || layer_sizes.size() != layer_fields.size()) {
        throw ConfigError("growth.layer_sizes and growth.layer_fields must be non-empty and of equal length");
    }
    if (d_max == 0) {
        throw ConfigError("growth.d_max must be positive");
    }
    std::size_t below = slot_sizes.size();
    for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
        const std::size_t fields = layer_fields[l];
        if (fields == 0 || layer_sizes[l] < fields) {
            throw ConfigError("every field of layer " + std::to_string(l + 1) + " needs at least one neuron");
        }
        if (below % fields != 0) {
            throw ConfigError("layer " + std::to_string(l + 1) + " fields must evenly divide the slots below");
        }
        if (below / fields > d_max) {
            throw ConfigError("growth.d_max is smaller than the slots covered by one field of layer " +
                              std::to_string(l + 1));
        }
        below = fields;
    }
    if (!(recruit_threshold > 0.0 && recruit_threshold < 1.0)) {
        throw ConfigError("growth.recruit_threshold must lie in (0, 1)");
    }
    if (max_steps == 0 || settle_steps == 0) {
        throw ConfigError("growth.max_steps and growth.settle_steps must be positive");
    }
    if (!(slot_rel_eps > 0.0 && slot_rel_eps < 1.0)) {
        throw ConfigError("growth.slot_rel_eps must lie in (0, 1)");
    }
}

std::vector<std::optional<std::size_t>> InputPattern::active_lines() const
{
    std::vector<std::optional<std::size_t>> out;
    out.reserve(slots.size());
    for (const auto& s : slots) {
        out.push_back(s.frequency > 0.0 ? std::optional<std::size_t>(s.line) : std::nullopt);
    }
    return out;
}

InputPattern make_pattern(const std::vector<std::size_t>& lines, double frequency, double duration)
{
    InputPattern p;
    p.duration = duration;
    for (std::size_t line : lines) {
        p.slots.push_back(SlotValue{line, frequency});
    }
    return p;
}

const GrowthNeuron& Network::neuron(NeuronId id) const
{
    if (id.layer == 0 || id.layer > layers.size() || id.index >= layers[id.layer - 1].size()) {
        throw std::out_of_range("no neuron at layer " + std::to_string(id.layer) + " index " +
                                std::to_string(id.index));
    }
    return layers[id.layer - 1][id.index];
}

GrowthNeuron& Network::neuron(NeuronId id)
{
    return const_cast<GrowthNeuron&>(std::as_const(*this).neuron(id));
}

std::size_t Network::input_line_count() const
{
    return std::accumulate(config.slot_sizes.begin(), config.slot_sizes.end(), std::size_t{0});
}

std::pair<std::size_t, std::size_t> Network::input_slot_of(std::size_t line) const
{
    std::size_t offset = 0;
    for (std::size_t s = 0; s < config.slot_sizes.size(); ++s) {
        if (line < offset + config.slot_sizes[s]) {
            return {s, line - offset};
        }
        offset += config.slot_sizes[s];
    }
    throw std::out_of_range("input line " + std::to_string(line) + " does not exist");
}

std::size_t Network::input_line(std::size_t slot, std::size_t line_in_slot) const
{
    if (slot >= config.slot_sizes.size() || line_in_slot >= config.slot_sizes[slot]) {
        throw std::out_of_range("input slot " + std::to_string(slot) + " has no line " +
                                std::to_string(line_in_slot));
    }
    std::size_t offset = 0;
    for (std::size_t s = 0; s < slot; ++s) {
        offset += config.slot_sizes[s];
    }
    return offset + line_in_slot;
}

std::size_t Network::slot_count(std::size_t layer) const
{
    return layer == 0 ? config.slot_sizes.size() : config.layer_fields.at(layer - 1);
}

std::size_t Network::slot_of_line(std::size_t layer, std::size_t line) const
{
    return layer == 0 ? input_slot_of(line).first : line % config.layer_fields.at(layer - 1);
}

std::pair<std::size_t, std::size_t> Network::child_slots(std::size_t layer, std::size_t field) const
{
    const std::size_t group = slot_count(layer - 1) / slot_count(layer);
    return {field * group, (field + 1) * group};
}

std::vector<std::size_t> Network::field_lines(std::size_t layer, std::size_t field) const
{
    const auto [first, last] = child_slots(layer, field);
    std::vector<std::size_t> lines;
    if (layer == 1) {
        for (std::size_t s = first; s < last; ++s) {
            for (std::size_t i = 0; i < config.slot_sizes[s]; ++i) {
                lines.push_back(input_line(s, i));
            }
        }
        return lines;
    }
    for (std::size_t i = 0; i < layers[layer - 2].size(); ++i) {
        const std::size_t f = slot_of_line(layer - 1, i);
        if (f >= first && f < last) {
            lines.push_back(i);
        }
    }
    return lines;
}

std::size_t Network::free_pool(std::size_t layer) const
{
    return static_cast<std::size_t>(std::count_if(layers.at(layer - 1).begin(), layers.at(layer - 1).end(),
                                                  [](const GrowthNeuron& n) { return n.status == NeuronStatus::Free; }));
}

std::vector<NeuronId> Network::coding_neurons(std::size_t layer) const
{
    std::vector<NeuronId> out;
    const auto& ns = layers.at(layer - 1);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i].status == NeuronStatus::Coding) {
            out.push_back(NeuronId{static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(i)});
        }
    }
    return out;
}

std::vector<std::size_t> CodingTree::leaves() const
{
    if (layer == 0) {
        return {index};
    }
    std::vector<std::size_t> out;
    for (const auto& c : children) {
        const auto sub = c.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool CodingTree::contains(std::size_t l, std::size_t i) const
{
    if (layer == l && index == i) {
        return true;
    }
    return std::any_of(children.begin(), children.end(),
                       [&](const CodingTree& c) { return c.contains(l, i); });
}

Network init_network(const GrowthConfig& config, const ModelParams& params, std::uint64_t seed)
{
    config.validate();
    params.validate();
    Network net;
    net.config = config;
    net.params = params;
    net.rng_seed = seed;
    SplitMix64 rng(seed);
    net.layers.resize(config.layer_sizes.size());
    for (std::size_t l = 1; l <= config.layer_sizes.size(); ++l) {
        net.layers[l - 1].resize(config.layer_sizes[l - 1]);
    }
    for (std::size_t l = 1; l <= config.layer_sizes.size(); ++l) {
        auto& layer = net.layers[l - 1];
        for (std::size_t i = 0; i < layer.size(); ++i) {
            layer[i].field = i % config.layer_fields[l - 1];
            const auto lines = net.field_lines(l, layer[i].field);
            if (config.d_max > lines.size()) {
                throw ConfigError("growth.d_max (" + std::to_string(config.d_max) + ") exceeds the " +
                                  std::to_string(lines.size()) + " lines available to layer " +
                                  std::to_string(l) + " field " + std::to_string(layer[i].field));
            }
            layer[i].dendrites = random_dendrites(lines, config.d_max, rng, params.synapse);
        }
    }
    return net;
}

namespace {

using Forcing = std::vector<std::vector<std::optional<std::size_t>>>;  // [layer-1][field]

struct SimOutput {
    std::vector<std::vector<double>> rates;
    std::vector<std::vector<std::vector<double>>> ltp_exposure;  // [layer-1][neuron][dendrite]
    std::vector<std::vector<std::vector<double>>> ltd_exposure;
    bool converged = false;
    std::size_t steps_used = 0;
    std::size_t steps_run = 0;
};

std::vector<double> input_frequencies(const Network& net, const InputPattern& pattern)
{
    if (pattern.slots.size() != net.config.slot_sizes.size()) {
        throw std::invalid_argument("pattern has " + std::to_string(pattern.slots.size()) +
                                    " slots but the network expects " +
                                    std::to_string(net.config.slot_sizes.size()));
    }
    std::vector<double> freq(net.input_line_count(), 0.0);
    for (std::size_t s = 0; s < pattern.slots.size(); ++s) {
        const auto& v = pattern.slots[s];
        if (v.frequency < 0.0 || !std::isfinite(v.frequency)) {
            throw std::invalid_argument("slot frequencies must be finite and non-negative");
        }
        if (v.frequency > 0.0) {
            freq[net.input_line(s, v.line)] = v.frequency;
        }
    }
    return freq;
}

std::size_t presentation_steps(const Network& net, const InputPattern& pattern)
{
    if (!(pattern.duration >= 0.0)) {
        throw std::invalid_argument("presentation duration must be non-negative");
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(pattern.duration / net.params.dt)));
}

// Rate-mode dynamics: EPSP traces, retrograde depression and rate transfer,
// layer by layer. Channels sit at their ceiling in rate mode.
SimOutput simulate(const Network& net, const InputPattern& pattern, const ModulationContext& modulation,
                   const Forcing* forced, bool accumulate, std::size_t max_steps)
{
    modulation.validate();
    const auto& np = net.params.neuron;
    const auto& cp = net.params.competition;
    const double dt = net.params.dt;
    const std::size_t L = net.layer_count();
    const auto input = input_frequencies(net, pattern);
    const std::size_t min_steps = presentation_steps(net, pattern);
    const std::size_t limit = accumulate ? min_steps : std::max(min_steps, max_steps);

    // Coding neurons per layer, slot membership, and branch membership.
    std::vector<std::vector<std::size_t>> coding(L);
    std::vector<std::vector<std::vector<std::size_t>>> slot_members(L);
    std::vector<std::vector<std::vector<std::pair<std::size_t, std::size_t>>>> branches(L);
    for (std::size_t l = 1; l <= L; ++l) {
        const auto& layer = net.layers[l - 1];
        slot_members[l - 1].resize(net.slot_count(l));
        const std::size_t below = l == 1 ? net.input_line_count() : net.layers[l - 2].size();
        branches[l - 1].resize(below);
        for (std::size_t i = 0; i < layer.size(); ++i) {
            if (layer[i].status != NeuronStatus::Coding) continue;
            coding[l - 1].push_back(i);
            slot_members[l - 1][layer[i].field].push_back(i);
            for (std::size_t j = 0; j < layer[i].dendrites.size(); ++j) {
                if (layer[i].dendrites[j].synapse.alive) {
                    branches[l - 1][layer[i].dendrites[j].line].emplace_back(i, j);
                }
            }
        }
    }

    auto is_forced_winner = [&](std::size_t l, std::size_t i) {
        if (!forced) return false;
        const auto& f = (*forced)[l - 1][net.layers[l - 1][i].field];
        return f && *f == i;
    };
    auto is_silenced = [&](std::size_t l, std::size_t i) {
        if (!forced) return false;
        const auto& f = (*forced)[l - 1][net.layers[l - 1][i].field];
        return f && *f != i;
    };

    SimOutput out;
    out.rates.resize(L);
    std::vector<std::vector<std::vector<double>>> p(L);
    if (accumulate) {
        out.ltp_exposure.resize(L);
        out.ltd_exposure.resize(L);
    }
    for (std::size_t l = 1; l <= L; ++l) {
        const auto& layer = net.layers[l - 1];
        out.rates[l - 1].assign(layer.size(), 0.0);
        p[l - 1].resize(layer.size());
        if (accumulate) {
            out.ltp_exposure[l - 1].resize(layer.size());
            out.ltd_exposure[l - 1].resize(layer.size());
        }
        for (std::size_t i : coding[l - 1]) {
            p[l - 1][i].assign(layer[i].dendrites.size(), 0.0);
            if (accumulate) {
                out.ltp_exposure[l - 1][i].assign(layer[i].dendrites.size(), 0.0);
                out.ltd_exposure[l - 1][i].assign(layer[i].dendrites.size(), 0.0);
            }
        }
    }

    // Retrograde messengers follow each neuron's leaky rate estimate.
    std::vector<std::vector<double>> est = out.rates;
    std::vector<std::vector<std::optional<std::size_t>>> last_winners;
    std::size_t stable = 0;

    for (std::size_t step = 1; step <= limit; ++step) {
        for (std::size_t l = 1; l <= L; ++l) {
            const auto& layer = net.layers[l - 1];
            const std::vector<double>& freq = l == 1 ? input : out.rates[l - 2];
            for (std::size_t i : coding[l - 1]) {
                const auto& dendrites = layer[i].dendrites;
                for (std::size_t j = 0; j < dendrites.size(); ++j) {
                    if (!dendrites[j].synapse.alive) continue;
                    DendriteState d{p[l - 1][i][j], np.c7, j};
                    d = epsp_step(d, effective_strength(dendrites[j].synapse), freq[dendrites[j].line], dt, np);
                    p[l - 1][i][j] = d.p;
                }
            }
            for (const auto& members : branches[l - 1]) {
                if (members.size() < 2) continue;
                double total = 0.0;
                for (const auto& [i, j] : members) total += est[l - 1][i];
                for (const auto& [i, j] : members) {
                    const double loss = retrograde_loss(total - est[l - 1][i], dt, cp);
                    p[l - 1][i][j] = std::max(0.0, p[l - 1][i][j] - loss);
                }
            }
            for (std::size_t i : coding[l - 1]) {
                if (is_silenced(l, i)) {
                    out.rates[l - 1][i] = 0.0;
                } else {
                    double sum = 0.0;
                    for (double v : p[l - 1][i]) sum += v * np.c7;
                    const double sigma = std::max(0.0, modulation.m * sum + layer[i].bias);
                    out.rates[l - 1][i] = rate_transfer(sigma, np);
                }
                if (!accumulate) continue;
                const double f = out.rates[l - 1][i];
                for (std::size_t j = 0; j < p[l - 1][i].size(); ++j) {
                    const double pj = p[l - 1][i][j];
                    if (pj <= 0.0) continue;
                    if (is_forced_winner(l, i)) {
                        if (f > 0.0) {
                            out.ltp_exposure[l - 1][i][j] += ltp_signal(DendriteState{pj, np.c7, j}, f, np) * dt;
                        }
                    } else if (f < cp.eps_silent || is_silenced(l, i)) {
                        // Steady partial fatigue of a subthreshold dendrite.
                        const double a = std::max(0.0, np.c7 - np.k_fatigue * pj / np.c6_chan);
                        out.ltd_exposure[l - 1][i][j] += ltd_signal(DendriteState{pj, a, j}, np) * dt;
                    }
                }
            }
        }
        for (std::size_t l = 0; l < L; ++l) {
            for (std::size_t i = 0; i < est[l].size(); ++i) {
                est[l][i] += (out.rates[l][i] - est[l][i]) * dt / np.rate_tau;
            }
        }
        out.steps_run = step;

        bool ok = true;
        std::vector<std::vector<std::optional<std::size_t>>> winners(L);
        for (std::size_t l = 1; l <= L && ok; ++l) {
            const std::vector<double>& freq = l == 1 ? input : out.rates[l - 2];
            winners[l - 1].resize(slot_members[l - 1].size());
            for (std::size_t k = 0; k < slot_members[l - 1].size(); ++k) {
                const auto& members = slot_members[l - 1][k];
                std::vector<double> slot_rates;
                bool driven = false;
                for (std::size_t i : members) {
                    slot_rates.push_back(out.rates[l - 1][i]);
                    for (const auto& d : net.layers[l - 1][i].dendrites) {
                        driven = driven || (d.synapse.alive && freq[d.line] >= cp.eps_silent);
                    }
                }
                if (slot_rates.empty()) continue;
                const double peak = *std::max_element(slot_rates.begin(), slot_rates.end());
                const double eps = std::max(cp.eps_silent, net.config.slot_rel_eps * peak);
                if (!slot_satisfied(slot_rates, eps) || (driven && peak < cp.eps_silent)) {
                    ok = false;
                    break;
                }
                if (const auto w = winner(slot_rates, cp)) {
                    winners[l - 1][k] = members[*w];
                }
            }
        }
        if (ok) {
            stable = (winners == last_winners) ? stable + 1 : 1;
        } else {
            stable = 0;
        }
        last_winners = std::move(winners);
        if (!out.converged && stable >= net.config.settle_steps) {
            out.converged = true;
            out.steps_used = step;
        }
        if (!accumulate && out.converged && step >= min_steps) {
            break;
        }
    }
    if (!out.converged) {
        out.steps_used = out.steps_run;
    }
    return out;
}

std::vector<std::optional<std::size_t>> slot_winners(const Network& net, std::size_t layer,
                                                     const std::vector<double>& rates)
{
    std::vector<std::vector<double>> slot_rates(net.slot_count(layer));
    std::vector<std::vector<std::size_t>> members(net.slot_count(layer));
    const auto& ns = net.layers[layer - 1];
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i].status != NeuronStatus::Coding) continue;
        slot_rates[ns[i].field].push_back(rates[i]);
        members[ns[i].field].push_back(i);
    }
    std::vector<std::optional<std::size_t>> out(slot_rates.size());
    for (std::size_t k = 0; k < slot_rates.size(); ++k) {
        if (const auto w = winner(slot_rates[k], net.params.competition)) {
            out[k] = members[k][*w];
        }
    }
    return out;
}

EncodeResult to_encode_result(const Network& net, SimOutput sim)
{
    EncodeResult r;
    const std::size_t top = net.layer_count();
    for (const auto& w : slot_winners(net, top, sim.rates[top - 1])) {
        r.winners.push_back(w ? std::optional<NeuronId>(NeuronId{static_cast<std::uint32_t>(top),
                                                                 static_cast<std::uint32_t>(*w)})
                              : std::nullopt);
    }
    r.firing_map = std::move(sim.rates);
    r.converged = sim.converged;
    r.steps_used = sim.steps_used;
    return r;
}

void release_if_empty(Network& net, std::size_t layer, std::size_t index)
{
    auto& n = net.layers[layer - 1][index];
    if (n.status != NeuronStatus::Coding || !n.dendrites.empty()) {
        return;
    }
    // A coding neuron that lost every synapse returns to the free pool.
    n.status = NeuronStatus::Free;
    n.bias = 0.0;
    SplitMix64 rng(net.rng_seed ^ (0x51ED270B27ULL * (layer * 1000003ULL + index + 1)));
    n.dendrites = random_dendrites(net.field_lines(layer, n.field), net.config.d_max, rng,
                                   net.params.synapse);
}

void prune_neuron(Network& net, std::size_t layer, std::size_t index)
{
    auto& n = net.layers[layer - 1][index];
    for (auto& d : n.dendrites) {
        d.synapse = prune_check(d.synapse, net.params.synapse);
    }
    std::erase_if(n.dendrites, [](const Dendrite& d) { return !d.synapse.alive; });
    release_if_empty(net, layer, index);
}

}  // namespace

EncodeResult present(const Network& net, const InputPattern& pattern, const ModulationContext& modulation,
                     std::size_t max_steps)
{
    const std::size_t limit = max_steps == 0 ? net.config.max_steps : max_steps;
    return to_encode_result(net, simulate(net, pattern, modulation, nullptr, false, limit));
}

LearnReport learn(Network& net, const InputPattern& pattern, const ModulationContext& modulation)
{
    const std::size_t L = net.layer_count();
    const auto& np = net.params.neuron;
    const auto& cp = net.params.competition;
    const auto input = input_frequencies(net, pattern);

    LearnReport report;
    SimOutput sim = simulate(net, pattern, modulation, nullptr, false, net.config.max_steps);
    report.encoding = to_encode_result(net, sim);
    sim.rates = report.encoding.firing_map;

    Forcing forced(L);
    for (std::size_t l = 1; l <= L; ++l) {
        forced[l - 1].assign(net.slot_count(l), std::nullopt);
    }
    std::vector<std::vector<std::vector<std::size_t>>> active(L);
    std::vector<std::vector<bool>> fresh(L);
    const double threshold = net.config.recruit_threshold * max_rate(np);

    for (std::size_t l = 1; l <= L; ++l) {
        const std::size_t fields = net.slot_count(l);
        active[l - 1].assign(fields, {});
        fresh[l - 1].assign(fields, false);
        auto& layer = net.layers[l - 1];
        bool changed = false;
        for (std::size_t k = 0; k < fields; ++k) {
            auto& lines = active[l - 1][k];
            if (l == 1) {
                for (std::size_t x : net.field_lines(1, k)) {
                    if (input[x] >= cp.eps_silent) lines.push_back(x);
                }
            } else {
                const auto [first, last] = net.child_slots(l, k);
                for (std::size_t s = first; s < last; ++s) {
                    if (forced[l - 2][s]) lines.push_back(*forced[l - 2][s]);
                }
                std::sort(lines.begin(), lines.end());
            }
            if (lines.empty()) continue;

            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < layer.size(); ++i) {
                if (layer[i].status != NeuronStatus::Coding || layer[i].field != k) continue;
                if (!best || sim.rates[l - 1][i] > sim.rates[l - 1][*best]) best = i;
            }
            if (best && sim.rates[l - 1][*best] > threshold) {
                forced[l - 1][k] = best;
                continue;
            }

            std::optional<std::size_t> recruit;
            std::size_t best_overlap = 0;
            for (std::size_t i = 0; i < layer.size(); ++i) {
                if (layer[i].status != NeuronStatus::Free || layer[i].field != k) continue;
                if (net.config.attachment == Attachment::Exact) {
                    recruit = i;
                    break;
                }
                const auto overlap = static_cast<std::size_t>(std::count_if(
                    layer[i].dendrites.begin(), layer[i].dendrites.end(), [&](const Dendrite& d) {
                        return std::binary_search(lines.begin(), lines.end(), d.line);
                    }));
                if (!recruit || overlap > best_overlap) {
                    recruit = i;
                    best_overlap = overlap;
                }
            }
            if (!recruit) {
                report.capacity_exhausted = true;
                forced[l - 1][k] = best;
                continue;
            }
            auto& n = layer[*recruit];
            n.status = NeuronStatus::Coding;
            n.bias = 0.0;
            if (net.config.attachment == Attachment::Exact) {
                n.dendrites.clear();
                for (std::size_t x : lines) {
                    n.dendrites.push_back(Dendrite{x, make_synapse(net.params.synapse)});
                }
            }
            forced[l - 1][k] = recruit;
            fresh[l - 1][k] = true;
            report.recruited.push_back(NeuronId{static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(*recruit)});
            changed = true;
        }
        if (l < L) {
            sim = simulate(net, pattern, modulation, &forced, false, net.config.max_steps);
        }
        (void)changed;
    }

    // Plasticity settles bottom-up: each layer learns from a presentation in
    // which the layers below already carry their updated synapses.
    const auto& sp = net.params.synapse;
    for (std::size_t l = 1; l <= L; ++l) {
        const SimOutput run = simulate(net, pattern, modulation, &forced, true, 0);
        const double elapsed = static_cast<double>(run.steps_run) * net.params.dt;
        auto& layer = net.layers[l - 1];
        for (std::size_t i = 0; i < layer.size(); ++i) {
            auto& n = layer[i];
            if (n.status != NeuronStatus::Coding) continue;
            const auto& ltp = run.ltp_exposure[l - 1][i];
            const auto& ltd = run.ltd_exposure[l - 1][i];
            for (std::size_t j = 0; j < n.dendrites.size(); ++j) {
                auto& s = n.dendrites[j].synapse;
                if (!s.alive) continue;
                const double potentiation = ltp[j] * modulation.h;
                const double depression = ltd[j];
                if (potentiation > 0.0) {
                    s = ltp_integrated(s, potentiation, sp);
                } else {
                    s = passive_decay(s, elapsed, sp);
                }
                if (depression > 0.0) {
                    s = ltd_integrated(s, depression, sp);
                } else {
                    s = ltd_recovery_closed(s, elapsed, sp);
                }
            }
        }
    }

    // Winners that absorbed the pattern reach out to active branches they miss.
    for (std::size_t l = 1; l <= L; ++l) {
        for (std::size_t k = 0; k < forced[l - 1].size(); ++k) {
            if (!forced[l - 1][k] || fresh[l - 1][k]) continue;
            auto& n = net.layers[l - 1][*forced[l - 1][k]];
            for (std::size_t x : active[l - 1][k]) {
                if (n.dendrites.size() >= net.config.d_max) break;
                const bool present_already = std::any_of(n.dendrites.begin(), n.dendrites.end(),
                                                         [x](const Dendrite& d) { return d.line == x; });
                if (!present_already) {
                    n.dendrites.push_back(Dendrite{x, make_synapse(sp)});
                }
            }
            std::sort(n.dendrites.begin(), n.dendrites.end(),
                      [](const Dendrite& a, const Dendrite& b) { return a.line < b.line; });
        }
    }

    for (std::size_t l = 1; l <= L; ++l) {
        for (std::size_t i = 0; i < net.layers[l - 1].size(); ++i) {
            if (net.layers[l - 1][i].status == NeuronStatus::Coding) prune_neuron(net, l, i);
        }
    }

    for (const auto& w : forced[L - 1]) {
        report.winners.push_back(w ? std::optional<NeuronId>(NeuronId{static_cast<std::uint32_t>(L),
                                                                      static_cast<std::uint32_t>(*w)})
                                   : std::nullopt);
    }
    return report;
}

CodingTree coding_tree(const Network& net, NeuronId root)
{
    const auto& n = net.neuron(root);
    if (n.status != NeuronStatus::Coding) {
        throw std::invalid_argument("neuron at layer " + std::to_string(root.layer) + " index " +
                                    std::to_string(root.index) + " is not a coding neuron");
    }
    CodingTree tree;
    tree.layer = root.layer;
    tree.index = root.index;
    const std::size_t below = root.layer - 1;
    const auto [first, last] = net.child_slots(root.layer, n.field);
    for (std::size_t s = first; s < last; ++s) {
        const Dendrite* strongest = nullptr;
        for (const auto& d : n.dendrites) {
            if (!d.synapse.alive || net.slot_of_line(below, d.line) != s) continue;
            if (!strongest || effective_strength(d.synapse) > effective_strength(strongest->synapse)) {
                strongest = &d;
            }
        }
        if (!strongest) continue;
        CodingTree child;
        if (below >= 1 && net.layers[below - 1][strongest->line].status == NeuronStatus::Coding) {
            child = coding_tree(net, NeuronId{static_cast<std::uint32_t>(below),
                                              static_cast<std::uint32_t>(strongest->line)});
        } else {
            child.layer = below;
            child.index = strongest->line;
        }
        child.strength = effective_strength(strongest->synapse);
        tree.children.push_back(std::move(child));
    }
    return tree;
}

RetrieveResult retrieve(const Network& net, const InputPattern& pattern, const ModulationContext& modulation)
{
    RetrieveResult r;
    r.encoding = present(net, pattern, modulation);
    r.reconstruction.duration = pattern.duration;
    r.reconstruction.slots.assign(net.config.slot_sizes.size(), SlotValue{});
    const auto& top_rates = r.encoding.firing_map.back();
    for (const auto& w : r.encoding.winners) {
        if (!w) continue;
        if (!r.winner || top_rates[w->index] > top_rates[r.winner->index]) {
            r.winner = w;
        }
        for (std::size_t line : coding_tree(net, *w).leaves()) {
            const auto [slot, offset] = net.input_slot_of(line);
            r.reconstruction.slots[slot] = SlotValue{offset, 1.0};
        }
    }
    return r;
}

void decay_epoch(Network& net, double elapsed)
{
    if (!(elapsed >= 0.0)) {
        throw NumericDomainError("decay time must be non-negative");
    }
    if (elapsed == 0.0) {
        return;
    }
    const auto& sp = net.params.synapse;
    for (std::size_t l = 1; l <= net.layer_count(); ++l) {
        for (std::size_t i = 0; i < net.layers[l - 1].size(); ++i) {
            auto& n = net.layers[l - 1][i];
            if (n.status != NeuronStatus::Coding) continue;
            for (auto& d : n.dendrites) {
                d.synapse = ltd_recovery_closed(passive_decay(d.synapse, elapsed, sp), elapsed, sp);
            }
            prune_neuron(net, l, i);
        }
    }
}

void supervised_bias(Network& net, const std::vector<NeuronId>& targets, double facilitation)
{
    require_finite(facilitation, "facilitation");
    for (const auto& id : targets) {
        net.neuron(id).bias += facilitation;
    }
}

void clear_bias(Network& net)
{
    for (auto& layer : net.layers) {
        for (auto& n : layer) n.bias = 0.0;
    }
}

void kill_neuron(Network& net, NeuronId id)
{
    auto& n = net.neuron(id);
    n.status = NeuronStatus::Dead;
    n.bias = 0.0;
    n.dendrites.clear();
}

std::vector<std::vector<AxonalBranchGroup>> branch_groups(const Network& net)
{
    std::vector<std::vector<AxonalBranchGroup>> out(net.layer_count());
    for (std::size_t l = 1; l <= net.layer_count(); ++l) {
        const std::size_t below = l == 1 ? net.input_line_count() : net.layers[l - 2].size();
        std::vector<AxonalBranchGroup> groups(below);
        for (std::size_t x = 0; x < below; ++x) groups[x].source = x;
        const auto& layer = net.layers[l - 1];
        for (std::size_t i = 0; i < layer.size(); ++i) {
            for (std::size_t j = 0; j < layer[i].dendrites.size(); ++j) {
                if (layer[i].dendrites[j].synapse.alive) {
                    groups[layer[i].dendrites[j].line].members.push_back(DendriteRef{i, j});
                }
            }
        }
        std::erase_if(groups, [](const AxonalBranchGroup& g) { return g.members.empty(); });
        out[l - 1] = std::move(groups);
    }
    return out;
}

double retrieval_score(const Network& net, const EncodeResult& encoding, NeuronId target)
{
    const auto& n = net.neuron(target);
    if (n.status != NeuronStatus::Coding) {
        return 0.0;
    }
    const auto& rates = encoding.firing_map.at(target.layer - 1);
    const double own = rates[target.index];
    if (own < net.params.competition.eps_silent) {
        return 0.0;
    }
    double rival = 0.0;
    const auto& layer = net.layers[target.layer - 1];
    for (std::size_t i = 0; i < layer.size(); ++i) {
        if (i == target.index || layer[i].status != NeuronStatus::Coding || layer[i].field != n.field) continue;
        if (rates[i] > own || (rates[i] == own && i < target.index)) {
            return 0.0;
        }
        rival = std::max(rival, rates[i]);
    }
    return std::clamp((own - rival) / max_rate(net.params.neuron), 0.0, 1.0);
}

}  // namespace slotnet
