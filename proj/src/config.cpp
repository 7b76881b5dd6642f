#include "slotnet/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace slotnet {

using nlohmann::json;

namespace {

[[noreturn]] void type_error(const std::string& key, const char* expected)
{
    throw ConfigError("config key '" + key + "' expects " + expected);
}

template <class T>
T read(const json& v, const std::string& key);

template <>
double read<double>(const json& v, const std::string& key)
{
    if (!v.is_number()) type_error(key, "a number");
    return v.get<double>();
}

template <>
std::size_t read<std::size_t>(const json& v, const std::string& key)
{
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == static_cast<double>(static_cast<std::size_t>(d))) return static_cast<std::size_t>(d);
    }
    type_error(key, "a non-negative integer");
}

template <>
std::string read<std::string>(const json& v, const std::string& key)
{
    if (!v.is_string()) type_error(key, "a string");
    return v.get<std::string>();
}

template <>
std::vector<double> read<std::vector<double>>(const json& v, const std::string& key)
{
    if (!v.is_array()) type_error(key, "a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(read<double>(x, key));
    return out;
}

template <>
std::vector<std::size_t> read<std::vector<std::size_t>>(const json& v, const std::string& key)
{
    if (!v.is_array()) type_error(key, "a list of non-negative integers");
    std::vector<std::size_t> out;
    for (const auto& x : v) out.push_back(read<std::size_t>(x, key));
    return out;
}

struct Entry {
    std::string key;
    std::string help;
    std::function<json(const RunConfig&)> get;
    std::function<void(RunConfig&, const json&)> set;
};

template <class T, class Ref>
Entry field(std::string key, std::string help, Ref ref)
{
    return Entry{key, std::move(help), [ref](const RunConfig& c) { return json(ref(c)); },
                 [ref, key](RunConfig& c, const json& v) { ref(c) = read<T>(v, key); }};
}

template <class E, class Ref>
Entry choice(std::string key, std::string help, Ref ref, std::vector<std::pair<E, std::string>> names)
{
    auto get = [ref, names](const RunConfig& c) {
        for (const auto& [value, name] : names) {
            if (value == ref(c)) return json(name);
        }
        return json(nullptr);
    };
    auto set = [ref, names, key](RunConfig& c, const json& v) {
        std::string options;
        if (v.is_string()) {
            for (const auto& [value, name] : names) {
                if (name == v.get<std::string>()) {
                    ref(c) = value;
                    return;
                }
            }
        }
        for (const auto& [value, name] : names) options += (options.empty() ? "" : " | ") + name;
        throw ConfigError("config key '" + key + "' expects one of: " + options);
    };
    return Entry{key, std::move(help), get, set};
}

#define SLOTNET_REF(expr) [](auto& c) -> auto& { return expr; }

const std::vector<Entry>& registry()
{
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        e.push_back(field<double>("neuron.c0", "firing threshold on accumulated charge [c_0, charge law]", SLOTNET_REF(c.params.neuron.c0)));
        e.push_back(field<double>("neuron.c1", "maximal charging rate [c_1, charge law]", SLOTNET_REF(c.params.neuron.c1)));
        e.push_back(field<double>("neuron.c2", "drive sensitivity of charging [c_2, charge law]", SLOTNET_REF(c.params.neuron.c2)));
        e.push_back(field<double>("neuron.c3_epsp", "EPSP growth per unit strength and frequency [c_3, EPSP law]", SLOTNET_REF(c.params.neuron.c3_epsp)));
        e.push_back(field<double>("neuron.c4_epsp", "EPSP decay rate [c_4, EPSP law]", SLOTNET_REF(c.params.neuron.c4_epsp)));
        e.push_back(field<double>("neuron.c5", "LTP signal gain, s_p = c_5 p f [c_5, EPSP law]", SLOTNET_REF(c.params.neuron.c5)));
        e.push_back(field<double>("neuron.c6_chan", "channel recovery rate [c_6, channel law]", SLOTNET_REF(c.params.neuron.c6_chan)));
        e.push_back(field<double>("neuron.c7", "channel ceiling [c_7, channel law]", SLOTNET_REF(c.params.neuron.c7)));
        e.push_back(field<double>("neuron.c8", "LTD signal gain, s_d = c_8 p (c_7 - a) [c_8, channel law]", SLOTNET_REF(c.params.neuron.c8)));
        e.push_back(field<double>("neuron.k_fatigue", "partial channel fatigue per unit EPSP", SLOTNET_REF(c.params.neuron.k_fatigue)));
        e.push_back(field<double>("neuron.refractory_period", "time without charging after a spike", SLOTNET_REF(c.params.neuron.refractory_period)));
        e.push_back(field<double>("neuron.rate_tau", "time constant of the firing-rate estimate", SLOTNET_REF(c.params.neuron.rate_tau)));

        e.push_back(field<double>("synapse.k_w", "LTP strength gain [c_1, strength law]", SLOTNET_REF(c.params.synapse.k_w)));
        e.push_back(field<double>("synapse.w_max", "strength ceiling [c_2, strength law]", SLOTNET_REF(c.params.synapse.w_max)));
        e.push_back(field<double>("synapse.k_r", "persistence gain [c_3, strength law]", SLOTNET_REF(c.params.synapse.k_r)));
        e.push_back(field<double>("synapse.k_decay", "passive decay coefficient [c_4, strength law]", SLOTNET_REF(c.params.synapse.k_decay)));
        e.push_back(field<double>("synapse.k_wd", "devaluation gain [c_6, devaluation law]", SLOTNET_REF(c.params.synapse.k_wd)));
        e.push_back(field<double>("synapse.k_rd", "devaluation-persistence gain [c_7, devaluation law]", SLOTNET_REF(c.params.synapse.k_rd)));
        e.push_back(field<double>("synapse.k_recover", "devaluation recovery coefficient [c_8, devaluation law]", SLOTNET_REF(c.params.synapse.k_recover)));
        e.push_back(field<double>("synapse.w_init", "strength of a new connection", SLOTNET_REF(c.params.synapse.w_init)));
        e.push_back(field<double>("synapse.w_prune", "strength below which a connection breaks", SLOTNET_REF(c.params.synapse.w_prune)));
        e.push_back(field<double>("synapse.r_init", "initial persistence r", SLOTNET_REF(c.params.synapse.r_init)));
        e.push_back(field<double>("synapse.r_d_init", "initial devaluation recovery rate r_d", SLOTNET_REF(c.params.synapse.r_d_init)));

        e.push_back(field<double>("competition.k_retro", "retrograde messenger gain [c_1, competition law]", SLOTNET_REF(c.params.competition.k_retro)));
        e.push_back(field<double>("competition.k_sat", "retrograde messenger saturation [c_2, competition law]", SLOTNET_REF(c.params.competition.k_sat)));
        e.push_back(field<double>("competition.eps_silent", "rate below which a neuron counts as silent", SLOTNET_REF(c.params.competition.eps_silent)));

        e.push_back(field<double>("sim.dt", "integration step", SLOTNET_REF(c.params.dt)));
        e.push_back(field<std::size_t>("sim.seed", "random seed", SLOTNET_REF(c.params.seed)));
        e.push_back(choice<Mode>("sim.mode", "neuron execution mode: event | rate", SLOTNET_REF(c.params.mode),
                                 {{Mode::Event, "event"}, {Mode::Rate, "rate"}}));

        e.push_back(field<std::vector<std::size_t>>("growth.slot_sizes", "lines per input slot", SLOTNET_REF(c.growth.slot_sizes)));
        e.push_back(field<std::vector<std::size_t>>("growth.layer_sizes", "neurons per layer", SLOTNET_REF(c.growth.layer_sizes)));
        e.push_back(field<std::vector<std::size_t>>("growth.layer_fields", "receptive fields (slots) per layer", SLOTNET_REF(c.growth.layer_fields)));
        e.push_back(field<std::size_t>("growth.d_max", "dendrites per neuron at most", SLOTNET_REF(c.growth.d_max)));
        e.push_back(field<double>("growth.recruit_threshold", "rate, as a fraction of c_1/c_0, that counts as recognition", SLOTNET_REF(c.growth.recruit_threshold)));
        e.push_back(field<std::size_t>("growth.max_steps", "step limit of one presentation", SLOTNET_REF(c.growth.max_steps)));
        e.push_back(field<std::size_t>("growth.settle_steps", "steps the winners must hold to count as converged", SLOTNET_REF(c.growth.settle_steps)));
        e.push_back(field<double>("growth.slot_rel_eps", "slot tolerance relative to the slot's top rate", SLOTNET_REF(c.growth.slot_rel_eps)));
        e.push_back(choice<Attachment>("growth.attachment", "recruited dendrites: exact | random", SLOTNET_REF(c.growth.attachment),
                                       {{Attachment::Exact, "exact"}, {Attachment::Random, "random"}}));
        e.push_back(field<double>("growth.input_rate", "frequency of an active input line", SLOTNET_REF(c.grow.scenario.input_rate)));
        e.push_back(field<double>("growth.m", "neuromodulator m during presentation [m, charge law]", SLOTNET_REF(c.grow.scenario.m)));
        e.push_back(field<double>("growth.h", "hormone h during learning [h, strength law]", SLOTNET_REF(c.grow.scenario.h)));
        e.push_back(field<double>("growth.duration", "presentation time", SLOTNET_REF(c.grow.scenario.duration)));
        e.push_back(field<std::size_t>("growth.patterns", "patterns learned by grow", SLOTNET_REF(c.grow.patterns)));
        e.push_back(field<std::size_t>("growth.epochs", "passes over the pattern set", SLOTNET_REF(c.grow.epochs)));

        e.push_back(field<std::vector<double>>("stdp.delta_ts", "pairing intervals, empty for +-k/c_4 and +-k/c_6", SLOTNET_REF(c.stdp.delta_ts)));
        e.push_back(field<double>("stdp.w_eff", "effective strength of the probed synapse", SLOTNET_REF(c.stdp.w_eff)));
        e.push_back(field<double>("stdp.dt_scale", "step as a fraction of the fastest time constant", SLOTNET_REF(c.stdp.dt_scale)));

        e.push_back(field<double>("hebb.f_pre", "presynaptic frequency", SLOTNET_REF(c.hebb.f_pre)));
        e.push_back(field<double>("hebb.f_post", "postsynaptic frequency", SLOTNET_REF(c.hebb.f_post)));
        e.push_back(field<double>("hebb.duration", "run length, at least 5/c_4", SLOTNET_REF(c.hebb.duration)));
        e.push_back(field<double>("hebb.w_eff", "effective strength of the synapse", SLOTNET_REF(c.hebb.w_eff)));

        e.push_back(field<std::vector<double>>("freq.freqs", "presynaptic frequencies to sweep", SLOTNET_REF(c.freq.freqs)));
        e.push_back(field<double>("freq.duration", "length of each train", SLOTNET_REF(c.freq.duration)));
        e.push_back(field<double>("freq.w_eff", "initial effective strength", SLOTNET_REF(c.freq.w_eff)));
        e.push_back(field<double>("freq.step", "integration step of the spiking run", SLOTNET_REF(c.freq.step)));
        e.push_back(field<std::size_t>("freq.bisection_steps", "halvings used to locate the crossover", SLOTNET_REF(c.freq.bisection_steps)));

        e.push_back(field<std::vector<std::size_t>>("forget.rehearsals", "rehearsal counts k", SLOTNET_REF(c.forget.rehearsals)));
        e.push_back(field<double>("forget.horizon", "decay time observed", SLOTNET_REF(c.forget.horizon)));
        e.push_back(field<std::size_t>("forget.samples", "retention samples per curve", SLOTNET_REF(c.forget.samples)));
        e.push_back(field<double>("forget.pulse_exposure", "integral of s_p h delivered by one rehearsal", SLOTNET_REF(c.forget.pulse_exposure)));
        e.push_back(field<double>("forget.spacing", "idle time between rehearsals", SLOTNET_REF(c.forget.spacing)));
        e.push_back(field<double>("forget.recall_exposure", "consolidation caused by each retention test, 0 for none", SLOTNET_REF(c.forget.recall_exposure)));

        e.push_back(field<std::vector<double>>("interfere.overlaps", "fractions of shared slots", SLOTNET_REF(c.interfere.overlaps)));
        e.push_back(choice<LearnOrder>("interfere.order", "learning order: a-then-b | b-then-a", SLOTNET_REF(c.interfere.order),
                                       {{LearnOrder::AThenB, "a-then-b"}, {LearnOrder::BThenA, "b-then-a"}}));
        e.push_back(field<std::size_t>("interfere.epochs_first", "presentations of the first pattern", SLOTNET_REF(c.interfere.epochs_first)));
        e.push_back(field<std::size_t>("interfere.epochs_second", "presentations of the second pattern", SLOTNET_REF(c.interfere.epochs_second)));
        e.push_back(field<std::size_t>("interfere.slots", "input slots", SLOTNET_REF(c.interfere.slots)));
        e.push_back(field<std::size_t>("interfere.lines_per_slot", "lines per input slot", SLOTNET_REF(c.interfere.lines_per_slot)));
        e.push_back(field<std::size_t>("interfere.neurons", "neurons in the single layer", SLOTNET_REF(c.interfere.neurons)));
        e.push_back(field<double>("interfere.input_rate", "frequency of an active input line", SLOTNET_REF(c.interfere.scenario.input_rate)));
        e.push_back(field<double>("interfere.m", "neuromodulator m during presentation", SLOTNET_REF(c.interfere.scenario.m)));
        e.push_back(field<double>("interfere.h", "hormone h during learning", SLOTNET_REF(c.interfere.scenario.h)));
        e.push_back(field<double>("interfere.duration", "presentation time", SLOTNET_REF(c.interfere.scenario.duration)));

        e.push_back(field<std::vector<std::size_t>>("savings.consolidations", "extra rehearsals after reaching criterion", SLOTNET_REF(c.savings.consolidations)));
        e.push_back(field<double>("savings.criterion_rate", "winner rate that counts as recall", SLOTNET_REF(c.savings.criterion_rate)));
        e.push_back(field<std::size_t>("savings.max_epochs", "learning epochs allowed to reach criterion", SLOTNET_REF(c.savings.max_epochs)));
        e.push_back(field<double>("savings.decay_chunk", "decay between recall checks", SLOTNET_REF(c.savings.decay_chunk)));
        e.push_back(field<std::size_t>("savings.max_decay_chunks", "decay chunks applied at most while waiting for recall to fail", SLOTNET_REF(c.savings.max_decay_chunks)));
        e.push_back(Entry{"savings.fixed_decay", "decay this long instead of until recall fails (null for off)",
                          [](const RunConfig& c) { return c.savings.fixed_decay ? json(*c.savings.fixed_decay) : json(nullptr); },
                          [](RunConfig& c, const json& v) {
                              if (v.is_null()) {
                                  c.savings.fixed_decay.reset();
                              } else {
                                  c.savings.fixed_decay = read<double>(v, "savings.fixed_decay");
                              }
                          }});
        e.push_back(field<std::size_t>("savings.slots", "input slots", SLOTNET_REF(c.savings.slots)));
        e.push_back(field<std::size_t>("savings.lines_per_slot", "lines per input slot", SLOTNET_REF(c.savings.lines_per_slot)));
        e.push_back(field<std::size_t>("savings.neurons", "neurons in the single layer", SLOTNET_REF(c.savings.neurons)));
        e.push_back(field<double>("savings.input_rate", "frequency of an active input line", SLOTNET_REF(c.savings.scenario.input_rate)));
        e.push_back(field<double>("savings.m", "neuromodulator m during presentation", SLOTNET_REF(c.savings.scenario.m)));
        e.push_back(field<double>("savings.h", "hormone h during learning", SLOTNET_REF(c.savings.scenario.h)));
        e.push_back(field<double>("savings.duration", "presentation time", SLOTNET_REF(c.savings.scenario.duration)));

        e.push_back(field<std::string>("logic.expr", "boolean expression compiled by the logic command", SLOTNET_REF(c.logic_expr)));
        return e;
    }();
    return entries;
}

#undef SLOTNET_REF

const Entry* find_entry(const std::string& key)
{
    for (const auto& e : registry()) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

void set_path(json& doc, const std::string& key, json value)
{
    json* node = &doc;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
        node = &(*node)[key.substr(start, dot - start)];
        start = dot + 1;
    }
    (*node)[key.substr(start)] = std::move(value);
}

void flatten(const json& node, const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out)
{
    for (auto it = node.begin(); it != node.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            flatten(*it, key, out);
        } else {
            out.emplace_back(key, &*it);
        }
    }
}

}  // namespace

void RunConfig::validate() const
{
    params.validate();
    growth.validate();
    grow.scenario.validate();
    interfere.scenario.validate();
    savings.scenario.validate();
}

std::vector<ParamInfo> parameter_table()
{
    std::vector<ParamInfo> out;
    for (const auto& e : registry()) out.push_back({e.key, e.help});
    return out;
}

json to_json(const RunConfig& config)
{
    json doc = json::object();
    for (const auto& e : registry()) set_path(doc, e.key, e.get(config));
    return doc;
}

RunConfig apply_json(RunConfig base, const json& doc, const std::vector<std::string>& ignored)
{
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    json filtered = doc;
    for (const auto& key : ignored) filtered.erase(key);
    std::vector<std::pair<std::string, const json*>> items;
    flatten(filtered, "", items);
    for (const auto& [key, value] : items) {
        const Entry* e = find_entry(key);
        if (!e) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
        e->set(base, *value);
    }
    return base;
}

void apply_override(RunConfig& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' must look like key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    const Entry* e = find_entry(key);
    if (!e) {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    e->set(config, value);
}

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides)
{
    RunConfig config;
    if (path) {
        std::ifstream in(*path);
        if (!in) {
            throw ConfigError("cannot open config file '" + *path + "'");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
            json doc;
            try {
                doc = json::parse(text);
            } catch (const json::parse_error& e) {
                throw ConfigError("config file '" + *path + "': " + e.what());
            }
            config = apply_json(std::move(config), doc, {"artifact"});
        }
    }
    for (const auto& o : overrides) apply_override(config, o);
    config.validate();
    return config;
}

json model_to_json(const ModelParams& params, const GrowthConfig& growth)
{
    RunConfig c;
    c.params = params;
    c.growth = growth;
    json doc = to_json(c);
    json out;
    for (const char* section : {"neuron", "synapse", "competition", "sim"}) out[section] = doc[section];
    for (const char* key : {"slot_sizes", "layer_sizes", "layer_fields", "d_max", "recruit_threshold", "max_steps",
                            "settle_steps", "slot_rel_eps", "attachment"}) {
        out["growth"][key] = doc["growth"][key];
    }
    return out;
}

void model_from_json(const json& doc, ModelParams& params, GrowthConfig& growth)
{
    RunConfig c;
    c = apply_json(std::move(c), doc);
    params = c.params;
    growth = c.growth;
}

}  // namespace slotnet
