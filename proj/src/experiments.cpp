#include "slotnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slotnet/numerics.hpp"
#include "slotnet/rng.hpp"

namespace slotnet {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void snapshot(ProtocolResult& r, const ModelParams& p)
{
    const auto& n = p.neuron;
    const auto& s = p.synapse;
    const auto& c = p.competition;
    r.metadata.insert(r.metadata.end(), {
        {"neuron.c0", fmt(n.c0)}, {"neuron.c1", fmt(n.c1)}, {"neuron.c2", fmt(n.c2)},
        {"neuron.c3_epsp", fmt(n.c3_epsp)}, {"neuron.c4_epsp", fmt(n.c4_epsp)}, {"neuron.c5", fmt(n.c5)},
        {"neuron.c6_chan", fmt(n.c6_chan)}, {"neuron.c7", fmt(n.c7)}, {"neuron.c8", fmt(n.c8)},
        {"synapse.k_w", fmt(s.k_w)}, {"synapse.w_max", fmt(s.w_max)}, {"synapse.k_r", fmt(s.k_r)},
        {"synapse.k_decay", fmt(s.k_decay)}, {"synapse.k_wd", fmt(s.k_wd)}, {"synapse.k_rd", fmt(s.k_rd)},
        {"synapse.k_recover", fmt(s.k_recover)}, {"synapse.w_init", fmt(s.w_init)},
        {"synapse.w_prune", fmt(s.w_prune)}, {"competition.k_retro", fmt(c.k_retro)},
        {"competition.k_sat", fmt(c.k_sat)}, {"competition.eps_silent", fmt(c.eps_silent)},
        {"sim.dt", fmt(p.dt)}, {"sim.seed", std::to_string(p.seed)},
    });
}

SynapseState synapse_with_strength(double w_eff, const SynapseParams& sp)
{
    if (!(w_eff >= 0.0 && w_eff <= sp.w_max)) {
        throw std::invalid_argument("effective strength must lie in [0, w_max]");
    }
    SynapseState s = make_synapse(sp);
    s.w = w_eff;
    return s;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() < 2) {
        return std::nan("");
    }
    return log_linear_slope(x.data(), y.data(), x.size());
}

GrowthConfig single_field(std::size_t slots, std::size_t lines, std::size_t neurons)
{
    GrowthConfig c;
    c.slot_sizes.assign(slots, lines);
    c.layer_sizes = {neurons};
    c.layer_fields = {1};
    c.d_max = std::min(2 * slots, slots * lines);
    return c;
}

std::vector<std::size_t> random_lines(const GrowthConfig& c, SplitMix64& rng)
{
    std::vector<std::size_t> lines;
    for (std::size_t size : c.slot_sizes) {
        lines.push_back(rng.below(size));
    }
    return lines;
}

bool recalled(const Network& net, const std::vector<std::size_t>& lines, const GrowthScenario& sc,
              double criterion_rate)
{
    const auto pattern = make_pattern(lines, sc.input_rate, sc.duration);
    const auto enc = present(net, pattern, sc.modulation());
    const auto id = coding_neuron_for(net, lines);
    if (!id) {
        return false;
    }
    const auto& top = enc.winners;
    const bool wins = std::find(top.begin(), top.end(), std::optional<NeuronId>(*id)) != top.end();
    return wins && enc.firing_map[id->layer - 1][id->index] >= criterion_rate;
}

double pattern_score(const Network& net, const std::vector<std::size_t>& lines, const GrowthScenario& sc)
{
    const auto id = coding_neuron_for(net, lines);
    if (!id) {
        return 0.0;
    }
    const auto enc = present(net, make_pattern(lines, sc.input_rate, sc.duration), sc.modulation());
    return retrieval_score(net, enc, *id);
}

}  // namespace

std::optional<double> ProtocolResult::summary_value(const std::string& key) const
{
    for (const auto& [k, v] : summary) {
        if (k == key) return v;
    }
    return std::nullopt;
}

void GrowthScenario::validate() const
{
    if (!(input_rate > 0.0) || !(duration > 0.0)) {
        throw ConfigError("scenario input rate and duration must be positive");
    }
    modulation().validate();
}

std::vector<double> default_stdp_delta_ts(const NeuronParams& params)
{
    std::vector<double> out;
    for (int k = 10; k >= 1; --k) out.push_back(-k / params.c6_chan);
    for (int k = 1; k <= 10; ++k) out.push_back(k / params.c4_epsp);
    return out;
}

ProtocolResult stdp_protocol(const StdpOptions& options, const ModelParams& params)
{
    params.validate();
    const auto& np = params.neuron;
    const auto& sp = params.synapse;
    const double step = options.dt_scale / std::max(np.c4_epsp, np.c6_chan);
    const auto delta_ts = options.delta_ts.empty() ? default_stdp_delta_ts(np) : options.delta_ts;

    ProtocolResult r;
    r.name = "stdp";
    r.columns = {"delta_t", "signal", "dw_eff"};
    snapshot(r, params);
    r.metadata.push_back({"stdp.w_eff", fmt(options.w_eff)});
    r.metadata.push_back({"stdp.step", fmt(step)});

    std::vector<double> ltp_x, ltp_y, ltd_x, ltd_y;
    for (double delta : delta_ts) {
        if (delta == 0.0 || !std::isfinite(delta)) {
            throw std::invalid_argument("STDP intervals must be finite and nonzero");
        }
        const auto gap = std::max<long long>(1, std::llround(std::abs(delta) / step));
        const long long pre_at = delta > 0 ? 0 : gap;
        const long long post_at = delta > 0 ? gap : 0;

        SynapseState syn = synapse_with_strength(options.w_eff, sp);
        const double w0 = effective_strength(syn);
        NeuronState post;
        post.dendrites = {DendriteState{0.0, np.c7, 0}};
        double signal = 0.0;

        for (long long k = 0; k <= std::max(pre_at, post_at); ++k) {
            auto& d = post.dendrites[0];
            const double f_in = k == pre_at ? 1.0 / step : 0.0;
            d = epsp_step(d, effective_strength(syn), f_in, step, np);
            if (k == post_at) {
                post.q += 2.0 * np.c0;  // current injection
            }
            post = fire_check(std::move(post), np).first;
            if (post.fired) {
                const double s_p = ltp_signal(post, 0, np);
                syn = ltp_update(syn, s_p, 1.0, step, sp);
                signal += s_p;
            } else if (k == pre_at) {
                const double s_d = ltd_signal(post, 0, np);
                syn = ltd_update(syn, s_d, step, sp);
                signal += s_d;
            }
            auto& dd = post.dendrites[0];
            dd = channel_step(dd, !post.fired && dd.p > 0.0, step, np);
            post = decay_rate_estimate(std::move(post), step, np);
        }
        const double dw = effective_strength(syn) - w0;
        r.rows.push_back({delta, signal, dw});
        if (dw != 0.0) {
            (delta > 0 ? ltp_x : ltd_x).push_back(std::abs(delta));
            (delta > 0 ? ltp_y : ltd_y).push_back(std::abs(dw));
        }
    }
    r.summary.push_back({"ltp_exponent", fit_exponent(ltp_x, ltp_y)});
    r.summary.push_back({"ltd_exponent", fit_exponent(ltd_x, ltd_y)});
    return r;
}

ProtocolResult hebb_protocol(const HebbOptions& options, const ModelParams& params)
{
    params.validate();
    const auto& np = params.neuron;
    if (options.duration < 5.0 / np.c4_epsp) {
        throw std::invalid_argument("Hebb duration must be at least 5 / c4_epsp");
    }
    if (options.f_pre < 0.0 || options.f_post < 0.0) {
        throw std::invalid_argument("frequencies must be non-negative");
    }
    ProtocolResult r;
    r.name = "hebb";
    r.columns = {"t", "s_p"};
    snapshot(r, params);
    r.metadata.push_back({"hebb.f_pre", fmt(options.f_pre)});
    r.metadata.push_back({"hebb.f_post", fmt(options.f_post)});
    r.metadata.push_back({"hebb.duration", fmt(options.duration)});
    r.metadata.push_back({"hebb.w_eff", fmt(options.w_eff)});

    const auto steps = static_cast<std::size_t>(std::llround(options.duration / params.dt));
    DendriteState d{0.0, np.c7, 0};
    double s_p = 0.0;
    r.rows.push_back({0.0, 0.0});
    for (std::size_t k = 1; k <= steps; ++k) {
        d = epsp_step(d, options.w_eff, options.f_pre, params.dt, np);
        s_p = options.f_post > 0.0 ? ltp_signal(d, options.f_post, np) : 0.0;
        r.rows.push_back({static_cast<double>(k) * params.dt, s_p});
    }
    const double predicted = np.c5 * (np.c3_epsp / np.c4_epsp) * options.w_eff * options.f_pre * options.f_post;
    r.summary.push_back({"s_p_final", s_p});
    r.summary.push_back({"s_p_predicted", predicted});
    return r;
}

namespace {

// Net change of effective strength after a regular presynaptic train. LTP
// follows the firing-rate estimate, LTD the channel deficit under EPSP.
double frequency_run(double f_in, const FrequencyOptions& o, const ModelParams& params)
{
    const auto& np = params.neuron;
    const auto& sp = params.synapse;
    SynapseState syn = synapse_with_strength(o.w_eff, sp);
    const double w0 = effective_strength(syn);
    if (f_in <= 0.0) {
        return 0.0;
    }
    const auto steps = static_cast<long long>(std::llround(o.duration / o.step));
    const double period = 1.0 / f_in;
    NeuronState n;
    n.dendrites = {DendriteState{0.0, np.c7, 0}};
    const ModulationContext mod;
    double next_spike = 0.0;
    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * o.step;
        double input = 0.0;
        if (t + 0.5 * o.step >= next_spike) {
            input = 1.0 / o.step;
            next_spike += period;
        }
        auto& d = n.dendrites[0];
        d = epsp_step(d, effective_strength(syn), input, o.step, np);
        n = charge_step(std::move(n), drive(n, mod), o.step, np);
        n = fire_check(std::move(n), np).first;
        const auto& dd = n.dendrites[0];
        if (n.f > 0.0 && dd.p > 0.0) {
            syn = ltp_update(syn, ltp_signal(dd, n.f, np), mod.h, o.step, sp);
        }
        if (dd.p > 0.0) {
            syn = ltd_update(syn, ltd_signal(dd, np), o.step, sp);
        }
        // Partial fatigue needs an EPSP that leaves the neuron silent.
        const bool subthreshold = !n.fired && n.f < params.competition.eps_silent && n.dendrites[0].p > 0.0;
        n.dendrites[0] = channel_step(n.dendrites[0], subthreshold, o.step, np);
        n = decay_rate_estimate(std::move(n), o.step, np);
    }
    return effective_strength(syn) - w0;
}

}  // namespace

ProtocolResult frequency_protocol(const FrequencyOptions& options, const ModelParams& params)
{
    params.validate();
    if (options.freqs.empty() || !(options.duration > 0.0) || !(options.step > 0.0)) {
        throw std::invalid_argument("frequency protocol needs frequencies, a positive duration and step");
    }
    ProtocolResult r;
    r.name = "freq";
    r.columns = {"f_in", "dw_eff", "class"};
    snapshot(r, params);
    r.metadata.push_back({"freq.duration", fmt(options.duration)});
    r.metadata.push_back({"freq.w_eff", fmt(options.w_eff)});
    r.metadata.push_back({"freq.step", fmt(options.step)});

    auto freqs = options.freqs;
    std::sort(freqs.begin(), freqs.end());
    std::optional<double> below, above;
    for (double f : freqs) {
        if (f < 0.0) throw std::invalid_argument("frequencies must be non-negative");
        const double dw = frequency_run(f, options, params);
        const double cls = dw > 0.0 ? 1.0 : (dw < 0.0 ? -1.0 : 0.0);
        r.rows.push_back({f, dw, cls});
        if (dw < 0.0 && !above) below = f;
        if (dw > 0.0 && below && !above) above = f;
    }
    if (below && above) {
        double lo = *below, hi = *above;
        for (std::size_t i = 0; i < options.bisection_steps; ++i) {
            const double mid = 0.5 * (lo + hi);
            (frequency_run(mid, options, params) < 0.0 ? lo : hi) = mid;
        }
        r.summary.push_back({"crossover", 0.5 * (lo + hi)});
    }
    return r;
}

ProtocolResult forgetting_protocol(const ForgettingOptions& options, const ModelParams& params)
{
    params.validate();
    if (!(options.horizon > 0.0) || options.samples < 2) {
        throw std::invalid_argument("forgetting horizon must be positive with at least two samples");
    }
    const auto& sp = params.synapse;
    ProtocolResult r;
    r.name = "forget";
    r.columns = {"k", "t", "w_eff", "retention"};
    snapshot(r, params);
    r.metadata.push_back({"forget.horizon", fmt(options.horizon)});
    r.metadata.push_back({"forget.pulse_exposure", fmt(options.pulse_exposure)});
    r.metadata.push_back({"forget.spacing", fmt(options.spacing)});
    r.metadata.push_back({"forget.recall_exposure", fmt(options.recall_exposure)});

    for (std::size_t k : options.rehearsals) {
        SynapseState s = make_synapse(sp);
        for (std::size_t i = 0; i < k; ++i) {
            if (i > 0) s = passive_decay(s, options.spacing, sp);
            s = ltp_integrated(s, options.pulse_exposure, sp);
        }
        const double w0 = effective_strength(s);
        const double r_k = s.r;
        std::vector<double> ts, ret;
        double t_prev = 0.0;
        for (std::size_t j = 0; j <= options.samples; ++j) {
            const double t = options.horizon * static_cast<double>(j) / static_cast<double>(options.samples);
            s = passive_decay(s, t - t_prev, sp);
            t_prev = t;
            const double w = effective_strength(s);
            r.rows.push_back({static_cast<double>(k), t, w, w / w0});
            ts.push_back(t);
            ret.push_back(w / w0);
            if (options.recall_exposure > 0.0 && j > 0) {
                s = ltp_integrated(s, options.recall_exposure, sp);
            }
        }
        const std::string tag = std::to_string(k);
        r.summary.push_back({"persistence." + tag, r_k});
        r.summary.push_back({"half_life." + tag, std::log(2.0) / -fit_exponent(ts, ret)});
        r.summary.push_back({"half_life_predicted." + tag, decay_half_life(r_k, sp)});
    }
    return r;
}

ProtocolResult interference_protocol(const InterferenceOptions& options, const ModelParams& params)
{
    params.validate();
    options.scenario.validate();
    const auto config = single_field(options.slots, options.lines_per_slot, options.neurons);
    ProtocolResult r;
    r.name = "interfere";
    r.columns = {"overlap", "score_a", "score_b"};
    snapshot(r, params);
    r.metadata.push_back({"interfere.order", options.order == LearnOrder::AThenB ? "a-then-b" : "b-then-a"});
    r.metadata.push_back({"interfere.epochs_first", std::to_string(options.epochs_first)});
    r.metadata.push_back({"interfere.epochs_second", std::to_string(options.epochs_second)});

    const auto& sc = options.scenario;
    for (double overlap : options.overlaps) {
        if (!(overlap >= 0.0 && overlap <= 1.0)) {
            throw std::invalid_argument("overlap must lie in [0, 1]");
        }
        SplitMix64 rng(params.seed);
        const auto a = random_lines(config, rng);
        std::vector<std::size_t> order(options.slots);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            std::swap(order[i], order[i + rng.below(order.size() - i)]);
        }
        const auto shared = static_cast<std::size_t>(std::llround(overlap * static_cast<double>(options.slots)));
        auto b = a;
        for (std::size_t i = shared; i < options.slots; ++i) {
            const std::size_t s = order[i];
            b[s] = (a[s] + 1 + rng.below(options.lines_per_slot - 1)) % options.lines_per_slot;
        }

        Network net = init_network(config, params, params.seed);
        const auto& first = options.order == LearnOrder::AThenB ? a : b;
        const auto& second = options.order == LearnOrder::AThenB ? b : a;
        for (std::size_t e = 0; e < options.epochs_first; ++e) {
            learn(net, make_pattern(first, sc.input_rate, sc.duration), sc.modulation());
        }
        for (std::size_t e = 0; e < options.epochs_second; ++e) {
            learn(net, make_pattern(second, sc.input_rate, sc.duration), sc.modulation());
        }
        r.rows.push_back({overlap, pattern_score(net, a, sc), pattern_score(net, b, sc)});
    }
    return r;
}

ProtocolResult savings_protocol(const SavingsOptions& options, const ModelParams& params)
{
    params.validate();
    options.scenario.validate();
    const auto config = single_field(options.slots, options.lines_per_slot, options.neurons);
    ProtocolResult r;
    r.name = "savings";
    r.columns = {"consolidation", "initial_epochs", "decay_time", "relearn_epochs"};
    snapshot(r, params);
    r.metadata.push_back({"savings.criterion_rate", fmt(options.criterion_rate)});
    r.metadata.push_back({"savings.decay_chunk", fmt(options.decay_chunk)});
    if (options.fixed_decay) {
        r.metadata.push_back({"savings.fixed_decay", fmt(*options.fixed_decay)});
    }

    const auto& sc = options.scenario;
    for (std::size_t consolidation : options.consolidations) {
        SplitMix64 rng(params.seed);
        const auto lines = random_lines(config, rng);
        const auto pattern = make_pattern(lines, sc.input_rate, sc.duration);
        Network net = init_network(config, params, params.seed);

        auto train = [&]() {
            for (std::size_t e = 1; e <= options.max_epochs; ++e) {
                learn(net, pattern, sc.modulation());
                if (recalled(net, lines, sc, options.criterion_rate)) return e;
            }
            throw std::runtime_error("pattern did not reach the recall criterion within " +
                                     std::to_string(options.max_epochs) + " epochs");
        };

        const std::size_t initial = train();
        for (std::size_t c = 0; c < consolidation; ++c) {
            learn(net, pattern, sc.modulation());
        }
        double decayed = 0.0;
        if (options.fixed_decay) {
            decay_epoch(net, *options.fixed_decay);
            decayed = *options.fixed_decay;
        } else {
            // A pattern still recalled after the whole budget reports the
            // budget as its decay time and needs no relearning.
            for (std::size_t chunks = 0;
                 chunks < options.max_decay_chunks && recalled(net, lines, sc, options.criterion_rate); ++chunks) {
                decay_epoch(net, options.decay_chunk);
                decayed += options.decay_chunk;
            }
        }
        const std::size_t relearn = recalled(net, lines, sc, options.criterion_rate) ? 0 : train();
        r.rows.push_back({static_cast<double>(consolidation), static_cast<double>(initial), decayed,
                          static_cast<double>(relearn)});
    }
    return r;
}

namespace {

// Arithmetic in GF(q) for q prime or q = 4.
struct SmallField {
    std::size_t q;

    std::size_t add(std::size_t a, std::size_t b) const { return q == 4 ? (a ^ b) : (a + b) % q; }

    std::size_t mul(std::size_t a, std::size_t b) const
    {
        if (q != 4) return (a * b) % q;
        std::size_t r = 0;
        for (int i = 0; i < 2; ++i) {
            if (b & 1) r ^= a;
            b >>= 1;
            a <<= 1;
            if (a & 4) a ^= 7;
        }
        return r;
    }
};

bool is_small_field(std::size_t q)
{
    return q == 2 || q == 3 || q == 4 || q == 5 || q == 7 || q == 11 || q == 13;
}

}  // namespace

std::vector<std::vector<std::size_t>> distinct_patterns(const GrowthConfig& config, std::size_t count,
                                                        std::uint64_t seed)
{
    config.validate();
    const std::size_t slots = config.slot_sizes.size();
    const std::size_t fields = config.layer_fields.front();
    const std::size_t group = slots / fields;
    std::vector<std::vector<std::size_t>> out(count, std::vector<std::size_t>(slots));
    SplitMix64 rng(seed);

    for (std::size_t f = 0; f < fields; ++f) {
        const std::size_t q = config.slot_sizes[f * group];
        bool uniform = true;
        for (std::size_t s = f * group; s < (f + 1) * group; ++s) uniform = uniform && config.slot_sizes[s] == q;
        if (!uniform || !is_small_field(q) || group > q || count > q * q) {
            throw std::invalid_argument("cannot build " + std::to_string(count) +
                                        " patterns sharing at most one value per field with this slot layout");
        }
        // Each pattern is a line a + b*x over the field; two lines meet once at most.
        std::vector<std::size_t> codes(q * q);
        std::iota(codes.begin(), codes.end(), std::size_t{0});
        for (std::size_t i = 0; i + 1 < codes.size(); ++i) {
            std::swap(codes[i], codes[i + rng.below(codes.size() - i)]);
        }
        const SmallField gf{q};
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t a = codes[k] / q, b = codes[k] % q;
            for (std::size_t j = 0; j < group; ++j) {
                out[k][f * group + j] = gf.add(a, gf.mul(b, j));
            }
        }
    }
    return out;
}

std::optional<NeuronId> coding_neuron_for(const Network& net, const std::vector<std::size_t>& lines)
{
    const std::size_t top = net.layer_count();
    for (const auto& id : net.coding_neurons(top)) {
        const auto leaves = coding_tree(net, id).leaves();
        if (leaves.size() != lines.size()) continue;
        bool match = true;
        for (std::size_t x : leaves) {
            const auto [slot, offset] = net.input_slot_of(x);
            match = match && lines[slot] == offset;
        }
        if (match) return id;
    }
    return std::nullopt;
}

ProtocolResult grow_protocol(Network& net, const GrowOptions& options)
{
    options.scenario.validate();
    const auto& sc = options.scenario;
    ProtocolResult r;
    r.name = "grow";
    r.columns = {"pattern", "winner", "converged", "steps", "winner_rate", "exact", "recruited"};
    snapshot(r, net.params);
    r.metadata.push_back({"grow.patterns", std::to_string(options.patterns)});
    r.metadata.push_back({"grow.epochs", std::to_string(options.epochs)});

    const auto patterns = distinct_patterns(net.config, options.patterns, net.rng_seed);
    std::vector<std::size_t> recruited(patterns.size(), 0);
    for (std::size_t e = 0; e < options.epochs; ++e) {
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            const auto report = learn(net, make_pattern(patterns[i], sc.input_rate, sc.duration), sc.modulation());
            recruited[i] += report.recruited.size();
        }
    }
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const auto res = retrieve(net, make_pattern(patterns[i], sc.input_rate, sc.duration), sc.modulation());
        const auto lines = res.reconstruction.active_lines();
        bool exact = res.winner.has_value();
        for (std::size_t s = 0; s < lines.size(); ++s) {
            exact = exact && lines[s] && *lines[s] == patterns[i][s];
        }
        const double rate = res.winner ? res.encoding.firing_map[res.winner->layer - 1][res.winner->index] : 0.0;
        r.rows.push_back({static_cast<double>(i), res.winner ? static_cast<double>(res.winner->index) : -1.0,
                          res.encoding.converged ? 1.0 : 0.0, static_cast<double>(res.encoding.steps_used), rate,
                          exact ? 1.0 : 0.0, static_cast<double>(recruited[i])});
    }
    return r;
}

}  // namespace slotnet
