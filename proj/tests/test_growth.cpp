#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "slotnet/experiments.hpp"
#include "slotnet/growth.hpp"
#include "slotnet/numerics.hpp"
#include "support.hpp"

using namespace slotnet;

namespace {

// Eight slots of four lines feeding one layer of sixteen neurons.
GrowthConfig flat_config()
{
    GrowthConfig g;
    g.slot_sizes.assign(8, 4);
    g.layer_sizes = {16};
    g.layer_fields = {1};
    g.d_max = 8;
    return g;
}

const GrowthScenario kScenario{0.7, 0.025, 1.0, 30.0};

InputPattern pattern(const std::vector<std::size_t>& lines, const GrowthScenario& sc = kScenario)
{
    return make_pattern(lines, sc.input_rate, sc.duration);
}

std::vector<std::size_t> lines_of(const Network& net, NeuronId id)
{
    std::vector<std::size_t> out;
    for (const auto& d : net.neuron(id).dendrites) {
        if (d.synapse.alive) out.push_back(d.line);
    }
    return out;
}

bool same_state(const Network& a, const Network& b)
{
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].size() != b.layers[l].size()) return false;
        for (std::size_t i = 0; i < a.layers[l].size(); ++i) {
            const auto& x = a.layers[l][i];
            const auto& y = b.layers[l][i];
            if (x.status != y.status || x.field != y.field || x.dendrites.size() != y.dendrites.size()) return false;
            for (std::size_t j = 0; j < x.dendrites.size(); ++j) {
                const auto& s = x.dendrites[j].synapse;
                const auto& t = y.dendrites[j].synapse;
                if (x.dendrites[j].line != y.dendrites[j].line || s.w != t.w || s.r != t.r || s.w_d != t.w_d ||
                    s.r_d != t.r_d || s.alive != t.alive) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("growth") {

TEST_CASE("configuration checks")
{
    CHECK_NOTHROW(GrowthConfig{}.validate());
    GrowthConfig g = flat_config();
    g.layer_fields = {3};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = flat_config();
    g.layer_sizes = {16, 4};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = flat_config();
    g.d_max = 40;
    CHECK_THROWS_AS(init_network(g, {}, 1), ConfigError);
}

TEST_CASE("layout helpers")
{
    const Network net = init_network(GrowthConfig{}, {}, 1);
    CHECK(net.input_line_count() == 64);
    CHECK(net.slot_count(0) == 16);
    CHECK(net.slot_count(1) == 4);
    CHECK(net.slot_count(2) == 1);
    CHECK(net.input_slot_of(13) == std::pair<std::size_t, std::size_t>{3, 1});
    CHECK(net.input_line(3, 1) == 13);
    CHECK(net.field_lines(1, 1).size() == 16);
    CHECK(net.child_slots(1, 2) == std::pair<std::size_t, std::size_t>{8, 12});
    CHECK(net.free_pool(1) == 64);
    CHECK(net.neuron({1, 5}).field == 1);
}

TEST_CASE("init_network is reproducible and respects d_max")
{
    const auto g = flat_config();
    CHECK(same_state(init_network(g, {}, 9), init_network(g, {}, 9)));
    CHECK_FALSE(same_state(init_network(g, {}, 9), init_network(g, {}, 10)));

    GrowthConfig full = g;
    full.slot_sizes.assign(2, 4);
    full.d_max = 8;
    const Network net = init_network(full, {}, 3);
    for (const auto& n : net.layers[0]) {
        CHECK(n.dendrites.size() == 8);
        CHECK(n.status == NeuronStatus::Free);
    }
}

TEST_CASE("random attachment is uniform over lines")
{
    GrowthConfig g;
    g.slot_sizes = {4, 4};
    g.layer_sizes = {1};
    g.layer_fields = {1};
    g.d_max = 2;
    const std::size_t draws = 1000;
    std::vector<double> count(8, 0.0);
    for (std::size_t seed = 0; seed < draws; ++seed) {
        const Network net = init_network(g, {}, seed);
        for (const auto& d : net.layers[0][0].dendrites) count[d.line] += 1.0;
    }
    // Each line is picked with p = 2/8; counts stay within 3 sigma of the mean.
    const double mean = draws * 0.25;
    const double sigma = std::sqrt(draws * 0.25 * 0.75);
    double chi2 = 0.0;
    for (double c : count) {
        CHECK(std::abs(c - mean) < 3 * sigma);
        chi2 += (c - mean) * (c - mean) / mean;
    }
    CHECK(chi2 < 24.3);  // 7 degrees of freedom, p = 0.001
}

TEST_CASE("present is pure and handles empty input")
{
    Network net = init_network(flat_config(), {}, 2);
    InputPattern silent = pattern({0, 0, 0, 0, 0, 0, 0, 0});
    for (auto& s : silent.slots) s.frequency = 0.0;
    const auto e = present(net, silent);
    CHECK(e.converged);
    CHECK_FALSE(e.winners[0]);

    const auto a = pattern({0, 1, 2, 3, 0, 1, 2, 3});
    learn(net, a, kScenario.modulation());
    const auto snapshot = net;
    const auto r1 = present(net, a, kScenario.modulation());
    const auto r2 = present(net, a, kScenario.modulation());
    CHECK(r1.firing_map == r2.firing_map);
    CHECK(r1.winners == r2.winners);
    CHECK(r1.steps_used == r2.steps_used);
    CHECK(same_state(net, snapshot));
}

TEST_CASE("learning recruits a free neuron that then wins on its pattern")
{
    Network net = init_network(flat_config(), {}, 2);
    const std::vector<std::size_t> a{0, 1, 2, 3, 0, 1, 2, 3};
    const auto report = learn(net, pattern(a), kScenario.modulation());
    REQUIRE(report.recruited.size() == 1);
    const NeuronId coder = report.recruited[0];
    CHECK(net.neuron(coder).status == NeuronStatus::Coding);
    CHECK(net.free_pool(1) == 15);
    const auto e = present(net, pattern(a), kScenario.modulation());
    REQUIRE(e.winners[0]);
    CHECK(*e.winners[0] == coder);
    CHECK(e.converged);
}

TEST_CASE("a similar pattern merges, a novel one recruits")
{
    Network net = init_network(flat_config(), {}, 4);
    const std::vector<std::size_t> a{0, 1, 2, 3, 0, 1, 2, 3};
    for (int k = 0; k < 3; ++k) learn(net, pattern(a), kScenario.modulation());
    REQUIRE(net.coding_neurons(1).size() == 1);
    const NeuronId coder = net.coding_neurons(1)[0];

    std::vector<std::size_t> near = a;
    near[5] = 3;  // one slot of eight differs
    const auto merged = learn(net, pattern(near), kScenario.modulation());
    CHECK(merged.recruited.empty());
    REQUIRE(merged.winners[0]);
    CHECK(*merged.winners[0] == coder);

    const std::vector<std::size_t> novel{3, 2, 1, 0, 3, 2, 1, 0};
    const auto fresh = learn(net, pattern(novel), kScenario.modulation());
    CHECK(fresh.recruited.size() == 1);
    CHECK(net.coding_neurons(1).size() == 2);
}

TEST_CASE("rehearsal speeds up convergence")
{
    Network net = init_network(flat_config(), {}, 6);
    const auto a = pattern({1, 1, 1, 1, 2, 2, 2, 2});
    // Two neighbours that share two slots each compete with the coder.
    learn(net, pattern({1, 1, 0, 0, 0, 0, 0, 0}), kScenario.modulation());
    learn(net, pattern({3, 3, 3, 3, 2, 2, 3, 3}), kScenario.modulation());
    learn(net, a, kScenario.modulation());
    const auto once = present(net, a, kScenario.modulation());
    for (int k = 1; k < 50; ++k) learn(net, a, kScenario.modulation());
    const auto many = present(net, a, kScenario.modulation());
    CHECK(once.converged);
    CHECK(many.converged);
    CHECK(many.steps_used < once.steps_used);
}

TEST_CASE("retrieval round-trips, generalizes and reports unknown input")
{
    GrowthConfig g = flat_config();
    g.layer_sizes = {2};
    Network net = init_network(g, {}, 8);
    const std::vector<std::size_t> a{0, 1, 2, 3, 3, 2, 1, 0};
    learn(net, pattern(a), kScenario.modulation());
    const auto r = retrieve(net, pattern(a), kScenario.modulation());
    REQUIRE(r.winner);
    const auto back = r.reconstruction.active_lines();
    for (std::size_t s = 0; s < a.size(); ++s) CHECK(back[s] == a[s]);

    for (std::size_t s = 0; s < a.size(); ++s) {
        auto degraded = pattern(a);
        degraded.slots[s].frequency = 0.0;
        CHECK(retrieve(net, degraded, kScenario.modulation()).winner == r.winner);
    }

    learn(net, pattern({1, 1, 1, 1, 1, 1, 1, 1}), kScenario.modulation());
    CHECK(net.free_pool(1) == 0);
    const auto full = learn(net, pattern({2, 3, 0, 1, 0, 1, 2, 3}), kScenario.modulation());
    CHECK(full.capacity_exhausted);
    const auto unknown = retrieve(net, pattern({2, 3, 0, 1, 0, 1, 2, 3}), kScenario.modulation());
    if (unknown.winner) {
        CHECK(unknown.reconstruction.active_lines() != pattern({2, 3, 0, 1, 0, 1, 2, 3}).active_lines());
    }
}

TEST_CASE("coding trees")
{
    Network flat = init_network(flat_config(), {}, 2);
    const std::vector<std::size_t> a{0, 1, 2, 3, 0, 1, 2, 3};
    const auto report = learn(flat, pattern(a), kScenario.modulation());
    const auto tree = coding_tree(flat, report.recruited[0]);
    CHECK(tree.layer == 1);
    CHECK(tree.children.size() == a.size());
    for (const auto& c : tree.children) {
        CHECK(c.layer == 0);
        CHECK(c.children.empty());
        CHECK(c.strength > 0.0);
    }
    std::vector<std::size_t> want;
    for (std::size_t s = 0; s < a.size(); ++s) want.push_back(flat.input_line(s, a[s]));
    auto leaves = tree.leaves();
    std::sort(leaves.begin(), leaves.end());
    CHECK(leaves == want);
    CHECK_THROWS_AS(coding_tree(flat, {1, 15}), std::invalid_argument);

    // Two patterns that agree on the first receptive field share its node.
    ModelParams p;
    Network deep = init_network(GrowthConfig{}, p, 1);
    const GrowthScenario sc;
    std::vector<std::size_t> x(16, 0), y(16, 0);
    for (std::size_t s = 4; s < 16; ++s) {
        x[s] = 1;
        y[s] = 2;
    }
    learn(deep, pattern(x, sc), sc.modulation());
    learn(deep, pattern(y, sc), sc.modulation());
    const auto tops = deep.coding_neurons(2);
    REQUIRE(tops.size() == 2);
    const auto tx = coding_tree(deep, tops[0]);
    const auto ty = coding_tree(deep, tops[1]);
    REQUIRE(tx.children.size() == 4);
    CHECK(tx.children[0].index == ty.children[0].index);
    CHECK(tx.children[1].index != ty.children[1].index);
}

TEST_CASE("decay epochs")
{
    Network net = init_network(flat_config(), {}, 2);
    const std::vector<std::size_t> weak{0, 0, 0, 0, 0, 0, 0, 0};
    const std::vector<std::size_t> strong{1, 1, 1, 1, 1, 1, 1, 1};
    learn(net, pattern(weak), kScenario.modulation());
    for (int k = 0; k < 20; ++k) learn(net, pattern(strong), kScenario.modulation());
    const auto before = net;
    decay_epoch(net, 0.0);
    CHECK(same_state(net, before));
    CHECK_THROWS_AS(decay_epoch(net, -1.0), NumericDomainError);

    // Longer than the weak pattern's time to prune, well short of the strong one's.
    const NeuronId weak_id = *retrieve(net, pattern(weak), kScenario.modulation()).winner;
    double r_weak = 1.0;
    for (const auto& d : net.neuron(weak_id).dendrites) r_weak = std::min(r_weak, d.synapse.r);
    const auto& sp = net.params.synapse;
    decay_epoch(net, 1.5 * std::log(1.0 / sp.w_prune) / (sp.k_decay * std::abs(std::log(r_weak))));
    CHECK(retrieve(net, pattern(weak), kScenario.modulation()).winner != weak_id);
    const auto s = retrieve(net, pattern(strong), kScenario.modulation());
    REQUIRE(s.winner);
    CHECK(lines_of(net, *s.winner).size() == strong.size());
}

TEST_CASE("shared lower-layer synapses outlive the root synapses")
{
    Network net = init_network(GrowthConfig{}, {}, 1);
    const GrowthScenario sc;
    // The first receptive field sees the same sub-pattern in every pattern.
    const auto set = distinct_patterns(net.config, 6, 3);
    for (auto lines : set) {
        std::fill(lines.begin(), lines.begin() + 4, 0);
        learn(net, pattern(lines, sc), sc.modulation());
    }
    const auto tops = net.coding_neurons(2);
    REQUIRE(tops.size() >= 2);
    const auto tree = coding_tree(net, tops[0]);
    const auto shared = tree.children[0];
    double shared_r = 1.0;
    for (const auto& d : net.neuron({1, std::uint32_t(shared.index)}).dendrites) {
        if (d.synapse.alive) shared_r = std::min(shared_r, d.synapse.r);
    }
    double root_r = 0.0;
    for (const auto& d : net.neuron(tops[0]).dendrites) {
        if (d.synapse.alive) root_r = std::max(root_r, d.synapse.r);
    }
    CHECK(shared_r > root_r);
    CHECK(decay_half_life(shared_r, net.params.synapse) > decay_half_life(root_r, net.params.synapse));
}

TEST_CASE("supervised bias")
{
    Network net = init_network(flat_config(), {}, 2);
    const auto a = pattern({0, 0, 0, 0, 0, 0, 0, 0});
    const auto b = pattern({1, 1, 1, 1, 1, 1, 1, 1});
    learn(net, a, kScenario.modulation());
    learn(net, b, kScenario.modulation());
    const NeuronId na = *present(net, a, kScenario.modulation()).winners[0];
    const NeuronId nb = *present(net, b, kScenario.modulation()).winners[0];
    REQUIRE(na != nb);

    const auto plain = present(net, a, kScenario.modulation());
    supervised_bias(net, {nb}, 0.0);
    CHECK(present(net, a, kScenario.modulation()).firing_map == plain.firing_map);

    supervised_bias(net, {nb}, 5.0);
    CHECK(*present(net, a, kScenario.modulation()).winners[0] == nb);
    clear_bias(net);
    CHECK(*present(net, a, kScenario.modulation()).winners[0] == na);
}

TEST_CASE("association by supervised bias")
{
    // Slots 0-3 carry a picture, slots 4-7 a word.
    Network net = init_network(flat_config(), {}, 5);
    auto word = pattern({0, 0, 0, 0, 2, 3, 1, 0});
    for (std::size_t s = 0; s < 4; ++s) word.slots[s].frequency = 0.0;
    auto picture = pattern({3, 1, 2, 0, 0, 0, 0, 0});
    for (std::size_t s = 4; s < 8; ++s) picture.slots[s].frequency = 0.0;

    learn(net, word, kScenario.modulation());
    const NeuronId word_neuron = *present(net, word, kScenario.modulation()).winners[0];
    supervised_bias(net, {word_neuron}, 2.0);
    for (int k = 0; k < 5; ++k) learn(net, picture, kScenario.modulation());
    clear_bias(net);
    const auto e = present(net, picture, kScenario.modulation());
    REQUIRE(e.winners[0]);
    CHECK(*e.winners[0] == word_neuron);
}

TEST_CASE("killed neurons leave the network for good")
{
    Network net = init_network(flat_config(), {}, 2);
    learn(net, pattern({0, 1, 2, 3, 0, 1, 2, 3}), kScenario.modulation());
    const NeuronId id = net.coding_neurons(1)[0];
    kill_neuron(net, id);
    CHECK(net.neuron(id).status == NeuronStatus::Dead);
    CHECK(net.coding_neurons(1).empty());
    const auto e = present(net, pattern({0, 1, 2, 3, 0, 1, 2, 3}), kScenario.modulation());
    CHECK(e.firing_map[0][id.index] == 0.0);
}

TEST_CASE("property: orthogonal patterns never share a winner")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        Network net = init_network(flat_config(), {}, rng());
        std::vector<std::size_t> a(8), b(8);
        for (std::size_t s = 0; s < 8; ++s) {
            a[s] = rng() % 4;
            b[s] = (a[s] + 1 + rng() % 3) % 4;
        }
        learn(net, pattern(a), kScenario.modulation());
        learn(net, pattern(b), kScenario.modulation());
        const auto ea = present(net, pattern(a), kScenario.modulation());
        const auto eb = present(net, pattern(b), kScenario.modulation());
        REQUIRE(ea.winners[0]);
        REQUIRE(eb.winners[0]);
        CHECK(*ea.winners[0] != *eb.winners[0]);
    }
}

TEST_CASE("property: at most one active neuron per slot after convergence")
{
    Network net = init_network(GrowthConfig{}, {}, 9);
    GrowOptions o;
    o.patterns = 6;
    grow_protocol(net, o);
    const double eps = net.params.competition.eps_silent;
    for (const auto& lines : distinct_patterns(net.config, 6, net.rng_seed)) {
        const auto e = present(net, make_pattern(lines, o.scenario.input_rate, o.scenario.duration),
                               o.scenario.modulation());
        REQUIRE(e.converged);
        // A neuron counts as active when it fires above the slot tolerance used for convergence.
        for (std::size_t l = 1; l <= net.layer_count(); ++l) {
            const auto& rates = e.firing_map[l - 1];
            std::vector<double> peak(net.slot_count(l), 0.0);
            for (std::size_t i = 0; i < rates.size(); ++i) {
                peak[net.slot_of_line(l, i)] = std::max(peak[net.slot_of_line(l, i)], rates[i]);
            }
            std::size_t active = 0;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                active += rates[i] >= std::max(eps, net.config.slot_rel_eps * peak[net.slot_of_line(l, i)]);
            }
            CHECK(active <= net.slot_count(l));
        }
    }
}

TEST_CASE("winner assignments settle during long training")
{
    Network net = init_network(flat_config(), {}, 17);
    const std::vector<std::vector<std::size_t>> set{
        {0, 0, 0, 0, 1, 1, 1, 1}, {1, 1, 1, 1, 2, 2, 2, 2}, {2, 2, 3, 3, 0, 0, 1, 1}, {3, 2, 1, 0, 3, 2, 1, 0}};
    std::vector<std::optional<NeuronId>> last(set.size());
    std::vector<double> changes;
    for (int epoch = 0; epoch < 100; ++epoch) {
        int changed = 0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto w = learn(net, pattern(set[i]), kScenario.modulation()).winners[0];
            changed += w != last[i];
            last[i] = w;
        }
        changes.push_back(changed);
    }
    std::vector<double> smooth;
    for (std::size_t e = 20; e + 2 < changes.size(); ++e) {
        smooth.push_back((changes[e] + changes[e + 1] + changes[e + 2]) / 3.0);
    }
    for (std::size_t i = 1; i < smooth.size(); ++i) CHECK(smooth[i] <= smooth[i - 1]);
}

TEST_CASE("a dead coder's place is taken by the most similar neuron")
{
    Network net = init_network(flat_config(), {}, 21);
    const std::vector<std::size_t> a{0, 1, 2, 3, 0, 1, 2, 3};
    const std::vector<std::size_t> near{0, 1, 0, 1, 1, 2, 3, 0};
    const std::vector<std::size_t> far{3, 3, 3, 1, 2, 3, 0, 1};
    learn(net, pattern(a), kScenario.modulation());
    learn(net, pattern(near), kScenario.modulation());
    learn(net, pattern(far), kScenario.modulation());
    REQUIRE(net.coding_neurons(1).size() == 3);
    const auto before = present(net, pattern(a), kScenario.modulation());
    const NeuronId coder = *before.winners[0];
    const NeuronId second = *present(net, pattern(near), kScenario.modulation()).winners[0];
    const double full = retrieval_score(net, before, coder);

    kill_neuron(net, coder);
    const auto after = present(net, pattern(a), kScenario.modulation());
    REQUIRE(after.winners[0]);
    CHECK(*after.winners[0] == second);
    const double partial = retrieval_score(net, after, second);
    CHECK(partial > 0.0);
    CHECK(partial < full);
}

TEST_CASE("property: branch groups hold exactly the live synapses")
{
    std::mt19937_64 rng(13);
    Network net = init_network(GrowthConfig{}, {}, 1);
    const GrowthScenario sc;
    for (int k = 0; k < 6; ++k) {
        std::vector<std::size_t> lines(16);
        for (auto& x : lines) x = rng() % 4;
        learn(net, pattern(lines, sc), sc.modulation());
    }
    const auto groups = branch_groups(net);
    for (std::size_t l = 0; l < groups.size(); ++l) {
        std::size_t members = 0, live = 0;
        for (const auto& g : groups[l]) {
            for (const auto& m : g.members) {
                const auto& d = net.layers[l][m.neuron].dendrites[m.dendrite];
                CHECK(d.line == g.source);
                CHECK(d.synapse.alive);
                ++members;
            }
        }
        for (const auto& n : net.layers[l]) {
            for (const auto& d : n.dendrites) live += d.synapse.alive;
        }
        CHECK(members == live);
    }
}

TEST_CASE("retrieval score")
{
    Network net = init_network(flat_config(), {}, 2);
    const auto a = pattern({0, 1, 2, 3, 0, 1, 2, 3});
    learn(net, a, kScenario.modulation());
    const NeuronId coder = net.coding_neurons(1)[0];
    const auto e = present(net, a, kScenario.modulation());
    const double score = retrieval_score(net, e, coder);
    CHECK(score > 0.0);
    CHECK(score <= 1.0);
    CHECK(score == doctest::Approx(e.firing_map[0][coder.index] / (net.params.neuron.c1 / net.params.neuron.c0))
                       .epsilon(0.05));
    CHECK(retrieval_score(net, e, {1, coder.index == 0 ? 1u : 0u}) == 0.0);
}

}
