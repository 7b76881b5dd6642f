#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "slotnet/csv.hpp"
#include "slotnet/experiments.hpp"
#include "support.hpp"

using namespace slotnet;

namespace {

std::vector<std::vector<double>> rows_where(const ProtocolResult& r, std::size_t column, double value)
{
    std::vector<std::vector<double>> out;
    for (const auto& row : r.rows) {
        if (row[column] == value) out.push_back(row);
    }
    return out;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("stdp window: sign by branch, magnitude falls with the interval")
{
    ModelParams p;
    const auto r = stdp_protocol({}, p);
    REQUIRE(r.rows.size() == 20);
    double prev_ltp = INFINITY, prev_ltd = INFINITY;
    for (const auto& row : r.rows) {
        const double dt = row[0], dw = row[2];
        if (dt > 0) {
            CHECK(dw > 0.0);
            CHECK(dw < prev_ltp);
            prev_ltp = dw;
        }
    }
    for (auto it = r.rows.rbegin(); it != r.rows.rend(); ++it) {
        if ((*it)[0] < 0) {
            CHECK((*it)[2] < 0.0);
            CHECK(-(*it)[2] < prev_ltd);
            prev_ltd = -(*it)[2];
        }
    }
    CHECK(-*r.summary_value("ltp_exponent") == doctest::Approx(p.neuron.c4_epsp).epsilon(0.02));
    CHECK(-*r.summary_value("ltd_exponent") == doctest::Approx(p.neuron.c6_chan).epsilon(0.02));
}

TEST_CASE("stdp window follows other time constants too")
{
    ModelParams p;
    p.neuron.c3_epsp = 2.0;
    p.neuron.c4_epsp = 0.2;
    p.neuron.c6_chan = 3.0;
    const auto r = stdp_protocol({}, p);
    CHECK(-*r.summary_value("ltp_exponent") == doctest::Approx(0.2).epsilon(0.02));
    CHECK(-*r.summary_value("ltd_exponent") == doctest::Approx(3.0).epsilon(0.02));
    StdpOptions bad;
    bad.delta_ts = {0.0};
    CHECK_THROWS_AS(stdp_protocol(bad, p), std::invalid_argument);
}

TEST_CASE("hebb limit")
{
    ModelParams p;
    HebbOptions o;
    o.f_pre = 0.0;
    for (const auto& row : hebb_protocol(o, p).rows) CHECK(row[1] == 0.0);

    o.f_pre = 0.7;
    o.f_post = 1.3;
    const double one = *hebb_protocol(o, p).summary_value("s_p_final");
    const auto& n = p.neuron;
    CHECK(one == doctest::Approx(n.c5 * n.c3_epsp / n.c4_epsp * o.w_eff * 0.7 * 1.3).epsilon(0.05));
    o.f_pre = 1.4;
    CHECK(*hebb_protocol(o, p).summary_value("s_p_final") == doctest::Approx(2 * one).epsilon(1e-9));
}

TEST_CASE("frequency sweep: silence, depression, potentiation")
{
    ModelParams p;
    const auto r = frequency_protocol({}, p);
    CHECK(r.rows.front()[0] == 0.0);
    CHECK(r.rows.front()[1] == 0.0);
    double last_neg = -1.0, first_pos = -1.0;
    for (const auto& row : r.rows) {
        CHECK(row[2] == (row[1] > 0 ? 1.0 : row[1] < 0 ? -1.0 : 0.0));
        if (row[1] < 0) last_neg = row[0];
        if (row[1] > 0 && first_pos < 0) first_pos = row[0];
    }
    REQUIRE(last_neg > 0.0);
    REQUIRE(first_pos > last_neg);
    const double cross = *r.summary_value("crossover");
    CHECK(cross > last_neg);
    CHECK(cross < first_pos);
}

TEST_CASE("forgetting curves are exponential with the persistence-set rate")
{
    ModelParams p;
    ForgettingOptions o;
    const auto r = forgetting_protocol(o, p);
    const auto k0 = rows_where(r, 0, 0.0);
    CHECK(k0.front()[1] == 0.0);
    CHECK(k0.front()[3] == 1.0);
    double prev = 0.0;
    for (std::size_t k : o.rehearsals) {
        const auto tag = std::to_string(k);
        const double r_k = *r.summary_value("persistence." + tag);
        const double rate = p.synapse.k_decay * std::abs(std::log(r_k));
        for (const auto& row : rows_where(r, 0, double(k))) {
            CHECK(row[3] == doctest::Approx(std::exp(-rate * row[1])).epsilon(1e-9));
        }
        const double h = *r.summary_value("half_life." + tag);
        CHECK(h == doctest::Approx(std::log(2.0) / rate).epsilon(1e-6));
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("interference without overlap matches isolated learning")
{
    ModelParams p;
    InterferenceOptions o;
    o.overlaps = {0.0};
    o.epochs_first = 1;
    o.epochs_second = 1;
    const auto both = interference_protocol(o, p);
    o.epochs_second = 0;
    const auto alone = interference_protocol(o, p);
    CHECK(both.rows[0][1] == doctest::Approx(alone.rows[0][1]).epsilon(0.02));
    CHECK(both.rows[0][1] > 0.0);
    CHECK(both.rows[0][2] > 0.0);
}

TEST_CASE("interference orderings")
{
    ModelParams p;
    InterferenceOptions retro;
    retro.epochs_first = 1;
    retro.epochs_second = 5;
    const auto r = interference_protocol(retro, p);
    CHECK(r.rows.back()[1] < r.rows.front()[1]);

    InterferenceOptions pro;
    const auto q = interference_protocol(pro, p);
    CHECK(q.rows.back()[2] < q.rows.front()[2]);

    InterferenceOptions bad;
    bad.overlaps = {1.5};
    CHECK_THROWS_AS(interference_protocol(bad, p), std::invalid_argument);
}

TEST_CASE("savings: relearning is faster, vanishes after pruning, grows with consolidation")
{
    ModelParams p;
    const auto base = savings_protocol({}, p);
    const auto& row = base.rows.front();
    CHECK(row[3] < row[1]);
    CHECK(row[2] > 0.0);

    SavingsOptions forever;
    forever.fixed_decay = 1e8;
    const auto gone = savings_protocol(forever, p);
    CHECK(gone.rows.front()[3] == gone.rows.front()[1]);

    SavingsOptions sweep;
    sweep.consolidations = {0, 2, 8};
    sweep.fixed_decay = row[2];
    const auto s = savings_protocol(sweep, p);
    double prev = -1.0;
    for (const auto& x : s.rows) {
        const double saved = x[1] - x[3];
        CHECK(saved >= prev);
        prev = saved;
    }
    CHECK(s.rows.back()[1] - s.rows.back()[3] > s.rows.front()[1] - s.rows.front()[3]);
}

TEST_CASE("property: distinct patterns share at most one slot per field")
{
    GrowthConfig g;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto set = distinct_patterns(g, 12, seed);
        REQUIRE(set.size() == 12);
        for (std::size_t i = 0; i < set.size(); ++i) {
            for (std::size_t j = i + 1; j < set.size(); ++j) {
                for (std::size_t f = 0; f < 4; ++f) {
                    int same = 0;
                    for (std::size_t s = 4 * f; s < 4 * f + 4; ++s) same += set[i][s] == set[j][s];
                    CHECK(same <= 1);
                }
            }
        }
    }
    CHECK_THROWS(distinct_patterns(g, 17, 1));
    GrowthConfig odd = g;
    odd.slot_sizes.assign(16, 6);
    CHECK_THROWS(distinct_patterns(odd, 3, 1));
}

TEST_CASE("grow protocol learns every pattern")
{
    ModelParams p;
    Network net = init_network(GrowthConfig{}, p, 4);
    GrowOptions o;
    o.patterns = 6;
    const auto r = grow_protocol(net, o);
    REQUIRE(r.rows.size() == 6);
    for (const auto& row : r.rows) {
        CHECK(row[2] == 1.0);
        CHECK(row[5] == 1.0);
    }
    CHECK(net.coding_neurons(2).size() == 6);
}

TEST_CASE("metadata records the parameters")
{
    ModelParams p;
    p.neuron.c6_chan = 4.5;
    const auto r = hebb_protocol({}, p);
    bool found = false;
    for (const auto& [k, v] : r.metadata) found = found || (k == "neuron.c6_chan" && v == "4.5");
    CHECK(found);
}

TEST_CASE("csv output")
{
    CHECK(format_value(0.1) == "0.1");
    CHECK(format_value(-0.0) == "0");
    CHECK(format_value(1.0 / 3.0) == "0.333333333");
    CHECK(format_value(2e-7) == "2e-07");
    ProtocolResult r;
    r.columns = {"a", "b"};
    r.rows = {{1, 2.5}, {-3, 0}};
    std::ostringstream out;
    write_csv(out, r);
    CHECK(out.str() == "a,b\n1,2.5\n-3,0\n");
}

}
