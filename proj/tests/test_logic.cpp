#include <random>

#include "doctest.h"
#include "slotnet/logic.hpp"
#include "support.hpp"

using namespace slotnet::logic;
using slotnet::testing::RefExpr;

namespace {

Assignment assignment_for(const std::vector<std::string>& atoms, std::size_t bits)
{
    Assignment a;
    for (std::size_t k = 0; k < atoms.size(); ++k) a[atoms[k]] = (bits >> k) & 1U;
    return a;
}

}  // namespace

TEST_SUITE("logic") {

TEST_CASE("parsing follows precedence")
{
    CHECK(parse_expr("a") == BoolExpr::atom("a"));
    const auto e = parse_expr("a & !b | c");
    const auto want = BoolExpr::disj({BoolExpr::conj({BoolExpr::atom("a"), BoolExpr::negate(BoolExpr::atom("b"))}),
                                      BoolExpr::atom("c")});
    CHECK(e == want);
    CHECK(atoms_of(e) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("syntax errors carry a position")
{
    try {
        parse_expr("a &");
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.position() == 3);
    }
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("(a | b"), ParseError);
    CHECK_THROWS_AS(parse_expr("a b"), ParseError);
    CHECK_THROWS_AS(parse_expr("a # b"), ParseError);
}

TEST_CASE("to_string round-trips")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto e = parse_expr(slotnet::testing::random_expr(rng, 5, 4).text());
        CHECK(parse_expr(to_string(e)) == e);
    }
}

TEST_CASE("DNF of small expressions")
{
    const auto atom = to_dnf(parse_expr("a"));
    REQUIRE(atom.conjuncts.size() == 1);
    CHECK(atom.conjuncts[0] == Conjunct{{"a", true}});

    const auto x = to_dnf(parse_expr("(a & !b) | (!a & b)"));
    CHECK(x.conjuncts.size() == 2);

    const auto nor = to_dnf(parse_expr("!(a | b)"));
    REQUIRE(nor.conjuncts.size() == 1);
    CHECK(nor.conjuncts[0] == Conjunct{{"a", false}, {"b", false}});

    const auto never = to_dnf(parse_expr("a & !a"));
    CHECK(never.conjuncts.empty());
    CHECK(never.atoms == std::vector<std::string>{"a"});
}

TEST_CASE("property: DNF and compiled network agree with the reference tree")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        const RefExpr ref = slotnet::testing::random_expr(rng, 1 + rng() % 6, 4);
        const auto dnf = to_dnf(parse_expr(ref.text()));
        for (const auto& c : dnf.conjuncts) {
            CHECK(std::is_sorted(c.begin(), c.end()));
            for (std::size_t k = 1; k < c.size(); ++k) CHECK(c[k - 1].atom != c[k].atom);
        }
        const auto net = compile(dnf);
        CHECK(net.hidden_layers() == 1);
        for (std::size_t bits = 0; bits < (std::size_t{1} << net.atoms.size()); ++bits) {
            const auto a = assignment_for(net.atoms, bits);
            const bool want = ref.eval(a);
            CHECK(evaluate(dnf, a) == want);
            CHECK(eval_network(net, a) == want);
        }
    }
}

TEST_CASE("compiled topology")
{
    const auto single = compile(to_dnf(parse_expr("a")));
    REQUIRE(single.hidden.size() == 1);
    CHECK(single.hidden[0].threshold == 1);

    const auto x = compile(to_dnf(parse_expr("(a & !b) | (!a & b)")));
    REQUIRE(x.hidden.size() == 2);
    for (const auto& h : x.hidden) CHECK(h.threshold == 2);

    const auto either = compile(to_dnf(parse_expr("a | b")));
    REQUIRE(either.hidden.size() == 2);
    for (const auto& h : either.hidden) CHECK(h.threshold == 1);
}

TEST_CASE("XOR network is exact, single-layer and excitatory")
{
    const auto x = xor_network();
    CHECK(eval_network(x, {{"x1", true}, {"x2", false}}));
    CHECK_FALSE(eval_network(x, {{"x1", true}, {"x2", true}}));
    CHECK_FALSE(eval_network(x, {{"x1", false}, {"x2", false}}));
    CHECK(eval_network(x, {{"x1", false}, {"x2", true}}));
    CHECK(x.hidden_layers() == 1);
    for (const auto& h : x.hidden) {
        for (double w : h.weights) CHECK(w > 0.0);
    }
}

TEST_CASE("constant-false network and bad assignments")
{
    const auto net = compile(to_dnf(parse_expr("a & !a")));
    CHECK(net.constant_false());
    CHECK_FALSE(eval_network(net, {{"a", true}}));
    CHECK_FALSE(eval_network(net, {{"a", false}}));
    CHECK_THROWS_AS(eval_network(compile(to_dnf(parse_expr("a & b"))), {{"a", true}}), LogicError);
}

TEST_CASE("too many atoms are rejected")
{
    std::string text = "v0";
    for (int i = 1; i <= 16; ++i) text += " | v" + std::to_string(i);
    CHECK_THROWS_AS(compile(to_dnf(parse_expr(text))), LogicError);
}

TEST_CASE("dump lists the structure")
{
    const auto text = dump(xor_network());
    CHECK(text.find("hidden 2") != std::string::npos);
    CHECK(text.find("threshold 2") != std::string::npos);
}

}
