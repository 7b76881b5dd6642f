#pragma once

// Generators and reference evaluators shared by the unit and acceptance tests.
// They use std::mt19937_64 so they stay independent of the library's own RNG.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace slotnet::testing {

// Tiny boolean tree kept separate from logic::BoolExpr so that it can act
// as an oracle for the parser, the DNF conversion and the compiler.
struct RefExpr {
    enum class Op { Var, Not, And, Or } op = Op::Var;
    std::string var;
    std::vector<RefExpr> kids;

    bool eval(const std::map<std::string, bool>& env) const
    {
        switch (op) {
        case Op::Var:
            return env.at(var);
        case Op::Not:
            return !kids[0].eval(env);
        case Op::And:
            for (const auto& k : kids) {
                if (!k.eval(env)) return false;
            }
            return true;
        case Op::Or:
            for (const auto& k : kids) {
                if (k.eval(env)) return true;
            }
            return false;
        }
        return false;
    }

    // Fully parenthesized, so the rendering never depends on precedence.
    std::string text() const
    {
        switch (op) {
        case Op::Var:
            return var;
        case Op::Not:
            return "!" + kids[0].text();
        case Op::And:
        case Op::Or: {
            std::string s = "(";
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (i) s += op == Op::And ? " & " : " | ";
                s += kids[i].text();
            }
            return s + ")";
        }
        }
        return {};
    }
};

inline RefExpr random_expr(std::mt19937_64& rng, std::size_t atoms, int depth)
{
    std::uniform_int_distribution<int> pick(0, 3);
    const int choice = depth <= 0 ? 0 : pick(rng);
    RefExpr e;
    if (choice == 0) {
        e.var = "v" + std::to_string(std::uniform_int_distribution<std::size_t>(0, atoms - 1)(rng));
        return e;
    }
    if (choice == 1) {
        e.op = RefExpr::Op::Not;
        e.kids.push_back(random_expr(rng, atoms, depth - 1));
        return e;
    }
    e.op = choice == 2 ? RefExpr::Op::And : RefExpr::Op::Or;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        e.kids.push_back(random_expr(rng, atoms, depth - 1));
    }
    return e;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double rel_err(double got, double want)
{
    return std::abs(got - want) / std::abs(want);
}

}  // namespace slotnet::testing
