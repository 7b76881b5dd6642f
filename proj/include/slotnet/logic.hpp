#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slotnet::logic {

struct BoolExpr {
    enum class Kind { Atom, Not, And, Or };

    Kind kind = Kind::Atom;
    std::string name;               // Atom only
    std::vector<BoolExpr> children; // Not: exactly one; And/Or: two or more

    static BoolExpr atom(std::string name);
    static BoolExpr negate(BoolExpr operand);
    static BoolExpr conj(std::vector<BoolExpr> operands);
    static BoolExpr disj(std::vector<BoolExpr> operands);

    friend bool operator==(const BoolExpr&, const BoolExpr&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class LogicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Assignment = std::map<std::string, bool>;

inline constexpr std::size_t kMaxAtoms = 16;

// Grammar: or := and ('|' and)* ; and := unary ('&' unary)* ;
// unary := '!' unary | '(' or ')' | ident ; ident := [A-Za-z_][A-Za-z0-9_]*
BoolExpr parse_expr(std::string_view text);

// Minimal-parenthesis rendering that parses back to the same tree.
std::string to_string(const BoolExpr& expr);

// Sorted, unique atom names.
std::vector<std::string> atoms_of(const BoolExpr& expr);

struct Literal {
    std::string atom;
    bool positive = true;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Conjunct = std::vector<Literal>;  // sorted, no duplicates

struct Dnf {
    std::vector<Conjunct> conjuncts;  // sorted, no duplicates, no contradictions
    std::vector<std::string> atoms;   // every atom of the source, even if eliminated

    friend bool operator==(const Dnf&, const Dnf&) = default;
};

Dnf to_dnf(const BoolExpr& expr);

bool evaluate(const Dnf& dnf, const Assignment& assignment);

// One binary attribute slot per atom: line 2k carries atom k, line 2k+1 its
// negation. Each hidden unit fires when at least `threshold` of its lines are
// active; the output is the OR of the hidden units.
struct SlotNetwork {
    struct HiddenUnit {
        std::vector<std::size_t> lines;
        std::vector<double> weights;
        std::size_t threshold = 0;
    };

    std::vector<std::string> atoms;
    std::vector<HiddenUnit> hidden;

    std::size_t line_count() const { return 2 * atoms.size(); }
    std::size_t hidden_layers() const { return 1; }
    bool constant_false() const { return hidden.empty(); }
};

SlotNetwork compile(const Dnf& dnf);

bool eval_network(const SlotNetwork& net, const Assignment& assignment);

SlotNetwork xor_network();

// Text listing: slots, hidden units with thresholds and literal lines, output.
std::string dump(const SlotNetwork& net);

}  // namespace slotnet::logic
