#include "slotnet/logic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace slotnet::logic {

BoolExpr BoolExpr::atom(std::string name)
{
    BoolExpr e;
    e.kind = Kind::Atom;
    e.name = std::move(name);
    return e;
}

BoolExpr BoolExpr::negate(BoolExpr operand)
{
    BoolExpr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(operand));
    return e;
}

BoolExpr BoolExpr::conj(std::vector<BoolExpr> operands)
{
    if (operands.size() < 2) {
        throw LogicError("AND needs at least two operands");
    }
    BoolExpr e;
    e.kind = Kind::And;
    e.children = std::move(operands);
    return e;
}

BoolExpr BoolExpr::disj(std::vector<BoolExpr> operands)
{
    if (operands.size() < 2) {
        throw LogicError("OR needs at least two operands");
    }
    BoolExpr e;
    e.kind = Kind::Or;
    e.children = std::move(operands);
    return e;
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + message),
      position_(position)
{
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    BoolExpr parse()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ParseError("empty expression", pos_);
        }
        BoolExpr e = parse_or();
        skip_space();
        if (pos_ < text_.size()) {
            throw ParseError(unexpected(), pos_);
        }
        return e;
    }

private:
    BoolExpr parse_or()
    {
        std::vector<BoolExpr> terms;
        terms.push_back(parse_and());
        while (accept('|')) {
            terms.push_back(parse_and());
        }
        return terms.size() == 1 ? std::move(terms.front()) : BoolExpr::disj(std::move(terms));
    }

    BoolExpr parse_and()
    {
        std::vector<BoolExpr> factors;
        factors.push_back(parse_unary());
        while (accept('&')) {
            factors.push_back(parse_unary());
        }
        return factors.size() == 1 ? std::move(factors.front()) : BoolExpr::conj(std::move(factors));
    }

    BoolExpr parse_unary()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of input", pos_);
        }
        const char c = text_[pos_];
        if (c == '!') {
            ++pos_;
            return BoolExpr::negate(parse_unary());
        }
        if (c == '(') {
            ++pos_;
            BoolExpr inner = parse_or();
            skip_space();
            if (pos_ >= text_.size()) {
                throw ParseError("missing ')'", pos_);
            }
            if (text_[pos_] != ')') {
                throw ParseError(unexpected(), pos_);
            }
            ++pos_;
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            return BoolExpr::atom(std::string(text_.substr(start, pos_ - start)));
        }
        throw ParseError(unexpected(), pos_);
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string unexpected() const
    {
        return std::string("unexpected token '") + text_[pos_] + "'";
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void render(const BoolExpr& e, std::string& out);

void render_child(const BoolExpr& child, bool parenthesize, std::string& out)
{
    if (parenthesize) {
        out += '(';
        render(child, out);
        out += ')';
    } else {
        render(child, out);
    }
}

void render(const BoolExpr& e, std::string& out)
{
    switch (e.kind) {
    case BoolExpr::Kind::Atom:
        out += e.name;
        break;
    case BoolExpr::Kind::Not: {
        const auto& c = e.children.front();
        out += '!';
        render_child(c, c.kind == BoolExpr::Kind::And || c.kind == BoolExpr::Kind::Or, out);
        break;
    }
    case BoolExpr::Kind::And:
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i > 0) out += " & ";
            const auto& c = e.children[i];
            render_child(c, c.kind == BoolExpr::Kind::And || c.kind == BoolExpr::Kind::Or, out);
        }
        break;
    case BoolExpr::Kind::Or:
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i > 0) out += " | ";
            const auto& c = e.children[i];
            render_child(c, c.kind == BoolExpr::Kind::Or, out);
        }
        break;
    }
}

void collect_atoms(const BoolExpr& e, std::set<std::string>& names)
{
    if (e.kind == BoolExpr::Kind::Atom) {
        names.insert(e.name);
        return;
    }
    for (const auto& c : e.children) {
        collect_atoms(c, names);
    }
}

using ConjunctSet = std::set<Conjunct>;

// Merges two sorted conjuncts; returns false on a contradiction.
bool merge(const Conjunct& a, const Conjunct& b, Conjunct& out)
{
    out.clear();
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].atom == out[i - 1].atom) {
            return false;
        }
    }
    return true;
}

// DNF of e (or of !e when negated), pushing negations to the atoms.
ConjunctSet dnf_of(const BoolExpr& e, bool negated)
{
    switch (e.kind) {
    case BoolExpr::Kind::Atom:
        return ConjunctSet{Conjunct{Literal{e.name, !negated}}};
    case BoolExpr::Kind::Not:
        return dnf_of(e.children.front(), !negated);
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or: {
        const bool is_and = (e.kind == BoolExpr::Kind::And) != negated;
        if (!is_and) {
            ConjunctSet result;
            for (const auto& c : e.children) {
                auto part = dnf_of(c, negated);
                result.insert(part.begin(), part.end());
            }
            return result;
        }
        ConjunctSet acc{Conjunct{}};
        Conjunct merged;
        for (const auto& c : e.children) {
            const auto part = dnf_of(c, negated);
            ConjunctSet next;
            for (const auto& left : acc) {
                for (const auto& right : part) {
                    if (merge(left, right, merged)) {
                        next.insert(merged);
                    }
                }
            }
            acc = std::move(next);
            if (acc.empty()) {
                break;
            }
        }
        return acc;
    }
    }
    return {};
}

}  // namespace

BoolExpr parse_expr(std::string_view text)
{
    return Parser(text).parse();
}

std::string to_string(const BoolExpr& expr)
{
    std::string out;
    render(expr, out);
    return out;
}

std::vector<std::string> atoms_of(const BoolExpr& expr)
{
    std::set<std::string> names;
    collect_atoms(expr, names);
    return {names.begin(), names.end()};
}

Dnf to_dnf(const BoolExpr& expr)
{
    const auto names = atoms_of(expr);
    if (names.size() > kMaxAtoms) {
        throw LogicError("expression uses " + std::to_string(names.size()) +
                         " atoms; at most " + std::to_string(kMaxAtoms) + " are supported");
    }
    const auto set = dnf_of(expr, false);
    return Dnf{{set.begin(), set.end()}, names};
}

namespace {

bool lookup(const Assignment& assignment, const std::string& atom)
{
    const auto it = assignment.find(atom);
    if (it == assignment.end()) {
        throw LogicError("assignment is missing atom '" + atom + "'");
    }
    return it->second;
}

}  // namespace

bool evaluate(const Dnf& dnf, const Assignment& assignment)
{
    for (const auto& conjunct : dnf.conjuncts) {
        bool all = true;
        for (const auto& lit : conjunct) {
            all = all && (lookup(assignment, lit.atom) == lit.positive);
        }
        if (all) {
            return true;
        }
    }
    return false;
}

SlotNetwork compile(const Dnf& dnf)
{
    std::set<std::string> names(dnf.atoms.begin(), dnf.atoms.end());
    for (const auto& conjunct : dnf.conjuncts) {
        for (const auto& lit : conjunct) {
            names.insert(lit.atom);
        }
    }
    SlotNetwork net;
    net.atoms.assign(names.begin(), names.end());
    auto slot_of = [&](const std::string& atom) {
        return static_cast<std::size_t>(
            std::lower_bound(net.atoms.begin(), net.atoms.end(), atom) - net.atoms.begin());
    };
    for (const auto& conjunct : dnf.conjuncts) {
        SlotNetwork::HiddenUnit unit;
        for (const auto& lit : conjunct) {
            unit.lines.push_back(2 * slot_of(lit.atom) + (lit.positive ? 0 : 1));
            unit.weights.push_back(1.0);
        }
        unit.threshold = unit.lines.size();
        net.hidden.push_back(std::move(unit));
    }
    return net;
}

bool eval_network(const SlotNetwork& net, const Assignment& assignment)
{
    // Each atom's slot activates exactly one of its two lines.
    std::vector<double> line_activity(net.line_count(), 0.0);
    for (std::size_t k = 0; k < net.atoms.size(); ++k) {
        const bool value = lookup(assignment, net.atoms[k]);
        line_activity[2 * k + (value ? 0 : 1)] = 1.0;
    }
    for (const auto& unit : net.hidden) {
        double input = 0.0;
        for (std::size_t i = 0; i < unit.lines.size(); ++i) {
            input += unit.weights[i] * line_activity[unit.lines[i]];
        }
        if (input >= static_cast<double>(unit.threshold)) {
            return true;
        }
    }
    return false;
}

SlotNetwork xor_network()
{
    return compile(to_dnf(parse_expr("(x1 & !x2) | (!x1 & x2)")));
}

std::string dump(const SlotNetwork& net)
{
    std::ostringstream os;
    os << "slots " << net.atoms.size() << '\n';
    for (std::size_t k = 0; k < net.atoms.size(); ++k) {
        os << "slot " << net.atoms[k] << " lines " << 2 * k << ":" << net.atoms[k] << ' '
           << 2 * k + 1 << ":!" << net.atoms[k] << '\n';
    }
    os << "hidden " << net.hidden.size() << '\n';
    for (std::size_t h = 0; h < net.hidden.size(); ++h) {
        const auto& unit = net.hidden[h];
        os << "h" << h << " threshold " << unit.threshold << " lines";
        for (std::size_t line : unit.lines) {
            os << ' ' << line;
        }
        os << " literals";
        for (std::size_t line : unit.lines) {
            os << ' ' << (line % 2 == 0 ? "" : "!") << net.atoms[line / 2];
        }
        os << '\n';
    }
    os << "output or";
    if (net.hidden.empty()) {
        os << " false";
    }
    for (std::size_t h = 0; h < net.hidden.size(); ++h) {
        os << " h" << h;
    }
    os << '\n';
    return os.str();
}

}  // namespace slotnet::logic
