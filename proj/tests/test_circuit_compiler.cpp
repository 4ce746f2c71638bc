#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stno/circuit_compiler.hpp"

using namespace stno;

namespace {

// All assignments of the expression's variables, as (map, vector) pairs in
// dag input order.
std::vector<std::map<std::string, Digit>> assignments(const std::vector<std::string>& vars) {
    std::vector<std::map<std::string, Digit>> out;
    const std::size_t n = vars.size();
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        std::map<std::string, Digit> m;
        for (std::size_t i = 0; i < n; ++i)
            m[vars[i]] = (mask >> i) & 1 ? Digit::one : Digit::zero;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Digit> ordered_inputs(const NandDag& dag, const std::map<std::string, Digit>& m) {
    std::vector<Digit> v;
    for (const auto& name : dag.inputs) v.push_back(m.at(name));
    return v;
}

ExprPtr random_expr(oracles::Rng& rng, int depth, int nvars) {
    if (depth == 0 || rng.uniform() < 0.2) {
        if (rng.uniform() < 0.15)
            return BoolExpr::constant(rng.uniform_int(2) ? Digit::one : Digit::zero);
        return BoolExpr::var(std::string(1, static_cast<char>('a' + rng.uniform_int(nvars))));
    }
    switch (rng.uniform_int(5)) {
        case 0: return BoolExpr::unary(BoolExpr::Op::Not, random_expr(rng, depth - 1, nvars));
        case 1:
            return BoolExpr::binary(BoolExpr::Op::And, random_expr(rng, depth - 1, nvars),
                                    random_expr(rng, depth - 1, nvars));
        case 2:
            return BoolExpr::binary(BoolExpr::Op::Or, random_expr(rng, depth - 1, nvars),
                                    random_expr(rng, depth - 1, nvars));
        case 3:
            return BoolExpr::binary(BoolExpr::Op::Nand, random_expr(rng, depth - 1, nvars),
                                    random_expr(rng, depth - 1, nvars));
        default:
            return BoolExpr::binary(BoolExpr::Op::Xor, random_expr(rng, depth - 1, nvars),
                                    random_expr(rng, depth - 1, nvars));
    }
}

}  // namespace

TEST_CASE("parser precedence and associativity") {
    // | binds loosest, then ^, then & / !&, then ~.
    const ExprPtr e = parse_expr("a | b & c");
    REQUIRE(e->op == BoolExpr::Op::Or);
    CHECK(e->rhs->op == BoolExpr::Op::And);

    const ExprPtr f = parse_expr("~a ^ b | c");
    REQUIRE(f->op == BoolExpr::Op::Or);
    CHECK(f->lhs->op == BoolExpr::Op::Xor);
    CHECK(f->lhs->lhs->op == BoolExpr::Op::Not);

    const ExprPtr g = parse_expr("a ^ b ^ c");  // left-associative
    REQUIRE(g->op == BoolExpr::Op::Xor);
    CHECK(g->lhs->op == BoolExpr::Op::Xor);
    CHECK(g->rhs->op == BoolExpr::Op::Var);

    const ExprPtr h = parse_expr("a !& b & c");
    REQUIRE(h->op == BoolExpr::Op::And);
    CHECK(h->lhs->op == BoolExpr::Op::Nand);
}

TEST_CASE("parentheses, literals, and long names") {
    const ExprPtr e = parse_expr("(carry_in | x0) & 1");
    REQUIRE(e->op == BoolExpr::Op::And);
    CHECK(e->rhs->op == BoolExpr::Op::Const);
    CHECK(e->rhs->value == Digit::one);
    CHECK(variables(*e) == std::vector<std::string>{"carry_in", "x0"});
}

TEST_CASE("parse errors report a character position") {
    try {
        parse_expr("a & & b");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position == 4);
    }
    try {
        parse_expr("(a | b");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position == 6);
    }
    CHECK_THROWS_AS(parse_expr("a ! b"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("A & b"), ParseError);  // variables are lowercase
}

TEST_CASE("oracle evaluation") {
    const ExprPtr e = parse_expr("a ^ b");
    for (const auto& m : assignments({"a", "b"})) {
        const bool expect = (m.at("a") == Digit::one) != (m.at("b") == Digit::one);
        CHECK(oracle_evaluate(*e, m) == (expect ? Digit::one : Digit::zero));
    }
    CHECK_THROWS_AS(oracle_evaluate(*e, {{"a", Digit::one}}), UnboundVariableError);
}

TEST_CASE("NAND synthesis gate counts") {
    CHECK(to_nand(*parse_expr("a !& b")).gates.size() == 1);
    CHECK(to_nand(*parse_expr("~a")).gates.size() == 1);
    CHECK(to_nand(*parse_expr("a & b")).gates.size() == 2);
    CHECK(to_nand(*parse_expr("a | b")).gates.size() == 3);
    CHECK(to_nand(*parse_expr("a ^ b")).gates.size() == 4);
    CHECK(to_nand(*parse_expr("a")).gates.size() == 2);  // buffered bare input
}

TEST_CASE("common subexpressions are shared, including commuted operands") {
    CHECK(to_nand(*parse_expr("(a & b) | (a & b)")).gates.size() == 4);
    CHECK(to_nand(*parse_expr("(a & b) | (b & a)")).gates.size() == 4);
    CHECK(to_nand(*parse_expr("(a !& b) ^ (b !& a)")).gates.size() == 4);
}

TEST_CASE("synthesized DAGs agree with the boolean oracle on 200 random expressions") {
    oracles::Rng rng(20260823);
    for (int trial = 0; trial < 200; ++trial) {
        const ExprPtr e = random_expr(rng, 1 + rng.uniform_int(5), 4);
        const NandDag dag = to_nand(*e);
        for (const auto& m : assignments(variables(*e)))
            CHECK(evaluate_dag(dag, ordered_inputs(dag, m)) == oracle_evaluate(*e, m));
    }
}

TEST_CASE("netlist text") {
    CHECK(netlist(to_nand(*parse_expr("~a"))) == "g0 = a NAND a\noutput g0\n");
    const std::string nl = netlist(to_nand(*parse_expr("a & b")));
    CHECK(nl == "g0 = a NAND b\ng1 = g0 NAND g0\noutput g1\n");
}

TEST_CASE("constants survive synthesis") {
    const ExprPtr e = parse_expr("a & 1 | 0");
    const NandDag dag = to_nand(*e);
    for (const auto& m : assignments({"a"}))
        CHECK(evaluate_dag(dag, ordered_inputs(dag, m)) == oracle_evaluate(*e, m));
}

TEST_CASE("compilation produces topological levels") {
    const CircuitConfig cfg = compile(to_nand(*parse_expr("a ^ b")));
    CHECK(cfg.nodes.size() == 4);
    REQUIRE(cfg.schedule.size() == 3);
    CHECK(cfg.schedule[0].size() == 1);
    CHECK(cfg.schedule[1].size() == 2);
    CHECK(cfg.schedule[2].size() == 1);
    CHECK(cfg.output == 3);
    // Every node reference points at an earlier level.
    std::vector<int> level(cfg.nodes.size());
    for (std::size_t lv = 0; lv < cfg.schedule.size(); ++lv)
        for (int idx : cfg.schedule[lv]) level[idx] = static_cast<int>(lv);
    for (std::size_t lv = 0; lv < cfg.schedule.size(); ++lv)
        for (int idx : cfg.schedule[lv])
            for (const CircuitRef* r : {&cfg.nodes[idx].left, &cfg.nodes[idx].right})
                if (r->kind == CircuitRef::Kind::Node) CHECK(level[r->index] < static_cast<int>(lv));
}

TEST_CASE("the 3-node XOR stencil") {
    const CircuitConfig cfg = compile_xor_stencil();
    CHECK(cfg.nodes.size() == 3);
    CHECK(cfg.schedule == std::vector<std::vector<int>>{{0, 1}, {2}});
    CHECK(cfg.output == 2);
    CHECK(cfg.nodes[0].gate == GateKind::And);
    CHECK(cfg.nodes[2].gate == GateKind::Or);
}

TEST_CASE("staged simulation of the XOR stencil reproduces XOR") {
    CircuitConfig cfg = compile_xor_stencil();
    cfg.dt = 0.04;
    for (int ai = 0; ai <= 1; ++ai)
        for (int bi = 0; bi <= 1; ++bi) {
            const Digit expect = ai != bi ? Digit::one : Digit::zero;
            CHECK(evaluate_staged(cfg, {digit_from_int(ai), digit_from_int(bi)}) == expect);
        }
}

TEST_CASE("staged simulation of a compiled single NAND matches its truth table") {
    CircuitConfig cfg = compile(to_nand(*parse_expr("a !& b")));
    cfg.dt = 0.04;
    for (int ai = 0; ai <= 1; ++ai)
        for (int bi = 0; bi <= 1; ++bi) {
            const Digit expect = (ai == 1 && bi == 1) ? Digit::zero : Digit::one;
            CHECK(evaluate_staged(cfg, {digit_from_int(ai), digit_from_int(bi)}) == expect);
        }
}

TEST_CASE("coupled evaluation agrees with staged evaluation") {
    CircuitConfig cfg = compile_xor_stencil();
    cfg.dt = 0.04;
    const double t_end = 2.0 * 4.0 * cfg.carrier.period();
    for (const auto& in : {std::vector<Digit>{Digit::one, Digit::zero},
                           std::vector<Digit>{Digit::one, Digit::one}})
        CHECK(evaluate_coupled(cfg, in, t_end) == evaluate_staged(cfg, in));
}

TEST_CASE("coupled evaluation rejects windows shorter than 4 periods per stage") {
    const CircuitConfig cfg = compile_xor_stencil();
    CHECK_THROWS_AS(evaluate_coupled(cfg, {Digit::one, Digit::zero}, 5.0 * cfg.carrier.period()),
                    PreconditionError);
}

TEST_CASE("input count is validated") {
    const CircuitConfig cfg = compile_xor_stencil();
    CHECK_THROWS_AS(evaluate_staged(cfg, {Digit::one}), PreconditionError);
}
