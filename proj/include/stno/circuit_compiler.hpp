#ifndef STNO_CIRCUIT_COMPILER_HPP
#define STNO_CIRCUIT_COMPILER_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "stno/stno_network.hpp"

namespace stno {

// ---------------------------------------------------------------------------
// Boolean expressions

struct BoolExpr;
using ExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
    enum class Op { Var, Const, Not, And, Or, Nand, Xor };

    Op op;
    std::string name;     // Var
    Digit value{};        // Const
    ExprPtr lhs, rhs;     // Not uses lhs only

    static ExprPtr var(std::string n);
    static ExprPtr constant(Digit d);
    static ExprPtr unary(Op op, ExprPtr e);
    static ExprPtr binary(Op op, ExprPtr l, ExprPtr r);
};

/// Grammar: variables [a-z][a-z0-9_]*, literals 0/1, operators ~ & !& ^ |
/// with precedence ~ > & (!& at & level) > ^ > |, left-associative,
/// parentheses.  Throws ParseError with a 0-based character position.
ExprPtr parse_expr(std::string_view text);

/// Variable names referenced by the expression, sorted.
std::vector<std::string> variables(const BoolExpr& expr);

/// Direct recursive boolean evaluation; the ground truth for every other
/// evaluation path.
Digit oracle_evaluate(const BoolExpr& expr, const std::map<std::string, Digit>& inputs);

// ---------------------------------------------------------------------------
// NAND synthesis

struct NandRef {
    enum class Kind { Input, Gate, Const };
    Kind kind = Kind::Input;
    int index = 0;   // input or gate index
    Digit value{};   // Const

    static NandRef input(int i) { return {Kind::Input, i, Digit::zero}; }
    static NandRef gate(int g) { return {Kind::Gate, g, Digit::zero}; }
    static NandRef constant(Digit d) { return {Kind::Const, 0, d}; }
};

struct NandGate {
    NandRef left, right;
};

struct NandDag {
    std::vector<std::string> inputs;
    std::vector<NandGate> gates;  // topologically ordered
    int output = -1;              // gate index
};

/// Rewrites the expression into NAND-only gates with common-subexpression
/// sharing (NOT x -> x nand x, AND -> double-negated NAND, OR by De Morgan,
/// XOR via the 4-gate identity).
NandDag to_nand(const BoolExpr& expr);

/// Analytic evaluation of the DAG; inputs ordered as dag.inputs.
Digit evaluate_dag(const NandDag& dag, const std::vector<Digit>& inputs);

/// Text netlist: one "g<i> = <ref> NAND <ref>" line per gate plus
/// "output g<k>".
std::string netlist(const NandDag& dag);

// ---------------------------------------------------------------------------
// STNO circuit configurations

struct CircuitRef {
    enum class Kind { Input, NegatedInput, Node, Const };
    Kind kind = Kind::Input;
    int index = 0;
    Digit value{};
};

struct CircuitNode {
    GateKind gate = GateKind::Nand;
    CircuitRef left, right;
};

struct CircuitConfig {
    std::vector<std::string> input_names;
    std::vector<CircuitNode> nodes;          // one STNO per node
    std::vector<std::vector<int>> schedule;  // topological levels
    int output = -1;

    StnoParams params;
    CarrierSpec carrier;
    double gain = kDefaultGain;
    double tau = 800.0;  // 2 carrier periods at the default carrier
    double dt = kDefaultDt;
};

/// One STNO node per NAND gate; schedule = topological levels of the DAG.
CircuitConfig compile(const NandDag& dag, const StnoParams& params = {},
                      const CarrierSpec& carrier = {}, double gain = kDefaultGain,
                      double tau = 800.0);

/// The 3-node XOR stencil: C1 = p L_and(-A, B), C2 = p L_and(A, -B),
/// C3 = p L_or(sign(v1), sign(v2)).
CircuitConfig compile_xor_stencil(const StnoParams& params = {}, const CarrierSpec& carrier = {},
                                double gain = kDefaultGain, double tau = 800.0);

/// Runs the schedule stage by stage: each node simulates 3 carrier periods
/// with upstream digits frozen, decoded by correlation readout.
Digit evaluate_staged(const CircuitConfig& config, const std::vector<Digit>& inputs);

/// Integrates all nodes simultaneously; unsettled upstream references give
/// zero forcing until |v| exceeds the sign tolerance.  Returns
/// sign(v_output) at t_end.
Digit evaluate_coupled(const CircuitConfig& config, const std::vector<Digit>& inputs,
                       double t_end);

}  // namespace stno

#endif
