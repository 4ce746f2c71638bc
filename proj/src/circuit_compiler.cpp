#include "stno/circuit_compiler.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "stno/readout.hpp"

namespace stno {

// ---------------------------------------------------------------------------
// Expressions

ExprPtr BoolExpr::var(std::string n) {
    auto e = std::make_shared<BoolExpr>();
    e->op = Op::Var;
    e->name = std::move(n);
    return e;
}

ExprPtr BoolExpr::constant(Digit d) {
    auto e = std::make_shared<BoolExpr>();
    e->op = Op::Const;
    e->value = d;
    return e;
}

ExprPtr BoolExpr::unary(Op op, ExprPtr sub) {
    auto e = std::make_shared<BoolExpr>();
    e->op = op;
    e->lhs = std::move(sub);
    return e;
}

ExprPtr BoolExpr::binary(Op op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<BoolExpr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    // "!&" is the NAND operator; '!' alone is an error.
    bool consume_nand() {
        skip_ws();
        if (pos + 1 < text.size() && text[pos] == '!' && text[pos + 1] == '&') {
            pos += 2;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& expected) {
        skip_ws();
        throw ParseError(pos, "expected " + expected);
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_xor();
        while (consume('|')) e = BoolExpr::binary(BoolExpr::Op::Or, e, parse_xor());
        return e;
    }

    ExprPtr parse_xor() {
        ExprPtr e = parse_and();
        while (consume('^')) e = BoolExpr::binary(BoolExpr::Op::Xor, e, parse_and());
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (consume_nand())
                e = BoolExpr::binary(BoolExpr::Op::Nand, e, parse_unary());
            else if (consume('&'))
                e = BoolExpr::binary(BoolExpr::Op::And, e, parse_unary());
            else
                break;
        }
        return e;
    }

    ExprPtr parse_unary() {
        if (consume('~')) return BoolExpr::unary(BoolExpr::Op::Not, parse_unary());
        return parse_primary();
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("operand");
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_or();
            if (!consume(')')) fail("')'");
            return e;
        }
        if (c == '0' || c == '1') {
            ++pos;
            return BoolExpr::constant(c == '1' ? Digit::one : Digit::zero);
        }
        if (c >= 'a' && c <= 'z') {
            const std::size_t start = pos;
            ++pos;
            while (pos < text.size() &&
                   ((text[pos] >= 'a' && text[pos] <= 'z') ||
                    (text[pos] >= '0' && text[pos] <= '9') || text[pos] == '_'))
                ++pos;
            return BoolExpr::var(std::string(text.substr(start, pos - start)));
        }
        fail("operand");
    }
};

}  // namespace

ExprPtr parse_expr(std::string_view text) {
    Parser p{text};
    ExprPtr e = p.parse_or();
    if (!p.at_end()) p.fail("end of input");
    return e;
}

namespace {

void collect_vars(const BoolExpr& e, std::set<std::string>& out) {
    switch (e.op) {
        case BoolExpr::Op::Var: out.insert(e.name); break;
        case BoolExpr::Op::Const: break;
        case BoolExpr::Op::Not: collect_vars(*e.lhs, out); break;
        default:
            collect_vars(*e.lhs, out);
            collect_vars(*e.rhs, out);
    }
}

}  // namespace

std::vector<std::string> variables(const BoolExpr& expr) {
    std::set<std::string> s;
    collect_vars(expr, s);
    return {s.begin(), s.end()};
}

Digit oracle_evaluate(const BoolExpr& expr, const std::map<std::string, Digit>& inputs) {
    auto as_bool = [&](const BoolExpr& e) { return oracle_evaluate(e, inputs) == Digit::one; };
    switch (expr.op) {
        case BoolExpr::Op::Var: {
            const auto it = inputs.find(expr.name);
            if (it == inputs.end()) throw UnboundVariableError(expr.name);
            return it->second;
        }
        case BoolExpr::Op::Const: return expr.value;
        case BoolExpr::Op::Not: return as_bool(*expr.lhs) ? Digit::zero : Digit::one;
        case BoolExpr::Op::And:
            return (as_bool(*expr.lhs) && as_bool(*expr.rhs)) ? Digit::one : Digit::zero;
        case BoolExpr::Op::Or:
            return (as_bool(*expr.lhs) || as_bool(*expr.rhs)) ? Digit::one : Digit::zero;
        case BoolExpr::Op::Nand:
            return (as_bool(*expr.lhs) && as_bool(*expr.rhs)) ? Digit::zero : Digit::one;
        case BoolExpr::Op::Xor:
            return (as_bool(*expr.lhs) != as_bool(*expr.rhs)) ? Digit::one : Digit::zero;
    }
    throw PreconditionError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// NAND synthesis with hash-consing

namespace {

struct DagBuilder {
    NandDag dag;
    std::map<std::string, int> input_index;
    // NAND is commutative; operand pairs are stored sorted so that
    // g(a,b) and g(b,a) share one gate.
    std::map<std::pair<long, long>, int> memo;

    static long key(const NandRef& r) {
        switch (r.kind) {
            case NandRef::Kind::Input: return 3L * r.index;
            case NandRef::Kind::Gate: return 3L * r.index + 1;
            case NandRef::Kind::Const: return 3L * to_int(r.value) + 2;
        }
        return -1;
    }

    NandRef mk(NandRef a, NandRef b) {
        long ka = key(a), kb = key(b);
        if (ka > kb) {
            std::swap(a, b);
            std::swap(ka, kb);
        }
        const auto it = memo.find({ka, kb});
        if (it != memo.end()) return NandRef::gate(it->second);
        const int idx = static_cast<int>(dag.gates.size());
        dag.gates.push_back({a, b});
        memo.emplace(std::make_pair(ka, kb), idx);
        return NandRef::gate(idx);
    }

    NandRef rewrite(const BoolExpr& e) {
        switch (e.op) {
            case BoolExpr::Op::Var: return NandRef::input(input_index.at(e.name));
            case BoolExpr::Op::Const: return NandRef::constant(e.value);
            case BoolExpr::Op::Not: {
                const NandRef r = rewrite(*e.lhs);
                return mk(r, r);
            }
            case BoolExpr::Op::And: {
                const NandRef n = mk(rewrite(*e.lhs), rewrite(*e.rhs));
                return mk(n, n);
            }
            case BoolExpr::Op::Or: {
                const NandRef l = rewrite(*e.lhs);
                const NandRef r = rewrite(*e.rhs);
                return mk(mk(l, l), mk(r, r));
            }
            case BoolExpr::Op::Nand: return mk(rewrite(*e.lhs), rewrite(*e.rhs));
            case BoolExpr::Op::Xor: {
                // (a nand (a nand b)) nand (b nand (a nand b))
                const NandRef a = rewrite(*e.lhs);
                const NandRef b = rewrite(*e.rhs);
                const NandRef t = mk(a, b);
                return mk(mk(a, t), mk(b, t));
            }
        }
        throw PreconditionError("corrupt expression node");
    }
};

}  // namespace

NandDag to_nand(const BoolExpr& expr) {
    DagBuilder builder;
    builder.dag.inputs = variables(expr);
    for (std::size_t i = 0; i < builder.dag.inputs.size(); ++i)
        builder.input_index[builder.dag.inputs[i]] = static_cast<int>(i);
    NandRef out = builder.rewrite(expr);
    if (out.kind != NandRef::Kind::Gate) {
        // Bare input or constant: buffer through a double negation.
        const NandRef n = builder.mk(out, out);
        out = builder.mk(n, n);
    }
    builder.dag.output = out.index;
    return builder.dag;
}

namespace {

bool ref_value(const NandRef& r, const std::vector<Digit>& inputs,
               const std::vector<bool>& gate_out) {
    switch (r.kind) {
        case NandRef::Kind::Input:
            if (r.index < 0 || r.index >= static_cast<int>(inputs.size()))
                throw PreconditionError("input index out of range");
            return inputs[r.index] == Digit::one;
        case NandRef::Kind::Gate: return gate_out[r.index];
        case NandRef::Kind::Const: return r.value == Digit::one;
    }
    throw PreconditionError("corrupt reference");
}

}  // namespace

Digit evaluate_dag(const NandDag& dag, const std::vector<Digit>& inputs) {
    if (inputs.size() != dag.inputs.size())
        throw PreconditionError("expected " + std::to_string(dag.inputs.size()) + " inputs");
    std::vector<bool> out(dag.gates.size());
    for (std::size_t g = 0; g < dag.gates.size(); ++g) {
        const bool a = ref_value(dag.gates[g].left, inputs, out);
        const bool b = ref_value(dag.gates[g].right, inputs, out);
        out[g] = !(a && b);
    }
    return out[dag.output] ? Digit::one : Digit::zero;
}

namespace {

std::string ref_name(const NandDag& dag, const NandRef& r) {
    switch (r.kind) {
        case NandRef::Kind::Input: return dag.inputs[r.index];
        case NandRef::Kind::Gate: return "g" + std::to_string(r.index);
        case NandRef::Kind::Const: return std::to_string(to_int(r.value));
    }
    return "?";
}

}  // namespace

std::string netlist(const NandDag& dag) {
    std::ostringstream os;
    for (std::size_t g = 0; g < dag.gates.size(); ++g)
        os << "g" << g << " = " << ref_name(dag, dag.gates[g].left) << " NAND "
           << ref_name(dag, dag.gates[g].right) << "\n";
    os << "output g" << dag.output << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Circuit configurations

namespace {

CircuitRef to_circuit_ref(const NandRef& r) {
    switch (r.kind) {
        case NandRef::Kind::Input: return {CircuitRef::Kind::Input, r.index, Digit::zero};
        case NandRef::Kind::Gate: return {CircuitRef::Kind::Node, r.index, Digit::zero};
        case NandRef::Kind::Const: return {CircuitRef::Kind::Const, 0, r.value};
    }
    throw PreconditionError("corrupt reference");
}

}  // namespace

CircuitConfig compile(const NandDag& dag, const StnoParams& params, const CarrierSpec& carrier,
                      double gain, double tau) {
    CircuitConfig cfg;
    cfg.input_names = dag.inputs;
    cfg.params = params;
    cfg.carrier = carrier;
    cfg.gain = gain;
    cfg.tau = tau;
    cfg.output = dag.output;

    std::vector<int> level(dag.gates.size(), 0);
    for (std::size_t g = 0; g < dag.gates.size(); ++g) {
        cfg.nodes.push_back(
            {GateKind::Nand, to_circuit_ref(dag.gates[g].left), to_circuit_ref(dag.gates[g].right)});
        int lv = 0;
        for (const NandRef* r : {&dag.gates[g].left, &dag.gates[g].right})
            if (r->kind == NandRef::Kind::Gate) lv = std::max(lv, level[r->index] + 1);
        level[g] = lv;
    }
    const int depth = dag.gates.empty() ? 0 : *std::max_element(level.begin(), level.end()) + 1;
    cfg.schedule.resize(depth);
    for (std::size_t g = 0; g < dag.gates.size(); ++g)
        cfg.schedule[level[g]].push_back(static_cast<int>(g));
    return cfg;
}

CircuitConfig compile_xor_stencil(const StnoParams& params, const CarrierSpec& carrier, double gain,
                                double tau) {
    CircuitConfig cfg;
    cfg.input_names = {"a", "b"};
    cfg.params = params;
    cfg.carrier = carrier;
    cfg.gain = gain;
    cfg.tau = tau;
    cfg.nodes = {
        {GateKind::And, {CircuitRef::Kind::NegatedInput, 0, {}}, {CircuitRef::Kind::Input, 1, {}}},
        {GateKind::And, {CircuitRef::Kind::Input, 0, {}}, {CircuitRef::Kind::NegatedInput, 1, {}}},
        {GateKind::Or, {CircuitRef::Kind::Node, 0, {}}, {CircuitRef::Kind::Node, 1, {}}},
    };
    cfg.schedule = {{0, 1}, {2}};
    cfg.output = 2;
    return cfg;
}

namespace {

Digit staged_ref_digit(const CircuitRef& r, const std::vector<Digit>& inputs,
                       const std::vector<Digit>& node_digit) {
    switch (r.kind) {
        case CircuitRef::Kind::Input: return inputs[r.index];
        case CircuitRef::Kind::NegatedInput:
            return inputs[r.index] == Digit::one ? Digit::zero : Digit::one;
        case CircuitRef::Kind::Node: return node_digit[r.index];
        case CircuitRef::Kind::Const: return r.value;
    }
    throw PreconditionError("corrupt reference");
}

InputRef coupled_input_ref(const CircuitRef& r, const std::vector<Digit>& inputs) {
    switch (r.kind) {
        case CircuitRef::Kind::Input: return InputRef::constant(inputs[r.index]);
        case CircuitRef::Kind::NegatedInput:
            return InputRef::constant(-encode_digit(inputs[r.index]));
        case CircuitRef::Kind::Node: return InputRef::node_ref(r.index);
        case CircuitRef::Kind::Const: return InputRef::constant(r.value);
    }
    throw PreconditionError("corrupt reference");
}

void check_inputs(const CircuitConfig& config, const std::vector<Digit>& inputs) {
    if (inputs.size() != config.input_names.size())
        throw PreconditionError("expected " + std::to_string(config.input_names.size()) +
                                " circuit inputs, got " + std::to_string(inputs.size()));
}

}  // namespace

Digit evaluate_staged(const CircuitConfig& config, const std::vector<Digit>& inputs) {
    check_inputs(config, inputs);
    std::vector<Digit> node_digit(config.nodes.size(), Digit::zero);
    const double r_ref = reference_amplitude(config.params, config.gain);
    for (const auto& stage : config.schedule) {
        // Nodes within a stage are independent; order does not matter.
        for (int idx : stage) {
            const CircuitNode& node = config.nodes[idx];
            const Digit a = staged_ref_digit(node.left, inputs, node_digit);
            const Digit b = staged_ref_digit(node.right, inputs, node_digit);
            const Trajectory traj = run_logic_gate(node.gate, a, b, config.params,
                                                   config.carrier, config.gain, 3, config.dt);
            try {
                node_digit[idx] = decode_gate_run(traj, config.carrier, r_ref);
            } catch (const IndeterminateError& e) {
                throw IndeterminateError("node " + std::to_string(idx) + ": " + e.what());
            }
        }
    }
    return node_digit[config.output];
}

Digit evaluate_coupled(const CircuitConfig& config, const std::vector<Digit>& inputs,
                       double t_end) {
    check_inputs(config, inputs);
    const double min_t = static_cast<double>(config.schedule.size()) * 4.0 * config.carrier.period();
    if (t_end < min_t - 1e-9)
        throw PreconditionError("coupled evaluation needs t_end >= " + std::to_string(min_t));

    StnoNetwork net;
    net.params = config.params;
    net.readout_carrier = config.carrier;
    net.r_ref = reference_amplitude(config.params, config.gain);
    net.idle_unsettled = true;
    net.amplitude_floor = kAmplitudeFloor;
    for (const auto& node : config.nodes)
        net.forcings.push_back(dynamic_gate_forcing(node.gate, coupled_input_ref(node.left, inputs),
                                                    coupled_input_ref(node.right, inputs),
                                                    config.carrier, config.gain));

    StnoNetworkState s0 = StnoNetworkState::initial(static_cast<int>(config.nodes.size()),
                                                    config.tau);
    const Trajectory traj = integrate(s0, net, t_end, config.dt);
    const double v_out = traj.v.back()[config.output];
    if (std::abs(v_out) <= kSignTolerance)
        throw UnsettledOutputError("output filter |v| = " + std::to_string(std::abs(v_out)) +
                                   " has not settled by t_end");
    return v_out > 0.0 ? Digit::one : Digit::zero;
}

}  // namespace stno
