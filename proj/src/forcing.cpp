#include "stno/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stno {

namespace {

// Resolves a gate input to +/-1 against the filtered-output vector, or
// nothing when the referenced output has not settled.
std::optional<double> resolve(const InputRef& ref, const Eigen::VectorXd& v) {
    switch (ref.kind) {
        case InputRef::Kind::Const:
            return ref.const_value;
        case InputRef::Kind::Node:
        case InputRef::Kind::NegatedNode: {
            if (ref.node < 0 || ref.node >= v.size())
                throw PreconditionError("input reference to node " + std::to_string(ref.node) +
                                        " outside network of size " + std::to_string(v.size()));
            const double vj = v[ref.node];
            if (std::abs(vj) < kSignTolerance) return std::nullopt;
            const double s = vj > 0.0 ? 1.0 : -1.0;
            return ref.kind == InputRef::Kind::NegatedNode ? -s : s;
        }
    }
    return std::nullopt;
}

std::optional<double> channel_sign(const ForcingChannel& ch, const Eigen::VectorXd& v) {
    if (ch.resolved) return *ch.resolved;
    const auto a = resolve(ch.left, v);
    const auto b = resolve(ch.right, v);
    if (!a || !b) return std::nullopt;
    return gate_value(ch.gate, *a, *b);
}

}  // namespace

ForcingTerm::ForcingTerm(std::vector<ForcingChannel> channels, double gain)
    : channels_(std::move(channels)), gain_(gain) {
    if (channels_.empty()) throw PreconditionError("forcing term needs at least one channel");
    if (gain_ <= 0.0) throw PreconditionError("forcing gain must be positive");
    for (auto& ch : channels_) {
        if (!ch.resolved && ch.left.is_const() && ch.right.is_const())
            ch.resolved = gate_value(ch.gate, ch.left.const_value, ch.right.const_value);
        for (const InputRef* r : {&ch.left, &ch.right}) {
            if (!r->is_const()) {
                has_node_refs_ = true;
                max_node_index_ = std::max(max_node_index_, r->node);
            }
        }
    }
}

double ForcingTerm::value(double t, const Eigen::VectorXd& v) const {
    double sum = 0.0;
    for (const auto& ch : channels_) {
        const auto s = channel_sign(ch, v);
        if (!s)
            throw UnresolvedReferenceError(
                "gate input references an unsettled output (|v| below sign tolerance)");
        sum += carrier_value(ch.carrier, t) * *s;
    }
    return gain_ * sum;
}

double ForcingTerm::value(double t) const {
    if (has_node_refs_)
        throw PreconditionError("forcing term references node outputs; supply v");
    static const Eigen::VectorXd empty;
    return value(t, empty);
}

double ForcingTerm::value_or_idle(double t, const Eigen::VectorXd& v) const {
    double sum = 0.0;
    for (const auto& ch : channels_) {
        const auto s = channel_sign(ch, v);
        if (s) sum += carrier_value(ch.carrier, t) * *s;
    }
    return gain_ * sum;
}

double ForcingTerm::bound() const {
    double sum = 0.0;
    for (const auto& ch : channels_) sum += ch.carrier.amplitude;
    return gain_ * sum;
}

ForcingTerm gate_forcing(GateKind g, Digit a, Digit b, const CarrierSpec& carrier, double gain) {
    ForcingChannel ch{carrier, g, InputRef::constant(a), InputRef::constant(b), std::nullopt};
    return ForcingTerm({ch}, gain);
}

ForcingTerm dynamic_gate_forcing(GateKind g, InputRef left, InputRef right,
                                 const CarrierSpec& carrier, double gain) {
    ForcingChannel ch{carrier, g, left, right, std::nullopt};
    return ForcingTerm({ch}, gain);
}

ForcingTerm multiplex_forcing(const std::vector<MuxChannel>& channels, double gain) {
    if (channels.size() < 2)
        throw PreconditionError("multiplexing needs at least two channels");
    for (std::size_t i = 0; i < channels.size(); ++i) {
        for (std::size_t j = i + 1; j < channels.size(); ++j) {
            const double fi = channels[i].carrier.frequency;
            const double fj = channels[j].carrier.frequency;
            const double ratio = std::max(fi, fj) / std::min(fi, fj);
            if (ratio < kFrequencySeparation)
                throw FrequencyCollisionError("channel frequencies " + std::to_string(fi) + " and " +
                                              std::to_string(fj) + " closer than ratio " +
                                              std::to_string(kFrequencySeparation));
        }
    }
    std::vector<ForcingChannel> out;
    out.reserve(channels.size());
    for (const auto& mc : channels)
        out.push_back({mc.carrier, mc.gate, InputRef::constant(mc.a), InputRef::constant(mc.b),
                       std::nullopt});
    return ForcingTerm(std::move(out), gain);
}

double eval_forcing(const ForcingTerm& f, double t, const Eigen::VectorXd& v) {
    return f.value(t, v);
}

}  // namespace stno
