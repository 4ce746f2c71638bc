#ifndef STNO_FORCING_HPP
#define STNO_FORCING_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "stno/logic_encoding.hpp"

namespace stno {

inline constexpr double kSignTolerance = 1e-6;
inline constexpr double kFrequencySeparation = 1.2;
inline constexpr double kDefaultGain = 0.2;

/// One gate input: a fixed encoded amplitude or the sign of another node's
/// filtered output v_j (optionally negated).
struct InputRef {
    enum class Kind { Const, Node, NegatedNode };

    Kind kind = Kind::Const;
    double const_value = 1.0;  // in {-1, +1}
    int node = -1;

    static InputRef constant(double encoded) {
        if (encoded != 1.0 && encoded != -1.0)
            throw PreconditionError("constant input must be an encoded digit (+/-1)");
        return {Kind::Const, encoded, -1};
    }
    static InputRef constant(Digit d) { return constant(encode_digit(d)); }
    static InputRef node_ref(int j) { return {Kind::Node, 0.0, j}; }
    static InputRef negated_node(int j) { return {Kind::NegatedNode, 0.0, j}; }

    bool is_const() const { return kind == Kind::Const; }
};

struct ForcingChannel {
    CarrierSpec carrier;
    GateKind gate = GateKind::Or;
    InputRef left, right;
    // Gate sign resolved at build time when both inputs are constant.
    std::optional<double> resolved;
};

/// Composable drive term C(t, v): a sum of carrier * gate-sign channels
/// scaled by a common gain.
class ForcingTerm {
  public:
    ForcingTerm(std::vector<ForcingChannel> channels, double gain);

    /// Evaluates C(t, v).  Throws UnresolvedReferenceError when a referenced
    /// v_j is within the sign tolerance of zero.
    double value(double t, const Eigen::VectorXd& v) const;

    /// Constant-input terms only.
    double value(double t) const;

    /// Like value(t, v) but an unsettled channel contributes zero instead of
    /// throwing; used by coupled circuit evaluation.
    double value_or_idle(double t, const Eigen::VectorXd& v) const;

    double gain() const { return gain_; }
    const std::vector<ForcingChannel>& channels() const { return channels_; }
    bool has_node_refs() const { return has_node_refs_; }
    int max_node_index() const { return max_node_index_; }

    /// Upper bound gain * sum of channel amplitudes.
    double bound() const;

  private:
    std::vector<ForcingChannel> channels_;
    double gain_;
    bool has_node_refs_ = false;
    int max_node_index_ = -1;
};

/// Static single-channel gate drive: gain * p(t) * L(A, B).
ForcingTerm gate_forcing(GateKind g, Digit a, Digit b, const CarrierSpec& carrier,
                         double gain = kDefaultGain);

/// Gate drive whose inputs resolve through sign(v_j) at evaluation time.
ForcingTerm dynamic_gate_forcing(GateKind g, InputRef left, InputRef right,
                                 const CarrierSpec& carrier, double gain = kDefaultGain);

struct MuxChannel {
    CarrierSpec carrier;
    GateKind gate;
    Digit a, b;
};

/// Frequency-multiplexed sum of static gate drives; channel frequencies must
/// be separated by at least kFrequencySeparation in ratio.
ForcingTerm multiplex_forcing(const std::vector<MuxChannel>& channels,
                              double gain = kDefaultGain);

double eval_forcing(const ForcingTerm& f, double t, const Eigen::VectorXd& v);

}  // namespace stno

#endif
