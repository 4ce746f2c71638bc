#ifndef STNO_LOGIC_ENCODING_HPP
#define STNO_LOGIC_ENCODING_HPP

#include <array>
#include <cmath>

#include "stno/errors.hpp"

namespace stno {

inline constexpr double kPi = 3.14159265358979323846;

/// Binary digit carried by a phase-encoded waveform.
enum class Digit : int { zero = 0, one = 1 };

inline int to_int(Digit d) { return static_cast<int>(d); }

inline Digit digit_from_int(int v) {
    if (v != 0 && v != 1) throw PreconditionError("digit must be 0 or 1");
    return static_cast<Digit>(v);
}

/// Reference cosine carrier A_p cos(2 pi w_p t + phi_p).  The anti-phase
/// signal n is the same carrier with the phase shifted by pi.
struct CarrierSpec {
    double amplitude = 1.0;
    double frequency = 0.0025;  // cycles per model time unit; period 400
    double phase = 0.0;

    double period() const { return 1.0 / frequency; }

    CarrierSpec antiphase() const { return {amplitude, frequency, phase + kPi}; }
};

inline double carrier_value(const CarrierSpec& c, double t) {
    return c.amplitude * std::cos(2.0 * kPi * c.frequency * t + c.phase);
}

/// Unit-amplitude carrier value, used by filtered-output normalization.
inline double carrier_unit_value(const CarrierSpec& c, double t) {
    return std::cos(2.0 * kPi * c.frequency * t + c.phase);
}

inline constexpr double kDecodeTolerance = 1e-9;

enum class GateKind { Or, And, Nand };

/// Coefficients of the affine sign-threshold form c0 + cA*A + cB*B.
struct GateCoefficients {
    double c0, ca, cb;
};

constexpr GateCoefficients gate_coefficients(GateKind g) {
    switch (g) {
        case GateKind::Or: return {1.0, 1.0, 1.0};
        case GateKind::And: return {-1.0, 1.0, 1.0};
        case GateKind::Nand: return {1.0, -2.0, -2.0};
    }
    return {0.0, 0.0, 0.0};
}

const char* gate_name(GateKind g);

/// Digit a -> amplitude -cos(a pi), i.e. 0 -> -1, 1 -> +1.
inline double encode_digit(Digit a) {
    return -std::cos(to_int(a) * kPi);
}

/// Amplitude -> digit 1 - arccos(A)/pi rounded; rejects near-zero amplitudes.
Digit decode_amplitude(double amplitude, double tolerance = kDecodeTolerance);

/// sign(c0 + cA*A + cB*B) for encoded amplitudes A, B in {-1, +1}.
double gate_value(GateKind g, double a_enc, double b_enc);

struct TruthRow {
    Digit a, b, out;
};

std::array<TruthRow, 4> truth_table(GateKind g);

}  // namespace stno

#endif
