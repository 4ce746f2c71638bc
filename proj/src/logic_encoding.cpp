#include "stno/logic_encoding.hpp"

#include <cmath>

namespace stno {

const char* gate_name(GateKind g) {
    switch (g) {
        case GateKind::Or: return "OR";
        case GateKind::And: return "AND";
        case GateKind::Nand: return "NAND";
    }
    return "?";
}

Digit decode_amplitude(double amplitude, double tolerance) {
    if (amplitude < -1.0 || amplitude > 1.0)
        throw PreconditionError("encoded amplitude outside [-1, 1]");
    if (std::abs(amplitude) < tolerance)
        throw IndeterminateError("amplitude carries no digit (|A| below decode tolerance)");
    const double a = 1.0 - std::acos(amplitude) / kPi;
    return a >= 0.5 ? Digit::one : Digit::zero;
}

double gate_value(GateKind g, double a_enc, double b_enc) {
    const auto [c0, ca, cb] = gate_coefficients(g);
    const double arg = c0 + ca * a_enc + cb * b_enc;
    if (arg == 0.0)
        throw PreconditionError("gate affine form evaluated to zero (bad coefficients)");
    return arg > 0.0 ? 1.0 : -1.0;
}

std::array<TruthRow, 4> truth_table(GateKind g) {
    std::array<TruthRow, 4> rows;
    int i = 0;
    for (int b = 0; b <= 1; ++b) {
        for (int a = 0; a <= 1; ++a) {
            const Digit da = digit_from_int(a);
            const Digit db = digit_from_int(b);
            const double out = gate_value(g, encode_digit(da), encode_digit(db));
            rows[i++] = {da, db, decode_amplitude(out)};
        }
    }
    return rows;
}

}  // namespace stno
