#ifndef STNO_STNO_NETWORK_HPP
#define STNO_STNO_NETWORK_HPP

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <vector>

#include "stno/forcing.hpp"
#include "stno/logic_encoding.hpp"

namespace stno {

struct StnoParams {
    double omega = 0.15;    // intrinsic rotation rate
    double lambda = -0.1;   // damping / spin-torque balance
    double b = 0.1;         // saturation

    StnoParams() = default;
    StnoParams(double omega_, double lambda_, double b_)
        : omega(omega_), lambda(lambda_), b(b_) {
        if (b <= 0.0) throw PreconditionError("saturation coefficient b must be positive");
    }
};

inline constexpr double kDefaultInitialAmplitude = 0.01;
inline constexpr double kDefaultDt = 0.01;
inline constexpr int kDefaultStride = 10;
inline constexpr double kRRefFloor = 1e-6;

/// Quiescent amplitude floor used by the gate/circuit/film drivers.  Below the
/// Andronov-Hopf threshold |u| decays exponentially without bound, so after one
/// sub-threshold half-cycle the supercritical branch is numerically
/// unreachable and no later burst can form.  Clamping |u| at this floor
/// (phase-preserving; exact zeros are left alone so the origin stays
/// invariant) is a deterministic stand-in for the physical noise floor that
/// re-seeds each burst.  Off by default in the raw integrator.
inline constexpr double kAmplitudeFloor = 1e-3;

/// Burst-height normalization sqrt(max(eps, (lambda+gain)/b)) used by the
/// filtered-output dynamics and the correlation threshold.
inline double reference_amplitude(const StnoParams& p, double gain) {
    const double s = (p.lambda + gain) / p.b;
    return std::sqrt(std::max(kRRefFloor, s));
}

struct StnoNetworkState {
    double t = 0.0;
    Eigen::VectorXcd u;   // complex magnetization per node
    Eigen::VectorXd v;    // filtered outputs
    Eigen::VectorXd tau;  // filter time constants (0 => algebraic v)

    static StnoNetworkState initial(int n, double tau_value,
                                    double u0 = kDefaultInitialAmplitude);
};

/// N oscillators, one drive term per node, plus the carrier and burst
/// normalization used by the filtered outputs v_j.
struct StnoNetwork {
    StnoParams params;
    std::vector<ForcingTerm> forcings;
    CarrierSpec readout_carrier;
    double r_ref = 1.0;
    // Unsettled dynamic gate inputs contribute zero drive instead of
    // throwing; used by coupled circuit evaluation.
    bool idle_unsettled = false;
    // |u| clamp applied after every step; 0 disables (see kAmplitudeFloor).
    double amplitude_floor = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> u;
    std::vector<Eigen::VectorXd> v;
    int stride = kDefaultStride;

    int nodes() const { return u.empty() ? 0 : static_cast<int>(u.front().size()); }
    std::vector<double> abs_u(int node) const;
    std::vector<double> v_series(int node) const;
};

struct StateDerivative {
    Eigen::VectorXcd du;
    Eigen::VectorXd dv;
};

/// du_j/dt = -i w u_j + (lambda - b|u_j|^2 + C_j(t,v)) u_j,
/// tau_j dv_j/dt = -v_j + phat(t) |u_j| / r_ref.
StateDerivative rhs(const StnoNetworkState& state, const StnoNetwork& net);

/// Fixed-step RK4 integration, recording every stride-th step plus the
/// final state.  Deterministic for identical inputs.
Trajectory integrate(const StnoNetworkState& state0, const StnoNetwork& net, double t_end,
                     double dt = kDefaultDt, int stride = kDefaultStride);

/// Steady squared amplitude max(0, (lambda + C)/b) under constant drive.
double radial_fixed_point(const StnoParams& params, double c_const);

/// Single STNO driven by gain * p(t) * L(A,B) from u0 = 0.01 for n_periods
/// carrier periods.
Trajectory run_logic_gate(GateKind g, Digit a, Digit b,
                          const StnoParams& params = {},
                          const CarrierSpec& carrier = {},
                          double gain = kDefaultGain, int n_periods = 3,
                          double dt = kDefaultDt, int stride = kDefaultStride);

/// CSV export: t, then re_u_j, im_u_j, abs_u_j, v_j per node.
void export_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace stno

#endif
