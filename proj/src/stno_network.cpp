#include "stno/stno_network.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace stno {

using complexd = std::complex<double>;

StnoNetworkState StnoNetworkState::initial(int n, double tau_value, double u0) {
    if (n <= 0) throw PreconditionError("network size must be positive");
    StnoNetworkState s;
    s.u = Eigen::VectorXcd::Constant(n, complexd(u0, 0.0));
    s.v = Eigen::VectorXd::Zero(n);
    s.tau = Eigen::VectorXd::Constant(n, tau_value);
    return s;
}

std::vector<double> Trajectory::abs_u(int node) const {
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = std::abs(u[i][node]);
    return out;
}

std::vector<double> Trajectory::v_series(int node) const {
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = v[i][node];
    return out;
}

namespace {

// v with tau == 0 entries replaced by the instantaneous normalized
// correlation phat(t) |u_j| / r_ref.
Eigen::VectorXd effective_v(const StnoNetworkState& s, const StnoNetwork& net) {
    Eigen::VectorXd veff = s.v;
    const double phat = carrier_unit_value(net.readout_carrier, s.t);
    for (int j = 0; j < veff.size(); ++j)
        if (s.tau[j] == 0.0) veff[j] = phat * std::abs(s.u[j]) / net.r_ref;
    return veff;
}

double max_gain_bound(const StnoNetwork& net) {
    double g = 0.0;
    for (const auto& f : net.forcings) g = std::max(g, f.bound());
    return g;
}

}  // namespace

StateDerivative rhs(const StnoNetworkState& state, const StnoNetwork& net) {
    const int n = static_cast<int>(state.u.size());
    const bool driven = !net.forcings.empty();  // empty forcings: free network, C = 0
    if (driven && static_cast<int>(net.forcings.size()) != n)
        throw PreconditionError("one forcing term per node required");

    const Eigen::VectorXd veff = effective_v(state, net);
    const double phat = carrier_unit_value(net.readout_carrier, state.t);

    StateDerivative d;
    d.du.resize(n);
    d.dv = Eigen::VectorXd::Zero(n);
    const complexd minus_i_omega(0.0, -net.params.omega);
    for (int j = 0; j < n; ++j) {
        const double c = !driven ? 0.0
                         : net.idle_unsettled ? net.forcings[j].value_or_idle(state.t, veff)
                                              : net.forcings[j].value(state.t, veff);
        const double radial = net.params.lambda - net.params.b * std::norm(state.u[j]) + c;
        d.du[j] = (minus_i_omega + radial) * state.u[j];
        if (state.tau[j] > 0.0)
            d.dv[j] = (-state.v[j] + phat * std::abs(state.u[j]) / net.r_ref) / state.tau[j];
    }
    return d;
}

Trajectory integrate(const StnoNetworkState& state0, const StnoNetwork& net, double t_end,
                     double dt, int stride) {
    if (dt <= 0.0) throw PreconditionError("dt must be positive");
    if (t_end <= state0.t) throw PreconditionError("t_end must exceed the initial time");
    if (stride <= 0) throw PreconditionError("recording stride must be positive");

    const double gain = max_gain_bound(net);
    const double dt_max = 0.05 / std::max(1.0, std::abs(net.params.lambda) + gain);
    if (dt > dt_max)
        throw StepSizeError("dt " + std::to_string(dt) + " exceeds stability guard " +
                            std::to_string(dt_max));

    const double blowup = 10.0 * std::max(1.0, std::sqrt(std::max(
                                      0.0, (net.params.lambda + gain) / net.params.b)));

    const long n_steps = std::lround((t_end - state0.t) / dt);
    if (n_steps <= 0) throw PreconditionError("no integration steps in [t0, t_end]");

    StnoNetworkState s = state0;
    const double t0 = state0.t;

    Trajectory traj;
    traj.stride = stride;
    auto record = [&](const StnoNetworkState& st) {
        traj.times.push_back(st.t);
        traj.u.push_back(st.u);
        traj.v.push_back(st.v);
    };
    auto apply_algebraic_v = [&](StnoNetworkState& st) {
        const double phat = carrier_unit_value(net.readout_carrier, st.t);
        for (int j = 0; j < st.v.size(); ++j)
            if (st.tau[j] == 0.0) st.v[j] = phat * std::abs(st.u[j]) / net.r_ref;
    };
    apply_algebraic_v(s);
    record(s);

    StnoNetworkState tmp = s;
    for (long i = 0; i < n_steps; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        s.t = t;
        const StateDerivative k1 = rhs(s, net);

        tmp.t = t + 0.5 * dt;
        tmp.u = s.u + 0.5 * dt * k1.du;
        tmp.v = s.v + 0.5 * dt * k1.dv;
        const StateDerivative k2 = rhs(tmp, net);

        tmp.u = s.u + 0.5 * dt * k2.du;
        tmp.v = s.v + 0.5 * dt * k2.dv;
        const StateDerivative k3 = rhs(tmp, net);

        tmp.t = t + dt;
        tmp.u = s.u + dt * k3.du;
        tmp.v = s.v + dt * k3.dv;
        const StateDerivative k4 = rhs(tmp, net);

        s.u += (dt / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
        s.v += (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        s.t = t0 + static_cast<double>(i + 1) * dt;

        if (net.amplitude_floor > 0.0) {
            for (int j = 0; j < s.u.size(); ++j) {
                const double m = std::abs(s.u[j]);
                if (m > 0.0 && m < net.amplitude_floor)
                    s.u[j] *= net.amplitude_floor / m;
            }
        }

        apply_algebraic_v(s);

        if (s.u.cwiseAbs().maxCoeff() > blowup)
            throw BlowUpError("|u| exceeded " + std::to_string(blowup) + " at t=" +
                              std::to_string(s.t));

        if ((i + 1) % stride == 0 || i + 1 == n_steps) record(s);
    }
    return traj;
}

double radial_fixed_point(const StnoParams& params, double c_const) {
    return std::max(0.0, (params.lambda + c_const) / params.b);
}

Trajectory run_logic_gate(GateKind g, Digit a, Digit b, const StnoParams& params,
                          const CarrierSpec& carrier, double gain, int n_periods, double dt,
                          int stride) {
    if (n_periods < 3) throw PreconditionError("gate runs need at least 3 carrier periods");
    StnoNetwork net;
    net.params = params;
    net.forcings.push_back(gate_forcing(g, a, b, carrier, gain));
    net.readout_carrier = carrier;
    net.r_ref = reference_amplitude(params, gain);
    net.amplitude_floor = kAmplitudeFloor;
    StnoNetworkState s0 = StnoNetworkState::initial(1, 2.0 * carrier.period());
    return integrate(s0, net, n_periods * carrier.period(), dt, stride);
}

void export_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    const int n = traj.nodes();
    os << "t";
    for (int j = 0; j < n; ++j)
        os << ",re_u_" << j << ",im_u_" << j << ",abs_u_" << j << ",v_" << j;
    os << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        for (int j = 0; j < n; ++j) {
            const auto& uj = traj.u[i][j];
            os << "," << uj.real() << "," << uj.imag() << "," << std::abs(uj) << ","
               << traj.v[i][j];
        }
        os << "\n";
    }
}

}  // namespace stno
