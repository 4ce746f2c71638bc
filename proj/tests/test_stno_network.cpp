#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "stno/readout.hpp"
#include "stno/stno_network.hpp"

using namespace stno;

namespace {

// Free (undriven) single oscillator; returns |u(t_end)|^2.
double free_decay_s(const StnoParams& params, double u0, double t_end, double dt) {
    StnoNetwork net;
    net.params = params;
    StnoNetworkState s0 = StnoNetworkState::initial(1, 1.0, u0);
    const Trajectory traj = integrate(s0, net, t_end, dt);
    return std::norm(traj.u.back()[0]);
}

}  // namespace

TEST_CASE("frozen logistic oracle value") {
    // s' = 2(-0.1 - 0.1 s)s, s0 = 0.01, t = 10.
    CHECK(oracles::logistic_s(-0.1, 0.1, 0.01, 10.0) == doctest::Approx(1.34175e-3).epsilon(1e-4));
}

TEST_CASE("free decay matches the closed-form logistic solution") {
    const StnoParams params;  // lambda = -0.1, b = 0.1
    const double s_num = free_decay_s(params, 0.1, 10.0, 0.01);
    const double s_ref = oracles::logistic_s(params.lambda, params.b, 0.01, 10.0);
    CHECK(s_num == doctest::Approx(s_ref).epsilon(1e-9));
}

TEST_CASE("constant super-threshold drive saturates at the radial fixed point") {
    // Constant C = 0.2 folded into lambda' = lambda + C = 0.1.
    const StnoParams params(0.15, 0.1, 0.1);
    const double s_num = free_decay_s(params, 0.1, 200.0, 0.01);
    CHECK(s_num == doctest::Approx(1.0).epsilon(0.01));
    const double s_ref = oracles::logistic_s(0.1, 0.1, 0.01, 200.0);
    CHECK(s_num == doctest::Approx(s_ref).epsilon(1e-8));
}

TEST_CASE("RK4 converges at fourth order") {
    const StnoParams params(0.15, 1.0, 1.0);  // fast growth makes the error measurable
    const double s_ref = oracles::logistic_s(1.0, 1.0, 0.01, 5.0);
    const double e1 = std::abs(free_decay_s(params, 0.1, 5.0, 0.04) - s_ref);
    const double e2 = std::abs(free_decay_s(params, 0.1, 5.0, 0.02) - s_ref);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("origin is an exact equilibrium") {
    StnoNetwork net;
    net.forcings.push_back(gate_forcing(GateKind::Or, Digit::one, Digit::one, net.readout_carrier));
    net.r_ref = reference_amplitude(net.params, kDefaultGain);
    StnoNetworkState s0 = StnoNetworkState::initial(1, 0.0, 0.0);
    const Trajectory traj = integrate(s0, net, 100.0, 0.01);
    for (const auto& u : traj.u) CHECK(std::abs(u[0]) == 0.0);
}

TEST_CASE("global phase rotation is a symmetry") {
    const CarrierSpec carrier;
    StnoNetwork net;
    net.forcings.push_back(gate_forcing(GateKind::Nand, Digit::zero, Digit::zero, carrier));
    net.readout_carrier = carrier;
    net.r_ref = reference_amplitude(net.params, kDefaultGain);

    StnoNetworkState s0 = StnoNetworkState::initial(1, 0.0);
    const std::complex<double> rot = std::polar(1.0, kPi / 3.0);
    StnoNetworkState s0r = s0;
    s0r.u[0] *= rot;

    const Trajectory t1 = integrate(s0, net, 400.0, 0.01);
    const Trajectory t2 = integrate(s0r, net, 400.0, 0.01);
    for (std::size_t i = 0; i < t1.times.size(); ++i) {
        CHECK(std::abs(t2.u[i][0] - rot * t1.u[i][0]) < 1e-12);
        CHECK(std::abs(t2.u[i][0]) == doctest::Approx(std::abs(t1.u[i][0])).epsilon(1e-12));
    }
}

TEST_CASE("anti-phase forcing shifts the burst train by half a period") {
    const CarrierSpec p0;
    const CarrierSpec ppi = p0.antiphase();
    const Trajectory t1 = run_logic_gate(GateKind::Or, Digit::one, Digit::one, {}, p0);
    const Trajectory t2 = run_logic_gate(GateKind::Or, Digit::one, Digit::one, {}, ppi);

    // Sample spacing 0.1; half a period is exactly 2000 samples.
    const std::size_t half = 2000;
    const std::vector<double> a1 = t1.abs_u(0);
    const std::vector<double> a2 = t2.abs_u(0);
    double max_diff = 0.0;
    // Compare over the final period, where transients have long decayed.
    for (std::size_t i = a1.size() - 4000; i < a1.size(); ++i)
        max_diff = std::max(max_diff, std::abs(a2[i] - a1[i - half]));
    CHECK(max_diff < 1e-6);
}

TEST_CASE("bursts lock to the carrier phase selected by the gate sign") {
    const CarrierSpec carrier;

    // L = +1: bursts peak inside the positive carrier half-cycle.  The peak
    // lags the carrier maximum (growth from the floor saturates partway up
    // the excursion), so the bound is the half-cycle, not a tight lock.
    const Trajectory t_or = run_logic_gate(GateKind::Or, Digit::one, Digit::zero, {}, carrier);
    const auto ev_or = burst_events(t_or.times, t_or.abs_u(0), carrier);
    CHECK(ev_or.size() >= 2);
    for (const auto& e : ev_or) CHECK(std::abs(e.carrier_phase) < 0.45 * kPi);

    // L = -1: bursts inside the negative half-cycle (phase ~ pi).
    const Trajectory t_nand = run_logic_gate(GateKind::Nand, Digit::one, Digit::one, {}, carrier);
    const auto ev_nand = burst_events(t_nand.times, t_nand.abs_u(0), carrier);
    CHECK(ev_nand.size() >= 2);
    for (const auto& e : ev_nand) CHECK(std::abs(e.carrier_phase) > 0.55 * kPi);
}

TEST_CASE("amplitude stays below the forced fixed point") {
    const Trajectory traj = run_logic_gate(GateKind::Or, Digit::one, Digit::one);
    double max_s = 0.0;
    for (const auto& u : traj.u) max_s = std::max(max_s, std::norm(u[0]));
    CHECK(max_s <= radial_fixed_point({}, kDefaultGain) * 1.01);
    CHECK(max_s > 0.5);  // the bursts actually reach saturation
}

TEST_CASE("filtered output settles to the gate sign") {
    const CarrierSpec carrier;
    const double r_ref = reference_amplitude({}, kDefaultGain);
    const Trajectory t_pos = run_logic_gate(GateKind::Or, Digit::one, Digit::one);
    CHECK(t_pos.v.back()[0] > kSignTolerance);
    CHECK(decode_gate_run(t_pos, carrier, r_ref) == Digit::one);

    const Trajectory t_neg = run_logic_gate(GateKind::Nand, Digit::one, Digit::one);
    CHECK(t_neg.v.back()[0] < -kSignTolerance);
    CHECK(decode_gate_run(t_neg, carrier, r_ref) == Digit::zero);
}

TEST_CASE("algebraic filter (tau = 0) equals the instantaneous correlation") {
    const CarrierSpec carrier;
    StnoNetwork net;
    net.forcings.push_back(gate_forcing(GateKind::Or, Digit::one, Digit::one, carrier));
    net.readout_carrier = carrier;
    net.r_ref = reference_amplitude(net.params, kDefaultGain);
    StnoNetworkState s0 = StnoNetworkState::initial(1, 0.0);
    const Trajectory traj = integrate(s0, net, 800.0, 0.01);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double expect =
            carrier_unit_value(carrier, traj.times[i]) * std::abs(traj.u[i][0]) / net.r_ref;
        CHECK(traj.v[i][0] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("radial fixed point") {
    CHECK(radial_fixed_point({}, 0.2) == doctest::Approx(1.0));
    CHECK(radial_fixed_point({}, 0.0) == doctest::Approx(0.0));
    CHECK(radial_fixed_point({0.15, -0.1, 0.2}, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("reference amplitude floors at sqrt(kRRefFloor)") {
    CHECK(reference_amplitude({}, 0.2) == doctest::Approx(1.0));
    CHECK(reference_amplitude({}, 0.05) == doctest::Approx(1e-3));
}

TEST_CASE("step size guard") {
    StnoNetwork net;
    net.forcings.push_back(gate_forcing(GateKind::Or, Digit::one, Digit::one, net.readout_carrier));
    net.r_ref = 1.0;
    StnoNetworkState s0 = StnoNetworkState::initial(1, 0.0);
    CHECK_THROWS_AS(integrate(s0, net, 100.0, 0.2), StepSizeError);
    CHECK_THROWS_AS(integrate(s0, net, 100.0, -0.01), PreconditionError);
    CHECK_THROWS_AS(integrate(s0, net, -1.0, 0.01), PreconditionError);
    CHECK_THROWS_AS(integrate(s0, net, 100.0, 0.01, 0), PreconditionError);
}

TEST_CASE("blow-up guard fires when the state leaves the physical region") {
    StnoNetwork net;  // undriven: limit is 10
    StnoNetworkState s0 = StnoNetworkState::initial(1, 1.0, 20.0);
    CHECK_THROWS_AS(integrate(s0, net, 10.0, 0.01), BlowUpError);
}

TEST_CASE("recording stride and endpoints") {
    StnoNetwork net;
    StnoNetworkState s0 = StnoNetworkState::initial(1, 1.0, 0.1);
    const Trajectory traj = integrate(s0, net, 10.0, 0.01, 10);
    CHECK(traj.times.size() == 101);  // floor(1000 / 10) + 1
    CHECK(traj.times.front() == doctest::Approx(0.0));
    CHECK(traj.times.back() == doctest::Approx(10.0));
    CHECK(traj.times[1] == doctest::Approx(0.1));
}

TEST_CASE("run_logic_gate rejects short runs and bad params") {
    CHECK_THROWS_AS(run_logic_gate(GateKind::Or, Digit::one, Digit::one, {}, {}, 0.2, 2),
                    PreconditionError);
    CHECK_THROWS_AS(StnoParams(0.15, -0.1, 0.0), PreconditionError);
    CHECK_THROWS_AS(StnoNetworkState::initial(0, 1.0), PreconditionError);
}
