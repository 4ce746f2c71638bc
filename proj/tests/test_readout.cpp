#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stno/readout.hpp"

using namespace stno;

namespace {

struct Series {
    std::vector<double> times, abs_u;
};

// abs_u(t) = base + amp * cos(2 pi f t + phase), sampled on a uniform grid.
Series cosine_series(const CarrierSpec& c, double base, double amp, double phase, double t_end,
                     double dt) {
    Series s;
    for (double t = 0.0; t <= t_end + 1e-9; t += dt) {
        s.times.push_back(t);
        s.abs_u.push_back(base + amp * std::cos(2.0 * kPi * c.frequency * t + phase));
    }
    return s;
}

}  // namespace

TEST_CASE("correlation of an in-phase modulated envelope is amp/2") {
    const CarrierSpec c;
    const Series s = cosine_series(c, 1.0, 1.0, 0.0, 4.0 * c.period(), 0.5);
    const CorrelationResult r = correlate(s.times, s.abs_u, c, 1.0);
    CHECK(r.integral == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.threshold == doctest::Approx(0.025));
    CHECK(r.digit == Digit::one);
    CHECK(r.confidence == doctest::Approx(20.0).epsilon(1e-4));
}

TEST_CASE("anti-phase envelope gives the negative integral and digit 0") {
    const CarrierSpec c;
    const Series s = cosine_series(c, 1.0, 1.0, kPi, 4.0 * c.period(), 0.5);
    const CorrelationResult r = correlate(s.times, s.abs_u, c, 1.0);
    CHECK(r.integral == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(r.digit == Digit::zero);
}

TEST_CASE("unmodulated envelope is indeterminate") {
    const CarrierSpec c;
    const Series s = cosine_series(c, 0.7, 0.0, 0.0, 4.0 * c.period(), 0.5);
    const CorrelationResult r = correlate(s.times, s.abs_u, c, 1.0);
    CHECK(std::abs(r.integral) < 1e-9);
    CHECK_FALSE(r.digit.has_value());
}

TEST_CASE("correlation trims the window to whole periods from the front") {
    const CarrierSpec c;
    // 2.6 periods of pure carrier-quadrature signal: over whole periods the
    // sine integrates to zero, so any leftover fraction would show up.
    Series s;
    for (double t = 0.0; t <= 2.6 * c.period(); t += 0.25) {
        s.times.push_back(t);
        s.abs_u.push_back(1.0 + std::sin(2.0 * kPi * c.frequency * t));
    }
    const CorrelationResult r = correlate(s.times, s.abs_u, c, 1.0);
    CHECK(std::abs(r.integral) < 1e-5);
}

TEST_CASE("correlation is linear in the envelope") {
    const CarrierSpec c;
    const Series s = cosine_series(c, 1.0, 0.6, 0.0, 3.0 * c.period(), 0.5);
    std::vector<double> scaled(s.abs_u);
    for (double& v : scaled) v *= 3.0;
    const double r1 = correlate(s.times, s.abs_u, c, 1.0).integral;
    const double r3 = correlate(s.times, scaled, c, 1.0).integral;
    CHECK(r3 == doctest::Approx(3.0 * r1).epsilon(1e-10));
}

TEST_CASE("short windows are rejected") {
    const CarrierSpec c;
    const Series s = cosine_series(c, 1.0, 1.0, 0.0, 1.5 * c.period(), 0.5);
    CHECK_THROWS_AS(correlate(s.times, s.abs_u, c, 1.0), WindowTooShortError);
    const std::vector<double> one{0.0};
    CHECK_THROWS_AS(correlate(one, one, c, 1.0), PreconditionError);
}

TEST_CASE("gate runs decode through the correlation readout") {
    const CarrierSpec c;
    const double r_ref = reference_amplitude({}, kDefaultGain);
    CHECK(decode_gate_run(run_logic_gate(GateKind::Nand, Digit::zero, Digit::zero), c, r_ref) ==
          Digit::one);
    CHECK(decode_gate_run(run_logic_gate(GateKind::And, Digit::one, Digit::zero), c, r_ref) ==
          Digit::zero);
    CHECK(decode_gate_run(run_logic_gate(GateKind::Or, Digit::zero, Digit::zero), c, r_ref) ==
          Digit::zero);
}

TEST_CASE("sub-threshold drive never leaves the quiescent state") {
    const CarrierSpec c;
    const double gain = 0.05;  // below the Hopf threshold -lambda = 0.1
    const Trajectory traj = run_logic_gate(GateKind::Or, Digit::one, Digit::one, {}, c, gain);
    const double r_ref = reference_amplitude({}, gain);
    CHECK_THROWS_AS(decode_gate_run(traj, c, r_ref), IndeterminateError);
}

TEST_CASE("gate decode requires three carrier periods") {
    const CarrierSpec c;
    Trajectory traj;
    const Series s = cosine_series(c, 1.0, 1.0, 0.0, 2.5 * c.period(), 10.0);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        traj.times.push_back(s.times[i]);
        traj.u.push_back(Eigen::VectorXcd::Constant(1, s.abs_u[i]));
        traj.v.push_back(Eigen::VectorXd::Zero(1));
    }
    CHECK_THROWS_AS(correlate_gate_run(traj, c, 1.0), WindowTooShortError);
}

TEST_CASE("multiplex decode needs ten slow periods") {
    const CarrierSpec c;
    Trajectory traj;
    for (double t = 0.0; t <= 5.0 * c.period(); t += 10.0) {
        traj.times.push_back(t);
        traj.u.push_back(Eigen::VectorXcd::Constant(1, 1.0));
        traj.v.push_back(Eigen::VectorXd::Zero(1));
    }
    CHECK_THROWS_AS(decode_multiplex(traj, {c}, 1.0), WindowTooShortError);
}

TEST_CASE("burst events find carrier-locked peaks") {
    const CarrierSpec c;
    Series s;
    for (double t = 0.0; t <= 5.0 * c.period(); t += 0.4) {
        s.times.push_back(t);
        s.abs_u.push_back(std::max(0.0, std::cos(2.0 * kPi * c.frequency * t)));
    }
    const auto events = burst_events(s.times, s.abs_u, c);
    CHECK(events.size() == 4);  // interior maxima at T, 2T, 3T, 4T
    for (std::size_t k = 0; k < events.size(); ++k) {
        CHECK(events[k].peak_time ==
              doctest::Approx((static_cast<double>(k) + 1.0) * c.period()).epsilon(1e-9));
        CHECK(events[k].peak_height == doctest::Approx(1.0));
        CHECK(std::abs(events[k].carrier_phase) < 1e-9);
    }
}

TEST_CASE("anti-phase bursts carry phase pi") {
    const CarrierSpec c;
    Series s;
    for (double t = 0.0; t <= 5.0 * c.period(); t += 0.4) {
        s.times.push_back(t);
        s.abs_u.push_back(std::max(0.0, -std::cos(2.0 * kPi * c.frequency * t)));
    }
    const auto events = burst_events(s.times, s.abs_u, c);
    CHECK(events.size() == 5);  // maxima at T/2, 3T/2, ..., 9T/2
    // Accumulated sample times can land the wrapped phase on either side of
    // +/-pi, so compare magnitudes.
    for (const auto& e : events) CHECK(std::abs(e.carrier_phase) == doctest::Approx(kPi).epsilon(1e-9));
}

TEST_CASE("burst events on a silent series are empty") {
    const CarrierSpec c;
    const std::vector<double> times{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> zeros(times.size(), 0.0);
    CHECK(burst_events(times, zeros, c).empty());
    CHECK_THROWS_AS(burst_events(times, zeros, c, 1.5), PreconditionError);
}

TEST_CASE("phase lock offset of a sequence against itself is zero") {
    std::vector<BurstEvent> a{{100.0, 1.0, 0.1}, {500.0, 1.1, 0.2}, {900.0, 0.9, 0.15}};
    const auto [phase, delay] = phase_lock_offset(a, a);
    CHECK(phase == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(delay == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("phase lock offset pairs by nearest peak time") {
    std::vector<BurstEvent> a{{100.0, 1.0, 0.0}, {500.0, 1.0, 0.0}, {900.0, 1.0, 0.0}};
    std::vector<BurstEvent> b{{200.0, 1.0, kPi / 2.0},
                              {600.0, 1.0, kPi / 2.0},
                              {1000.0, 1.0, kPi / 2.0}};
    const auto [phase, delay] = phase_lock_offset(a, b);
    CHECK(phase == doctest::Approx(kPi / 2.0));
    CHECK(delay == doctest::Approx(100.0));
}

TEST_CASE("opposed phases average to +pi, not -pi") {
    std::vector<BurstEvent> a{{100.0, 1.0, 0.0}, {500.0, 1.0, 0.0}};
    std::vector<BurstEvent> b{{300.0, 1.0, kPi}, {700.0, 1.0, kPi}};
    const auto [phase, delay] = phase_lock_offset(a, b);
    CHECK(phase == doctest::Approx(kPi).epsilon(1e-6));
    CHECK(delay == doctest::Approx(200.0));
}

TEST_CASE("unpairable burst sequences are rejected") {
    std::vector<BurstEvent> a{{100.0, 1.0, 0.0}};
    std::vector<BurstEvent> empty;
    std::vector<BurstEvent> three{{100.0, 1.0, 0.0}, {200.0, 1.0, 0.0}, {300.0, 1.0, 0.0}};
    CHECK_THROWS_AS(phase_lock_offset(a, empty), UnpairableEventsError);
    CHECK_THROWS_AS(phase_lock_offset(a, three), UnpairableEventsError);
}

TEST_CASE("wrap_phase lands in (-pi, pi]") {
    CHECK(wrap_phase(0.0) == doctest::Approx(0.0));
    CHECK(wrap_phase(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(2.5 * kPi) == doctest::Approx(0.5 * kPi));
    CHECK(wrap_phase(-2.5 * kPi) == doctest::Approx(-0.5 * kPi));
}
