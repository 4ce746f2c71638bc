#include "stno/readout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stno {

double wrap_phase(double phi) {
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi > kPi) phi -= 2.0 * kPi;
    if (phi <= -kPi) phi += 2.0 * kPi;
    return phi;
}

namespace {

// Linear interpolation of the series at time t; assumes t within range.
double interp(std::span<const double> times, std::span<const double> values, double t,
              std::size_t hint) {
    std::size_t i = hint;
    while (i + 1 < times.size() && times[i + 1] < t) ++i;
    if (i + 1 >= times.size()) return values.back();
    const double h = times[i + 1] - times[i];
    if (h <= 0.0) return values[i];
    const double w = (t - times[i]) / h;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

}  // namespace

CorrelationResult correlate(std::span<const double> times, std::span<const double> abs_u,
                            const CarrierSpec& carrier, double r_ref) {
    if (times.size() != abs_u.size() || times.size() < 2)
        throw PreconditionError("correlate needs matching, non-trivial sample series");
    const double T = carrier.period();
    const double span_len = times.back() - times.front();
    const int n_per = static_cast<int>(std::floor(span_len / T + 1e-9));
    if (n_per < 2)
        throw WindowTooShortError("correlation window spans " + std::to_string(span_len / T) +
                                  " carrier periods; need at least 2");

    // Trim from the front to an integer number of periods ending at the
    // last sample.
    const double t_start = times.back() - n_per * T;
    std::size_t first = 0;
    while (first + 1 < times.size() && times[first + 1] <= t_start) ++first;

    auto product = [&](double t, double au) { return au * carrier_value(carrier, t); };

    double integral = 0.0;
    double prev_t = t_start;
    double prev_p = product(t_start, interp(times, abs_u, t_start, first));
    for (std::size_t i = first + 1; i < times.size(); ++i) {
        if (times[i] <= t_start) continue;
        const double p = product(times[i], abs_u[i]);
        integral += 0.5 * (prev_p + p) * (times[i] - prev_t);
        prev_t = times[i];
        prev_p = p;
    }
    integral /= n_per * T;

    CorrelationResult res;
    res.integral = integral;
    res.threshold = correlation_threshold(carrier, r_ref);
    res.confidence = std::abs(integral) / res.threshold;
    if (integral > res.threshold)
        res.digit = Digit::one;
    else if (integral < -res.threshold)
        res.digit = Digit::zero;
    return res;
}

namespace {

// Sub-series of a trajectory node from t_cut onward.
struct CutSeries {
    std::vector<double> times;
    std::vector<double> abs_u;
};

CutSeries cut_transient(const Trajectory& traj, int node, double fraction) {
    const double t0 = traj.times.front();
    const double t_cut = t0 + fraction * (traj.times.back() - t0);
    // Start at the last sample at or before the cut so the retained window
    // never quantizes below the correlation's minimum period count.
    std::size_t start = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] <= t_cut) start = i;
    CutSeries out;
    for (std::size_t i = start; i < traj.times.size(); ++i) {
        out.times.push_back(traj.times[i]);
        out.abs_u.push_back(std::abs(traj.u[i][node]));
    }
    return out;
}

}  // namespace

CorrelationResult correlate_gate_run(const Trajectory& traj, const CarrierSpec& carrier,
                                     double r_ref, int node) {
    if (traj.times.size() < 2) throw PreconditionError("empty trajectory");
    if (traj.times.back() - traj.times.front() < 3.0 * carrier.period() - 1e-9)
        throw WindowTooShortError("gate decode needs at least 3 carrier periods");
    const CutSeries s = cut_transient(traj, node, 1.0 / 3.0);
    return correlate(s.times, s.abs_u, carrier, r_ref);
}

Digit decode_gate_run(const Trajectory& traj, const CarrierSpec& carrier, double r_ref,
                      int node) {
    const CorrelationResult res = correlate_gate_run(traj, carrier, r_ref, node);
    if (!res.digit)
        throw IndeterminateError("correlation integral " + std::to_string(res.integral) +
                                 " within +/-" + std::to_string(res.threshold));
    return *res.digit;
}

std::vector<Digit> decode_multiplex(const Trajectory& traj,
                                    const std::vector<CarrierSpec>& carriers, double r_ref,
                                    int node) {
    if (carriers.empty()) throw PreconditionError("no carriers to decode");
    double slowest = carriers.front().period();
    for (const auto& c : carriers) slowest = std::max(slowest, c.period());
    if (traj.times.back() - traj.times.front() < 10.0 * slowest - 1e-9)
        throw WindowTooShortError("multiplex decode needs >= 10 periods of the slowest carrier");
    const CutSeries s = cut_transient(traj, node, 1.0 / 3.0);
    std::vector<Digit> digits;
    digits.reserve(carriers.size());
    for (const auto& c : carriers) {
        const CorrelationResult res = correlate(s.times, s.abs_u, c, r_ref);
        if (!res.digit)
            throw IndeterminateError("indeterminate channel at frequency " +
                                     std::to_string(c.frequency));
        digits.push_back(*res.digit);
    }
    return digits;
}

std::vector<BurstEvent> burst_events(std::span<const double> times,
                                     std::span<const double> abs_u, const CarrierSpec& carrier,
                                     double threshold_fraction) {
    if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0)
        throw PreconditionError("burst threshold fraction must be in (0, 1)");
    if (times.size() != abs_u.size() || times.size() < 3) return {};
    const double peak = *std::max_element(abs_u.begin(), abs_u.end());
    if (peak <= 0.0) return {};
    const double thr = threshold_fraction * peak;
    const double min_sep = 0.5 * carrier.period();

    std::vector<BurstEvent> events;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        if (abs_u[i] < thr) continue;
        if (abs_u[i] < abs_u[i - 1] || abs_u[i] < abs_u[i + 1]) continue;
        BurstEvent e{times[i], abs_u[i],
                     wrap_phase(2.0 * kPi * carrier.frequency * times[i] + carrier.phase)};
        if (!events.empty() && e.peak_time - events.back().peak_time < min_sep) {
            if (e.peak_height > events.back().peak_height) events.back() = e;
        } else {
            events.push_back(e);
        }
    }
    return events;
}

std::pair<double, double> phase_lock_offset(std::span<const BurstEvent> events_a,
                                            std::span<const BurstEvent> events_b) {
    if (events_a.empty() || events_b.empty())
        throw UnpairableEventsError("cannot pair with an empty burst sequence");
    const auto na = events_a.size();
    const auto nb = events_b.size();
    if (na > nb + 1 || nb > na + 1)
        throw UnpairableEventsError("burst counts differ by more than one (" +
                                    std::to_string(na) + " vs " + std::to_string(nb) + ")");

    auto nearest = [](std::span<const BurstEvent> seq, double t) {
        std::size_t best = 0;
        double best_d = std::abs(seq[0].peak_time - t);
        for (std::size_t i = 1; i < seq.size(); ++i) {
            const double d = std::abs(seq[i].peak_time - t);
            if (d < best_d) {  // ties keep the earlier event
                best_d = d;
                best = i;
            }
        }
        return best;
    };

    double sum_sin = 0.0, sum_cos = 0.0, sum_delay = 0.0;
    std::size_t count = 0;
    if (nb <= na) {
        for (const auto& eb : events_b) {
            const auto& ea = events_a[nearest(events_a, eb.peak_time)];
            const double dphi = wrap_phase(eb.carrier_phase - ea.carrier_phase);
            sum_sin += std::sin(dphi);
            sum_cos += std::cos(dphi);
            sum_delay += eb.peak_time - ea.peak_time;
            ++count;
        }
    } else {
        for (const auto& ea : events_a) {
            const auto& eb = events_b[nearest(events_b, ea.peak_time)];
            const double dphi = wrap_phase(eb.carrier_phase - ea.carrier_phase);
            sum_sin += std::sin(dphi);
            sum_cos += std::cos(dphi);
            sum_delay += eb.peak_time - ea.peak_time;
            ++count;
        }
    }
    double mean_phase = std::atan2(sum_sin, sum_cos);
    if (std::abs(sum_sin) < 1e-12 && sum_cos < 0.0) mean_phase = kPi;  // land on +pi
    return {mean_phase, sum_delay / static_cast<double>(count)};
}

}  // namespace stno
