#ifndef STNO_READOUT_HPP
#define STNO_READOUT_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stno/logic_encoding.hpp"
#include "stno/stno_network.hpp"

namespace stno {

inline constexpr double kIndeterminacyFraction = 0.05;
inline constexpr double kDefaultBurstFraction = 0.5;

struct CorrelationResult {
    double integral = 0.0;               // time-average of |u| * p over the window
    std::optional<Digit> digit;          // empty when |integral| <= threshold
    double confidence = 0.0;             // |integral| / threshold
    double threshold = 0.0;
};

/// Correlation threshold: 5% of the maximum achievable integral
/// 0.5 * A_p * r_ref.
inline double correlation_threshold(const CarrierSpec& carrier, double r_ref) {
    return kIndeterminacyFraction * 0.5 * carrier.amplitude * r_ref;
}

/// Trapezoidal time-average of abs_u(t) * p(t) over the largest integer
/// number of carrier periods that fits the sampled window (trimmed from the
/// front).  Requires at least two full periods.
CorrelationResult correlate(std::span<const double> times, std::span<const double> abs_u,
                            const CarrierSpec& carrier, double r_ref = 1.0);

/// Correlation of a gate run after dropping the first third as transient.
CorrelationResult correlate_gate_run(const Trajectory& traj, const CarrierSpec& carrier,
                                     double r_ref = 1.0, int node = 0);

/// Correlation readout of a single-gate run: drops the first third of the
/// trajectory as transient, correlates the rest.
Digit decode_gate_run(const Trajectory& traj, const CarrierSpec& carrier, double r_ref = 1.0,
                      int node = 0);

/// Per-carrier correlation over the shared window of a multiplexed run.
/// Requires >= 10 periods of the slowest carrier.
std::vector<Digit> decode_multiplex(const Trajectory& traj,
                                    const std::vector<CarrierSpec>& carriers,
                                    double r_ref = 1.0, int node = 0);

struct BurstEvent {
    double peak_time = 0.0;
    double peak_height = 0.0;
    double carrier_phase = 0.0;  // radians in (-pi, pi]
};

/// Local maxima of |u| above threshold_fraction * max(|u|), separated by at
/// least half a carrier period.
std::vector<BurstEvent> burst_events(std::span<const double> times,
                                     std::span<const double> abs_u, const CarrierSpec& carrier,
                                     double threshold_fraction = kDefaultBurstFraction);

/// Circular-mean phase difference and mean time delay (b relative to a),
/// pairing events by nearest peak time.
std::pair<double, double> phase_lock_offset(std::span<const BurstEvent> events_a,
                                            std::span<const BurstEvent> events_b);

/// Wraps an angle to (-pi, pi].
double wrap_phase(double phi);

}  // namespace stno

#endif
