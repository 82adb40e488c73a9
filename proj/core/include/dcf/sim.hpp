#pragma once

#include "dcf/capture.hpp"
#include "dcf/config.hpp"
#include "dcf/metrics.hpp"
#include "dcf/phy.hpp"
#include "dcf/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace dcf {

struct StationState {
    int backoff_counter = 0;
    int stage = 0;
    /// Packets held, including the one in service. 0 means idle.
    int queue_len = 0;
    double next_arrival_time_us = 0.0;

    bool active() const { return queue_len > 0; }
};

enum class SlotKind { idle, success, capture, collision, channel_error };

std::string_view to_string(SlotKind kind);

struct SlotOutcome {
    SlotKind kind = SlotKind::idle;
    /// Delivering (or errored) station; -1 for idle and collision slots.
    int station = -1;
    int transmitters = 0;
    double duration_us = 0.0;
    /// A capture draw succeeded; the frame may still be lost to channel errors.
    bool captured = false;
};

/// N stations running DCF basic access on a slotted channel. Every station
/// in backoff with counter 0 transmits; all other backoff counters drop by
/// one per slot, busy or idle. Arrivals are Poisson per station; an arrival
/// finding queue_capacity packets is dropped. Packets stay at stage m after
/// repeated failures and are never discarded.
class World {
public:
    World(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr, std::uint64_t seed,
          int queue_capacity = 1, const BerModel& ber = {});

    /// Plays one slot and advances the clock by its duration.
    SlotOutcome step_slot();

    double now_us() const { return now_us_; }
    std::int64_t slot_index() const { return slot_index_; }
    double p_e() const { return p_e_; }
    const SlotDurations& durations() const { return slots_; }
    int n_stations() const { return static_cast<int>(stations_.size()); }

    const StationState& station(int i) const { return stations_[i]; }
    /// Direct access for tests that stage a particular configuration.
    StationState& station(int i) { return stations_[i]; }

    std::int64_t arrivals() const { return arrivals_; }
    std::int64_t drops() const { return drops_; }

private:
    void draw_backoff(int i);
    void admit_arrivals(double until_us, std::vector<int>& woken);

    int w_min_;
    int m_;
    int capacity_;
    bool saturated_;
    double lambda_per_us_;
    double p_e_;
    CaptureParams capture_;
    SlotDurations slots_;
    std::vector<StationState> stations_;
    std::vector<Rng> station_rng_;
    Rng channel_rng_;
    double now_us_ = 0.0;
    std::int64_t slot_index_ = 0;
    std::int64_t arrivals_ = 0;
    std::int64_t drops_ = 0;
    std::vector<int> transmitters_;
    std::vector<int> woken_;
};

struct SimReport {
    std::uint64_t seed = 0;
    double sim_time_us = 0.0;
    double payload_bits_delivered = 0.0;
    std::int64_t slots_idle = 0;
    std::int64_t slots_success = 0;  ///< includes captured deliveries
    std::int64_t slots_collision = 0;
    std::int64_t slots_error = 0;
    std::int64_t captures = 0;  ///< capture events, errored or not
    std::int64_t attempts = 0;  ///< frames sent
    std::int64_t active_station_slots = 0;
    std::int64_t arrivals = 0;
    std::int64_t drops = 0;
    double throughput = 0.0;
    double ci95_halfwidth = 0.0;
    /// Fewer than 1e4 slots were played; the interval is unreliable.
    bool short_horizon = false;

    std::vector<double> batch_throughput;
    std::vector<double> batch_capture_rate;
    std::vector<double> batch_tau;

    std::int64_t total_slots() const { return slots_idle + slots_success + slots_collision + slots_error; }
    /// Attempts per slot spent by a station in backoff.
    double tau_hat() const;
    double capture_rate() const;
};

/// Half-width of the 95% Student-t interval on the mean of `samples`.
double ci95_halfwidth(const std::vector<double>& samples);

/// Runs until sim.sim_slots slots (if nonzero) or sim.sim_horizon_us of
/// simulated time, split into sim.sim_batches batches for the interval.
/// Writes `slot_index,outcome,station,duration_us` lines to `trace` if given.
SimReport run(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr, const SimConfig& sim,
              std::ostream* trace = nullptr, const BerModel& ber = {});

}  // namespace dcf
