#include "dcf/sim.hpp"

#include "dcf/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace dcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kShortHorizonSlots = 10000;

}  // namespace

std::string_view to_string(SlotKind kind) {
    switch (kind) {
        case SlotKind::idle: return "idle";
        case SlotKind::success: return "success";
        case SlotKind::capture: return "capture";
        case SlotKind::collision: return "collision";
        case SlotKind::channel_error: return "channel_error";
    }
    return "?";
}

World::World(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr, std::uint64_t seed,
             int queue_capacity, const BerModel& ber)
    : w_min_(mac.w_min),
      m_(mac.m),
      capacity_(queue_capacity),
      saturated_(tr.saturated),
      lambda_per_us_(tr.lambda_pkt_s * 1e-6),
      p_e_(fer(mac, ch, ber)),
      capture_(CaptureParams::from_channel(ch)),
      slots_(slot_durations(mac)),
      stations_(static_cast<std::size_t>(tr.n_stations)),
      channel_rng_(derive_seed(seed, 0)) {
    if (queue_capacity < 1) throw Error("queue capacity must be >= 1");
    station_rng_.reserve(stations_.size());
    for (std::size_t i = 0; i < stations_.size(); ++i) station_rng_.emplace_back(derive_seed(seed, i + 1));

    for (int i = 0; i < n_stations(); ++i) {
        auto& st = stations_[i];
        if (saturated_) {
            st.queue_len = capacity_;
            st.next_arrival_time_us = kInf;
            draw_backoff(i);
        } else {
            st.next_arrival_time_us = lambda_per_us_ > 0.0 ? station_rng_[i].exponential(lambda_per_us_) : kInf;
        }
    }
}

void World::draw_backoff(int i) {
    auto& st = stations_[i];
    st.backoff_counter = static_cast<int>(station_rng_[i].below(static_cast<std::uint64_t>(w_min_) << st.stage));
}

void World::admit_arrivals(double until_us, std::vector<int>& woken) {
    if (saturated_) return;
    for (int i = 0; i < n_stations(); ++i) {
        auto& st = stations_[i];
        while (st.next_arrival_time_us < until_us) {
            ++arrivals_;
            if (st.queue_len < capacity_) {
                if (st.queue_len == 0) woken.push_back(i);
                ++st.queue_len;
            } else {
                ++drops_;
            }
            st.next_arrival_time_us += station_rng_[i].exponential(lambda_per_us_);
        }
    }
}

SlotOutcome World::step_slot() {
    transmitters_.clear();
    for (int i = 0; i < n_stations(); ++i) {
        if (stations_[i].active() && stations_[i].backoff_counter == 0) transmitters_.push_back(i);
    }

    SlotOutcome out;
    out.transmitters = static_cast<int>(transmitters_.size());
    int winner = -1;
    if (transmitters_.empty()) {
        out.kind = SlotKind::idle;
        out.duration_us = slots_.sigma_us;
    } else {
        if (transmitters_.size() == 1) {
            winner = transmitters_.front();
        } else if (channel_rng_.bernoulli(capture_given_i(capture_, out.transmitters - 1))) {
            winner = transmitters_[channel_rng_.below(transmitters_.size())];
            out.captured = true;
        }
        if (winner < 0) {
            out.kind = SlotKind::collision;
            out.duration_us = slots_.t_c_us;
        } else if (channel_rng_.bernoulli(p_e_)) {
            out.kind = SlotKind::channel_error;
            out.station = winner;
            out.duration_us = slots_.t_e_us;
        } else {
            out.kind = out.captured ? SlotKind::capture : SlotKind::success;
            out.station = winner;
            out.duration_us = slots_.t_s_us;
        }
    }

    // Arrivals during the slot see the queues as they were before any
    // departure at its end; idle stations woken here start next slot.
    woken_.clear();
    admit_arrivals(now_us_ + out.duration_us, woken_);

    for (int i = 0; i < n_stations(); ++i) {
        auto& st = stations_[i];
        if (st.active() && st.backoff_counter > 0 && std::find(woken_.begin(), woken_.end(), i) == woken_.end()) {
            --st.backoff_counter;
        }
    }

    const bool delivered = out.kind == SlotKind::success || out.kind == SlotKind::capture;
    for (int i : transmitters_) {
        auto& st = stations_[i];
        if (delivered && i == winner) {
            if (!saturated_) --st.queue_len;
            if (st.active()) {
                st.stage = 0;
                draw_backoff(i);
            }
        } else {
            st.stage = std::min(st.stage + 1, m_);
            draw_backoff(i);
        }
    }

    for (int i : woken_) {
        stations_[i].stage = 0;
        draw_backoff(i);
    }

    now_us_ += out.duration_us;
    ++slot_index_;
    return out;
}

double SimReport::tau_hat() const {
    return active_station_slots > 0 ? static_cast<double>(attempts) / static_cast<double>(active_station_slots) : 0.0;
}

double SimReport::capture_rate() const {
    const auto slots = total_slots();
    return slots > 0 ? static_cast<double>(captures) / static_cast<double>(slots) : 0.0;
}

double ci95_halfwidth(const std::vector<double>& samples) {
    const auto n = samples.size();
    if (n < 2) return kInf;
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    return boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(static_cast<double>(n));
}

SimReport run(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr, const SimConfig& sim,
              std::ostream* trace, const BerModel& ber) {
    validate(sim);
    World world(mac, ch, tr, sim.seed, sim.queue_capacity, ber);
    const int batches = sim.sim_batches;
    const bool by_slots = sim.sim_slots > 0;
    const double bit_time_us = 1e6 / mac.data_rate_bps;

    struct Batch {
        double time_us = 0.0;
        double bits = 0.0;
        std::int64_t slots = 0;
        std::int64_t captures = 0;
        std::int64_t attempts = 0;
        std::int64_t active = 0;
    };
    std::vector<Batch> acc(static_cast<std::size_t>(batches));

    SimReport rep;
    rep.seed = sim.seed;
    const double payload_bits = 8.0 * mac.payload_bytes;
    if (trace) *trace << "slot_index,outcome,station,duration_us\n";

    while (by_slots ? world.slot_index() < sim.sim_slots : world.now_us() < sim.sim_horizon_us) {
        const std::int64_t index = world.slot_index();
        const int b = by_slots ? static_cast<int>(index * batches / sim.sim_slots)
                               : std::min(batches - 1, static_cast<int>(world.now_us() * batches / sim.sim_horizon_us));
        int active = 0;
        for (int i = 0; i < world.n_stations(); ++i) active += world.station(i).active() ? 1 : 0;

        const SlotOutcome out = world.step_slot();
        auto& batch = acc[static_cast<std::size_t>(b)];
        batch.time_us += out.duration_us;
        ++batch.slots;
        batch.attempts += out.transmitters;
        batch.active += active;
        rep.attempts += out.transmitters;
        rep.active_station_slots += active;
        if (out.captured) {
            ++batch.captures;
            ++rep.captures;
        }
        switch (out.kind) {
            case SlotKind::idle: ++rep.slots_idle; break;
            case SlotKind::success:
            case SlotKind::capture:
                ++rep.slots_success;
                batch.bits += payload_bits;
                rep.payload_bits_delivered += payload_bits;
                break;
            case SlotKind::collision: ++rep.slots_collision; break;
            case SlotKind::channel_error: ++rep.slots_error; break;
        }
        if (trace) {
            *trace << index << ',' << to_string(out.kind) << ',' << out.station << ',' << out.duration_us << '\n';
        }
    }

    rep.sim_time_us = world.now_us();
    rep.arrivals = world.arrivals();
    rep.drops = world.drops();
    rep.throughput = rep.sim_time_us > 0.0 ? rep.payload_bits_delivered * bit_time_us / rep.sim_time_us : 0.0;
    for (const auto& batch : acc) {
        rep.batch_throughput.push_back(batch.time_us > 0.0 ? batch.bits * bit_time_us / batch.time_us : 0.0);
        rep.batch_capture_rate.push_back(batch.slots > 0 ? static_cast<double>(batch.captures) / batch.slots : 0.0);
        rep.batch_tau.push_back(batch.active > 0 ? static_cast<double>(batch.attempts) / batch.active : 0.0);
    }
    rep.ci95_halfwidth = ci95_halfwidth(rep.batch_throughput);
    rep.short_horizon = rep.total_slots() < kShortHorizonSlots;
    return rep;
}

}  // namespace dcf
