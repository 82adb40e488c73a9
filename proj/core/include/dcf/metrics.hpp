#pragma once

#include "dcf/config.hpp"

#include <optional>

namespace dcf {

/// Channel-busy durations of each slot type, microseconds.
struct SlotDurations {
    double sigma_us;  ///< empty backoff slot
    double t_s_us;    ///< successful DATA + ACK exchange
    double t_c_us;    ///< collision
    double t_e_us;    ///< DATA frame lost to channel errors
};

struct SlotProbabilities {
    double p_t;  ///< at least one transmission in the slot
    double p_s;  ///< a transmission succeeds (alone or captured), given one occurs
};

/// Airtime of `bytes` at `rate_bps`, microseconds.
double airtime_us(double bytes, double rate_bps);

/// Payload airtime at the data rate.
double payload_airtime_us(const MacParams& mac);

/// Basic-access (DATA/ACK) durations:
///   T_s = H + PL + SIFS + ACK + DIFS,  T_c = T_e = H + PL + ACK timeout,
/// where H is the PHY header at the control rate plus the MAC header at the
/// data rate and ACK includes its own PHY header. Propagation delay is not
/// added; with the 802.11b defaults both T_s and T_c come to 8812 us.
SlotDurations slot_durations(const MacParams& mac);

/// 1 - (1 - tau)^n.
double p_t(int n, double tau);

/// (n tau (1-tau)^(n-1) + p_cap) / P_t, or nullopt when P_t is zero.
/// Throws if the ratio exceeds 1 by more than 1e-12.
std::optional<double> p_s(int n, double tau, double p_cap);

/// Slot probabilities at (n, tau, p_cap); p_s is 0 when P_t is 0.
SlotProbabilities slot_probabilities(int n, double tau, double p_cap);

/// Mean real-time length of one chain slot.
double expected_slot(const SlotDurations& sd, const SlotProbabilities& sp, double p_e);

/// Fraction of channel time spent carrying successfully delivered payload.
double throughput(const SlotDurations& sd, const SlotProbabilities& sp, double p_e, double payload_airtime_us);

}  // namespace dcf
