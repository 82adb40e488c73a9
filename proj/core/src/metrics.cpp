#include "dcf/metrics.hpp"

#include "dcf/error.hpp"

#include <algorithm>
#include <cmath>

namespace dcf {

double airtime_us(double bytes, double rate_bps) { return 8.0 * bytes / rate_bps * 1e6; }

double payload_airtime_us(const MacParams& mac) { return airtime_us(mac.payload_bytes, mac.data_rate_bps); }

SlotDurations slot_durations(const MacParams& mac) {
    const double phy_header = airtime_us(mac.phy_header_bytes, mac.ctrl_rate_bps);
    const double data_frame =
        phy_header + airtime_us(static_cast<double>(mac.mac_header_bytes) + mac.payload_bytes, mac.data_rate_bps);
    const double ack_frame = phy_header + airtime_us(mac.ack_bytes, mac.ctrl_rate_bps);

    SlotDurations sd{};
    sd.sigma_us = mac.slot_time_us;
    sd.t_s_us = data_frame + mac.sifs_us + ack_frame + mac.difs_us;
    sd.t_c_us = data_frame + mac.ack_timeout_us;
    sd.t_e_us = sd.t_c_us;
    return sd;
}

double p_t(int n, double tau) { return -std::expm1(n * std::log1p(-tau)); }

std::optional<double> p_s(int n, double tau, double p_cap) {
    const double pt = p_t(n, tau);
    if (pt <= 0.0) return std::nullopt;
    const double single = n * tau * std::pow(1.0 - tau, n - 1);
    const double ratio = (single + p_cap) / pt;
    if (ratio > 1.0 + 1e-12) throw Error("P_s exceeds 1: capture mass larger than the collision mass");
    return std::min(ratio, 1.0);
}

SlotProbabilities slot_probabilities(int n, double tau, double p_cap) {
    return {p_t(n, tau), p_s(n, tau, p_cap).value_or(0.0)};
}

double expected_slot(const SlotDurations& sd, const SlotProbabilities& sp, double p_e) {
    return (1.0 - sp.p_t) * sd.sigma_us + sp.p_t * (1.0 - sp.p_s) * sd.t_c_us + sp.p_t * sp.p_s * p_e * sd.t_e_us +
           sp.p_t * sp.p_s * (1.0 - p_e) * sd.t_s_us;
}

double throughput(const SlotDurations& sd, const SlotProbabilities& sp, double p_e, double payload_airtime_us) {
    const double delivered = sp.p_t * sp.p_s * (1.0 - p_e);
    if (delivered == 0.0) return 0.0;
    return delivered * payload_airtime_us / expected_slot(sd, sp, p_e);
}

}  // namespace dcf
