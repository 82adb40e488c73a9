#include "dcf/capture.hpp"

#include "dcf/error.hpp"
#include "dcf/phy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dcf {

CaptureParams CaptureParams::from_channel(const ChannelParams& ch) {
    return {db_to_linear(ch.z0_db), processing_gain_inverse(ch.spreading_factor)};
}

double processing_gain_inverse(int spreading_factor) {
    if (spreading_factor < 1) throw Error("spreading_factor must be >= 1");
    return 2.0 / (3.0 * spreading_factor);
}

double capture_given_i(const CaptureParams& cp, int interferers) {
    if (interferers < 0) throw Error("interferer count must be >= 0");
    if (interferers == 0) return 1.0;
    if (std::isinf(cp.z0_linear)) return 0.0;
    return std::pow(1.0 + cp.z0_linear * cp.g_sf, -interferers);
}

double p_cap(const CaptureParams& cp, int n, double tau) {
    if (n < 1) throw Error("station count must be >= 1");
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error("tau must lie in [0, 1]");
    if (n == 1 || tau == 0.0 || std::isinf(cp.z0_linear)) return 0.0;
    if (tau == 1.0) return capture_given_i(cp, n - 1);

    // Terms C(n, i+1) tau^(i+1) (1-tau)^(n-i-1) / (1 + z0 g)^i in log space.
    const double log_tau = std::log(tau);
    const double log_idle = std::log1p(-tau);
    const double log_ratio = std::log1p(cp.z0_linear * cp.g_sf);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - 1));
    double log_binom = std::log(static_cast<double>(n));  // log C(n, 1)
    for (int i = 1; i <= n - 1; ++i) {
        const int k = i + 1;
        log_binom += std::log(static_cast<double>(n - k + 1)) - std::log(static_cast<double>(k));
        const double log_term = log_binom + k * log_tau + (n - k) * log_idle - i * log_ratio;
        terms.push_back(std::exp(log_term));
    }
    // All terms are positive: smallest first.
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return std::clamp(sum, 0.0, 1.0);
}

double p_multi(int n, double tau) {
    if (n < 2) return 0.0;
    const double none = std::pow(1.0 - tau, n);
    const double one = n * tau * std::pow(1.0 - tau, n - 1);
    return std::max(0.0, 1.0 - none - one);
}

}  // namespace dcf
