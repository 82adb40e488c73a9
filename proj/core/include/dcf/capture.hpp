#pragma once

#include "dcf/config.hpp"

namespace dcf {

/// Capture model of power-controlled DSSS stations over Rayleigh fading.
struct CaptureParams {
    double z0_linear;  ///< capture ratio, linear; +inf disables capture
    double g_sf;       ///< inverse processing gain g(S_f)

    static CaptureParams from_channel(const ChannelParams& ch);
};

/// g(S_f) = 2 / (3 S_f).
double processing_gain_inverse(int spreading_factor);

/// Probability that one frame survives i simultaneous interferers:
/// 1 / (1 + z0 g)^i.
double capture_given_i(const CaptureParams& cp, int interferers);

/// Per-slot probability that two or more of n stations transmit (each with
/// probability tau) and one frame is captured. Exactly 0 when capture is
/// disabled.
double p_cap(const CaptureParams& cp, int n, double tau);

/// Probability that two or more of n stations transmit in a slot.
double p_multi(int n, double tau);

}  // namespace dcf
