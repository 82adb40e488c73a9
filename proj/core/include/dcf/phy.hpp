#pragma once

#include "dcf/config.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace dcf {

struct BerQuery {
    Modulation modulation = Modulation::dbpsk;
    /// Mean SNR over the fading channel, linear scale.
    double snr_linear = 0.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Average bit error rate of coherent M-PSK over Rayleigh fading, evaluated
/// by Gauss-Legendre quadrature of the angular (MGF) integral on [0, pi/2].
/// M = 2 for DBPSK and 4 for DQPSK. Panels are bisected until the 64- and
/// 128-node rules agree to 1e-10 relative; throws QuadratureError otherwise.
double ber_rayleigh_mpsk(int constellation_size, double snr_linear);

/// Bit error model per modulation. DBPSK and DQPSK are built in; CCK rates
/// have no closed form here and must be registered by the caller.
class BerModel {
public:
    using BerFunction = std::function<double(double snr_linear)>;

    void register_ber(Modulation mod, BerFunction fn);
    bool supports(Modulation mod) const;

    /// Throws UnsupportedModulation for CCK without a registered function.
    double ber(const BerQuery& q) const;

private:
    std::map<Modulation, BerFunction> custom_;
};

/// ber() with the built-in model only.
double ber_rayleigh(const BerQuery& q);

/// Frame error rate of a data frame: PLCP header bits at DBPSK, MAC header
/// and payload bits at the channel's modulation, bit errors independent.
/// Returns ch.fer_override when set.
double fer(const MacParams& mac, const ChannelParams& ch, const BerModel& model = {});

}  // namespace dcf
