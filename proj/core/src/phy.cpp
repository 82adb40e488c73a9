#include "dcf/phy.hpp"

#include "dcf/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace dcf {

namespace {

template <int N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        // Newton iteration on P_N from the Chebyshev-like initial guess.
        for (int i = 0; i < (N + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double pp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < N; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
                }
                pp = N * (z * p1 - p2) / (z * z - 1.0);
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) < 1e-15) break;
            }
            nodes[i] = -z;
            nodes[N - 1 - i] = z;
            weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
    }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double sum = 0.0;
        for (int i = 0; i < N; ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

const GaussLegendre<64>& rule64() {
    static const GaussLegendre<64> r;
    return r;
}

const GaussLegendre<128>& rule128() {
    static const GaussLegendre<128> r;
    return r;
}

constexpr double kRelTol = 1e-10;
constexpr int kMaxDepth = 40;

template <typename F>
double adaptive(F&& f, double a, double b, int depth) {
    const double coarse = rule64().integrate(f, a, b);
    const double fine = rule128().integrate(f, a, b);
    if (std::abs(coarse - fine) <= kRelTol * std::abs(fine) || fine == 0.0) return fine;
    if (depth >= kMaxDepth) {
        throw QuadratureError("Gauss-Legendre 64/128 disagreement " + std::to_string(std::abs(coarse - fine)) +
                              " exceeds tolerance");
    }
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, depth + 1) + adaptive(f, mid, b, depth + 1);
}

}  // namespace

double ber_rayleigh_mpsk(int constellation_size, double snr_linear) {
    if (!(snr_linear >= 0.0)) throw Error("snr_linear must be >= 0");
    const int M = constellation_size;
    const double bits = std::log2(static_cast<double>(M));
    const double prefactor = 2.0 / std::max(bits, 2.0);
    const int terms = std::max(M / 4, 1);
    if (std::isinf(snr_linear)) return 0.0;

    double total = 0.0;
    for (int i = 1; i <= terms; ++i) {
        const double s = std::sin((2 * i - 1) * std::numbers::pi / M);
        const double c = snr_linear * bits * s * s;
        // 1 / (1 + c / sin^2 t) written to stay finite at t = 0.
        auto integrand = [c](double t) {
            const double s2 = std::sin(t) * std::sin(t);
            return s2 / (s2 + c);
        };
        if (c == 0.0) {
            total += 0.5;  // (1/pi) * (pi/2)
        } else {
            total += adaptive(integrand, 0.0, std::numbers::pi / 2.0, 0) / std::numbers::pi;
        }
    }
    return std::clamp(prefactor * total, 0.0, 0.5);
}

void BerModel::register_ber(Modulation mod, BerFunction fn) { custom_[mod] = std::move(fn); }

bool BerModel::supports(Modulation mod) const {
    return mod == Modulation::dbpsk || mod == Modulation::dqpsk || custom_.contains(mod);
}

double BerModel::ber(const BerQuery& q) const {
    if (auto it = custom_.find(q.modulation); it != custom_.end()) return it->second(q.snr_linear);
    switch (q.modulation) {
        case Modulation::dbpsk: return ber_rayleigh_mpsk(2, q.snr_linear);
        case Modulation::dqpsk: return ber_rayleigh_mpsk(4, q.snr_linear);
        default:
            throw UnsupportedModulation("no BER function registered for " + std::string(to_string(q.modulation)));
    }
}

double ber_rayleigh(const BerQuery& q) { return BerModel{}.ber(q); }

double fer(const MacParams& mac, const ChannelParams& ch, const BerModel& model) {
    if (ch.fer_override) return *ch.fer_override;
    const double gamma = db_to_linear(ch.snr_db);
    const double pb_header = model.ber({Modulation::dbpsk, gamma});
    const double pb_data = model.ber({ch.modulation, gamma});
    const double header_bits = 8.0 * mac.phy_header_bytes;
    const double data_bits = 8.0 * (static_cast<double>(mac.payload_bytes) + mac.mac_header_bytes);
    // log of the probability that every bit survives
    const double log_ok = header_bits * std::log1p(-pb_header) + data_bits * std::log1p(-pb_data);
    return std::clamp(-std::expm1(log_ok), 0.0, 1.0);
}

}  // namespace dcf
