#include "dcf/solver.hpp"

#include "dcf/error.hpp"
#include "dcf/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <utility>

namespace dcf {

namespace {

double offered_q(const ModelInputs& in, double e_slot_us) {
    if (in.saturated) return 1.0;
    return -std::expm1(-in.lambda_pkt_s * e_slot_us * 1e-6);
}

double max_abs(const std::array<double, 5>& r) {
    double out = 0.0;
    for (double v : r) out = std::max(out, std::abs(v));
    return out;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

// Root of f on [lo, hi] with f(lo) <= 0 <= f(hi), to full double precision.
template <typename F>
double bisect(F&& f, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double tau_for_q(const ModelInputs& in, double q) {
    auto g = [&](double t) {
        const ModelSolution s = evaluate_point(t, q, in);
        return t - tau(ChainInputs{in.w_min, in.m, s.p_eq, q});
    };
    return bisect(g, 0.0, 1.0);
}

constexpr int kPolishSteps = 200;

std::pair<double, double> picard_step(const ModelInputs& in, const ModelSolution& s, double damping) {
    const double t_new = tau(ChainInputs{in.w_min, in.m, s.p_eq, s.q});
    const double q_new = offered_q(in, s.e_slot_us);
    return {(1.0 - damping) * s.tau + damping * t_new, (1.0 - damping) * s.q + damping * q_new};
}

std::string describe(const ModelSolution& s) {
    std::ostringstream out;
    out.precision(12);
    out << "tau=" << s.tau << " q=" << s.q << " residual=" << s.residual;
    return out.str();
}

}  // namespace

ModelInputs ModelInputs::from(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr,
                              const BerModel& ber) {
    ModelInputs in;
    in.n_stations = tr.n_stations;
    in.w_min = mac.w_min;
    in.m = mac.m;
    in.p_e = fer(mac, ch, ber);
    in.capture = CaptureParams::from_channel(ch);
    in.slots = slot_durations(mac);
    in.payload_airtime_us = dcf::payload_airtime_us(mac);
    in.lambda_pkt_s = tr.lambda_pkt_s;
    in.saturated = tr.saturated;
    return in;
}

ModelSolution evaluate_point(double tau_value, double q, const ModelInputs& in) {
    ModelSolution s;
    s.tau = tau_value;
    s.q = q;
    s.p_e = in.p_e;
    s.p_cap = p_cap(in.capture, in.n_stations, tau_value);
    const double others_busy = -std::expm1((in.n_stations - 1) * std::log1p(-tau_value));
    s.p_col = std::clamp(others_busy - s.p_cap, 0.0, 1.0);
    s.p_eq = 1.0 - (1.0 - s.p_col) * (1.0 - in.p_e);
    const SlotProbabilities sp = slot_probabilities(in.n_stations, tau_value, s.p_cap);
    s.p_t = sp.p_t;
    s.p_s = sp.p_s;
    s.e_slot_us = expected_slot(in.slots, sp, in.p_e);
    s.throughput = throughput(in.slots, sp, in.p_e, in.payload_airtime_us);
    s.residual = max_abs(residuals(s, in));
    return s;
}

std::array<double, 5> residuals(const ModelSolution& point, const ModelInputs& in) {
    const double cap = p_cap(in.capture, in.n_stations, point.tau);
    const double others_busy = -std::expm1((in.n_stations - 1) * std::log1p(-point.tau));
    const SlotProbabilities sp = slot_probabilities(in.n_stations, point.tau, cap);
    const double e_slot = expected_slot(in.slots, sp, in.p_e);
    const double p_eq = std::clamp(point.p_eq, 0.0, 1.0);
    return {
        point.tau - tau(ChainInputs{in.w_min, in.m, p_eq, std::clamp(point.q, 0.0, 1.0)}),
        point.p_col - (others_busy - point.p_cap),
        point.p_eq - (point.p_col + in.p_e - in.p_e * point.p_col),
        point.p_cap - cap,
        point.q - offered_q(in, e_slot),
    };
}

std::array<double, 5> residuals(const ModelSolution& point, const MacParams& mac, const ChannelParams& ch,
                                const TrafficParams& tr) {
    ModelInputs in = ModelInputs::from(mac, ch, tr);
    in.p_e = point.p_e;
    return residuals(point, in);
}

ModelSolution solve_by_bisection(const ModelInputs& in, const SolverConfig& cfg) {
    ModelSolution s;
    int evaluations = 0;
    if (in.saturated) {
        s = evaluate_point(tau_for_q(in, 1.0), 1.0, in);
    } else {
        // h(0) < 0 and h(1) > 0 whenever lambda > 0, so a root is bracketed.
        auto h = [&](double q) {
            ++evaluations;
            const ModelSolution inner = evaluate_point(tau_for_q(in, q), q, in);
            return q - offered_q(in, inner.e_slot_us);
        };
        const double q = bisect(h, 0.0, 1.0);
        s = evaluate_point(tau_for_q(in, q), q, in);
    }
    s.method = "bisection";
    s.iterations = evaluations;
    if (!(s.residual <= cfg.tol)) {
        throw ConvergenceError("bisection fallback did not reach tolerance: " + describe(s), s.residual);
    }
    return s;
}

ModelSolution solve_fixed_point(const ModelInputs& in, const SolverConfig& cfg, std::optional<InitialGuess> start) {
    if (!(in.p_e >= 0.0 && in.p_e <= 1.0)) {
        throw InvalidRegime("frame error rate " + std::to_string(in.p_e) + " is not a probability",
                            std::numeric_limits<double>::quiet_NaN());
    }
    if (!in.saturated && in.lambda_pkt_s == 0.0) {
        ModelSolution s = evaluate_point(0.0, 0.0, in);
        s.method = "closed";
        return s;
    }

    double t = start ? start->tau : 2.0 / (in.w_min + 1.0);
    double q = start ? start->q : std::clamp(in.lambda_pkt_s * 1000.0 / 1e6, 0.01, 1.0);
    if (in.saturated) q = 1.0;

    const double d = cfg.damping;
    ModelSolution s;
    bool ok = false;
    for (int iter = 0; iter <= cfg.max_iters; ++iter) {
        s = evaluate_point(t, q, in);
        s.iterations = iter;
        if (!std::isfinite(s.residual) || !in_unit(s.tau) || !in_unit(s.q)) break;
        if (s.residual <= cfg.tol) {
            ok = true;
            break;
        }
        if (iter == cfg.max_iters) break;
        std::tie(t, q) = picard_step(in, s, d);
    }
    if (ok) {
        // A residual at tol still leaves P_col off by (N-1) times the tau
        // error; iterate on while the residual keeps shrinking.
        for (int extra = 0; extra < kPolishSteps && s.residual > cfg.tol * 1e-3; ++extra) {
            const auto [t_next, q_next] = picard_step(in, s, d);
            ModelSolution next = evaluate_point(t_next, q_next, in);
            if (!(next.residual < s.residual)) break;
            next.iterations = s.iterations;
            s = next;
        }
        return s;
    }

    try {
        return solve_by_bisection(in, cfg);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError("no convergence after " + std::to_string(cfg.max_iters) +
                                   " Picard iterations (last: " + describe(s) + "); " + e.what(),
                               s.residual);
    }
}

ModelSolution solve_fixed_point(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr,
                                const SolverConfig& cfg, const BerModel& ber) {
    return solve_fixed_point(ModelInputs::from(mac, ch, tr, ber), cfg);
}

}  // namespace dcf
