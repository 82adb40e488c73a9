#pragma once

#include "dcf/capture.hpp"
#include "dcf/config.hpp"
#include "dcf/metrics.hpp"
#include "dcf/phy.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace dcf {

/// Converged operating point of the coupled MAC/traffic model.
struct ModelSolution {
    double tau = 0.0;
    double p_col = 0.0;
    double p_cap = 0.0;
    double p_e = 0.0;
    double p_eq = 0.0;
    double q = 0.0;
    double p_t = 0.0;
    double p_s = 0.0;
    double e_slot_us = 0.0;
    double throughput = 0.0;
    int iterations = 0;
    double residual = 0.0;
    /// "picard", "bisection" or "closed" (trivial cases solved directly).
    std::string_view method = "picard";
};

/// Everything the system equations need, resolved once per scenario.
struct ModelInputs {
    int n_stations = 1;
    int w_min = 32;
    int m = 5;
    double p_e = 0.0;
    CaptureParams capture{1.0, 1.0};
    SlotDurations slots{};
    double payload_airtime_us = 0.0;
    double lambda_pkt_s = 0.0;
    bool saturated = false;

    /// Computes p_e through fer() unless the channel overrides it.
    static ModelInputs from(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr,
                            const BerModel& ber = {});
};

/// LHS - RHS of the five system equations, in order:
///   tau  = tau(P_eq, q)
///   P_col = 1 - (1 - tau)^(N-1) - P_cap
///   P_eq = P_col + P_e - P_e P_col
///   P_cap = capture sum at tau
///   q    = 1 - exp(-lambda E[S_ts])   (q = 1 when saturated)
/// E[S_ts] is recomputed from the point, not read from it.
std::array<double, 5> residuals(const ModelSolution& point, const ModelInputs& in);
std::array<double, 5> residuals(const ModelSolution& point, const MacParams& mac, const ChannelParams& ch,
                                const TrafficParams& tr);

/// Fills every derived field (P_cap, P_col, P_eq, P_t, P_s, E[S_ts], S,
/// residual) from tau and q.
ModelSolution evaluate_point(double tau, double q, const ModelInputs& in);

struct InitialGuess {
    double tau;
    double q;
};

/// Damped Picard iteration on (tau, q) with a nested-bisection fallback.
/// Throws ConvergenceError when neither reaches cfg.tol.
ModelSolution solve_fixed_point(const ModelInputs& in, const SolverConfig& cfg,
                                std::optional<InitialGuess> start = std::nullopt);
ModelSolution solve_fixed_point(const MacParams& mac, const ChannelParams& ch, const TrafficParams& tr,
                                const SolverConfig& cfg, const BerModel& ber = {});

/// Bisection-only solve (tau inside, q outside). Exposed for cross-checks.
ModelSolution solve_by_bisection(const ModelInputs& in, const SolverConfig& cfg);

}  // namespace dcf
