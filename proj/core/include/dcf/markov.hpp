#pragma once

#include <cstddef>
#include <vector>

namespace dcf {

/// Inputs of the per-station backoff chain with an idle (empty buffer) state.
struct ChainInputs {
    int w_min = 32;     ///< W, contention window of stage 0
    int m = 5;          ///< last backoff stage; W_i = 2^i W
    double p_eq = 0.0;  ///< failure probability, collision or channel error
    double q = 1.0;     ///< probability a packet is waiting
};

/// Stationary distribution over backoff states (i, k) and the idle state.
struct StationaryDistribution {
    std::vector<std::vector<double>> b;  ///< b[i][k], k in [0, W_i)
    double b_idle = 0.0;
    double b00 = 0.0;

    double at(int stage, int counter) const { return b[stage][counter]; }
    /// Sum over i of b[i][0]: the per-slot transmission probability.
    double transmit_mass() const;
    double total_mass() const;
};

/// Window of stage i, 2^i W.
int stage_window(int w_min, int stage);

/// Normalisation constant b_{0,0} in its geometric closed form. Throws
/// SingularityError when 2 p_eq == 1 exactly.
double b00_geometric(const ChainInputs& c);

/// b_{0,0} from the unsummed normalisation series. Finite at p_eq = 1/2;
/// loses the closed form's exactness only as p_eq -> 1.
double b00_series(const ChainInputs& c);

/// b_{0,0}; switches to the series within 1e-6 of p_eq = 1/2.
double b00_closed_form(const ChainInputs& c);

/// Per-slot transmission probability tau = b_{0,0} / (1 - p_eq), evaluated
/// in closed form (so p_eq = 1 gives the stage-m limit 2 / (2^m W + 1)).
double tau(const ChainInputs& c);

/// Builds the full transition matrix of the chain and solves for its
/// stationary vector with a sparse LU factorisation. Test oracle: slow,
/// limited to 1e5 states, throws SizeLimitError beyond that.
StationaryDistribution build_chain_oracle(const ChainInputs& c);

/// Number of states in the chain, backoff states plus the idle state.
std::size_t chain_state_count(int w_min, int m);

}  // namespace dcf
