#include "dcf/markov.hpp"

#include "dcf/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace dcf {

namespace {

constexpr double kSeriesBand = 1e-6;
constexpr std::size_t kMaxOracleStates = 100000;

void check(const ChainInputs& c) {
    if (c.w_min < 2) throw Error("w_min must be >= 2");
    if (c.m < 0 || c.m > 24) throw Error("m must lie in [0, 24]");
    if (!(c.p_eq >= 0.0 && c.p_eq <= 1.0)) throw Error("p_eq must lie in [0, 1]");
    if (!(c.q >= 0.0 && c.q <= 1.0)) throw Error("q must lie in [0, 1]");
}

}  // namespace

double StationaryDistribution::transmit_mass() const {
    double sum = 0.0;
    for (const auto& stage : b) sum += stage.front();
    return sum;
}

double StationaryDistribution::total_mass() const {
    double sum = b_idle;
    for (const auto& stage : b) {
        for (double v : stage) sum += v;
    }
    return sum;
}

int stage_window(int w_min, int stage) { return w_min << stage; }

std::size_t chain_state_count(int w_min, int m) {
    std::size_t n = 1;
    for (int i = 0; i <= m; ++i) n += static_cast<std::size_t>(stage_window(w_min, i));
    return n;
}

double b00_geometric(const ChainInputs& c) {
    check(c);
    const double p = c.p_eq;
    const double q = c.q;
    const double w = c.w_min;
    const double x = 2.0 * p;
    if (1.0 - x == 0.0) throw SingularityError("b00 closed form is singular at p_eq = 1/2");
    const double num = 2.0 * (1.0 - p) * (1.0 - x) * q;
    const double den = q * ((w + 1.0) * (1.0 - x) + w * p * (1.0 - std::pow(x, c.m))) +
                       2.0 * (1.0 - q) * (1.0 - p) * (1.0 - x);
    return num / den;
}

double b00_series(const ChainInputs& c) {
    check(c);
    if (c.q == 0.0) return 0.0;
    const double p = c.p_eq;
    const double x = 2.0 * p;
    double geometric = 0.0;
    double power = 1.0;
    for (int i = 0; i < c.m; ++i) {
        geometric += power;
        power *= x;
    }
    geometric += power / (1.0 - p);
    const double bracket = c.w_min * geometric + 1.0 / (1.0 - p) + 2.0 * (1.0 - c.q) / c.q;
    return 2.0 / bracket;
}

double b00_closed_form(const ChainInputs& c) {
    if (std::abs(1.0 - 2.0 * c.p_eq) < kSeriesBand) return b00_series(c);
    return b00_geometric(c);
}

double tau(const ChainInputs& c) {
    check(c);
    const double p = c.p_eq;
    const double q = c.q;
    const double x = 2.0 * p;
    if (std::abs(1.0 - x) < kSeriesBand) return b00_series(c) / (1.0 - p);
    const double w = c.w_min;
    const double num = 2.0 * (1.0 - x) * q;
    const double den = q * ((w + 1.0) * (1.0 - x) + w * p * (1.0 - std::pow(x, c.m))) +
                       2.0 * (1.0 - q) * (1.0 - p) * (1.0 - x);
    return num / den;
}

StationaryDistribution build_chain_oracle(const ChainInputs& c) {
    check(c);
    if (c.q == 0.0) throw Error("chain oracle needs q > 0");
    const std::size_t n = chain_state_count(c.w_min, c.m);
    if (n > kMaxOracleStates) {
        throw SizeLimitError("chain has " + std::to_string(n) + " states; oracle limit is " +
                             std::to_string(kMaxOracleStates));
    }

    std::vector<Eigen::Index> offset(static_cast<std::size_t>(c.m) + 1);
    Eigen::Index next = 0;
    for (int i = 0; i <= c.m; ++i) {
        offset[i] = next;
        next += stage_window(c.w_min, i);
    }
    const Eigen::Index idle = next;
    const auto state = [&](int i, int k) { return offset[i] + k; };

    const double p = c.p_eq;
    const double q = c.q;
    const int w0 = c.w_min;

    // Transitions from -> to with probability; duplicates are summed.
    std::vector<Eigen::Triplet<double>> transitions;
    transitions.reserve(n * 2 + static_cast<std::size_t>(c.m + 2) * (static_cast<std::size_t>(w0) << c.m));
    const auto add = [&](Eigen::Index from, Eigen::Index to, double prob) {
        if (prob != 0.0) transitions.emplace_back(from, to, prob);
    };
    for (int i = 0; i <= c.m; ++i) {
        const int wi = stage_window(c.w_min, i);
        for (int k = 1; k < wi; ++k) add(state(i, k), state(i, k - 1), 1.0);
        const Eigen::Index from = state(i, 0);
        for (int k = 0; k < w0; ++k) add(from, state(0, k), q * (1.0 - p) / w0);
        const int retry = std::min(i + 1, c.m);
        const int wr = stage_window(c.w_min, retry);
        for (int k = 0; k < wr; ++k) add(from, state(retry, k), p / wr);
        add(from, idle, (1.0 - q) * (1.0 - p));
    }
    for (int k = 0; k < w0; ++k) add(idle, state(0, k), q / w0);
    add(idle, idle, 1.0 - q);

    // Stationary b solves (P^T - I) b = 0; the last equation is replaced
    // by the normalisation sum(b) = 1.
    const auto size = static_cast<Eigen::Index>(n);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(transitions.size() + 2 * n);
    for (const auto& t : transitions) {
        if (t.col() != size - 1) entries.emplace_back(t.col(), t.row(), t.value());
    }
    for (Eigen::Index s = 0; s < size - 1; ++s) entries.emplace_back(s, s, -1.0);
    for (Eigen::Index s = 0; s < size; ++s) entries.emplace_back(size - 1, s, 1.0);

    Eigen::SparseMatrix<double> a(size, size);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw Error("chain oracle factorisation failed: " + lu.lastErrorMessage());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs(size - 1) = 1.0;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw Error("chain oracle solve failed");

    StationaryDistribution out;
    out.b.resize(static_cast<std::size_t>(c.m) + 1);
    for (int i = 0; i <= c.m; ++i) {
        const int wi = stage_window(c.w_min, i);
        out.b[i].resize(static_cast<std::size_t>(wi));
        for (int k = 0; k < wi; ++k) out.b[i][k] = x(state(i, k));
    }
    out.b_idle = x(idle);
    out.b00 = out.b[0][0];
    return out;
}

}  // namespace dcf
