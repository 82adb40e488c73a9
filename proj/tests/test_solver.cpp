#include "dcf/error.hpp"
#include "dcf/markov.hpp"
#include "dcf/solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace dcf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ChannelParams ideal_channel() {
    ChannelParams ch;
    ch.fer_override = 0.0;
    ch.z0_db = kInf;
    return ch;
}

TrafficParams traffic(int n, double lambda, bool saturated = false) { return {n, lambda, saturated}; }

double max_abs(const std::array<double, 5>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("single saturated station never collides") {
    const auto s = solve_fixed_point(MacParams{}, ideal_channel(), traffic(1, 0.0, true), SolverConfig{});
    CHECK(s.p_col == 0.0);
    CHECK(s.p_cap == 0.0);
    CHECK(s.q == 1.0);
    CHECK(s.tau == doctest::Approx(2.0 / 33.0).epsilon(1e-12));
}

TEST_CASE("no offered traffic") {
    const auto s = solve_fixed_point(MacParams{}, ChannelParams{}, traffic(10, 0.0), SolverConfig{});
    CHECK(s.q == 0.0);
    CHECK(s.tau == 0.0);
    CHECK(s.throughput == 0.0);
    CHECK(s.e_slot_us == 20.0);
    CHECK(s.residual == 0.0);
}

TEST_CASE("saturated ideal channel reduces to the classic fixed point") {
    for (int n : {2, 5, 10, 20, 50}) {
        CAPTURE(n);
        const auto ref = oracle::saturated_point(n, 32, 5);
        const auto s = solve_fixed_point(MacParams{}, ideal_channel(), traffic(n, 0.0, true), SolverConfig{});
        CHECK(std::abs(s.tau - ref.tau) <= 1e-9);
        CHECK(std::abs(s.p_col - ref.p) <= 1e-9);
        CHECK(s.residual <= 1e-9);

        // The oracle's own point satisfies the system.
        const auto in = ModelInputs::from(MacParams{}, ideal_channel(), traffic(n, 0.0, true));
        CHECK(max_abs(residuals(evaluate_point(ref.tau, 1.0, in), in)) <= 1e-9);
    }
}

TEST_CASE("residuals detect a perturbed point") {
    const MacParams mac;
    ChannelParams ch;
    ch.snr_db = 40.0;
    const auto tr = traffic(10, 10.0);
    const auto s = solve_fixed_point(mac, ch, tr, SolverConfig{});
    CHECK(max_abs(residuals(s, mac, ch, tr)) <= 1e-9);
    auto moved = s;
    moved.tau += 0.01;
    CHECK(max_abs(residuals(moved, mac, ch, tr)) > 1e-3);
    const auto r = residuals(s, mac, ch, tr);
    CHECK(std::abs(r[2]) <= 1e-12);  // P_eq identity
    CHECK(s.p_eq == doctest::Approx(s.p_col + s.p_e - s.p_e * s.p_col).epsilon(1e-12));
}

TEST_CASE("re-solving from a converged point takes at most two iterations") {
    ChannelParams ch;
    ch.snr_db = 45.0;
    for (double lambda : {1.0, 10.0, 100.0}) {
        const auto in = ModelInputs::from(MacParams{}, ch, traffic(10, lambda));
        const auto s = solve_fixed_point(in, SolverConfig{});
        const auto again = solve_fixed_point(in, SolverConfig{}, InitialGuess{s.tau, s.q});
        CHECK(again.iterations <= 2);
        CHECK(again.tau == doctest::Approx(s.tau).epsilon(1e-9));
    }
}

TEST_CASE("degenerate limits collapse to the ideal saturated system") {
    ChannelParams ch;
    ch.z0_db = 300.0;
    ch.snr_db = 300.0;
    const auto in = ModelInputs::from(MacParams{}, ch, traffic(10, 0.0, true));
    CHECK(in.p_e <= 1e-12);
    const auto s = solve_fixed_point(in, SolverConfig{});
    CHECK(s.p_cap <= 1e-12);
    const auto ref = oracle::saturated_point(10, 32, 5);
    CHECK(std::abs(s.tau - ref.tau) <= 1e-9);
}

TEST_CASE("converged point does not depend on damping") {
    ChannelParams ch;
    ch.snr_db = 42.0;
    for (double lambda : {2.0, 20.0, 500.0}) {
        const auto in = ModelInputs::from(MacParams{}, ch, traffic(20, lambda));
        const double ref = solve_fixed_point(in, SolverConfig{1e-12, 100000, 0.5}).tau;
        for (double d : {0.3, 0.8, 1.0}) {
            CHECK(solve_fixed_point(in, SolverConfig{1e-12, 100000, d}).tau == doctest::Approx(ref).epsilon(1e-7));
        }
    }
}

TEST_CASE("Picard and bisection find the same point") {
    ChannelParams ch;
    ch.snr_db = 40.0;
    for (int n : {1, 5, 10, 20}) {
        for (double lambda : {0.5, 5.0, 50.0, 5000.0}) {
            const auto in = ModelInputs::from(MacParams{}, ch, traffic(n, lambda));
            const auto a = solve_fixed_point(in, SolverConfig{});
            const auto b = solve_by_bisection(in, SolverConfig{});
            CHECK(a.method == "picard");
            CHECK(b.method == "bisection");
            CHECK(a.tau == doctest::Approx(b.tau).epsilon(1e-7));
            CHECK(a.q == doctest::Approx(b.q).epsilon(1e-7));
        }
    }
}

TEST_CASE("bisection fallback rescues a tiny iteration budget") {
    const auto in = ModelInputs::from(MacParams{}, ideal_channel(), traffic(10, 30.0));
    const auto s = solve_fixed_point(in, SolverConfig{1e-9, 1, 0.5});
    CHECK(s.method == "bisection");
    CHECK(s.residual <= 1e-9);
}

TEST_CASE("a non-finite error model is a convergence failure") {
    BerModel broken;
    broken.register_ber(Modulation::cck11, [](double) { return std::nan(""); });
    ChannelParams ch;
    ch.modulation = Modulation::cck11;
    CHECK_THROWS_AS(solve_fixed_point(MacParams{}, ch, traffic(10, 30.0), SolverConfig{}, broken), InvalidRegime);
}

TEST_CASE("q grows with the arrival rate") {
    ChannelParams ch;
    ch.snr_db = 40.0;
    double prev = -1.0;
    for (double lambda = 0.0; lambda <= 2000.0; lambda = lambda * 1.5 + 0.1) {
        const auto s = solve_fixed_point(MacParams{}, ch, traffic(10, lambda), SolverConfig{});
        CHECK(s.q >= prev);
        CHECK(s.q <= 1.0);
        prev = s.q;
    }
}

TEST_CASE("frames always lost: converges with zero throughput") {
    ChannelParams ch;
    ch.snr_db = 10.0;
    const auto s = solve_fixed_point(MacParams{}, ch, traffic(10, 10.0), SolverConfig{});
    CHECK(s.p_e == 1.0);
    CHECK(s.p_eq == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.throughput == 0.0);
    CHECK(s.tau == doctest::Approx(tau({32, 5, 1.0, s.q})).epsilon(1e-12));
}

TEST_CASE("all probabilities in range over a broad grid") {
    for (double snr : {0.0, 30.0, 45.0, 80.0}) {
        for (double z0 : {0.0, 6.0, 24.0, kInf}) {
            for (int n : {1, 3, 10, 50}) {
                for (double lambda : {0.1, 10.0, 1000.0}) {
                    ChannelParams ch;
                    ch.snr_db = snr;
                    ch.z0_db = z0;
                    const auto s = solve_fixed_point(MacParams{}, ch, traffic(n, lambda), SolverConfig{});
                    for (double p : {s.tau, s.p_col, s.p_cap, s.p_e, s.p_eq, s.q, s.p_t, s.p_s, s.throughput}) {
                        CHECK(p >= 0.0);
                        CHECK(p <= 1.0);
                    }
                    CHECK(s.residual <= 1e-9);
                }
            }
        }
    }
}
