#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dcf {

enum class Modulation { dbpsk, dqpsk, cck55, cck11 };

std::string_view to_string(Modulation mod);
/// Accepts DBPSK, DQPSK, CCK55 (or CCK5.5), CCK11, case-insensitive.
std::optional<Modulation> parse_modulation(std::string_view text);

/// Protocol timing and frame sizes. Defaults are the IEEE 802.11b
/// lowest-rate values; durations in microseconds, sizes in bytes.
struct MacParams {
    int w_min = 32;
    int m = 5;
    double slot_time_us = 20.0;
    double sifs_us = 10.0;
    double difs_us = 50.0;
    double eifs_us = 300.0;
    double prop_delay_us = 1.0;
    int mac_header_bytes = 24;
    int phy_header_bytes = 16;
    int ack_bytes = 14;
    int rts_bytes = 20;  // stored, unused (basic access only)
    int cts_bytes = 14;  // stored, unused
    double ack_timeout_us = 300.0;
    int payload_bytes = 1024;
    double data_rate_bps = 1e6;
    double ctrl_rate_bps = 1e6;

    friend bool operator==(const MacParams&, const MacParams&) = default;
};

struct ChannelParams {
    double snr_db = 10.0;
    /// Capture ratio; +infinity disables capture entirely.
    double z0_db = 6.0;
    int spreading_factor = 11;
    Modulation modulation = Modulation::dbpsk;
    /// When set, used as the frame error rate instead of the PHY model.
    std::optional<double> fer_override;

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct TrafficParams {
    int n_stations = 10;
    double lambda_pkt_s = 10.0;
    bool saturated = false;

    friend bool operator==(const TrafficParams&, const TrafficParams&) = default;
};

struct SolverConfig {
    double tol = 1e-9;
    int max_iters = 10000;
    double damping = 0.5;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Monte-Carlo run settings. The run stops at sim_horizon_us of simulated
/// time, or after sim_slots slots when that is nonzero.
struct SimConfig {
    std::uint64_t seed = 1;
    double sim_horizon_us = 1e8;
    std::int64_t sim_slots = 0;
    int sim_batches = 10;
    int queue_capacity = 1;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Scenario {
    MacParams mac;
    ChannelParams channel;
    TrafficParams traffic;
    SolverConfig solver;
    SimConfig sim;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

void validate(const MacParams& mac);
void validate(const ChannelParams& ch);
void validate(const TrafficParams& tr);
void validate(const SolverConfig& cfg);
void validate(const SimConfig& sim);
/// Checks every invariant; throws ConfigError naming the first bad key.
void validate(const Scenario& sc);

/// Sets one key from its textual value. Throws ConfigError for an unknown
/// key or an unparsable value. Does not run validate().
void apply_setting(Scenario& sc, std::string_view key, std::string_view value, int line = 0);

/// Parses `key = value` lines; `#` starts a comment. Missing keys keep
/// their defaults. Overrides are applied after the file, in order.
Scenario parse_scenario(std::istream& in,
                        const std::vector<std::pair<std::string, std::string>>& overrides = {});
Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Writes every key, in a form parse_scenario reads back to equal values.
void save_scenario(std::ostream& out, const Scenario& sc);
void save_scenario(const std::filesystem::path& path, const Scenario& sc);

/// Splits `key=value` as given to --set.
std::pair<std::string, std::string> split_override(std::string_view text);

/// Names of every recognised key, in file order.
const std::vector<std::string_view>& scenario_keys();

}  // namespace dcf
