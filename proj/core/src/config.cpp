#include "dcf/config.hpp"

#include "dcf/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dcf {

namespace {

std::string_view trim(std::string_view s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    auto b = std::find_if(s.begin(), s.end(), not_space);
    auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, int line,
                            std::string_view expected) {
    std::ostringstream msg;
    if (line > 0) msg << "line " << line << ": ";
    msg << "invalid value '" << value << "' for key '" << key << "' (expected " << expected << ")";
    throw ConfigError(std::string(key), line, msg.str());
}

double parse_double(std::string_view key, std::string_view value, int line) {
    const std::string v = lower(value);
    if (v == "inf" || v == "+inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    if (v == "-inf" || v == "-infinity") return -std::numeric_limits<double>::infinity();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || std::isnan(out)) {
        bad_value(key, value, line, "a number");
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value, int line) {
    Int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, line, "an integer");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value, int line) {
    const std::string v = lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, value, line, "true/false");
}

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyEntry {
    std::string_view name;
    std::function<void(Scenario&, std::string_view, int)> set;
    std::function<std::string(const Scenario&)> get;
};

template <typename T>
KeyEntry double_key(std::string_view name, T Scenario::*group, double T::*field) {
    return {name,
            [=](Scenario& sc, std::string_view v, int line) { (sc.*group).*field = parse_double(name, v, line); },
            [=](const Scenario& sc) { return fmt_double((sc.*group).*field); }};
}

template <typename T, typename Int>
KeyEntry int_key(std::string_view name, T Scenario::*group, Int T::*field) {
    return {name,
            [=](Scenario& sc, std::string_view v, int line) { (sc.*group).*field = parse_int<Int>(name, v, line); },
            [=](const Scenario& sc) { return std::to_string((sc.*group).*field); }};
}

const std::vector<KeyEntry>& key_table() {
    static const std::vector<KeyEntry> table = [] {
        std::vector<KeyEntry> t;
        using S = Scenario;
        t.push_back(int_key("w_min", &S::mac, &MacParams::w_min));
        t.push_back(int_key("m", &S::mac, &MacParams::m));
        t.push_back(double_key("slot_time_us", &S::mac, &MacParams::slot_time_us));
        t.push_back(double_key("sifs_us", &S::mac, &MacParams::sifs_us));
        t.push_back(double_key("difs_us", &S::mac, &MacParams::difs_us));
        t.push_back(double_key("eifs_us", &S::mac, &MacParams::eifs_us));
        t.push_back(double_key("prop_delay_us", &S::mac, &MacParams::prop_delay_us));
        t.push_back(int_key("mac_header_bytes", &S::mac, &MacParams::mac_header_bytes));
        t.push_back(int_key("phy_header_bytes", &S::mac, &MacParams::phy_header_bytes));
        t.push_back(int_key("ack_bytes", &S::mac, &MacParams::ack_bytes));
        t.push_back(int_key("rts_bytes", &S::mac, &MacParams::rts_bytes));
        t.push_back(int_key("cts_bytes", &S::mac, &MacParams::cts_bytes));
        t.push_back(double_key("ack_timeout_us", &S::mac, &MacParams::ack_timeout_us));
        t.push_back(int_key("payload_bytes", &S::mac, &MacParams::payload_bytes));
        t.push_back(double_key("data_rate_bps", &S::mac, &MacParams::data_rate_bps));
        t.push_back(double_key("ctrl_rate_bps", &S::mac, &MacParams::ctrl_rate_bps));

        t.push_back(double_key("snr_db", &S::channel, &ChannelParams::snr_db));
        t.push_back(double_key("z0_db", &S::channel, &ChannelParams::z0_db));
        t.push_back(int_key("spreading_factor", &S::channel, &ChannelParams::spreading_factor));
        t.push_back({"modulation",
                     [](S& sc, std::string_view v, int line) {
                         auto mod = parse_modulation(v);
                         if (!mod) bad_value("modulation", v, line, "DBPSK, DQPSK, CCK55 or CCK11");
                         sc.channel.modulation = *mod;
                     },
                     [](const S& sc) { return std::string(to_string(sc.channel.modulation)); }});
        t.push_back({"fer_override",
                     [](S& sc, std::string_view v, int line) {
                         const std::string l = lower(v);
                         if (l.empty() || l == "none") {
                             sc.channel.fer_override.reset();
                         } else {
                             sc.channel.fer_override = parse_double("fer_override", v, line);
                         }
                     },
                     [](const S& sc) {
                         return sc.channel.fer_override ? fmt_double(*sc.channel.fer_override) : std::string("none");
                     }});

        t.push_back(int_key("n_stations", &S::traffic, &TrafficParams::n_stations));
        t.push_back(double_key("lambda_pkt_s", &S::traffic, &TrafficParams::lambda_pkt_s));
        t.push_back({"saturated",
                     [](S& sc, std::string_view v, int line) { sc.traffic.saturated = parse_bool("saturated", v, line); },
                     [](const S& sc) { return std::string(sc.traffic.saturated ? "true" : "false"); }});

        t.push_back(double_key("tol", &S::solver, &SolverConfig::tol));
        t.push_back(int_key("max_iters", &S::solver, &SolverConfig::max_iters));
        t.push_back(double_key("damping", &S::solver, &SolverConfig::damping));

        t.push_back(int_key("seed", &S::sim, &SimConfig::seed));
        t.push_back(double_key("sim_horizon_us", &S::sim, &SimConfig::sim_horizon_us));
        t.push_back(int_key("sim_slots", &S::sim, &SimConfig::sim_slots));
        t.push_back(int_key("sim_batches", &S::sim, &SimConfig::sim_batches));
        t.push_back(int_key("queue_capacity", &S::sim, &SimConfig::queue_capacity));
        return t;
    }();
    return table;
}

[[noreturn]] void violation(std::string_view key, std::string_view rule) {
    throw ConfigError(std::string(key), 0, std::string(key) + ": must satisfy " + std::string(rule));
}

void require_positive(std::string_view key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) violation(key, "> 0 and finite");
}

}  // namespace

std::string_view to_string(Modulation mod) {
    switch (mod) {
        case Modulation::dbpsk: return "DBPSK";
        case Modulation::dqpsk: return "DQPSK";
        case Modulation::cck55: return "CCK55";
        case Modulation::cck11: return "CCK11";
    }
    return "?";
}

std::optional<Modulation> parse_modulation(std::string_view text) {
    const std::string l = lower(trim(text));
    if (l == "dbpsk") return Modulation::dbpsk;
    if (l == "dqpsk") return Modulation::dqpsk;
    if (l == "cck55" || l == "cck5.5") return Modulation::cck55;
    if (l == "cck11") return Modulation::cck11;
    return std::nullopt;
}

void validate(const MacParams& mac) {
    if (mac.w_min < 2) violation("w_min", ">= 2");
    if (mac.m < 0) violation("m", ">= 0");
    // W_m = 2^m W must stay representable.
    if (mac.m > 24) violation("m", "<= 24");
    require_positive("slot_time_us", mac.slot_time_us);
    require_positive("sifs_us", mac.sifs_us);
    require_positive("difs_us", mac.difs_us);
    require_positive("eifs_us", mac.eifs_us);
    require_positive("prop_delay_us", mac.prop_delay_us);
    require_positive("ack_timeout_us", mac.ack_timeout_us);
    if (mac.mac_header_bytes < 0) violation("mac_header_bytes", ">= 0");
    if (mac.phy_header_bytes < 0) violation("phy_header_bytes", ">= 0");
    if (mac.ack_bytes < 0) violation("ack_bytes", ">= 0");
    if (mac.rts_bytes < 0) violation("rts_bytes", ">= 0");
    if (mac.cts_bytes < 0) violation("cts_bytes", ">= 0");
    if (mac.payload_bytes <= 0) violation("payload_bytes", "> 0");
    require_positive("data_rate_bps", mac.data_rate_bps);
    require_positive("ctrl_rate_bps", mac.ctrl_rate_bps);
}

void validate(const ChannelParams& ch) {
    if (std::isnan(ch.snr_db)) violation("snr_db", "a number");
    if (std::isnan(ch.z0_db) || ch.z0_db == -std::numeric_limits<double>::infinity()) {
        violation("z0_db", "a number or +inf");
    }
    if (ch.spreading_factor < 1) violation("spreading_factor", ">= 1");
    if (ch.fer_override && !(*ch.fer_override >= 0.0 && *ch.fer_override <= 1.0)) {
        violation("fer_override", "in [0, 1]");
    }
}

void validate(const TrafficParams& tr) {
    if (tr.n_stations < 1) violation("n_stations", ">= 1");
    if (tr.n_stations > 1024) violation("n_stations", "<= 1024");
    if (!(tr.lambda_pkt_s >= 0.0) || !std::isfinite(tr.lambda_pkt_s)) violation("lambda_pkt_s", ">= 0 and finite");
}

void validate(const SolverConfig& cfg) {
    require_positive("tol", cfg.tol);
    if (cfg.max_iters < 1) violation("max_iters", ">= 1");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) violation("damping", "in (0, 1]");
}

void validate(const SimConfig& sim) {
    if (!(sim.sim_horizon_us >= 0.0) || !std::isfinite(sim.sim_horizon_us)) {
        violation("sim_horizon_us", ">= 0 and finite");
    }
    if (sim.sim_slots < 0) violation("sim_slots", ">= 0");
    if (sim.sim_slots == 0 && sim.sim_horizon_us <= 0.0) violation("sim_horizon_us", "> 0 when sim_slots is 0");
    if (sim.sim_batches < 2) violation("sim_batches", ">= 2");
    if (sim.queue_capacity < 1) violation("queue_capacity", ">= 1");
}

void validate(const Scenario& sc) {
    validate(sc.mac);
    validate(sc.channel);
    validate(sc.traffic);
    validate(sc.solver);
    validate(sc.sim);
}

void apply_setting(Scenario& sc, std::string_view key, std::string_view value, int line) {
    key = trim(key);
    value = trim(value);
    const auto& table = key_table();
    auto it = std::find_if(table.begin(), table.end(), [&](const KeyEntry& e) { return e.name == key; });
    if (it == table.end()) {
        std::ostringstream msg;
        if (line > 0) msg << "line " << line << ": ";
        msg << "unknown key '" << key << "'";
        throw ConfigError(std::string(key), line, msg.str());
    }
    it->set(sc, value, line);
}

Scenario parse_scenario(std::istream& in, const std::vector<std::pair<std::string, std::string>>& overrides) {
    Scenario sc;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", line_no, "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("", line_no, "line " + std::to_string(line_no) + ": empty key");
        apply_setting(sc, key, line.substr(eq + 1), line_no);
    }
    for (const auto& [key, value] : overrides) apply_setting(sc, key, value);
    validate(sc);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open config file '" + path.string() + "'");
    return parse_scenario(in, overrides);
}

void save_scenario(std::ostream& out, const Scenario& sc) {
    for (const auto& entry : key_table()) out << entry.name << " = " << entry.get(sc) << '\n';
}

void save_scenario(const std::filesystem::path& path, const Scenario& sc) {
    std::ofstream out(path);
    if (!out) throw ConfigError("", 0, "cannot write config file '" + path.string() + "'");
    save_scenario(out, sc);
}

std::pair<std::string, std::string> split_override(std::string_view text) {
    auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(std::string(trim(text)), 0, "override '" + std::string(text) + "' is not key=value");
    }
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

const std::vector<std::string_view>& scenario_keys() {
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> k;
        for (const auto& e : key_table()) k.push_back(e.name);
        return k;
    }();
    return keys;
}

}  // namespace dcf
