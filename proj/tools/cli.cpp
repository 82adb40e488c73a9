#include "cli.hpp"

#include "dcf/phy.hpp"
#include "dcf/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

namespace dcf::cli {

namespace {

double parse_number(std::string_view text) {
    std::string t(text);
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
    if (t == "inf" || t == "+inf") return INFINITY;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw UsageError("grid value '" + std::string(text) + "' is not a number");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads and
/// returns the results in index order.
template <typename F>
auto parallel_map(std::size_t n, F fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < n; base += width) {
        std::vector<std::future<R>> jobs;
        for (std::size_t i = base; i < std::min(n, base + width); ++i) {
            jobs.push_back(std::async(std::launch::async, fn, i));
        }
        for (std::size_t k = 0; k < jobs.size(); ++k) out[base + k] = jobs[k].get();
    }
    return out;
}

struct PointResult {
    Scenario scenario;
    std::optional<ModelSolution> model;
    std::optional<SimReport> sim;
    std::string error;
};

PointResult evaluate(const Scenario& sc, bool with_sim, std::uint64_t sim_seed) {
    PointResult r{sc, {}, {}, {}};
    try {
        validate(sc);
        r.model = solve_fixed_point(sc.mac, sc.channel, sc.traffic, sc.solver);
        if (with_sim) {
            SimConfig cfg = sc.sim;
            cfg.seed = sim_seed;
            r.sim = dcf::run(sc.mac, sc.channel, sc.traffic, cfg);
        }
    } catch (const std::exception& e) {
        r.error = e.what();
        std::replace(r.error.begin(), r.error.end(), ',', ';');
        std::replace(r.error.begin(), r.error.end(), '\n', ' ');
    }
    return r;
}

std::vector<PointResult> evaluate_grid(const Scenario& sc, Axis axis, const std::vector<double>& grid, bool with_sim) {
    return parallel_map(grid.size(), [&](std::size_t i) {
        return evaluate(at_point(sc, axis, grid[i]), with_sim, derive_seed(sc.sim.seed, i));
    });
}

std::string sim_cells(const SimReport& rep) {
    return format_number(rep.throughput) + "," + format_number(rep.ci95_halfwidth) + "," + std::to_string(rep.seed);
}

// Writes the solve columns (or blanks on failure), the extra columns, and
// the error column when any point failed.
int write_rows(const std::vector<PointResult>& rows, std::string_view extra_header, int extra_cols,
               const std::function<std::string(const PointResult&)>& extra, std::ostream& csv, std::ostream& log) {
    const bool any_failed = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
    csv << solve_header() << extra_header << (any_failed ? ",error" : "") << '\n';
    for (const auto& r : rows) {
        if (r.error.empty()) {
            csv << solve_row(r.scenario, *r.model) << extra(r);
        } else {
            const auto& sc = r.scenario;
            csv << format_number(sc.traffic.lambda_pkt_s) << ',' << sc.traffic.n_stations << ','
                << format_number(sc.channel.snr_db) << ',' << format_number(sc.channel.z0_db)
                << std::string(10 + extra_cols, ',');
            log << "point failed: " << r.error << '\n';
        }
        if (any_failed) csv << ',' << r.error;
        csv << '\n';
    }
    return any_failed ? kNumerical : kOk;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path);
    if (!file) throw UsageError("cannot write '" + path + "'");
    return file;
}

}  // namespace

std::optional<Axis> parse_axis(std::string_view name) {
    if (name == "lambda") return Axis::lambda;
    if (name == "n") return Axis::n;
    if (name == "snr") return Axis::snr;
    if (name == "z0") return Axis::z0;
    return std::nullopt;
}

std::string_view to_string(Axis axis) {
    switch (axis) {
        case Axis::lambda: return "lambda";
        case Axis::n: return "n";
        case Axis::snr: return "snr";
        case Axis::z0: return "z0";
    }
    return "?";
}

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string_view::npos) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3 && parts.size() != 4) throw UsageError("range grid must be a:b:steps[:log]");
        const double a = parse_number(parts[0]);
        const double b = parse_number(parts[1]);
        const double steps_d = parse_number(parts[2]);
        const bool log_scale = parts.size() == 4;
        if (log_scale && parts[3] != "log") throw UsageError("range grid suffix must be ':log'");
        if (steps_d < 1 || steps_d != std::floor(steps_d)) throw UsageError("grid steps must be a positive integer");
        if (!std::isfinite(a) || !std::isfinite(b)) throw UsageError("range endpoints must be finite");
        if (log_scale && (a <= 0.0 || b <= 0.0)) throw UsageError("log grid endpoints must be > 0");
        const int steps = static_cast<int>(steps_d);
        for (int i = 0; i < steps; ++i) {
            const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
            grid.push_back(log_scale ? a * std::pow(b / a, f) : a + (b - a) * f);
        }
        if (steps > 1) grid.back() = b;
    } else {
        for (auto item : split(spec, ',')) grid.push_back(parse_number(item));
    }
    if (grid.empty()) throw UsageError("grid is empty");
    const bool up = std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) == grid.end();
    const bool down = std::adjacent_find(grid.begin(), grid.end(), std::less_equal<>()) == grid.end();
    if (!up && !down) throw UsageError("grid must be strictly monotone");
    return grid;
}

Scenario at_point(const Scenario& sc, Axis axis, double value) {
    Scenario out = sc;
    switch (axis) {
        case Axis::lambda: out.traffic.lambda_pkt_s = value; break;
        case Axis::n:
            if (value != std::floor(value)) throw UsageError("station counts must be integers");
            out.traffic.n_stations = static_cast<int>(value);
            break;
        case Axis::snr: out.channel.snr_db = value; break;
        case Axis::z0: out.channel.z0_db = value; break;
    }
    return out;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string solve_header() {
    return "lambda_pkt_s,n,snr_db,z0_db,p_e,tau,p_col,p_cap,p_eq,q,e_slot_us,throughput,iterations,residual";
}

std::string solve_row(const Scenario& sc, const ModelSolution& s) {
    std::ostringstream row;
    row << format_number(sc.traffic.lambda_pkt_s) << ',' << sc.traffic.n_stations << ','
        << format_number(sc.channel.snr_db) << ',' << format_number(sc.channel.z0_db) << ',' << format_number(s.p_e)
        << ',' << format_number(s.tau) << ',' << format_number(s.p_col) << ',' << format_number(s.p_cap) << ','
        << format_number(s.p_eq) << ',' << format_number(s.q) << ',' << format_number(s.e_slot_us) << ','
        << format_number(s.throughput) << ',' << s.iterations << ',' << format_number(s.residual);
    return row.str();
}

double relative_error(double simulated, double analytic) {
    if (analytic == 0.0) return simulated == 0.0 ? 0.0 : 1.0;
    return std::abs(simulated - analytic) / analytic;
}

int cmd_solve(const Scenario& sc, std::ostream& csv, std::ostream& log) {
    const ModelSolution s = solve_fixed_point(sc.mac, sc.channel, sc.traffic, sc.solver);
    csv << solve_header() << '\n' << solve_row(sc, s) << '\n';
    log << "N=" << sc.traffic.n_stations << " lambda=" << format_number(sc.traffic.lambda_pkt_s)
        << " pkt/s SNR=" << format_number(sc.channel.snr_db) << " dB z0=" << format_number(sc.channel.z0_db)
        << " dB: throughput " << format_number(s.throughput) << " (tau " << format_number(s.tau) << ", P_e "
        << format_number(s.p_e) << ", q " << format_number(s.q) << "; " << s.method << ", " << s.iterations
        << " iterations)\n";
    return kOk;
}

int cmd_sweep(const Scenario& sc, Axis axis, const std::vector<double>& grid, bool with_sim, std::ostream& csv,
              std::ostream& log) {
    const auto rows = evaluate_grid(sc, axis, grid, with_sim);
    if (!with_sim) {
        return write_rows(rows, "", 0, [](const PointResult&) { return std::string(); }, csv, log);
    }
    return write_rows(
        rows, ",throughput_sim,ci95,seed", 3, [](const PointResult& r) { return "," + sim_cells(*r.sim); }, csv, log);
}

int cmd_validate(const Scenario& sc, Axis axis, const std::vector<double>& grid, std::ostream& csv,
                 std::ostream& log) {
    const auto rows = evaluate_grid(sc, axis, grid, true);
    const int status = write_rows(
        rows, ",throughput_sim,ci95,seed,rel_err", 4,
        [](const PointResult& r) {
            return "," + sim_cells(*r.sim) + "," +
                   format_number(relative_error(r.sim->throughput, r.model->throughput));
        },
        csv, log);
    double worst = 0.0;
    for (const auto& r : rows) {
        if (r.error.empty()) worst = std::max(worst, relative_error(r.sim->throughput, r.model->throughput));
    }
    log << "max_rel_err=" << format_number(worst) << " over " << rows.size() << " points\n";
    return status;
}

int cmd_simulate(const Scenario& sc, std::ostream& csv, std::ostream* trace, std::ostream& log) {
    const SimReport rep = dcf::run(sc.mac, sc.channel, sc.traffic, sc.sim, trace);
    csv << "seed,sim_time_us,payload_bits_delivered,slots_idle,slots_success,slots_collision,slots_error,captures,"
           "attempts,drops,tau_hat,throughput,ci95_halfwidth,short_horizon\n";
    csv << rep.seed << ',' << format_number(rep.sim_time_us) << ',' << format_number(rep.payload_bits_delivered)
        << ',' << rep.slots_idle << ',' << rep.slots_success << ',' << rep.slots_collision << ',' << rep.slots_error
        << ',' << rep.captures << ',' << rep.attempts << ',' << rep.drops << ',' << format_number(rep.tau_hat())
        << ',' << format_number(rep.throughput) << ',' << format_number(rep.ci95_halfwidth) << ','
        << (rep.short_horizon ? 1 : 0) << '\n';
    log << rep.total_slots() << " slots, throughput " << format_number(rep.throughput) << " +/- "
        << format_number(rep.ci95_halfwidth) << (rep.short_horizon ? " (short horizon)" : "") << '\n';
    return kOk;
}

int cmd_ber(const Scenario& sc, const std::vector<double>& snr_grid_db, std::ostream& csv, std::ostream& /*log*/) {
    csv << "snr_db,ber,fer\n";
    ChannelParams ch = sc.channel;
    ch.fer_override.reset();
    for (double snr : snr_grid_db) {
        ch.snr_db = snr;
        const double b = ber_rayleigh({ch.modulation, db_to_linear(snr)});
        csv << format_number(snr) << ',' << format_number(b) << ',' << format_number(fer(sc.mac, ch)) << '\n';
    }
    return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"IEEE 802.11 DCF throughput model: analytical solver and Monte-Carlo simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string axis_name = "lambda";
    std::string grid_spec;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    bool with_sim = false;
    bool trace = false;
    std::string trace_path;

    const auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value scenario file");
        cmd->add_option("--set", overrides, "override one key (key=value), repeatable");
        cmd->add_option("--out", out_path, "write CSV here instead of stdout");
        cmd->add_option("--seed", seed, "master seed for simulation");
    };
    auto* solve = app.add_subcommand("solve", "solve one scenario");
    auto* sweep = app.add_subcommand("sweep", "solve over a parameter grid");
    auto* simulate = app.add_subcommand("simulate", "run the Monte-Carlo simulator");
    auto* validate_cmd = app.add_subcommand("validate", "compare model and simulator over a grid");
    auto* ber = app.add_subcommand("ber", "tabulate BER and FER against SNR");
    for (auto* cmd : {solve, sweep, simulate, validate_cmd, ber}) common(cmd);
    for (auto* cmd : {sweep, validate_cmd}) {
        cmd->add_option("--axis", axis_name, "lambda, n, snr or z0")->check(CLI::IsMember({"lambda", "n", "snr", "z0"}));
        cmd->add_option("--grid", grid_spec, "a:b:steps, a:b:steps:log or v1,v2,...");
    }
    sweep->add_flag("--validate", with_sim, "add simulated throughput columns");
    ber->add_option("--grid", grid_spec, "SNR grid in dB");
    simulate->add_flag("--trace", trace, "emit the per-slot event log");
    simulate->add_option("--trace-out", trace_path, "trace destination (default stderr)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        std::vector<std::pair<std::string, std::string>> kv;
        for (const auto& o : overrides) kv.push_back(split_override(o));
        if (seed) kv.emplace_back("seed", std::to_string(*seed));
        Scenario sc;
        if (config_path.empty()) {
            std::istringstream empty;
            sc = parse_scenario(empty, kv);
        } else {
            sc = load_scenario(config_path, kv);
        }

        std::ofstream file;
        std::ostream& csv = open_output(out_path, file, out);

        if (*solve) return cmd_solve(sc, csv, err);
        if (*simulate) {
            std::ofstream trace_file;
            std::ostream* trace_stream = nullptr;
            if (trace) trace_stream = &open_output(trace_path, trace_file, err);
            return cmd_simulate(sc, csv, trace_stream, err);
        }
        if (*ber) return cmd_ber(sc, parse_grid(grid_spec.empty() ? "0:40:41" : grid_spec), csv, err);

        const Axis axis = *parse_axis(axis_name);
        std::vector<double> grid;
        if (grid_spec.empty()) {
            switch (axis) {
                case Axis::lambda: grid = {sc.traffic.lambda_pkt_s}; break;
                case Axis::n: grid = {static_cast<double>(sc.traffic.n_stations)}; break;
                case Axis::snr: grid = {sc.channel.snr_db}; break;
                case Axis::z0: grid = {sc.channel.z0_db}; break;
            }
        } else {
            grid = parse_grid(grid_spec);
        }
        if (*sweep) return cmd_sweep(sc, axis, grid, with_sim, csv, err);
        return cmd_validate(sc, axis, grid, csv, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnsupportedModulation& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace dcf::cli
