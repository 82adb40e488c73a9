#pragma once

#include "dcf/config.hpp"
#include "dcf/error.hpp"
#include "dcf/sim.hpp"
#include "dcf/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcf::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Bad command-line input (grid syntax, axis name, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

enum class Axis { lambda, n, snr, z0 };

std::optional<Axis> parse_axis(std::string_view name);
std::string_view to_string(Axis axis);

/// `a:b:steps` (linear), `a:b:steps:log`, or `v1,v2,...`. Values must be
/// strictly monotone. Throws UsageError.
std::vector<double> parse_grid(std::string_view spec);

/// Copy of `sc` with the axis parameter set to `value`.
Scenario at_point(const Scenario& sc, Axis axis, double value);

/// `%.10g`, with `inf` for infinities.
std::string format_number(double v);

std::string solve_header();
std::string solve_row(const Scenario& sc, const ModelSolution& s);

/// Relative throughput error; 0 when both are zero, 1 when only the
/// analytical value is zero.
double relative_error(double simulated, double analytic);

int cmd_solve(const Scenario& sc, std::ostream& csv, std::ostream& log);
int cmd_sweep(const Scenario& sc, Axis axis, const std::vector<double>& grid, bool with_sim, std::ostream& csv,
              std::ostream& log);
int cmd_simulate(const Scenario& sc, std::ostream& csv, std::ostream* trace, std::ostream& log);
int cmd_validate(const Scenario& sc, Axis axis, const std::vector<double>& grid, std::ostream& csv,
                 std::ostream& log);
int cmd_ber(const Scenario& sc, const std::vector<double>& snr_grid_db, std::ostream& csv, std::ostream& log);

/// Full command-line entry point.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dcf::cli
