#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace kpbloch::cli {

enum class Format { Table, Json, Csv };

/// Exit codes of the kpbloch tool.
enum ExitCode : int {
    ok = 0,
    config_error = 1,
    condition_violated = 2,
    non_convergence = 3,
};

/// Fully resolved run configuration (file values overridden by flags).
struct RunConfig {
    std::string command;
    double a = 0;
    std::optional<double> b;  ///< derived from the zero-mean condition when absent
    double c = 0;
    bool pi_units = false;    ///< a, b and every printed energy in units of pi^2
    int r = 5;
    int s = 5;
    double tol = 1e-14;
    int max_iter = 100;
    int n_max = 2;
    bool relaxed = false;
    bool oracle = false;
    double eps = 1.0;
    Format format = Format::Table;
    std::optional<std::string> output;
};

/// Parses argv-style arguments (without the program name). Throws
/// kpbloch::InvalidArgument naming the offending field.
RunConfig parse_arguments(const std::vector<std::string>& args);

/// Runs one subcommand and returns its exit code. Reports go to `out` (or
/// the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpbloch::cli
