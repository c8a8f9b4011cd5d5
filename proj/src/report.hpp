#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kpbloch/cli.hpp"

namespace kpbloch::cli {

/// Empty cell, energy-like number, count, label or flag.
using Cell = std::variant<std::monostate, double, long, std::string, bool>;

/// One block of output rows. `name` is the JSON key; `record` labels its rows
/// in CSV.
struct Section {
    std::string name;
    std::string record;
    std::vector<std::string> keys;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Everything one command prints. The JSON form always carries "config",
/// "eigenvalues", "gaps" and "bands" (possibly empty) in that order,
/// followed by "checks" for verify.
struct Report {
    nlohmann::ordered_json config;
    std::string title;
    Section eigenvalues{"eigenvalues", "eigenvalue", {}, {}};
    Section gaps{"gaps", "gap", {}, {}};
    Section bands{"bands", "band", {}, {}};
    Section checks{"checks", "check", {}, {}};
};

/// 12 significant digits; the only number formatting used in output.
std::string format_number(double x);

void render(const Report& report, Format format, std::ostream& out);

}  // namespace kpbloch::cli
