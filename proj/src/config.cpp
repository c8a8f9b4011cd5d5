#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "kpbloch/cli.hpp"
#include "kpbloch/errors.hpp"

namespace kpbloch::cli {

namespace {

const std::vector<std::pair<std::string, std::string>> commands{
    {"eigen", "periodic and antiperiodic eigenvalues with error bounds"},
    {"gaps", "gap lengths with bounds and asymptotic predictions"},
    {"bands", "band edges"},
    {"asym", "asymptotic eigenvalue and gap formulas against the oracle"},
    {"verify", "self-checks against the transfer-matrix oracle"},
};

// Everything that can come from flags; unset means "keep the file value".
struct Flags {
    std::optional<double> a, b, c, tol, eps;
    std::optional<int> r, s, max_iter, n_max;
    std::optional<std::string> format, output, config;
};

Format parse_format(const std::string& name) {
    if (name == "table")
        return Format::Table;
    if (name == "json")
        return Format::Json;
    if (name == "csv")
        return Format::Csv;
    throw InvalidArgument("format must be one of table, json, csv (got '" + name + "')");
}

template <typename T>
T field(const nlohmann::json& doc, const std::string& key) {
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidArgument("config field '" + key + "' has the wrong type");
    }
}

void apply_file(const std::string& path, RunConfig& cfg, bool& have_a, bool& have_c) {
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object())
        throw InvalidArgument("config: top level of '" + path + "' must be an object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "a") {
            cfg.a = field<double>(doc, key);
            have_a = true;
        } else if (key == "b") {
            if (!value.is_null())
                cfg.b = field<double>(doc, key);
        } else if (key == "c") {
            cfg.c = field<double>(doc, key);
            have_c = true;
        } else if (key == "pi_units") {
            cfg.pi_units = field<bool>(doc, key);
        } else if (key == "r") {
            cfg.r = field<int>(doc, key);
        } else if (key == "s") {
            cfg.s = field<int>(doc, key);
        } else if (key == "tol") {
            cfg.tol = field<double>(doc, key);
        } else if (key == "max_iter") {
            cfg.max_iter = field<int>(doc, key);
        } else if (key == "n_max") {
            cfg.n_max = field<int>(doc, key);
        } else if (key == "relaxed") {
            cfg.relaxed = field<bool>(doc, key);
        } else if (key == "oracle") {
            cfg.oracle = field<bool>(doc, key);
        } else if (key == "eps") {
            cfg.eps = field<double>(doc, key);
        } else if (key == "format") {
            cfg.format = parse_format(field<std::string>(doc, key));
        } else if (key == "output") {
            cfg.output = field<std::string>(doc, key);
        } else {
            throw InvalidArgument("config: unknown field '" + key + "'");
        }
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.r < 1)
        throw InvalidArgument("r must be >= 1");
    if (cfg.s < 1)
        throw InvalidArgument("s must be >= 1");
    if (!(cfg.tol > 0 && cfg.tol < 1))
        throw InvalidArgument("tol must be in (0,1)");
    if (cfg.max_iter < 1)
        throw InvalidArgument("max_iter must be >= 1");
    if (cfg.n_max < 0)
        throw InvalidArgument("n_max must be >= 0");
    if (!(cfg.eps > 0))
        throw InvalidArgument("eps must be positive");
}

}  // namespace

RunConfig parse_arguments(const std::vector<std::string>& args) {
    CLI::App app{"Bloch eigenvalues, gaps and bands of the Kronig-Penney operator", "kpbloch"};
    app.require_subcommand(1);
    app.allow_extras(false);

    Flags f;
    bool pi_units = false, relaxed = false, oracle = false;
    app.add_option("--a", f.a, "potential value on [0,c] (negative)");
    app.add_option("--b", f.b, "potential value on (c,1]; derived from zero mean if omitted");
    app.add_option("--c", f.c, "step location in (0,1)");
    app.add_flag("--pi-units", pi_units, "read a, b and print energies in units of pi^2");
    app.add_option("--r", f.r, "series depth (default 5)");
    app.add_option("--s", f.s, "index window half-width (default 5)");
    app.add_option("--tol", f.tol, "fixed-point step tolerance (default 1e-14)");
    app.add_option("--max-iter", f.max_iter, "iteration cap (default 100)");
    app.add_option("--n-max", f.n_max, "largest pair index n (default 2)");
    app.add_flag("--relaxed", relaxed, "also solve sectors that meet only the relaxed condition");
    app.add_flag("--oracle", oracle, "add transfer-matrix oracle values");
    app.add_option("--eps", f.eps, "threshold for the gap phase condition (default 1)");
    app.add_option("--format", f.format, "table | json | csv (default table)");
    app.add_option("--output", f.output, "write the report to PATH");
    app.add_option("--config", f.config, "JSON file with defaults; flags override it");

    std::string command;
    for (const auto& [name, description] : commands)
        app.add_subcommand(name, description)->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw InvalidArgument(e.what());
    }

    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    bool have_a = false, have_c = false;
    if (f.config)
        apply_file(*f.config, cfg, have_a, have_c);

    if (f.a) {
        cfg.a = *f.a;
        have_a = true;
    }
    if (f.b)
        cfg.b = f.b;
    if (f.c) {
        cfg.c = *f.c;
        have_c = true;
    }
    if (pi_units)
        cfg.pi_units = true;
    if (f.r)
        cfg.r = *f.r;
    if (f.s)
        cfg.s = *f.s;
    if (f.tol)
        cfg.tol = *f.tol;
    if (f.max_iter)
        cfg.max_iter = *f.max_iter;
    if (f.n_max)
        cfg.n_max = *f.n_max;
    if (relaxed)
        cfg.relaxed = true;
    if (oracle)
        cfg.oracle = true;
    if (f.eps)
        cfg.eps = *f.eps;
    if (f.format)
        cfg.format = parse_format(*f.format);
    if (f.output)
        cfg.output = f.output;

    if (!have_a)
        throw InvalidArgument("missing required field a");
    if (!have_c)
        throw InvalidArgument("missing required field c");
    validate(cfg);
    return cfg;
}

}  // namespace kpbloch::cli
