#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "kpbloch/cli.hpp"
#include "kpbloch/kpbloch.hpp"
#include "report.hpp"

namespace kpbloch::cli {

namespace {

constexpr double pi2 = std::numbers::pi * std::numbers::pi;

using Potential = KronigPenney<double>;

Potential make_potential(const RunConfig& cfg) {
    const double unit = cfg.pi_units ? pi2 : 1.0;
    if (cfg.b)
        return Potential::from_values(cfg.a * unit, *cfg.b * unit, cfg.c);
    return Potential::from_depth(cfg.a * unit, cfg.c);
}

TruncationParams make_truncation(const RunConfig& cfg) {
    TruncationParams t;
    t.depth = cfg.r;
    t.window = cfg.s;
    t.tolerance = cfg.tol;
    t.max_iter = cfg.max_iter;
    t.validate();
    return t;
}

/// Context shared by the commands: the potential, unit conversion and the
/// worst exit status seen so far.
struct Run {
    const RunConfig& cfg;
    Potential p;
    TruncationParams t;
    int status = ok;
    std::vector<std::string> notes;  ///< diagnostics for stderr

    double energy(double x) const { return cfg.pi_units ? x / pi2 : x; }
    void raise(int code) {
        if (code == non_convergence || (code == condition_violated && status == ok))
            status = code;
    }
};

const char* format_name(Format f) {
    switch (f) {
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    case Format::Table: return "table";
    }
    return "?";
}

nlohmann::ordered_json config_json(const Run& run) {
    const auto& cfg = run.cfg;
    const double unit = cfg.pi_units ? pi2 : 1.0;
    nlohmann::ordered_json j;
    j["command"] = cfg.command;
    j["a"] = std::stod(format_number(cfg.a));
    j["b"] = std::stod(format_number(run.p.b() / unit));
    j["c"] = std::stod(format_number(cfg.c));
    j["pi_units"] = cfg.pi_units;
    j["r"] = cfg.r;
    j["s"] = cfg.s;
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["n_max"] = cfg.n_max;
    j["relaxed"] = cfg.relaxed;
    j["oracle"] = cfg.oracle;
    j["eps"] = cfg.eps;
    j["format"] = format_name(cfg.format);
    return j;
}

std::string title(const Run& run) {
    const auto& cfg = run.cfg;
    const double unit = cfg.pi_units ? pi2 : 1.0;
    return "kpbloch " + cfg.command + "  a=" + format_number(cfg.a) + " b=" + format_number(run.p.b() / unit) +
           " c=" + format_number(cfg.c) + " r=" + std::to_string(cfg.r) + " s=" + std::to_string(cfg.s) +
           " tol=" + format_number(cfg.tol) + (cfg.pi_units ? "  (energies in units of pi^2)" : "");
}

// ---- solver sweep ----------------------------------------------------------

struct SectorResult {
    SectorIndex sector;
    std::optional<EigenSolution<double>> solution;
    std::string status;  // strict, relaxed, violated, escaped, nonconverged, failed
    std::string message;

    bool has_value() const { return solution.has_value() && status != "nonconverged"; }
};

const char* label(SectorKind kind) {
    switch (kind) {
    case SectorKind::Ground: return "lambda0";
    case SectorKind::Periodic: return "lambda";
    case SectorKind::Antiperiodic: return "mu";
    }
    return "?";
}

/// Solves lambda_0 and every pair with n <= n_max, in spectral order:
/// lambda_0, mu_{1,1}, mu_{1,2}, lambda_{1,1}, lambda_{1,2}, mu_{2,1}, ...
std::vector<SectorResult> solve_all(Run& run) {
    std::vector<SectorResult> out;
    auto attempt = [&](SectorKind kind, int n) {
        const std::vector<SectorIndex> sectors =
            kind == SectorKind::Ground ? std::vector<SectorIndex>{SectorIndex::ground()}
                                       : std::vector<SectorIndex>{{kind, n, 1}, {kind, n, 2}};
        auto fail = [&](const std::string& status, const std::string& msg, int code) {
            for (const auto& s : sectors)
                out.push_back({s, std::nullopt, status, msg});
            run.notes.push_back(msg);
            run.raise(code);
        };
        try {
            if (kind == SectorKind::Ground) {
                auto sol = solve(run.p, run.t, SectorIndex::ground(), run.cfg.relaxed);
                out.push_back({sol.sector, sol, to_string(sol.condition), ""});
            } else {
                for (auto& sol : solve_pair(run.p, run.t, kind, n, run.cfg.relaxed))
                    out.push_back({sol.sector, sol, to_string(sol.condition), ""});
            }
        } catch (const HypothesisFailure& e) {
            fail("violated", e.what(), condition_violated);
        } catch (const LocalizationEscape& e) {
            fail("escaped", e.what(), condition_violated);
        } catch (const NonConvergence& e) {
            for (const auto& s : sectors) {
                SectorResult r{s, std::nullopt, "nonconverged", e.what()};
                if (s == e.last().sector)
                    r.solution = e.last();
                out.push_back(r);
            }
            run.notes.push_back(e.what());
            run.raise(non_convergence);
        } catch (const Error& e) {
            fail("failed", e.what(), condition_violated);
        }
    };
    attempt(SectorKind::Ground, 0);
    for (int n = 1; n <= run.cfg.n_max; ++n) {
        attempt(SectorKind::Antiperiodic, n);
        attempt(SectorKind::Periodic, n);
    }
    return out;
}

const SectorResult* find(const std::vector<SectorResult>& rs, SectorIndex s) {
    for (const auto& r : rs)
        if (r.sector == s)
            return &r;
    return nullptr;
}

std::optional<double> value_of(const std::vector<SectorResult>& rs, SectorIndex s) {
    const auto* r = find(rs, s);
    if (!r || !r->has_value())
        return std::nullopt;
    return r->solution->value;
}

double bound_of(const std::vector<SectorResult>& rs, SectorIndex s) {
    const auto* r = find(rs, s);
    return r && r->has_value() ? r->solution->total_bound : std::nan("");
}

Cell opt(std::optional<double> x) {
    if (!x)
        return std::monostate{};
    return *x;
}

// ---- oracle ----------------------------------------------------------------

/// Oracle table with at least max(n_max, 1) pairs.
SpectralTable<double> oracle_table(const Run& run) {
    return bands_and_gaps(run.p, std::max(run.cfg.n_max, 1));
}

double oracle_value(const SpectralTable<double>& tab, SectorIndex s) {
    if (s.kind == SectorKind::Ground)
        return tab.lambda0;
    const auto& pair = s.kind == SectorKind::Periodic ? tab.periodic[s.n - 1] : tab.antiperiodic[s.n - 1];
    return s.j == 1 ? pair.lower : pair.upper;
}

/// Sectors bounding gap k: D_{2m-1} = (mu_{m,1}, mu_{m,2}), D_{2m} = (lambda_{m,1}, lambda_{m,2}).
std::pair<SectorIndex, SectorIndex> gap_edges(int k) {
    const int m = (k + 1) / 2;
    const auto kind = k % 2 ? SectorKind::Antiperiodic : SectorKind::Periodic;
    return {{kind, m, 1}, {kind, m, 2}};
}

/// Sectors bounding band k: G_1 = [lambda_0, mu_{1,1}], G_{2m} = [mu_{m,2}, lambda_{m,1}],
/// G_{2m+1} = [lambda_{m,2}, mu_{m+1,1}].
std::pair<SectorIndex, SectorIndex> band_edges(int k) {
    if (k == 1)
        return {SectorIndex::ground(), SectorIndex::antiperiodic(1, 1)};
    const int m = k / 2;
    if (k % 2 == 0)
        return {SectorIndex::antiperiodic(m, 2), SectorIndex::periodic(m, 1)};
    return {SectorIndex::periodic(m, 2), SectorIndex::antiperiodic(m + 1, 1)};
}

// ---- commands --------------------------------------------------------------

Report cmd_eigen(Run& run) {
    Report rep;
    const auto results = solve_all(run);
    std::optional<SpectralTable<double>> tab;
    if (run.cfg.oracle)
        tab = oracle_table(run);

    auto& sec = rep.eigenvalues;
    sec.keys = {"sector", "n", "j", "value", "bound", "iterations", "condition"};
    if (tab)
        sec.keys.insert(sec.keys.end(), {"oracle", "error"});
    for (const auto& r : results) {
        std::vector<Cell> row{std::string(label(r.sector.kind)), long(r.sector.n), long(r.sector.j)};
        if (r.solution) {
            row.insert(row.end(), {run.energy(r.solution->value), run.energy(r.solution->total_bound),
                                   long(r.solution->iterations)});
        } else {
            row.insert(row.end(), {std::monostate{}, std::monostate{}, std::monostate{}});
        }
        row.push_back(r.status);
        if (tab) {
            const double o = oracle_value(*tab, r.sector);
            row.push_back(run.energy(o));
            row.push_back(r.has_value() ? Cell(run.energy(std::abs(r.solution->value - o))) : Cell{});
        }
        sec.add(std::move(row));
    }
    return rep;
}

Report cmd_gaps(Run& run) {
    Report rep;
    const auto results = solve_all(run);
    std::optional<SpectralTable<double>> tab;
    if (run.cfg.oracle)
        tab = oracle_table(run);

    auto& sec = rep.gaps;
    sec.keys = {"k", "length", "bound"};
    if (tab)
        sec.keys.insert(sec.keys.end(), {"oracle", "agree"});
    sec.keys.insert(sec.keys.end(), {"first_order", "second_order"});
    for (int k = 1; k <= 2 * run.cfg.n_max; ++k) {
        const auto [lo, hi] = gap_edges(k);
        const auto x = value_of(results, lo), y = value_of(results, hi);
        std::optional<double> len;
        if (x && y)
            len = *y - *x;
        const double bound = bound_of(results, lo) + bound_of(results, hi);
        std::vector<Cell> row{long(k), opt(len ? std::optional(run.energy(*len)) : std::nullopt),
                              run.energy(bound)};
        if (tab) {
            const double o = tab->gaps[k - 1].length();
            row.push_back(run.energy(o));
            if (len && std::isfinite(bound))
                row.push_back(std::abs(*len - o) <= bound);
            else
                row.push_back(std::monostate{});
        }
        const auto g = gap_prediction(run.p, k);
        row.push_back(run.energy(g.first_order));
        row.push_back(run.energy(g.second_order));
        sec.add(std::move(row));
    }
    return rep;
}

Report cmd_bands(Run& run) {
    Report rep;
    const auto results = solve_all(run);
    std::optional<SpectralTable<double>> tab;
    if (run.cfg.oracle)
        tab = oracle_table(run);

    auto& sec = rep.bands;
    sec.keys = {"k", "left", "right"};
    if (tab)
        sec.keys.insert(sec.keys.end(), {"oracle_left", "oracle_right"});
    // Band 2 n_max + 1 would need mu_{n_max + 1, 1}; stop at the last closed band.
    for (int k = 1; k <= 2 * run.cfg.n_max; ++k) {
        const auto [lo, hi] = band_edges(k);
        std::vector<Cell> row{long(k), opt(value_of(results, lo)), opt(value_of(results, hi))};
        for (std::size_t i = 1; i < row.size(); ++i)
            if (auto* x = std::get_if<double>(&row[i]))
                *x = run.energy(*x);
        if (tab) {
            const auto& b = tab->bands[k - 1];
            row.push_back(run.energy(b.left));
            row.push_back(run.energy(b.right));
        }
        sec.add(std::move(row));
    }
    return rep;
}

Report cmd_asym(Run& run) {
    Report rep;
    if (run.cfg.n_max < 1)
        throw InvalidArgument("n_max must be >= 1 for asym");
    const auto tab = oracle_table(run);

    auto& eig = rep.eigenvalues;
    eig.keys = {"sector", "n", "j", "value", "asym", "asym_exact_d", "scaled_residual"};
    for (int n = 1; n <= run.cfg.n_max; ++n) {
        for (auto kind : {SectorKind::Antiperiodic, SectorKind::Periodic}) {
            for (int j = 1; j <= 2; ++j) {
                const SectorIndex s{kind, n, j};
                const double o = oracle_value(tab, s);
                const double approx = eigen_asym(run.p, s);
                const double approx_d = eigen_asym(run.p, s, true);
                eig.add({std::string(label(kind)), long(n), long(j), run.energy(o), run.energy(approx),
                         run.energy(approx_d), run.energy(double(n) * n * std::abs(approx - o))});
            }
        }
    }

    auto& gaps = rep.gaps;
    gaps.keys = {"k", "oracle", "first_order", "second_order", "theta", "phase_margin", "condition_c"};
    for (int k = 1; k <= 2 * run.cfg.n_max; ++k) {
        const auto g = gap_prediction(run.p, k);
        gaps.add({long(k), run.energy(tab.gaps[k - 1].length()), run.energy(g.first_order),
                  run.energy(g.second_order), g.theta, phase_margin(run.p, k),
                  condition_c(run.p, k, run.cfg.eps)});
    }
    return rep;
}

Report cmd_verify(Run& run) {
    Report rep;
    const auto results = solve_all(run);
    run.status = ok;  // verify reports skipped sectors as SKIP, not as failures
    const auto tab = oracle_table(run);
    auto& sec = rep.checks;
    sec.keys = {"check", "status", "detail"};
    bool all_pass = true;
    auto check = [&](const std::string& name, bool pass, const std::string& detail) {
        sec.add({name, std::string(pass ? "PASS" : "FAIL"), detail});
        all_pass = all_pass && pass;
    };
    auto skip = [&](const std::string& name, const std::string& detail) {
        sec.add({name, std::string("SKIP"), detail});
    };
    auto sector_name = [](SectorIndex s) {
        if (s.kind == SectorKind::Ground)
            return std::string("lambda0");
        return std::string(label(s.kind)) + "[" + std::to_string(s.n) + "," + std::to_string(s.j) + "]";
    };

    for (const auto& r : results) {
        const auto name = "oracle " + sector_name(r.sector);
        if (r.status == "strict") {
            const double diff = std::abs(r.solution->value - oracle_value(tab, r.sector));
            check(name, diff <= r.solution->total_bound,
                  "|diff| " + format_number(run.energy(diff)) + " <= bound " +
                      format_number(run.energy(r.solution->total_bound)));
        } else if (r.status == "relaxed") {
            const double diff = std::abs(r.solution->value - oracle_value(tab, r.sector));
            skip(name, "relaxed, uncertified; |diff| " + format_number(run.energy(diff)));
        } else if (r.status == "nonconverged") {
            check(name, false, r.message);
        } else {
            skip(name, r.message);
        }
    }

    for (const auto& r : results) {
        if (!r.has_value())
            continue;
        const auto box = localization(run.p, r.sector.kind, r.sector.n);
        check("localization " + sector_name(r.sector), box.contains(r.solution->value),
              "[" + format_number(run.energy(box.lower())) + ", " + format_number(run.energy(box.upper())) + "]");
    }

    for (const auto& r : results) {
        if (!r.has_value() || r.sector.j != 1)
            continue;
        const auto name = "reality " + sector_name(r.sector);
        try {
            map_parts(run.p, run.t, r.sector.kind, r.sector.n, r.solution->value);
            check(name, true, "imaginary parts within tolerance");
        } catch (const Error& e) {
            check(name, false, e.what());
        }
    }

    {
        const double lo = -run.p.M() - 1;
        const double hi = tab.periodic.back().upper + run.p.M();
        double worst = 0;
        for (int i = 0; i <= 1000; ++i) {
            const double lambda = lo + (hi - lo) * i / 1000.0;
            worst = std::max(worst, std::abs(monodromy(run.p, lambda).determinant() - 1));
        }
        check("det(monodromy) = 1", worst <= 1e-10, "max deviation " + format_number(worst));
    }

    {
        double worst = std::abs(discriminant(run.p, tab.lambda0) - 2);
        for (const auto& pr : tab.periodic)
            for (double x : {pr.lower, pr.upper})
                worst = std::max(worst, std::abs(discriminant(run.p, x) - 2));
        for (const auto& pr : tab.antiperiodic)
            for (double x : {pr.lower, pr.upper})
                worst = std::max(worst, std::abs(discriminant(run.p, x) + 2));
        check("discriminant at oracle eigenvalues", worst <= 1e-8, "max |D -+ 2| " + format_number(worst));
    }

    {
        const auto seq = tab.ordered();
        bool ordered = true;
        for (std::size_t i = 1; i < seq.size(); ++i)
            ordered = ordered && seq[i - 1] <= seq[i];
        check("interlacing (oracle)", ordered, std::to_string(seq.size()) + " eigenvalues");
    }

    {
        std::vector<double> seq;
        bool complete = true;
        for (const auto& r : results) {
            complete = complete && r.has_value();
            if (r.has_value())
                seq.push_back(r.solution->value);
        }
        if (complete) {
            bool ordered = true;
            for (std::size_t i = 1; i < seq.size(); ++i)
                ordered = ordered && seq[i - 1] <= seq[i];
            check("interlacing (solver)", ordered, std::to_string(seq.size()) + " eigenvalues");
        } else {
            skip("interlacing (solver)", "some sectors were not solved");
        }
    }

    if (!all_pass)
        run.raise(condition_violated);
    return rep;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_arguments(args);
    } catch (const HelpRequested& help) {
        out << help.text;
        return ok;
    } catch (const Error& e) {
        err << "kpbloch: " << e.what() << '\n';
        return config_error;
    }

    std::optional<Run> context;
    try {
        context.emplace(Run{cfg, make_potential(cfg), make_truncation(cfg), ok, {}});
    } catch (const Error& e) {
        err << "kpbloch: " << e.what() << '\n';
        return config_error;
    }
    Run& run = *context;

    Report rep;
    try {
        static const std::vector<std::pair<std::string, std::function<Report(Run&)>>> table{
            {"eigen", cmd_eigen}, {"gaps", cmd_gaps}, {"bands", cmd_bands},
            {"asym", cmd_asym},   {"verify", cmd_verify}};
        for (const auto& [name, fn] : table)
            if (name == cfg.command)
                rep = fn(run);
    } catch (const InvalidArgument& e) {
        err << "kpbloch: " << e.what() << '\n';
        return config_error;
    } catch (const BracketExhaustion& e) {
        err << "kpbloch: oracle: " << e.what() << " (" << e.found() << " roots found)\n";
        return non_convergence;
    }
    rep.config = config_json(run);
    rep.title = title(run);

    if (cfg.output) {
        std::ofstream file(*cfg.output, std::ios::binary);
        if (!file) {
            err << "kpbloch: cannot write '" << *cfg.output << "'\n";
            return config_error;
        }
        render(rep, cfg.format, file);
    } else {
        render(rep, cfg.format, out);
    }

    for (const auto& note : run.notes)
        err << "kpbloch: " << note << '\n';
    return run.status;
}

}  // namespace kpbloch::cli
