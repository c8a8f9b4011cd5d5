#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace kpbloch::cli {

std::string format_number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

std::string cell_text(const Cell& cell, const char* empty) {
    struct Visitor {
        const char* empty;
        std::string operator()(std::monostate) const { return empty; }
        std::string operator()(double x) const { return std::isnan(x) ? empty : format_number(x); }
        std::string operator()(long n) const { return std::to_string(n); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{empty}, cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double x) const {
            // Round through the printed form so JSON and tables agree digit for digit.
            if (!std::isfinite(x))
                return nullptr;
            return std::stod(format_number(x));
        }
        nlohmann::ordered_json operator()(long n) const { return n; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
    };
    return std::visit(Visitor{}, cell);
}

std::vector<const Section*> sections(const Report& r) {
    return {&r.eigenvalues, &r.gaps, &r.bands, &r.checks};
}

void render_json(const Report& r, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["config"] = r.config;
    for (const Section* s : sections(r)) {
        if (s == &r.checks && s->rows.empty())
            continue;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : s->rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < s->keys.size(); ++i)
                obj[s->keys[i]] = cell_json(row[i]);
            rows.push_back(std::move(obj));
        }
        doc[s->name] = std::move(rows);
    }
    out << doc.dump(2) << '\n';
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + '"';
}

// A single header: "record" followed by the union of all section keys in
// first-seen order.
void render_csv(const Report& r, std::ostream& out) {
    std::vector<std::string> header{"record"};
    for (const Section* s : sections(r))
        for (const auto& k : s->keys)
            if (std::find(header.begin(), header.end(), k) == header.end())
                header.push_back(k);

    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const Section* s : sections(r)) {
        for (const auto& row : s->rows) {
            std::vector<std::string> line(header.size());
            line[0] = s->record;
            for (std::size_t i = 0; i < s->keys.size(); ++i) {
                const auto at = std::find(header.begin(), header.end(), s->keys[i]) - header.begin();
                line[at] = csv_escape(cell_text(row[i], ""));
            }
            for (std::size_t i = 0; i < line.size(); ++i)
                out << (i ? "," : "") << line[i];
            out << '\n';
        }
    }
}

void render_table(const Report& r, std::ostream& out) {
    out << "# " << r.title << '\n';
    for (const Section* s : sections(r)) {
        if (s->rows.empty())
            continue;
        std::vector<std::vector<std::string>> text;
        std::vector<std::size_t> width(s->keys.size());
        for (std::size_t i = 0; i < s->keys.size(); ++i)
            width[i] = s->keys[i].size();
        for (const auto& row : s->rows) {
            auto& line = text.emplace_back();
            for (std::size_t i = 0; i < row.size(); ++i) {
                line.push_back(cell_text(row[i], "-"));
                width[i] = std::max(width[i], line.back().size());
            }
        }
        auto emit = [&](const std::vector<std::string>& cells) {
            std::string line;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i)
                    line += "  ";
                line += cells[i];
                if (i + 1 < cells.size())
                    line.append(width[i] - cells[i].size(), ' ');
            }
            out << line << '\n';
        };
        out << '\n' << s->name << '\n';
        emit(s->keys);
        for (const auto& line : text)
            emit(line);
    }
}

}  // namespace

void render(const Report& report, Format format, std::ostream& out) {
    switch (format) {
    case Format::Json: render_json(report, out); break;
    case Format::Csv: render_csv(report, out); break;
    case Format::Table: render_table(report, out); break;
    }
}

}  // namespace kpbloch::cli
