#pragma once

#include <charconv>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "degenheat/conditions.hpp"
#include "degenheat/errors.hpp"
#include "degenheat/problem.hpp"
#include "degenheat/verify.hpp"

namespace degenheat::io {

/// A parsed problem-spec file. Presence flags drive canonical
/// re-serialization: optional sections are emitted only when they were
/// present (or explicitly forced, as in run headers).
struct SpecDocument {
    ProblemSpec problem{};
    GridSpec grid{};
    bool has_hoelder = false;
    bool has_tolerances = false;
};

// ---------------------------------------------------------------------------
// number formatting

/// Shortest representation that round-trips through parsing; canonical for
/// spec files.
inline std::string format_number(double value) {
    char buffer[40];
    const auto out = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, out.ptr);
}

/// Fixed 17-significant-digit formatting for data files.
inline std::string format_g17(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

inline std::string format_complex(std::complex<double> value) {
    return format_number(value.real()) + "," + format_number(value.imag());
}

// ---------------------------------------------------------------------------
// parsing helpers

namespace detail {

inline std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    return text;
}

inline double parse_number(std::string_view text, const std::string& key_path) {
    text = trim(text);
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size())
        throw ParseError(key_path + ": expected a number, got '" + std::string(text) + "'");
    return value;
}

inline std::size_t parse_count(std::string_view text, const std::string& key_path) {
    text = trim(text);
    std::size_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size())
        throw ParseError(key_path + ": expected a count, got '" + std::string(text) + "'");
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::complex<double> parse_complex(std::string_view text, const std::string& key_path) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) return {parse_number(parts[0], key_path), 0.0};
    if (parts.size() == 2)
        return {parse_number(parts[0], key_path), parse_number(parts[1], key_path)};
    throw ParseError(key_path + ": expected 're,im', got '" + std::string(text) + "'");
}

inline std::vector<double> parse_number_list(std::string_view text, char sep,
                                             const std::string& key_path) {
    std::vector<double> out;
    for (const auto part : split(text, sep)) {
        const auto token = trim(part);
        if (token.empty()) continue;
        out.push_back(parse_number(token, key_path));
    }
    if (out.empty()) throw ParseError(key_path + ": expected a non-empty list");
    return out;
}

/// Tracks which keys of a section were consumed so leftovers can be rejected.
class Section {
public:
    Section(std::string name, std::map<std::string, std::string> entries)
        : name_(std::move(name)), entries_(std::move(entries)) {}

    std::optional<std::string> get(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        consumed_.insert(key);
        return it->second;
    }

    std::string require(const std::string& key) {
        auto value = get(key);
        if (!value) throw ParseError(name_ + "." + key + ": missing required key");
        return *value;
    }

    void finish() const {
        for (const auto& [key, value] : entries_) {
            if (consumed_.count(key) == 0)
                throw ParseError(name_ + "." + key + ": unknown key");
        }
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
};

inline CoefficientProfile parse_coefficient(Section& section) {
    const std::string kind = section.require("kind");
    if (kind == "constant") {
        return CoefficientProfile::constant(parse_complex(section.require("value"), section.path("value")));
    }
    if (kind == "phase_arc") {
        const double theta0 = parse_number(section.require("theta0"), section.path("theta0"));
        const double theta1 = parse_number(section.require("theta1"), section.path("theta1"));
        const auto ramp = parse_number_list(section.require("ramp"), ',', section.path("ramp"));
        if (ramp.size() != 2) throw ParseError(section.path("ramp") + ": expected 'begin,end'");
        try {
            return CoefficientProfile::phase_arc(theta0, theta1, ramp[0], ramp[1]);
        } catch (const DomainError& e) {
            throw ParseError(section.path("ramp") + ": " + e.what());
        }
    }
    if (kind == "rational") {
        auto num = parse_number_list(section.require("num"), ' ', section.path("num"));
        auto den = parse_number_list(section.require("den"), ' ', section.path("den"));
        try {
            return CoefficientProfile::rational(std::move(num), std::move(den));
        } catch (const DomainError& e) {
            throw ParseError(section.path("den") + ": " + e.what());
        }
    }
    if (kind == "table") {
        const std::string knots = section.require("knots");
        std::vector<double> times;
        std::vector<std::complex<double>> values;
        for (const auto entry : split(knots, ';')) {
            const auto token = trim(entry);
            if (token.empty()) continue;
            const auto parts = split(token, ':');
            if (parts.size() != 2)
                throw ParseError(section.path("knots") + ": expected 't:re,im' entries");
            times.push_back(parse_number(parts[0], section.path("knots")));
            values.push_back(parse_complex(trim(parts[1]), section.path("knots")));
        }
        try {
            return CoefficientProfile::table(std::move(times), std::move(values));
        } catch (const DomainError& e) {
            throw ParseError(section.path("knots") + ": " + e.what());
        }
    }
    throw ParseError(section.path("kind") + ": unknown profile kind '" + kind + "'");
}

inline DataFunction parse_phi(Section& section) {
    const std::string kind = section.require("kind");
    try {
        if (kind == "zero") return DataFunction::zero();
        if (kind == "constant")
            return DataFunction::constant(parse_complex(section.require("value"), section.path("value")));
        if (kind == "gaussian")
            return DataFunction::gaussian(parse_number(section.require("a"), section.path("a")));
        if (kind == "sine")
            return DataFunction::sine(parse_number(section.require("k"), section.path("k")));
        if (kind == "sech") return DataFunction::sech();
        if (kind == "table") {
            const std::string knots = section.require("knots");
            std::vector<double> xs;
            std::vector<std::complex<double>> values;
            for (const auto entry : split(knots, ';')) {
                const auto token = trim(entry);
                if (token.empty()) continue;
                const auto parts = split(token, ':');
                if (parts.size() != 2)
                    throw ParseError(section.path("knots") + ": expected 'x:re,im' entries");
                xs.push_back(parse_number(parts[0], section.path("knots")));
                values.push_back(parse_complex(trim(parts[1]), section.path("knots")));
            }
            return DataFunction::table(std::move(xs), std::move(values));
        }
    } catch (const DomainError& e) {
        throw ParseError(section.name() + ": " + e.what());
    }
    throw ParseError(section.path("kind") + ": unknown data function kind '" + kind + "'");
}

inline SourceFunction parse_source(Section& section) {
    const std::string kind = section.require("kind");
    try {
        if (kind == "zero") return SourceFunction::zero();
        if (kind == "constant")
            return SourceFunction::constant(parse_complex(section.require("value"), section.path("value")));
        if (kind == "mms") {
            const std::string field = section.require("field");
            std::complex<double> scale{1.0, 0.0};
            if (auto value = section.get("value")) scale = parse_complex(*value, section.path("value"));
            return SourceFunction::mms(exact_field_from_name(field), scale);
        }
        if (kind == "table") {
            auto t_knots = parse_number_list(section.require("t_knots"), ',', section.path("t_knots"));
            auto x_knots = parse_number_list(section.require("x_knots"), ',', section.path("x_knots"));
            const std::string rows = section.require("values");
            std::vector<std::complex<double>> values;
            for (const auto row : split(rows, '|')) {
                for (const auto entry : split(trim(row), ' ')) {
                    const auto token = trim(entry);
                    if (token.empty()) continue;
                    values.push_back(parse_complex(token, section.path("values")));
                }
            }
            return SourceFunction::table(std::move(t_knots), std::move(x_knots), std::move(values));
        }
    } catch (const DomainError& e) {
        throw ParseError(section.name() + ": " + e.what());
    }
    throw ParseError(section.path("kind") + ": unknown source kind '" + kind + "'");
}

inline HoelderParams parse_hoelder(Section& section) {
    HoelderParams params;
    params.bound = parse_number(section.require("b"), section.path("b"));
    params.exponent = parse_number(section.require("alpha"), section.path("alpha"));
    if (!(params.bound >= 0.0)) throw ParseError(section.path("b") + ": must be nonnegative");
    if (!(params.exponent > 0.0 && params.exponent <= 1.0))
        throw ParseError(section.path("alpha") + ": expected 0 < alpha <= 1, got " +
                         format_number(params.exponent));
    return params;
}

inline void parse_grid_axis(std::string_view text, const std::string& key_path, double& begin,
                            double& end, std::size_t& count) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw ParseError(key_path + ": expected 'begin,end,count'");
    begin = parse_number(parts[0], key_path);
    end = parse_number(parts[1], key_path);
    count = parse_count(parts[2], key_path);
}

inline GridSpec parse_grid(Section& section) {
    GridSpec grid;
    parse_grid_axis(section.require("t"), section.path("t"), grid.t_begin, grid.t_end, grid.t_count);
    parse_grid_axis(section.require("x"), section.path("x"), grid.x_begin, grid.x_end, grid.x_count);
    try {
        grid.validate();
    } catch (const DomainError& e) {
        throw ParseError(section.name() + ": " + e.what());
    }
    return grid;
}

inline Tolerances parse_tolerances(Section& section, const Tolerances& defaults) {
    Tolerances tols = defaults;
    if (auto v = section.get("quad_tol")) tols.quad_tol = parse_number(*v, section.path("quad_tol"));
    if (auto v = section.get("rho_min")) tols.rho_min = parse_number(*v, section.path("rho_min"));
    if (auto v = section.get("tail_tol")) tols.tail_tol = parse_number(*v, section.path("tail_tol"));
    if (auto v = section.get("eps_split"))
        tols.eps_split_rel = parse_number(*v, section.path("eps_split"));
    if (auto v = section.get("p_floor")) tols.p_floor = parse_number(*v, section.path("p_floor"));
    if (auto v = section.get("omega_tol"))
        tols.omega_tol = parse_number(*v, section.path("omega_tol"));
    try {
        tols.validate();
    } catch (const DomainError& e) {
        throw ParseError(section.name() + ": " + e.what());
    }
    return tols;
}

}  // namespace detail

/// Parses the flat key-tree problem-spec format. Unknown sections and keys
/// are rejected with their key path.
inline SpecDocument parse_spec(const std::string& text) {
    static const std::set<std::string> known_sections = {"coefficient", "phi",  "source",
                                                         "hoelder",     "grid", "tolerances"};
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string current;
    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(line_no) + ": malformed section header");
            const std::string name(detail::trim(line.substr(1, line.size() - 2)));
            if (known_sections.count(name) == 0)
                throw ParseError("line " + std::to_string(line_no) + ": unknown section [" + name + "]");
            if (sections.count(name) != 0)
                throw ParseError("line " + std::to_string(line_no) + ": duplicate section [" + name + "]");
            sections[name] = {};
            current = name;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
        if (current.empty())
            throw ParseError("line " + std::to_string(line_no) + ": key outside any section");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
        if (!sections[current].emplace(key, value).second)
            throw ParseError(current + "." + key + ": duplicate key");
    }

    for (const char* required : {"coefficient", "phi", "source", "grid"}) {
        if (sections.count(required) == 0)
            throw ParseError(std::string("missing required section [") + required + "]");
    }

    SpecDocument doc;
    {
        detail::Section s("coefficient", sections.at("coefficient"));
        doc.problem.coefficient = detail::parse_coefficient(s);
        s.finish();
    }
    {
        detail::Section s("phi", sections.at("phi"));
        doc.problem.phi = detail::parse_phi(s);
        s.finish();
    }
    {
        detail::Section s("source", sections.at("source"));
        doc.problem.source = detail::parse_source(s);
        s.finish();
    }
    if (sections.count("hoelder") != 0) {
        detail::Section s("hoelder", sections.at("hoelder"));
        doc.problem.hoelder = detail::parse_hoelder(s);
        doc.has_hoelder = true;
        s.finish();
    }
    {
        detail::Section s("grid", sections.at("grid"));
        doc.grid = detail::parse_grid(s);
        s.finish();
    }
    if (sections.count("tolerances") != 0) {
        detail::Section s("tolerances", sections.at("tolerances"));
        doc.problem.tolerances = detail::parse_tolerances(s, Tolerances{});
        doc.has_tolerances = true;
        s.finish();
    }
    return doc;
}

inline SpecDocument parse_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open spec file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec(buffer.str());
}

// ---------------------------------------------------------------------------
// canonical serialization

namespace detail {

inline void serialize_coefficient(std::ostringstream& out, const CoefficientProfile& profile) {
    out << "[coefficient]\n";
    switch (profile.kind()) {
        case ProfileKind::constant:
            out << "kind = constant\n";
            out << "value = " << format_complex(profile.as<ConstantCoefficient>().value) << "\n";
            break;
        case ProfileKind::phase_arc: {
            const auto& arc = profile.as<PhaseArcCoefficient>();
            out << "kind = phase_arc\n";
            out << "theta0 = " << format_number(arc.theta_begin) << "\n";
            out << "theta1 = " << format_number(arc.theta_end) << "\n";
            out << "ramp = " << format_number(arc.ramp_begin) << "," << format_number(arc.ramp_end)
                << "\n";
            break;
        }
        case ProfileKind::rational: {
            const auto& rational = profile.as<RationalCoefficient>();
            out << "kind = rational\n";
            out << "num =";
            for (double c : rational.numerator) out << " " << format_number(c);
            out << "\n";
            out << "den =";
            for (double c : rational.denominator) out << " " << format_number(c);
            out << "\n";
            break;
        }
        case ProfileKind::table: {
            const auto& table = profile.as<TableCoefficient>();
            out << "kind = table\n";
            out << "knots = ";
            for (std::size_t i = 0; i < table.times.size(); ++i) {
                if (i) out << "; ";
                out << format_number(table.times[i]) << ":" << format_complex(table.values[i]);
            }
            out << "\n";
            break;
        }
    }
}

inline void serialize_phi(std::ostringstream& out, const DataFunction& phi) {
    out << "[phi]\n";
    switch (phi.kind()) {
        case DataFunction::Kind::zero: out << "kind = zero\n"; break;
        case DataFunction::Kind::constant:
            out << "kind = constant\n";
            out << "value = " << format_complex(phi.constant_value()) << "\n";
            break;
        case DataFunction::Kind::gaussian:
            out << "kind = gaussian\n";
            out << "a = " << format_number(phi.parameter()) << "\n";
            break;
        case DataFunction::Kind::sine:
            out << "kind = sine\n";
            out << "k = " << format_number(phi.parameter()) << "\n";
            break;
        case DataFunction::Kind::sech: out << "kind = sech\n"; break;
        case DataFunction::Kind::table: {
            out << "kind = table\n";
            out << "knots = ";
            for (std::size_t i = 0; i < phi.knots().size(); ++i) {
                if (i) out << "; ";
                out << format_number(phi.knots()[i]) << ":" << format_complex(phi.knot_values()[i]);
            }
            out << "\n";
            break;
        }
    }
}

inline void serialize_source(std::ostringstream& out, const SourceFunction& source) {
    out << "[source]\n";
    switch (source.kind()) {
        case SourceFunction::Kind::zero: out << "kind = zero\n"; break;
        case SourceFunction::Kind::constant:
            out << "kind = constant\n";
            out << "value = " << format_complex(source.constant_value()) << "\n";
            break;
        case SourceFunction::Kind::mms:
            out << "kind = mms\n";
            out << "field = " << exact_field_name(source.field()) << "\n";
            out << "value = " << format_complex(source.constant_value()) << "\n";
            break;
        case SourceFunction::Kind::table: {
            out << "kind = table\n";
            out << "t_knots = ";
            for (std::size_t i = 0; i < source.t_knots().size(); ++i) {
                if (i) out << ",";
                out << format_number(source.t_knots()[i]);
            }
            out << "\n";
            out << "x_knots = ";
            for (std::size_t i = 0; i < source.x_knots().size(); ++i) {
                if (i) out << ",";
                out << format_number(source.x_knots()[i]);
            }
            out << "\n";
            out << "values = ";
            const std::size_t nx = source.x_knots().size();
            for (std::size_t i = 0; i < source.t_knots().size(); ++i) {
                if (i) out << " | ";
                for (std::size_t j = 0; j < nx; ++j) {
                    if (j) out << " ";
                    out << format_complex(source.knot_values()[i * nx + j]);
                }
            }
            out << "\n";
            break;
        }
    }
}

}  // namespace detail

inline std::string serialize_spec(const SpecDocument& doc) {
    std::ostringstream out;
    detail::serialize_coefficient(out, doc.problem.coefficient);
    out << "\n";
    detail::serialize_phi(out, doc.problem.phi);
    out << "\n";
    detail::serialize_source(out, doc.problem.source);
    out << "\n";
    if (doc.has_hoelder && doc.problem.hoelder) {
        out << "[hoelder]\n";
        out << "b = " << format_number(doc.problem.hoelder->bound) << "\n";
        out << "alpha = " << format_number(doc.problem.hoelder->exponent) << "\n";
        out << "\n";
    }
    out << "[grid]\n";
    out << "t = " << format_number(doc.grid.t_begin) << "," << format_number(doc.grid.t_end) << ","
        << doc.grid.t_count << "\n";
    out << "x = " << format_number(doc.grid.x_begin) << "," << format_number(doc.grid.x_end) << ","
        << doc.grid.x_count << "\n";
    if (doc.has_tolerances) {
        const Tolerances& tols = doc.problem.tolerances;
        out << "\n[tolerances]\n";
        out << "quad_tol = " << format_number(tols.quad_tol) << "\n";
        out << "rho_min = " << format_number(tols.rho_min) << "\n";
        out << "tail_tol = " << format_number(tols.tail_tol) << "\n";
        out << "eps_split = " << format_number(tols.eps_split_rel) << "\n";
        out << "p_floor = " << format_number(tols.p_floor) << "\n";
        out << "omega_tol = " << format_number(tols.omega_tol) << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// report and field writers

inline std::string field_to_csv(const SolutionField& field) {
    std::ostringstream out;
    out << "t,x,re_u,im_u,abs_u\n";
    for (std::size_t i = 0; i < field.nt(); ++i) {
        for (std::size_t j = 0; j < field.nx(); ++j) {
            const std::complex<double> u = field.at(i, j);
            out << format_g17(field.t(i)) << "," << format_g17(field.x(j)) << ","
                << format_g17(u.real()) << "," << format_g17(u.imag()) << ","
                << format_g17(std::abs(u)) << "\n";
        }
    }
    return out.str();
}

inline nlohmann::ordered_json field_to_json(const SolutionField& field) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < field.nt(); ++i) {
        for (std::size_t j = 0; j < field.nx(); ++j) {
            const std::complex<double> u = field.at(i, j);
            records.push_back({{"t", field.t(i)},
                               {"x", field.x(j)},
                               {"re_u", u.real()},
                               {"im_u", u.imag()},
                               {"abs_u", std::abs(u)}});
        }
    }
    nlohmann::ordered_json doc;
    doc["method"] = field.provenance().method;
    doc["duhamel_form"] = std::string(to_string(field.provenance().duhamel_form));
    doc["records"] = std::move(records);
    return doc;
}

inline std::string segments_to_string(const std::vector<PositiveSegment>& segments) {
    std::ostringstream out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) out << ";";
        out << format_g17(segments[i].begin) << ":" << format_g17(segments[i].end);
    }
    return out.str();
}

inline std::string conditions_to_csv(const ConditionReport& report) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "continuous_ok," << (report.continuous_ok ? "true" : "false") << "\n";
    out << "nonvanishing_ok," << (report.nonvanishing_ok ? "true" : "false") << "\n";
    out << "worst_abs_p," << format_g17(report.worst_abs_p) << "\n";
    out << "worst_abs_p_t," << format_g17(report.worst_abs_p_t) << "\n";
    out << "repart_ok," << (report.repart_ok ? "true" : "false") << "\n";
    out << "min_re_p," << format_g17(report.min_re_p) << "\n";
    out << "re_p_at_zero," << format_g17(report.re_p_at_zero) << "\n";
    out << "p0_estimate," << format_g17(report.p0_estimate) << "\n";
    out << "p0_running_inf," << format_g17(report.p0_running_inf) << "\n";
    out << "positive_segments," << segments_to_string(report.positive_segments) << "\n";
    out << "t_max," << format_g17(report.t_max) << "\n";
    out << "samples_used," << report.samples_used << "\n";
    out << "method," << (report.sampling_based ? "sampling" : "exact") << "\n";
    out << "passes," << (report.passes() ? "true" : "false") << "\n";
    return out.str();
}

inline nlohmann::ordered_json conditions_to_json(const ConditionReport& report) {
    nlohmann::ordered_json doc;
    doc["continuous_ok"] = report.continuous_ok;
    doc["nonvanishing_ok"] = report.nonvanishing_ok;
    doc["worst_abs_p"] = report.worst_abs_p;
    doc["worst_abs_p_t"] = report.worst_abs_p_t;
    doc["repart_ok"] = report.repart_ok;
    doc["min_re_p"] = report.min_re_p;
    doc["re_p_at_zero"] = report.re_p_at_zero;
    doc["p0_estimate"] = report.p0_estimate;
    doc["p0_running_inf"] = report.p0_running_inf;
    nlohmann::ordered_json segments = nlohmann::ordered_json::array();
    for (const auto& segment : report.positive_segments)
        segments.push_back({{"begin", segment.begin}, {"end", segment.end}});
    doc["positive_segments"] = std::move(segments);
    doc["t_max"] = report.t_max;
    doc["samples_used"] = report.samples_used;
    doc["method"] = report.sampling_based ? "sampling" : "exact";
    doc["passes"] = report.passes();
    return doc;
}

inline std::string lemmas_to_csv(const LemmaReport& report) {
    std::ostringstream out;
    out << "kind,t,tau,re_h,im_h,abs_h,arg_h,delta_margin,lhs,mid,rhs,mid_minus_rhs,"
           "identity_error,segment_positivity_ok,endpoint_positivity_ok,valid,note\n";
    for (const auto& row : report.pair_rows) {
        out << "pair," << format_g17(row.t) << "," << format_g17(row.tau) << ","
            << format_g17(row.mean_value.real()) << "," << format_g17(row.mean_value.imag()) << ","
            << format_g17(row.abs_h) << "," << format_g17(row.arg_h) << ","
            << format_g17(row.delta_margin) << "," << format_g17(row.lhs) << ","
            << format_g17(row.mid) << "," << format_g17(row.rhs) << ","
            << format_g17(row.mid_minus_rhs) << "," << format_g17(row.identity_error) << ","
            << (row.segment_positivity_ok ? "true" : "false") << ","
            << (row.endpoint_positivity_ok ? "true" : "false") << "," << (row.valid ? "true" : "false")
            << "," << row.note << "\n";
    }
    for (const auto& row : report.origin_rows) {
        out << "origin," << format_g17(row.t) << ",0," << format_g17(row.mean_value.real()) << ","
            << format_g17(row.mean_value.imag()) << "," << format_g17(row.abs_h) << ","
            << format_g17(row.arg_h) << "," << format_g17(row.delta_margin) << ","
            << format_g17(row.lhs) << ",," << format_g17(row.rhs) << ",,,,,true,\n";
    }
    return out.str();
}

inline nlohmann::ordered_json lemmas_to_json(const LemmaReport& report) {
    nlohmann::ordered_json doc;
    doc["quad_tolerance"] = report.quad_tolerance;
    doc["identities_ok"] = report.identities_ok;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& row : report.pair_rows) {
        pairs.push_back({{"t", row.t},
                         {"tau", row.tau},
                         {"re_h", row.mean_value.real()},
                         {"im_h", row.mean_value.imag()},
                         {"abs_h", row.abs_h},
                         {"arg_h", row.arg_h},
                         {"delta_margin", row.delta_margin},
                         {"lhs", row.lhs},
                         {"mid", row.mid},
                         {"rhs", row.rhs},
                         {"mid_minus_rhs", row.mid_minus_rhs},
                         {"identity_error", row.identity_error},
                         {"segment_positivity_ok", row.segment_positivity_ok},
                         {"endpoint_positivity_ok", row.endpoint_positivity_ok},
                         {"valid", row.valid},
                         {"note", row.note}});
    }
    doc["pair_rows"] = std::move(pairs);
    nlohmann::ordered_json origins = nlohmann::ordered_json::array();
    for (const auto& row : report.origin_rows) {
        origins.push_back({{"t", row.t},
                           {"re_h", row.mean_value.real()},
                           {"im_h", row.mean_value.imag()},
                           {"abs_h", row.abs_h},
                           {"arg_h", row.arg_h},
                           {"delta_margin", row.delta_margin},
                           {"lhs", row.lhs},
                           {"rhs", row.rhs}});
    }
    doc["origin_rows"] = std::move(origins);
    return doc;
}

inline std::string residual_to_csv(const ResidualReport& report, double threshold, bool pass) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "sup_norm," << format_g17(report.sup_norm) << "\n";
    out << "l2_norm," << format_g17(report.l2_norm) << "\n";
    out << "dt," << format_g17(report.dt) << "\n";
    out << "dx," << format_g17(report.dx) << "\n";
    out << "derivative_scale," << format_g17(report.derivative_scale) << "\n";
    out << "worst_t," << format_g17(report.worst.t) << "\n";
    out << "worst_x," << format_g17(report.worst.x) << "\n";
    out << "threshold," << format_g17(threshold) << "\n";
    out << "pass," << (pass ? "true" : "false") << "\n";
    return out.str();
}

inline nlohmann::ordered_json residual_to_json(const ResidualReport& report, double threshold,
                                               bool pass) {
    nlohmann::ordered_json doc;
    doc["sup_norm"] = report.sup_norm;
    doc["l2_norm"] = report.l2_norm;
    doc["dt"] = report.dt;
    doc["dx"] = report.dx;
    doc["derivative_scale"] = report.derivative_scale;
    doc["worst"] = {{"t", report.worst.t}, {"x", report.worst.x}, {"abs", report.worst.abs_residual}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.per_row_worst)
        rows.push_back({{"t", row.t}, {"x", row.x}, {"abs", row.abs_residual}});
    doc["per_row_worst"] = std::move(rows);
    doc["threshold"] = threshold;
    doc["pass"] = pass;
    return doc;
}

inline std::string initial_trace_to_csv(const InitialTraceReport& report) {
    std::ostringstream out;
    out << "t,sup_error\n";
    for (const auto& row : report.rows)
        out << format_g17(row.t) << "," << format_g17(row.sup_error) << "\n";
    return out.str();
}

inline nlohmann::ordered_json initial_trace_to_json(const InitialTraceReport& report) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) rows.push_back({{"t", row.t}, {"sup_error", row.sup_error}});
    doc["rows"] = std::move(rows);
    doc["decreasing"] = report.decreasing;
    doc["final_over_first"] = report.final_over_first;
    return doc;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path.string() + "'");
    out << content;
}

}  // namespace degenheat::io
