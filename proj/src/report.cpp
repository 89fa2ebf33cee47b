#include "sectorcalc/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace sectorcalc {

const char* to_string(CheckKind k) {
    switch (k) {
        case CheckKind::Relative: return "relative";
        case CheckKind::Absolute: return "absolute";
        case CheckKind::AtMost: return "at_most";
        case CheckKind::AtLeast: return "at_least";
    }
    return "?";
}

std::vector<Complex> flatten(const Matrix& m) {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

void finalize(ReportRow& row) {
    double diff = 0.0, norm = 0.0;
    const std::size_t n = std::max(row.computed.size(), row.oracle.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Complex c = i < row.computed.size() ? row.computed[i] : Complex(0.0);
        const Complex o = i < row.oracle.size() ? row.oracle[i] : Complex(0.0);
        diff += std::norm(c - o);
        norm += std::norm(o);
    }
    row.abs_error = std::sqrt(diff);
    row.rel_error = row.abs_error / std::max(std::sqrt(norm), 1e-300);
    const bool finite = std::isfinite(row.abs_error);
    switch (row.kind) {
        case CheckKind::Relative: row.passed = finite && row.rel_error <= row.tolerance; break;
        case CheckKind::Absolute: row.passed = finite && row.abs_error <= row.tolerance; break;
        case CheckKind::AtMost:
        case CheckKind::AtLeast: {
            bool ok = finite && row.computed.size() == row.oracle.size();
            for (std::size_t i = 0; ok && i < row.computed.size(); ++i) {
                const double c = row.computed[i].real(), o = row.oracle[i].real();
                ok = row.kind == CheckKind::AtMost ? c <= o + row.tolerance : c >= o - row.tolerance;
            }
            row.passed = ok;
            break;
        }
    }
}

ReportRow make_row(std::string scenario, std::string check, std::string parameters, std::vector<Complex> computed,
                   std::vector<Complex> oracle, CheckKind kind, double tolerance, double error_estimate) {
    ReportRow row;
    row.scenario = std::move(scenario);
    row.check = std::move(check);
    row.parameters = std::move(parameters);
    row.computed = std::move(computed);
    row.oracle = std::move(oracle);
    row.kind = kind;
    row.tolerance = tolerance;
    row.error_estimate = error_estimate;
    finalize(row);
    return row;
}

bool Report::all_passed() const {
    for (const auto& r : rows)
        if (!r.passed) return false;
    return true;
}

std::vector<const ReportRow*> Report::failures() const {
    std::vector<const ReportRow*> out;
    for (const auto& r : rows)
        if (!r.passed) out.push_back(&r);
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_complex(const Complex& z) {
    std::string im = format_double(z.imag());
    if (im.front() != '-') im = "+" + im;
    return format_double(z.real()) + im + "j";
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join_complex(const std::vector<Complex>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += format_complex(v[i]);
    }
    return out;
}

nlohmann::ordered_json complex_array(const std::vector<Complex>& v) {
    auto a = nlohmann::ordered_json::array();
    for (const Complex& z : v) a.push_back({z.real(), z.imag()});
    return a;
}

nlohmann::ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

std::string Report::to_csv(bool with_timing) const {
    std::ostringstream out;
    out << "scenario,check,parameters,kind,computed,oracle,abs_error,rel_error,error_estimate,tolerance,order,passed,note";
    if (with_timing) out << ",wall_time";
    out << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.scenario) << ',' << csv_field(r.check) << ',' << csv_field(r.parameters) << ','
            << to_string(r.kind) << ',' << csv_field(join_complex(r.computed)) << ','
            << csv_field(join_complex(r.oracle)) << ',' << format_double(r.abs_error) << ','
            << format_double(r.rel_error) << ',' << format_double(r.error_estimate) << ','
            << format_double(r.tolerance) << ',' << (r.observed_order ? format_double(*r.observed_order) : "") << ','
            << (r.passed ? "true" : "false") << ',' << csv_field(r.note);
        if (with_timing) out << ',' << format_double(r.wall_time);
        out << '\n';
    }
    return out.str();
}

std::string Report::to_json(bool with_timing) const {
    nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["scenario"] = r.scenario;
        j["check"] = r.check;
        j["parameters"] = r.parameters;
        j["kind"] = to_string(r.kind);
        j["computed"] = complex_array(r.computed);
        j["oracle"] = complex_array(r.oracle);
        j["abs_error"] = number(r.abs_error);
        j["rel_error"] = number(r.rel_error);
        j["error_estimate"] = number(r.error_estimate);
        j["tolerance"] = number(r.tolerance);
        j["order"] = r.observed_order ? number(*r.observed_order) : nlohmann::ordered_json(nullptr);
        j["passed"] = r.passed;
        j["note"] = r.note;
        if (with_timing) j["wall_time"] = r.wall_time;
        rows_json.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["all_passed"] = all_passed();
    doc["rows"] = std::move(rows_json);
    return doc.dump(2) + "\n";
}

}  // namespace sectorcalc
