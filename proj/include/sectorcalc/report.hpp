#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sectorcalc/types.hpp"

namespace sectorcalc {

/// How a row decides pass/fail.
enum class CheckKind {
    Relative,  // rel_error <= tolerance
    Absolute,  // abs_error <= tolerance
    AtMost,    // computed <= oracle + tolerance (real parts)
    AtLeast,   // computed >= oracle - tolerance (real parts)
};

const char* to_string(CheckKind k);

struct ReportRow {
    std::string scenario;
    std::string check;
    std::string parameters;
    std::vector<Complex> computed;
    std::vector<Complex> oracle;
    CheckKind kind = CheckKind::Relative;
    double abs_error = 0.0;
    /// |computed - oracle| / max(|oracle|, 1e-300), Euclidean norms of the flattened values.
    double rel_error = 0.0;
    double error_estimate = 0.0;
    double tolerance = 0.0;
    /// log2(err_m / err_{m+1}) in convergence studies.
    std::optional<double> observed_order;
    double wall_time = 0.0;
    bool passed = false;
    std::string note;
};

std::vector<Complex> flatten(const Matrix& m);

/// Fills abs_error, rel_error and passed from computed, oracle, kind and tolerance.
void finalize(ReportRow& row);

ReportRow make_row(std::string scenario, std::string check, std::string parameters, std::vector<Complex> computed,
                   std::vector<Complex> oracle, CheckKind kind, double tolerance, double error_estimate = 0.0);

struct Report {
    std::vector<ReportRow> rows;

    bool all_passed() const;
    std::vector<const ReportRow*> failures() const;

    /// Columns: scenario, check, parameters, kind, computed, oracle, abs_error, rel_error, error_estimate,
    /// tolerance, order, passed, note[, wall_time].  Complex values are written as "re+imj", joined by ';'.
    std::string to_csv(bool with_timing = false) const;
    /// Complex values as [re, im] pairs.
    std::string to_json(bool with_timing = false) const;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);
/// "re+imj" / "re-imj".
std::string format_complex(const Complex& z);

}  // namespace sectorcalc
