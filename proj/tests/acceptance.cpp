// Runs every acceptance criterion as its built-in suite and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "sectorcalc/scenarios.hpp"

using namespace sectorcalc;

namespace {

constexpr double kTimeLimitSeconds = 30.0;

struct Criterion {
    int number;
    std::string suite;
    std::string title;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "resolvent", "resolvent formula"},
        {2, "generator", "generator recovery"},
        {3, "duality", "Fourier-Borel / Cauchy duality"},
        {4, "convolution", "convolution homomorphism"},
        {5, "wn", "W_n evaluation route"},
        {6, "calculus", "main calculus, k=1 and k=2"},
        {7, "special", "exponential and projection special cases"},
        {8, "spectral", "spectral mapping"},
        {9, "hardy", "Hardy machinery"},
        {10, "gaps", "semigroup gap scenarios"},
        {11, "outer", "strongly outer witnesses"},
    };
    RunContext ctx;
    std::vector<Report> first;
    int failed = 0;

    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Report r;
        std::string error;
        try {
            r = run_builtin(c.suite, ctx);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool timely = secs <= kTimeLimitSeconds;
        const bool ok = error.empty() && !r.rows.empty() && r.all_passed() && timely;
        if (!ok) ++failed;
        char line[256];
        std::snprintf(line, sizeof line, "%s %2d %-42s rows=%zu time=%.2fs", ok ? "PASS" : "FAIL", c.number,
                      c.title.c_str(), r.rows.size(), secs);
        std::cout << line << '\n';
        if (!error.empty()) std::cout << "     error: " << error << '\n';
        if (!timely) std::cout << "     exceeded the " << kTimeLimitSeconds << " s limit\n";
        for (const ReportRow* row : r.failures())
            std::cout << "     failed: " << row->check << " | " << row->parameters << " | abs " << format_double(row->abs_error)
                      << " rel " << format_double(row->rel_error) << " tol " << format_double(row->tolerance)
                      << (row->note.empty() ? "" : " | " + row->note) << '\n';
        first.push_back(std::move(r));
    }

    // determinism: a second full pass must serialize identically
    const auto t0 = std::chrono::steady_clock::now();
    bool identical = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Report again;
        try {
            again = run_builtin(criteria[i].suite, ctx);
        } catch (const std::exception&) {
            identical = false;
            continue;
        }
        if (again.to_csv() != first[i].to_csv() || again.to_json() != first[i].to_json()) {
            identical = false;
            std::cout << "     differs: " << criteria[i].suite << '\n';
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!identical) ++failed;
    char line[256];
    std::snprintf(line, sizeof line, "%s %2d %-42s rows=%s time=%.2fs", identical ? "PASS" : "FAIL", 12,
                  "determinism (byte-identical reports)", "all", secs);
    std::cout << line << '\n';

    std::cout << (failed == 0 ? "all 12 criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
