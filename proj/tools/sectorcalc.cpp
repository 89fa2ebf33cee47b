// Batch runner for the built-in verification suites and user scenario files.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sectorcalc/scenarios.hpp"

using namespace sectorcalc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

struct Options {
    std::string scenario;
    std::string out;
    std::string format = "csv";
    double tol_override = 0.0;
    int threads = 0;
    std::uint64_t seed = 42;
    bool timing = false;
};

int thread_count(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("SECTORCALC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

int execute(const Options& opt, bool study) {
    std::vector<Scenario> scenarios;
    try {
        scenarios = resolve_scenarios(opt.scenario);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    RunContext ctx;
    ctx.tol_override = opt.tol_override;
    ctx.threads = thread_count(opt.threads);
    ctx.seed = opt.seed;

    Report all;
    try {
        for (const Scenario& sc : scenarios) {
            Report r = study ? convergence_study(sc, ctx) : run_scenario(sc, ctx);
            all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
        }
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    const std::string text = opt.format == "json" ? all.to_json(opt.timing) : all.to_csv(opt.timing);
    if (opt.out.empty() || opt.out == "-") {
        std::cout << text;
    } else {
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << opt.out << "'\n";
            return kExitInput;
        }
        out << text;
    }

    const auto failures = all.failures();
    if (failures.empty()) return kExitOk;
    std::cerr << failures.size() << " of " << all.rows.size() << " checks failed:\n";
    for (const ReportRow* r : failures) {
        std::cerr << "  " << r->scenario << " | " << r->check << " | " << r->parameters << " | abs " << format_double(r->abs_error)
                  << " rel " << format_double(r->rel_error) << " tol " << format_double(r->tolerance);
        if (!r->note.empty()) std::cerr << " | " << r->note;
        std::cerr << '\n';
    }
    return kExitFailed;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--scenario", opt.scenario, "built-in suite name or scenario JSON file")->required();
    cmd->add_option("--out", opt.out, "report path (default: stdout)");
    cmd->add_option("--format", opt.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol-override", opt.tol_override, "replace relative/absolute tolerances")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", opt.threads, "worker threads (fallback: SECTORCALC_THREADS, then 1)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", opt.seed, "seed for random test banks");
    cmd->add_flag("--timing", opt.timing, "add a wall_time column (reports are then not reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sectorcalc: functional calculus verification runner"};
    app.require_subcommand(1);
    Options opt;

    auto* run = app.add_subcommand("run", "run scenarios and check their tolerances");
    add_common(run, opt);
    auto* study = app.add_subcommand("study", "convergence study over the scenario's sweep");
    add_common(study, opt);
    auto* list = app.add_subcommand("list", "list built-in suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (list->parsed()) {
        for (const auto& s : builtin_suites()) {
            std::cout << s.name;
            if (s.criterion > 0) std::cout << " [criterion " << s.criterion << "]";
            if (!s.sweep_param.empty()) std::cout << " [sweeps " << s.sweep_param << "]";
            std::cout << "  " << s.description << '\n';
        }
        return kExitOk;
    }
    return execute(opt, study->parsed());
}
