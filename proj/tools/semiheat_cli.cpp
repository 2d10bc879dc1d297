#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "semiheat/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

void print_summary(const semiheat::RunReport& report) {
    for (const auto& s : report.scenarios) {
        std::cout << s.name << " p=" << s.p << " eps=" << s.eps << ": " << (s.ok ? "ok" : "FAILED (" + s.error + ")")
                  << '\n';
        for (const auto& c : s.checks) {
            std::cout << "  " << c.checker << ": " << (c.pass() ? "pass" : "fail");
            if (c.report) std::cout << " c_fit=" << c.report->c_fit << " cap=" << c.report->c_cap;
            if (!c.error.empty()) std::cout << " error: " << c.error;
            std::cout << '\n';
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiheat: semilinear heat equation experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> out_dir;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool verbose = false;
    app.add_option("--out-dir", out_dir, "Output directory (overrides config and SEMIHEAT_OUT_DIR)");
    app.add_option("--jobs", jobs, "Worker count")->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "Log each run to stderr");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run every scenario and checker in a config");
    run->add_option("config", config_path, "Config JSON")->required();

    std::string check_path;
    auto* check = app.add_subcommand("check", "Validate a config without running it");
    check->add_option("config", check_path, "Config JSON")->required();

    std::string report_path, checker_id;
    auto* plot = app.add_subcommand("plotdata", "Write the tidy CSV for one checker from a saved report");
    plot->add_option("report", report_path, "Report JSON")->required();
    plot->add_option("checker", checker_id, "Checker id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    try {
        if (*check) {
            const auto cfg = semiheat::load_config(check_path);
            std::cout << "config ok: " << cfg.scenarios.size() << " scenarios, " << cfg.p_values.size()
                      << " exponents, " << cfg.checkers.size() << " checkers, hash " << cfg.hash << '\n';
            return kExitPass;
        }
        if (*run) {
            const auto cfg = semiheat::load_config(config_path);
            semiheat::RunOptions opts;
            opts.out_dir = semiheat::resolve_out_dir(out_dir, cfg);
            opts.jobs = jobs;
            opts.verbose = verbose;
            const auto report = semiheat::run_experiment(cfg, opts);
            print_summary(report);
            std::cout << "report written to " << opts.out_dir.string() << '\n';
            return report.all_pass() ? kExitPass : kExitCheckFailed;
        }
        if (*plot) {
            std::ifstream in(report_path);
            if (!in) throw std::runtime_error("cannot open report '" + report_path + "'");
            const auto report = semiheat::run_report_from_json(nlohmann::json::parse(in));
            const std::filesystem::path dir =
                out_dir ? std::filesystem::path(*out_dir) : std::filesystem::path(report_path).parent_path();
            std::cout << semiheat::emit_plot_data(report, checker_id, dir.empty() ? "." : dir).string() << '\n';
            return kExitPass;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
