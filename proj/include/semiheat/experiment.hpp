#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semiheat/estimates.hpp"
#include "semiheat/evolve.hpp"
#include "semiheat/geometry.hpp"

namespace semiheat {

/// Config validation failure; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::sphere_zonal;
    int n = 2;
    double size = 1.0;
    std::size_t nodes = 128;
};

enum class InitialRecipe { constant, trivial_plus_mode, talenti, custom, random_positive };

struct InitialData {
    InitialRecipe recipe = InitialRecipe::constant;
    double value = 1.0;            // constant c, or base level for random_positive
    double amplitude = 0.1;        // random_positive
    double t_blow = 0.0;           // trivial_plus_mode
    double t_start = -10.0;
    std::vector<double> eps{0.0};  // sweep axis
    std::size_t mode = 1;
    std::string file;              // custom
};

struct Scenario {
    std::string name;
    InitialData initial;
    double t0 = 0.0;
    double t1 = 1.0;
    EvolveControls controls;
};

enum class CheckerKind { positivity, gradient, decay, universal, lower_bound, triviality };

std::string_view to_string(CheckerKind kind);

struct CheckerSpec {
    CheckerKind kind = CheckerKind::positivity;
    double cap = std::numeric_limits<double>::infinity();
    GradientVariant variant = GradientVariant::global;
    EstimateParams params;
    bool d_from_data = true;           // gradient: D = max u over the window when not given
    std::optional<double> t_blow;      // decay
    std::optional<double> window_t0;   // universal
    std::optional<double> window_t1;
    double grad_tol = 1e-6;
    double rate_tol = 0.2;
    double interval = 1.0;
    /// Optional sub-window applied to the trajectory before checking.
    std::optional<double> from_time;
    std::optional<double> to_time;
};

struct ExperimentConfig {
    ManifoldSpec manifold;
    std::vector<double> p_values;
    std::vector<Scenario> scenarios;
    std::vector<CheckerSpec> checkers;
    std::optional<std::string> output_dir;
    std::uint64_t seed = 0;
    bool export_trajectories = false;
    std::string canonical_text;  ///< key-sorted compact serialization
    std::string hash;            ///< SHA-256 of canonical_text, hex
};

/// Parses and validates a JSON config. Throws ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string canonicalize(const nlohmann::json& doc);
std::string sha256_hex(const std::string& text);

struct TrajectorySummary {
    std::size_t snapshots = 0;
    std::size_t steps = 0;
    double t_final = 0.0;
    double max_u = 0.0;
    double min_u = 0.0;
    std::optional<double> blowup_time;       ///< threshold crossing
    std::optional<double> blowup_estimate;   ///< extrapolated
};

struct CheckerResult {
    std::string checker;
    std::optional<EstimateReport> report;
    std::string error;  ///< set when the checker could not run
    bool pass() const { return report && report->pass && error.empty(); }
};

struct ScenarioResult {
    std::string name;
    double p = 2.0;
    double eps = 0.0;
    bool ok = true;
    std::string error;
    TrajectorySummary summary;
    std::vector<CheckerResult> checks;
    double wall_seconds = 0.0;
};

struct RegimeEntry {
    int n;
    double p;
    ExponentRegime regime;
};

struct RunReport {
    std::string config_hash;
    std::vector<ScenarioResult> scenarios;
    std::vector<RegimeEntry> regimes;
    double wall_seconds = 0.0;

    bool all_pass() const;
};

struct RunOptions {
    std::filesystem::path out_dir;
    unsigned jobs = 1;
    bool verbose = false;
    bool write_files = true;
};

/// Runs every (scenario, p, eps) combination in parallel and applies every
/// checker. Solver aborts mark only the affected run as failed.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Output directory precedence: explicit flag, config field, SEMIHEAT_OUT_DIR, "semiheat_out".
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const ExperimentConfig& config);

/// Timing fields are written under "timing" so that the rest of the report is
/// reproducible for a given config.
nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EstimateReport& report);
EstimateReport estimate_report_from_json(const nlohmann::json& doc);

/// Tidy CSV, one row per snapshot per run: scenario,p,eps,snapshot,t,lhs,rhs,ratio.
/// Throws std::invalid_argument for an unknown checker id, or one absent from a non-empty report.
std::filesystem::path emit_plot_data(const RunReport& report, const std::string& checker_id,
                                     const std::filesystem::path& out_dir);

/// Trajectory export: CSV (t,node_index,u) and a JSON sidecar with the step log.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& csv_path,
                      const std::filesystem::path& sidecar_path, const std::string& config_hash);

}  // namespace semiheat
