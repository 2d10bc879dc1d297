#include "semiheat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "semiheat/errors.hpp"
#include "semiheat/reaction_ode.hpp"

namespace semiheat {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config parsing helpers
// ---------------------------------------------------------------------------

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    return doc;
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "required field is missing");
    if (!it->is_number()) throw ConfigError(join(path, key), "expected a number");
    return it->get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ConfigError(join(path, key), "expected a number");
    return it->get<double>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "required field is missing");
    if (!it->is_string()) throw ConfigError(join(path, key), "expected a string");
    return it->get<std::string>();
}

std::vector<double> number_list(const json& value, const std::string& path) {
    std::vector<double> out;
    if (value.is_number()) {
        out.push_back(value.get<double>());
    } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (!value[i].is_number()) throw ConfigError(index_path(path, i), "expected a number");
            out.push_back(value[i].get<double>());
        }
    } else {
        throw ConfigError(path, "expected a number or an array of numbers");
    }
    return out;
}

std::size_t count_at(const json& obj, const std::string& key, const std::string& path, std::size_t fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer() || it->get<long long>() < 0)
        throw ConfigError(join(path, key), "expected a nonnegative integer");
    return it->get<std::size_t>();
}

InitialRecipe parse_recipe(const std::string& name, const std::string& path) {
    if (name == "constant") return InitialRecipe::constant;
    if (name == "trivial_plus_mode") return InitialRecipe::trivial_plus_mode;
    if (name == "talenti") return InitialRecipe::talenti;
    if (name == "custom") return InitialRecipe::custom;
    if (name == "random_positive") return InitialRecipe::random_positive;
    throw ConfigError(path, "unknown initial-data recipe '" + name + "'");
}

CheckerKind parse_checker_kind(const std::string& name, const std::string& path) {
    for (auto k : {CheckerKind::positivity, CheckerKind::gradient, CheckerKind::decay, CheckerKind::universal,
                   CheckerKind::lower_bound, CheckerKind::triviality})
        if (to_string(k) == name) return k;
    throw ConfigError(path, "unknown checker id '" + name + "'");
}

EvolveControls parse_controls(const json& obj, const std::string& path) {
    EvolveControls c;
    if (obj.is_null()) return c;
    require_object(obj, path);
    if (auto v = optional_number(obj, "dt_max", path)) c.dt_max = *v;
    if (auto v = optional_number(obj, "blow_threshold", path)) c.blow_threshold = *v;
    if (auto v = optional_number(obj, "step_factor", path)) c.step_factor = *v;
    c.snapshot_every = count_at(obj, "snapshot_every", path, c.snapshot_every);
    if (auto it = obj.find("reaction_on"); it != obj.end()) {
        if (!it->is_boolean()) throw ConfigError(join(path, "reaction_on"), "expected a boolean");
        c.reaction_on = it->get<bool>();
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return c;
}

Scenario parse_scenario(const json& obj, const std::string& path, std::size_t index) {
    require_object(obj, path);
    Scenario s;
    s.name = obj.contains("name") ? string_at(obj, "name", path) : "scenario_" + std::to_string(index);
    const std::string ipath = join(path, "initial");
    const auto it = obj.find("initial");
    if (it == obj.end()) throw ConfigError(ipath, "required field is missing");
    const json& init = require_object(*it, ipath);
    auto& d = s.initial;
    d.recipe = parse_recipe(string_at(init, "recipe", ipath), join(ipath, "recipe"));
    switch (d.recipe) {
        case InitialRecipe::constant:
            d.value = number_at(init, "c", ipath);
            break;
        case InitialRecipe::random_positive:
            d.value = number_at(init, "c", ipath);
            d.amplitude = number_at(init, "amplitude", ipath);
            if (d.value < 0.0 || d.amplitude < 0.0 || d.amplitude > d.value)
                throw ConfigError(ipath, "random_positive needs 0 <= amplitude <= c");
            break;
        case InitialRecipe::trivial_plus_mode:
            d.t_blow = number_at(init, "T_blow", ipath);
            d.t_start = number_at(init, "t_start", ipath);
            d.mode = count_at(init, "mode", ipath, 1);
            if (init.contains("eps")) d.eps = number_list(init.at("eps"), join(ipath, "eps"));
            for (double e : d.eps)
                if (!(e >= 0.0 && e < 1.0)) throw ConfigError(join(ipath, "eps"), "eps must lie in [0, 1)");
            if (!(d.t_blow - d.t_start >= 10.0)) throw ConfigError(ipath, "need T_blow - t_start >= 10");
            break;
        case InitialRecipe::talenti:
            break;
        case InitialRecipe::custom:
            d.file = string_at(init, "file", ipath);
            break;
    }

    const std::string wpath = join(path, "window");
    if (auto w = obj.find("window"); w != obj.end()) {
        require_object(*w, wpath);
        if (d.recipe == InitialRecipe::trivial_plus_mode) {
            s.t0 = d.t_start;
            s.t1 = optional_number(*w, "t1", wpath).value_or(d.t_blow - 1e-2);
        } else {
            s.t0 = number_at(*w, "t0", wpath);
            s.t1 = number_at(*w, "t1", wpath);
        }
    } else if (d.recipe == InitialRecipe::trivial_plus_mode) {
        s.t0 = d.t_start;
        s.t1 = d.t_blow - 1e-2;
    } else {
        throw ConfigError(wpath, "required field is missing");
    }
    if (!(s.t0 < s.t1)) throw ConfigError(wpath, "t0 must precede t1");
    if (d.recipe == InitialRecipe::trivial_plus_mode && !(s.t1 < d.t_blow))
        throw ConfigError(join(wpath, "t1"), "must precede T_blow");
    s.controls = parse_controls(obj.contains("controls") ? obj.at("controls") : json(), join(path, "controls"));
    return s;
}

CheckerSpec parse_checker(const json& obj, const std::string& path) {
    require_object(obj, path);
    CheckerSpec c;
    c.kind = parse_checker_kind(string_at(obj, "id", path), join(path, "id"));
    if (auto v = optional_number(obj, "cap", path)) c.cap = *v;
    if (auto v = optional_number(obj, "from", path)) c.from_time = *v;
    if (auto v = optional_number(obj, "to", path)) c.to_time = *v;
    auto& pr = c.params;
    if (auto v = optional_number(obj, "K", path)) pr.K = *v;
    if (auto v = optional_number(obj, "u_floor", path)) pr.u_floor = *v;

    switch (c.kind) {
        case CheckerKind::positivity:
            break;
        case CheckerKind::gradient: {
            const std::string variant = obj.contains("variant") ? string_at(obj, "variant", path) : "global";
            try {
                c.variant = parse_gradient_variant(variant);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(join(path, "variant"), e.what());
            }
            if (auto v = optional_number(obj, "D", path)) {
                pr.D = *v;
                c.d_from_data = false;
            }
            if (c.variant == GradientVariant::local) pr.R = number_at(obj, "R", path);
            if (c.variant != GradientVariant::ancient) pr.T = number_at(obj, "T", path);
            pr.T0 = optional_number(obj, "T0", path);
            if (auto v = optional_number(obj, "grad_tol", path)) c.grad_tol = *v;
            break;
        }
        case CheckerKind::decay:
            c.t_blow = optional_number(obj, "T_blow", path);
            break;
        case CheckerKind::universal: {
            const std::string wpath = join(path, "window");
            if (!obj.contains("window")) throw ConfigError(wpath, "required field is missing");
            const json& w = require_object(obj.at("window"), wpath);
            c.window_t0 = number_at(w, "t0", wpath);
            c.window_t1 = number_at(w, "t1", wpath);
            break;
        }
        case CheckerKind::lower_bound:
            pr.delta = number_at(obj, "delta", path);
            pr.L = number_at(obj, "L", path);
            pr.A = number_at(obj, "A", path);
            pr.r0 = number_at(obj, "r0", path);
            pr.T = number_at(obj, "T", path);
            if (!(pr.delta > 0.0 && pr.delta < 1.0)) throw ConfigError(join(path, "delta"), "must lie in (0,1)");
            if (!std::isfinite(c.cap)) throw ConfigError(join(path, "cap"), "required (C_delta cap)");
            break;
        case CheckerKind::triviality:
            if (auto v = optional_number(obj, "rate_tol", path)) c.rate_tol = *v;
            if (auto v = optional_number(obj, "interval", path)) c.interval = *v;
            break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// JSON helpers for non-finite numbers
// ---------------------------------------------------------------------------

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double from_num(const json& j, double fallback = std::numeric_limits<double>::quiet_NaN()) {
    return j.is_number() ? j.get<double>() : fallback;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct RunTask {
    std::size_t scenario;
    double p;
    double eps;
};

std::vector<double> read_custom_field(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open custom initial data '" + file + "'");
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        std::replace(token.begin(), token.end(), ',', ' ');
        std::istringstream ts(token);
        double v;
        while (ts >> v) out.push_back(v);
    }
    return out;
}

ScalarField initial_field(const ManifoldPtr& m, const InitialData& d, double p, double eps, std::uint64_t seed,
                          std::size_t task_index) {
    const std::size_t N = m->node_count();
    switch (d.recipe) {
        case InitialRecipe::constant:
            return ScalarField(N, d.value);
        case InitialRecipe::random_positive: {
            std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (task_index + 1));
            ScalarField u(N);
            for (auto& v : u) {
                const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                v = d.value + d.amplitude * (2.0 * r - 1.0);
            }
            if (m->is_periodic()) return u;
            // Smooth once so the data is resolved on the grid.
            ScalarField s(u);
            for (std::size_t i = 1; i + 1 < N; ++i) s[i] = 0.25 * u[i - 1] + 0.5 * u[i] + 0.25 * u[i + 1];
            return s;
        }
        case InitialRecipe::trivial_plus_mode: {
            const double bg = trivial_ancient(p, d.t_blow, d.t_start);
            ScalarField u(N, bg);
            if (eps > 0.0) {
                const auto mode = laplacian_eigenmode(*m, d.mode);
                for (std::size_t i = 0; i < N; ++i) u[i] = bg * (1.0 + eps * mode.mode[i]);
            }
            return u;
        }
        case InitialRecipe::talenti: {
            ScalarField u(N);
            for (std::size_t i = 0; i < N; ++i) u[i] = talenti_profile(m->dimension(), m->distance_from_origin(i));
            return u;
        }
        case InitialRecipe::custom: {
            auto u = read_custom_field(d.file);
            if (u.size() != N)
                throw std::runtime_error("custom initial data has " + std::to_string(u.size()) + " values, expected " +
                                         std::to_string(N));
            return u;
        }
    }
    return {};
}

CheckerResult apply_checker(const CheckerSpec& spec, const Trajectory& full, const Scenario& scenario, double p) {
    CheckerResult out;
    out.checker = std::string(to_string(spec.kind));
    try {
        const double lo = spec.from_time.value_or(-std::numeric_limits<double>::infinity());
        const double hi = spec.to_time.value_or(std::numeric_limits<double>::infinity());
        const Trajectory traj = (spec.from_time || spec.to_time) ? full.window(lo, hi) : full;
        EstimateParams params = spec.params;
        const auto& m = *traj.manifold;
        if (params.K == 0.0) params.K = m.curvature_k();
        switch (spec.kind) {
            case CheckerKind::positivity:
                out.report = check_positivity_min_ode(traj, p);
                break;
            case CheckerKind::gradient:
                if (spec.d_from_data) {
                    double d = 0.0;
                    for (std::size_t k = 0; k < traj.size(); ++k) d = std::max(d, traj.max_at(k));
                    params.D = d;
                }
                out.report = check_gradient_estimate(traj, params, spec.variant, spec.cap, spec.grad_tol);
                break;
            case CheckerKind::decay: {
                // Explicit T_blow, else the recipe's, else the extrapolated blow-up of this run.
                double tb;
                if (spec.t_blow)
                    tb = *spec.t_blow;
                else if (scenario.initial.recipe == InitialRecipe::trivial_plus_mode)
                    tb = scenario.initial.t_blow;
                else if (full.blowup)
                    tb = detect_blowup(full, p);
                else
                    throw std::invalid_argument("decay: run did not blow up and no T_blow was given");
                out.report = check_decay(traj, tb, p, spec.cap);
                break;
            }
            case CheckerKind::universal:
                out.report = check_universal(traj, *spec.window_t0, *spec.window_t1, p, spec.cap);
                break;
            case CheckerKind::lower_bound:
                out.report = check_lower_bound_lemma(traj, params, spec.cap);
                break;
            case CheckerKind::triviality:
                out.report = check_triviality(traj, p, spec.rate_tol, spec.interval);
                break;
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::string short_hash(const std::string& h) { return h.substr(0, 16); }

}  // namespace

std::string_view to_string(CheckerKind kind) {
    switch (kind) {
        case CheckerKind::positivity: return "positivity";
        case CheckerKind::gradient: return "gradient";
        case CheckerKind::decay: return "decay";
        case CheckerKind::universal: return "universal";
        case CheckerKind::lower_bound: return "lower_bound";
        case CheckerKind::triviality: return "triviality";
    }
    return "unknown";
}

std::string canonicalize(const json& doc) { return doc.dump(); }

std::string sha256_hex(const std::string& text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return os.str();
}

ExperimentConfig parse_config(const json& doc) {
    require_object(doc, "");
    ExperimentConfig cfg;
    cfg.canonical_text = canonicalize(doc);
    cfg.hash = sha256_hex(cfg.canonical_text);

    if (!doc.contains("manifold")) throw ConfigError("manifold", "required field is missing");
    const json& mj = require_object(doc.at("manifold"), "manifold");
    try {
        cfg.manifold.kind = parse_manifold_kind(string_at(mj, "kind", "manifold"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("manifold.kind", e.what());
    }
    cfg.manifold.n = static_cast<int>(count_at(mj, "n", "manifold", 0));
    cfg.manifold.size = number_at(mj, "size", "manifold");
    cfg.manifold.nodes = count_at(mj, "nodes", "manifold", 128);
    try {
        (void)build_manifold(cfg.manifold.kind, cfg.manifold.n, cfg.manifold.size, cfg.manifold.nodes);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("manifold", e.what());
    }

    if (!doc.contains("p")) throw ConfigError("p", "required field is missing");
    cfg.p_values = number_list(doc.at("p"), "p");
    for (std::size_t i = 0; i < cfg.p_values.size(); ++i)
        if (!(cfg.p_values[i] > 1.0 + kMinExponentGap)) throw ConfigError(index_path("p", i), "p must exceed 1");

    if (auto it = doc.find("scenarios"); it != doc.end()) {
        if (!it->is_array()) throw ConfigError("scenarios", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            cfg.scenarios.push_back(parse_scenario((*it)[i], index_path("scenarios", i), i));
    }
    if (auto it = doc.find("checkers"); it != doc.end()) {
        if (!it->is_array()) throw ConfigError("checkers", "expected an array");
        std::vector<std::string> seen;
        for (std::size_t i = 0; i < it->size(); ++i) {
            cfg.checkers.push_back(parse_checker((*it)[i], index_path("checkers", i)));
            const std::string id(to_string(cfg.checkers.back().kind));
            if (std::find(seen.begin(), seen.end(), id) != seen.end())
                throw ConfigError(index_path("checkers", i) + ".id", "duplicate checker id '" + id + "'");
            seen.push_back(id);
        }
    }
    if (auto it = doc.find("output_dir"); it != doc.end()) {
        if (!it->is_string()) throw ConfigError("output_dir", "expected a string");
        cfg.output_dir = it->get<std::string>();
    }
    cfg.seed = count_at(doc, "seed", "", 0);
    if (auto it = doc.find("export_trajectories"); it != doc.end()) {
        if (!it->is_boolean()) throw ConfigError("export_trajectories", "expected a boolean");
        cfg.export_trajectories = it->get<bool>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const ExperimentConfig& config) {
    if (flag) return *flag;
    if (config.output_dir) return *config.output_dir;
    if (const char* env = std::getenv("SEMIHEAT_OUT_DIR"); env && *env) return env;
    return "semiheat_out";
}

bool RunReport::all_pass() const {
    for (const auto& s : scenarios) {
        if (!s.ok) return false;
        for (const auto& c : s.checks)
            if (!c.pass()) return false;
    }
    return true;
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.config_hash = config.hash;
    for (double p : config.p_values) report.regimes.push_back({config.manifold.n, p, exponent_regime(config.manifold.n, p)});

    std::vector<RunTask> tasks;
    for (std::size_t s = 0; s < config.scenarios.size(); ++s)
        for (double p : config.p_values)
            for (double eps : config.scenarios[s].initial.eps) tasks.push_back({s, p, eps});

    const auto manifold =
        make_manifold(config.manifold.kind, config.manifold.n, config.manifold.size, config.manifold.nodes);
    if (options.write_files) std::filesystem::create_directories(options.out_dir);

    report.scenarios.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& task = tasks[i];
            const auto& sc = config.scenarios[task.scenario];
            auto& res = report.scenarios[i];
            res.name = sc.name;
            res.p = task.p;
            res.eps = task.eps;
            const auto t_begin = std::chrono::steady_clock::now();
            try {
                const auto u0 = initial_field(manifold, sc.initial, task.p, task.eps, config.seed, i);
                const auto traj = evolve(manifold, u0, sc.t0, sc.t1, task.p, sc.controls);
                auto& sum = res.summary;
                sum.snapshots = traj.size();
                sum.steps = traj.steps.size();
                sum.t_final = traj.times.back();
                sum.max_u = traj.max_at(traj.size() - 1);
                sum.min_u = traj.min_at(traj.size() - 1);
                if (traj.blowup) {
                    sum.blowup_time = traj.blowup->detected_time;
                    try {
                        sum.blowup_estimate = detect_blowup(traj, task.p);
                    } catch (const std::logic_error&) {
                    }
                }
                for (const auto& spec : config.checkers) res.checks.push_back(apply_checker(spec, traj, sc, task.p));
                if (options.write_files && config.export_trajectories) {
                    const std::string stem = "traj_" + short_hash(config.hash) + "_" + std::to_string(i);
                    write_trajectory(traj, options.out_dir / (stem + ".csv"), options.out_dir / (stem + ".json"),
                                     config.hash);
                }
            } catch (const std::exception& e) {
                res.ok = false;
                res.error = e.what();
            }
            res.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
            if (options.verbose) {
                std::lock_guard lock(log_mutex);
                std::cerr << "[run " << i << "] " << res.name << " p=" << res.p << " eps=" << res.eps
                          << (res.ok ? " ok" : " FAILED: " + res.error) << " (" << res.wall_seconds << " s)\n";
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tasks.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (options.write_files) {
        std::ofstream out(options.out_dir / ("report_" + short_hash(config.hash) + ".json"));
        out << to_json(report).dump(2) << '\n';
        for (const auto& spec : config.checkers) emit_plot_data(report, std::string(to_string(spec.kind)), options.out_dir);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json to_json(const EstimateReport& r) {
    json j;
    j["id"] = r.id;
    j["c_fit"] = num(r.c_fit);
    j["c_cap"] = num(r.c_cap);
    j["pass"] = r.pass;
    j["verdict"] = r.verdict;
    json diag = json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = num(v);
    j["diagnostics"] = diag;
    json argmax = json::object();
    if (r.argmax_snapshot) argmax["snapshot"] = *r.argmax_snapshot;
    if (r.argmax_node) argmax["node"] = *r.argmax_node;
    argmax["t"] = num(r.argmax_time);
    j["argmax"] = argmax;
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back({row.snapshot, num(row.t), num(row.lhs), num(row.rhs), num(row.ratio)});
    j["rows"] = rows;
    if (r.fields) {
        json f = json::array(), w = json::array();
        for (double v : r.fields->f) f.push_back(num(v));
        for (double v : r.fields->w) w.push_back(num(v));
        j["fields"] = {{"snapshot", r.fields->snapshot}, {"f", f}, {"w", w}};
    }
    return j;
}

EstimateReport estimate_report_from_json(const json& j) {
    EstimateReport r;
    r.id = j.at("id").get<std::string>();
    r.c_fit = from_num(j.at("c_fit"));
    r.c_cap = from_num(j.at("c_cap"), std::numeric_limits<double>::infinity());
    r.pass = j.at("pass").get<bool>();
    r.verdict = j.value("verdict", "");
    for (const auto& [k, v] : j.at("diagnostics").items()) r.diagnostics[k] = from_num(v);
    const auto& a = j.at("argmax");
    if (a.contains("snapshot")) r.argmax_snapshot = a.at("snapshot").get<std::size_t>();
    if (a.contains("node")) r.argmax_node = a.at("node").get<std::size_t>();
    r.argmax_time = from_num(a.at("t"));
    for (const auto& row : j.at("rows"))
        r.rows.push_back({row[0].get<std::size_t>(), from_num(row[1]), from_num(row[2]), from_num(row[3]), from_num(row[4])});
    if (j.contains("fields")) {
        GradientFields f;
        f.snapshot = j["fields"]["snapshot"].get<std::size_t>();
        for (const auto& v : j["fields"]["f"]) f.f.push_back(from_num(v));
        for (const auto& v : j["fields"]["w"]) f.w.push_back(from_num(v));
        r.fields = std::move(f);
    }
    return r;
}

json to_json(const RunReport& report) {
    json j;
    j["config_hash"] = report.config_hash;
    j["pass"] = report.all_pass();
    json regimes = json::array();
    for (const auto& r : report.regimes) regimes.push_back({{"n", r.n}, {"p", r.p}, {"regime", to_string(r.regime)}});
    j["regimes"] = regimes;
    json scenarios = json::array();
    json timing = json::array();
    for (const auto& s : report.scenarios) {
        json sj;
        sj["name"] = s.name;
        sj["p"] = s.p;
        sj["eps"] = s.eps;
        sj["status"] = s.ok ? "ok" : "failed";
        if (!s.ok) sj["error"] = s.error;
        json sum;
        sum["snapshots"] = s.summary.snapshots;
        sum["steps"] = s.summary.steps;
        sum["t_final"] = num(s.summary.t_final);
        sum["max_u"] = num(s.summary.max_u);
        sum["min_u"] = num(s.summary.min_u);
        sum["blowup_time"] = s.summary.blowup_time ? num(*s.summary.blowup_time) : json(nullptr);
        sum["blowup_estimate"] = s.summary.blowup_estimate ? num(*s.summary.blowup_estimate) : json(nullptr);
        sj["summary"] = sum;
        json checks = json::array();
        for (const auto& c : s.checks) {
            json cj;
            cj["checker"] = c.checker;
            cj["pass"] = c.pass();
            if (!c.error.empty()) cj["error"] = c.error;
            if (c.report) cj["report"] = to_json(*c.report);
            checks.push_back(cj);
        }
        sj["checks"] = checks;
        scenarios.push_back(sj);
        timing.push_back(s.wall_seconds);
    }
    j["scenarios"] = scenarios;
    j["timing"] = {{"total_seconds", report.wall_seconds}, {"scenario_seconds", timing}};
    return j;
}

RunReport run_report_from_json(const json& j) {
    RunReport r;
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& rj : j.at("regimes")) {
        const auto name = rj.at("regime").get<std::string>();
        ExponentRegime reg = ExponentRegime::below_threshold;
        for (auto cand : {ExponentRegime::below_threshold, ExponentRegime::open_gap,
                          ExponentRegime::sobolev_critical_or_above, ExponentRegime::low_dimension_all_subcritical})
            if (to_string(cand) == name) reg = cand;
        r.regimes.push_back({rj.at("n").get<int>(), rj.at("p").get<double>(), reg});
    }
    const json* timing = j.contains("timing") ? &j.at("timing") : nullptr;
    if (timing) r.wall_seconds = timing->value("total_seconds", 0.0);
    std::size_t idx = 0;
    for (const auto& sj : j.at("scenarios")) {
        ScenarioResult s;
        s.name = sj.at("name").get<std::string>();
        s.p = sj.at("p").get<double>();
        s.eps = sj.at("eps").get<double>();
        s.ok = sj.at("status").get<std::string>() == "ok";
        s.error = sj.value("error", "");
        const auto& sum = sj.at("summary");
        s.summary.snapshots = sum.at("snapshots").get<std::size_t>();
        s.summary.steps = sum.at("steps").get<std::size_t>();
        s.summary.t_final = from_num(sum.at("t_final"));
        s.summary.max_u = from_num(sum.at("max_u"));
        s.summary.min_u = from_num(sum.at("min_u"));
        if (sum.at("blowup_time").is_number()) s.summary.blowup_time = sum.at("blowup_time").get<double>();
        if (sum.at("blowup_estimate").is_number()) s.summary.blowup_estimate = sum.at("blowup_estimate").get<double>();
        for (const auto& cj : sj.at("checks")) {
            CheckerResult c;
            c.checker = cj.at("checker").get<std::string>();
            c.error = cj.value("error", "");
            if (cj.contains("report")) c.report = estimate_report_from_json(cj.at("report"));
            s.checks.push_back(std::move(c));
        }
        if (timing && timing->contains("scenario_seconds") && idx < timing->at("scenario_seconds").size())
            s.wall_seconds = timing->at("scenario_seconds")[idx].get<double>();
        ++idx;
        r.scenarios.push_back(std::move(s));
    }
    return r;
}

std::filesystem::path emit_plot_data(const RunReport& report, const std::string& checker_id,
                                     const std::filesystem::path& out_dir) {
    bool known = false;
    for (auto k : {CheckerKind::positivity, CheckerKind::gradient, CheckerKind::decay, CheckerKind::universal,
                   CheckerKind::lower_bound, CheckerKind::triviality})
        known = known || to_string(k) == checker_id;
    if (!known) throw std::invalid_argument("unknown checker id '" + checker_id + "'");
    bool present = false;
    for (const auto& s : report.scenarios)
        for (const auto& c : s.checks) present = present || c.checker == checker_id;
    if (!report.scenarios.empty() && !present)
        throw std::invalid_argument("checker '" + checker_id + "' is not present in the report");

    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / ("plot_" + short_hash(report.config_hash) + "_" + checker_id + ".csv");
    std::ofstream out(path, std::ios::binary);
    out << "scenario,p,eps,snapshot,t,lhs,rhs,ratio\n";
    out << std::setprecision(17);
    for (const auto& s : report.scenarios) {
        for (const auto& c : s.checks) {
            if (c.checker != checker_id || !c.report) continue;
            for (const auto& row : c.report->rows)
                out << s.name << ',' << s.p << ',' << s.eps << ',' << row.snapshot << ',' << row.t << ',' << row.lhs
                    << ',' << row.rhs << ',' << row.ratio << '\n';
        }
    }
    return path;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& csv_path,
                      const std::filesystem::path& sidecar_path, const std::string& config_hash) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        out << "t,node_index,u\n" << std::setprecision(17);
        for (std::size_t k = 0; k < traj.size(); ++k)
            for (std::size_t i = 0; i < traj.snapshots[k].size(); ++i)
                out << traj.times[k] << ',' << i << ',' << traj.snapshots[k][i] << '\n';
    }
    json side;
    side["config_hash"] = config_hash;
    side["p"] = traj.p;
    side["manifold"] = {{"kind", to_string(traj.manifold->kind())},
                        {"n", traj.manifold->dimension()},
                        {"size", traj.manifold->size()},
                        {"nodes", traj.manifold->node_count()}};
    json steps = json::array();
    for (const auto& s : traj.steps) steps.push_back({num(s.t), num(s.dt), num(s.max_u), num(s.min_u)});
    side["step_log"] = {{"columns", {"t", "dt", "max_u", "min_u"}}, {"rows", steps}};
    if (traj.blowup)
        side["blowup"] = {{"detected_time", traj.blowup->detected_time},
                          {"method", traj.blowup->method == BlowupMethod::threshold_crossing ? "threshold_crossing"
                                                                                              : "extrapolation"}};
    else
        side["blowup"] = nullptr;
    side["negative_data"] = traj.negative_data;
    std::ofstream out(sidecar_path);
    out << side.dump(2) << '\n';
}

}  // namespace semiheat
