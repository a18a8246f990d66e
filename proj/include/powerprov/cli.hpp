#ifndef POWERPROV_CLI_HPP
#define POWERPROV_CLI_HPP

// Command-line front end. Requires CLI11 and nlohmann/json (vendored).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "powerprov/io.hpp"
#include "powerprov/powerprov.hpp"

namespace powerprov::cli {

enum class ExitCode : int { ok = 0, model_error = 1, io_error = 2 };

using AnyTrace = std::variant<EventTrace, FluidTrace>;

struct TraceOptions
{
    double slot = 1.0;
    std::optional<double> horizon;
    std::size_t initial_jobs = 0;
};

/// Loads a fluid trace (two columns) or an event trace (three columns).
inline AnyTrace load_trace(const std::string& path, const TraceOptions& opts)
{
    const std::string text = read_file(path);
    const auto lines = detail::split_csv(text);
    if (!lines.empty() && lines.front().fields.size() == 2)
        return parse_fluid_trace(text, opts.slot);
    return parse_event_trace(text, {opts.initial_jobs, opts.horizon});
}

/// Settings shared by every subcommand; flags override the config file, which overrides defaults.
struct Settings
{
    std::uint64_t seed = 1;
    std::string format = "json";
    CostModel cost{1.0, 3.0, 3.0};
    std::string trace;
    TraceOptions trace_opts;
    std::vector<std::string> policies{"A1"};
    std::vector<double> alphas{0.0};
    std::vector<double> noises{0.0};
    std::optional<double> t_wait;
    int fleet_size = 0;
    std::size_t runs = 100;
};

inline void apply_config(Settings& s, const Json& cfg)
{
    require_keys(cfg,
                 {"cost", "trace", "policy", "policies", "alpha", "alphas", "noise", "noises", "seed", "fleet_size",
                  "t_wait", "runs", "slot", "horizon", "initial_jobs", "format"},
                 "config");
    auto get = [&](const char* key, auto& target) {
        if (auto it = cfg.find(key); it != cfg.end()) {
            try {
                target = it->get<std::decay_t<decltype(target)>>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(std::string("config key '") + key + "' has the wrong type");
            }
        }
    };
    if (auto it = cfg.find("cost"); it != cfg.end())
        s.cost = cost_model_from_json(*it);
    get("trace", s.trace);
    get("seed", s.seed);
    get("format", s.format);
    get("fleet_size", s.fleet_size);
    get("runs", s.runs);
    get("slot", s.trace_opts.slot);
    get("initial_jobs", s.trace_opts.initial_jobs);
    if (cfg.contains("horizon")) {
        double h = 0.0;
        get("horizon", h);
        s.trace_opts.horizon = h;
    }
    if (cfg.contains("t_wait")) {
        double w = 0.0;
        get("t_wait", w);
        s.t_wait = w;
    }
    if (cfg.contains("policy")) {
        std::string p;
        get("policy", p);
        s.policies = {p};
    }
    get("policies", s.policies);
    if (cfg.contains("alpha")) {
        double a = 0.0;
        get("alpha", a);
        s.alphas = {a};
    }
    get("alphas", s.alphas);
    if (cfg.contains("noise")) {
        double n = 0.0;
        get("noise", n);
        s.noises = {n};
    }
    get("noises", s.noises);
}

inline std::size_t thread_budget(std::size_t tasks)
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POWERPROV_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1)
                n = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw ConfigError("POWERPROV_THREADS must be a positive integer");
        }
    }
    return std::max<std::size_t>(1, std::min(n, tasks));
}

/// Runs task(i) for i in [0, count) on a bounded pool; results must be keyed by i.
template <class Task>
void parallel_for(std::size_t count, Task task)
{
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t threads = thread_budget(count);
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

struct ReportRow
{
    std::string policy;
    double alpha = 0.0;
    double window = 0.0;
    double noise = 0.0;
    std::size_t runs = 0;
    double mean_cost = 0.0;
    double std_error = 0.0;
    double static_cost = 0.0;
    double cost_reduction = 0.0;
    double empirical_ratio = 0.0;
};

struct Report
{
    double optimal_cost = 0.0;
    double static_cost = 0.0;
    std::vector<ReportRow> rows;
};

inline double total_cost(const AnyTrace& trace, const CostModel& m, const PolicySpec& p, const LookaheadConfig& look,
                         int fleet)
{
    if (const auto* ev = std::get_if<EventTrace>(&trace))
        return run(*ev, m, p, look, fleet).breakdown.total;
    return run_discrete(std::get<FluidTrace>(trace), m, p, look, fleet).breakdown.total;
}

inline double optimal_cost(const AnyTrace& trace, const CostModel& m)
{
    if (const auto* ev = std::get_if<EventTrace>(&trace))
        return construct_optimal(CountFunction(*ev), m).total;
    return construct_optimal(std::get<FluidTrace>(trace), m).total;
}

inline double static_cost(const AnyTrace& trace, const CostModel& m)
{
    if (const auto* ev = std::get_if<EventTrace>(&trace))
        return static_benchmark(CountFunction(*ev), m);
    return static_benchmark(std::get<FluidTrace>(trace), m);
}

/**
 * Mean cost over `runs` seeded repetitions for every (policy, alpha, noise)
 * point. Run r uses the same seeds at every grid point.
 */
inline Report sweep(const AnyTrace& trace, const Settings& s)
{
    if (s.runs == 0)
        throw ConfigError("runs must be positive");
    Report rep;
    rep.optimal_cost = optimal_cost(trace, s.cost);
    rep.static_cost = static_cost(trace, s.cost);

    struct Point
    {
        PolicyKind kind;
        double alpha;
        double noise;
    };
    std::vector<Point> grid;
    for (const auto& name : s.policies)
        for (double a : s.alphas)
            for (double n : s.noises) {
                PolicySpec probe{parse_policy(name), a, s.t_wait, 0};
                probe.validate();
                LookaheadConfig{n, 0}.validate();
                grid.push_back({probe.kind, a, n});
            }
    rep.rows.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t g) {
        const Point& pt = grid[g];
        double mean = 0.0, m2 = 0.0;
        for (std::size_t r = 0; r < s.runs; ++r) {
            const PolicySpec p{pt.kind, pt.alpha, s.t_wait, derive_seed(s.seed, 2 * r)};
            const LookaheadConfig look{pt.noise, derive_seed(s.seed, 2 * r + 1)};
            const double c = total_cost(trace, s.cost, p, look, s.fleet_size);
            const double d = c - mean;
            mean += d / static_cast<double>(r + 1);
            m2 += d * (c - mean);
        }
        ReportRow& row = rep.rows[g];
        row.policy = std::string(to_string(pt.kind));
        row.alpha = pt.alpha;
        row.window = pt.alpha * s.cost.delta();
        row.noise = pt.noise;
        row.runs = s.runs;
        row.mean_cost = mean;
        const double n = static_cast<double>(s.runs);
        row.std_error = s.runs > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
        row.static_cost = rep.static_cost;
        row.cost_reduction = rep.static_cost > 0.0 ? 1.0 - mean / rep.static_cost : 0.0;
        row.empirical_ratio = rep.optimal_cost > 0.0 ? mean / rep.optimal_cost : 1.0;
    });
    return rep;
}

inline Json to_json(const Report& rep)
{
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"policy", r.policy},
                        {"alpha", r.alpha},
                        {"window", r.window},
                        {"noise", r.noise},
                        {"runs", r.runs},
                        {"mean_cost", r.mean_cost},
                        {"stderr", r.std_error},
                        {"static_cost", r.static_cost},
                        {"cost_reduction", r.cost_reduction},
                        {"empirical_ratio", r.empirical_ratio}});
    return {{"optimal_cost", rep.optimal_cost}, {"static_cost", rep.static_cost}, {"rows", std::move(rows)}};
}

inline std::string to_csv(const Report& rep)
{
    std::string out = "policy,alpha,window,noise,runs,mean_cost,stderr,static_cost,cost_reduction,empirical_ratio\n";
    for (const auto& r : rep.rows)
        out += r.policy + "," + format_double(r.alpha) + "," + format_double(r.window) + "," + format_double(r.noise)
               + "," + std::to_string(r.runs) + "," + format_double(r.mean_cost) + "," + format_double(r.std_error)
               + "," + format_double(r.static_cost) + "," + format_double(r.cost_reduction) + ","
               + format_double(r.empirical_ratio) + "\n";
    return out;
}

namespace detail {

inline void emit(std::ostream& out, const Settings& s, const Json& json, const std::string& csv)
{
    if (s.format == "csv")
        out << csv;
    else
        out << json.dump(2) << '\n';
}

inline const EventTrace& require_events(const AnyTrace& t, const char* command)
{
    if (const auto* ev = std::get_if<EventTrace>(&t))
        return *ev;
    throw ConfigError(std::string(command) + " needs an event trace (time,event,job_id)");
}

} // namespace detail

/// Parses arguments and runs one subcommand. Returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dynamic provisioning toolkit: offline optimum, online policies, sweeps and ratio tables"};
    app.require_subcommand(1);
    app.fallthrough();

    Settings s;
    std::string config_path;
    std::uint64_t seed = s.seed;
    std::string format = s.format;
    double power = s.cost.power, beta_on = s.cost.beta_on, beta_off = s.cost.beta_off;
    auto* seed_opt = app.add_option("--seed", seed, "Base seed for every random stream");
    auto* format_opt = app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--config", config_path, "JSON config file (unknown keys are rejected)");
    auto* power_opt = app.add_option("--power", power, "Power draw P of a running server");
    auto* on_opt = app.add_option("--beta-on", beta_on, "Cost of turning a server on");
    auto* off_opt = app.add_option("--beta-off", beta_off, "Cost of turning a server off");

    std::string trace_path;
    double slot = 1.0, horizon = 0.0;
    std::size_t initial_jobs = 0;
    auto add_trace = [&](CLI::App* sub) {
        sub->add_option("trace", trace_path, "Trace CSV (time,event,job_id or slot,load)");
        sub->add_option("--slot", slot, "Slot duration of a fluid trace");
        sub->add_option("--horizon", horizon, "Horizon T of an event trace");
        sub->add_option("--initial-jobs", initial_jobs, "Undeclared jobs present at t = 0");
    };

    std::string policy = "A1";
    double alpha = 0.0, noise = 0.0, t_wait = 0.0;
    int fleet = 0;
    std::vector<std::string> policies;
    std::vector<double> alphas, noises;
    std::size_t runs = 100;

    auto* simulate = app.add_subcommand("simulate", "Simulate one policy on a trace");
    add_trace(simulate);
    auto* policy_opt = simulate->add_option("--policy", policy, "A0, A1, A2, A3 or DelayedOff");
    auto* alpha_opt = simulate->add_option("--alpha", alpha, "Lookahead fraction of the critical interval");
    auto* noise_opt = simulate->add_option("--noise", noise, "Relative std of lookahead errors");
    auto* fleet_opt = simulate->add_option("--fleet", fleet, "Fleet size (default: peak demand)");
    auto* wait_opt = simulate->add_option("--t-wait", t_wait, "DelayedOff idle timeout (default: critical interval)");

    auto* offline = app.add_subcommand("offline", "Offline optimal schedule and cost");
    add_trace(offline);

    auto* decompose_cmd = app.add_subcommand("decompose", "Critical segments of an event trace");
    add_trace(decompose_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "Cost over a policy x alpha x noise grid");
    add_trace(sweep_cmd);
    auto* policies_opt = sweep_cmd->add_option("--policies", policies, "Comma-separated policies")->delimiter(',');
    auto* alphas_opt = sweep_cmd->add_option("--alphas", alphas, "Comma-separated alpha values")->delimiter(',');
    auto* noises_opt = sweep_cmd->add_option("--noises", noises, "Comma-separated noise levels")->delimiter(',');
    auto* runs_opt = sweep_cmd->add_option("--runs", runs, "Seeded repetitions per grid point");
    auto* sweep_fleet_opt = sweep_cmd->add_option("--fleet", fleet, "Fleet size (default: peak demand)");
    auto* sweep_wait_opt = sweep_cmd->add_option("--t-wait", t_wait, "DelayedOff idle timeout");

    std::vector<long> bs, ks;
    bool probs = false;
    auto* ratio_cmd = app.add_subcommand("ratio", "Optimal randomized ratio table for slotted lookahead");
    ratio_cmd->add_option("--b", bs, "Slots per critical interval")->delimiter(',')->required();
    ratio_cmd->add_option("--k", ks, "Lookahead slots")->delimiter(',')->required();
    ratio_cmd->add_flag("--probs", probs, "Include the turn-off distribution");

    double target = 0.0;
    auto* rescale_cmd = app.add_subcommand("rescale", "Reshape a fluid trace to a target peak-to-mean ratio");
    add_trace(rescale_cmd);
    rescale_cmd->add_option("--pmr", target, "Target PMR")->required();

    std::string kind = "fluid", sojourn = "exp", order = "fifo";
    std::size_t slots = 1008, jobs = 10;
    double mean = 20.0, pmr_target = 4.63, mean_sojourn = 1.0;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic trace");
    synth_cmd->add_option("--kind", kind, "fluid or brick")->check(CLI::IsMember({"fluid", "brick"}));
    synth_cmd->add_option("--slots", slots, "Fluid: number of slots");
    synth_cmd->add_option("--jobs", jobs, "Brick: number of jobs");
    synth_cmd->add_option("--mean", mean, "Mean load");
    synth_cmd->add_option("--pmr", pmr_target, "Fluid: target PMR");
    synth_cmd->add_option("--slot", slot, "Fluid: slot duration");
    synth_cmd->add_option("--sojourn", sojourn, "Brick: exp, det or uniform")
        ->check(CLI::IsMember({"exp", "det", "uniform"}));
    synth_cmd->add_option("--mean-sojourn", mean_sojourn, "Brick: mean job duration");
    synth_cmd->add_option("--order", order, "Brick: departure identities fifo, lifo or random")
        ->check(CLI::IsMember({"fifo", "lifo", "random"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::io_error);
    }

    try {
        if (!config_path.empty()) {
            Json cfg;
            try {
                cfg = Json::parse(read_file(config_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError("invalid JSON in '" + config_path + "': " + e.what());
            }
            apply_config(s, cfg);
        }
        if (seed_opt->count())
            s.seed = seed;
        if (format_opt->count())
            s.format = format;
        if (s.format != "json" && s.format != "csv")
            throw ConfigError("format must be json or csv");
        if (power_opt->count())
            s.cost.power = power;
        if (on_opt->count())
            s.cost.beta_on = beta_on;
        if (off_opt->count())
            s.cost.beta_off = beta_off;
        s.cost.validate();
        if (!trace_path.empty())
            s.trace = trace_path;
        for (auto* sub : app.get_subcommands()) {
            auto given = [sub](const char* name) {
                const auto* o = sub->get_option_no_throw(name);
                return o != nullptr && o->count() > 0;
            };
            if (given("--slot"))
                s.trace_opts.slot = slot;
            if (given("--horizon"))
                s.trace_opts.horizon = horizon;
            if (given("--initial-jobs"))
                s.trace_opts.initial_jobs = initial_jobs;
        }
        if (policy_opt->count())
            s.policies = {policy};
        if (policies_opt->count())
            s.policies = policies;
        if (alpha_opt->count())
            s.alphas = {alpha};
        if (alphas_opt->count())
            s.alphas = alphas;
        if (noise_opt->count())
            s.noises = {noise};
        if (noises_opt->count())
            s.noises = noises;
        if (fleet_opt->count() || sweep_fleet_opt->count())
            s.fleet_size = fleet;
        if (wait_opt->count() || sweep_wait_opt->count())
            s.t_wait = t_wait;
        if (runs_opt->count())
            s.runs = runs;

        auto need_trace = [&] {
            if (s.trace.empty())
                throw ConfigError("no trace given (positional argument or config key 'trace')");
            return load_trace(s.trace, s.trace_opts);
        };

        if (*simulate) {
            const AnyTrace trace = need_trace();
            if (s.policies.size() != 1 || s.alphas.size() != 1 || s.noises.size() != 1)
                throw ConfigError("simulate takes a single policy, alpha and noise");
            const PolicySpec p{parse_policy(s.policies[0]), s.alphas[0], s.t_wait, derive_seed(s.seed, 0)};
            const LookaheadConfig look{s.noises[0], derive_seed(s.seed, 1)};
            const SimResult r = std::holds_alternative<EventTrace>(trace)
                                    ? run(std::get<EventTrace>(trace), s.cost, p, look, s.fleet_size)
                                    : run_discrete(std::get<FluidTrace>(trace), s.cost, p, look, s.fleet_size);
            Json j = {{"policy", to_string(p.kind)},
                      {"alpha", p.alpha},
                      {"noise", look.noise},
                      {"cost_model", to_json(s.cost)},
                      {"optimal_cost", optimal_cost(trace, s.cost)},
                      {"static_cost", static_cost(trace, s.cost)},
                      {"result", to_json(r)}};
            detail::emit(out, s, j, job_log_csv(r));
        } else if (*offline) {
            const AnyTrace trace = need_trace();
            if (const auto* ev = std::get_if<EventTrace>(&trace)) {
                const CountFunction a(*ev);
                const OptimalSchedule o = construct_optimal(a, s.cost);
                Json j = to_json(o);
                j["static_cost"] = static_benchmark(a, s.cost);
                detail::emit(out, s, j, schedule_csv(o.schedule));
            } else {
                const auto& fl = std::get<FluidTrace>(trace);
                const DiscreteOptimum o = construct_optimal(fl, s.cost);
                Json j = {{"total", o.total},
                          {"breakdown", to_json(o.breakdown)},
                          {"static_cost", static_benchmark(fl, s.cost)},
                          {"schedule", to_json(o.schedule)}};
                detail::emit(out, s, j, schedule_csv(o.schedule));
            }
        } else if (*decompose_cmd) {
            const AnyTrace trace = need_trace();
            const auto d = decompose(CountFunction(detail::require_events(trace, "decompose")));
            detail::emit(out, s, to_json(d), decomposition_csv(d));
        } else if (*sweep_cmd) {
            const Report rep = sweep(need_trace(), s);
            detail::emit(out, s, to_json(rep), to_csv(rep));
        } else if (*ratio_cmd) {
            Json rows = Json::array();
            std::string csv = probs ? "b,k,c,p\n" : "b,k,c\n";
            for (long b : bs)
                for (long k : ks) {
                    const SlottedRatio sr = closed_form(b, k);
                    rows.push_back(to_json(sr, probs));
                    csv += std::to_string(b) + "," + std::to_string(k) + "," + format_double(sr.c);
                    if (probs) {
                        csv += ",";
                        for (std::size_t i = 0; i < sr.p.size(); ++i)
                            csv += (i ? ";" : "") + format_double(sr.p[i]);
                    }
                    csv += "\n";
                }
            detail::emit(out, s, Json{{"rows", std::move(rows)}}, csv);
        } else if (*rescale_cmd) {
            const AnyTrace trace = need_trace();
            const auto* fl = std::get_if<FluidTrace>(&trace);
            if (!fl)
                throw ConfigError("rescale needs a fluid trace (slot,load)");
            const RescaleResult r = rescale_pmr(*fl, target);
            Json j = {{"gamma", r.gamma}, {"scale", r.scale}, {"pmr", pmr(r.trace)}, {"trace", to_json(r.trace)}};
            detail::emit(out, s, j, serialize(r.trace));
        } else if (*synth_cmd) {
            if (kind == "fluid") {
                FluidSynthParams p;
                p.slots = slots;
                p.mean_load = mean;
                p.target_pmr = pmr_target;
                p.slot_duration = slot;
                const FluidTrace t = synth_fluid(p, s.seed);
                detail::emit(out, s, to_json(t), serialize(t));
            } else {
                BrickSynthParams p;
                p.jobs = jobs;
                p.mean_load = mean;
                p.mean_sojourn = mean_sojourn;
                p.sojourn = sojourn == "exp"   ? SojournLaw::exponential
                            : sojourn == "det" ? SojournLaw::deterministic
                                               : SojournLaw::uniform;
                p.order = order == "fifo" ? DepartureOrder::fifo
                          : order == "lifo" ? DepartureOrder::lifo
                                            : DepartureOrder::random;
                const EventTrace t = synth_brick(p, s.seed);
                detail::emit(out, s, to_json(t), serialize(t));
            }
        }
        return static_cast<int>(ExitCode::ok);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::io_error);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::io_error);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::model_error);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::model_error);
    }
}

} // namespace powerprov::cli

#endif // POWERPROV_CLI_HPP
