#ifndef POWERPROV_TRACE_HPP
#define POWERPROV_TRACE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"
#include "powerprov/rng.hpp"

namespace powerprov {

enum class EventKind { arrival, departure };

struct TraceEvent
{
    double time = 0.0;
    EventKind kind = EventKind::arrival;
    std::string job_id;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/**
 * Continuous-time brick workload: one job per server, jobs identified by id.
 *
 * Event times are strictly increasing and lie in (0, horizon]. Jobs present at
 * t = 0 are listed in `initial_jobs`.
 */
struct EventTrace
{
    std::vector<std::string> initial_jobs;
    std::vector<TraceEvent> events;
    double horizon = 0.0;

    int initial_count() const noexcept { return static_cast<int>(initial_jobs.size()); }

    friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

/// Discrete-time fluid workload: average number of jobs per slot.
struct FluidTrace
{
    double slot_duration = 1.0;
    std::vector<double> loads;

    std::size_t size() const noexcept { return loads.size(); }
    double horizon() const noexcept { return slot_duration * static_cast<double>(loads.size()); }

    /// Servers needed in slot i.
    int required(std::size_t i) const { return static_cast<int>(std::ceil(loads[i])); }

    int peak_required() const
    {
        int peak = 0;
        for (std::size_t i = 0; i < loads.size(); ++i)
            peak = std::max(peak, required(i));
        return peak;
    }

    friend bool operator==(const FluidTrace&, const FluidTrace&) = default;
};

/// Checks the EventTrace invariants; `row` in errors is the 1-based event index.
inline void validate(const EventTrace& trace)
{
    if (!(trace.horizon > 0.0) || !std::isfinite(trace.horizon))
        throw MalformedTrace("horizon must be positive", 0);
    std::unordered_set<std::string> seen;
    std::unordered_set<std::string> active;
    for (const auto& id : trace.initial_jobs) {
        if (id.empty() || !seen.insert(id).second)
            throw MalformedTrace("initial job ids must be non-empty and unique", 0);
        active.insert(id);
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& ev = trace.events[i];
        const std::size_t row = i + 1;
        if (!std::isfinite(ev.time) || ev.time <= 0.0 || ev.time > trace.horizon)
            throw MalformedTrace("event time outside (0, horizon]", row);
        if (i > 0 && ev.time == prev)
            throw SimultaneousEvents(row);
        if (ev.time < prev)
            throw MalformedTrace("events not time-sorted", row);
        prev = ev.time;
        if (ev.kind == EventKind::arrival) {
            if (ev.job_id.empty() || !seen.insert(ev.job_id).second)
                throw MalformedTrace("arrival must introduce a fresh job id", row);
            active.insert(ev.job_id);
        } else if (active.erase(ev.job_id) == 0) {
            throw UnknownJob(ev.job_id, row);
        }
    }
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

struct CsvLine
{
    std::size_t row;
    std::vector<std::string_view> fields;
};

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

/// Splits a document into non-empty, non-comment lines of comma-separated fields.
inline std::vector<CsvLine> split_csv(std::string_view text)
{
    std::vector<CsvLine> lines;
    std::size_t row = 0;
    while (!text.empty()) {
        ++row;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        CsvLine out{row, {}};
        for (;;) {
            const auto comma = line.find(',');
            out.fields.push_back(trim(line.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            line.remove_prefix(comma + 1);
        }
        lines.push_back(std::move(out));
    }
    return lines;
}

/// True if the first line is exactly the given column names.
inline bool has_header(const std::vector<CsvLine>& lines, std::initializer_list<std::string_view> names)
{
    return !lines.empty() && std::equal(lines.front().fields.begin(), lines.front().fields.end(), names.begin(),
                                        names.end());
}

inline bool parse_index(std::string_view s, std::size_t& out)
{
    if (s.empty())
        return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace detail

struct EventParseOptions
{
    /// Jobs present at t = 0 that are not declared with `init` rows. The first
    /// departures of undeclared ids bind to these anonymous jobs.
    std::size_t initial_jobs = 0;
    /// Overrides both the `end` row and the last event time.
    std::optional<double> horizon;
};

/**
 * Parses a `time,event,job_id` document; the header row is optional.
 *
 * Event kinds: `arrive`, `depart`, `init` (job present at t = 0, time must be 0)
 * and `end` (optional last row carrying the horizon). Without an explicit horizon
 * the last event time is used.
 */
inline EventTrace parse_event_trace(std::string_view text, const EventParseOptions& opts = {})
{
    const auto lines = detail::split_csv(text);
    const std::size_t first = detail::has_header(lines, {"time", "event", "job_id"}) ? 1 : 0;

    EventTrace trace;
    std::unordered_set<std::string> seen;
    std::unordered_set<std::string> active;
    std::size_t anonymous = opts.initial_jobs;
    std::optional<double> end_row;
    bool body_started = false;

    for (std::size_t i = first; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const std::size_t row = line.row;
        if (end_row)
            throw MalformedTrace("rows after the end row", row);
        if (line.fields.size() != 3)
            throw MalformedTrace("expected 3 fields", row);
        double t = 0.0;
        if (!parse_double(line.fields[0], t))
            throw MalformedTrace("bad time value", row);
        const std::string_view kind = line.fields[1];
        std::string id(line.fields[2]);

        if (kind == "init") {
            if (body_started || t != 0.0)
                throw MalformedTrace("init rows must come first with time 0", row);
            if (id.empty() || !seen.insert(id).second)
                throw MalformedTrace("duplicate or empty job id", row);
            trace.initial_jobs.push_back(id);
            active.insert(std::move(id));
            continue;
        }
        if (kind == "end") {
            if (!(t > 0.0))
                throw MalformedTrace("horizon must be positive", row);
            if (!trace.events.empty() && t < trace.events.back().time)
                throw MalformedTrace("horizon precedes last event", row);
            end_row = t;
            continue;
        }
        if (kind != "arrive" && kind != "depart")
            throw MalformedTrace("unknown event kind '" + std::string(kind) + "'", row);
        body_started = true;
        if (!(t > 0.0))
            throw MalformedTrace("event time must be positive", row);
        if (!trace.events.empty()) {
            const double prev = trace.events.back().time;
            if (t == prev)
                throw SimultaneousEvents(row);
            if (t < prev)
                throw MalformedTrace("rows not time-sorted", row);
        }
        if (kind == "arrive") {
            if (id.empty() || !seen.insert(id).second)
                throw MalformedTrace("arrival must introduce a fresh job id", row);
            active.insert(id);
            trace.events.push_back({t, EventKind::arrival, std::move(id)});
        } else {
            if (active.erase(id) == 0) {
                if (anonymous == 0 || id.empty() || seen.count(id))
                    throw UnknownJob(id, row);
                --anonymous;
                seen.insert(id);
                trace.initial_jobs.push_back(id);
            }
            trace.events.push_back({t, EventKind::departure, std::move(id)});
        }
    }

    for (std::size_t k = 0; anonymous > 0; ++k) {
        std::string id = "init-" + std::to_string(k);
        if (seen.insert(id).second) {
            trace.initial_jobs.push_back(std::move(id));
            --anonymous;
        }
    }

    const double last = trace.events.empty() ? 0.0 : trace.events.back().time;
    if (opts.horizon) {
        if (!(*opts.horizon > 0.0) || *opts.horizon < last)
            throw MalformedTrace("horizon must be positive and not precede the last event", 0);
        trace.horizon = *opts.horizon;
    } else if (end_row) {
        trace.horizon = *end_row;
    } else {
        if (trace.events.empty())
            throw MalformedTrace("empty trace needs an explicit horizon", 0);
        trace.horizon = last;
    }
    return trace;
}

inline std::string serialize(const EventTrace& trace)
{
    std::string out = "time,event,job_id\n";
    for (const auto& id : trace.initial_jobs)
        out += "0,init," + id + "\n";
    for (const auto& ev : trace.events) {
        out += format_double(ev.time);
        out += ev.kind == EventKind::arrival ? ",arrive," : ",depart,";
        out += ev.job_id;
        out += '\n';
    }
    out += format_double(trace.horizon) + ",end,\n";
    return out;
}

/// Parses a `slot,load` document (header optional) with contiguous slot indices starting at 0.
inline FluidTrace parse_fluid_trace(std::string_view text, double slot_duration = 1.0)
{
    if (!(slot_duration > 0.0))
        throw MalformedTrace("slot duration must be positive", 0);
    const auto lines = detail::split_csv(text);
    const std::size_t first = detail::has_header(lines, {"slot", "load"}) ? 1 : 0;
    FluidTrace trace;
    trace.slot_duration = slot_duration;
    for (std::size_t i = first; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.fields.size() != 2)
            throw MalformedTrace("expected 2 fields", line.row);
        std::size_t slot = 0;
        if (!detail::parse_index(line.fields[0], slot))
            throw MalformedTrace("bad slot index", line.row);
        if (slot != trace.loads.size())
            throw MalformedTrace("slot indices must be contiguous from 0", line.row);
        double load = 0.0;
        if (!parse_double(line.fields[1], load) || load < 0.0)
            throw MalformedTrace("load must be a non-negative number", line.row);
        trace.loads.push_back(load);
    }
    if (trace.loads.empty())
        throw MalformedTrace("trace has no slots", lines.empty() ? 0 : lines.front().row);
    return trace;
}

inline std::string serialize(const FluidTrace& trace)
{
    std::string out = "slot,load\n";
    for (std::size_t i = 0; i < trace.loads.size(); ++i)
        out += std::to_string(i) + "," + format_double(trace.loads[i]) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Count function a(t)

/// One job event seen as a change of the running job count.
struct Epoch
{
    double time = 0.0;
    EventKind kind = EventKind::arrival;
    int before = 0;
    int after = 0;

    /// a(t) at the epoch: the larger one-sided limit.
    int value() const noexcept { return std::max(before, after); }
};

/**
 * Piecewise-constant job count a(t) on [0, T].
 *
 * Between epochs the count is constant. At an epoch a(t) is the maximum of
 * its one-sided limits, so a departing job is still counted at its departure
 * instant and an arriving job is counted at its arrival instant. The level
 * after the last epoch, `final_level()`, is the boundary value at T.
 */
class CountFunction
{
public:
    CountFunction() = default;

    explicit CountFunction(const EventTrace& trace) : initial_(trace.initial_count()), horizon_(trace.horizon)
    {
        int level = initial_;
        epochs_.reserve(trace.events.size());
        for (const auto& ev : trace.events) {
            const int next = ev.kind == EventKind::arrival ? level + 1 : level - 1;
            epochs_.push_back({ev.time, ev.kind, level, next});
            level = next;
        }
    }

    int initial() const noexcept { return initial_; }
    double horizon() const noexcept { return horizon_; }
    const std::vector<Epoch>& epochs() const noexcept { return epochs_; }

    int final_level() const noexcept { return epochs_.empty() ? initial_ : epochs_.back().after; }

    /// Index of the epoch exactly at t, if any.
    std::optional<std::size_t> epoch_at(double t) const
    {
        auto it = std::lower_bound(epochs_.begin(), epochs_.end(), t,
                                   [](const Epoch& e, double v) { return e.time < v; });
        if (it != epochs_.end() && it->time == t)
            return static_cast<std::size_t>(it - epochs_.begin());
        return std::nullopt;
    }

    /// Number of epochs with time <= t.
    std::size_t epochs_through(double t) const
    {
        return static_cast<std::size_t>(std::upper_bound(epochs_.begin(), epochs_.end(), t,
                                                         [](double v, const Epoch& e) { return v < e.time; })
                                        - epochs_.begin());
    }

    /// Value on the open piece just after t (final level at or after the last epoch).
    int right_limit(double t) const
    {
        const std::size_t n = epochs_through(t);
        return n == 0 ? initial_ : epochs_[n - 1].after;
    }

    /// Value on the open piece just before t.
    int left_limit(double t) const
    {
        auto it = std::lower_bound(epochs_.begin(), epochs_.end(), t,
                                   [](const Epoch& e, double v) { return e.time < v; });
        return it == epochs_.begin() ? initial_ : std::prev(it)->after;
    }

    /// a(t) with the max-of-limits rule at epochs.
    int at(double t) const
    {
        if (auto i = epoch_at(t))
            return epochs_[*i].value();
        return right_limit(t);
    }

    int peak() const
    {
        int peak = initial_;
        for (const auto& e : epochs_)
            peak = std::max(peak, e.value());
        return peak;
    }

    /// Maximum of a over the closed interval [t0, t1].
    int max_over(double t0, double t1) const
    {
        int best = at(t0);
        for (std::size_t i = epochs_through(t0); i < epochs_.size() && epochs_[i].time <= t1; ++i)
            best = std::max(best, epochs_[i].value());
        return best;
    }

    /// Exact integral of a over [0, T].
    double integral() const
    {
        KahanSum sum;
        double prev = 0.0;
        int level = initial_;
        for (const auto& e : epochs_) {
            sum += level * (e.time - prev);
            prev = e.time;
            level = e.after;
        }
        sum += level * (horizon_ - prev);
        return sum.value();
    }

    /// Sum of |jumps| over all epochs.
    int total_variation() const
    {
        int tv = 0;
        for (const auto& e : epochs_)
            tv += std::abs(e.after - e.before);
        return tv;
    }

private:
    int initial_ = 0;
    double horizon_ = 0.0;
    std::vector<Epoch> epochs_;
};

inline CountFunction count_function(const EventTrace& trace)
{
    return CountFunction(trace);
}

// ---------------------------------------------------------------------------
// Peak-to-mean ratio tools

inline double mean_load(const FluidTrace& trace)
{
    KahanSum sum;
    for (double v : trace.loads)
        sum += v;
    return trace.loads.empty() ? 0.0 : sum.value() / static_cast<double>(trace.loads.size());
}

inline double pmr(const FluidTrace& trace)
{
    const double mean = mean_load(trace);
    if (!(mean > 0.0))
        throw ZeroMean();
    return *std::max_element(trace.loads.begin(), trace.loads.end()) / mean;
}

struct RescaleResult
{
    FluidTrace trace;
    double gamma = 1.0;
    /// Multiplier K in K * load^gamma. May overflow to inf for extreme gamma;
    /// the loads themselves are computed in normalized form.
    double scale = 1.0;
};

/**
 * Reshapes loads as K * load^gamma so that the PMR hits `target` while the mean
 * is preserved. gamma is found by bisection; PMR is increasing in gamma for any
 * non-constant trace.
 */
inline RescaleResult rescale_pmr(const FluidTrace& trace, double target)
{
    if (!(target >= 1.0) || !std::isfinite(target))
        throw InvalidTarget("target PMR must be >= 1");
    const double mean = mean_load(trace);
    if (!(mean > 0.0))
        throw ZeroMean();
    const double peak = *std::max_element(trace.loads.begin(), trace.loads.end());
    const double current = peak / mean;
    if (std::fabs(current - target) <= 1e-12 * target)
        return {trace, 1.0, 1.0};
    const double low = *std::min_element(trace.loads.begin(), trace.loads.end());
    if (low == peak)
        throw Unreachable("constant trace cannot reach PMR " + format_double(target));

    const double n = static_cast<double>(trace.loads.size());
    // Mean of (load / peak)^gamma; PMR(gamma) = 1 / that.
    auto normalized_mean = [&](double gamma) {
        KahanSum s;
        for (double v : trace.loads)
            s += v > 0.0 ? std::pow(v / peak, gamma) : 0.0;
        return s.value() / n;
    };
    auto pmr_at = [&](double gamma) { return 1.0 / normalized_mean(gamma); };

    std::size_t zeros = 0, at_peak = 0;
    for (double v : trace.loads) {
        zeros += v == 0.0;
        at_peak += v == peak;
    }
    const double inf_limit = n / static_cast<double>(at_peak);
    const double zero_limit = zeros == 0 ? 1.0 : n / static_cast<double>(trace.loads.size() - zeros);
    if (target >= inf_limit || target <= zero_limit)
        throw Unreachable("PMR " + format_double(target) + " outside the reachable range ("
                          + format_double(zero_limit) + ", " + format_double(inf_limit) + ")");

    double lo = 1.0, hi = 1.0;
    if (target > current) {
        while (pmr_at(hi) < target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e12)
                throw Unreachable("PMR bisection failed to bracket the target");
        }
    } else {
        while (pmr_at(lo) > target) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-12)
                throw Unreachable("PMR bisection failed to bracket the target");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pmr_at(mid) < target ? lo : hi) = mid;
    }
    const double gamma = 0.5 * (lo + hi);
    const double nm = normalized_mean(gamma);

    RescaleResult out;
    out.gamma = gamma;
    out.scale = std::exp(std::log(mean) - gamma * std::log(peak) - std::log(nm));
    out.trace.slot_duration = trace.slot_duration;
    out.trace.loads.reserve(trace.loads.size());
    for (double v : trace.loads)
        out.trace.loads.push_back(v > 0.0 ? mean * std::pow(v / peak, gamma) / nm : 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic workloads

enum class DepartureOrder { fifo, lifo, random };
enum class SojournLaw { exponential, deterministic, uniform };

struct BrickSynthParams
{
    std::size_t jobs = 10;
    /// Long-run mean number of jobs in the system (arrival rate x mean sojourn).
    double mean_load = 2.0;
    double mean_sojourn = 1.0;
    SojournLaw sojourn = SojournLaw::exponential;
    DepartureOrder order = DepartureOrder::fifo;
};

/**
 * Poisson arrivals with independent sojourn times. The departure epochs are
 * drawn first and job identities are attached afterwards by `order`, so the
 * count function does not depend on the departure order for a fixed seed.
 */
inline EventTrace synth_brick(const BrickSynthParams& p, std::uint64_t seed)
{
    if (p.jobs == 0 || !(p.mean_load > 0.0) || !(p.mean_sojourn > 0.0))
        throw ConfigError("brick synthesis needs positive jobs, mean_load and mean_sojourn");
    Rng times(derive_seed(seed, 0));
    const double rate = p.mean_load / p.mean_sojourn;

    std::vector<double> arrivals;
    std::vector<double> departures;
    std::set<double> used;
    double t = 0.0;
    for (std::size_t i = 0; i < p.jobs; ++i) {
        do {
            t += times.exponential(1.0 / rate);
        } while (!(t > 0.0) || used.count(t));
        used.insert(t);
        arrivals.push_back(t);
    }
    for (std::size_t i = 0; i < p.jobs; ++i) {
        double d = 0.0;
        do {
            double s = p.mean_sojourn;
            if (p.sojourn == SojournLaw::exponential)
                s = times.exponential(p.mean_sojourn);
            else if (p.sojourn == SojournLaw::uniform)
                s = 2.0 * p.mean_sojourn * times.uniform();
            d = arrivals[i] + s;
        } while (!(d > arrivals[i]) || used.count(d));
        used.insert(d);
        departures.push_back(d);
    }
    std::sort(departures.begin(), departures.end());

    EventTrace trace;
    Rng pick(derive_seed(seed, 1));
    std::deque<std::string> active;
    std::size_t ai = 0, di = 0;
    while (ai < arrivals.size() || di < departures.size()) {
        if (ai < arrivals.size() && arrivals[ai] < departures[di]) {
            std::string id = "j" + std::to_string(ai + 1);
            active.push_back(id);
            trace.events.push_back({arrivals[ai++], EventKind::arrival, std::move(id)});
            continue;
        }
        std::size_t k = 0;
        switch (p.order) {
        case DepartureOrder::fifo: k = 0; break;
        case DepartureOrder::lifo: k = active.size() - 1; break;
        case DepartureOrder::random: k = pick.index(active.size()); break;
        }
        trace.events.push_back({departures[di++], EventKind::departure, active[k]});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(k));
    }
    trace.horizon = trace.events.back().time;
    return trace;
}

struct FluidSynthParams
{
    std::size_t slots = 1008;
    double mean_load = 20.0;
    double target_pmr = 4.63;
    double slot_duration = 1.0;
    /// Slots per diurnal cycle (144 ten-minute slots per day).
    double period = 144.0;
    /// Relative standard deviation of the AR(1) fluctuation around the daily shape.
    double noise = 0.15;
};

/// Diurnal shape with weekday/weekend modulation and AR(1) noise, reshaped to the target PMR.
inline FluidTrace synth_fluid(const FluidSynthParams& p, std::uint64_t seed)
{
    if (p.slots < 2 || !(p.mean_load > 0.0) || !(p.slot_duration > 0.0) || !(p.period > 0.0))
        throw ConfigError("fluid synthesis needs >= 2 slots and positive mean, slot and period");
    Rng r(derive_seed(seed, 2));
    FluidTrace base;
    base.slot_duration = p.slot_duration;
    base.loads.reserve(p.slots);
    constexpr double two_pi = 6.283185307179586;
    double ar = 0.0;
    for (std::size_t i = 0; i < p.slots; ++i) {
        const double phase = two_pi * static_cast<double>(i) / p.period;
        const double day = std::floor(static_cast<double>(i) / p.period);
        const double weekly = std::fmod(day, 7.0) >= 5.0 ? 0.7 : 1.0;
        ar = 0.8 * ar + p.noise * std::sqrt(1.0 - 0.64) * r.normal();
        const double shape = weekly * (1.0 + 0.6 * std::sin(phase - 1.2) + 0.25 * std::sin(2.0 * phase));
        base.loads.push_back(std::max(0.02, shape * (1.0 + ar)));
    }
    const double m = mean_load(base);
    for (double& v : base.loads)
        v *= p.mean_load / m;
    return rescale_pmr(base, p.target_pmr).trace;
}

} // namespace powerprov

#endif // POWERPROV_TRACE_HPP
