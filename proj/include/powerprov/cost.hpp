#ifndef POWERPROV_COST_HPP
#define POWERPROV_COST_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

struct CostModel
{
    double power = 1.0;
    double beta_on = 0.0;
    double beta_off = 0.0;

    double beta() const noexcept { return beta_on + beta_off; }

    /// Critical interval: idling this long costs the same as one off/on cycle.
    double delta() const noexcept { return beta() / power; }

    void validate() const
    {
        if (!(power > 0.0) || !std::isfinite(power))
            throw ConfigError("power must be positive");
        if (!(beta_on >= 0.0) || !(beta_off >= 0.0) || !std::isfinite(beta()))
            throw ConfigError("toggle costs must be finite and non-negative");
    }
};

struct CostBreakdown
{
    double energy = 0.0;
    double turn_on = 0.0;
    double turn_off = 0.0;
    double total = 0.0;
};

struct Breakpoint
{
    double time = 0.0;
    int value = 0;

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/**
 * Integer step function x on [0, T] in canonical form.
 *
 * `initial()` holds on [0, t_1); each breakpoint sets the value from its time
 * on. Consecutive values always differ. At a breakpoint the point value is the
 * larger one-sided limit, matching the convention of CountFunction.
 */
class StepSchedule
{
public:
    StepSchedule() = default;

    StepSchedule(double horizon, int initial, std::vector<Breakpoint> breakpoints = {})
        : horizon_(horizon), initial_(initial)
    {
        if (!(horizon >= 0.0) || !std::isfinite(horizon))
            throw Error("schedule horizon must be finite and non-negative");
        if (initial < 0)
            throw Error("schedule values must be non-negative");
        int current = initial;
        double prev = 0.0;
        for (const auto& bp : breakpoints) {
            if (!(bp.time > prev) || bp.time > horizon || bp.value < 0)
                throw Error("schedule breakpoints must be increasing in (0, T] with values >= 0");
            prev = bp.time;
            if (bp.value != current)
                breakpoints_.push_back(bp);
            current = bp.value;
        }
    }

    /// Builds a schedule from signed changes; changes at the same time are netted.
    static StepSchedule from_changes(double horizon, int initial, const std::vector<std::pair<double, int>>& changes)
    {
        std::map<double, int> net;
        for (const auto& [t, d] : changes)
            net[t] += d;
        std::vector<Breakpoint> bps;
        int level = initial;
        for (const auto& [t, d] : net) {
            if (d == 0)
                continue;
            level += d;
            bps.push_back({t, level});
        }
        return StepSchedule(horizon, initial, std::move(bps));
    }

    double horizon() const noexcept { return horizon_; }
    int initial() const noexcept { return initial_; }
    const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }

    int final_value() const noexcept { return breakpoints_.empty() ? initial_ : breakpoints_.back().value; }

    int right_limit(double t) const
    {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                   [](double v, const Breakpoint& b) { return v < b.time; });
        return it == breakpoints_.begin() ? initial_ : std::prev(it)->value;
    }

    int left_limit(double t) const
    {
        auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                   [](const Breakpoint& b, double v) { return b.time < v; });
        return it == breakpoints_.begin() ? initial_ : std::prev(it)->value;
    }

    int at(double t) const { return std::max(left_limit(t), right_limit(t)); }

    int peak() const
    {
        int p = initial_;
        for (const auto& b : breakpoints_)
            p = std::max(p, b.value);
        return p;
    }

    friend bool operator==(const StepSchedule&, const StepSchedule&) = default;

private:
    double horizon_ = 0.0;
    int initial_ = 0;
    std::vector<Breakpoint> breakpoints_;
};

/// Exact integral of x over [0, T].
inline double integrate(const StepSchedule& x)
{
    KahanSum sum;
    double prev = 0.0;
    int level = x.initial();
    for (const auto& b : x.breakpoints()) {
        sum += level * (b.time - prev);
        prev = b.time;
        level = b.value;
    }
    sum += level * (x.horizon() - prev);
    return sum.value();
}

/// (turn_on, turn_off) charges for every rise and fall of x inside [0, T].
inline std::pair<double, double> toggle_costs(const StepSchedule& x, const CostModel& m)
{
    long long rises = 0, falls = 0;
    int level = x.initial();
    for (const auto& b : x.breakpoints()) {
        if (b.value > level)
            rises += b.value - level;
        else
            falls += level - b.value;
        level = b.value;
    }
    return {m.beta_on * static_cast<double>(rises), m.beta_off * static_cast<double>(falls)};
}

inline CostBreakdown make_breakdown(double energy, double turn_on, double turn_off)
{
    return {energy, turn_on, turn_off, energy + turn_on + turn_off};
}

/// Throws Infeasible at the first instant where x < a or a boundary value differs.
inline void check_feasible(const StepSchedule& x, const CountFunction& a)
{
    if (x.initial() != a.initial())
        throw Infeasible("x(0) differs from a(0)", 0.0);
    const auto& bps = x.breakpoints();
    const auto& eps = a.epochs();
    std::size_t i = 0, j = 0;
    int xv = x.initial(), av = a.initial();
    double t = 0.0;
    for (;;) {
        if (xv < av)
            throw Infeasible("x below a", t);
        const double tx = i < bps.size() ? bps[i].time : INFINITY;
        const double ta = j < eps.size() ? eps[j].time : INFINITY;
        t = std::min(tx, ta);
        if (!std::isfinite(t))
            break;
        if (tx == t)
            xv = bps[i++].value;
        if (ta == t)
            av = eps[j++].after;
    }
    if (x.final_value() != a.final_level())
        throw Infeasible("x(T) differs from a(T)", a.horizon());
}

/// Objective of the provisioning problem for x, after checking feasibility against a.
inline CostBreakdown evaluate(const StepSchedule& x, const CountFunction& a, const CostModel& m)
{
    if (!approx_equal(x.horizon(), a.horizon()))
        throw Error("schedule and workload horizons differ");
    check_feasible(x, a);
    const auto [on, off] = toggle_costs(x, m);
    return make_breakdown(m.power * integrate(x), on, off);
}

/// Cost of provisioning the peak requirement for the whole horizon.
inline double static_benchmark(const CountFunction& a, const CostModel& m)
{
    return a.peak() * m.power * a.horizon();
}

inline double static_benchmark(const FluidTrace& trace, const CostModel& m)
{
    return trace.peak_required() * m.power * trace.horizon();
}

} // namespace powerprov

#endif // POWERPROV_COST_HPP
