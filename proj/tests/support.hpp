#ifndef POWERPROV_TESTS_SUPPORT_HPP
#define POWERPROV_TESTS_SUPPORT_HPP

// Trace generators and oracles shared by the unit and acceptance tests. The
// oracles avoid the library's segment machinery.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "powerprov/powerprov.hpp"

namespace powerprov::testkit {

/// Builds a trace from (time, +1/-1) steps; departures release the oldest job.
inline EventTrace make_trace(int initial, const std::vector<std::pair<double, int>>& steps, double horizon)
{
    EventTrace t;
    std::vector<std::string> active;
    for (int i = 0; i < initial; ++i) {
        t.initial_jobs.push_back("i" + std::to_string(i));
        active.push_back(t.initial_jobs.back());
    }
    int next = 0;
    for (const auto& [time, dir] : steps) {
        if (dir > 0) {
            active.push_back("j" + std::to_string(next++));
            t.events.push_back({time, EventKind::arrival, active.back()});
        } else {
            t.events.push_back({time, EventKind::departure, active.front()});
            active.erase(active.begin());
        }
    }
    t.horizon = horizon;
    return t;
}

struct WalkParams
{
    int max_epochs = 24;
    int max_level = 8;
    double grid = 0.25;
    int initial = 0;
    /// Departures pick a uniformly random active job instead of the oldest.
    bool random_departures = true;
};

/// Random walk in [0, max_level] on a time grid, with a random trailing stretch.
inline EventTrace random_walk(std::uint64_t seed, const WalkParams& p = {})
{
    std::mt19937_64 gen(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
    EventTrace t;
    std::vector<std::string> active;
    for (int i = 0; i < p.initial; ++i) {
        t.initial_jobs.push_back("i" + std::to_string(i));
        active.push_back(t.initial_jobs.back());
    }
    const int epochs = pick(1, p.max_epochs);
    int tick = 0, next = 0;
    for (int e = 0; e < epochs; ++e) {
        tick += pick(1, 12);
        const int level = static_cast<int>(active.size());
        const bool up = level == 0 || (level < p.max_level && pick(0, 1) == 1);
        if (up) {
            active.push_back("j" + std::to_string(next++));
            t.events.push_back({tick * p.grid, EventKind::arrival, active.back()});
        } else {
            const auto k = p.random_departures ? static_cast<std::size_t>(pick(0, level - 1)) : 0;
            t.events.push_back({tick * p.grid, EventKind::departure, active[k]});
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    t.horizon = (tick + pick(0, 16)) * p.grid;
    return t;
}

/// Cost models covering Delta below, inside and beyond typical gap lengths.
inline CostModel cost_for(std::uint64_t seed)
{
    static const double deltas[] = {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 6.0, 12.0};
    std::mt19937_64 gen(seed ^ 0x5bd1e995u);
    const double power = std::uniform_int_distribution<int>(1, 4)(gen) * 0.5;
    const double delta = deltas[std::uniform_int_distribution<int>(0, 9)(gen)];
    const double share = std::uniform_int_distribution<int>(0, 4)(gen) * 0.25;
    return {power, share * delta * power, (1.0 - share) * delta * power};
}

/**
 * Offline optimum as a sum of independent single-server problems: layer l is
 * needed wherever a >= l and bridges each gap at cost min(P * gap, beta).
 */
inline double layered_optimum(const CountFunction& a, const CostModel& m)
{
    double total = 0.0;
    const double beta = m.beta_on + m.beta_off;
    for (int l = 1; l <= a.peak(); ++l) {
        // Intervals [s, e] where the layer is required.
        std::vector<std::pair<double, double>> need;
        double start = a.initial() >= l ? 0.0 : -1.0;
        for (const auto& ep : a.epochs()) {
            if (ep.before < l && ep.after >= l)
                start = ep.time;
            else if (ep.before >= l && ep.after < l) {
                need.emplace_back(start, ep.time);
                start = -1.0;
            }
        }
        if (start >= 0.0)
            need.emplace_back(start, a.horizon());
        if (need.empty())
            continue;
        for (const auto& [s, e] : need)
            total += m.power * (e - s);
        for (std::size_t k = 1; k < need.size(); ++k)
            total += std::min(m.power * (need[k].first - need[k - 1].second), beta);
        if (a.initial() < l)
            total += m.beta_on;
        if (a.final_level() < l)
            total += m.beta_off;
    }
    return total;
}

/// Slot-by-slot dynamic program over the server count for a fluid trace.
inline double slot_dp(const FluidTrace& trace, const CostModel& m)
{
    const int top = trace.peak_required();
    const double inf = std::numeric_limits<double>::infinity();
    const double energy = m.power * trace.slot_duration;
    std::vector<double> cost(static_cast<std::size_t>(top + 1), inf);
    cost[static_cast<std::size_t>(trace.required(0))] = energy * trace.required(0);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        std::vector<double> next(cost.size(), inf);
        for (int to = trace.required(i); to <= top; ++to)
            for (int from = 0; from <= top; ++from) {
                if (cost[static_cast<std::size_t>(from)] == inf)
                    continue;
                const double step = to > from ? m.beta_on * (to - from) : m.beta_off * (from - to);
                next[static_cast<std::size_t>(to)] = std::min(next[static_cast<std::size_t>(to)],
                                                              cost[static_cast<std::size_t>(from)] + step + energy * to);
            }
        cost = std::move(next);
    }
    return cost[static_cast<std::size_t>(trace.required(trace.size() - 1))];
}

/// Largest value of x on the open interval (t0, t1).
inline int open_max(const StepSchedule& x, double t0, double t1)
{
    int best = x.right_limit(t0);
    for (const auto& b : x.breakpoints())
        if (b.time > t0 && b.time < t1)
            best = std::max(best, b.value);
    return best;
}

} // namespace powerprov::testkit

#endif // POWERPROV_TESTS_SUPPORT_HPP
