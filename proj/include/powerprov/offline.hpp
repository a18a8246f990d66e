#ifndef POWERPROV_OFFLINE_HPP
#define POWERPROV_OFFLINE_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "powerprov/cost.hpp"
#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"
#include "powerprov/segments.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

struct OptimalSchedule
{
    StepSchedule schedule;
    CriticalDecomposition decomposition;
    /// Cost attributed to each critical segment (rises to the segment they end,
    /// falls to the segment they start, falls at T to the last segment).
    std::vector<double> segment_costs;
    CostBreakdown breakdown;
    double total = 0.0;
};

/// Interval [start, end] on which x is held at `level` instead of following a.
struct Hold
{
    double start = 0.0;
    double end = 0.0;
    int level = 0;
};

/// Holds chosen by the construction: short U and canyon segments, and short canyon pairs.
inline std::vector<Hold> optimal_holds(const CountFunction& a, const CriticalDecomposition& d, const CostModel& m)
{
    std::vector<Hold> holds;
    for (const auto& seg : d.segments) {
        if (seg.type == SegmentType::III || seg.type == SegmentType::IV) {
            if (idling_pays(m, seg.length())) {
                holds.push_back({seg.start, seg.end, seg.anchor});
            } else if (seg.type == SegmentType::IV) {
                for (const auto& p : pair_epochs(a, seg, m).selected)
                    holds.push_back({p.departure, p.arrival, p.level});
            }
        }
    }
    return holds;
}

/// x = a outside the holds, x = hold level on each hold. Holds must be disjoint and sorted.
inline StepSchedule apply_holds(const CountFunction& a, const std::vector<Hold>& holds)
{
    std::vector<Breakpoint> bps;
    std::size_t h = 0;
    for (const auto& e : a.epochs()) {
        while (h < holds.size() && holds[h].end < e.time)
            ++h;
        const bool held = h < holds.size() && holds[h].start <= e.time && e.time <= holds[h].end;
        if (held && e.time < holds[h].end)
            continue;
        bps.push_back({e.time, e.after});
    }
    return StepSchedule(a.horizon(), a.initial(), std::move(bps));
}

namespace detail {

/// Cost of x restricted to [s, e] with boundary-toggle attribution as in OptimalSchedule.
inline double segment_cost(const StepSchedule& x, double s, double e, const CostModel& m)
{
    KahanSum sum;
    double prev = s;
    int level = x.right_limit(s);
    int before = x.left_limit(s);
    if (s > 0.0 && level < before)
        sum += m.beta_off * (before - level);
    for (const auto& b : x.breakpoints()) {
        if (b.time <= s)
            continue;
        if (b.time > e)
            break;
        sum += m.power * level * (b.time - prev);
        if (b.value > level)
            sum += m.beta_on * (b.value - level);
        else if (b.time < e || e == x.horizon())
            sum += m.beta_off * (level - b.value);
        prev = b.time;
        level = b.value;
    }
    if (prev < e)
        sum += m.power * level * (e - prev);
    return sum.value();
}

} // namespace detail

/// Optimal schedule assembled segment by segment from the critical decomposition.
inline OptimalSchedule construct_optimal(const CountFunction& a, const CostModel& m)
{
    m.validate();
    OptimalSchedule out;
    out.decomposition = decompose(a);
    out.schedule = apply_holds(a, optimal_holds(a, out.decomposition, m));
    out.breakdown = evaluate(out.schedule, a, m);
    out.total = out.breakdown.total;
    for (const auto& seg : out.decomposition.segments)
        out.segment_costs.push_back(detail::segment_cost(out.schedule, seg.start, seg.end, m));
    return out;
}

struct DpCaps
{
    std::size_t max_epochs = 24;
    int max_level = 8;
};

struct DpResult
{
    double cost = 0.0;
    StepSchedule schedule;
};

/**
 * Exhaustive minimum over integer schedules on [t0, t1] that change only at
 * epochs of a, with x(t0) = x_start and x(t1) = x_end. Equal-cost choices
 * prefer the smaller value on each piece.
 */
inline DpResult dp_over(const CountFunction& a, double t0, double t1, int x_start, int x_end, const CostModel& m,
                        const DpCaps& caps = {})
{
    const auto [first, last] = detail::inner_epochs(a, t0, t1);
    const auto& eps = a.epochs();
    if (last - first > caps.max_epochs)
        throw CapExceeded("DP oracle limited to " + std::to_string(caps.max_epochs) + " epochs");

    std::vector<double> cuts{t0};
    std::vector<int> floor_level{a.right_limit(t0)};
    for (std::size_t i = first; i < last; ++i) {
        cuts.push_back(eps[i].time);
        floor_level.push_back(eps[i].after);
    }
    cuts.push_back(t1);
    int top = std::max(x_start, x_end);
    for (int v : floor_level)
        top = std::max(top, v);
    if (top > caps.max_level)
        throw CapExceeded("DP oracle limited to level " + std::to_string(caps.max_level));

    const std::size_t pieces = floor_level.size();
    const std::size_t states = static_cast<std::size_t>(top) + 1;
    auto move = [&](int from, int to) {
        return to > from ? m.beta_on * (to - from) : m.beta_off * (from - to);
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(pieces, std::vector<double>(states, inf));
    std::vector<std::vector<int>> from(pieces, std::vector<int>(states, -1));
    for (std::size_t p = 0; p < pieces; ++p) {
        const double len = cuts[p + 1] - cuts[p];
        for (int v = floor_level[p]; v <= top; ++v) {
            const double hold = m.power * v * len;
            if (p == 0) {
                best[p][v] = move(x_start, v) + hold;
                continue;
            }
            for (int u = floor_level[p - 1]; u <= top; ++u) {
                const double c = best[p - 1][u] + move(u, v) + hold;
                if (c < best[p][v] - tolerance * 1e-3) {
                    best[p][v] = c;
                    from[p][v] = u;
                }
            }
        }
    }
    int v_last = -1;
    double cost = inf;
    for (int v = floor_level.back(); v <= top; ++v) {
        const double c = best.back()[v] + move(v, x_end);
        if (c < cost - tolerance * 1e-3) {
            cost = c;
            v_last = v;
        }
    }

    std::vector<int> values(pieces);
    values.back() = v_last;
    for (std::size_t p = pieces - 1; p > 0; --p)
        values[p - 1] = from[p][values[p]];

    std::vector<Breakpoint> bps;
    for (std::size_t p = 0; p < pieces; ++p)
        if (cuts[p] > 0.0)
            bps.push_back({cuts[p], values[p]});
    if (x_end != values.back())
        bps.push_back({t1, x_end});
    DpResult out;
    out.cost = cost;
    out.schedule = StepSchedule(a.horizon(), t0 == 0.0 ? x_start : values.front(), std::move(bps));
    return out;
}

/// Brute-force optimum on [0, T]; independent of the segment machinery.
inline DpResult dp_oracle(const CountFunction& a, const CostModel& m, const DpCaps& caps = {})
{
    m.validate();
    if (a.epochs().size() > caps.max_epochs)
        throw CapExceeded("DP oracle limited to " + std::to_string(caps.max_epochs) + " epochs");
    return dp_over(a, 0.0, a.horizon(), a.initial(), a.final_level(), m, caps);
}

/// Sum of per-segment optima with x pinned to a at both ends of every critical segment.
inline double lower_bound(const CountFunction& a, const CostModel& m,
                          const DpCaps& caps = {std::numeric_limits<std::size_t>::max(), 256})
{
    m.validate();
    KahanSum sum;
    for (const auto& seg : decompose(a).segments) {
        const int x_end = seg.end == a.horizon() ? a.final_level() : a.at(seg.end);
        sum += dp_over(a, seg.start, seg.end, a.at(seg.start), x_end, m, caps).cost;
    }
    return sum.value();
}

} // namespace powerprov

#endif // POWERPROV_OFFLINE_HPP
