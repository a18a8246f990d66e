#ifndef POWERPROV_ENGINE_DISCRETE_HPP
#define POWERPROV_ENGINE_DISCRETE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "powerprov/cost.hpp"
#include "powerprov/engine/policy.hpp"
#include "powerprov/engine/result.hpp"
#include "powerprov/error.hpp"
#include "powerprov/rng.hpp"
#include "powerprov/segments.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

/// Required servers per slot of a fluid trace as a step schedule.
inline StepSchedule requirement(const FluidTrace& trace)
{
    std::vector<Breakpoint> bps;
    for (std::size_t i = 1; i < trace.size(); ++i)
        bps.push_back({static_cast<double>(i) * trace.slot_duration, trace.required(i)});
    return StepSchedule(trace.horizon(), trace.required(0), std::move(bps));
}

/// Feasibility of x against slot requirements: x >= need on every slot, matching at 0 and T.
inline CostBreakdown evaluate(const StepSchedule& x, const FluidTrace& trace, const CostModel& m)
{
    const StepSchedule need = requirement(trace);
    if (x.initial() != need.initial())
        throw Infeasible("x(0) differs from the first slot requirement", 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double mid = (static_cast<double>(i) + 0.5) * trace.slot_duration;
        if (x.right_limit(mid) < trace.required(i) || x.left_limit(mid) < trace.required(i))
            throw Infeasible("x below the slot requirement", static_cast<double>(i) * trace.slot_duration);
        // x may change inside a slot only if it stays feasible there.
        for (const auto& b : x.breakpoints())
            if (b.time > static_cast<double>(i) * trace.slot_duration
                && b.time < static_cast<double>(i + 1) * trace.slot_duration && b.value < trace.required(i))
                throw Infeasible("x below the slot requirement", b.time);
    }
    if (x.final_value() != need.final_value())
        throw Infeasible("x(T) differs from the last slot requirement", trace.horizon());
    const auto [on, off] = toggle_costs(x, m);
    return make_breakdown(m.power * integrate(x), on, off);
}

namespace detail {

/// Slot indices where layer r (server needed whenever the requirement is >= r) is busy.
inline std::vector<std::size_t> layer_busy_slots(const FluidTrace& trace, int r)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace.required(i) >= r)
            out.push_back(i);
    return out;
}

} // namespace detail

struct DiscreteOptimum
{
    StepSchedule schedule;
    CostBreakdown breakdown;
    double total = 0.0;
};

/**
 * Offline optimum for a fluid trace. The objective separates over layers
 * r = 1..peak, and each layer idles through a gap exactly when idling is no
 * dearer than an off/on cycle.
 */
inline DiscreteOptimum construct_optimal(const FluidTrace& trace, const CostModel& m)
{
    m.validate();
    const double slot = trace.slot_duration;
    std::vector<std::pair<double, int>> changes;
    const int first = trace.required(0);
    const int last = trace.required(trace.size() - 1);
    for (int r = 1; r <= trace.peak_required(); ++r) {
        const auto busy = detail::layer_busy_slots(trace, r);
        if (r > first)
            changes.emplace_back(static_cast<double>(busy.front()) * slot, +1);
        for (std::size_t k = 1; k < busy.size(); ++k) {
            const std::size_t gap = busy[k] - busy[k - 1] - 1;
            if (gap == 0 || idling_pays(m, static_cast<double>(gap) * slot))
                continue;
            changes.emplace_back(static_cast<double>(busy[k - 1] + 1) * slot, -1);
            changes.emplace_back(static_cast<double>(busy[k]) * slot, +1);
        }
        if (r > last)
            changes.emplace_back(static_cast<double>(busy.back() + 1) * slot, -1);
    }
    DiscreteOptimum out;
    out.schedule = StepSchedule::from_changes(trace.horizon(), first, changes);
    out.breakdown = evaluate(out.schedule, trace, m);
    out.total = out.breakdown.total;
    return out;
}

/// Number of lookahead slots beyond the current one: floor(alpha * Delta / slot).
inline std::size_t window_slots(double alpha, double delta_slots)
{
    return static_cast<std::size_t>(std::floor(alpha * delta_slots + 1e-9));
}

namespace detail {

class DiscreteSim
{
public:
    DiscreteSim(const FluidTrace& trace, const CostModel& m, const PolicySpec& policy, const LookaheadConfig& look,
                int fleet_size)
        : trace_(trace), m_(m), policy_(policy), look_(look),
          fleet_(fleet_size > 0 ? fleet_size : trace.peak_required()), b_(m.delta() / trace.slot_duration),
          window_(window_slots(policy.alpha, b_)), plan_rng_(derive_seed(policy.seed, 1)),
          pick_rng_(derive_seed(policy.seed, 2)), noise_rng_(derive_seed(look.seed, 3)),
          servers_(static_cast<std::size_t>(fleet_))
    {
    }

    SimResult run()
    {
        const std::size_t n = trace_.size();
        const int first = trace_.required(0);
        if (first > fleet_)
            throw FleetExhausted(0.0);
        for (int id = 0; id < fleet_; ++id)
            servers_[static_cast<std::size_t>(id)].on = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = time_of(i);
            if (trace_.required(i) > fleet_)
                throw FleetExhausted(t);
            if (policy_.kind == PolicyKind::delayed_off)
                step_delayed_off(i, i == 0);
            else
                step_lesf(i, i == 0);
        }
        const double horizon = trace_.horizon();
        for (auto& s : servers_)
            if (s.on && !s.busy) {
                s.on = false;
                ledger_.off(horizon);
            }
        for (auto& s : servers_)
            close_run(s, horizon);
        result_.fleet_size = fleet_;
        ledger_.finish(result_, horizon, first, m_);
        return std::move(result_);
    }

private:
    struct Slot
    {
        bool on = false;
        bool busy = false;
        std::size_t idle_from = 0;
        /// Slot at which the next idle-or-off decision is due.
        std::optional<std::size_t> due;
        std::optional<std::size_t> run_start;
    };

    double time_of(std::size_t i) const { return static_cast<double>(i) * trace_.slot_duration; }

    void close_run(Slot& s, double t)
    {
        if (!s.run_start)
            return;
        const int id = static_cast<int>(&s - servers_.data());
        result_.jobs.push_back({id, "load", time_of(*s.run_start), t});
        s.run_start.reset();
    }

    void make_busy(Slot& s, std::size_t i, bool initial)
    {
        if (!s.on) {
            s.on = true;
            if (!initial)
                ledger_.on(time_of(i));
        }
        s.busy = true;
        s.due.reset();
        if (!s.run_start)
            s.run_start = i;
    }

    void make_empty(Slot& s, std::size_t i)
    {
        close_run(s, time_of(i));
        s.busy = false;
        s.idle_from = i;
    }

    void turn_off(Slot& s, std::size_t i)
    {
        s.on = false;
        s.due.reset();
        ledger_.off(time_of(i));
    }

    /// Requirement of slot k as seen from slot i: exact for k = i, noisy beyond.
    int predicted(std::size_t i, std::size_t k)
    {
        if (k >= trace_.size())
            return 0;
        const double load = trace_.loads[k];
        if (k == i || look_.noise <= 0.0)
            return trace_.required(k);
        const double guess = load + look_.noise * load * noise_rng_.normal();
        return static_cast<int>(std::ceil(std::max(0.0, guess)));
    }

    /// LESF with nested layers: slot demand r is served by server fleet - r.
    void step_lesf(std::size_t i, bool initial)
    {
        const int need = trace_.required(i);
        for (int id = 0; id < fleet_; ++id) {
            auto& s = servers_[static_cast<std::size_t>(id)];
            const int layer = fleet_ - id;
            if (layer <= need) {
                make_busy(s, i, initial);
                continue;
            }
            if (s.busy || initial) {
                if (s.busy)
                    make_empty(s, i);
                if (!s.on)
                    continue;
                plan(s, i);
            }
            if (s.on && s.due && *s.due == i)
                decide(s, id, layer, i);
        }
    }

    void plan(Slot& s, std::size_t i)
    {
        if (policy_.kind == PolicyKind::offline_a0) {
            s.due = i;
            return;
        }
        const double span = std::max(0.0, b_ - 1.0 - static_cast<double>(window_));
        const double z = sample_wait(policy_.kind, policy_.alpha, span, plan_rng_);
        s.due = i + static_cast<std::size_t>(std::ceil(z - 1e-9));
    }

    void decide(Slot& s, int id, int layer, std::size_t i)
    {
        bool coming = false;
        std::size_t horizon_slot = i + window_;
        if (policy_.kind == PolicyKind::offline_a0) {
            // Idle iff the layer is needed again within Delta.
            for (std::size_t k = i + 1; k < trace_.size(); ++k)
                if (trace_.required(k) >= layer) {
                    coming = idling_pays(m_, static_cast<double>(k - i) * trace_.slot_duration);
                    break;
                }
            horizon_slot = trace_.size();
        } else {
            for (std::size_t k = i; k <= horizon_slot && k < trace_.size(); ++k)
                if (predicted(i, k) >= layer) {
                    coming = true;
                    break;
                }
        }
        result_.decisions.push_back({id, time_of(s.idle_from), time_of(i), coming});
        if (coming)
            s.due = horizon_slot + 1;
        else
            turn_off(s, i);
    }

    /// DelayedOff: most recently busy idle servers first, then random off servers.
    void step_delayed_off(std::size_t i, bool initial)
    {
        const int need = trace_.required(i);
        const std::size_t wait = static_cast<std::size_t>(
            std::ceil(policy_.t_wait.value_or(m_.delta()) / trace_.slot_duration - 1e-9));
        std::vector<int> candidates;
        for (int id = 0; id < fleet_; ++id) {
            auto& s = servers_[static_cast<std::size_t>(id)];
            if (s.busy)
                make_empty(s, i);
            if (s.on)
                candidates.push_back(id);
        }
        if (initial) {
            candidates.clear();
            for (int id = fleet_ - 1; id >= fleet_ - need; --id)
                candidates.push_back(id);
        }
        std::stable_sort(candidates.begin(), candidates.end(), [&](int x, int y) {
            const auto& sx = servers_[static_cast<std::size_t>(x)];
            const auto& sy = servers_[static_cast<std::size_t>(y)];
            return sx.idle_from != sy.idle_from ? sx.idle_from > sy.idle_from : x > y;
        });
        int assigned = 0;
        for (int id : candidates) {
            if (assigned == need)
                break;
            make_busy(servers_[static_cast<std::size_t>(id)], i, initial);
            ++assigned;
        }
        while (assigned < need) {
            std::vector<int> off;
            for (int id = 0; id < fleet_; ++id)
                if (!servers_[static_cast<std::size_t>(id)].on)
                    off.push_back(id);
            const int id = off[pick_rng_.index(off.size())];
            make_busy(servers_[static_cast<std::size_t>(id)], i, initial);
            ++assigned;
        }
        for (auto& s : servers_)
            if (s.on && !s.busy && i >= s.idle_from + wait)
                turn_off(s, i);
    }

    const FluidTrace& trace_;
    CostModel m_;
    PolicySpec policy_;
    LookaheadConfig look_;
    int fleet_;
    double b_;
    std::size_t window_;
    Rng plan_rng_;
    Rng pick_rng_;
    Rng noise_rng_;
    std::vector<Slot> servers_;
    ToggleLedger ledger_;
    SimResult result_;
};

} // namespace detail

/**
 * Slotted simulation of a fluid trace. Each slot pops ceil(load) servers from
 * the LESF stack and pushes every id back in ascending order at slot end, so
 * demand layer r always lands on the same server. Empty servers run the same
 * policies with waits rounded up to whole slots and a lookahead of
 * floor(alpha * Delta / slot) future slots.
 */
inline SimResult run_discrete(const FluidTrace& trace, const CostModel& m, const PolicySpec& policy,
                              const LookaheadConfig& look = {}, int fleet_size = 0)
{
    m.validate();
    policy.validate();
    look.validate();
    if (trace.loads.empty() || !(trace.slot_duration > 0.0))
        throw MalformedTrace("fluid trace must have slots and a positive slot duration", 0);
    return detail::DiscreteSim(trace, m, policy, look, fleet_size).run();
}

} // namespace powerprov

#endif // POWERPROV_ENGINE_DISCRETE_HPP
