#ifndef POWERPROV_ENGINE_SIMULATE_HPP
#define POWERPROV_ENGINE_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "powerprov/cost.hpp"
#include "powerprov/engine/dispatch.hpp"
#include "powerprov/engine/lookahead.hpp"
#include "powerprov/engine/policy.hpp"
#include "powerprov/engine/result.hpp"
#include "powerprov/rng.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

namespace detail {

struct Timer
{
    double time = 0.0;
    std::uint64_t seq = 0;
    int server = -1;
    std::uint64_t generation = 0;

    bool operator>(const Timer& o) const noexcept { return time != o.time ? time > o.time : seq > o.seq; }
};

class ContinuousSim
{
public:
    ContinuousSim(const EventTrace& trace, const CostModel& m, const PolicySpec& policy, const LookaheadConfig& look,
                  int fleet_size)
        : trace_(trace), a_(trace), m_(m), policy_(policy), look_(look),
          state_(fleet_size > 0 ? fleet_size : a_.peak(), trace.initial_jobs),
          generation_(static_cast<std::size_t>(state_.fleet_size()), 0),
          plan_rng_(derive_seed(policy.seed, 1)), pick_rng_(derive_seed(policy.seed, 2)),
          noise_rng_(derive_seed(look.seed, 3))
    {
    }

    SimResult run()
    {
        for (const auto& id : trace_.initial_jobs) {
            open_[id] = result_.jobs.size();
            result_.jobs.push_back({*state_.server_of(id), id, 0.0, std::nullopt});
        }
        for (const auto& ev : trace_.events) {
            fire_timers_before(ev.time, false);
            handle(ev);
        }
        const double horizon = a_.horizon();
        fire_timers_before(horizon, true);
        for (int id = 0; id < state_.fleet_size(); ++id)
            if (state_.server(id).state == ServerState::idle) {
                state_.turn_off(id);
                ledger_.off(horizon);
            }
        result_.fleet_size = state_.fleet_size();
        ledger_.finish(result_, horizon, a_.initial(), m_);
        return std::move(result_);
    }

private:
    void handle(const TraceEvent& ev)
    {
        const bool lesf = policy_.kind != PolicyKind::delayed_off;
        const auto out = lesf ? dispatch_lesf(state_, ev) : dispatch_delayedoff(state_, ev, pick_rng_);
        ++generation_[static_cast<std::size_t>(out.server)];
        if (ev.kind == EventKind::arrival) {
            if (out.turned_on)
                ledger_.on(ev.time);
            open_[ev.job_id] = result_.jobs.size();
            result_.jobs.push_back({out.server, ev.job_id, ev.time, std::nullopt});
            return;
        }
        auto it = open_.find(ev.job_id);
        result_.jobs[it->second].released = ev.time;
        open_.erase(it);
        emptied(out.server, ev.time);
    }

    void emptied(int server, double t)
    {
        const EmptyPlan plan = make_plan(policy_, m_.delta(), plan_rng_);
        if (plan.wait > 0.0 || !plan.peek)
            schedule(server, t + plan.wait);
        else
            decide(server, t);
    }

    void schedule(int server, double t)
    {
        if (t <= a_.horizon())
            timers_.push({t, seq_++, server, generation_[static_cast<std::size_t>(server)]});
    }

    void fire_timers_before(double t, bool inclusive)
    {
        while (!timers_.empty() && (timers_.top().time < t || (inclusive && timers_.top().time == t))) {
            const Timer tm = timers_.top();
            timers_.pop();
            if (tm.generation != generation_[static_cast<std::size_t>(tm.server)]
                || state_.server(tm.server).state != ServerState::idle)
                continue;
            if (policy_.kind == PolicyKind::delayed_off)
                turn_off(tm.server, tm.time);
            else
                decide(tm.server, tm.time);
        }
    }

    void decide(int server, double t)
    {
        const bool exact = policy_.kind == PolicyKind::offline_a0;
        const double window = exact ? m_.delta() : policy_.alpha * m_.delta();
        const bool coming = will_receive_job(state_, server, a_, t, window, exact ? 0.0 : look_.noise, &noise_rng_);
        result_.decisions.push_back({server, state_.server(server).idle_since, t, coming});
        if (coming)
            schedule(server, t + window);
        else
            turn_off(server, t);
    }

    void turn_off(int server, double t)
    {
        state_.turn_off(server);
        ledger_.off(t);
    }

    const EventTrace& trace_;
    CountFunction a_;
    CostModel m_;
    PolicySpec policy_;
    LookaheadConfig look_;
    DispatcherState state_;
    std::vector<std::uint64_t> generation_;
    Rng plan_rng_;
    Rng pick_rng_;
    Rng noise_rng_;
    std::priority_queue<Timer, std::vector<Timer>, std::greater<Timer>> timers_;
    std::uint64_t seq_ = 0;
    std::unordered_map<std::string, std::size_t> open_;
    ToggleLedger ledger_;
    SimResult result_;
};

} // namespace detail

/**
 * Event-driven simulation of a brick workload under one provisioning policy.
 *
 * Job events at a time are handled before timers due at the same time. At T
 * every idle server is switched off so that x(T) matches the final job count.
 * `fleet_size` 0 means the peak job count.
 */
inline SimResult run(const EventTrace& trace, const CostModel& m, const PolicySpec& policy,
                     const LookaheadConfig& look = {}, int fleet_size = 0)
{
    validate(trace);
    m.validate();
    policy.validate();
    look.validate();
    return detail::ContinuousSim(trace, m, policy, look, fleet_size).run();
}

} // namespace powerprov

#endif // POWERPROV_ENGINE_SIMULATE_HPP
