#ifndef POWERPROV_ENGINE_DISPATCH_HPP
#define POWERPROV_ENGINE_DISPATCH_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "powerprov/error.hpp"
#include "powerprov/rng.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

enum class ServerState { off, idle, busy };

struct Server
{
    ServerState state = ServerState::off;
    /// Time the server last became idle; meaningful while idle.
    double idle_since = 0.0;
    std::string job;
};

/// Result of handling one job event.
struct DispatchOutcome
{
    int server = -1;
    /// The arrival had to power the server up.
    bool turned_on = false;
};

/**
 * Server table plus the LIFO stack of non-busy servers.
 *
 * Invariant: the stack holds exactly the idle and off servers. Servers that
 * start busy carry ids 0..a(0)-1; the rest are stacked so that the lowest
 * free id is on top.
 */
class DispatcherState
{
public:
    DispatcherState(int fleet_size, const std::vector<std::string>& initial_jobs)
    {
        const int busy = static_cast<int>(initial_jobs.size());
        if (fleet_size < busy)
            throw FleetExhausted(0.0);
        servers_.resize(static_cast<std::size_t>(fleet_size));
        for (int i = 0; i < busy; ++i) {
            auto& s = servers_[static_cast<std::size_t>(i)];
            s.state = ServerState::busy;
            s.job = initial_jobs[static_cast<std::size_t>(i)];
            where_[s.job] = i;
        }
        for (int id = fleet_size - 1; id >= busy; --id)
            stack_.push_back(id);
    }

    int fleet_size() const noexcept { return static_cast<int>(servers_.size()); }
    const Server& server(int id) const { return servers_.at(static_cast<std::size_t>(id)); }
    const std::vector<Server>& servers() const noexcept { return servers_; }

    /// Non-busy servers, bottom first.
    const std::vector<int>& stack() const noexcept { return stack_; }

    std::optional<int> server_of(const std::string& job) const
    {
        auto it = where_.find(job);
        if (it == where_.end())
            return std::nullopt;
        return it->second;
    }

    /// Number of stacked servers above `id`; nullopt if `id` is busy.
    std::optional<std::size_t> depth(int id) const
    {
        for (std::size_t k = 0; k < stack_.size(); ++k)
            if (stack_[stack_.size() - 1 - k] == id)
                return k;
        return std::nullopt;
    }

    int count(ServerState st) const
    {
        return static_cast<int>(std::count_if(servers_.begin(), servers_.end(),
                                              [st](const Server& s) { return s.state == st; }));
    }

    /// Puts `job` on the non-busy server `id`.
    DispatchOutcome assign(int id, const std::string& job)
    {
        auto& s = servers_.at(static_cast<std::size_t>(id));
        if (s.state == ServerState::busy)
            throw Error("server " + std::to_string(id) + " is already busy");
        const bool turned_on = s.state == ServerState::off;
        s.state = ServerState::busy;
        s.job = job;
        where_[job] = id;
        stack_.erase(std::find(stack_.begin(), stack_.end(), id));
        return {id, turned_on};
    }

    /// Frees the server running `job`; it becomes idle and goes on top of the stack.
    DispatchOutcome release(const std::string& job, double t)
    {
        auto it = where_.find(job);
        if (it == where_.end())
            throw UnknownJob(job, 0);
        const int id = it->second;
        where_.erase(it);
        auto& s = servers_[static_cast<std::size_t>(id)];
        s.state = ServerState::idle;
        s.idle_since = t;
        s.job.clear();
        stack_.push_back(id);
        return {id, false};
    }

    void turn_off(int id)
    {
        auto& s = servers_.at(static_cast<std::size_t>(id));
        if (s.state != ServerState::idle)
            throw Error("only idle servers can be turned off");
        s.state = ServerState::off;
    }

private:
    std::vector<Server> servers_;
    std::vector<int> stack_;
    std::unordered_map<std::string, int> where_;
};

/// Last-empty-server-first: arrivals take the top of the stack, departures push.
inline DispatchOutcome dispatch_lesf(DispatcherState& state, const TraceEvent& ev)
{
    if (ev.kind == EventKind::departure)
        return state.release(ev.job_id, ev.time);
    if (state.stack().empty())
        throw FleetExhausted(ev.time);
    return state.assign(state.stack().back(), ev.job_id);
}

/// Most-recently-busy idle server first, otherwise a uniformly random off server.
inline DispatchOutcome dispatch_delayedoff(DispatcherState& state, const TraceEvent& ev, Rng& rng)
{
    if (ev.kind == EventKind::departure)
        return state.release(ev.job_id, ev.time);
    int best = -1;
    std::vector<int> off;
    for (int id = 0; id < state.fleet_size(); ++id) {
        const auto& s = state.server(id);
        if (s.state == ServerState::idle) {
            if (best < 0 || s.idle_since >= state.server(best).idle_since)
                best = id;
        } else if (s.state == ServerState::off) {
            off.push_back(id);
        }
    }
    if (best < 0) {
        if (off.empty())
            throw FleetExhausted(ev.time);
        best = off[rng.index(off.size())];
    }
    return state.assign(best, ev.job_id);
}

} // namespace powerprov

#endif // POWERPROV_ENGINE_DISPATCH_HPP
