#ifndef POWERPROV_ENGINE_RESULT_HPP
#define POWERPROV_ENGINE_RESULT_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "powerprov/cost.hpp"

namespace powerprov {

/// One stay of a job on a server. `released` is empty if the job outlives T.
struct JobLog
{
    int server = -1;
    std::string job;
    double assigned = 0.0;
    std::optional<double> released;
};

/// Outcome of the idle-or-off rule for an emptied server.
struct Decision
{
    int server = -1;
    double emptied = 0.0;
    double decided = 0.0;
    bool stay_idle = false;
};

struct SimResult
{
    CostBreakdown breakdown;
    StepSchedule schedule;
    std::vector<JobLog> jobs;
    std::vector<Decision> decisions;
    int fleet_size = 0;
    long turn_ons = 0;
    long turn_offs = 0;
    /// Jobs never move between servers.
    int migration_count = 0;
};

namespace detail {

/// Accumulates on/off transitions of the fleet into a schedule and a cost breakdown.
class ToggleLedger
{
public:
    void on(double t)
    {
        changes_.emplace_back(t, +1);
        ++ons_;
    }

    void off(double t)
    {
        changes_.emplace_back(t, -1);
        ++offs_;
    }

    void finish(SimResult& out, double horizon, int initial, const CostModel& m) const
    {
        out.schedule = StepSchedule::from_changes(horizon, initial, changes_);
        out.turn_ons = ons_;
        out.turn_offs = offs_;
        out.breakdown = make_breakdown(m.power * integrate(out.schedule), m.beta_on * static_cast<double>(ons_),
                                       m.beta_off * static_cast<double>(offs_));
    }

private:
    std::vector<std::pair<double, int>> changes_;
    long ons_ = 0;
    long offs_ = 0;
};

} // namespace detail

} // namespace powerprov

#endif // POWERPROV_ENGINE_RESULT_HPP
