#ifndef POWERPROV_IO_HPP
#define POWERPROV_IO_HPP

// JSON views of the library types. Requires nlohmann/json (vendored as json.hpp).

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "powerprov/cost.hpp"
#include "powerprov/engine/result.hpp"
#include "powerprov/error.hpp"
#include "powerprov/offline.hpp"
#include "powerprov/ratio.hpp"
#include "powerprov/segments.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw IoError("cannot write '" + path + "'");
}

/// Throws ConfigError if `obj` is not an object or has keys outside `allowed`.
inline void require_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    if (!obj.is_object())
        throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed)
            ok |= key == a;
        if (!ok)
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

inline double number_field(const Json& obj, std::string_view key, double fallback)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_number())
        throw ConfigError("'" + std::string(key) + "' must be a number");
    return it->get<double>();
}

inline CostModel cost_model_from_json(const Json& j)
{
    require_keys(j, {"power", "beta_on", "beta_off"}, "cost model");
    CostModel m;
    m.power = number_field(j, "power", m.power);
    m.beta_on = number_field(j, "beta_on", m.beta_on);
    m.beta_off = number_field(j, "beta_off", m.beta_off);
    m.validate();
    return m;
}

inline Json to_json(const CostModel& m)
{
    return {{"power", m.power}, {"beta_on", m.beta_on}, {"beta_off", m.beta_off}, {"delta", m.delta()}};
}

inline Json to_json(const CostBreakdown& b)
{
    return {{"energy", b.energy}, {"turn_on", b.turn_on}, {"turn_off", b.turn_off}, {"total", b.total}};
}

inline Json to_json(const StepSchedule& x)
{
    Json bps = Json::array();
    for (const auto& b : x.breakpoints())
        bps.push_back({{"time", b.time}, {"value", b.value}});
    return {{"horizon", x.horizon()}, {"initial", x.initial()}, {"breakpoints", std::move(bps)}};
}

/// Schedule as `time,value` rows, starting with the value at 0.
inline std::string schedule_csv(const StepSchedule& x)
{
    std::string out = "time,value\n0," + std::to_string(x.initial()) + "\n";
    for (const auto& b : x.breakpoints())
        out += format_double(b.time) + "," + std::to_string(b.value) + "\n";
    return out;
}

inline Json to_json(const CriticalDecomposition& d)
{
    Json segs = Json::array();
    for (const auto& s : d.segments)
        segs.push_back({{"start", s.start}, {"end", s.end}, {"type", to_string(s.type)}, {"anchor", s.anchor}});
    return {{"critical_times", d.critical_times}, {"segments", std::move(segs)}};
}

inline std::string decomposition_csv(const CriticalDecomposition& d)
{
    std::string out = "start,end,type,anchor\n";
    for (const auto& s : d.segments)
        out += format_double(s.start) + "," + format_double(s.end) + "," + std::string(to_string(s.type)) + ","
               + std::to_string(s.anchor) + "\n";
    return out;
}

inline Json to_json(const OptimalSchedule& o)
{
    return {{"total", o.total},
            {"breakdown", to_json(o.breakdown)},
            {"segment_costs", o.segment_costs},
            {"decomposition", to_json(o.decomposition)},
            {"schedule", to_json(o.schedule)}};
}

inline Json to_json(const SimResult& r)
{
    Json jobs = Json::array();
    for (const auto& j : r.jobs) {
        Json row = {{"server", j.server}, {"job", j.job}, {"assigned", j.assigned}, {"released", nullptr}};
        if (j.released)
            row["released"] = *j.released;
        jobs.push_back(std::move(row));
    }
    Json decisions = Json::array();
    for (const auto& d : r.decisions)
        decisions.push_back({{"server", d.server},
                             {"emptied", d.emptied},
                             {"decided", d.decided},
                             {"action", d.stay_idle ? "idle" : "off"}});
    return {{"breakdown", to_json(r.breakdown)},
            {"fleet_size", r.fleet_size},
            {"turn_ons", r.turn_ons},
            {"turn_offs", r.turn_offs},
            {"migration_count", r.migration_count},
            {"schedule", to_json(r.schedule)},
            {"jobs", std::move(jobs)},
            {"decisions", std::move(decisions)}};
}

/// Per-server job log as `server,job,assigned,released` rows.
inline std::string job_log_csv(const SimResult& r)
{
    std::string out = "server,job,assigned,released\n";
    for (const auto& j : r.jobs)
        out += std::to_string(j.server) + "," + j.job + "," + format_double(j.assigned) + ","
               + (j.released ? format_double(*j.released) : std::string()) + "\n";
    return out;
}

inline Json to_json(const SlottedRatio& sr, bool with_probabilities)
{
    Json j = {{"b", sr.b}, {"k", sr.k}, {"c", sr.c}};
    if (with_probabilities)
        j["p"] = sr.p;
    return j;
}

inline Json to_json(const FluidTrace& t)
{
    return {{"slot_duration", t.slot_duration}, {"loads", t.loads}};
}

inline Json to_json(const EventTrace& t)
{
    Json events = Json::array();
    for (const auto& e : t.events)
        events.push_back({{"time", e.time},
                          {"event", e.kind == EventKind::arrival ? "arrive" : "depart"},
                          {"job_id", e.job_id}});
    return {{"horizon", t.horizon}, {"initial_jobs", t.initial_jobs}, {"events", std::move(events)}};
}

} // namespace powerprov

#endif // POWERPROV_IO_HPP
