#ifndef POWERPROV_SEGMENTS_HPP
#define POWERPROV_SEGMENTS_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "powerprov/cost.hpp"
#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

enum class SegmentType { I, II, III, IV };

constexpr std::string_view to_string(SegmentType t) noexcept
{
    switch (t) {
    case SegmentType::I: return "I";
    case SegmentType::II: return "II";
    case SegmentType::III: return "III";
    case SegmentType::IV: return "IV";
    }
    return "?";
}

struct Segment
{
    double start = 0.0;
    double end = 0.0;
    SegmentType type = SegmentType::I;
    /// a(start) under the max-of-limits rule.
    int anchor = 0;

    double length() const noexcept { return end - start; }
};

struct CriticalDecomposition
{
    std::vector<double> critical_times;
    std::vector<Segment> segments;
};

struct EpochPair
{
    double departure = 0.0;
    double arrival = 0.0;
    /// Job count at both epochs; the count stays below it strictly in between.
    int level = 0;

    double gap() const noexcept { return arrival - departure; }

    friend bool operator==(const EpochPair&, const EpochPair&) = default;
};

struct EpochPairing
{
    std::vector<EpochPair> pairs;
    std::vector<EpochPair> selected;
};

/// Idling for `length` is at least as cheap as an off/on cycle (ties keep the server idle).
inline bool idling_pays(const CostModel& m, double length) noexcept
{
    return m.power * length <= m.beta() + tolerance * std::max(1.0, m.beta());
}

namespace detail {

/**
 * For every departure epoch, the index of the first later arrival epoch that
 * brings the count back to the departure's pre-event level.
 */
inline std::vector<std::optional<std::size_t>> match_departures(const CountFunction& a)
{
    const auto& eps = a.epochs();
    std::vector<std::optional<std::size_t>> match(eps.size());
    std::vector<std::optional<std::size_t>> pending(static_cast<std::size_t>(a.peak()) + 2);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const auto& e = eps[i];
        if (e.kind == EventKind::departure) {
            pending[static_cast<std::size_t>(e.before)] = i;
        } else if (auto& p = pending[static_cast<std::size_t>(e.after)]) {
            match[*p] = i;
            p.reset();
        }
    }
    return match;
}

/// Range [first, last) of epoch indices with time strictly inside (t0, t1).
inline std::pair<std::size_t, std::size_t> inner_epochs(const CountFunction& a, double t0, double t1)
{
    const std::size_t first = a.epochs_through(t0);
    std::size_t last = first;
    while (last < a.epochs().size() && a.epochs()[last].time < t1)
        ++last;
    return {first, last};
}

/// Min and max of a over the open interval (t0, t1).
inline std::pair<int, int> open_range(const CountFunction& a, double t0, double t1)
{
    int lo = a.right_limit(t0), hi = lo;
    const auto [first, last] = inner_epochs(a, t0, t1);
    for (std::size_t i = first; i < last; ++i) {
        const auto& e = a.epochs()[i];
        lo = std::min(lo, std::min(e.before, e.after));
        hi = std::max(hi, e.value());
    }
    return {lo, hi};
}

} // namespace detail

/**
 * Shape of a on [start, end] per the four critical-segment types.
 * Type II also requires a to stay below its start level on (end, T].
 */
inline SegmentType classify(const CountFunction& a, double start, double end)
{
    if (!(start < end) || start < 0.0 || end > a.horizon())
        throw NotACriticalSegment("segment bounds must satisfy 0 <= start < end <= T");
    const auto& eps = a.epochs();
    const auto start_epoch = a.epoch_at(start);
    const int level = a.at(start);
    const auto [first, last] = detail::inner_epochs(a, start, end);

    const bool starts_with_departure = start_epoch && eps[*start_epoch].kind == EventKind::departure;
    bool inner_departure = false;
    for (std::size_t i = first; i < last; ++i)
        inner_departure |= eps[i].kind == EventKind::departure;
    if (!starts_with_departure && !inner_departure)
        return SegmentType::I;

    const auto [lo, hi] = detail::open_range(a, start, end);
    const int at_end = a.at(end);

    if (lo == level - 1 && hi == level - 1 && at_end == level - 1) {
        int after = a.right_limit(end);
        for (std::size_t i = a.epochs_through(end); i < eps.size(); ++i)
            after = std::max(after, eps[i].value());
        if (end == a.horizon() || after <= level - 1)
            return SegmentType::II;
    }
    if (at_end == level && hi == level - 1 && lo == level - 1)
        return SegmentType::III;
    if (at_end == level && hi <= level - 1 && lo < level - 1)
        return SegmentType::IV;
    throw NotACriticalSegment("a has none of the four shapes on [" + format_double(start) + ", "
                              + format_double(end) + "]");
}

/// Critical times and classified segments tiling [0, T].
inline CriticalDecomposition decompose(const CountFunction& a)
{
    const auto& eps = a.epochs();
    const double horizon = a.horizon();
    const auto match = detail::match_departures(a);

    CriticalDecomposition out;
    out.critical_times.push_back(0.0);
    // Index of the epoch at the current critical time; none means "treat as arrival".
    std::optional<std::size_t> cur = a.epoch_at(0.0);
    double t = 0.0;
    while (t < horizon) {
        std::optional<std::size_t> next;
        if (!cur || eps[*cur].kind == EventKind::arrival) {
            const std::size_t from = cur ? *cur + 1 : 0;
            for (std::size_t j = from; j < eps.size(); ++j)
                if (eps[j].kind == EventKind::departure) {
                    next = j;
                    break;
                }
        } else if (match[*cur]) {
            next = match[*cur];
        } else if (*cur + 1 < eps.size()) {
            next = *cur + 1;
        }
        const double nt = next ? eps[*next].time : horizon;
        out.segments.push_back({t, nt, classify(a, t, nt), a.at(t)});
        out.critical_times.push_back(nt);
        t = nt;
        cur = next;
    }
    return out;
}

/// Departure/arrival pairs in a canyon segment and the greedy selection of short gaps.
inline EpochPairing pair_epochs(const CountFunction& a, const Segment& segment, const CostModel& m)
{
    if (segment.type != SegmentType::IV)
        throw NotACriticalSegment("epoch pairing applies to type IV segments only");
    const auto& eps = a.epochs();
    const auto match = detail::match_departures(a);
    EpochPairing out;
    double resume = -std::numeric_limits<double>::infinity();
    for (std::size_t i = a.epochs_through(segment.start) - (a.epoch_at(segment.start) ? 1 : 0);
         i < eps.size() && eps[i].time < segment.end; ++i) {
        if (eps[i].kind != EventKind::departure || !match[i])
            continue;
        const EpochPair p{eps[i].time, eps[*match[i]].time, eps[i].before};
        out.pairs.push_back(p);
        if (p.departure > resume && idling_pays(m, p.gap())) {
            out.selected.push_back(p);
            resume = p.arrival;
        }
    }
    return out;
}

} // namespace powerprov

#endif // POWERPROV_SEGMENTS_HPP
