#ifndef POWERPROV_ENGINE_ANALYTIC_HPP
#define POWERPROV_ENGINE_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

#include "powerprov/cost.hpp"
#include "powerprov/engine/policy.hpp"
#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"
#include "powerprov/rng.hpp"

namespace powerprov {

/**
 * Expected online cost, in time units of idle power, of one empty period of
 * length `t_empty` for A1/A2/A3 (the busy part is excluded).
 */
inline double expected_empty_cost(PolicyKind kind, double t_empty, double alpha, double delta)
{
    const double e = std::numbers::e;
    const double window = alpha * delta;
    const double span = (1.0 - alpha) * delta;
    if (t_empty <= window)
        return t_empty;
    switch (kind) {
    case PolicyKind::a1: return t_empty <= delta ? t_empty : span + delta;
    case PolicyKind::a2:
        return t_empty <= delta ? (e * t_empty - window) / (e - 1.0) : delta + span / (e - 1.0);
    case PolicyKind::a3: {
        const double p0 = a3_atom(alpha);
        if (t_empty <= delta)
            return p0 * delta + (1.0 - p0) * (e * t_empty - window) / (e - 1.0);
        return delta + (1.0 - p0) * span / (e - 1.0);
    }
    default: throw ConfigError("analytic ratios exist for A1, A2 and A3 only");
    }
}

/// E[online] / offline for one busy period of length t_busy followed by an empty period of length t_empty.
inline double analytic_expected_ratio(PolicyKind kind, double t_empty, double t_busy, double alpha, const CostModel& m)
{
    m.validate();
    if (!(t_empty >= 0.0) || !(t_busy >= 0.0))
        throw ConfigError("period lengths must be non-negative");
    const double delta = m.delta();
    const double offline = t_busy + std::min(t_empty, delta);
    const double online = t_busy + expected_empty_cost(kind, t_empty, alpha, delta);
    return offline > 0.0 ? online / offline : 1.0;
}

struct MonteCarloEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sampled counterpart of analytic_expected_ratio using the engine's waiting-time sampler.
inline MonteCarloEstimate monte_carlo_ratio(PolicyKind kind, double t_empty, double t_busy, double alpha,
                                            const CostModel& m, std::size_t samples, std::uint64_t seed)
{
    m.validate();
    if (samples < 2)
        throw ConfigError("need at least two samples");
    if (kind != PolicyKind::a1 && kind != PolicyKind::a2 && kind != PolicyKind::a3)
        throw ConfigError("Monte-Carlo ratios exist for A1, A2 and A3 only");
    const double delta = m.delta();
    const double offline = m.power * (t_busy + std::min(t_empty, delta));
    PolicySpec spec{kind, alpha, std::nullopt, seed};
    spec.validate();
    Rng rng(seed);
    // Welford update keeps a constant sample at exactly zero variance.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const EmptyPlan plan = make_plan(spec, delta, rng);
        const double idle = t_empty <= plan.wait + plan.window ? m.power * t_empty : m.power * plan.wait + m.beta();
        const double online = m.power * t_busy + idle;
        const double r = offline > 0.0 ? online / offline : 1.0;
        const double d = r - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (r - mean);
    }
    const double n = static_cast<double>(samples);
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

} // namespace powerprov

#endif // POWERPROV_ENGINE_ANALYTIC_HPP
