#ifndef POWERPROV_ENGINE_POLICY_HPP
#define POWERPROV_ENGINE_POLICY_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "powerprov/error.hpp"
#include "powerprov/rng.hpp"

namespace powerprov {

enum class PolicyKind { offline_a0, a1, a2, a3, delayed_off };

constexpr std::string_view to_string(PolicyKind k) noexcept
{
    switch (k) {
    case PolicyKind::offline_a0: return "A0";
    case PolicyKind::a1: return "A1";
    case PolicyKind::a2: return "A2";
    case PolicyKind::a3: return "A3";
    case PolicyKind::delayed_off: return "DelayedOff";
    }
    return "?";
}

inline PolicyKind parse_policy(std::string_view name)
{
    if (name == "A0" || name == "a0" || name == "offline")
        return PolicyKind::offline_a0;
    if (name == "A1" || name == "a1")
        return PolicyKind::a1;
    if (name == "A2" || name == "a2")
        return PolicyKind::a2;
    if (name == "A3" || name == "a3")
        return PolicyKind::a3;
    if (name == "DelayedOff" || name == "delayedoff" || name == "delayed_off")
        return PolicyKind::delayed_off;
    throw ConfigError("unknown policy '" + std::string(name) + "'");
}

struct PolicySpec
{
    PolicyKind kind = PolicyKind::a1;
    /// Lookahead as a fraction of the critical interval.
    double alpha = 0.0;
    /// DelayedOff idle timeout; defaults to the critical interval.
    std::optional<double> t_wait;
    /// Seed of the waiting-time stream for A2/A3 and of DelayedOff's random pick.
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw ConfigError("alpha must lie in [0, 1]");
        if (t_wait && !(*t_wait >= 0.0 && std::isfinite(*t_wait)))
            throw ConfigError("t_wait must be finite and non-negative");
    }
};

struct LookaheadConfig
{
    /// Prediction error std as a fraction of the true load.
    double noise = 0.0;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(noise >= 0.0 && noise <= 0.5))
            throw ConfigError("noise must lie in [0, 0.5]");
    }
};

/// Probability that A3 decides immediately: alpha / (e - 1 + alpha).
inline double a3_atom(double alpha) noexcept
{
    return alpha / (std::numbers::e - 1.0 + alpha);
}

/// Inverse CDF of the density e^{z/L} / ((e-1)L) on [0, L].
inline double exp_density_quantile(double u, double span) noexcept
{
    return span * std::log1p(u * (std::numbers::e - 1.0));
}

/// What an emptied server does: idle for `wait`, then look `window` ahead (or just turn off).
struct EmptyPlan
{
    double wait = 0.0;
    double window = 0.0;
    /// False for DelayedOff: the server turns off after `wait` without looking ahead.
    bool peek = true;
};

/**
 * Waiting time before the lookahead decision for a budget of `span` time
 * units, where `span` is the part of the critical interval not covered by the
 * lookahead window. A1 waits the full span; A2 and A3 randomize it.
 */
inline double sample_wait(PolicyKind kind, double alpha, double span, Rng& rng)
{
    if (!(span > 0.0))
        return 0.0;
    switch (kind) {
    case PolicyKind::a1: return span;
    case PolicyKind::a2: return exp_density_quantile(rng.uniform(), span);
    case PolicyKind::a3: {
        const double p0 = a3_atom(alpha);
        const double u = rng.uniform();
        if (u < p0)
            return 0.0;
        return exp_density_quantile((u - p0) / (1.0 - p0), span);
    }
    default: return 0.0;
    }
}

/// Plan for a server emptied under `policy` with critical interval `delta`.
inline EmptyPlan make_plan(const PolicySpec& policy, double delta, Rng& rng)
{
    switch (policy.kind) {
    case PolicyKind::offline_a0: return {0.0, delta, true};
    case PolicyKind::delayed_off: return {policy.t_wait.value_or(delta), 0.0, false};
    default: {
        const double window = policy.alpha * delta;
        const double span = (1.0 - policy.alpha) * delta;
        return {sample_wait(policy.kind, policy.alpha, span, rng), window, true};
    }
    }
}

} // namespace powerprov

#endif // POWERPROV_ENGINE_POLICY_HPP
