#ifndef POWERPROV_RATIO_HPP
#define POWERPROV_RATIO_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"

namespace powerprov {

/**
 * Optimal randomized ratio for slotted ski rental with lookahead.
 *
 * The critical interval spans `b` slots and the lookahead `k` of them.
 * `p[i - 1]` is the probability of turning off at slot i, for i = 1..b-k.
 */
struct SlottedRatio
{
    long b = 2;
    long k = 0;
    double c = 1.0;
    std::vector<double> p;
};

/// Closed-form vertex of the slotted ratio LP. k >= b - 1 gives c = 1 with all mass on slot 1.
inline SlottedRatio closed_form(long b, long k)
{
    if (b < 2 || k < 0)
        throw InvalidRange("closed_form needs b >= 2 and k >= 0");
    SlottedRatio out{b, k, 1.0, {1.0}};
    if (k >= b - 1)
        return out;
    const long n = b - k;
    const double log_r = std::log1p(-1.0 / static_cast<double>(n));
    const double r_top = std::exp(static_cast<double>(n - 1) * log_r);
    out.c = 1.0 / (1.0 - r_top * static_cast<double>(n - 1) / static_cast<double>(b));
    out.p.assign(static_cast<std::size_t>(n), 0.0);
    for (long i = 0; i < n - 1; ++i)
        out.p[static_cast<std::size_t>(n - i - 1)] = out.c / static_cast<double>(n) * std::exp(static_cast<double>(i) * log_r);
    out.p[0] = r_top * static_cast<double>(k + 1) / static_cast<double>(b) * out.c;
    return out;
}

struct Feasibility
{
    bool feasible = true;
    /// Every equality-required constraint holds with zero slack.
    bool tight = true;
    /// Name of the first violated (or, if all hold, first slack) constraint.
    std::optional<std::string> first_issue;
    double worst_violation = 0.0;
    double worst_slack = 0.0;
};

namespace detail {

/// Left sides of the constraint for an empty period of D slots, via prefix sums.
class RatioConstraints
{
public:
    explicit RatioConstraints(const SlottedRatio& sr) : sr_(sr), cost_(sr.p.size() + 1, 0.0), mass_(sr.p.size() + 1, 0.0)
    {
        KahanSum cost, mass;
        for (std::size_t idx = 0; idx < sr.p.size(); ++idx) {
            // Turned off at slot i: pays b + i - 1 if the period outlasts the lookahead from slot i.
            cost += static_cast<double>(sr.b + static_cast<long>(idx)) * sr.p[idx];
            mass += sr.p[idx];
            cost_[idx + 1] = cost.value();
            mass_[idx + 1] = mass.value();
        }
    }

    double lhs(long d) const
    {
        const long n = static_cast<long>(sr_.p.size());
        const auto m = static_cast<std::size_t>(std::clamp(d - sr_.k, 0L, n));
        return cost_[m] + static_cast<double>(d) * (mass_.back() - mass_[m]);
    }

    double rhs(long d) const { return sr_.c * static_cast<double>(std::min(d, sr_.b)); }

private:
    const SlottedRatio& sr_;
    std::vector<double> cost_;
    std::vector<double> mass_;
};

} // namespace detail

/**
 * Checks the finite constraint system: D = 0..k (slack by design), D = k+1..b-1
 * and D >= b (all tight at the optimum), normalization, positivity, plus the
 * D = b..2b-k-1 range of the unreduced system.
 */
inline Feasibility verify_feasible(const SlottedRatio& given, double tol = 1e-9)
{
    // A window of b - 1 slots already sees every decision that matters.
    SlottedRatio sr = given;
    sr.k = std::min(sr.k, sr.b - 1);
    Feasibility out;
    auto fail = [&](const std::string& name, double amount) {
        if (out.feasible)
            out.first_issue = name;
        out.feasible = false;
        out.tight = false;
        out.worst_violation = std::max(out.worst_violation, amount);
    };
    auto slack = [&](const std::string& name, double amount) {
        if (out.tight && out.feasible)
            out.first_issue = name;
        out.tight = false;
        out.worst_slack = std::max(out.worst_slack, amount);
    };

    KahanSum total;
    for (std::size_t i = 0; i < sr.p.size(); ++i) {
        total += sr.p[i];
        if (sr.p[i] < -tol)
            fail("P_" + std::to_string(i + 1) + " >= 0", -sr.p[i]);
    }
    if (std::fabs(total.value() - 1.0) > tol)
        fail("sum P = 1", std::fabs(total.value() - 1.0));

    const bool trivial = sr.k >= sr.b - 1;
    const detail::RatioConstraints cons(sr);
    for (long d = 0; d <= 2 * sr.b - sr.k - 1; ++d) {
        const double lhs = cons.lhs(d);
        const double rhs = cons.rhs(d);
        const std::string name = "D=" + std::to_string(d);
        const double scale = std::max(1.0, std::fabs(rhs));
        if (lhs - rhs > tol * scale) {
            fail(name, (lhs - rhs) / scale);
            continue;
        }
        const bool must_be_tight = !trivial && d > sr.k && d <= sr.b;
        if (must_be_tight && rhs - lhs > tol * scale)
            slack(name, (rhs - lhs) / scale);
    }
    return out;
}

/// Continuous-time limit of the slotted ratio with k / b -> alpha.
inline double limit_ratio(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidRange("alpha must lie in [0, 1]");
    return std::numbers::e / (std::numbers::e - 1.0 + alpha);
}

} // namespace powerprov

#endif // POWERPROV_RATIO_HPP
