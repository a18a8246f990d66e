#ifndef POWERPROV_ENGINE_LOOKAHEAD_HPP
#define POWERPROV_ENGINE_LOOKAHEAD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "powerprov/engine/dispatch.hpp"
#include "powerprov/rng.hpp"
#include "powerprov/trace.hpp"

namespace powerprov {

namespace detail {

/// Replays job-count steps against a stack position; true once the server is popped.
class StackReplay
{
public:
    explicit StackReplay(std::size_t depth) : depth_(depth) {}

    /// Applies a change of the job count by `delta`.
    bool step(int delta)
    {
        for (; delta > 0; --delta) {
            if (depth_ == 0)
                return popped_ = true;
            --depth_;
        }
        depth_ += static_cast<std::size_t>(-delta);
        return false;
    }

    bool popped() const noexcept { return popped_; }

private:
    std::size_t depth_;
    bool popped_ = false;
};

} // namespace detail

/// Predicted job counts on unit cells of [t, t_end]: the cell maximum of a plus relative Gaussian error.
inline std::vector<int> noisy_levels(const CountFunction& a, double t, double t_end, double noise, Rng& rng)
{
    std::vector<int> out;
    for (double c = t; c < t_end; c += 1.0) {
        const double v = a.max_over(c, std::min(c + 1.0, t_end));
        const double guess = std::round(v + noise * v * rng.normal());
        out.push_back(static_cast<int>(std::max(0.0, guess)));
    }
    return out;
}

/**
 * Whether LESF will hand `server` a job during the closed window [t, t + window]
 * (clamped at T), found by replaying the workload against a copy of its stack
 * position. Each arrival pops the top and each departure pushes a server above
 * it. With noise > 0 the replay uses noisy per-cell predictions.
 */
inline bool will_receive_job(const DispatcherState& state, int server, const CountFunction& a, double t, double window,
                             double noise = 0.0, Rng* rng = nullptr)
{
    const auto depth = state.depth(server);
    const double t_end = std::min(t + window, a.horizon());
    if (!depth || !(window > 0.0) || !(t_end > t))
        return false;
    detail::StackReplay replay(*depth);
    if (noise > 0.0 && rng) {
        int level = a.right_limit(t);
        for (int next : noisy_levels(a, t, t_end, noise, *rng)) {
            if (replay.step(next - level))
                return true;
            level = next;
        }
        return false;
    }
    const auto& eps = a.epochs();
    for (std::size_t i = a.epochs_through(t); i < eps.size() && eps[i].time <= t_end; ++i)
        if (replay.step(eps[i].after - eps[i].before))
            return true;
    return false;
}

} // namespace powerprov

#endif // POWERPROV_ENGINE_LOOKAHEAD_HPP
