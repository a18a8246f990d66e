#ifndef POWERPROV_NUMERIC_HPP
#define POWERPROV_NUMERIC_HPP

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

namespace powerprov {

/// Slack used for every floating-point comparison of costs and times.
inline constexpr double tolerance = 1e-9;

/// Compensated (Kahan-Babuska) accumulator.
class KahanSum
{
public:
    KahanSum& operator+=(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        return std::to_string(v);
    return std::string(buf, end);
}

/// Strict decimal parse; false on trailing garbage, empty input or non-finite value.
inline bool parse_double(std::string_view text, double& out)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty())
        return false;
    if (text.front() == '+')
        text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

inline bool approx_equal(double a, double b, double tol = tolerance) noexcept
{
    return std::fabs(a - b) <= tol * std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
}

} // namespace powerprov

#endif // POWERPROV_NUMERIC_HPP
