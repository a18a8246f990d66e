#ifndef POWERPROV_ERROR_HPP
#define POWERPROV_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace powerprov {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Error tied to a line of an input document (1-based; 0 when no line applies).
class RowError : public Error
{
public:
    RowError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row)
    {
    }

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class MalformedTrace : public RowError
{
public:
    using RowError::RowError;
};

class SimultaneousEvents : public RowError
{
public:
    explicit SimultaneousEvents(std::size_t row)
        : RowError("two events share a timestamp", row)
    {
    }
};

class UnknownJob : public RowError
{
public:
    UnknownJob(const std::string& job, std::size_t row)
        : RowError("departure of unknown job '" + job + "'", row)
    {
    }
};

class ZeroMean : public Error
{
public:
    ZeroMean() : Error("trace has zero mean load") {}
};

/// A requested peak-to-mean ratio cannot be produced from the given shape.
class Unreachable : public Error
{
public:
    using Error::Error;
};

class InvalidTarget : public Error
{
public:
    using Error::Error;
};

/// A schedule violates x(t) >= a(t) or the boundary conditions.
class Infeasible : public Error
{
public:
    Infeasible(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time)), time_(time)
    {
    }

    double time() const noexcept { return time_; }

private:
    double time_;
};

class CapExceeded : public Error
{
public:
    using Error::Error;
};

class NotACriticalSegment : public Error
{
public:
    using Error::Error;
};

class FleetExhausted : public Error
{
public:
    explicit FleetExhausted(double time)
        : Error("no server available for arrival at t=" + std::to_string(time)), time_(time)
    {
    }

    double time() const noexcept { return time_; }

private:
    double time_;
};

class InvalidRange : public Error
{
public:
    using Error::Error;
};

/// Bad configuration: unknown keys, wrong types, out-of-range parameters.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace powerprov

#endif // POWERPROV_ERROR_HPP
