#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sdeim
{

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind
{
    InvalidInput,
    Config,
    Divergence,
    Numerical,
    RankDeficiency,
    AssumptionViolation,
    Regime,
    Parse,
    StaleArtifact,
    State,
    Io,
};

inline const char *to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::RankDeficiency: return "rank deficiency";
    case ErrorKind::AssumptionViolation: return "assumption violation";
    case ErrorKind::Regime: return "regime error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::StaleArtifact: return "stale artifact";
    case ErrorKind::State: return "state error";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

/// Base class of every error raised by the library. The kind drives the CLI
/// exit code.
class Error : public std::runtime_error
{
    public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), m_kind(kind)
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return m_kind; }

    private:
    ErrorKind m_kind;
};

class DivergenceError : public Error
{
    public:
    DivergenceError(double time, const std::string &what)
        : Error(ErrorKind::Divergence, what), m_time(time)
    {
    }

    /// Simulation time at which a non-finite state was first seen.
    [[nodiscard]] double time() const noexcept { return m_time; }

    private:
    double m_time;
};

class RankDeficiencyError : public Error
{
    public:
    RankDeficiencyError(Index usable_rank, const std::string &what)
        : Error(ErrorKind::RankDeficiency, what), m_usable_rank(usable_rank)
    {
    }

    [[nodiscard]] Index usable_rank() const noexcept { return m_usable_rank; }

    private:
    Index m_usable_rank;
};

/// Raised when S_r^T Phi_m does not have full row rank.
class AssumptionViolation : public Error
{
    public:
    AssumptionViolation(Index modes, Index sensors, const std::string &what)
        : Error(ErrorKind::AssumptionViolation, what), m_modes(modes),
          m_sensors(sensors)
    {
    }

    [[nodiscard]] Index modes() const noexcept { return m_modes; }
    [[nodiscard]] Index sensors() const noexcept { return m_sensors; }

    private:
    Index m_modes;
    Index m_sensors;
};

class ParseError : public Error
{
    public:
    ParseError(std::size_t offset, std::size_t line, const std::string &what)
        : Error(ErrorKind::Parse, what), m_offset(offset), m_line(line)
    {
    }

    /// Byte offset into the input where parsing failed.
    [[nodiscard]] std::size_t offset() const noexcept { return m_offset; }
    /// 1-based line number for text inputs, 0 for binary inputs.
    [[nodiscard]] std::size_t line() const noexcept { return m_line; }

    private:
    std::size_t m_offset;
    std::size_t m_line;
};

} // namespace sdeim
