#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sdeim/error.hpp"

namespace sdeim
{

enum class SystemTag
{
    Lorenz96,
    KS,
    External,
};

std::string_view to_string(SystemTag tag) noexcept;
/// Accepts "lorenz96", "ks" and "external" (case-insensitive).
SystemTag parse_system_tag(std::string_view text);

/// Snapshot matrix sampled uniformly in time. Column j holds the full state at
/// t0 + j * dt_sample.
struct TrajectoryMatrix
{
    Matrix states;
    double t0 = 0.0;
    double dt_sample = 1.0;
    SystemTag system = SystemTag::External;

    [[nodiscard]] Index state_dim() const noexcept { return states.rows(); }
    [[nodiscard]] Index snapshot_count() const noexcept
    {
        return states.cols();
    }
    [[nodiscard]] double time(Index j) const noexcept
    {
        return t0 + static_cast<double>(j) * dt_sample;
    }

    /// Throws InvalidInput unless N >= 1, M >= 2 and dt_sample > 0.
    void validate() const;
};

struct SystemConfig
{
    SystemTag system = SystemTag::Lorenz96;
    Index dimension = 40;
    double forcing = 4.0;        // Lorenz-96 F
    double domain_length = 22.0; // KS L
    double dt_internal = 0.01;
    double dt_sample = 0.25;
    /// Time integrated from the random initial state before sampling starts.
    double burn_in = 50.0;
    std::uint64_t seed = 0;

    /// Internal steps per stored sample. Throws Config if dt_sample is not an
    /// integer multiple of dt_internal.
    [[nodiscard]] Index steps_per_sample() const;

    /// Throws Config on any violated invariant.
    void validate() const;

    static SystemConfig lorenz96();
    static SystemConfig kuramoto_sivashinsky();
};

/// du_i/dt = -u_i + (u_{i+1} - u_{i-2}) u_{i-1} + F with cyclic indexing.
Vector lorenz96_rhs(const Vector &u, double forcing);

/// Classical RK4 with step cfg.dt_internal. The first column is u0 and one
/// column is stored every cfg.dt_sample up to t0 + duration.
TrajectoryMatrix integrate_lorenz96(const SystemConfig &cfg, const Vector &u0,
                                    double duration, double t0 = 0.0);

/// Kuramoto-Sivashinsky u_t + u u_x + u_xx + u_xxxx = 0 on [-L/2, L/2],
/// periodic. Fourier collocation with 2/3 dealiasing, ETDRK4 in time.
TrajectoryMatrix integrate_ks(const SystemConfig &cfg, const Vector &u0,
                              double duration, double t0 = 0.0);

/// Dispatches on cfg.system. External systems cannot be integrated.
TrajectoryMatrix integrate(const SystemConfig &cfg, const Vector &u0,
                           double duration, double t0 = 0.0);

/// Collocation points x_j = -L/2 + j L / N.
Vector ks_grid(const SystemConfig &cfg);

/// Random state near the attractor: a seeded perturbation of a base state
/// followed by cfg.burn_in time units of integration. Deterministic in seed.
Vector random_initial_condition(const SystemConfig &cfg, std::uint64_t seed);

} // namespace sdeim
