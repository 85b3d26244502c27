#include "sdeim/dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sdeim/ks_solver.hpp"

namespace sdeim
{

std::string_view to_string(SystemTag tag) noexcept
{
    switch (tag) {
    case SystemTag::Lorenz96: return "lorenz96";
    case SystemTag::KS: return "ks";
    case SystemTag::External: return "external";
    }
    return "external";
}

SystemTag parse_system_tag(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "lorenz96" || lower == "lorenz-96") return SystemTag::Lorenz96;
    if (lower == "ks" || lower == "kuramoto-sivashinsky") return SystemTag::KS;
    if (lower == "external") return SystemTag::External;
    throw Error(ErrorKind::Config, "unknown system '" + std::string(text) + "'");
}

void TrajectoryMatrix::validate() const
{
    if (states.rows() < 1) {
        throw Error(ErrorKind::InvalidInput, "trajectory has no state components");
    }
    if (states.cols() < 2) {
        throw Error(ErrorKind::InvalidInput, "trajectory needs at least two snapshots");
    }
    if (!(dt_sample > 0.0) || !std::isfinite(dt_sample)) {
        throw Error(ErrorKind::InvalidInput, "trajectory dt_sample must be positive");
    }
}

Index SystemConfig::steps_per_sample() const
{
    if (!(dt_internal > 0.0) || !(dt_sample > 0.0)) {
        throw Error(ErrorKind::Config, "time steps must be positive");
    }
    const double ratio = dt_sample / dt_internal;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        std::ostringstream msg;
        msg << "dt_sample " << dt_sample << " is not an integer multiple of dt_internal "
            << dt_internal;
        throw Error(ErrorKind::Config, msg.str());
    }
    return static_cast<Index>(rounded);
}

void SystemConfig::validate() const
{
    static_cast<void>(steps_per_sample());
    if (burn_in < 0.0) throw Error(ErrorKind::Config, "burn_in must be non-negative");
    switch (system) {
    case SystemTag::Lorenz96:
        if (dimension < 4) {
            throw Error(ErrorKind::Config, "Lorenz-96 requires N >= 4");
        }
        if (!std::isfinite(forcing)) throw Error(ErrorKind::Config, "forcing must be finite");
        break;
    case SystemTag::KS:
        if (dimension < 4 || (dimension & (dimension - 1)) != 0) {
            throw Error(ErrorKind::Config, "KS requires N to be a power of two (>= 4)");
        }
        if (!(domain_length > 0.0)) throw Error(ErrorKind::Config, "KS requires L > 0");
        break;
    case SystemTag::External:
        if (dimension < 1) throw Error(ErrorKind::Config, "N must be positive");
        break;
    }
}

SystemConfig SystemConfig::lorenz96()
{
    SystemConfig cfg;
    cfg.system = SystemTag::Lorenz96;
    cfg.dimension = 40;
    cfg.forcing = 4.0;
    cfg.dt_internal = 0.01;
    cfg.dt_sample = 0.25;
    return cfg;
}

SystemConfig SystemConfig::kuramoto_sivashinsky()
{
    SystemConfig cfg;
    cfg.system = SystemTag::KS;
    cfg.dimension = 128;
    cfg.domain_length = 22.0;
    cfg.dt_internal = 0.05;
    cfg.dt_sample = 0.2;
    return cfg;
}

Vector lorenz96_rhs(const Vector &u, double forcing)
{
    const Index n = u.size();
    if (n < 4) throw Error(ErrorKind::InvalidInput, "Lorenz-96 requires N >= 4");
    Vector du(n);
    for (Index i = 0; i < n; ++i) {
        const double up1 = u[(i + 1) % n];
        const double um1 = u[(i + n - 1) % n];
        const double um2 = u[(i + n - 2) % n];
        du[i] = -u[i] + (up1 - um2) * um1 + forcing;
    }
    return du;
}

namespace
{

Index sample_count(const SystemConfig &cfg, double duration)
{
    if (!(duration >= cfg.dt_sample * (1.0 - 1e-12))) {
        throw Error(ErrorKind::InvalidInput, "integration time must be at least dt_sample");
    }
    return static_cast<Index>(std::floor(duration / cfg.dt_sample + 1e-9)) + 1;
}

[[noreturn]] void throw_divergence(double time)
{
    std::ostringstream msg;
    msg << "non-finite state encountered at t = " << time;
    throw DivergenceError(time, msg.str());
}

void check_finite(const Vector &u, double time)
{
    if (!u.allFinite()) throw_divergence(time);
}

class Rk4Lorenz96
{
    public:
    Rk4Lorenz96(double forcing, double dt) : m_forcing(forcing), m_dt(dt) {}

    void step(Vector &u)
    {
        k1 = lorenz96_rhs(u, m_forcing);
        tmp = u + 0.5 * m_dt * k1;
        k2 = lorenz96_rhs(tmp, m_forcing);
        tmp = u + 0.5 * m_dt * k2;
        k3 = lorenz96_rhs(tmp, m_forcing);
        tmp = u + m_dt * k3;
        k4 = lorenz96_rhs(tmp, m_forcing);
        u += (m_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    private:
    double m_forcing;
    double m_dt;
    Vector k1, k2, k3, k4, tmp;
};

} // namespace

TrajectoryMatrix integrate_lorenz96(const SystemConfig &cfg, const Vector &u0,
                                    double duration, double t0)
{
    cfg.validate();
    if (u0.size() != cfg.dimension) {
        throw Error(ErrorKind::InvalidInput, "initial state has wrong dimension");
    }
    const Index columns = sample_count(cfg, duration);
    const Index substeps = cfg.steps_per_sample();

    TrajectoryMatrix traj;
    traj.states.resize(cfg.dimension, columns);
    traj.t0 = t0;
    traj.dt_sample = cfg.dt_sample;
    traj.system = SystemTag::Lorenz96;

    Rk4Lorenz96 stepper(cfg.forcing, cfg.dt_internal);
    Vector u = u0;
    check_finite(u, t0);
    traj.states.col(0) = u;
    for (Index j = 1; j < columns; ++j) {
        for (Index s = 0; s < substeps; ++s) stepper.step(u);
        check_finite(u, traj.time(j));
        traj.states.col(j) = u;
    }
    return traj;
}

TrajectoryMatrix integrate_ks(const SystemConfig &cfg, const Vector &u0,
                              double duration, double t0)
{
    cfg.validate();
    if (cfg.system != SystemTag::KS) {
        throw Error(ErrorKind::Config, "integrate_ks needs a KS configuration");
    }
    if (u0.size() != cfg.dimension) {
        throw Error(ErrorKind::InvalidInput, "initial state has wrong dimension");
    }
    check_finite(u0, t0);
    const Index columns = sample_count(cfg, duration);
    const Index substeps = cfg.steps_per_sample();

    TrajectoryMatrix traj;
    traj.states.resize(cfg.dimension, columns);
    traj.t0 = t0;
    traj.dt_sample = cfg.dt_sample;
    traj.system = SystemTag::KS;

    KsSolver solver(cfg.dimension, cfg.domain_length, cfg.dt_internal);
    solver.set_state(u0);
    traj.states.col(0) = u0;
    for (Index j = 1; j < columns; ++j) {
        solver.step(substeps);
        const auto &v = solver.spectrum();
        const bool finite = std::all_of(v.begin(), v.end(), [](const auto &c) {
            return std::isfinite(c.real()) && std::isfinite(c.imag());
        });
        if (!finite) throw_divergence(traj.time(j));
        traj.states.col(j) = solver.state();
    }
    return traj;
}

TrajectoryMatrix integrate(const SystemConfig &cfg, const Vector &u0,
                           double duration, double t0)
{
    switch (cfg.system) {
    case SystemTag::Lorenz96: return integrate_lorenz96(cfg, u0, duration, t0);
    case SystemTag::KS: return integrate_ks(cfg, u0, duration, t0);
    case SystemTag::External: break;
    }
    throw Error(ErrorKind::Config, "external systems cannot be simulated");
}

Vector ks_grid(const SystemConfig &cfg)
{
    const double h = cfg.domain_length / static_cast<double>(cfg.dimension);
    Vector x(cfg.dimension);
    for (Index j = 0; j < cfg.dimension; ++j) {
        x[j] = -0.5 * cfg.domain_length + static_cast<double>(j) * h;
    }
    return x;
}

Vector random_initial_condition(const SystemConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    Vector u(cfg.dimension);
    switch (cfg.system) {
    case SystemTag::Lorenz96:
        for (Index i = 0; i < cfg.dimension; ++i) u[i] = cfg.forcing + unit(rng);
        break;
    case SystemTag::KS: {
        // Zero-mean combination of the four longest waves, amplitude <= 0.1 each.
        const Vector x = ks_grid(cfg);
        u.setZero();
        for (int k = 1; k <= 4; ++k) {
            const double a = 0.1 * unit(rng);
            const double b = 0.1 * unit(rng);
            const double w = 2.0 * std::numbers::pi * k / cfg.domain_length;
            u += (a * (w * x.array()).cos() + b * (w * x.array()).sin()).matrix();
        }
        break;
    }
    case SystemTag::External:
        throw Error(ErrorKind::Config, "external systems have no initial condition");
    }

    if (cfg.burn_in > 0.0) {
        // Burn in with a single stored sample at the end so the result does
        // not depend on dt_sample.
        SystemConfig burn = cfg;
        const Index steps = std::max<Index>(
            1, static_cast<Index>(std::llround(cfg.burn_in / cfg.dt_internal)));
        burn.dt_sample = static_cast<double>(steps) * cfg.dt_internal;
        const TrajectoryMatrix traj = integrate(burn, u, burn.dt_sample);
        u = traj.states.col(traj.snapshot_count() - 1);
    }
    return u;
}

} // namespace sdeim
