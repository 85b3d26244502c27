#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sdeim/dynamics.hpp"
#include "sdeim/reservoir.hpp"

namespace sdeim
{

struct Horizons
{
    double pod = 1000.0;
    double train = 2500.0;
    double test = 200.0;
};

struct Seeds
{
    std::uint64_t pod_traj = 1;
    std::uint64_t train_traj = 2;
    std::uint64_t test_traj = 3;
    std::uint64_t reservoir = 4;
    std::uint64_t noise = 5;
};

/// Snapshot files used instead of simulation when system = external.
struct ExternalData
{
    std::string pod;
    std::string train;
    std::string test;
};

struct ExperimentConfig
{
    SystemConfig system = SystemConfig::lorenz96();
    Index modes = 20;
    Index sensors = 10;
    double noise_fraction = 0.05;
    Horizons horizons;
    ReservoirParams reservoir; // seed comes from seeds.reservoir
    Index washout = 100;
    /// Train the readout on observations carrying the same noise as the test.
    bool noisy_training = true;
    /// Replace the reservoir output by the optimal kernel coordinates.
    bool oracle_kernel = false;
    /// Leading time excluded from the post-transient statistics.
    double transient = 5.0;
    Seeds seeds;
    ExternalData external;
    std::filesystem::path output_dir = "out";

    /// Throws Config on violated invariants (r < m <= N, horizons >= dt ...).
    void validate() const;

    [[nodiscard]] ReservoirParams reservoir_params() const;

    static ExperimentConfig lorenz96();
    static ExperimentConfig kuramoto_sivashinsky();
    /// Preset for the given system tag (External starts from Lorenz-96 values
    /// with system switched to External).
    static ExperimentConfig preset(SystemTag tag);
};

/// Applies an INI document on top of `base`. Sections: [system], [experiment],
/// [horizons], [reservoir], [seeds], [external], [output]. Unknown keys are
/// rejected.
ExperimentConfig apply_config_text(const std::string &ini_text, ExperimentConfig base);

/// Reads an INI file, choosing the preset from its [system] type (or
/// `fallback` when absent) before applying the file's values.
ExperimentConfig load_config(const std::filesystem::path &path,
                             std::optional<SystemTag> fallback = std::nullopt);

/// System type named in an INI document, if any.
std::optional<SystemTag> config_system_type(const std::string &ini_text);

nlohmann::ordered_json to_json(const ExperimentConfig &config);

/// Hash of every field that shapes the offline artifacts.
std::string offline_fingerprint(const ExperimentConfig &config);

} // namespace sdeim
