#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sdeim/estimator.hpp"
#include "sdeim/reservoir.hpp"

namespace sdeim
{

/// Everything the online stage needs, tagged with the fingerprint of the
/// configuration that produced it.
struct OfflineArtifacts
{
    EstimatorModel model; // holds the POD basis and the sensor set
    ReservoirNet net;
    Vector noise_scale; // per-sensor observation noise std
    std::string fingerprint;
    nlohmann::ordered_json diagnostics;

    [[nodiscard]] const PodBasis &pod() const noexcept { return model.basis; }
    [[nodiscard]] const SensorSet &sensors() const noexcept { return model.sensors; }
};

nlohmann::ordered_json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const nlohmann::ordered_json &j);

nlohmann::ordered_json to_json(const PodBasis &pod);
PodBasis pod_from_json(const nlohmann::ordered_json &j);
nlohmann::ordered_json to_json(const SensorSet &sensors);
SensorSet sensors_from_json(const nlohmann::ordered_json &j);
nlohmann::ordered_json to_json(const ReservoirNet &net);
ReservoirNet reservoir_from_json(const nlohmann::ordered_json &j);

/// Writes pod.json, sensors.json, estimator.json and reservoir.json into
/// `dir`, each atomically.
void save_artifacts(const OfflineArtifacts &artifacts, const std::filesystem::path &dir);

/// Reads the four files back. Throws StaleArtifact when their fingerprints
/// disagree with each other.
OfflineArtifacts load_artifacts(const std::filesystem::path &dir);

} // namespace sdeim
