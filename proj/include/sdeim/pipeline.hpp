#pragma once

#include <span>
#include <vector>

#include "sdeim/artifacts.hpp"
#include "sdeim/config.hpp"
#include "sdeim/report.hpp"

namespace sdeim
{

enum class TrajectoryRole
{
    Pod,
    Train,
    Test,
};

/// Simulates the trajectory for `role` from its own seeded initial condition,
/// or ingests the matching [external] file.
TrajectoryMatrix make_trajectory(const ExperimentConfig &config, TrajectoryRole role);

/// Offline stage with the POD basis already computed: CPQR placement,
/// estimator build, noise scales and reservoir training on `train`.
OfflineArtifacts build_offline(const ExperimentConfig &config, const PodBasis &pod,
                               const TrajectoryMatrix &train);

/// POD of the first trajectory followed by build_offline on the second.
OfflineArtifacts run_offline(const ExperimentConfig &config, const TrajectoryMatrix &pod_traj,
                             const TrajectoryMatrix &train_traj);
OfflineArtifacts run_offline(const ExperimentConfig &config);

/// Online stage on the test trajectory: noisy observations, reservoir kernel
/// prediction and per-snapshot errors of best fit, Q-DEIM and S-DEIM. Throws
/// StaleArtifact if the artifacts were built from a different configuration.
RunReport run_estimate(const ExperimentConfig &config, const OfflineArtifacts &artifacts,
                       const TrajectoryMatrix &test);
RunReport run_estimate(const ExperimentConfig &config, const OfflineArtifacts &artifacts);

struct SweepPoint
{
    Index sensors = 0;
    double estimation_bound = 0.0;
    MethodSummary bestfit;
    MethodSummary qdeim;
    MethodSummary sdeim;
};

/// Repeats placement, training and estimation for each r with the modes and
/// trajectories fixed. Points run on up to `jobs` threads; results are in the
/// order of r_values regardless.
std::vector<SweepPoint> sensor_sweep(const ExperimentConfig &config,
                                     std::span<const Index> r_values, unsigned jobs = 1);

/// "r,bound,<method>_mean,<method>_std,..." one row per sweep point, full
/// horizon statistics.
std::string sweep_csv(std::span<const SweepPoint> points);

} // namespace sdeim
