#include "sdeim/pipeline.hpp"

#include <future>
#include <sstream>

#include "sdeim/snapshot_io.hpp"

namespace sdeim
{

namespace
{

std::uint64_t role_seed(const ExperimentConfig &c, TrajectoryRole role)
{
    switch (role) {
    case TrajectoryRole::Pod: return c.seeds.pod_traj;
    case TrajectoryRole::Train: return c.seeds.train_traj;
    case TrajectoryRole::Test: return c.seeds.test_traj;
    }
    return 0;
}

double role_horizon(const ExperimentConfig &c, TrajectoryRole role)
{
    switch (role) {
    case TrajectoryRole::Pod: return c.horizons.pod;
    case TrajectoryRole::Train: return c.horizons.train;
    case TrajectoryRole::Test: return c.horizons.test;
    }
    return 0.0;
}

const std::string &role_file(const ExperimentConfig &c, TrajectoryRole role)
{
    switch (role) {
    case TrajectoryRole::Pod: return c.external.pod;
    case TrajectoryRole::Train: return c.external.train;
    case TrajectoryRole::Test: break;
    }
    return c.external.test;
}

// Training noise must not depend on the test noise seed (which is not part of
// the offline fingerprint).
std::uint64_t training_noise_seed(const ExperimentConfig &c)
{
    return c.seeds.train_traj ^ 0x5deadbeefcafeULL;
}

Matrix centered(const TrajectoryMatrix &traj, const PodBasis &pod)
{
    if (traj.state_dim() != pod.state_dim()) {
        std::ostringstream msg;
        msg << "trajectory has N = " << traj.state_dim() << " but the POD basis has N = "
            << pod.state_dim();
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    return traj.states.colwise() - pod.mean;
}

} // namespace

TrajectoryMatrix make_trajectory(const ExperimentConfig &config, TrajectoryRole role)
{
    config.validate();
    if (config.system.system == SystemTag::External) {
        TrajectoryMatrix traj = ingest_snapshots(role_file(config, role), config.system.dt_sample);
        if (traj.state_dim() != config.system.dimension) {
            throw Error(ErrorKind::Config, role_file(config, role) + ": N = " +
                                               std::to_string(traj.state_dim()) +
                                               " does not match config N");
        }
        return traj;
    }
    const Vector u0 = random_initial_condition(config.system, role_seed(config, role));
    return integrate(config.system, u0, role_horizon(config, role));
}

OfflineArtifacts build_offline(const ExperimentConfig &config, const PodBasis &pod,
                               const TrajectoryMatrix &train)
{
    const SensorSet sensors = select_sensors(pod, config.sensors);

    OfflineArtifacts a;
    a.model = build_estimator(pod, sensors);
    a.fingerprint = offline_fingerprint(config);

    const Matrix train_centered = centered(train, pod);
    const Matrix train_obs_clean = sensors.select_rows(train_centered);
    const Vector component_std =
        ((train_obs_clean.colwise() - train_obs_clean.rowwise().mean()).rowwise().squaredNorm() /
         static_cast<double>(train_obs_clean.cols()))
            .cwiseSqrt();
    a.noise_scale = config.noise_fraction * component_std;

    const Matrix inputs =
        config.noisy_training
            ? observe_series(train_centered, sensors, a.noise_scale, training_noise_seed(config))
            : train_obs_clean;
    const Matrix targets = optimal_kernel_series(a.model, train_centered);

    if (config.washout >= train.snapshot_count()) {
        throw Error(ErrorKind::Config, "washout must be shorter than the training trajectory");
    }
    a.net = train_reservoir(init_reservoir(config.reservoir_params(), sensors.size(), targets.rows()),
                            inputs, targets, config.washout);

    const Index kept = train.snapshot_count() - config.washout;
    const Matrix residual = predict_stream(a.net, inputs).rightCols(kept) - targets.rightCols(kept);
    a.diagnostics["train_snapshots"] = train.snapshot_count();
    a.diagnostics["train_rmse"] =
        std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size()));
    a.diagnostics["target_rms"] = std::sqrt(targets.rightCols(kept).squaredNorm() /
                                            static_cast<double>(residual.size()));
    a.diagnostics["estimation_bound"] = estimation_bound(pod, sensors);
    return a;
}

OfflineArtifacts run_offline(const ExperimentConfig &config, const TrajectoryMatrix &pod_traj,
                             const TrajectoryMatrix &train_traj)
{
    config.validate();
    const PodBasis pod = build_pod(pod_traj, config.modes);
    OfflineArtifacts a = build_offline(config, pod, train_traj);
    a.diagnostics["pod_snapshots"] = pod_traj.snapshot_count();
    return a;
}

OfflineArtifacts run_offline(const ExperimentConfig &config)
{
    return run_offline(config, make_trajectory(config, TrajectoryRole::Pod),
                       make_trajectory(config, TrajectoryRole::Train));
}

RunReport run_estimate(const ExperimentConfig &config, const OfflineArtifacts &artifacts,
                       const TrajectoryMatrix &test)
{
    config.validate();
    if (artifacts.fingerprint != offline_fingerprint(config)) {
        throw Error(ErrorKind::StaleArtifact,
                    "artifacts were built from a different configuration (fingerprint " +
                        artifacts.fingerprint + ", expected " + offline_fingerprint(config) + ")");
    }
    const EstimatorModel &model = artifacts.model;
    const Matrix test_centered = centered(test, model.basis);
    const Matrix observations =
        observe_series(test_centered, model.sensors, artifacts.noise_scale, config.seeds.noise);
    const Matrix xi = config.oracle_kernel ? optimal_kernel_series(model, test_centered)
                                           : predict_stream(artifacts.net, observations);

    const Index count = test.snapshot_count();
    RunReport report;
    report.times.resize(static_cast<std::size_t>(count));
    report.re_bestfit.resize(count);
    report.re_qdeim.resize(count);
    report.re_sdeim.resize(count);
    const Vector &mean = model.basis.mean;
    for (Index j = 0; j < count; ++j) {
        const Vector u = test.states.col(j);
        const Vector y = observations.col(j);
        report.times[static_cast<std::size_t>(j)] = test.time(j);
        report.re_bestfit[j] =
            relative_error(mean + best_fit(model.basis, test_centered.col(j)), u, mean);
        report.re_qdeim[j] = relative_error(qdeim_estimate(model, y), u, mean);
        report.re_sdeim[j] = relative_error(sdeim_estimate(model, y, xi.col(j)), u, mean);
    }
    report.transient_steps = std::min<Index>(
        count, static_cast<Index>(std::ceil(config.transient / test.dt_sample - 1e-9)));

    report.metadata["config"] = to_json(config);
    report.metadata["fingerprint"] = artifacts.fingerprint;
    report.metadata["sensors"] = model.sensors.indices;
    report.metadata["test_snapshots"] = count;
    report.metadata["offline"] = artifacts.diagnostics;
    return report;
}

RunReport run_estimate(const ExperimentConfig &config, const OfflineArtifacts &artifacts)
{
    return run_estimate(config, artifacts, make_trajectory(config, TrajectoryRole::Test));
}

std::vector<SweepPoint> sensor_sweep(const ExperimentConfig &config,
                                     std::span<const Index> r_values, unsigned jobs)
{
    config.validate();
    for (Index r : r_values) {
        if (r < 1 || r >= config.modes) {
            throw Error(ErrorKind::Config, "every swept r must satisfy 1 <= r < m");
        }
    }
    const TrajectoryMatrix pod_traj = make_trajectory(config, TrajectoryRole::Pod);
    const TrajectoryMatrix train = make_trajectory(config, TrajectoryRole::Train);
    const TrajectoryMatrix test = make_trajectory(config, TrajectoryRole::Test);
    const PodBasis pod = build_pod(pod_traj, config.modes);

    auto run_point = [&](Index r) {
        ExperimentConfig point = config;
        point.sensors = r;
        const OfflineArtifacts a = build_offline(point, pod, train);
        const RunReport report = run_estimate(point, a, test);
        SweepPoint p;
        p.sensors = r;
        p.estimation_bound = a.diagnostics["estimation_bound"].get<double>();
        p.bestfit = report.bestfit_summary();
        p.qdeim = report.qdeim_summary();
        p.sdeim = report.sdeim_summary();
        return p;
    };

    std::vector<SweepPoint> points(r_values.size());
    jobs = std::max(1u, jobs);
    for (std::size_t start = 0; start < r_values.size(); start += jobs) {
        const std::size_t stop = std::min(r_values.size(), start + jobs);
        std::vector<std::future<SweepPoint>> pending;
        for (std::size_t i = start; i < stop; ++i) {
            pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                         run_point, r_values[i]));
        }
        for (std::size_t i = start; i < stop; ++i) points[i] = pending[i - start].get();
    }
    return points;
}

std::string sweep_csv(std::span<const SweepPoint> points)
{
    std::string out = "r,estimation_bound,bestfit_mean,bestfit_std,qdeim_mean,qdeim_std,"
                      "sdeim_mean,sdeim_std,sdeim_post_transient_mean\n";
    for (const SweepPoint &p : points) {
        out += std::to_string(p.sensors) + ',' + format_double(p.estimation_bound) + ',' +
               format_double(p.bestfit.full.mean) + ',' + format_double(p.bestfit.full.std) + ',' +
               format_double(p.qdeim.full.mean) + ',' + format_double(p.qdeim.full.std) + ',' +
               format_double(p.sdeim.full.mean) + ',' + format_double(p.sdeim.full.std) + ',' +
               format_double(p.sdeim.post_transient.mean) + '\n';
    }
    return out;
}

} // namespace sdeim
