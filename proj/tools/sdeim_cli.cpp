#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdeim/artifacts.hpp"
#include "sdeim/pipeline.hpp"
#include "sdeim/snapshot_io.hpp"

namespace
{

using namespace sdeim;

enum ExitCode : int
{
    Ok = 0,
    Unexpected = 1,
    ConfigFailure = 2,
    NumericalFailure = 3,
    AssumptionFailure = 4,
    ParseFailure = 5,
    IoFailure = 6,
    StaleFailure = 7,
    InputFailure = 8,
};

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config: return ConfigFailure;
    case ErrorKind::Divergence:
    case ErrorKind::Numerical:
    case ErrorKind::RankDeficiency: return NumericalFailure;
    case ErrorKind::AssumptionViolation:
    case ErrorKind::Regime: return AssumptionFailure;
    case ErrorKind::Parse: return ParseFailure;
    case ErrorKind::Io: return IoFailure;
    case ErrorKind::StaleArtifact: return StaleFailure;
    case ErrorKind::InvalidInput:
    case ErrorKind::State: return InputFailure;
    }
    return Unexpected;
}

// Every flag is optional so that unset flags leave config-file values alone.
struct Overrides
{
    std::string config_path;
    std::optional<std::string> system;
    std::optional<Index> n;
    std::optional<double> forcing, length, dt_internal, dt_sample, burn_in;
    std::optional<Index> m, r;
    std::optional<double> noise_fraction, transient;
    std::optional<double> horizon_pod, horizon_train, horizon_test;
    std::optional<Index> reservoir_size, washout;
    std::optional<double> density, spectral_radius, leak_rate, ridge_lambda;
    std::optional<std::uint64_t> seed_pod, seed_train, seed_test, seed_reservoir, seed_noise;
    std::optional<std::string> external_pod, external_train, external_test;
    std::optional<std::string> output_dir;
    bool oracle_kernel = false;
    std::optional<bool> noisy_training;

    void attach(CLI::App &app)
    {
        app.add_option("-c,--config", config_path, "INI configuration file");
        app.add_option("--system", system, "lorenz96, ks or external");
        app.add_option("--N", n, "state dimension");
        app.add_option("--F", forcing, "Lorenz-96 forcing");
        app.add_option("--L", length, "KS domain length");
        app.add_option("--dt-internal", dt_internal, "integrator step");
        app.add_option("--dt-sample", dt_sample, "snapshot spacing");
        app.add_option("--burn-in", burn_in, "time integrated before sampling");
        app.add_option("-m,--modes", m, "POD modes");
        app.add_option("-r,--sensors", r, "sensor count");
        app.add_option("--noise-fraction", noise_fraction, "noise std relative to signal std");
        app.add_option("--transient", transient, "time excluded from post-transient statistics");
        app.add_option("--horizon-pod", horizon_pod, "POD trajectory length");
        app.add_option("--horizon-train", horizon_train, "training trajectory length");
        app.add_option("--horizon-test", horizon_test, "test trajectory length");
        app.add_option("--reservoir-size", reservoir_size, "reservoir nodes K");
        app.add_option("--density", density, "reservoir connection density");
        app.add_option("--spectral-radius", spectral_radius, "reservoir spectral radius");
        app.add_option("--leak-rate", leak_rate, "reservoir leak rate");
        app.add_option("--ridge-lambda", ridge_lambda, "readout regularisation");
        app.add_option("--washout", washout, "reservoir steps discarded before training");
        app.add_option("--seed-pod-traj", seed_pod);
        app.add_option("--seed-train-traj", seed_train);
        app.add_option("--seed-test-traj", seed_test);
        app.add_option("--seed-reservoir", seed_reservoir);
        app.add_option("--seed-noise", seed_noise);
        app.add_option("--external-pod", external_pod, "snapshot file for the POD");
        app.add_option("--external-train", external_train, "snapshot file for training");
        app.add_option("--external-test", external_test, "snapshot file for testing");
        app.add_option("-o,--output-dir", output_dir, "directory for artifacts and reports");
        app.add_flag("--oracle-kernel", oracle_kernel,
                     "use the optimal kernel coordinates instead of the reservoir");
        app.add_flag("--noisy-training,!--clean-training", noisy_training,
                     "train the readout on noisy (default) or noiseless observations");
    }

    ExperimentConfig resolve(std::optional<SystemTag> forced = std::nullopt) const
    {
        std::optional<SystemTag> tag = forced;
        if (!tag && system) tag = parse_system_tag(*system);
        std::string text;
        if (!config_path.empty()) {
            text = read_file(config_path);
            if (!tag) tag = config_system_type(text);
        }
        ExperimentConfig c = ExperimentConfig::preset(tag.value_or(SystemTag::Lorenz96));
        if (!text.empty()) c = apply_config_text(text, c);
        if (tag) c.system.system = *tag;

        auto set = [](auto &field, const auto &value) {
            if (value) field = *value;
        };
        set(c.system.dimension, n);
        set(c.system.forcing, forcing);
        set(c.system.domain_length, length);
        set(c.system.dt_internal, dt_internal);
        set(c.system.dt_sample, dt_sample);
        set(c.system.burn_in, burn_in);
        set(c.modes, m);
        set(c.sensors, r);
        set(c.noise_fraction, noise_fraction);
        set(c.transient, transient);
        set(c.horizons.pod, horizon_pod);
        set(c.horizons.train, horizon_train);
        set(c.horizons.test, horizon_test);
        set(c.reservoir.size, reservoir_size);
        set(c.reservoir.density, density);
        set(c.reservoir.spectral_radius, spectral_radius);
        set(c.reservoir.leak_rate, leak_rate);
        set(c.reservoir.ridge_lambda, ridge_lambda);
        set(c.washout, washout);
        set(c.seeds.pod_traj, seed_pod);
        set(c.seeds.train_traj, seed_train);
        set(c.seeds.test_traj, seed_test);
        set(c.seeds.reservoir, seed_reservoir);
        set(c.seeds.noise, seed_noise);
        set(c.external.pod, external_pod);
        set(c.external.train, external_train);
        set(c.external.test, external_test);
        if (output_dir) c.output_dir = *output_dir;
        if (oracle_kernel) c.oracle_kernel = true;
        set(c.noisy_training, noisy_training);
        c.validate();
        return c;
    }
};

std::optional<TrajectoryRole> parse_role(const std::string &name)
{
    if (name == "pod") return TrajectoryRole::Pod;
    if (name == "train") return TrajectoryRole::Train;
    if (name == "test") return TrajectoryRole::Test;
    return std::nullopt;
}

void print_summary(const RunReport &report)
{
    const auto line = [](const char *name, const MethodSummary &s) {
        std::printf("%-8s mean %.4f (std %.4f)  post-transient %.4f (std %.4f)\n", name,
                    s.full.mean, s.full.std, s.post_transient.mean, s.post_transient.std);
    };
    line("best_fit", report.bestfit_summary());
    line("q-deim", report.qdeim_summary());
    line("s-deim", report.sdeim_summary());
}

RunReport offline_and_estimate(const ExperimentConfig &config)
{
    const OfflineArtifacts artifacts = run_offline(config);
    save_artifacts(artifacts, config.output_dir);
    RunReport report = run_estimate(config, artifacts);
    write_report(report, config.output_dir);
    return report;
}

std::vector<Index> even_sensor_counts(Index modes)
{
    std::vector<Index> values;
    for (Index r = 2; r < modes; r += 2) values.push_back(r);
    return values;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Sparse DEIM state estimation from few point sensors"};
    app.require_subcommand(1);

    Overrides ov;

    auto *simulate = app.add_subcommand("simulate", "integrate one of the three trajectories");
    std::string role_name = "pod";
    std::string simulate_out;
    ov.attach(*simulate);
    simulate->add_option("--role", role_name, "pod, train or test")
        ->check(CLI::IsMember({"pod", "train", "test"}));
    simulate->add_option("--out", simulate_out, "snapshot file (.sdm binary or .csv)");

    auto *pod_cmd = app.add_subcommand("pod", "compute the POD basis of the first trajectory");
    ov.attach(*pod_cmd);

    auto *place = app.add_subcommand("place", "choose sensors by pivoted QR of the POD basis");
    ov.attach(*place);

    auto *train = app.add_subcommand("train", "run the whole offline stage and save artifacts");
    ov.attach(*train);

    auto *estimate = app.add_subcommand("estimate", "estimate the test trajectory from artifacts");
    std::string artifact_dir;
    ov.attach(*estimate);
    estimate->add_option("--artifacts", artifact_dir, "artifact directory (default: output dir)");

    auto *sweep = app.add_subcommand("sweep", "repeat training and estimation over sensor counts");
    std::vector<Index> r_values;
    unsigned jobs = 1;
    ov.attach(*sweep);
    sweep->add_option("--r-values", r_values, "sensor counts (default 2, 4, ... < m)");
    sweep->add_option("-j,--jobs", jobs, "sweep points run in parallel");

    auto *ingest = app.add_subcommand("ingest", "validate an external snapshot file");
    std::string ingest_path, ingest_out;
    std::optional<double> ingest_dt, ingest_t0;
    ingest->add_option("path", ingest_path, "SDM1 or CSV snapshot file")->required();
    ingest->add_option("--dt", ingest_dt, "expected dt_sample");
    ingest->add_option("--t0", ingest_t0, "expected start time");
    ingest->add_option("--out", ingest_out, "re-encode to this file");

    auto *reproduce = app.add_subcommand("reproduce", "run a preset experiment end to end");
    std::string preset_name;
    bool with_sweep = false;
    ov.attach(*reproduce);
    reproduce->add_option("preset", preset_name, "lorenz96 or ks")
        ->required()
        ->check(CLI::IsMember({"lorenz96", "ks"}));
    reproduce->add_flag("--sweep", with_sweep, "also run the sensor sweep r = 2, 4, ... < m");
    reproduce->add_option("-j,--jobs", jobs, "sweep points run in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigFailure;
    }

    try {
        if (*simulate) {
            const ExperimentConfig c = ov.resolve();
            const TrajectoryRole role = *parse_role(role_name);
            const TrajectoryMatrix traj = make_trajectory(c, role);
            const std::filesystem::path out =
                simulate_out.empty() ? c.output_dir / (role_name + ".sdm")
                                     : std::filesystem::path(simulate_out);
            write_snapshots(out, traj);
            std::printf("wrote %s (N = %lld, M = %lld)\n", out.string().c_str(),
                        static_cast<long long>(traj.state_dim()),
                        static_cast<long long>(traj.snapshot_count()));
        } else if (*pod_cmd || *place) {
            const ExperimentConfig c = ov.resolve();
            const PodBasis pod = build_pod(make_trajectory(c, TrajectoryRole::Pod), c.modes);
            nlohmann::ordered_json pod_json = to_json(pod);
            pod_json["fingerprint"] = offline_fingerprint(c);
            write_file_atomic(c.output_dir / "pod.json", pod_json.dump(1));
            std::printf("sigma_1 = %.6g, sigma_m = %.6g\n", pod.singular_values[0],
                        pod.singular_values[c.modes - 1]);
            if (*place) {
                const SensorSet sensors = select_sensors(pod, c.sensors);
                nlohmann::ordered_json s = to_json(sensors);
                s["fingerprint"] = offline_fingerprint(c);
                write_file_atomic(c.output_dir / "sensors.json", s.dump(1));
                std::printf("sensors:");
                for (Index i : sensors.indices) std::printf(" %lld", static_cast<long long>(i));
                std::printf("\nestimation bound %.6g\n", estimation_bound(pod, sensors));
            }
        } else if (*train) {
            const ExperimentConfig c = ov.resolve();
            const OfflineArtifacts a = run_offline(c);
            save_artifacts(a, c.output_dir);
            std::printf("artifacts written to %s (fingerprint %s)\n", c.output_dir.string().c_str(),
                        a.fingerprint.c_str());
        } else if (*estimate) {
            const ExperimentConfig c = ov.resolve();
            const OfflineArtifacts a =
                load_artifacts(artifact_dir.empty() ? c.output_dir : std::filesystem::path(artifact_dir));
            const RunReport report = run_estimate(c, a);
            write_report(report, c.output_dir);
            print_summary(report);
        } else if (*sweep) {
            const ExperimentConfig c = ov.resolve();
            if (r_values.empty()) r_values = even_sensor_counts(c.modes);
            const auto points = sensor_sweep(c, r_values, jobs);
            const std::string csv = sweep_csv(points);
            write_file_atomic(c.output_dir / "sweep.csv", csv);
            std::fputs(csv.c_str(), stdout);
        } else if (*ingest) {
            const TrajectoryMatrix traj = ingest_snapshots(ingest_path, ingest_dt, ingest_t0);
            std::printf("N = %lld, M = %lld, t0 = %s, dt = %s\n",
                        static_cast<long long>(traj.state_dim()),
                        static_cast<long long>(traj.snapshot_count()),
                        format_double(traj.t0).c_str(), format_double(traj.dt_sample).c_str());
            if (!ingest_out.empty()) write_snapshots(ingest_out, traj);
        } else if (*reproduce) {
            const SystemTag tag = parse_system_tag(preset_name);
            const ExperimentConfig c = ov.resolve(tag);
            const auto start = std::chrono::steady_clock::now();
            const RunReport report = offline_and_estimate(c);
            print_summary(report);
            if (with_sweep) {
                const auto points = sensor_sweep(c, even_sensor_counts(c.modes), jobs);
                write_file_atomic(c.output_dir / "sweep.csv", sweep_csv(points));
            }
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            std::printf("report written to %s (%.1f s)\n", c.output_dir.string().c_str(),
                        elapsed.count());
        }
    } catch (const Error &e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return Unexpected;
    }
    return Ok;
}
