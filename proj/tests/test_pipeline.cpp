#include <doctest.h>

#include <filesystem>

#include "sdeim/pipeline.hpp"
#include "sdeim/snapshot_io.hpp"

using namespace sdeim;
namespace fs = std::filesystem;

namespace
{

// Small enough to run in well under a second.
ExperimentConfig tiny_config()
{
    ExperimentConfig c = ExperimentConfig::lorenz96();
    c.system.burn_in = 5.0;
    c.modes = 6;
    c.sensors = 3;
    c.horizons = {50.0, 60.0, 10.0};
    c.reservoir.size = 100;
    c.reservoir.density = 0.1;
    c.washout = 20;
    c.transient = 1.0;
    return c;
}

fs::path scratch_dir(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / ("sdeim_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct Tiny
{
    ExperimentConfig config = tiny_config();
    TrajectoryMatrix pod = make_trajectory(config, TrajectoryRole::Pod);
    TrajectoryMatrix train = make_trajectory(config, TrajectoryRole::Train);
    TrajectoryMatrix test = make_trajectory(config, TrajectoryRole::Test);
};

const Tiny &tiny()
{
    static const Tiny data;
    return data;
}

} // namespace

TEST_CASE("presets follow the experiment table")
{
    const ExperimentConfig l = ExperimentConfig::lorenz96();
    CHECK(l.system.dimension == 40);
    CHECK(l.system.forcing == 4.0);
    CHECK(l.modes == 20);
    CHECK(l.sensors == 10);
    CHECK(l.system.dt_sample == 0.25);
    CHECK(l.noise_fraction == 0.05);
    CHECK(l.horizons.test == 200.0);

    const ExperimentConfig k = ExperimentConfig::kuramoto_sivashinsky();
    CHECK(k.system.dimension == 128);
    CHECK(k.system.domain_length == 22.0);
    CHECK(k.modes == 15);
    CHECK(k.sensors == 8);
    CHECK(k.system.dt_sample == 0.2);
    CHECK(ExperimentConfig::preset(SystemTag::KS).modes == 15);
    CHECK(ExperimentConfig::preset(SystemTag::External).system.system == SystemTag::External);
}

TEST_CASE("config validation")
{
    auto kind_of = [](const ExperimentConfig &c) {
        try {
            c.validate();
        } catch (const Error &e) {
            return e.kind();
        }
        return ErrorKind::State;
    };
    ExperimentConfig c = ExperimentConfig::lorenz96();
    CHECK_NOTHROW(c.validate());
    c.sensors = 20;
    CHECK(kind_of(c) == ErrorKind::Config);
    c = ExperimentConfig::lorenz96();
    c.modes = 41;
    CHECK(kind_of(c) == ErrorKind::Config);
    c = ExperimentConfig::lorenz96();
    c.noise_fraction = -0.1;
    CHECK(kind_of(c) == ErrorKind::Config);
    c = ExperimentConfig::lorenz96();
    c.horizons.test = 0.1;
    CHECK(kind_of(c) == ErrorKind::Config);
}

TEST_CASE("INI text overrides the preset")
{
    const std::string text = R"(
[system]
type = ks
N = 64
[experiment]
m = 12
r = 5
noise_fraction = 0.1
oracle_kernel = true
noisy_training = false
[horizons]
train = 300
[reservoir]
leak_rate = 0.7
washout = 50
[seeds]
noise = 99
[output]
dir = /tmp/somewhere
)";
    CHECK(config_system_type(text) == SystemTag::KS);
    const ExperimentConfig c = apply_config_text(text, ExperimentConfig::kuramoto_sivashinsky());
    CHECK(c.system.dimension == 64);
    CHECK(c.system.domain_length == 22.0);
    CHECK(c.modes == 12);
    CHECK(c.sensors == 5);
    CHECK(c.noise_fraction == 0.1);
    CHECK(c.oracle_kernel);
    CHECK(!c.noisy_training);
    CHECK(c.horizons.train == 300.0);
    CHECK(c.horizons.pod == 1000.0);
    CHECK(c.reservoir.leak_rate == 0.7);
    CHECK(c.washout == 50);
    CHECK(c.seeds.noise == 99);
    CHECK(c.output_dir == "/tmp/somewhere");
}

TEST_CASE("INI errors are config errors")
{
    const ExperimentConfig base = ExperimentConfig::lorenz96();
    for (const char *text : {"[experiment]\nmodes = 3\n", "[experiment]\nm = three\n",
                             "m = 3\n", "[experiment]\noracle_kernel = maybe\n",
                             "[system]\ntype = rbc\n"}) {
        try {
            apply_config_text(text, base);
            FAIL("accepted " << text);
        } catch (const Error &e) {
            CHECK(e.kind() == ErrorKind::Config);
        }
    }
}

TEST_CASE("load_config picks the preset named in the file")
{
    const fs::path dir = scratch_dir("config");
    write_file_atomic(dir / "ks.ini", "[system]\ntype = ks\n[experiment]\nr = 6\n");
    const ExperimentConfig c = load_config(dir / "ks.ini");
    CHECK(c.system.system == SystemTag::KS);
    CHECK(c.system.dimension == 128);
    CHECK(c.modes == 15);
    CHECK(c.sensors == 6);
    write_file_atomic(dir / "plain.ini", "[experiment]\nr = 6\n");
    CHECK(load_config(dir / "plain.ini", SystemTag::KS).modes == 15);
    CHECK(load_config(dir / "plain.ini").modes == 20);
    CHECK_THROWS_AS(load_config(dir / "nope.ini"), Error);
    fs::remove_all(dir);
}

TEST_CASE("fingerprint tracks offline inputs only")
{
    const ExperimentConfig base = ExperimentConfig::lorenz96();
    const std::string fp = offline_fingerprint(base);
    CHECK(fp.size() == 16);

    ExperimentConfig online = base;
    online.seeds.test_traj = 77;
    online.seeds.noise = 78;
    online.horizons.test = 50.0;
    online.oracle_kernel = true;
    online.transient = 2.0;
    online.output_dir = "elsewhere";
    CHECK(offline_fingerprint(online) == fp);

    for (int field = 0; field < 5; ++field) {
        ExperimentConfig changed = base;
        if (field == 0) changed.modes = 19;
        if (field == 1) changed.seeds.train_traj = 9;
        if (field == 2) changed.reservoir.leak_rate = 0.6;
        if (field == 3) changed.noise_fraction = 0.1;
        if (field == 4) changed.noisy_training = false;
        CHECK(offline_fingerprint(changed) != fp);
    }
}

TEST_CASE("config JSON echoes every block")
{
    const auto j = to_json(ExperimentConfig::kuramoto_sivashinsky());
    for (const char *key : {"system", "experiment", "horizons", "reservoir", "seeds", "external", "output"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["system"]["type"] == "ks");
    CHECK(j["experiment"]["m"] == 15);
}

TEST_CASE("report statistics")
{
    Vector v(4);
    v << 1, 2, 3, 6;
    const SeriesStats s = series_stats(v);
    CHECK(s.mean == 3.0);
    CHECK(s.std == doctest::Approx(std::sqrt(3.5)));
    const MethodSummary m = summarize(v, 2);
    CHECK(m.full.mean == 3.0);
    CHECK(m.post_transient.mean == 4.5);
    CHECK(m.post_transient.std == doctest::Approx(1.5));
}

TEST_CASE("offline stage produces consistent artifacts")
{
    const Tiny &t = tiny();
    const OfflineArtifacts a = run_offline(t.config, t.pod, t.train);
    CHECK(a.sensors().size() == 3);
    CHECK(a.pod().modes() == 6);
    CHECK(a.model.kernel_dim() == 3);
    CHECK(a.net.trained());
    CHECK(a.net.output_dim() == 3);
    CHECK(a.noise_scale.size() == 3);
    CHECK((a.noise_scale.array() > 0.0).all());
    CHECK(a.fingerprint == offline_fingerprint(t.config));
    CHECK(a.diagnostics["train_rmse"].get<double>() < a.diagnostics["target_rms"].get<double>());
}

TEST_CASE("noise scale is the noise fraction of each sensor's training std")
{
    const Tiny &t = tiny();
    const OfflineArtifacts a = run_offline(t.config, t.pod, t.train);
    for (Index j = 0; j < 3; ++j) {
        const auto row = t.train.states.row(a.sensors().indices[j]).array();
        const double std = std::sqrt((row - row.mean()).square().mean());
        CHECK(a.noise_scale[j] == doctest::Approx(0.05 * std).epsilon(1e-12));
    }
}

TEST_CASE("artifacts save, reload and reproduce byte for byte")
{
    const Tiny &t = tiny();
    const fs::path d1 = scratch_dir("art1");
    const fs::path d2 = scratch_dir("art2");
    save_artifacts(run_offline(t.config, t.pod, t.train), d1);
    save_artifacts(run_offline(t.config, t.pod, t.train), d2);
    for (const char *name : {"pod.json", "sensors.json", "estimator.json", "reservoir.json"}) {
        CHECK(read_file(d1 / name) == read_file(d2 / name));
    }

    const OfflineArtifacts loaded = load_artifacts(d1);
    const OfflineArtifacts fresh = run_offline(t.config, t.pod, t.train);
    CHECK(loaded.sensors().indices == fresh.sensors().indices);
    CHECK(loaded.pod().basis == fresh.pod().basis);
    CHECK(*loaded.net.w_out == *fresh.net.w_out);
    CHECK(Matrix(loaded.net.w_res) == Matrix(fresh.net.w_res));
    CHECK(report_csv(run_estimate(t.config, loaded, t.test)) ==
          report_csv(run_estimate(t.config, fresh, t.test)));

    // One file from a different configuration makes the set stale.
    ExperimentConfig other = t.config;
    other.seeds.reservoir = 12;
    save_artifacts(run_offline(other, t.pod, t.train), d2);
    fs::copy_file(d2 / "reservoir.json", d1 / "reservoir.json", fs::copy_options::overwrite_existing);
    try {
        load_artifacts(d1);
        FAIL("expected stale artifacts");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::StaleArtifact);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("estimation refuses artifacts from another configuration")
{
    const Tiny &t = tiny();
    const OfflineArtifacts a = run_offline(t.config, t.pod, t.train);
    ExperimentConfig other = t.config;
    other.seeds.reservoir = 11;
    try {
        run_estimate(other, a, t.test);
        FAIL("expected a stale artifact error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::StaleArtifact);
    }
    ExperimentConfig online_only = t.config;
    online_only.seeds.noise = 1234;
    CHECK_NOTHROW(run_estimate(online_only, a, t.test));
}

TEST_CASE("run report layout and self-consistency")
{
    const Tiny &t = tiny();
    const OfflineArtifacts a = run_offline(t.config, t.pod, t.train);
    const RunReport report = run_estimate(t.config, a, t.test);
    CHECK(report.size() == t.test.snapshot_count());
    CHECK(report.times.size() == static_cast<std::size_t>(t.test.snapshot_count()));
    CHECK(report.transient_steps == 4);

    const auto j = report_json(report);
    const MethodSummary s = report.sdeim_summary();
    CHECK(std::abs(j["summary"]["sdeim"]["mean"].get<double>() - report.re_sdeim.mean()) <= 1e-12);
    CHECK(std::abs(s.full.mean - report.re_sdeim.mean()) <= 1e-12);
    CHECK(std::abs(report.qdeim_summary().full.mean - report.re_qdeim.mean()) <= 1e-12);
    CHECK(std::abs(report.bestfit_summary().full.mean - report.re_bestfit.mean()) <= 1e-12);
    CHECK(j["metadata"]["config"]["experiment"]["m"] == 6);

    const std::string csv = report_csv(report);
    CHECK(csv.rfind("time,re_bestfit,re_qdeim,re_sdeim\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == report.size() + 1);
}

TEST_CASE("Q-DEIM series equals S-DEIM with a zero kernel vector")
{
    const Tiny &t = tiny();
    const OfflineArtifacts a = run_offline(t.config, t.pod, t.train);
    const RunReport report = run_estimate(t.config, a, t.test);
    const Matrix centered = t.test.states.colwise() - a.pod().mean;
    const Matrix y = observe_series(centered, a.sensors(), a.noise_scale, t.config.seeds.noise);
    const Vector zero = Vector::Zero(a.model.kernel_dim());
    for (Index j = 0; j < report.size(); ++j) {
        const double re = relative_error(sdeim_estimate(a.model, Vector(y.col(j)), zero),
                                         t.test.states.col(j), a.pod().mean);
        CHECK(report.re_qdeim[j] == re);
    }
}

TEST_CASE("oracle kernel mode: optimal-kernel errors between best fit and Q-DEIM")
{
    Tiny t = tiny();
    t.config.noise_fraction = 0.0;
    t.config.oracle_kernel = true;
    const OfflineArtifacts a = run_offline(t.config, t.pod, t.train);
    const RunReport report = run_estimate(t.config, a, t.test);
    const Matrix centered = t.test.states.colwise() - a.pod().mean;
    for (Index j = 0; j < report.size(); ++j) {
        const Vector u = t.test.states.col(j);
        const Vector uc = centered.col(j);
        const Vector est = sdeim_estimate(a.model, a.sensors().select(uc), optimal_kernel_coords(a.model, uc));
        CHECK(report.re_sdeim[j] == doctest::Approx(relative_error(est, u, a.pod().mean)).epsilon(1e-12));
        CHECK(report.re_sdeim[j] >= report.re_bestfit[j] - 1e-10);
        CHECK(report.re_sdeim[j] <= report.re_qdeim[j] + 1e-10);
    }
}

TEST_CASE("estimation is deterministic")
{
    const Tiny &t = tiny();
    const RunReport first = run_estimate(t.config, run_offline(t.config, t.pod, t.train), t.test);
    const RunReport second = run_estimate(t.config, run_offline(t.config, t.pod, t.train), t.test);
    CHECK(report_csv(first) == report_csv(second));
    CHECK(report_json(first).dump() == report_json(second).dump());
}

TEST_CASE("trajectories come from their own seeds")
{
    const Tiny &t = tiny();
    CHECK(t.pod.states.col(0) != t.train.states.col(0));
    CHECK(t.train.states.col(0) != t.test.states.col(0));
    CHECK(t.test.snapshot_count() == 41);
    CHECK(make_trajectory(t.config, TrajectoryRole::Test).states == t.test.states);
}

TEST_CASE("sweep of one r equals a single estimate; threads do not change results")
{
    const Tiny &t = tiny();
    const std::vector<Index> single{3};
    const auto points = sensor_sweep(t.config, single, 1);
    REQUIRE(points.size() == 1);
    const RunReport report = run_estimate(t.config, run_offline(t.config, t.pod, t.train), t.test);
    CHECK(points[0].sdeim.full.mean == report.sdeim_summary().full.mean);
    CHECK(points[0].qdeim.full.mean == report.qdeim_summary().full.mean);

    const std::vector<Index> several{1, 2, 4, 5};
    const auto serial = sensor_sweep(t.config, several, 1);
    const auto parallel = sensor_sweep(t.config, several, 3);
    CHECK(sweep_csv(serial) == sweep_csv(parallel));
    CHECK(serial[2].sensors == 4);

    const std::vector<Index> invalid{6};
    CHECK_THROWS_AS(sensor_sweep(t.config, invalid), Error);
}

TEST_CASE("external snapshot files drive the same pipeline")
{
    const Tiny &t = tiny();
    const fs::path dir = scratch_dir("external");
    write_snapshots(dir / "pod.sdm", t.pod);
    write_snapshots(dir / "train.csv", t.train);
    write_snapshots(dir / "test.sdm", t.test);

    ExperimentConfig ext = t.config;
    ext.system.system = SystemTag::External;
    ext.external = {(dir / "pod.sdm").string(), (dir / "train.csv").string(), (dir / "test.sdm").string()};
    const RunReport from_files = run_estimate(ext, run_offline(ext));
    const RunReport simulated = run_estimate(t.config, run_offline(t.config, t.pod, t.train), t.test);
    CHECK(from_files.re_sdeim == simulated.re_sdeim);

    ext.system.dimension = 41;
    try {
        make_trajectory(ext, TrajectoryRole::Pod);
        FAIL("expected a config error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
    fs::remove_all(dir);
}

TEST_CASE("write_report emits the CSV and its JSON sidecar")
{
    const Tiny &t = tiny();
    const fs::path dir = scratch_dir("report");
    const RunReport report = run_estimate(t.config, run_offline(t.config, t.pod, t.train), t.test);
    write_report(report, dir);
    CHECK(read_file(dir / "report.csv") == report_csv(report));
    const auto j = nlohmann::ordered_json::parse(read_file(dir / "report.json"));
    CHECK(j["metadata"]["fingerprint"] == offline_fingerprint(t.config));
    fs::remove_all(dir);
}
