#include "sdeim/artifacts.hpp"

#include "sdeim/snapshot_io.hpp"

namespace sdeim
{

using nlohmann::ordered_json;

namespace
{

ordered_json vector_to_json(const Vector &v)
{
    return ordered_json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const ordered_json &j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

ordered_json read_json(const std::filesystem::path &path)
{
    const std::string text = read_file(path);
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(e.byte, 0, path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path &path, const ordered_json &j)
{
    write_file_atomic(path, j.dump(1) + "\n");
}

template <typename F> auto guarded(const std::filesystem::path &path, F &&f)
{
    try {
        return f();
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::Parse, path.string() + ": malformed artifact: " + e.what());
    }
}

} // namespace

ordered_json matrix_to_json(const Matrix &m)
{
    ordered_json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::vector<double>(m.data(), m.data() + m.size());
    return j;
}

Matrix matrix_from_json(const ordered_json &j)
{
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
        throw Error(ErrorKind::Parse, "matrix payload does not match its shape");
    }
    return Eigen::Map<const Matrix>(data.data(), rows, cols);
}

ordered_json to_json(const PodBasis &pod)
{
    ordered_json j;
    j["mean"] = vector_to_json(pod.mean);
    j["singular_values"] = vector_to_json(pod.singular_values);
    j["basis"] = matrix_to_json(pod.basis);
    return j;
}

PodBasis pod_from_json(const ordered_json &j)
{
    PodBasis pod;
    pod.mean = vector_from_json(j.at("mean"));
    pod.singular_values = vector_from_json(j.at("singular_values"));
    pod.basis = matrix_from_json(j.at("basis"));
    if (pod.mean.size() != pod.basis.rows()) {
        throw Error(ErrorKind::Parse, "POD mean and basis disagree on N");
    }
    return pod;
}

ordered_json to_json(const SensorSet &sensors)
{
    ordered_json j;
    j["indices"] = sensors.indices;
    return j;
}

SensorSet sensors_from_json(const ordered_json &j)
{
    SensorSet s;
    s.indices = j.at("indices").get<std::vector<Index>>();
    return s;
}

ordered_json to_json(const ReservoirNet &net)
{
    ordered_json j;
    j["size"] = net.size();
    j["inputs"] = net.input_dim();
    j["leak_rate"] = net.leak_rate;
    j["spectral_radius"] = net.spectral_radius;
    j["ridge_lambda"] = net.ridge_lambda;
    j["seed"] = net.seed;
    j["w_in"] = matrix_to_json(net.w_in);
    j["bias"] = vector_to_json(net.bias);
    std::vector<Index> rows, cols;
    std::vector<double> values;
    for (Index i = 0; i < net.w_res.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(net.w_res, i); it; ++it) {
            rows.push_back(it.row());
            cols.push_back(it.col());
            values.push_back(it.value());
        }
    }
    j["w_res"] = {{"rows", rows}, {"cols", cols}, {"values", values}};
    j["w_out"] = net.w_out ? matrix_to_json(*net.w_out) : ordered_json(nullptr);
    return j;
}

ReservoirNet reservoir_from_json(const ordered_json &j)
{
    ReservoirNet net;
    net.leak_rate = j.at("leak_rate").get<double>();
    net.spectral_radius = j.at("spectral_radius").get<double>();
    net.ridge_lambda = j.at("ridge_lambda").get<double>();
    net.seed = j.at("seed").get<std::uint64_t>();
    net.w_in = matrix_from_json(j.at("w_in"));
    net.bias = vector_from_json(j.at("bias"));
    const Index k = j.at("size").get<Index>();
    if (net.w_in.rows() != k || net.bias.size() != k) {
        throw Error(ErrorKind::Parse, "reservoir weights disagree on K");
    }
    const auto rows = j.at("w_res").at("rows").get<std::vector<Index>>();
    const auto cols = j.at("w_res").at("cols").get<std::vector<Index>>();
    const auto values = j.at("w_res").at("values").get<std::vector<double>>();
    if (rows.size() != cols.size() || rows.size() != values.size()) {
        throw Error(ErrorKind::Parse, "reservoir sparse matrix is inconsistent");
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= k || cols[i] < 0 || cols[i] >= k) {
            throw Error(ErrorKind::Parse, "reservoir sparse index out of range");
        }
        entries.emplace_back(rows[i], cols[i], values[i]);
    }
    net.w_res.resize(k, k);
    net.w_res.setFromTriplets(entries.begin(), entries.end());
    if (!j.at("w_out").is_null()) net.w_out = matrix_from_json(j.at("w_out"));
    return net;
}

void save_artifacts(const OfflineArtifacts &a, const std::filesystem::path &dir)
{
    ordered_json pod = to_json(a.pod());
    pod["fingerprint"] = a.fingerprint;
    ordered_json sensors = to_json(a.sensors());
    sensors["fingerprint"] = a.fingerprint;
    ordered_json estimator;
    estimator["fingerprint"] = a.fingerprint;
    estimator["theta"] = matrix_to_json(a.model.theta);
    estimator["theta_pinv"] = matrix_to_json(a.model.theta_pinv);
    estimator["kernel_basis"] = matrix_to_json(a.model.kernel_basis);
    estimator["noise_scale"] = vector_to_json(a.noise_scale);
    estimator["diagnostics"] = a.diagnostics;
    ordered_json net = to_json(a.net);
    net["fingerprint"] = a.fingerprint;

    write_json(dir / "pod.json", pod);
    write_json(dir / "sensors.json", sensors);
    write_json(dir / "estimator.json", estimator);
    write_json(dir / "reservoir.json", net);
}

OfflineArtifacts load_artifacts(const std::filesystem::path &dir)
{
    const ordered_json pod = read_json(dir / "pod.json");
    const ordered_json sensors = read_json(dir / "sensors.json");
    const ordered_json estimator = read_json(dir / "estimator.json");
    const ordered_json net = read_json(dir / "reservoir.json");

    OfflineArtifacts a;
    a.fingerprint = guarded(dir, [&] { return pod.at("fingerprint").get<std::string>(); });
    for (const ordered_json *j : {&sensors, &estimator, &net}) {
        const auto fp = guarded(dir, [&] { return j->at("fingerprint").get<std::string>(); });
        if (fp != a.fingerprint) {
            throw Error(ErrorKind::StaleArtifact,
                        "artifacts in " + dir.string() + " come from different configurations");
        }
    }
    guarded(dir, [&] {
        a.model.basis = pod_from_json(pod);
        a.model.sensors = sensors_from_json(sensors);
        a.model.theta = matrix_from_json(estimator.at("theta"));
        a.model.theta_pinv = matrix_from_json(estimator.at("theta_pinv"));
        a.model.kernel_basis = matrix_from_json(estimator.at("kernel_basis"));
        a.noise_scale = vector_from_json(estimator.at("noise_scale"));
        a.diagnostics = estimator.at("diagnostics");
        a.net = reservoir_from_json(net);
        return 0;
    });
    a.model.sensors.validate(a.model.state_dim());
    return a;
}

} // namespace sdeim
