#include "sdeim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sdeim
{

namespace pt = boost::property_tree;

void ExperimentConfig::validate() const
{
    system.validate();
    const Index n = system.dimension;
    if (!(sensors >= 1 && sensors < modes && modes <= n)) {
        std::ostringstream msg;
        msg << "need 1 <= r < m <= N, got r = " << sensors << ", m = " << modes
            << ", N = " << n;
        throw Error(ErrorKind::Config, msg.str());
    }
    if (!(noise_fraction >= 0.0)) throw Error(ErrorKind::Config, "noise_fraction must be >= 0");
    if (system.system != SystemTag::External) {
        for (double h : {horizons.pod, horizons.train, horizons.test}) {
            if (!(h >= system.dt_sample)) {
                throw Error(ErrorKind::Config, "every horizon must be at least dt_sample");
            }
        }
    } else if (external.pod.empty() || external.train.empty() || external.test.empty()) {
        throw Error(ErrorKind::Config,
                    "external system needs [external] pod, train and test snapshot files");
    }
    if (washout < 0) throw Error(ErrorKind::Config, "washout must be >= 0");
    if (!(transient >= 0.0)) throw Error(ErrorKind::Config, "transient must be >= 0");
}

ReservoirParams ExperimentConfig::reservoir_params() const
{
    ReservoirParams p = reservoir;
    p.seed = seeds.reservoir;
    return p;
}

ExperimentConfig ExperimentConfig::lorenz96()
{
    ExperimentConfig c;
    c.system = SystemConfig::lorenz96();
    c.modes = 20;
    c.sensors = 10;
    c.horizons = {1000.0, 2500.0, 200.0};
    c.output_dir = "out/lorenz96";
    return c;
}

ExperimentConfig ExperimentConfig::kuramoto_sivashinsky()
{
    ExperimentConfig c;
    c.system = SystemConfig::kuramoto_sivashinsky();
    c.modes = 15;
    c.sensors = 8;
    c.horizons = {1000.0, 6000.0, 200.0};
    c.output_dir = "out/ks";
    return c;
}

ExperimentConfig ExperimentConfig::preset(SystemTag tag)
{
    switch (tag) {
    case SystemTag::Lorenz96: return lorenz96();
    case SystemTag::KS: return kuramoto_sivashinsky();
    case SystemTag::External: break;
    }
    ExperimentConfig c = lorenz96();
    c.system.system = SystemTag::External;
    c.output_dir = "out/external";
    return c;
}

namespace
{

pt::ptree parse_ini(const std::string &text)
{
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw Error(ErrorKind::Config, std::string("config file: ") + e.what());
    }
    return tree;
}

template <typename T> T convert(const std::string &key, const std::string &value)
{
    std::istringstream in(value);
    T out{};
    in >> out;
    if (in.fail() || !(in >> std::ws).eof()) {
        throw Error(ErrorKind::Config, "config key " + key + ": cannot parse '" + value + "'");
    }
    return out;
}

bool convert_bool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw Error(ErrorKind::Config, "config key " + key + ": expected a boolean, got '" + value + "'");
}

} // namespace

std::optional<SystemTag> config_system_type(const std::string &ini_text)
{
    const pt::ptree tree = parse_ini(ini_text);
    if (auto type = tree.get_optional<std::string>("system.type")) {
        return parse_system_tag(*type);
    }
    return std::nullopt;
}

ExperimentConfig apply_config_text(const std::string &ini_text, ExperimentConfig c)
{
    const pt::ptree tree = parse_ini(ini_text);
    for (const auto &[section, entries] : tree) {
        if (entries.empty()) {
            throw Error(ErrorKind::Config, "config key '" + section + "' must sit inside a section");
        }
        for (const auto &[key, node] : entries) {
            const std::string name = section + "." + key;
            const std::string value = node.get_value<std::string>();
            auto real = [&] { return convert<double>(name, value); };
            auto integer = [&] { return convert<long long>(name, value); };
            auto seed = [&] { return convert<std::uint64_t>(name, value); };

            if (name == "system.type") c.system.system = parse_system_tag(value);
            else if (name == "system.N") c.system.dimension = integer();
            else if (name == "system.F") c.system.forcing = real();
            else if (name == "system.L") c.system.domain_length = real();
            else if (name == "system.dt_internal") c.system.dt_internal = real();
            else if (name == "system.dt_sample") c.system.dt_sample = real();
            else if (name == "system.burn_in") c.system.burn_in = real();
            else if (name == "experiment.m") c.modes = integer();
            else if (name == "experiment.r") c.sensors = integer();
            else if (name == "experiment.noise_fraction") c.noise_fraction = real();
            else if (name == "experiment.transient") c.transient = real();
            else if (name == "experiment.oracle_kernel") c.oracle_kernel = convert_bool(name, value);
            else if (name == "experiment.noisy_training") c.noisy_training = convert_bool(name, value);
            else if (name == "horizons.pod") c.horizons.pod = real();
            else if (name == "horizons.train") c.horizons.train = real();
            else if (name == "horizons.test") c.horizons.test = real();
            else if (name == "reservoir.size") c.reservoir.size = integer();
            else if (name == "reservoir.density") c.reservoir.density = real();
            else if (name == "reservoir.spectral_radius") c.reservoir.spectral_radius = real();
            else if (name == "reservoir.leak_rate") c.reservoir.leak_rate = real();
            else if (name == "reservoir.ridge_lambda") c.reservoir.ridge_lambda = real();
            else if (name == "reservoir.washout") c.washout = integer();
            else if (name == "seeds.pod_traj") c.seeds.pod_traj = seed();
            else if (name == "seeds.train_traj") c.seeds.train_traj = seed();
            else if (name == "seeds.test_traj") c.seeds.test_traj = seed();
            else if (name == "seeds.reservoir") c.seeds.reservoir = seed();
            else if (name == "seeds.noise") c.seeds.noise = seed();
            else if (name == "external.pod") c.external.pod = value;
            else if (name == "external.train") c.external.train = value;
            else if (name == "external.test") c.external.test = value;
            else if (name == "output.dir") c.output_dir = value;
            else throw Error(ErrorKind::Config, "unknown config key '" + name + "'");
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path, std::optional<SystemTag> fallback)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const SystemTag tag = config_system_type(text).value_or(fallback.value_or(SystemTag::Lorenz96));
    return apply_config_text(text, ExperimentConfig::preset(tag));
}

nlohmann::ordered_json to_json(const ExperimentConfig &c)
{
    nlohmann::ordered_json j;
    j["system"] = {
        {"type", std::string(to_string(c.system.system))},
        {"N", c.system.dimension},
        {"F", c.system.forcing},
        {"L", c.system.domain_length},
        {"dt_internal", c.system.dt_internal},
        {"dt_sample", c.system.dt_sample},
        {"burn_in", c.system.burn_in},
    };
    j["experiment"] = {
        {"m", c.modes},
        {"r", c.sensors},
        {"noise_fraction", c.noise_fraction},
        {"transient", c.transient},
        {"oracle_kernel", c.oracle_kernel},
        {"noisy_training", c.noisy_training},
    };
    j["horizons"] = {{"pod", c.horizons.pod}, {"train", c.horizons.train}, {"test", c.horizons.test}};
    j["reservoir"] = {
        {"size", c.reservoir.size},
        {"density", c.reservoir.density},
        {"spectral_radius", c.reservoir.spectral_radius},
        {"leak_rate", c.reservoir.leak_rate},
        {"ridge_lambda", c.reservoir.ridge_lambda},
        {"washout", c.washout},
    };
    j["seeds"] = {
        {"pod_traj", c.seeds.pod_traj},
        {"train_traj", c.seeds.train_traj},
        {"test_traj", c.seeds.test_traj},
        {"reservoir", c.seeds.reservoir},
        {"noise", c.seeds.noise},
    };
    j["external"] = {{"pod", c.external.pod}, {"train", c.external.train}, {"test", c.external.test}};
    j["output"] = {{"dir", c.output_dir.generic_string()}};
    return j;
}

std::string offline_fingerprint(const ExperimentConfig &c)
{
    nlohmann::ordered_json j = to_json(c);
    j["horizons"].erase("test");
    j["seeds"].erase("test_traj");
    j["seeds"].erase("noise");
    j["experiment"].erase("oracle_kernel");
    j["experiment"].erase("transient");
    j["external"].erase("test");
    j.erase("output");
    const std::string text = j.dump();

    // FNV-1a, 64 bit.
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace sdeim
