#include "lattice/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lattice/error.hpp"

namespace lattice {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"params", {"nu", "lambda", "n", "n_list", "n_ref", "work_width"}},
        {"nonlinearity", {"name", "alpha", "slope", "rho_max"}},
        {"forcing",
         {"amplitude0", "decay_rate", "support", "support_width", "frequency_rule", "phase_rule", "treatment"}},
        {"integrator", {"step", "t0", "t1", "stride"}},
        {"initial", {"kind", "norm"}},
        {"attractor",
         {"system", "epsilon", "ic_count", "sample_count", "window", "ic_radius", "fiber_shift", "tail_eps",
          "threshold", "boundary_floor", "reference_ic_width"}},
        {"verify",
         {"max_matrix_order", "equivariance_trials", "cocycle_t", "cocycle_tau", "cocycle_step", "energy_margin",
          "energy_trials", "energy_horizon"}},
        {"run", {"seed", "threads"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        fail(ErrorKind::Config, "key '" + key + "': expected a finite number, got '" + text + "'");
    }
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
        fail(ErrorKind::Config, "key '" + key + "': expected an integer, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < -1'000'000'000LL || v > 1'000'000'000LL) {
        fail(ErrorKind::Config, "key '" + key + "': integer out of range");
    }
    return static_cast<int>(v);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
    if (out.empty()) fail(ErrorKind::Config, "key '" + key + "': empty list");
    return out;
}

/// "constant:<x>" or "list:<x0>,<x1>,..." (entries indexed by |i|)
std::vector<double> to_rule(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
        fail(ErrorKind::Config, "key '" + key + "': expected constant:<x> or list:<x0>,<x1>,...");
    }
    const std::string kind = trim(t.substr(0, colon));
    const std::string body = t.substr(colon + 1);
    if (kind == "constant") return {to_double(key, body)};
    if (kind == "list") return to_double_list(key, body);
    fail(ErrorKind::Config, "key '" + key + "': unknown rule '" + kind + "'");
}

template <typename Enum>
Enum to_enum(const std::string& key, const std::string& text, const std::map<std::string, Enum>& options) {
    const auto it = options.find(trim(text));
    if (it == options.end()) {
        std::string names;
        for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + name;
        fail(ErrorKind::Config, "key '" + key + "': expected one of " + names + ", got '" + text + "'");
    }
    return it->second;
}

void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::Parameter, what);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::Config, std::string("config syntax error: ") + e.what());
    }

    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        const auto known = schema().find(section);
        if (known == schema().end()) {
            if (body.empty()) fail(ErrorKind::Config, "config keys must live inside a [section]: '" + section + "'");
            fail(ErrorKind::Config, "unknown config section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            if (!known->second.contains(key)) {
                fail(ErrorKind::Config, "unknown key '" + key + "' in section [" + section + "]");
            }
            const std::string value = node.data();
            const std::string name = section + "." + key;
            if (section == "params") {
                if (key == "nu") cfg.nu = to_double(name, value);
                else if (key == "lambda") cfg.lambda = to_double(name, value);
                else if (key == "n") cfg.n = to_int(name, value);
                else if (key == "n_list") {
                    cfg.n_list.clear();
                    for (const auto& item : split_list(value)) cfg.n_list.push_back(to_int(name, item));
                } else if (key == "n_ref") cfg.n_ref = to_int(name, value);
                else if (key == "work_width") cfg.work_width = to_int(name, value);
            } else if (section == "nonlinearity") {
                if (key == "name") cfg.nonlinearity = trim(value);
                else if (key == "alpha") cfg.alpha = to_double(name, value);
                else if (key == "slope") cfg.slope = to_double(name, value);
                else if (key == "rho_max") cfg.rho_max = to_double(name, value);
            } else if (section == "forcing") {
                if (key == "amplitude0") cfg.forcing.amplitude0 = to_double(name, value);
                else if (key == "decay_rate") cfg.forcing.decay_rate = to_double(name, value);
                else if (key == "support") {
                    cfg.forcing.support = to_enum<ForcingSpec::Support>(
                        name, value, {{"finite", ForcingSpec::Support::Finite},
                                      {"geometric", ForcingSpec::Support::Geometric}});
                } else if (key == "support_width") cfg.forcing.support_width = to_int(name, value);
                else if (key == "frequency_rule") cfg.forcing.frequencies = to_rule(name, value);
                else if (key == "phase_rule") cfg.forcing.phases = to_rule(name, value);
                else if (key == "treatment") {
                    cfg.treatment = to_enum<attractor::ForcingTreatment>(
                        name, value,
                        {{"wrap", attractor::ForcingTreatment::Wrap}, {"project", attractor::ForcingTreatment::Project}});
                }
            } else if (section == "integrator") {
                if (key == "step") {
                    cfg.step = trim(value) == "auto" ? 0.0 : to_double(name, value);
                } else if (key == "t0") cfg.t0 = to_double(name, value);
                else if (key == "t1") cfg.t1 = to_double(name, value);
                else if (key == "stride") cfg.stride = to_int(name, value);
            } else if (section == "initial") {
                if (key == "kind") {
                    cfg.initial = to_enum<InitialKind>(name, value,
                                                       {{"random", InitialKind::Random},
                                                        {"delta", InitialKind::Delta},
                                                        {"constant", InitialKind::Constant},
                                                        {"zero", InitialKind::Zero}});
                } else if (key == "norm") cfg.initial_norm = to_double(name, value);
            } else if (section == "attractor") {
                if (key == "system") {
                    cfg.system = to_enum<AttractorSystem>(
                        name, value, {{"finite", AttractorSystem::Finite}, {"reference", AttractorSystem::Reference}});
                } else if (key == "epsilon") cfg.epsilon = to_double(name, value);
                else if (key == "ic_count") cfg.ic_count = to_int(name, value);
                else if (key == "sample_count") cfg.sample_count = to_int(name, value);
                else if (key == "window") cfg.window = to_double(name, value);
                else if (key == "ic_radius") cfg.ic_radius = to_double(name, value);
                else if (key == "fiber_shift") cfg.fiber_shift = to_double(name, value);
                else if (key == "tail_eps") cfg.tail_eps = to_double_list(name, value);
                else if (key == "threshold") cfg.threshold = to_double(name, value);
                else if (key == "boundary_floor") cfg.boundary_floor = to_double(name, value);
                else if (key == "reference_ic_width") cfg.reference_ic_width = to_int(name, value);
            } else if (section == "verify") {
                if (key == "max_matrix_order") cfg.max_matrix_order = to_int(name, value);
                else if (key == "equivariance_trials") cfg.equivariance_trials = to_int(name, value);
                else if (key == "cocycle_t") cfg.cocycle_t = to_double(name, value);
                else if (key == "cocycle_tau") cfg.cocycle_tau = to_double(name, value);
                else if (key == "cocycle_step") cfg.cocycle_step = to_double(name, value);
                else if (key == "energy_margin") cfg.energy_margin = to_double(name, value);
                else if (key == "energy_trials") cfg.energy_trials = to_int(name, value);
                else if (key == "energy_horizon") cfg.energy_horizon = to_double(name, value);
            } else if (section == "run") {
                if (key == "seed") {
                    const long long s = to_integer(name, value);
                    if (s < 0) fail(ErrorKind::Config, "run.seed must be >= 0");
                    cfg.seed = static_cast<std::uint64_t>(s);
                } else if (key == "threads") cfg.threads = to_int(name, value);
            }
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
    require(cfg.lambda > 0.0, "params.lambda must be > 0");
    require(cfg.nu >= 0.0, "params.nu must be >= 0");
    require(cfg.n >= 1, "params.n must be >= 1");
    for (int n : cfg.n_list) require(n >= 1, "params.n_list entries must be >= 1");
    require(!cfg.n_ref || *cfg.n_ref >= 2, "params.n_ref must be >= 2");
    require(cfg.work_width >= 0, "params.work_width must be >= 0");
    require(cfg.alpha >= 0.0, "nonlinearity.alpha must be >= 0");
    require(cfg.rho_max > 0.0, "nonlinearity.rho_max must be > 0");
    require(cfg.step >= 0.0, "integrator.step must be >= 0 (0 or auto selects the stable step)");
    require(cfg.t1 >= cfg.t0, "integrator.t1 must be >= t0");
    require(cfg.stride >= 0, "integrator.stride must be >= 0");
    require(cfg.initial_norm >= 0.0, "initial.norm must be >= 0");
    require(cfg.epsilon > 0.0, "attractor.epsilon must be > 0");
    require(cfg.ic_count >= 1 && cfg.ic_count <= 4096, "attractor.ic_count must be in [1, 4096]");
    require(cfg.sample_count >= 1 && cfg.sample_count <= 4096, "attractor.sample_count must be in [1, 4096]");
    require(cfg.window >= 0.0, "attractor.window must be >= 0");
    require(cfg.ic_radius >= 0.0, "attractor.ic_radius must be >= 0");
    for (double e : cfg.tail_eps) require(e > 0.0, "attractor.tail_eps entries must be > 0");
    require(cfg.threshold > 0.0, "attractor.threshold must be > 0");
    require(cfg.boundary_floor > 0.0, "attractor.boundary_floor must be > 0");
    require(cfg.reference_ic_width >= 0, "attractor.reference_ic_width must be >= 0");
    require(cfg.max_matrix_order >= 1, "verify.max_matrix_order must be >= 1");
    require(cfg.equivariance_trials >= 1, "verify.equivariance_trials must be >= 1");
    require(cfg.cocycle_t >= 0.0 && cfg.cocycle_tau >= 0.0, "verify.cocycle_t and cocycle_tau must be >= 0");
    require(cfg.cocycle_step > 0.0, "verify.cocycle_step must be > 0");
    require(cfg.energy_margin >= 0.0, "verify.energy_margin must be >= 0");
    require(cfg.energy_trials >= 1, "verify.energy_trials must be >= 1");
    require(cfg.energy_horizon > 0.0, "verify.energy_horizon must be > 0");
    require(cfg.threads >= 1, "run.threads must be >= 1");
}

attractor::SamplingOptions sampling_options(const ExperimentConfig& cfg) {
    attractor::SamplingOptions o;
    o.epsilon = cfg.epsilon;
    o.ic_count = cfg.ic_count;
    o.sample_count = cfg.sample_count;
    o.window = cfg.window;
    o.step = cfg.step;
    o.ic_radius = cfg.ic_radius;
    o.fiber_shift = cfg.fiber_shift;
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    o.treatment = cfg.treatment;
    o.reference_ic_width = cfg.reference_ic_width;
    return o;
}

}  // namespace lattice
