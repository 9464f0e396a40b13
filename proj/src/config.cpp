#include "sepmp/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sepmp/errors.hpp"
#include "sepmp/report.hpp"

namespace sepmp {

using nlohmann::json;

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.model.lambda0 = 1.0;
    c.model.drift_kind = DriftKind::MeanReverting;
    c.model.delta = 0.5;
    c.model.beta = 1.0;
    c.kernel.kind = MarkKind::Constant;
    c.kernel.constant = 0.5;
    c.kernel.mode = MarkMode::Predictable;
    c.state_alpha = 0.1;
    c.state_vol = 0.2;
    c.state_kappa = 0.1;
    return c;
}

namespace {

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c = defaults();

    if (j.contains("model")) {
        const json& m = j["model"];
        c.model.lambda0 = get_or(m, "lambda0", c.model.lambda0);
        std::string drift = get_or<std::string>(m, "drift", "mean_reverting");
        if (drift == "mean_reverting") {
            c.model.drift_kind = DriftKind::MeanReverting;
        } else if (drift == "zero") {
            c.model.drift_kind = DriftKind::Zero;
        } else {
            throw ConfigError("model.drift must be 'mean_reverting' or 'zero'");
        }
        c.model.delta = get_or(m, "delta", c.model.delta);
        c.model.beta = get_or(m, "beta", c.model.beta);
    }
    if (j.contains("kernel")) {
        const json& k = j["kernel"];
        std::string kind = get_or<std::string>(k, "kind", "constant");
        if (kind == "constant") {
            c.kernel.kind = MarkKind::Constant;
        } else if (kind == "shifted_exponential") {
            c.kernel.kind = MarkKind::ShiftedExponential;
        } else {
            throw ConfigError("kernel.kind must be 'constant' or 'shifted_exponential'");
        }
        c.kernel.constant = get_or(k, "constant", c.kernel.constant);
        c.kernel_rate = get_or(k, "rate", c.kernel_rate);
        c.kernel_shift = get_or(k, "shift", c.kernel_shift);
        std::string mode = get_or<std::string>(k, "mode", "predictable");
        if (mode == "predictable") {
            c.kernel.mode = MarkMode::Predictable;
        } else if (mode == "atjump") {
            c.kernel.mode = MarkMode::AtJump;
        } else {
            throw ConfigError("kernel.mode must be 'predictable' or 'atjump'");
        }
    }
    if (j.contains("state")) {
        const json& s = j["state"];
        c.state_alpha = get_or(s, "alpha", c.state_alpha);
        c.state_vol = get_or(s, "vol", c.state_vol);
        c.state_kappa = get_or(s, "kappa", c.state_kappa);
    }
    if (j.contains("logutility")) {
        const json& l = j["logutility"];
        c.logutil_theta = get_or(l, "theta", c.logutil_theta);
        c.logutil_x0 = get_or(l, "x0", c.logutil_x0);
        c.logutil_pi_min = get_or(l, "pi_min", c.logutil_pi_min);
        c.logutil_pi_max = get_or(l, "pi_max", c.logutil_pi_max);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        c.horizon = get_or(g, "horizon", c.horizon);
        c.base_steps = get_or<std::size_t>(g, "base_steps", c.base_steps);
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        c.mc_paths = get_or<std::size_t>(m, "paths", c.mc_paths);
        c.mc_inner_paths = get_or<std::size_t>(m, "inner_paths", c.mc_inner_paths);
        c.master_seed = get_or<std::uint64_t>(m, "master_seed", c.master_seed);
    }
    c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
    json j;
    j["model"] = {
        {"lambda0", model.lambda0},
        {"drift", model.drift_kind == DriftKind::MeanReverting ? "mean_reverting" : "zero"},
        {"delta", model.delta},
        {"beta", model.beta},
    };
    j["kernel"] = {
        {"kind", kernel.kind == MarkKind::Constant ? "constant" : "shifted_exponential"},
        {"constant", kernel.constant},
        {"rate", kernel_rate},
        {"shift", kernel_shift},
        {"mode", kernel.mode == MarkMode::Predictable ? "predictable" : "atjump"},
    };
    j["state"] = {{"alpha", state_alpha}, {"vol", state_vol}, {"kappa", state_kappa}};
    j["logutility"] = {{"theta", logutil_theta},
                       {"x0", logutil_x0},
                       {"pi_min", logutil_pi_min},
                       {"pi_max", logutil_pi_max}};
    j["grid"] = {{"horizon", horizon}, {"base_steps", base_steps}};
    j["mc"] = {{"paths", mc_paths},
               {"inner_paths", mc_inner_paths},
               {"master_seed", master_seed}};
    j["output_dir"] = output_dir;
    return j.dump(2);
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(serialize()); }

void ExperimentConfig::validate() const {
    model.validate();
    if (kernel.kind == MarkKind::Constant && !(kernel.constant > 0.0)) {
        throw ConfigError("kernel.constant must be > 0");
    }
    if (kernel.kind == MarkKind::ShiftedExponential) {
        if (!(kernel_rate > 0.0)) throw ConfigError("kernel.rate must be > 0");
        if (kernel_shift < 0.0) throw ConfigError("kernel.shift must be >= 0");
    }
    if (!(horizon > 0.0)) throw ConfigError("grid.horizon must be > 0");
    if (base_steps == 0) throw ConfigError("grid.base_steps must be > 0");
    if (mc_paths < 2) throw ConfigError("mc.paths must be >= 2");
    if (mc_inner_paths < 2) throw ConfigError("mc.inner_paths must be >= 2");
    if (state_kappa < 0.0) throw ConfigError("state.kappa must be >= 0");
    logutility().validate();
}

ProblemSetup ExperimentConfig::setup() const {
    ProblemSetup s;
    s.model = model;
    s.kernel = kernel;
    if (kernel.kind == MarkKind::ShiftedExponential) {
        double rate = kernel_rate;
        double shift = kernel_shift;
        s.kernel.rate_fn = [rate](double) { return rate; };
        s.kernel.shift_fn = [shift](double) { return shift; };
    }
    double a = state_alpha, v = state_vol, k = state_kappa;
    s.coeffs = StateCoefficients::log_linear([a](double) { return a; },
                                             [v](double) { return v; },
                                             [k](double) { return k; });
    s.x0 = logutil_x0;
    s.horizon = horizon;
    s.base_steps = base_steps;
    return s;
}

LogUtilityConfig ExperimentConfig::logutility() const {
    LogUtilityConfig l;
    ProblemSetup s = setup();
    l.model = s.model;
    l.kernel = s.kernel;
    l.alpha = s.coeffs.alpha;
    l.vol = s.coeffs.vol;
    l.kappa = s.coeffs.kappa;
    l.theta = logutil_theta;
    l.x0 = logutil_x0;
    l.horizon = horizon;
    l.pi_min = logutil_pi_min;
    l.pi_max = logutil_pi_max;
    l.base_steps = base_steps;
    return l;
}

}  // namespace sepmp
