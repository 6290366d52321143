#include "nafl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>

#include "nafl/error.hpp"

namespace nafl::sim {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void config_error(const std::string& what) {
    throw Error(ErrorKind::Configuration, what);
}

Vector to_vector(const json& j, const std::string& key) {
    if (!j.is_array()) {
        config_error("'" + key + "' must be an array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            config_error("'" + key + "' must be an array of numbers");
        }
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

json from_vector(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

Vector scale_angles(Vector v, const std::vector<plant::ChannelInfo>& channels, double factor) {
    for (std::size_t i = 0; i < channels.size() && static_cast<Eigen::Index>(i) < v.size(); ++i) {
        if (channels[i].is_angle) {
            v(static_cast<Eigen::Index>(i)) *= factor;
        }
    }
    return v;
}

Vector channel_vector(const json& doc, const std::string& key, const std::vector<plant::ChannelInfo>& channels) {
    if (!doc.contains(key)) {
        config_error("missing '" + key + "'");
    }
    Vector v = to_vector(doc.at(key), key);
    if (v.size() != static_cast<Eigen::Index>(channels.size())) {
        config_error("'" + key + "' needs " + std::to_string(channels.size()) + " entries");
    }
    return scale_angles(std::move(v), channels, kDeg);
}

Vector sized_or(const json& obj, const std::string& key, Eigen::Index n, double fill) {
    if (!obj.contains(key)) {
        return Vector::Constant(n, fill);
    }
    Vector v = to_vector(obj.at(key), key);
    if (v.size() != n) {
        config_error("'" + key + "' needs " + std::to_string(n) + " entries");
    }
    return v;
}

std::complex<double> pole_from_json(const json& p) {
    if (p.is_number()) {
        return {p.get<double>(), 0.0};
    }
    if (p.is_string()) {
        return parse_pole(p.get<std::string>());
    }
    if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
        return {p[0].get<double>(), p[1].get<double>()};
    }
    config_error("pole must be a number, a string like \"-2+2i\", or [re, im]");
}

ReferenceSpec parse_reference(const json& r, Eigen::Index m) {
    ReferenceSpec spec;
    const std::string kind = r.value("kind", std::string("constant"));
    if (kind == "constant") {
        spec.kind = ReferenceKind::Constant;
    } else if (kind == "linear-ramp") {
        spec.kind = ReferenceKind::LinearRamp;
    } else if (kind == "sinusoid") {
        spec.kind = ReferenceKind::Sinusoid;
    } else {
        config_error("unknown reference kind '" + kind + "'");
    }
    spec.offset = sized_or(r, "offset", m, 0.0);
    spec.slope = sized_or(r, "slope", m, 0.0);
    spec.amplitude = sized_or(r, "amplitude", m, 0.0);
    spec.omega = sized_or(r, "omega", m, 0.0);
    spec.phase = sized_or(r, "phase", m, 0.0);
    return spec;
}

std::string reference_kind_name(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::Constant: return "constant";
        case ReferenceKind::LinearRamp: return "linear-ramp";
        case ReferenceKind::Sinusoid: return "sinusoid";
    }
    return "constant";
}

control::GainSet parse_gains(const json& g, const plant::PlantEntry& entry, std::span<const int> alphas) {
    const auto m = alphas.size();
    std::vector<std::vector<double>> blocks;
    if (g.contains("k") == g.contains("poles")) {
        config_error("gains need exactly one of 'k' or 'poles'");
    }
    if (g.contains("k")) {
        const auto& k = g.at("k");
        if (!k.is_array() || k.size() != m) {
            config_error("'gains.k' needs one block per output");
        }
        for (const auto& block : k) {
            const Vector v = to_vector(block, "gains.k");
            blocks.emplace_back(v.data(), v.data() + v.size());
        }
    } else {
        const auto& poles = g.at("poles");
        if (!poles.is_array() || poles.size() != m) {
            config_error("'gains.poles' needs one pole set per output");
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!poles[i].is_array() || static_cast<int>(poles[i].size()) != alphas[i]) {
                config_error("pole set " + std::to_string(i) + " must have alpha_i poles");
            }
            std::vector<std::complex<double>> p;
            for (const auto& entry_pole : poles[i]) {
                p.push_back(pole_from_json(entry_pole));
            }
            blocks.push_back(control::pole_gains(p));
        }
    }

    Matrix k_s;
    if (!g.contains("k_s")) {
        k_s = entry.default_k_s * Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    } else if (g.at("k_s").is_number()) {
        k_s = g.at("k_s").get<double>() *
              Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    } else {
        const auto& rows = g.at("k_s");
        if (!rows.is_array() || rows.size() != m) {
            config_error("'gains.k_s' must be a scalar or an m x m array");
        }
        k_s.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            const Vector row = to_vector(rows[i], "gains.k_s");
            if (row.size() != static_cast<Eigen::Index>(m)) {
                config_error("'gains.k_s' must be m x m");
            }
            k_s.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }
    }

    const Vector integral = sized_or(g, "integral", static_cast<Eigen::Index>(m), 0.0);
    return control::make_gain_set(alphas, std::move(blocks), std::move(k_s),
                                  std::vector<double>(integral.data(), integral.data() + integral.size()));
}

} // namespace

std::complex<double> parse_pole(const std::string& text) {
    static const std::regex re(
        R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij])?\s*$)");
    std::smatch match;
    if (!std::regex_match(text, match, re)) {
        config_error("cannot parse pole '" + text + "'");
    }
    const double re_part = std::stod(match[1].str());
    double im_part = 0.0;
    if (match[2].matched) {
        im_part = match[3].matched ? std::stod(match[3].str()) : 1.0;
        if (match[2].str() == "-") {
            im_part = -im_part;
        }
    }
    return {re_part, im_part};
}

void ScenarioConfig::validate() const {
    const auto& entry = plant::find_plant(plant);
    const auto n = static_cast<Eigen::Index>(entry.states.size());
    const auto m = static_cast<Eigen::Index>(entry.controls.size());
    if (initial_state.size() != n || initial_controls.size() != m) {
        config_error("initial state/controls do not match plant '" + plant + "'");
    }
    if (!initial_state.allFinite() || !initial_controls.allFinite()) {
        config_error("initial state/controls must be finite");
    }
    if (!(dt > 0.0 && dt <= 0.02)) {
        config_error("dt must lie in (0, 0.02]");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        config_error("duration must be positive");
    }
    if (decimation < 1) {
        config_error("decimation must be >= 1");
    }
    for (const Vector* v : {&reference.offset, &reference.slope, &reference.amplitude, &reference.omega,
                            &reference.phase}) {
        if (v->size() != m || !v->allFinite()) {
            config_error("reference vectors need one finite entry per output");
        }
    }
    if (actuators.enabled) {
        if (actuators.tau.size() != m || !(actuators.tau.minCoeff() > 0.0)) {
            config_error("actuator time constants must be positive, one per control");
        }
        if (actuators.rate_limit && (actuators.rate_limit->size() != m || !(actuators.rate_limit->minCoeff() > 0.0))) {
            config_error("actuator rate limits must be positive, one per control");
        }
    }
    if (saturation.enabled) {
        if (saturation.lower.size() != m || saturation.upper.size() != m ||
            !(saturation.upper - saturation.lower).allFinite() || (saturation.upper - saturation.lower).minCoeff() < 0) {
            config_error("saturation bounds need lower <= upper, one per control");
        }
    }
    if (!(anti_windup > 0.0) || !(divergence_bound > 0.0)) {
        config_error("anti_windup and divergence_bound must be positive");
    }
    params.aero.validate();
    params.errors.validate();
}

ScenarioConfig parse_scenario(const json& doc) {
    if (!doc.is_object()) {
        config_error("scenario must be a JSON object");
    }
    try {
        ScenarioConfig c;
        c.name = doc.value("name", std::string("scenario"));
        if (!doc.contains("plant")) {
            config_error("missing 'plant'");
        }
        c.plant = doc.at("plant").get<std::string>();
        const auto& entry = plant::find_plant(c.plant);
        const auto m = static_cast<Eigen::Index>(entry.controls.size());

        c.initial_state = channel_vector(doc, "initial_state", entry.states);
        c.initial_controls = channel_vector(doc, "initial_controls", entry.controls);
        if (!doc.contains("reference")) {
            config_error("missing 'reference'");
        }
        c.reference = parse_reference(doc.at("reference"), m);

        if (doc.contains("aero")) {
            const auto& a = doc.at("aero");
            auto& aero = c.params.aero;
            aero.mass = a.value("mass", aero.mass);
            aero.S = a.value("S", aero.S);
            aero.T_max = a.value("T_max", aero.T_max);
            aero.g = a.value("g", aero.g);
            aero.rho = a.value("rho", aero.rho);
            aero.CL0 = a.value("CL0", aero.CL0);
            aero.CL_alpha = a.value("CL_alpha", aero.CL_alpha);
            aero.CD0 = a.value("CD0", aero.CD0);
            aero.k_induced = a.value("k_induced", aero.k_induced);
        }
        if (doc.contains("errors")) {
            const auto& e = doc.at("errors");
            auto& err = c.params.errors;
            err.thrust_scale = e.value("thrust_scale", err.thrust_scale);
            err.CL_scale = e.value("CL_scale", err.CL_scale);
            err.CD_scale = e.value("CD_scale", err.CD_scale);
            err.side_force_bias = e.value("side_force_bias", err.side_force_bias);
        }

        const auto model = entry.make(c.params);
        if (!doc.contains("gains")) {
            config_error("missing 'gains'");
        }
        c.gains = parse_gains(doc.at("gains"), entry, model->alphas());
        c.mode = control::parse_mode(doc.value("mode", std::string("full")));
        c.t0 = doc.value("t0", 0.0);
        c.duration = doc.value("duration", c.duration);
        c.dt = doc.value("dt", c.dt);
        c.decimation = doc.value("decimation", c.decimation);

        Vector default_tau(m), default_lower(m), default_upper(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& ch = entry.controls[static_cast<std::size_t>(i)];
            default_tau(i) = ch.tau;
            default_lower(i) = ch.lower.value_or(-std::numeric_limits<double>::infinity());
            default_upper(i) = ch.upper.value_or(std::numeric_limits<double>::infinity());
        }
        if (doc.contains("actuators")) {
            const auto& a = doc.at("actuators");
            c.actuators.enabled = a.value("enabled", true);
            c.actuators.tau = a.contains("tau") ? to_vector(a.at("tau"), "actuators.tau") : default_tau;
            if (a.contains("rate_limit")) {
                c.actuators.rate_limit = scale_angles(to_vector(a.at("rate_limit"), "actuators.rate_limit"),
                                                      entry.controls, kDeg);
            }
        } else {
            c.actuators.tau = default_tau;
        }
        if (doc.contains("saturation")) {
            const auto& s = doc.at("saturation");
            c.saturation.enabled = s.value("enabled", true);
            c.saturation.lower = s.contains("lower")
                                     ? scale_angles(to_vector(s.at("lower"), "saturation.lower"), entry.controls, kDeg)
                                     : default_lower;
            c.saturation.upper = s.contains("upper")
                                     ? scale_angles(to_vector(s.at("upper"), "saturation.upper"), entry.controls, kDeg)
                                     : default_upper;
        } else {
            c.saturation.lower = default_lower;
            c.saturation.upper = default_upper;
        }

        c.anti_windup = doc.value("anti_windup", c.anti_windup);
        c.divergence_bound = doc.value("divergence_bound", c.divergence_bound);
        c.seed = doc.value("seed", std::uint64_t{0});
        c.summary.settle_time = c.t0 + 0.8 * c.duration;
        if (doc.contains("summary")) {
            const auto& s = doc.at("summary");
            c.summary.settle_time = s.value("settle_time", c.summary.settle_time);
            c.summary.vs_threshold = s.value("vs_threshold", c.summary.vs_threshold);
            c.summary.steady_window = s.value("steady_window", c.summary.steady_window);
        }
        c.validate();
        return c;
    } catch (const json::exception& ex) {
        config_error(std::string("malformed scenario: ") + ex.what());
    }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Configuration, "cannot open scenario file " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        config_error(path.string() + ": " + ex.what());
    }
    auto config = parse_scenario(doc);
    if (!doc.contains("name")) {
        config.name = path.stem().string();
    }
    return config;
}

json scenario_to_json(const ScenarioConfig& c) {
    const auto& entry = plant::find_plant(c.plant);
    json doc;
    doc["name"] = c.name;
    doc["plant"] = c.plant;
    doc["initial_state"] = from_vector(scale_angles(c.initial_state, entry.states, 1.0 / kDeg));
    doc["initial_controls"] = from_vector(scale_angles(c.initial_controls, entry.controls, 1.0 / kDeg));

    json ref;
    ref["kind"] = reference_kind_name(c.reference.kind);
    ref["offset"] = from_vector(c.reference.offset);
    if (c.reference.kind == ReferenceKind::LinearRamp) {
        ref["slope"] = from_vector(c.reference.slope);
    } else if (c.reference.kind == ReferenceKind::Sinusoid) {
        ref["amplitude"] = from_vector(c.reference.amplitude);
        ref["omega"] = from_vector(c.reference.omega);
        ref["phase"] = from_vector(c.reference.phase);
    }
    doc["reference"] = ref;

    json gains;
    gains["k"] = c.gains.k_blocks;
    const auto m = c.gains.k_s.rows();
    const double ks0 = c.gains.k_s(0, 0);
    if (c.gains.k_s.isApprox(ks0 * Matrix::Identity(m, m), 0.0)) {
        gains["k_s"] = ks0;
    } else {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m; ++i) {
            rows.push_back(from_vector(c.gains.k_s.row(i).transpose()));
        }
        gains["k_s"] = rows;
    }
    gains["integral"] = c.gains.k_integral;
    doc["gains"] = gains;
    doc["mode"] = std::string(control::to_string(c.mode));
    doc["t0"] = c.t0;
    doc["duration"] = c.duration;
    doc["dt"] = c.dt;
    doc["decimation"] = c.decimation;

    const auto& a = c.params.aero;
    doc["aero"] = {{"mass", a.mass}, {"S", a.S},     {"T_max", a.T_max},       {"g", a.g},
                   {"rho", a.rho},   {"CL0", a.CL0}, {"CL_alpha", a.CL_alpha}, {"CD0", a.CD0},
                   {"k_induced", a.k_induced}};
    const auto& e = c.params.errors;
    doc["errors"] = {{"thrust_scale", e.thrust_scale},
                     {"CL_scale", e.CL_scale},
                     {"CD_scale", e.CD_scale},
                     {"side_force_bias", e.side_force_bias}};

    json act{{"enabled", c.actuators.enabled}, {"tau", from_vector(c.actuators.tau)}};
    if (c.actuators.rate_limit) {
        act["rate_limit"] = from_vector(scale_angles(*c.actuators.rate_limit, entry.controls, 1.0 / kDeg));
    }
    doc["actuators"] = act;
    json sat{{"enabled", c.saturation.enabled}};
    if (c.saturation.lower.allFinite() && c.saturation.upper.allFinite()) {
        sat["lower"] = from_vector(scale_angles(c.saturation.lower, entry.controls, 1.0 / kDeg));
        sat["upper"] = from_vector(scale_angles(c.saturation.upper, entry.controls, 1.0 / kDeg));
    }
    doc["saturation"] = sat;
    doc["anti_windup"] = c.anti_windup;
    doc["divergence_bound"] = c.divergence_bound;
    doc["seed"] = c.seed;
    doc["summary"] = {{"settle_time", c.summary.settle_time},
                      {"vs_threshold", c.summary.vs_threshold},
                      {"steady_window", c.summary.steady_window}};
    return doc;
}

const json& route_scenario_json() {
    // x axis: (s + 0.25)^3, y and h axes: (s + 0.45)^3 across (integral, position, rate).
    static const json doc = json::parse(R"({
  "name": "aircraft-route",
  "plant": "aircraft-3dof",
  "initial_state": [0.0, 0.0, 1000.0, 50.0, 0.0, 0.0],
  "initial_controls": [10.0, 0.0, 0.17],
  "reference": {"kind": "linear-ramp", "offset": [0.0, 50.0, 1050.0], "slope": [50.0, 0.0, 0.0]},
  "gains": {
    "k": [[0.1875, 0.75], [0.6075, 1.35], [0.6075, 1.35]],
    "k_s": 0.2,
    "integral": [0.015625, 0.091125, 0.091125]
  },
  "mode": "full",
  "duration": 25.0,
  "dt": 0.001,
  "decimation": 10,
  "errors": {"thrust_scale": 0.9, "CL_scale": 1.1, "CD_scale": 1.1, "side_force_bias": 0.0},
  "actuators": {"enabled": true, "tau": [0.1, 0.1, 0.5]},
  "saturation": {"enabled": true, "lower": [-5.0, -60.0, 0.0], "upper": [20.0, 60.0, 1.0]},
  "anti_windup": 10.0,
  "divergence_bound": 1000000.0,
  "seed": 0,
  "summary": {"settle_time": 20.0, "vs_threshold": 1e-8, "steady_window": 5.0}
})");
    return doc;
}

ScenarioConfig route_scenario() {
    return parse_scenario(route_scenario_json());
}

void disable_integral(ScenarioConfig& config) {
    std::fill(config.gains.k_integral.begin(), config.gains.k_integral.end(), 0.0);
}

void disable_errors(ScenarioConfig& config) {
    config.params.errors = aircraft::ErrorInjection::nominal();
}

} // namespace nafl::sim
