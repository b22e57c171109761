#include "config.hpp"

#include "slung/errors.hpp"

#include <fstream>
#include <set>

namespace slung::cli {

using nlohmann::json;

namespace {

/// Walks one JSON object, remembering the path for diagnostics and rejecting unknown keys.
class Section {
public:
    Section(const json& j, std::string path, std::set<std::string> keys) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
        for (const auto& [k, _] : j_.items()) {
            if (!keys.count(k)) throw ConfigError(field(k) + ": unknown key");
        }
    }

    bool has(const std::string& k) const { return j_.contains(k); }
    const json& at(const std::string& k) const { return j_.at(k); }
    std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    void get(const std::string& k, double& out) const {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (!v.is_number()) throw ConfigError(field(k) + ": expected a number");
        out = v.get<double>();
    }

    void get(const std::string& k, bool& out) const {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (!v.is_boolean()) throw ConfigError(field(k) + ": expected true or false");
        out = v.get<bool>();
    }

    void get(const std::string& k, std::string& out) const {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (!v.is_string()) throw ConfigError(field(k) + ": expected a string");
        out = v.get<std::string>();
    }

    template <typename Int>
    void get_int(const std::string& k, Int& out) const {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(field(k) + ": expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_integer() && v.get<long long>() < 0) throw ConfigError(field(k) + ": must be non-negative");
        }
        out = v.get<Int>();
    }

    void get(const std::string& k, Vector3& out) const {
        if (!has(k)) return;
        out = vec(j_.at(k), field(k), 3);
    }

    void get(const std::string& k, Quaternion& out) const {
        if (!has(k)) return;
        const Eigen::VectorXd v = vec(j_.at(k), field(k), 4);
        out = {v(0), v(1), v(2), v(3)};
    }

    static Eigen::VectorXd vec(const json& v, const std::string& name, int n) {
        if (!v.is_array() || static_cast<int>(v.size()) != n) {
            throw ConfigError(name + ": expected an array of " + std::to_string(n) + " numbers");
        }
        Eigen::VectorXd out(n);
        for (int i = 0; i < n; ++i) {
            if (!v[i].is_number()) throw ConfigError(name + ": expected an array of " + std::to_string(n) + " numbers");
            out(i) = v[i].get<double>();
        }
        return out;
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
};

json to_json(const Vector3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }
json to_json(const DualVector& d) { return {{"real", to_json(d.real)}, {"dual", to_json(d.dual)}}; }

json to_json(const Matrix3& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return rows;
}

DualVector read_dual(const Section& s, const std::string& k, DualVector out) {
    if (!s.has(k)) return out;
    Section d(s.at(k), s.field(k), {"real", "dual"});
    d.get("real", out.real);
    d.get("dual", out.dual);
    return out;
}

Matrix3 read_matrix(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(name + ": expected a 3x3 array");
    Matrix3 m;
    for (int i = 0; i < 3; ++i) m.row(i) = Section::vec(v[i], name + "[" + std::to_string(i) + "]", 3).transpose();
    return m;
}

const char* integrator_name(Integrator i) { return i == Integrator::RK4 ? "rk4" : "euler"; }

Integrator integrator_from(const std::string& s, const std::string& field) {
    if (s == "rk4") return Integrator::RK4;
    if (s == "euler") return Integrator::Euler;
    throw ConfigError(field + ": expected \"rk4\" or \"euler\"");
}

const std::pair<unsigned, const char*> kTargets[] = {
    {kNoiseUavMass, "m_v"},          {kNoiseLoadMass, "m_l"},         {kNoiseCableLength, "l"},
    {kNoiseInertia, "J_v"},          {kNoiseForceInput, "force_input"}, {kNoiseTorqueInput, "torque_input"},
};

bool same(const DualVector& a, const DualVector& b) { return a.real == b.real && a.dual == b.dual; }

} // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    const Scenario& x = a.scenario;
    const Scenario& y = b.scenario;
    return x.params.uav.mass == y.params.uav.mass && x.params.uav.inertia == y.params.uav.inertia &&
           x.params.load_mass == y.params.load_mass && x.params.cable_length == y.params.cable_length &&
           same(x.slack_gains.kp, y.slack_gains.kp) && same(x.slack_gains.kv, y.slack_gains.kv) &&
           same(x.taut_gains.kp_load, y.taut_gains.kp_load) && same(x.taut_gains.kv_load, y.taut_gains.kv_load) &&
           x.taut_gains.kp_att == y.taut_gains.kp_att && x.taut_gains.kv_att == y.taut_gains.kv_att &&
           x.mission == y.mission && x.guards == y.guards && x.sim == y.sim && x.noise == y.noise &&
           x.rate_filter == y.rate_filter && x.uav_initial_position == y.uav_initial_position &&
           x.uav_initial_attitude == y.uav_initial_attitude && x.load_initial_position == y.load_initial_position &&
           a.runs == b.runs && a.threads == b.threads && a.out_dir == b.out_dir;
}

RunConfig default_config() { return RunConfig{}; }

RunConfig config_from_json(const json& j) {
    RunConfig c;
    Scenario& sc = c.scenario;
    Section root(j, "", {"uav", "load", "controller", "trajectory", "guards", "sim", "noise", "montecarlo", "output"});
    auto section = [&](const std::string& k, std::set<std::string> keys) {
        static const json empty = json::object();
        return Section(root.has(k) ? root.at(k) : empty, k, std::move(keys));
    };

    double mv = sc.params.uav.mass;
    Matrix3 J = sc.params.uav.inertia;
    const Section uav = section("uav", {"mass", "inertia", "initial_position", "initial_attitude"});
    uav.get("mass", mv);
    if (uav.has("inertia")) J = read_matrix(uav.at("inertia"), "uav.inertia");
    uav.get("initial_attitude", sc.uav_initial_attitude);

    const Section load = section("load", {"mass", "cable_length", "initial_position"});
    load.get("mass", sc.params.load_mass);
    load.get("cable_length", sc.params.cable_length);
    load.get("initial_position", sc.load_initial_position);
    const double l = sc.params.cable_length;
    // Positions that default to multiples of the cable length follow an overridden length.
    sc.uav_initial_position = Vector3(0.5 * l, 0.0, 0.0);
    sc.mission.setup_position = Vector3(0.0, 0.0, l);
    sc.mission.raise_height = 3.0 * l;
    uav.get("initial_position", sc.uav_initial_position);

    if (!(mv > 0.0) || !std::isfinite(mv)) throw ConfigError("uav.mass: must be positive");
    try {
        sc.params.uav = RigidBodyParams::make(mv, J);
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("uav.inertia: ") + e.what());
    }

    const Section ctl = section("controller", {"kpv", "kvv", "kpl", "kvl", "rate_filter"});
    sc.slack_gains.kp = read_dual(ctl, "kpv", sc.slack_gains.kp);
    sc.slack_gains.kv = read_dual(ctl, "kvv", sc.slack_gains.kv);
    sc.taut_gains.kp_load = read_dual(ctl, "kpl", sc.taut_gains.kp_load);
    sc.taut_gains.kv_load = read_dual(ctl, "kvl", sc.taut_gains.kv_load);
    sc.taut_gains.kp_att = sc.slack_gains.kp.real;
    sc.taut_gains.kv_att = sc.slack_gains.kv.real;
    ctl.get("rate_filter", sc.rate_filter);

    const Section tr = section("trajectory", {"setup_attitude", "setup_position", "raise_height", "raise_profile",
                                              "raise_speed", "track_profile", "track_duration"});
    tr.get("setup_attitude", sc.mission.setup_attitude);
    tr.get("setup_position", sc.mission.setup_position);
    tr.get("raise_height", sc.mission.raise_height);
    tr.get("raise_speed", sc.mission.raise_speed);
    tr.get("track_duration", sc.mission.track_duration);
    std::string s;
    if (tr.has("raise_profile")) {
        tr.get("raise_profile", s);
        if (s == "sinusoidal") sc.mission.raise_profile = RaiseProfile::Sinusoidal;
        else if (s == "constant_rate") sc.mission.raise_profile = RaiseProfile::ConstantRate;
        else throw ConfigError("trajectory.raise_profile: expected \"sinusoidal\" or \"constant_rate\"");
    }
    if (tr.has("track_profile")) {
        tr.get("track_profile", s);
        if (s == "velocity") sc.mission.track_profile = TrackProfile::Velocity;
        else if (s == "position") sc.mission.track_profile = TrackProfile::Position;
        else throw ConfigError("trajectory.track_profile: expected \"velocity\" or \"position\"");
    }

    const Section gd = section("guards", {"cable_tol", "stability_tol_logq", "stability_tol_twist", "height_tol",
                                          "min_raise_time"});
    gd.get("cable_tol", sc.guards.cable_tol);
    gd.get("stability_tol_logq", sc.guards.stability_tol_logq);
    gd.get("stability_tol_twist", sc.guards.stability_tol_twist);
    gd.get("height_tol", sc.guards.height_tol);
    gd.get("min_raise_time", sc.guards.min_raise_time);

    const Section sim = section("sim", {"dt", "horizon", "integrator", "renormalize", "seed", "gravity"});
    sim.get("dt", sc.sim.dt);
    sim.get("horizon", sc.sim.horizon);
    sc.mission.horizon = sc.sim.horizon;
    if (sim.has("integrator")) {
        sim.get("integrator", s);
        sc.sim.integrator = integrator_from(s, "sim.integrator");
    }
    sim.get("renormalize", sc.sim.renormalize);
    sim.get_int("seed", sc.sim.seed);
    sim.get("gravity", sc.sim.gravity);

    const Section nz = section("noise", {"enabled", "snr", "snr_unit", "targets", "per_run_reseed", "scope"});
    nz.get("enabled", sc.noise.enabled);
    nz.get("snr", sc.noise.snr);
    if (nz.has("snr_unit")) {
        nz.get("snr_unit", s);
        if (s == "db") sc.noise.snr_linear = false;
        else if (s == "linear") sc.noise.snr_linear = true;
        else throw ConfigError("noise.snr_unit: expected \"db\" or \"linear\"");
    }
    if (nz.has("targets")) {
        const json& t = nz.at("targets");
        if (!t.is_array()) throw ConfigError("noise.targets: expected an array of names");
        sc.noise.targets = 0;
        for (const auto& name : t) {
            bool found = false;
            for (const auto& [bit, n] : kTargets) {
                if (name.is_string() && name.get<std::string>() == n) {
                    sc.noise.targets |= bit;
                    found = true;
                }
            }
            if (!found) throw ConfigError("noise.targets: unknown target " + name.dump());
        }
    }
    nz.get("per_run_reseed", sc.noise.per_run_reseed);
    if (nz.has("scope")) {
        nz.get("scope", s);
        if (s == "shared") sc.noise.scope = NoiseScope::Shared;
        else if (s == "plant_only") sc.noise.scope = NoiseScope::PlantOnly;
        else throw ConfigError("noise.scope: expected \"shared\" or \"plant_only\"");
    }

    const Section mc = section("montecarlo", {"runs", "threads"});
    mc.get_int("runs", c.runs);
    mc.get_int("threads", c.threads);

    const Section out = section("output", {"dir"});
    out.get("dir", c.out_dir);

    validate(c);
    return c;
}

json config_to_json(const RunConfig& c) {
    const Scenario& sc = c.scenario;
    json targets = json::array();
    for (const auto& [bit, n] : kTargets) {
        if (sc.noise.targets & bit) targets.push_back(n);
    }
    json j;
    j["uav"] = {{"mass", sc.params.uav.mass},
                {"inertia", to_json(sc.params.uav.inertia)},
                {"initial_position", to_json(sc.uav_initial_position)},
                {"initial_attitude", to_json(sc.uav_initial_attitude)}};
    j["load"] = {{"mass", sc.params.load_mass},
                 {"cable_length", sc.params.cable_length},
                 {"initial_position", to_json(sc.load_initial_position)}};
    j["controller"] = {{"kpv", to_json(sc.slack_gains.kp)},
                       {"kvv", to_json(sc.slack_gains.kv)},
                       {"kpl", to_json(sc.taut_gains.kp_load)},
                       {"kvl", to_json(sc.taut_gains.kv_load)},
                       {"rate_filter", sc.rate_filter}};
    j["trajectory"] = {
        {"setup_attitude", to_json(sc.mission.setup_attitude)},
        {"setup_position", to_json(sc.mission.setup_position)},
        {"raise_height", sc.mission.raise_height},
        {"raise_profile", sc.mission.raise_profile == RaiseProfile::Sinusoidal ? "sinusoidal" : "constant_rate"},
        {"raise_speed", sc.mission.raise_speed},
        {"track_profile", sc.mission.track_profile == TrackProfile::Velocity ? "velocity" : "position"},
        {"track_duration", sc.mission.track_duration}};
    j["guards"] = {{"cable_tol", sc.guards.cable_tol},
                   {"stability_tol_logq", sc.guards.stability_tol_logq},
                   {"stability_tol_twist", sc.guards.stability_tol_twist},
                   {"height_tol", sc.guards.height_tol},
                   {"min_raise_time", sc.guards.min_raise_time}};
    j["sim"] = {{"dt", sc.sim.dt},
                {"horizon", sc.sim.horizon},
                {"integrator", integrator_name(sc.sim.integrator)},
                {"renormalize", sc.sim.renormalize},
                {"seed", sc.sim.seed},
                {"gravity", sc.sim.gravity}};
    j["noise"] = {{"enabled", sc.noise.enabled},
                  {"snr", sc.noise.snr},
                  {"snr_unit", sc.noise.snr_linear ? "linear" : "db"},
                  {"targets", targets},
                  {"per_run_reseed", sc.noise.per_run_reseed},
                  {"scope", sc.noise.scope == NoiseScope::Shared ? "shared" : "plant_only"}};
    j["montecarlo"] = {{"runs", c.runs}, {"threads", c.threads}};
    j["output"] = {{"dir", c.out_dir}};
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return config_from_json(j);
}

void validate(const RunConfig& c) {
    if (c.runs < 1) throw ConfigError("montecarlo.runs: must be at least 1");
    if (c.out_dir.empty()) throw ConfigError("output.dir: must not be empty");
    if (c.scenario.mission.horizon != c.scenario.sim.horizon) {
        throw ConfigError("sim.horizon: mission and simulation horizons differ");
    }
    try {
        c.scenario.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

} // namespace slung::cli
