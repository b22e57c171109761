#include "slung/sim.hpp"

#include "slung/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace slung {

namespace {

using SlackVec = Eigen::Matrix<double, 20, 1>;
using TautVec = Eigen::Matrix<double, 19, 1>;

void put(Eigen::Ref<Eigen::VectorXd> x, int i, const Quaternion& q) { x.segment<4>(i) << q.w, q.x, q.y, q.z; }
void put(Eigen::Ref<Eigen::VectorXd> x, int i, const Vector3& v) { x.segment<3>(i) = v; }
Quaternion quat_at(const Eigen::Ref<const Eigen::VectorXd>& x, int i) { return {x(i), x(i + 1), x(i + 2), x(i + 3)}; }

SlackVec pack(const SlackState& s) {
    SlackVec x;
    put(x, 0, s.uav.pose.real);
    put(x, 4, s.uav.pose.dual);
    put(x, 8, s.uav.twist.real);
    put(x, 11, s.uav.twist.dual);
    put(x, 14, s.load_pos);
    put(x, 17, s.load_vel);
    return x;
}

SlackVec pack(const SlackDerivative& d) {
    SlackVec x;
    put(x, 0, d.pose_dot.real);
    put(x, 4, d.pose_dot.dual);
    put(x, 8, d.twist_dot.real);
    put(x, 11, d.twist_dot.dual);
    put(x, 14, d.load_pos_dot);
    put(x, 17, d.load_vel_dot);
    return x;
}

SlackState unpack_slack(const SlackVec& x) {
    SlackState s;
    s.uav.pose = {quat_at(x, 0), quat_at(x, 4)};
    s.uav.twist = {x.segment<3>(8), x.segment<3>(11)};
    s.load_pos = x.segment<3>(14);
    s.load_vel = x.segment<3>(17);
    return s;
}

TautVec pack(const TautState& s) {
    TautVec x;
    put(x, 0, s.load_config.real);
    put(x, 3, s.load_config.dual);
    put(x, 6, s.load_twist.real);
    put(x, 9, s.load_twist.dual);
    put(x, 12, s.uav_attitude);
    put(x, 16, s.uav_omega);
    return x;
}

TautVec pack(const TautDerivative& d) {
    TautVec x;
    put(x, 0, d.config_dot.real);
    put(x, 3, d.config_dot.dual);
    put(x, 6, d.twist_dot.real);
    put(x, 9, d.twist_dot.dual);
    put(x, 12, d.attitude_dot);
    put(x, 16, d.omega_dot);
    return x;
}

TautState unpack_taut(const TautVec& x) {
    TautState s;
    s.load_config = {x.segment<3>(0), x.segment<3>(3)};
    s.load_twist = {x.segment<3>(6), x.segment<3>(9)};
    s.uav_attitude = quat_at(x, 12);
    s.uav_omega = x.segment<3>(16);
    return s;
}

void renormalize(SlackState& s) { s.uav.pose = normalize_pose(s.uav.pose); }

void renormalize(TautState& s) {
    Vector3 q = s.load_config.real.normalized();
    s.load_config.real = q;
    s.load_twist.real -= s.load_twist.real.dot(q) * q;
    s.uav_attitude = s.uav_attitude.normalized();
}

Vector3 cable_direction(const Vector3& uav, const Vector3& load) {
    const Vector3 rel = uav - load;
    const double n = rel.norm();
    return n > 1e-12 ? Vector3(rel / n) : Vector3(Vector3::UnitZ());
}

TautControlOptions taut_options(const Scenario& sc) {
    TautControlOptions o;
    o.dt = sc.sim.dt;
    o.rate_filter = sc.rate_filter;
    return o;
}

LoadReference load_reference(const Scenario& sc, const Mode& mode, double t) {
    const Reference r = reference_at(sc.mission, mode, std::min(t, sc.mission.horizon));
    if (const auto* lr = std::get_if<LoadReference>(&r)) return *lr;
    // Before the lift the load is expected to rest where Raise starts.
    return raise_reference(sc.mission, 0.0);
}

} // namespace

double NoiseConfig::relative_sigma() const { return snr_linear ? 1.0 / snr : std::pow(10.0, -snr / 20.0); }

Scenario Scenario::nominal() {
    Scenario sc;
    sc.params.uav = RigidBodyParams::make(0.7, Vector3(0.005, 0.007, 0.006).asDiagonal());
    sc.params.load_mass = 0.05;
    sc.params.cable_length = 0.3;
    const Vector3 pos_gain(1.0, 1.0, 4.0);
    sc.slack_gains.kp = {Vector3(10.0, 10.0, 10.0), pos_gain};
    sc.slack_gains.kv = {Vector3(1.0, 1.0, 1.0), pos_gain};
    sc.taut_gains.kp_load = {Vector3(2.0, 2.0, 2.0), pos_gain};
    sc.taut_gains.kv_load = {Vector3(0.5, 0.5, 0.5), pos_gain};
    sc.taut_gains.kp_att = sc.slack_gains.kp.real;
    sc.taut_gains.kv_att = sc.slack_gains.kv.real;
    const double l = sc.params.cable_length;
    sc.mission.setup_position = Vector3(0.0, 0.0, l);
    sc.mission.raise_height = 3.0 * l;
    sc.mission.horizon = sc.sim.horizon;
    sc.uav_initial_position = Vector3(0.5 * l, 0.0, 0.0);
    return sc;
}

void Scenario::validate() const {
    params.validate();
    auto positive = [](const Vector3& v, const char* name) {
        if (!(v.minCoeff() > 0.0) || !v.allFinite()) throw InvalidInput(std::string(name) + " must be positive");
    };
    positive(slack_gains.kp.real, "controller.kpv.real");
    positive(slack_gains.kp.dual, "controller.kpv.dual");
    positive(slack_gains.kv.real, "controller.kvv.real");
    positive(slack_gains.kv.dual, "controller.kvv.dual");
    positive(taut_gains.kp_load.real, "controller.kpl.real");
    positive(taut_gains.kp_load.dual, "controller.kpl.dual");
    positive(taut_gains.kv_load.real, "controller.kvl.real");
    positive(taut_gains.kv_load.dual, "controller.kvl.dual");
    positive(taut_gains.kp_att, "controller.kpv.real");
    positive(taut_gains.kv_att, "controller.kvv.real");
    mission.validate();
    if (!(guards.cable_tol > 0.0) || !(guards.stability_tol_logq > 0.0) || !(guards.stability_tol_twist > 0.0) ||
        !(guards.height_tol > 0.0) || !(guards.min_raise_time >= 0.0)) {
        throw InvalidInput("guards: tolerances must be positive");
    }
    if (!(sim.dt > 0.0)) throw InvalidInput("sim.dt must be positive");
    if (!(sim.horizon >= sim.dt)) throw InvalidInput("sim.horizon must be at least dt");
    if (!(sim.gravity > 0.0)) throw InvalidInput("sim.gravity must be positive");
    if (!(rate_filter > 0.0 && rate_filter <= 1.0)) throw InvalidInput("controller.rate_filter must be in (0, 1]");
    if (noise.enabled && !(noise.snr > 0.0)) throw InvalidInput("noise.snr must be positive");
    if (!uav_initial_attitude.is_unit(1e-9)) throw InvalidInput("uav.initial_attitude must be a unit quaternion");
    if (!uav_initial_position.allFinite() || !load_initial_position.allFinite()) {
        throw InvalidInput("initial positions must be finite");
    }
}

std::optional<double> TrajectoryLog::entered(ModeTag tag) const {
    for (const auto& s : switches) {
        if (s.to == tag) return s.t;
    }
    return std::nullopt;
}

double TrajectoryLog::max_track_error() const {
    double e = 0.0;
    for (const auto& r : records) {
        if (r.mode == ModeTag::Track) e = std::max(e, r.err_pos.norm());
    }
    return e;
}

double inject_noise(double value, double snr, std::mt19937_64& rng, bool linear) {
    const double k = linear ? 1.0 / snr : std::pow(10.0, -snr / 20.0);
    std::normal_distribution<double> n(0.0, 1.0);
    return value + std::abs(value) * k * n(rng);
}

Vector3 inject_noise(const Vector3& value, double snr, std::mt19937_64& rng, bool linear) {
    const double k = linear ? 1.0 / snr : std::pow(10.0, -snr / 20.0);
    const double sigma = value.norm() * k;
    std::normal_distribution<double> n(0.0, 1.0);
    Vector3 out = value;
    for (int i = 0; i < 3; ++i) out(i) += sigma * n(rng);
    return out;
}

Matrix3 inject_noise(const Matrix3& value, double snr, std::mt19937_64& rng, bool linear) {
    const double k = linear ? 1.0 / snr : std::pow(10.0, -snr / 20.0);
    const double sigma = value.norm() * k;
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix3 out = value;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out(i, j) += sigma * n(rng);
    }
    return out;
}

NoiseSource::NoiseSource(const NoiseConfig& config, std::uint64_t seed, std::uint64_t stream) : config_(config) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    rng_.seed(seq);
}

CargoParams NoiseSource::perturb(const CargoParams& nominal) {
    const double snr = config_.snr;
    const bool lin = config_.snr_linear;
    CargoParams p = nominal;
    double mv = p.uav.mass;
    Matrix3 J = p.uav.inertia;
    if (config_.targets & kNoiseUavMass) mv = inject_noise(mv, snr, rng_, lin);
    if (config_.targets & kNoiseLoadMass) p.load_mass = inject_noise(p.load_mass, snr, rng_, lin);
    if (config_.targets & kNoiseCableLength) p.cable_length = inject_noise(p.cable_length, snr, rng_, lin);
    if (config_.targets & kNoiseInertia) {
        const Matrix3 noisy = inject_noise(J, snr, rng_, lin);
        J = 0.5 * (noisy + noisy.transpose());
    }
    p.uav = RigidBodyParams::make(mv, J);
    p.validate();
    return p;
}

void NoiseSource::disturb(Vector3& thrust_body, Vector3& torque_body) {
    if (config_.targets & kNoiseForceInput) thrust_body = inject_noise(thrust_body, config_.snr, rng_, config_.snr_linear);
    if (config_.targets & kNoiseTorqueInput) torque_body = inject_noise(torque_body, config_.snr, rng_, config_.snr_linear);
}

SimState initial_state(const Scenario& sc) {
    SimState s;
    SlackState slack;
    const Quaternion& q = sc.uav_initial_attitude;
    slack.uav.pose = from_pose(q, quat_rotate_inv(q, sc.uav_initial_position));
    slack.load_pos = sc.load_initial_position;
    s.cargo = slack;
    s.mode = Mode{ModeTag::Setup, 0.0};
    return s;
}

StepResult step(const Scenario& sc, const RunModels& models, const SimState& state, NoiseSource* noise) {
    const double dt = sc.sim.dt;
    const double g = sc.sim.gravity;
    const double t = state.t;
    try {
        const bool slack_mode = state.mode.tag == ModeTag::Setup || state.mode.tag == ModeTag::Pull;
        if (slack_mode != (regime_of(state.cargo) == Regime::Slack)) {
            throw InvalidState(std::string(mode_name(state.mode.tag)) + " mode with the wrong cable regime");
        }
        StepResult out;
        SimState next = state;
        LogRecord& rec = out.record;
        rec.t = t;
        rec.mode = state.mode.tag;
        const LoadReference lref = load_reference(sc, state.mode, t);
        rec.ref_pos = lref.pos;
        rec.ref_vel = lref.vel;

        ControlOutput ctl;
        if (const auto* slack = std::get_if<SlackState>(&state.cargo)) {
            if (state.mode.tag == ModeTag::Setup) {
                ctl = slack_control(models.controller.uav, slack->uav, setup_pose(sc.mission), DualVector::zero(),
                                    DualVector::zero(), sc.slack_gains, g);
            } else {
                // Pull: the load controller already acts on the cable that is about to tighten.
                const TautState virt = taut_from_slack(models.controller, *slack);
                std::tie(ctl, next.memory) = taut_control_step(models.controller, virt, lref, sc.taut_gains, g,
                                                               state.memory, taut_options(sc));
            }
            rec.uav_pos = slack->uav.position();
            rec.uav_vel = slack->uav.velocity();
            rec.uav_att = slack->uav.pose.real;
            rec.uav_omega = slack->uav.omega();
            rec.load_pos = slack->load_pos;
            rec.load_vel = slack->load_vel;
            rec.qc = cable_direction(rec.uav_pos, rec.load_pos);
            const double len = std::max((rec.uav_pos - rec.load_pos).norm(), 1e-12);
            const Vector3 rate = (rec.uav_vel - rec.load_vel) / len;
            rec.qc_dot = rate - rate.dot(rec.qc) * rec.qc;
        } else {
            const auto& taut = std::get<TautState>(state.cargo);
            std::tie(ctl, next.memory) =
                taut_control_step(models.controller, taut, lref, sc.taut_gains, g, state.memory, taut_options(sc));
            const auto [tv, vv] = uav_pose_from_load(models.plant, taut);
            rec.uav_pos = tv;
            rec.uav_vel = vv;
            rec.uav_att = taut.uav_attitude;
            rec.uav_omega = taut.uav_omega;
            rec.load_pos = taut.load_pos();
            rec.load_vel = taut.load_vel();
            rec.qc = taut.qc();
            rec.qc_dot = taut.qc_dot();
            const auto [le, xle] = load_tracking_errors(taut, lref, ctl.qc_des, ctl.qc_des_dot);
            rec.qce = le.real;
            rec.qce_dot = xle.real;
        }
        rec.err_pos = rec.load_pos - lref.pos;
        rec.err_vel = rec.load_vel - lref.vel;

        Vector3 thrust = ctl.thrust_body;
        Vector3 torque = ctl.torque_body;
        if (noise != nullptr) noise->disturb(thrust, torque);
        rec.thrust = ctl.f;
        rec.torque = ctl.torque_body;

        next.t = t + dt;
        if (const auto* slack = std::get_if<SlackState>(&state.cargo)) {
            const WrenchInput input{torque, thrust};
            const auto f = [&](const SlackVec& x) {
                return pack(slack_derivative(models.plant, unpack_slack(x), input, g));
            };
            SlackState s = unpack_slack(integrate_step(sc.sim.integrator, pack(*slack), dt, f));
            if (sc.sim.renormalize) renormalize(s);
            next.cargo = s;
            if (state.mode.tag == ModeTag::Setup) {
                if (guard_setup_to_pull(models.controller, s, sc.mission, sc.guards)) next.mode = {ModeTag::Pull, next.t};
            } else if (guard_pull_to_raise(models.controller, *slack, ctl.force_inertial, sc.guards, g)) {
                // The force test needs the command, so it is paired with the state the
                // command was computed from; the jump map then uses the new state.
                next.mode = {ModeTag::Raise, next.t};
                next.cargo = taut_from_slack(models.plant, s);
            }
        } else {
            const auto& taut = std::get<TautState>(state.cargo);
            const auto f = [&](const TautVec& x) {
                const TautState s = unpack_taut(x);
                const Vector3 thrust_inertial = quat_rotate(s.uav_attitude.normalized(), thrust);
                return pack(taut_derivative(models.plant, s, thrust_inertial, torque, Vector3::Zero(), Vector3::Zero(),
                                            g));
            };
            TautState s = unpack_taut(integrate_step(sc.sim.integrator, pack(taut), dt, f));
            if (sc.sim.renormalize) renormalize(s);
            next.cargo = s;
            if (state.mode.tag == ModeTag::Raise) {
                const LoadReference r = load_reference(sc, state.mode, next.t);
                if (guard_raise_to_track(s, sc.mission, r, sc.guards, next.t - state.mode.entered_at)) {
                    next.mode = {ModeTag::Track, next.t};
                }
            }
        }

        const bool finite = std::visit([](const auto& c) { return pack(c).allFinite(); }, next.cargo);
        if (!finite) throw std::runtime_error("state became non-finite");
        out.next = std::move(next);
        return out;
    } catch (const SimulationError&) {
        throw;
    } catch (const std::exception& e) {
        throw SimulationError(t, e.what());
    }
}

TrajectoryLog run(const Scenario& sc, std::uint64_t stream) {
    TrajectoryLog log;
    RunModels models{sc.params, sc.params};
    std::optional<NoiseSource> noise;
    Scenario local = sc;
    if (sc.noise.enabled) {
        noise.emplace(sc.noise, sc.sim.seed, sc.noise.per_run_reseed ? stream : 0);
        try {
            models.plant = noise->perturb(sc.params);
        } catch (const std::exception& e) {
            log.ok = false;
            log.error = std::string("parameter perturbation: ") + e.what();
            return log;
        }
        if (sc.noise.scope == NoiseScope::Shared) {
            models.controller = models.plant;
            // The setup target sits one (believed) cable length above the load.
            local.mission.setup_position.z() += models.controller.cable_length - sc.params.cable_length;
        }
    }
    const long n = std::lround(sc.sim.horizon / sc.sim.dt);
    log.records.reserve(static_cast<std::size_t>(n));
    SimState s = initial_state(local);
    for (long k = 0; k < n; ++k) {
        s.t = static_cast<double>(k) * sc.sim.dt;
        try {
            StepResult r = step(local, models, s, noise ? &*noise : nullptr);
            log.records.push_back(r.record);
            if (r.next.mode.tag != s.mode.tag) log.switches.push_back({r.next.mode.tag, r.next.mode.entered_at});
            s = std::move(r.next);
        } catch (const SimulationError& e) {
            log.ok = false;
            log.error = e.what();
            log.failed_at = e.time();
            break;
        }
    }
    return log;
}

void tracking_l2(const TrajectoryLog& log, double dt, std::vector<double>& l2, std::vector<Vector3>& error) {
    l2.clear();
    error.clear();
    const auto raise = log.entered(ModeTag::Raise);
    if (!raise) return;
    double acc = 0.0;
    for (const auto& r : log.records) {
        if (r.t < *raise - 0.5 * dt) continue;
        acc += r.err_pos.squaredNorm() * dt;
        l2.push_back(std::sqrt(acc));
        error.push_back(r.err_pos);
    }
}

BatchResult monte_carlo(const Scenario& sc, int n_runs, unsigned threads) {
    if (n_runs < 1) throw InvalidInput("monte_carlo: n_runs must be at least 1");
    BatchResult out;
    out.run_count = n_runs;
    out.runs.resize(static_cast<std::size_t>(n_runs));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n_runs; i = next++) {
            const TrajectoryLog log = run(sc, static_cast<std::uint64_t>(i));
            RunSummary& s = out.runs[static_cast<std::size_t>(i)];
            s.index = i;
            s.ok = log.ok;
            s.error = log.error;
            s.switches = log.switches;
            s.max_track_error = log.max_track_error();
            if (s.ok) {
                tracking_l2(log, sc.sim.dt, s.l2, s.tracking_error);
                if (s.l2.empty()) {
                    s.ok = false;
                    s.error = "load was never raised";
                }
            }
        }
    };
    unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_runs));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::size_t len = 0;
    bool first = true;
    for (const auto& r : out.runs) {
        if (!r.ok) continue;
        ++out.completed;
        len = first ? r.l2.size() : std::min(len, r.l2.size());
        first = false;
    }
    if (out.completed == 0) return out;
    out.time.resize(len);
    out.l2.assign(len, 0.0);
    out.mean_error.assign(len, Vector3::Zero());
    for (std::size_t k = 0; k < len; ++k) out.time[k] = static_cast<double>(k) * sc.sim.dt;
    for (const auto& r : out.runs) {
        if (!r.ok) continue;
        for (std::size_t k = 0; k < len; ++k) {
            out.l2[k] += r.l2[k] * r.l2[k];
            out.mean_error[k] += r.tracking_error[k];
        }
    }
    const double n = static_cast<double>(out.completed);
    for (std::size_t k = 0; k < len; ++k) {
        out.l2[k] = std::sqrt(out.l2[k] / n);
        out.mean_error[k] /= n;
    }
    return out;
}

} // namespace slung
