#include "slung/mission.hpp"

#include "slung/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slung {

namespace {
constexpr double kPi = std::numbers::pi;

// Sinusoidal speed profile a sin(w t) integrated from rest at the origin, with
// derivatives up to snap. Holds the end value once t passes t_end.
void sine_speed(double amp, double w, double t, double t_end, double& p, double& v, double& a, double& j,
                double& s) {
    const double tc = std::min(t, t_end);
    p = amp / w * (1.0 - std::cos(w * tc));
    if (t >= t_end) {
        v = a = j = s = 0.0;
        return;
    }
    v = amp * std::sin(w * t);
    a = amp * w * std::cos(w * t);
    j = -amp * w * w * std::sin(w * t);
    s = -amp * w * w * w * std::cos(w * t);
}

// Position profile amp sin(w t) held at t_end.
void sine_position(double amp, double w, double t, double t_end, double& p, double& v, double& a, double& j,
                   double& s) {
    const double tc = std::min(t, t_end);
    p = amp * std::sin(w * tc);
    if (t >= t_end) {
        v = a = j = s = 0.0;
        return;
    }
    v = amp * w * std::cos(w * t);
    a = -amp * w * w * std::sin(w * t);
    j = -amp * w * w * w * std::cos(w * t);
    s = amp * w * w * w * w * std::sin(w * t);
}
} // namespace

const char* mode_name(ModeTag tag) {
    switch (tag) {
    case ModeTag::Setup: return "Setup";
    case ModeTag::Pull: return "Pull";
    case ModeTag::Raise: return "Raise";
    case ModeTag::Track: return "Track";
    }
    return "?";
}

ModeTag mode_from_name(const std::string& name) {
    for (ModeTag t : {ModeTag::Setup, ModeTag::Pull, ModeTag::Raise, ModeTag::Track}) {
        if (name == mode_name(t)) return t;
    }
    throw InvalidInput("unknown mode '" + name + "'");
}

void MissionConfig::validate() const {
    if (!setup_attitude.is_unit(1e-9)) throw InvalidInput("trajectory.setup_attitude must be a unit quaternion");
    if (!setup_position.allFinite()) throw InvalidInput("trajectory.setup_position must be finite");
    if (!(raise_height > 0.0)) throw InvalidInput("trajectory.raise_height must be positive");
    if (!(raise_speed > 0.0)) throw InvalidInput("trajectory.raise_speed must be positive");
    if (!(track_duration > 0.0)) throw InvalidInput("trajectory.track_duration must be positive");
    if (!(horizon > 0.0)) throw InvalidInput("sim.horizon must be positive");
}

DualQuaternion setup_pose(const MissionConfig& config) {
    // The setup position is inertial; the pose embedding stores it in the body frame.
    const Quaternion& q = config.setup_attitude;
    return from_pose(q, quat_rotate_inv(q, config.setup_position));
}

bool guard_setup_to_pull(const CargoParams& params, const SlackState& state, const MissionConfig& config,
                         const GuardConfig& guards) {
    const double len = (state.uav.position() - state.load_pos).norm();
    if (std::abs(len - params.cable_length) >= guards.cable_tol) return false;
    const DualQuaternion desired = setup_pose(config);
    const DualQuaternion qe = pose_error(desired, state.uav.pose);
    if (dq_log(qe).norm() >= guards.stability_tol_logq) return false;
    return twist_error(state.uav, desired, DualVector::zero()).norm() < guards.stability_tol_twist;
}

bool guard_pull_to_raise(const CargoParams& params, const SlackState& state, const Vector3& thrust_inertial,
                         const GuardConfig& guards, double gravity) {
    const double len = (state.uav.position() - state.load_pos).norm();
    if (std::abs(len - params.cable_length) >= guards.cable_tol) return false;
    return params.uav.mass * gravity <= thrust_inertial.norm();
}

bool guard_raise_to_track(const TautState& state, const MissionConfig& config, const LoadReference& ref,
                          const GuardConfig& guards, double time_in_raise) {
    if (time_in_raise < guards.min_raise_time) return false;
    if (std::abs(state.load_pos().z() - config.raise_height) >= guards.height_tol) return false;
    return (state.load_vel() - ref.vel).norm() < guards.stability_tol_twist;
}

double raise_duration(const MissionConfig& config) {
    if (config.raise_profile == RaiseProfile::Sinusoidal) {
        return kPi * config.raise_height / (2.0 * config.raise_speed);
    }
    return config.raise_height / (config.raise_speed * std::sin(kPi / 3.0));
}

LoadReference raise_reference(const MissionConfig& config, double t) {
    LoadReference r;
    const double t_end = raise_duration(config);
    if (config.raise_profile == RaiseProfile::Sinusoidal) {
        sine_speed(config.raise_speed, kPi / t_end, t, t_end, r.pos.z(), r.vel.z(), r.acc.z(), r.jerk.z(),
                   r.snap.z());
    } else {
        const double rate = config.raise_speed * std::sin(kPi / 3.0);
        r.pos.z() = rate * std::min(t, t_end);
        r.vel.z() = t < t_end ? rate : 0.0;
    }
    return r;
}

LoadReference track_reference(const MissionConfig& config, double t) {
    LoadReference r;
    const double T = config.track_duration;
    const double w1 = kPi / T;
    const double w2 = 2.0 * kPi / T;
    // The vertical term is clipped at zero, i.e. active on the first half only.
    auto profile = config.track_profile == TrackProfile::Velocity ? sine_speed : sine_position;
    profile(1.0, w1, t, T, r.pos.x(), r.vel.x(), r.acc.x(), r.jerk.x(), r.snap.x());
    profile(0.5, w1, t, T, r.pos.y(), r.vel.y(), r.acc.y(), r.jerk.y(), r.snap.y());
    profile(0.5, w2, t, 0.5 * T, r.pos.z(), r.vel.z(), r.acc.z(), r.jerk.z(), r.snap.z());
    if (config.track_profile == TrackProfile::Position && t >= 0.5 * T) r.pos.z() = 0.0;
    r.pos.z() += config.raise_height;
    return r;
}

Reference reference_at(const MissionConfig& config, const Mode& mode, double t) {
    if (!(t >= -1e-12 && t <= config.horizon + 1e-9)) throw InvalidInput("reference_at: time outside the horizon");
    const double tm = std::max(0.0, t - mode.entered_at);
    switch (mode.tag) {
    case ModeTag::Setup:
    case ModeTag::Pull: return PoseReference{setup_pose(config), DualVector::zero(), DualVector::zero()};
    case ModeTag::Raise: return raise_reference(config, tm);
    case ModeTag::Track: return track_reference(config, tm);
    }
    throw InvalidInput("reference_at: unknown mode");
}

} // namespace slung
