#pragma once

#include "slung/control.hpp"
#include "slung/dqmath.hpp"
#include "slung/dynamics.hpp"

#include <string>
#include <variant>

namespace slung {

enum class ModeTag { Setup = 0, Pull = 1, Raise = 2, Track = 3 };

struct Mode {
    ModeTag tag = ModeTag::Setup;
    double entered_at = 0.0;
};

const char* mode_name(ModeTag tag);
/// Throws InvalidInput on an unknown name.
ModeTag mode_from_name(const std::string& name);

struct GuardConfig {
    double cable_tol = 1e-3;
    double stability_tol_logq = 5e-2;
    double stability_tol_twist = 5e-2;
    double height_tol = 2e-2;
    /// Raise must have lasted this long before Track can start.
    double min_raise_time = 0.5;

    bool operator==(const GuardConfig&) const = default;
};

enum class RaiseProfile { Sinusoidal, ConstantRate };
enum class TrackProfile { Velocity, Position };

struct MissionConfig {
    Quaternion setup_attitude;
    Vector3 setup_position{0.0, 0.0, 0.3};
    double raise_height = 0.9;
    RaiseProfile raise_profile = RaiseProfile::Sinusoidal;
    /// Peak vertical speed of the sinusoidal raise.
    double raise_speed = 0.5;
    TrackProfile track_profile = TrackProfile::Velocity;
    double track_duration = 6.0;
    double horizon = 14.0;

    bool operator==(const MissionConfig& o) const {
        return setup_attitude == o.setup_attitude && setup_position == o.setup_position &&
               raise_height == o.raise_height && raise_profile == o.raise_profile && raise_speed == o.raise_speed &&
               track_profile == o.track_profile && track_duration == o.track_duration && horizon == o.horizon;
    }
    /// Throws InvalidInput if any field is out of range.
    void validate() const;
};

struct PoseReference {
    DualQuaternion pose;
    DualVector twist;
    DualVector twist_dot;
};

using Reference = std::variant<PoseReference, LoadReference>;

/// Setup pose as a unit dual quaternion.
DualQuaternion setup_pose(const MissionConfig& config);

bool guard_setup_to_pull(const CargoParams& params, const SlackState& state, const MissionConfig& config,
                         const GuardConfig& guards);

bool guard_pull_to_raise(const CargoParams& params, const SlackState& state, const Vector3& thrust_inertial,
                         const GuardConfig& guards, double gravity);

/// time_in_raise gates the switch (see GuardConfig::min_raise_time).
bool guard_raise_to_track(const TautState& state, const MissionConfig& config, const LoadReference& ref,
                          const GuardConfig& guards, double time_in_raise);

/// Duration of the sinusoidal (or constant-rate) ascent to raise_height.
double raise_duration(const MissionConfig& config);

LoadReference raise_reference(const MissionConfig& config, double t_in_mode);
LoadReference track_reference(const MissionConfig& config, double t_in_mode);

/// Reference for the given mode at absolute time t. Raise and Track are
/// parameterized by t - mode.entered_at. Throws InvalidInput outside [0, horizon].
Reference reference_at(const MissionConfig& config, const Mode& mode, double t);

} // namespace slung
