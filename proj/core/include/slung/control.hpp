#pragma once

#include "slung/dqmath.hpp"
#include "slung/dynamics.hpp"

#include <optional>
#include <utility>

namespace slung {

struct SlackGains {
    DualVector kp;
    DualVector kv;
};

/// Load gains act on (q_c, T_l); attitude gains are the real parts of the UAV gains.
struct TautGains {
    DualVector kp_load;
    DualVector kv_load;
    Vector3 kp_att = Vector3::Zero();
    Vector3 kv_att = Vector3::Zero();
};

/// Desired load trajectory. jerk and snap feed the cable-direction derivatives.
struct LoadReference {
    Vector3 pos = Vector3::Zero();
    Vector3 vel = Vector3::Zero();
    Vector3 acc = Vector3::Zero();
    Vector3 jerk = Vector3::Zero();
    Vector3 snap = Vector3::Zero();
};

struct ControlOutput {
    Vector3 torque_body = Vector3::Zero();
    Vector3 thrust_body = Vector3::Zero();
    double f = 0.0;
    Quaternion desired_attitude;
    /// Commanded force in the inertial frame (F_uI).
    Vector3 force_inertial = Vector3::Zero();
    /// Desired cable direction and its rate (taut controller only).
    Vector3 qc_des = Vector3::UnitZ();
    Vector3 qc_des_dot = Vector3::Zero();
};

/// One-step memory of the taut controller. Empty on the first call.
struct ControllerMemory {
    std::optional<Quaternion> prev_desired_attitude;
    std::optional<Vector3> desired_rate;
    std::optional<double> prev_axial_force;
};

struct TautControlOptions {
    double dt = 0.01;
    /// Smoothing factor in (0, 1] applied to the differenced desired body rate.
    double rate_filter = 0.2;
    /// Desired yaw q_zd.
    Quaternion yaw;
};

/// Unit direction and its first two time derivatives.
struct DirectionJet {
    Vector3 u = Vector3::Zero();
    Vector3 u_dot = Vector3::Zero();
    Vector3 u_ddot = Vector3::Zero();
};

ControlOutput slack_control(const RigidBodyParams& params, const RigidBodyState& state,
                            const DualQuaternion& desired_pose, const DualVector& desired_twist,
                            const DualVector& desired_twist_dot, const SlackGains& gains, double gravity);

/// (q_le, xi_le) = (q_ce + T_le eps, qdot_ce + Tdot_le eps).
std::pair<DualVector, DualVector> load_tracking_errors(const TautState& state, const LoadReference& ref,
                                                        const Vector3& qc_des, const Vector3& qc_des_dot);

/// Normalized -k_pld T_le - k_vld Tdot_le + Tddot_l^d + g e3.
Vector3 desired_load_attitude(const Vector3& errors_T, const Vector3& errors_Tdot, const Vector3& acc_des,
                              const TautGains& gains, double gravity);

/// Direction of v together with its derivatives given v, vdot, vddot.
DirectionJet normalize_jet(const Vector3& v, const Vector3& v_dot, const Vector3& v_ddot);

/// Inertial force command for the taut pair. v is the unnormalized q_c^d numerator
/// and dir its direction jet.
Vector3 desired_force_inertial(const CargoParams& params, const TautState& state, const Vector3& v,
                               const DirectionJet& dir, const TautGains& gains);

Vector3 force_to_body(const Quaternion& q_v, const Vector3& F_uI);

std::pair<Vector3, double> thrust_extraction(const Vector3& F_u);

/// Throws DegenerateCommand when F_uI is near zero or antiparallel to b with no tilt axis.
Quaternion tilt_quaternion(const Vector3& F_uI, const Vector3& F_uc);

Quaternion desired_attitude(const Quaternion& q_zd, const Quaternion& q_t);

/// -J(k_p theta_ve + k_v omega_ve + a_v) + J Ad(q_ve*) alpha_des.
Vector3 taut_attitude_control(const RigidBodyParams& params, const Quaternion& q_v, const Vector3& omega_v,
                              const Quaternion& q_v_des, const Vector3& omega_des, const TautGains& gains,
                              const Vector3& alpha_des = Vector3::Zero());

std::pair<ControlOutput, ControllerMemory> taut_control_step(const CargoParams& params, const TautState& state,
                                                             const LoadReference& ref, const TautGains& gains,
                                                             double gravity, ControllerMemory memory,
                                                             const TautControlOptions& options = {});

} // namespace slung
