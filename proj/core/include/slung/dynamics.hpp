#pragma once

#include "slung/dqmath.hpp"

#include <utility>
#include <variant>

namespace slung {

/// Mass and inertia of a single rigid body. Use make() so the inverse is cached.
struct RigidBodyParams {
    double mass = 1.0;
    Matrix3 inertia = Matrix3::Identity();
    Matrix3 inertia_inv = Matrix3::Identity();

    /// Validates mass > 0 and J symmetric positive definite.
    static RigidBodyParams make(double mass, const Matrix3& inertia);
};

struct RigidBodyState {
    DualQuaternion pose;
    DualVector twist;

    Vector3 omega() const { return twist.real; }
    Vector3 t_body() const { return pose.translation(); }
    /// Tdot^b = xi_dual - omega x T^b.
    Vector3 t_body_dot() const;
    /// Inertial position q T^b q*.
    Vector3 position() const;
    /// Inertial velocity q (omega x T^b + Tdot^b) q*.
    Vector3 velocity() const;
};

struct CargoParams {
    RigidBodyParams uav;
    double load_mass = 0.05;
    double cable_length = 0.3;

    double total_mass() const { return uav.mass + load_mass; }
    /// Throws InvalidInput on non-positive load mass or cable length.
    void validate() const;
};

struct SlackState {
    RigidBodyState uav;
    Vector3 load_pos = Vector3::Zero();
    Vector3 load_vel = Vector3::Zero();
};

/// load_config = q_c + T_l eps, load_twist = qdot_c + Tdot_l eps.
struct TautState {
    DualVector load_config;
    DualVector load_twist;
    Quaternion uav_attitude;
    Vector3 uav_omega = Vector3::Zero();

    const Vector3& qc() const { return load_config.real; }
    const Vector3& qc_dot() const { return load_twist.real; }
    const Vector3& load_pos() const { return load_config.dual; }
    const Vector3& load_vel() const { return load_twist.dual; }
};

enum class Regime { Slack, Taut };

using CargoState = std::variant<SlackState, TautState>;

inline Regime regime_of(const CargoState& s) {
    return std::holds_alternative<SlackState>(s) ? Regime::Slack : Regime::Taut;
}

struct WrenchInput {
    Vector3 torque = Vector3::Zero();
    Vector3 force = Vector3::Zero();
};

struct SlackDerivative {
    DualQuaternion pose_dot;
    DualVector twist_dot;
    Vector3 load_pos_dot = Vector3::Zero();
    Vector3 load_vel_dot = Vector3::Zero();
};

struct TautDerivative {
    DualVector config_dot;
    DualVector twist_dot;
    Quaternion attitude_dot{0.0, 0.0, 0.0, 0.0};
    Vector3 omega_dot = Vector3::Zero();
};

using CargoStateDerivative = std::variant<SlackDerivative, TautDerivative>;

DualVector twist_of(const Vector3& omega_body, const Vector3& t_body, const Vector3& t_body_dot);

DualQuaternion rigid_kinematics(const RigidBodyState& state);

/// F_hat + u_hat. Both wrenches are body frame and are summed.
DualVector rigid_dynamics(const RigidBodyParams& params, const RigidBodyState& state,
                          const WrenchInput& input, const WrenchInput& ext);

/// a = -J^-1 (omega x J omega).
Vector3 gyroscopic_accel(const RigidBodyParams& params, const Vector3& omega);

DualQuaternion pose_error(const DualQuaternion& desired, const DualQuaternion& actual);

DualVector twist_error(const RigidBodyState& state, const DualQuaternion& desired_pose,
                       const DualVector& desired_twist);

/// E term of the error dynamics: qdot_e* xi_d q_e + Ad_{q_e*} xidot_d + q_e* xi_d qdot_e.
DualVector error_feedforward(const DualQuaternion& q_e, const DualVector& xi_e, const DualVector& xi_d,
                             const DualVector& xi_d_dot);

/// Body-frame gravity vector q* (-g e3) q.
Vector3 gravity_body(const Quaternion& q, double gravity);

SlackDerivative slack_derivative(const CargoParams& params, const SlackState& state, const WrenchInput& input,
                                 double gravity);
/// Throws InvalidState when the state is not slack.
CargoStateDerivative slack_derivative(const CargoParams& params, const CargoState& state,
                                      const WrenchInput& input, double gravity);

/// Control part u_l of the taut model for an inertial thrust F_uI.
DualVector taut_input_map(const CargoParams& params, const TautState& state, const Vector3& thrust_inertial);
/// Drift part F_l of the taut model; ext_force is the total external force on the pair.
DualVector taut_drift(const CargoParams& params, const TautState& state, const Vector3& ext_force);

/// Taut derivative. ext_force is added to the combined weight -m g e3.
/// Throws ConstraintViolation if |q_c| drifts from 1 by more than 1e-4.
TautDerivative taut_derivative(const CargoParams& params, const TautState& state, const Vector3& thrust_inertial,
                               const Vector3& torque_body, const Vector3& ext_force, const Vector3& ext_torque,
                               double gravity);
CargoStateDerivative taut_derivative(const CargoParams& params, const CargoState& state,
                                     const Vector3& thrust_inertial, const Vector3& torque_body,
                                     const Vector3& ext_force, const Vector3& ext_torque, double gravity);

/// (T_v, Tdot_v) = (T_l + l q_c, Tdot_l + l qdot_c).
std::pair<Vector3, Vector3> uav_pose_from_load(const CargoParams& params, const TautState& state);

/// Jump map used when the cable becomes taut.
TautState taut_from_slack(const CargoParams& params, const SlackState& state);

} // namespace slung
