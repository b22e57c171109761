#include "slung/dynamics.hpp"

#include "slung/errors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace slung {

namespace {
const Vector3 kE3(0.0, 0.0, 1.0);
constexpr double kConstraintTol = 1e-4;
} // namespace

RigidBodyParams RigidBodyParams::make(double mass, const Matrix3& inertia) {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidInput("mass must be positive");
    if (!inertia.allFinite()) throw InvalidInput("inertia must be finite");
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + inertia.cwiseAbs().maxCoeff())) {
        throw InvalidInput("inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix3> eig(inertia);
    if (eig.eigenvalues().minCoeff() <= 0.0) throw InvalidInput("inertia must be positive definite");
    return {mass, inertia, inertia.inverse()};
}

Vector3 RigidBodyState::t_body_dot() const { return twist.dual - twist.real.cross(t_body()); }

Vector3 RigidBodyState::position() const { return quat_rotate(pose.real, t_body()); }

Vector3 RigidBodyState::velocity() const { return quat_rotate(pose.real, twist.dual); }

void CargoParams::validate() const {
    RigidBodyParams::make(uav.mass, uav.inertia);
    if (!(load_mass > 0.0) || !std::isfinite(load_mass)) throw InvalidInput("load mass must be positive");
    if (!(cable_length > 0.0) || !std::isfinite(cable_length)) throw InvalidInput("cable length must be positive");
}

DualVector twist_of(const Vector3& omega_body, const Vector3& t_body, const Vector3& t_body_dot) {
    return {omega_body, omega_body.cross(t_body) + t_body_dot};
}

DualQuaternion rigid_kinematics(const RigidBodyState& state) {
    return 0.5 * (state.pose * DualQuaternion::from_vector(state.twist));
}

Vector3 gyroscopic_accel(const RigidBodyParams& params, const Vector3& omega) {
    return -params.inertia_inv * omega.cross(params.inertia * omega);
}

DualVector rigid_dynamics(const RigidBodyParams& params, const RigidBodyState& state, const WrenchInput& input,
                          const WrenchInput& ext) {
    const Vector3 w = state.omega();
    const Vector3 t = state.t_body();
    const Vector3 td = state.twist.dual - w.cross(t);
    const Vector3 a = gyroscopic_accel(params, w);
    const Vector3 jt = params.inertia_inv * (input.torque + ext.torque);
    const Vector3 f = input.force + ext.force;
    const DualVector drift{a, a.cross(t) + w.cross(td)};
    const DualVector u{jt, jt.cross(t) + f / params.mass};
    return drift + u;
}

DualQuaternion pose_error(const DualQuaternion& desired, const DualQuaternion& actual) {
    return desired.conj() * actual;
}

DualVector twist_error(const RigidBodyState& state, const DualQuaternion& desired_pose,
                       const DualVector& desired_twist) {
    const DualQuaternion qe = pose_error(desired_pose, state.pose);
    return state.twist - adjoint(qe.conj(), desired_twist);
}

DualVector error_feedforward(const DualQuaternion& q_e, const DualVector& xi_e, const DualVector& xi_d,
                             const DualVector& xi_d_dot) {
    const DualQuaternion qe_dot = 0.5 * (q_e * DualQuaternion::from_vector(xi_e));
    const DualQuaternion xd = DualQuaternion::from_vector(xi_d);
    const DualQuaternion sum = qe_dot.conj() * xd * q_e + q_e.conj() * xd * qe_dot;
    return DualVector{sum.real.vec(), sum.dual.vec()} + adjoint(q_e.conj(), xi_d_dot);
}

Vector3 gravity_body(const Quaternion& q, double gravity) { return quat_rotate_inv(q, -gravity * kE3); }

SlackDerivative slack_derivative(const CargoParams& params, const SlackState& state, const WrenchInput& input,
                                 double gravity) {
    SlackDerivative d;
    // Intermediate integrator stages are not exactly unit; gravity only needs the rotation.
    const Quaternion q = state.uav.pose.real.normalized();
    const WrenchInput ext{Vector3::Zero(), params.uav.mass * gravity_body(q, gravity)};
    d.pose_dot = rigid_kinematics(state.uav);
    d.twist_dot = rigid_dynamics(params.uav, state.uav, input, ext);
    // The slack cable carries no force, so the only upward push on a load at
    // z <= 0 is the ground reaction; it stays put.
    const bool grounded = state.load_pos.z() <= 0.0;
    if (!grounded) {
        d.load_pos_dot = state.load_vel;
        d.load_vel_dot = -gravity * kE3;
    }
    return d;
}

CargoStateDerivative slack_derivative(const CargoParams& params, const CargoState& state, const WrenchInput& input,
                                      double gravity) {
    const auto* s = std::get_if<SlackState>(&state);
    if (s == nullptr) throw InvalidState("slack_derivative called on a taut state");
    return slack_derivative(params, *s, input, gravity);
}

DualVector taut_input_map(const CargoParams& params, const TautState& state, const Vector3& thrust_inertial) {
    const Vector3& q = state.qc();
    const double mv = params.uav.mass;
    const double l = params.cable_length;
    return {-q.cross(q.cross(thrust_inertial)) / (mv * l), q.dot(thrust_inertial) * q / params.total_mass()};
}

DualVector taut_drift(const CargoParams& params, const TautState& state, const Vector3& ext_force) {
    const Vector3& q = state.qc();
    const double n2 = state.qc_dot().squaredNorm();
    const double mv = params.uav.mass;
    const double l = params.cable_length;
    return {-n2 * q, (ext_force + mv * l * n2 * q) / params.total_mass()};
}

TautDerivative taut_derivative(const CargoParams& params, const TautState& state, const Vector3& thrust_inertial,
                               const Vector3& torque_body, const Vector3& ext_force, const Vector3& ext_torque,
                               double gravity) {
    if (std::abs(state.qc().norm() - 1.0) > kConstraintTol) {
        throw ConstraintViolation("cable direction left the unit sphere");
    }
    const RigidBodyParams& uav = params.uav;
    TautDerivative d;
    d.config_dot = state.load_twist;
    const Vector3 f_ext = -params.total_mass() * gravity * kE3 + ext_force;
    d.twist_dot = taut_input_map(params, state, thrust_inertial) + taut_drift(params, state, f_ext);
    d.attitude_dot = 0.5 * (state.uav_attitude * Quaternion::pure(state.uav_omega));
    d.omega_dot = uav.inertia_inv * (torque_body + ext_torque - state.uav_omega.cross(uav.inertia * state.uav_omega));
    return d;
}

CargoStateDerivative taut_derivative(const CargoParams& params, const CargoState& state,
                                     const Vector3& thrust_inertial, const Vector3& torque_body,
                                     const Vector3& ext_force, const Vector3& ext_torque, double gravity) {
    const auto* s = std::get_if<TautState>(&state);
    if (s == nullptr) throw InvalidState("taut_derivative called on a slack state");
    return taut_derivative(params, *s, thrust_inertial, torque_body, ext_force, ext_torque, gravity);
}

std::pair<Vector3, Vector3> uav_pose_from_load(const CargoParams& params, const TautState& state) {
    const double l = params.cable_length;
    return {state.load_pos() + l * state.qc(), state.load_vel() + l * state.qc_dot()};
}

TautState taut_from_slack(const CargoParams& params, const SlackState& state) {
    const Vector3 tv = state.uav.position();
    const Vector3 vv = state.uav.velocity();
    const Vector3 rel = tv - state.load_pos;
    const double len = rel.norm();
    if (len < 1e-9) throw InvalidState("UAV and load coincide at the taut switch");
    TautState out;
    const Vector3 q = rel / len;
    Vector3 qd = (vv - state.load_vel) / params.cable_length;
    qd -= qd.dot(q) * q;
    out.load_config = {q, state.load_pos};
    out.load_twist = {qd, state.load_vel};
    out.uav_attitude = state.uav.pose.real;
    out.uav_omega = state.uav.omega();
    return out;
}

} // namespace slung
