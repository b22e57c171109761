#include "slung/control.hpp"

#include "slung/errors.hpp"

#include <cmath>

namespace slung {

namespace {
const Vector3 kE3(0.0, 0.0, 1.0);
constexpr double kUnitTol = 1e-6;

Vector3 tangent(const Vector3& v, const Vector3& n) { return v - v.dot(n) * n; }
} // namespace

ControlOutput slack_control(const RigidBodyParams& params, const RigidBodyState& state,
                            const DualQuaternion& desired_pose, const DualVector& desired_twist,
                            const DualVector& desired_twist_dot, const SlackGains& gains, double gravity) {
    const DualQuaternion qe = pose_error(desired_pose, state.pose);
    const DualVector xe = twist_error(state, desired_pose, desired_twist);
    const DualVector ff = error_feedforward(qe, xe, desired_twist, desired_twist_dot);
    const DualVector lg = 2.0 * dq_log(qe);

    const Vector3 w = state.omega();
    const Vector3 t = state.t_body();
    const Vector3 td = state.t_body_dot();
    const Vector3 a = gyroscopic_accel(params, w);
    const Vector3 drift = a.cross(t) + w.cross(td);

    const Vector3 fu = -params.mass * (gains.kp.dual.cwiseProduct(lg.dual) + gains.kv.dual.cwiseProduct(xe.dual) +
                                       drift - ff.dual) -
                       params.mass * gravity_body(state.pose.real, gravity);

    ControlOutput out;
    out.force_inertial = quat_rotate(state.pose.real, fu);
    const auto [thrust, f] = thrust_extraction(fu);
    out.thrust_body = thrust;
    out.f = f;
    const Quaternion qzd = desired_pose.real.w < 0.0 ? -desired_pose.real : desired_pose.real;
    out.desired_attitude = desired_attitude(qzd, tilt_quaternion(out.force_inertial, out.force_inertial));
    TautGains att;
    att.kp_att = gains.kp.real;
    att.kv_att = gains.kv.real;
    out.torque_body = taut_attitude_control(params, state.pose.real, w, out.desired_attitude, Vector3::Zero(), att);
    return out;
}

std::pair<DualVector, DualVector> load_tracking_errors(const TautState& state, const LoadReference& ref,
                                                        const Vector3& qc_des, const Vector3& qc_des_dot) {
    const Vector3& q = state.qc();
    if (std::abs(q.norm() - 1.0) > kUnitTol || std::abs(qc_des.norm() - 1.0) > kUnitTol) {
        throw InvalidInput("load_tracking_errors: direction vectors must be unit");
    }
    const Vector3 qce = q.cross(q.cross(qc_des));
    const Vector3 qce_dot = state.qc_dot() - qc_des.cross(qc_des_dot).cross(q);
    return {DualVector{qce, state.load_pos() - ref.pos}, DualVector{qce_dot, state.load_vel() - ref.vel}};
}

Vector3 desired_load_attitude(const Vector3& errors_T, const Vector3& errors_Tdot, const Vector3& acc_des,
                              const TautGains& gains, double gravity) {
    const Vector3 v = -gains.kp_load.dual.cwiseProduct(errors_T) - gains.kv_load.dual.cwiseProduct(errors_Tdot) +
                      acc_des + gravity * kE3;
    const double n = v.norm();
    if (n <= 1e-9) throw DegenerateCommand("desired load attitude: free-fall command");
    return v / n;
}

DirectionJet normalize_jet(const Vector3& v, const Vector3& v_dot, const Vector3& v_ddot) {
    const double n = v.norm();
    if (n <= 1e-9) throw DegenerateCommand("normalize_jet: zero vector");
    DirectionJet j;
    j.u = v / n;
    const double n_dot = j.u.dot(v_dot);
    j.u_dot = (v_dot - j.u * n_dot) / n;
    j.u_ddot = (v_ddot - 2.0 * j.u_dot * n_dot - j.u * (j.u_dot.dot(v_dot) + j.u.dot(v_ddot))) / n;
    return j;
}

Vector3 desired_force_inertial(const CargoParams& params, const TautState& state, const Vector3& v,
                               const DirectionJet& dir, const TautGains& gains) {
    const Vector3& q = state.qc();
    const double m = params.total_mass();
    const double mvl = params.uav.mass * params.cable_length;
    const double n2 = state.qc_dot().squaredNorm();
    const auto [le, xle] = load_tracking_errors(state, LoadReference{}, dir.u, dir.u_dot);
    const Vector3 swing =
        -gains.kp_load.real.cwiseProduct(le.real) - gains.kv_load.real.cwiseProduct(xle.real) + tangent(dir.u_ddot, q);
    return m * v - mvl * n2 * q + mvl * swing;
}

Vector3 force_to_body(const Quaternion& q_v, const Vector3& F_uI) { return quat_rotate_inv(q_v, F_uI); }

std::pair<Vector3, double> thrust_extraction(const Vector3& F_u) {
    const double f = F_u.norm();
    return {Vector3(0.0, 0.0, f), f};
}

Quaternion tilt_quaternion(const Vector3& F_uI, const Vector3& F_uc) {
    const double n = F_uI.norm();
    if (n <= 1e-9) throw DegenerateCommand("tilt quaternion: zero force command");
    const Vector3 axis = kE3.cross(F_uc);
    const Quaternion q{kE3.dot(F_uI) + n, axis.x(), axis.y(), axis.z()};
    if (q.norm() <= 1e-9) throw DegenerateCommand("tilt quaternion: force antiparallel to the thrust axis");
    return q.normalized();
}

Quaternion desired_attitude(const Quaternion& q_zd, const Quaternion& q_t) { return (q_zd * q_t).normalized(); }

Vector3 taut_attitude_control(const RigidBodyParams& params, const Quaternion& q_v, const Vector3& omega_v,
                              const Quaternion& q_v_des, const Vector3& omega_des, const TautGains& gains,
                              const Vector3& alpha_des) {
    const Quaternion qe = q_v_des.conj() * q_v;
    const Vector3 theta = rotation_vector(qe);
    const Vector3 we = omega_v - quat_rotate_inv(qe, omega_des);
    const Vector3 a = gyroscopic_accel(params, omega_v);
    return -params.inertia * (gains.kp_att.cwiseProduct(theta) + gains.kv_att.cwiseProduct(we) + a) +
           params.inertia * quat_rotate_inv(qe, alpha_des);
}

std::pair<ControlOutput, ControllerMemory> taut_control_step(const CargoParams& params, const TautState& state,
                                                             const LoadReference& ref, const TautGains& gains,
                                                             double gravity, ControllerMemory memory,
                                                             const TautControlOptions& options) {
    const Vector3& q = state.qc();
    const Vector3& qd = state.qc_dot();
    const double m = params.total_mass();
    const double dt = options.dt;
    const Vector3& kp = gains.kp_load.dual;
    const Vector3& kv = gains.kv_load.dual;

    const Vector3 e = state.load_pos() - ref.pos;
    const Vector3 e_dot = state.load_vel() - ref.vel;
    const Vector3 v = -kp.cwiseProduct(e) - kv.cwiseProduct(e_dot) + ref.acc + gravity * kE3;

    // Axial cable force and the load acceleration it produces.
    const double s = m * q.dot(v);
    const double s_dot = memory.prev_axial_force ? (s - *memory.prev_axial_force) / dt : 0.0;
    memory.prev_axial_force = s;
    const Vector3 e_ddot = s * q / m - gravity * kE3 - ref.acc;
    const Vector3 e_dddot = (s_dot * q + s * qd) / m - ref.jerk;

    const Vector3 v_dot = -kp.cwiseProduct(e_dot) - kv.cwiseProduct(e_ddot) + ref.jerk;
    const Vector3 v_ddot = -kp.cwiseProduct(e_ddot) - kv.cwiseProduct(e_dddot) + ref.snap;
    const DirectionJet dir = normalize_jet(v, v_dot, v_ddot);

    ControlOutput out;
    out.qc_des = dir.u;
    out.qc_des_dot = dir.u_dot;
    out.force_inertial = desired_force_inertial(params, state, v, dir, gains);
    const Vector3 fu = force_to_body(state.uav_attitude, out.force_inertial);
    const auto [thrust, f] = thrust_extraction(fu);
    out.thrust_body = thrust;
    out.f = f;
    const Quaternion qt = tilt_quaternion(out.force_inertial, out.force_inertial);
    out.desired_attitude = desired_attitude(options.yaw, qt);

    // Desired body rate and acceleration by differencing the attitude command.
    Vector3 rate = Vector3::Zero();
    Vector3 alpha = Vector3::Zero();
    if (memory.prev_desired_attitude) {
        const Vector3 raw = rotation_vector(memory.prev_desired_attitude->conj() * out.desired_attitude) / dt;
        rate = memory.desired_rate ? Vector3(*memory.desired_rate + options.rate_filter * (raw - *memory.desired_rate))
                                   : raw;
    }
    if (memory.desired_rate) alpha = (rate - *memory.desired_rate) / dt;
    memory.prev_desired_attitude = out.desired_attitude;
    memory.desired_rate = rate;

    out.torque_body = taut_attitude_control(params.uav, state.uav_attitude, state.uav_omega, out.desired_attitude,
                                            rate, gains, alpha);
    return {out, memory};
}

} // namespace slung
