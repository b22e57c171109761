#pragma once

// Generators and oracles shared by the unit tests and the acceptance binary.
// hamilton, dq_exp_oracle and newton_euler_step use Eigen only, not the library under test.

#include "slung/dqmath.hpp"
#include "slung/dynamics.hpp"
#include "slung/integrator.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <random>

namespace slung::testing {

inline constexpr double kPi = 3.14159265358979323846;

class Gen {
public:
    explicit Gen(std::uint64_t seed = 42) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    Vector3 vec(double scale = 1.0) { return Vector3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)); }

    Vector3 unit_vec() {
        Vector3 v(normal(), normal(), normal());
        while (v.norm() < 1e-6) v = Vector3(normal(), normal(), normal());
        return v.normalized();
    }

    /// Uniform on SO(3), w >= 0.
    Quaternion unit_quat() {
        Eigen::Vector4d v(normal(), normal(), normal(), normal());
        v.normalize();
        if (v(0) < 0.0) v = -v;
        return {v(0), v(1), v(2), v(3)};
    }

    /// Rotation angle below max_angle.
    Quaternion unit_quat(double max_angle) {
        const double a = uniform(0.0, max_angle);
        const Vector3 axis = unit_vec();
        return {std::cos(0.5 * a), std::sin(0.5 * a) * axis.x(), std::sin(0.5 * a) * axis.y(),
                std::sin(0.5 * a) * axis.z()};
    }

    Quaternion quat(double scale = 1.0) {
        return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
    }

    DualQuaternion dual_quat() { return {quat(), quat()}; }
    DualQuaternion unit_dual_quat(double t_scale = 2.0) { return from_pose(unit_quat(), vec(t_scale)); }
    DualVector dual_vec(double scale = 1.0) { return {vec(scale), vec(scale)}; }

    /// Symmetric positive definite, eigenvalues in [lo, hi].
    Matrix3 inertia(double lo = 0.004, double hi = 0.01) {
        const Eigen::Quaterniond r(normal(), normal(), normal(), normal());
        const Matrix3 R = r.normalized().toRotationMatrix();
        const Vector3 d(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
        Matrix3 J = R * d.asDiagonal() * R.transpose();
        return 0.5 * (J + J.transpose());
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Eigen's quaternion is used as the reference implementation throughout.
inline Eigen::Quaterniond to_eigen(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }
inline Quaternion from_eigen(const Eigen::Quaterniond& q) { return {q.w(), q.x(), q.y(), q.z()}; }

/// Hamilton product written out component by component.
inline Quaternion hamilton(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

/// Pose from (theta_bar, T) by the angle-axis formula; inverse of 2 ln.
inline DualQuaternion dq_exp_oracle(const DualVector& log_half) {
    const Vector3 theta = 2.0 * log_half.real;
    const Vector3 t = 2.0 * log_half.dual;
    const double a = theta.norm();
    const Eigen::Quaterniond r =
        a < 1e-15 ? Eigen::Quaterniond::Identity() : Eigen::Quaterniond(Eigen::AngleAxisd(a, theta / a));
    const Eigen::Quaterniond tq(0.0, t.x(), t.y(), t.z());
    const Eigen::Quaterniond d = r * tq;
    return {from_eigen(r), {0.5 * d.w(), 0.5 * d.x(), 0.5 * d.y(), 0.5 * d.z()}};
}

inline double quat_distance(const Quaternion& a, const Quaternion& b) {
    const Eigen::Vector4d va(a.w, a.x, a.y, a.z);
    const Eigen::Vector4d vb(b.w, b.x, b.y, b.z);
    return std::min((va - vb).norm(), (va + vb).norm());
}

inline double dq_distance(const DualQuaternion& a, const DualQuaternion& b) {
    Eigen::Matrix<double, 8, 1> va, vb;
    va << a.real.w, a.real.x, a.real.y, a.real.z, a.dual.w, a.dual.x, a.dual.y, a.dual.z;
    vb << b.real.w, b.real.x, b.real.y, b.real.z, b.dual.w, b.dual.x, b.dual.y, b.dual.z;
    return std::min((va - vb).norm(), (va + vb).norm());
}

/// Rigid body as (q, omega, T^b, Tdot^b): J wdot + w x Jw = tau, m Tddot^b = F, qdot = 1/2 q w.
struct NewtonEulerState {
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    Vector3 omega = Vector3::Zero();
    Vector3 t = Vector3::Zero();
    Vector3 t_dot = Vector3::Zero();
};

inline NewtonEulerState newton_euler_step(const NewtonEulerState& s, double mass, const Matrix3& J,
                                          const Vector3& tau, const Vector3& force, double h) {
    using Vec13 = Eigen::Matrix<double, 13, 1>;
    const Matrix3 Jinv = J.inverse();
    auto f = [&](const Vec13& x) {
        const Eigen::Quaterniond q(x(0), x(1), x(2), x(3));
        const Vector3 w = x.segment<3>(4);
        const Eigen::Quaterniond qd = q * Eigen::Quaterniond(0.0, w.x(), w.y(), w.z());
        Vec13 d;
        d << 0.5 * qd.w(), 0.5 * qd.x(), 0.5 * qd.y(), 0.5 * qd.z(), Jinv * (tau - w.cross(J * w)), x.segment<3>(10),
            force / mass;
        return d;
    };
    Vec13 x;
    x << s.q.w(), s.q.x(), s.q.y(), s.q.z(), s.omega, s.t, s.t_dot;
    const Vec13 k1 = f(x);
    const Vec13 k2 = f(x + 0.5 * h * k1);
    const Vec13 k3 = f(x + 0.5 * h * k2);
    const Vec13 k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    NewtonEulerState out;
    out.q = Eigen::Quaterniond(x(0), x(1), x(2), x(3)).normalized();
    out.omega = x.segment<3>(4);
    out.t = x.segment<3>(7);
    out.t_dot = x.segment<3>(10);
    return out;
}


using Vec14 = Eigen::Matrix<double, 14, 1>;

inline Vec14 pack(const RigidBodyState& s) {
    Vec14 x;
    x << s.pose.real.w, s.pose.real.x, s.pose.real.y, s.pose.real.z, s.pose.dual.w, s.pose.dual.x, s.pose.dual.y,
        s.pose.dual.z, s.twist.real, s.twist.dual;
    return x;
}

inline RigidBodyState unpack(const Vec14& x) {
    RigidBodyState s;
    s.pose = {{x(0), x(1), x(2), x(3)}, {x(4), x(5), x(6), x(7)}};
    s.twist = {x.segment<3>(8), x.segment<3>(11)};
    return s;
}

inline Vec14 derivative(const RigidBodyParams& p, const RigidBodyState& s, const WrenchInput& u) {
    const DualQuaternion pd = rigid_kinematics(s);
    const DualVector td = rigid_dynamics(p, s, u, WrenchInput{});
    Vec14 d;
    d << pd.real.w, pd.real.x, pd.real.y, pd.real.z, pd.dual.w, pd.dual.x, pd.dual.y, pd.dual.z, td.real, td.dual;
    return d;
}

/// Dual-quaternion model under a constant wrench, RK4 with pose renormalization.
inline RigidBodyState dq_integrate(const RigidBodyParams& p, const RigidBodyState& s, const WrenchInput& u, double h,
                                   int n) {
    Vec14 x = pack(s);
    for (int k = 0; k < n; ++k) {
        x = integrate_step(Integrator::RK4, x, h, [&](const Vec14& y) { return derivative(p, unpack(y), u); });
        RigidBodyState r = unpack(x);
        r.pose = normalize_pose(r.pose);
        x = pack(r);
    }
    return unpack(x);
}

/// Free rigid body integrated with the dual-quaternion model, no renormalization.
inline RigidBodyState free_body(const RigidBodyParams& p, const RigidBodyState& s0, Integrator scheme, double h,
                                double duration) {
    Vec14 x = pack(s0);
    const long n = std::lround(duration / h);
    for (long k = 0; k < n; ++k) {
        x = integrate_step(scheme, x, h, [&](const Vec14& y) { return derivative(p, unpack(y), {}); });
    }
    return unpack(x);
}

inline double state_distance(const RigidBodyState& a, const RigidBodyState& b) {
    return dq_distance(a.pose, b.pose) + (a.twist.real - b.twist.real).norm() + (a.twist.dual - b.twist.dual).norm();
}

struct ConvergenceResult {
    double slope = 0.0;
    double errors[3] = {0.0, 0.0, 0.0};
};

/// Least-squares log-log slope of the RK4 global error over dt = 1e-2, 5e-3, 2.5e-3
/// against a dt = 1e-4 baseline, for a tumbling asymmetric body over one second.
inline ConvergenceResult rk4_convergence() {
    const auto p = RigidBodyParams::make(0.7, Vector3(0.005, 0.007, 0.006).asDiagonal() * 1.0);
    const RigidBodyState s0{from_pose(Quaternion::from_axis_angle(Vector3(1.0, 2.0, 0.5).normalized(), 0.7),
                                      Vector3(0.3, -0.2, 1.0)),
                            twist_of(Vector3(4.0, -6.0, 3.0), Vector3(0.3, -0.2, 1.0), Vector3(0.5, 0.1, -0.4))};
    const double duration = 1.0;
    const RigidBodyState ref = free_body(p, s0, Integrator::RK4, 1e-4, duration);
    const double hs[3] = {1e-2, 5e-3, 2.5e-3};
    ConvergenceResult r;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
        r.errors[i] = state_distance(free_body(p, s0, Integrator::RK4, hs[i], duration), ref);
        const double x = std::log(hs[i]), y = std::log(r.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    r.slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    return r;
}

} // namespace slung::testing
