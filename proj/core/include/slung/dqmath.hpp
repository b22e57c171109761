#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace slung {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Hamilton quaternion, scalar first.
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Quaternion identity() { return {}; }
    /// Vector quaternion (w = 0) embedding of a 3-vector.
    static Quaternion pure(const Vector3& v) { return {0.0, v.x(), v.y(), v.z()}; }
    static Quaternion from_axis_angle(const Vector3& axis, double angle);

    Vector3 vec() const { return {x, y, z}; }
    double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
    double squared_norm() const { return dot(*this); }
    double norm() const;
    Quaternion conj() const { return {w, -x, -y, -z}; }
    Quaternion normalized() const;
    bool is_unit(double tol = 1e-9) const;

    bool operator==(const Quaternion&) const = default;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b);
Quaternion operator+(const Quaternion& a, const Quaternion& b);
Quaternion operator-(const Quaternion& a, const Quaternion& b);
Quaternion operator*(double s, const Quaternion& q);
Quaternion operator-(const Quaternion& q);

Quaternion quat_mul(const Quaternion& a, const Quaternion& b);

/// q (x) v (x) q*. Throws InvalidInput if q is not unit within 1e-6.
Vector3 quat_rotate(const Quaternion& q, const Vector3& v);
/// q* (x) v (x) q.
Vector3 quat_rotate_inv(const Quaternion& q, const Vector3& v);

/// Angle-axis vector of a unit quaternion on the w >= 0 hemisphere.
/// Throws SingularRotation when the angle is within 1e-6 of pi.
Vector3 rotation_vector(const Quaternion& q);

Matrix3 to_rotation_matrix(const Quaternion& q);

struct DualVector;

/// q_r + q_d eps.
struct DualQuaternion {
    Quaternion real;
    Quaternion dual{0.0, 0.0, 0.0, 0.0};

    static DualQuaternion identity() { return {}; }
    static DualQuaternion from_vector(const DualVector& v);

    DualQuaternion conj() const { return {real.conj(), dual.conj()}; }
    bool is_unit(double tol = 1e-9) const;
    /// Body-frame translation 2 q_r* (x) q_d (vector part).
    Vector3 translation() const;

    bool operator==(const DualQuaternion&) const = default;
};

DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion operator*(double s, const DualQuaternion& q);

DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion dq_conj(const DualQuaternion& a);

/// v_r + v_d eps with both parts vector quaternions.
struct DualVector {
    Vector3 real = Vector3::Zero();
    Vector3 dual = Vector3::Zero();

    static DualVector zero() { return {}; }
    double norm() const;
    /// Componentwise product of both parts (gain application).
    DualVector cwise(const DualVector& k) const;

    bool operator==(const DualVector& o) const { return real == o.real && dual == o.dual; }
};

DualVector operator+(const DualVector& a, const DualVector& b);
DualVector operator-(const DualVector& a, const DualVector& b);
DualVector operator-(const DualVector& a);
DualVector operator*(double s, const DualVector& a);

/// Dual cross product (the dual-vector part of the product of two dual vectors).
DualVector dual_cross(const DualVector& a, const DualVector& b);

/// 1/2 (theta + T eps). Requires a unit argument; throws SingularRotation near pi.
DualVector dq_log(const DualQuaternion& a);

/// q (x) r (x) q*. Throws InvalidInput on a non-unit q.
DualVector adjoint(const DualQuaternion& q, const DualVector& r);

/// real = q, dual = 1/2 q (x) t_body.
DualQuaternion from_pose(const Quaternion& q, const Vector3& t_body);

/// Unit-renormalize a pose: normalizes the real part and rebuilds the dual part
/// from the recovered translation so that real . dual = 0.
DualQuaternion normalize_pose(const DualQuaternion& a);

} // namespace slung
