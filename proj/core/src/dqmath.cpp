#include "slung/dqmath.hpp"

#include "slung/errors.hpp"

#include <cmath>
#include <numbers>

namespace slung {

namespace {
constexpr double kRotateTol = 1e-6;
constexpr double kPiTol = 1e-6;
} // namespace

Quaternion Quaternion::from_axis_angle(const Vector3& axis, double angle) {
    const Vector3 u = axis.normalized();
    const double s = std::sin(0.5 * angle);
    return {std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z()};
}

double Quaternion::norm() const { return std::sqrt(squared_norm()); }

Quaternion Quaternion::normalized() const {
    const double n = norm();
    if (n == 0.0) throw InvalidInput("cannot normalize a zero quaternion");
    return {w / n, x / n, y / n, z / n};
}

bool Quaternion::is_unit(double tol) const { return std::abs(norm() - 1.0) <= tol; }

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}

Quaternion operator*(double s, const Quaternion& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }

Quaternion operator-(const Quaternion& q) { return {-q.w, -q.x, -q.y, -q.z}; }

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) { return a * b; }

Vector3 quat_rotate(const Quaternion& q, const Vector3& v) {
    if (!q.is_unit(kRotateTol)) throw InvalidInput("quat_rotate: quaternion is not unit");
    return (q * Quaternion::pure(v) * q.conj()).vec();
}

Vector3 quat_rotate_inv(const Quaternion& q, const Vector3& v) { return quat_rotate(q.conj(), v); }

Vector3 rotation_vector(const Quaternion& q_in) {
    const Quaternion q = q_in.w < 0.0 ? -q_in : q_in;
    const double s = q.vec().norm();
    const double angle = 2.0 * std::atan2(s, q.w);
    if (std::abs(angle - std::numbers::pi) < kPiTol) {
        throw SingularRotation("rotation angle is within 1e-6 of pi");
    }
    if (s < 1e-12) return 2.0 * q.vec();
    return angle * q.vec() / s;
}

Matrix3 to_rotation_matrix(const Quaternion& q) {
    return Eigen::Quaterniond(q.w, q.x, q.y, q.z).toRotationMatrix();
}

DualQuaternion DualQuaternion::from_vector(const DualVector& v) {
    return {Quaternion::pure(v.real), Quaternion::pure(v.dual)};
}

bool DualQuaternion::is_unit(double tol) const {
    return real.is_unit(tol) && std::abs(real.dot(dual)) <= tol;
}

Vector3 DualQuaternion::translation() const { return 2.0 * (real.conj() * dual).vec(); }

DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.real * b.real, a.real * b.dual + a.dual * b.real};
}

DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.real + b.real, a.dual + b.dual};
}

DualQuaternion operator*(double s, const DualQuaternion& q) { return {s * q.real, s * q.dual}; }

DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b) { return a * b; }

DualQuaternion dq_conj(const DualQuaternion& a) { return a.conj(); }

double DualVector::norm() const { return std::sqrt(real.squaredNorm() + dual.squaredNorm()); }

DualVector DualVector::cwise(const DualVector& k) const {
    return {real.cwiseProduct(k.real), dual.cwiseProduct(k.dual)};
}

DualVector operator+(const DualVector& a, const DualVector& b) { return {a.real + b.real, a.dual + b.dual}; }
DualVector operator-(const DualVector& a, const DualVector& b) { return {a.real - b.real, a.dual - b.dual}; }
DualVector operator-(const DualVector& a) { return {-a.real, -a.dual}; }
DualVector operator*(double s, const DualVector& a) { return {s * a.real, s * a.dual}; }

DualVector dual_cross(const DualVector& a, const DualVector& b) {
    return {a.real.cross(b.real), a.real.cross(b.dual) + a.dual.cross(b.real)};
}

DualVector dq_log(const DualQuaternion& a) {
    if (!a.real.is_unit(kRotateTol)) throw InvalidInput("dq_log: argument is not unit");
    const Quaternion r = a.real.w < 0.0 ? -a.real : a.real;
    const Quaternion d = a.real.w < 0.0 ? -a.dual : a.dual;
    const Vector3 theta = rotation_vector(r);
    const Vector3 t = 2.0 * (r.conj() * d).vec();
    return {0.5 * theta, 0.5 * t};
}

DualVector adjoint(const DualQuaternion& q, const DualVector& r) {
    if (!q.real.is_unit(kRotateTol)) throw InvalidInput("adjoint: transform is not unit");
    const DualQuaternion out = q * DualQuaternion::from_vector(r) * q.conj();
    return {out.real.vec(), out.dual.vec()};
}

DualQuaternion from_pose(const Quaternion& q, const Vector3& t_body) {
    return {q, 0.5 * (q * Quaternion::pure(t_body))};
}

DualQuaternion normalize_pose(const DualQuaternion& a) {
    const double n = a.real.norm();
    if (n == 0.0) throw InvalidInput("normalize_pose: zero real part");
    const Quaternion r{a.real.w / n, a.real.x / n, a.real.y / n, a.real.z / n};
    const Quaternion d{a.dual.w / n, a.dual.x / n, a.dual.y / n, a.dual.z / n};
    const Vector3 t = 2.0 * (r.conj() * d).vec();
    return from_pose(r, t);
}

} // namespace slung
