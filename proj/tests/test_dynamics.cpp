#include "support.hpp"

#include "slung/dynamics.hpp"
#include "slung/errors.hpp"
#include "slung/integrator.hpp"

#include <gtest/gtest.h>

using namespace slung;
using namespace slung::testing;

namespace {

CargoParams nominal_params() {
    CargoParams c;
    c.uav = RigidBodyParams::make(0.7, Vector3(0.005, 0.007, 0.006).asDiagonal());
    c.load_mass = 0.05;
    c.cable_length = 0.3;
    return c;
}

TautState hover_taut(const CargoParams& p, const Vector3& load) {
    TautState s;
    s.load_config = {Vector3::UnitZ(), load};
    s.load_twist = {Vector3::Zero(), Vector3::Zero()};
    (void)p;
    return s;
}

} // namespace

TEST(RigidBodyParams, RejectsInvalid) {
    EXPECT_THROW(RigidBodyParams::make(0.0, Matrix3::Identity()), InvalidInput);
    EXPECT_THROW(RigidBodyParams::make(-1.0, Matrix3::Identity()), InvalidInput);
    Matrix3 asym = Matrix3::Identity();
    asym(0, 1) = 0.1;
    EXPECT_THROW(RigidBodyParams::make(1.0, asym), InvalidInput);
    EXPECT_THROW(RigidBodyParams::make(1.0, Vector3(1.0, -1.0, 1.0).asDiagonal()), InvalidInput);
    const auto p = RigidBodyParams::make(2.0, Vector3(1.0, 2.0, 4.0).asDiagonal());
    EXPECT_LT((p.inertia * p.inertia_inv - Matrix3::Identity()).norm(), 1e-15);
}

TEST(TwistOf, Examples) {
    const Vector3 t(1.0, 2.0, 3.0);
    const Vector3 v(-0.5, 0.2, 0.9);
    const DualVector a = twist_of(Vector3::Zero(), t, v);
    EXPECT_EQ(a.real, Vector3::Zero());
    EXPECT_EQ(a.dual, v);
    const Vector3 w(0.3, -0.1, 0.7);
    const DualVector b = twist_of(w, Vector3::Zero(), Vector3::Zero());
    EXPECT_EQ(b.real, w);
    EXPECT_EQ(b.dual, Vector3::Zero());
}

TEST(TwistOf, RecoversTranslationRate) {
    Gen g(30);
    for (int i = 0; i < 1000; ++i) {
        const Vector3 w = g.vec(), t = g.vec(3.0), td = g.vec(2.0);
        const DualVector x = twist_of(w, t, td);
        EXPECT_LT((x.dual - w.cross(t) - td).norm(), 1e-14);
        RigidBodyState s{from_pose(g.unit_quat(), t), x};
        EXPECT_LT((s.t_body_dot() - td).norm(), 1e-12);
    }
}

TEST(RigidKinematics, StationaryBody) {
    Gen g(31);
    const RigidBodyState s{g.unit_dual_quat(), DualVector::zero()};
    const DualQuaternion d = rigid_kinematics(s);
    EXPECT_EQ(d.real, (Quaternion{0, 0, 0, 0}));
    EXPECT_EQ(d.dual, (Quaternion{0, 0, 0, 0}));
}

TEST(RigidKinematics, PureSpinMatchesQuaternionOde) {
    Gen g(32);
    const Quaternion q = g.unit_quat();
    const double w = 1.7;
    const RigidBodyState s{from_pose(q, Vector3::Zero()), {Vector3(0.0, 0.0, w), Vector3::Zero()}};
    const Eigen::Quaterniond expected = to_eigen(q) * Eigen::Quaterniond(0.0, 0.0, 0.0, w);
    const Quaternion d = rigid_kinematics(s).real;
    EXPECT_NEAR(d.w, 0.5 * expected.w(), 1e-15);
    EXPECT_NEAR(d.x, 0.5 * expected.x(), 1e-15);
    EXPECT_NEAR(d.y, 0.5 * expected.y(), 1e-15);
    EXPECT_NEAR(d.z, 0.5 * expected.z(), 1e-15);
}

TEST(RigidKinematics, NormPreservedAlongFlow) {
    Gen g(33);
    const auto p = RigidBodyParams::make(1.0, g.inertia(0.5, 2.0));
    for (int i = 0; i < 20; ++i) {
        const RigidBodyState s0{g.unit_dual_quat(), g.dual_vec(2.0)};
        const RigidBodyState s1 = dq_integrate(p, s0, WrenchInput{}, 1e-3, 1);
        // Without renormalization one RK4 step keeps |q|^2 = 1 + 0 eps to O(h^5).
        Vec14 x = pack(s0);
        x = integrate_step(Integrator::RK4, x, 1e-3, [&](const Vec14& y) { return derivative(p, unpack(y), {}); });
        const DualQuaternion raw = unpack(x).pose;
        const DualQuaternion n = raw * raw.conj();
        EXPECT_NEAR((n.real.w - 1.0) / 1e-3, 0.0, 1e-9);
        EXPECT_NEAR(n.dual.w / 1e-3, 0.0, 1e-9);
        EXPECT_TRUE(s1.pose.is_unit(1e-12));
    }
}

TEST(RigidDynamics, Equilibrium) {
    Gen g(34);
    const auto p = RigidBodyParams::make(1.3, g.inertia());
    const RigidBodyState s{from_pose(g.unit_quat(), g.vec()), DualVector::zero()};
    const DualVector d = rigid_dynamics(p, s, {}, {});
    EXPECT_EQ(d.real, Vector3::Zero());
    EXPECT_EQ(d.dual, Vector3::Zero());
}

TEST(RigidDynamics, SphericalInertiaHasNoGyroscopicTerm) {
    Gen g(35);
    const auto p = RigidBodyParams::make(1.0, 0.02 * Matrix3::Identity());
    for (int i = 0; i < 100; ++i) {
        const RigidBodyState s{g.unit_dual_quat(), g.dual_vec(5.0)};
        EXPECT_LT(rigid_dynamics(p, s, {}, {}).real.norm(), 1e-12);
    }
}

TEST(RigidDynamics, ForcesAndTorquesAreSummed) {
    Gen g(36);
    const auto p = RigidBodyParams::make(0.9, g.inertia());
    const RigidBodyState s{g.unit_dual_quat(), g.dual_vec()};
    const WrenchInput a{g.vec(), g.vec()}, b{g.vec(), g.vec()};
    const DualVector lhs = rigid_dynamics(p, s, a, b);
    const DualVector rhs = rigid_dynamics(p, s, WrenchInput{a.torque + b.torque, a.force + b.force}, {});
    EXPECT_LT((lhs.real - rhs.real).norm(), 1e-12);
    EXPECT_LT((lhs.dual - rhs.dual).norm(), 1e-12);
}

// The dual-quaternion model against quaternion attitude + Newton-Euler translation,
// both integrated with RK4 at dt = 1e-3 for one second.
TEST(RigidDynamics, MatchesNewtonEulerOracle) {
    Gen g(37);
    double worst_pos = 0.0, worst_att = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double mass = g.uniform(0.2, 3.0);
        const Matrix3 J = g.inertia(0.002, 0.02);
        const auto p = RigidBodyParams::make(mass, J);
        const Quaternion q0 = g.unit_quat();
        const Vector3 w0 = g.vec(2.0), t0 = g.vec(2.0), td0 = g.vec(1.0);
        const WrenchInput u{g.vec(0.01), g.vec(2.0)};

        NewtonEulerState ne{to_eigen(q0), w0, t0, td0};
        for (int k = 0; k < 1000; ++k) ne = newton_euler_step(ne, mass, J, u.torque, u.force, 1e-3);

        const RigidBodyState s = dq_integrate(p, {from_pose(q0, t0), twist_of(w0, t0, td0)}, u, 1e-3, 1000);
        worst_pos = std::max(worst_pos, (s.t_body() - ne.t).norm());
        worst_att = std::max(worst_att, quat_distance(s.pose.real, from_eigen(ne.q)));
        ASSERT_LT(dq_distance(s.pose, from_pose(from_eigen(ne.q), ne.t)), 1e-6) << "trial " << trial;
    }
    EXPECT_LT(worst_pos, 1e-6);
    EXPECT_LT(worst_att, 1e-6);
}

TEST(PoseError, Examples) {
    Gen g(38);
    const DualQuaternion q = g.unit_dual_quat();
    EXPECT_LT(dq_distance(pose_error(q, q), DualQuaternion::identity()), 1e-12);
    EXPECT_LT(dq_distance(pose_error(DualQuaternion::identity(), q), q), 1e-15);
}

TEST(PoseError, LeftInvariant) {
    Gen g(39);
    for (int i = 0; i < 1000; ++i) {
        const DualQuaternion d = g.unit_dual_quat(), q = g.unit_dual_quat(), q0 = g.unit_dual_quat();
        EXPECT_LT(dq_distance(pose_error(q0 * d, q0 * q), pose_error(d, q)), 1e-9);
    }
}

TEST(TwistError, Examples) {
    Gen g(40);
    const RigidBodyState s{g.unit_dual_quat(), g.dual_vec()};
    const DualVector same = twist_error(s, s.pose, s.twist);
    EXPECT_LT(same.norm(), 1e-12);
    const DualVector zero_des = twist_error(s, g.unit_dual_quat(), DualVector::zero());
    EXPECT_LT((zero_des - s.twist).norm(), 1e-15);
}

// d/dt xi_e = F + u - E along a trajectory, checked by central differences.
TEST(TwistError, ErrorDynamicsMatchFiniteDifferences) {
    Gen g(41);
    const auto p = RigidBodyParams::make(0.8, g.inertia());
    const double h = 1e-4;
    for (int trial = 0; trial < 20; ++trial) {
        const DualVector xi0 = g.dual_vec(0.5), xi1 = g.dual_vec(0.5);
        auto xi_d = [&](double t) { return xi0 + t * xi1; };
        const WrenchInput u{g.vec(0.01), g.vec(1.0)};

        // State is [body; desired]; the desired pose follows qdot = 1/2 q xi_d(t).
        using Vec22 = Eigen::Matrix<double, 22, 1>;
        auto f = [&](double t, const Vec22& x) {
            Vec22 d;
            const RigidBodyState s = unpack(x.head<14>());
            d.head<14>() = derivative(p, s, u);
            const DualQuaternion qd{{x(14), x(15), x(16), x(17)}, {x(18), x(19), x(20), x(21)}};
            const DualQuaternion r = 0.5 * (qd * DualQuaternion::from_vector(xi_d(t)));
            d.tail<8>() << r.real.w, r.real.x, r.real.y, r.real.z, r.dual.w, r.dual.x, r.dual.y, r.dual.z;
            return d;
        };
        auto step = [&](double t, const Vec22& x, double dt) {
            const Vec22 k1 = f(t, x);
            const Vec22 k2 = f(t + dt / 2, x + dt / 2 * k1);
            const Vec22 k3 = f(t + dt / 2, x + dt / 2 * k2);
            const Vec22 k4 = f(t + dt, x + dt * k3);
            return Vec22(x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4));
        };
        auto xi_e = [&](double t, const Vec22& x) {
            const RigidBodyState s = unpack(x.head<14>());
            const DualQuaternion qd{{x(14), x(15), x(16), x(17)}, {x(18), x(19), x(20), x(21)}};
            return twist_error(s, qd, xi_d(t));
        };

        Vec22 x;
        const DualQuaternion qd0 = g.unit_dual_quat(1.0);
        x.head<14>() = pack({g.unit_dual_quat(1.0), g.dual_vec(0.5)});
        x.tail<8>() << qd0.real.w, qd0.real.x, qd0.real.y, qd0.real.z, qd0.dual.w, qd0.dual.x, qd0.dual.y, qd0.dual.z;
        double t = 0.0;
        for (int k = 0; k < 100; ++k, t += 1e-3) x = step(t, x, 1e-3);

        const Vec22 xm = step(t, x, -h);
        const Vec22 xp = step(t, x, h);
        const DualVector fd = (1.0 / (2 * h)) * (xi_e(t + h, xp) - xi_e(t - h, xm));

        const RigidBodyState s = unpack(x.head<14>());
        const DualQuaternion qd{{x(14), x(15), x(16), x(17)}, {x(18), x(19), x(20), x(21)}};
        const DualQuaternion qe = pose_error(qd, s.pose);
        const DualVector e = twist_error(s, qd, xi_d(t));
        const DualVector model = rigid_dynamics(p, s, u, {}) - error_feedforward(qe, e, xi_d(t), xi1);
        EXPECT_LT((fd - model).norm(), 1e-6) << "trial " << trial;
    }
}

TEST(GravityBody, RotatesIntoBodyFrame) {
    Gen g(42);
    for (int i = 0; i < 100; ++i) {
        const Quaternion q = g.unit_quat();
        const Vector3 gb = gravity_body(q, 9.81);
        EXPECT_LT((to_eigen(q).toRotationMatrix().transpose() * Vector3(0, 0, -9.81) - gb).norm(), 1e-12);
    }
}

TEST(SlackDerivative, GroundedLoadAndHoveringUav) {
    const CargoParams p = nominal_params();
    SlackState s;
    s.uav.pose = from_pose(Quaternion::identity(), Vector3(0.0, 0.0, 0.3));
    s.load_pos = Vector3::Zero();
    const WrenchInput hover{Vector3::Zero(), Vector3(0.0, 0.0, p.uav.mass * 9.81)};
    const SlackDerivative d = slack_derivative(p, s, hover, 9.81);
    EXPECT_LT(d.twist_dot.norm(), 1e-15);
    EXPECT_EQ(d.pose_dot.real, (Quaternion{0, 0, 0, 0}));
    EXPECT_EQ(d.pose_dot.dual, (Quaternion{0, 0, 0, 0}));
    EXPECT_EQ(d.load_pos_dot, Vector3::Zero());
    EXPECT_EQ(d.load_vel_dot, Vector3::Zero());
}

TEST(SlackDerivative, AirborneLoadFallsFreely) {
    const CargoParams p = nominal_params();
    SlackState s;
    s.load_pos = Vector3(0.1, 0.0, 0.5);
    s.load_vel = Vector3(0.2, 0.0, 0.3);
    const SlackDerivative d = slack_derivative(p, s, {}, 9.81);
    EXPECT_EQ(d.load_vel_dot, Vector3(0.0, 0.0, -9.81));
    EXPECT_EQ(d.load_pos_dot, s.load_vel);
}

TEST(SlackDerivative, UavPartIsRigidDynamics) {
    Gen g(43);
    const CargoParams p = nominal_params();
    for (int i = 0; i < 100; ++i) {
        SlackState s;
        s.uav = {g.unit_dual_quat(), g.dual_vec()};
        const WrenchInput u{g.vec(0.01), g.vec(5.0)};
        const SlackDerivative d = slack_derivative(p, s, u, 9.81);
        const WrenchInput ext{Vector3::Zero(), p.uav.mass * gravity_body(s.uav.pose.real.normalized(), 9.81)};
        const DualVector ref = rigid_dynamics(p.uav, s.uav, u, ext);
        EXPECT_EQ(d.twist_dot.real, ref.real);
        EXPECT_EQ(d.twist_dot.dual, ref.dual);
        EXPECT_EQ(d.pose_dot, rigid_kinematics(s.uav));
    }
}

TEST(SlackDerivative, RejectsTautState) {
    const CargoState c = TautState{};
    EXPECT_THROW(slack_derivative(nominal_params(), c, {}, 9.81), InvalidState);
}

// A free-falling slack load conserves mechanical energy under RK4.
TEST(SlackDerivative, AirborneLoadEnergy) {
    const CargoParams p = nominal_params();
    SlackState s;
    s.load_pos = Vector3(0.0, 0.0, 50.0);
    s.load_vel = Vector3(1.0, -0.5, 4.0);
    auto energy = [&](const SlackState& x) {
        return 0.5 * p.load_mass * x.load_vel.squaredNorm() + p.load_mass * 9.81 * x.load_pos.z();
    };
    using Vec6 = Eigen::Matrix<double, 6, 1>;
    Vec6 x;
    x << s.load_pos, s.load_vel;
    const double e0 = energy(s);
    for (int k = 0; k < 1000; ++k) {
        x = integrate_step(Integrator::RK4, x, 1e-3, [&](const Vec6& y) {
            SlackState t = s;
            t.load_pos = y.head<3>();
            t.load_vel = y.tail<3>();
            const SlackDerivative d = slack_derivative(p, t, {}, 9.81);
            Vec6 r;
            r << d.load_pos_dot, d.load_vel_dot;
            return r;
        });
    }
    s.load_pos = x.head<3>();
    s.load_vel = x.tail<3>();
    EXPECT_LT(std::abs(energy(s) - e0) / e0, 1e-6);
}

TEST(TautDerivative, HoverEquilibrium) {
    const CargoParams p = nominal_params();
    const TautState s = hover_taut(p, Vector3(0.3, -0.2, 1.0));
    const Vector3 F = p.total_mass() * 9.81 * Vector3::UnitZ();
    const TautDerivative d = taut_derivative(p, s, F, Vector3::Zero(), Vector3::Zero(), Vector3::Zero(), 9.81);
    EXPECT_LT(d.config_dot.norm(), 1e-15);
    EXPECT_LT(d.twist_dot.norm(), 1e-12);
    EXPECT_LT(d.omega_dot.norm(), 1e-15);
    EXPECT_LT(Eigen::Vector4d(d.attitude_dot.w, d.attitude_dot.x, d.attitude_dot.y, d.attitude_dot.z).norm(), 1e-15);
}

TEST(TautDerivative, AxialThrustDoesNotSwing) {
    Gen g(44);
    const CargoParams p = nominal_params();
    for (int i = 0; i < 100; ++i) {
        TautState s;
        s.load_config = {g.unit_vec(), g.vec()};
        const Vector3 F = g.uniform(0.0, 20.0) * s.qc();
        EXPECT_LT(taut_input_map(p, s, F).real.norm(), 1e-12);
    }
}

TEST(TautDerivative, ConstraintAccelerationIdentity) {
    Gen g(45);
    const CargoParams p = nominal_params();
    for (int i = 0; i < 1000; ++i) {
        TautState s;
        const Vector3 q = g.unit_vec();
        Vector3 qd = g.vec(3.0);
        qd -= qd.dot(q) * q;
        s.load_config = {q, g.vec()};
        s.load_twist = {qd, g.vec()};
        const TautDerivative d = taut_derivative(p, s, g.vec(15.0), g.vec(0.01), g.vec(), Vector3::Zero(), 9.81);
        EXPECT_NEAR(q.dot(d.twist_dot.real), -qd.squaredNorm(), 1e-10);
    }
}

TEST(TautDerivative, UnitSphereKeptWithoutRenormalization) {
    Gen g(46);
    const CargoParams p = nominal_params();
    using Vec12 = Eigen::Matrix<double, 12, 1>;
    for (int trial = 0; trial < 10; ++trial) {
        TautState s;
        const Vector3 q = g.unit_vec();
        Vector3 qd = g.vec(1.0);
        qd -= qd.dot(q) * q;
        s.load_config = {q, Vector3::Zero()};
        s.load_twist = {qd, Vector3::Zero()};
        const Vector3 F = g.vec(3.0) + p.total_mass() * 9.81 * Vector3::UnitZ();
        Vec12 x;
        x << s.load_config.real, s.load_config.dual, s.load_twist.real, s.load_twist.dual;
        for (int k = 0; k < 1000; ++k) {
            x = integrate_step(Integrator::RK4, x, 1e-3, [&](const Vec12& y) {
                TautState t = s;
                t.load_config = {y.segment<3>(0), y.segment<3>(3)};
                t.load_twist = {y.segment<3>(6), y.segment<3>(9)};
                const TautDerivative d = taut_derivative(p, t, F, Vector3::Zero(), Vector3::Zero(), Vector3::Zero(), 9.81);
                Vec12 r;
                r << d.config_dot.real, d.config_dot.dual, d.twist_dot.real, d.twist_dot.dual;
                return r;
            });
        }
        EXPECT_LT(std::abs(x.segment<3>(0).norm() - 1.0), 1e-5);
        EXPECT_LT(std::abs(x.segment<3>(0).dot(x.segment<3>(6))), 1e-5);
    }
}

TEST(TautDerivative, RejectsOffSphereState) {
    TautState s;
    s.load_config = {Vector3(0.0, 0.0, 1.01), Vector3::Zero()};
    EXPECT_THROW(taut_derivative(nominal_params(), s, Vector3::Zero(), Vector3::Zero(), Vector3::Zero(),
                                 Vector3::Zero(), 9.81),
                 ConstraintViolation);
    const CargoState slack = SlackState{};
    EXPECT_THROW(taut_derivative(nominal_params(), slack, Vector3::Zero(), Vector3::Zero(), Vector3::Zero(),
                                 Vector3::Zero(), 9.81),
                 InvalidState);
}

TEST(UavPoseFromLoad, Examples) {
    const CargoParams p = nominal_params();
    TautState s;
    s.load_config = {Vector3::UnitZ(), Vector3::Zero()};
    const auto [tv, vv] = uav_pose_from_load(p, s);
    EXPECT_EQ(tv, Vector3(0.0, 0.0, 0.3));
    EXPECT_EQ(vv, Vector3::Zero());
    s.load_twist.real = Vector3(0.5, -1.0, 0.0);
    EXPECT_EQ(uav_pose_from_load(p, s).second, 0.3 * s.load_twist.real);
}

TEST(UavPoseFromLoad, CableLengthExact) {
    Gen g(47);
    const CargoParams p = nominal_params();
    for (int i = 0; i < 1000; ++i) {
        TautState s;
        s.load_config = {g.unit_vec(), g.vec(10.0)};
        const auto [tv, vv] = uav_pose_from_load(p, s);
        EXPECT_NEAR((tv - s.load_pos()).norm(), p.cable_length, 1e-14);
    }
}

TEST(TautFromSlack, JumpMapKeepsPositions) {
    Gen g(48);
    const CargoParams p = nominal_params();
    for (int i = 0; i < 100; ++i) {
        SlackState s;
        const Vector3 load = g.vec();
        const Vector3 dir = g.unit_vec();
        const Quaternion q = g.unit_quat(0.5);
        s.uav.pose = from_pose(q, quat_rotate_inv(q, load + p.cable_length * dir));
        s.uav.twist = g.dual_vec(0.5);
        s.load_pos = load;
        const TautState t = taut_from_slack(p, s);
        EXPECT_LT((t.qc() - dir).norm(), 1e-12);
        EXPECT_LT(std::abs(t.qc().dot(t.qc_dot())), 1e-12);
        EXPECT_EQ(t.load_pos(), load);
        EXPECT_LT((uav_pose_from_load(p, t).first - s.uav.position()).norm(), 1e-12);
        EXPECT_EQ(t.uav_attitude, s.uav.pose.real);
    }
}
