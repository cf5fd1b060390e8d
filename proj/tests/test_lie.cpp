#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "se3filter/lie.hpp"
#include "support.hpp"

using namespace se3filter;
using test_support::random_pose;
using test_support::random_rotation;
using test_support::random_twist;
using test_support::random_unit;
using test_support::random_vec3;

TEST_CASE("skew matches its definition and the cross product") {
  Mat3 expected;
  expected << 0, -3, 2,
              3, 0, -1,
             -2, 1, 0;
  REQUIRE((skew({1, 2, 3}) - expected).norm() == 0.0);
  REQUIRE(skew(Vec3::Zero()).norm() == 0.0);

  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    Vec3 a = random_vec3(rng, -5, 5);
    Vec3 b = random_vec3(rng, -5, 5);
    REQUIRE((skew(a) * b - a.cross(b)).norm() < 1e-13);
    REQUIRE((skew(a) + skew(a).transpose()).norm() == 0.0);
  }
}

TEST_CASE("vex inverts skew") {
  REQUIRE((vex(skew({1, 2, 3})) - Vec3{1, 2, 3}).norm() == 0.0);
  REQUIRE(vex(Mat3::Zero()).norm() == 0.0);

  std::mt19937_64 rng(102);
  for (int i = 0; i < 100; ++i) {
    Vec3 a = random_vec3(rng, -10, 10);
    REQUIRE((vex(skew(a)) - a).norm() < 1e-14);
  }

  Mat3 not_antisym = Mat3::Identity();
  REQUIRE_THROWS_AS(vex(not_antisym), InvalidArgument);
}

TEST_CASE("wedge lays out the se(3) block structure") {
  REQUIRE(wedge(Twist{}).norm() == 0.0);

  Mat4 m = wedge(Twist{{0, 0, 1}, Vec3::Zero()});
  REQUIRE(m(0, 1) == -1.0);
  REQUIRE(m(1, 0) == 1.0);
  REQUIRE(m.topRightCorner<3, 1>().norm() == 0.0);

  std::mt19937_64 rng(103);
  for (int i = 0; i < 100; ++i) {
    Twist y = random_twist(rng, 3.0);
    Mat4 w = wedge(y);
    REQUIRE((w.topLeftCorner<3, 3>() - skew(y.omega)).norm() == 0.0);
    REQUIRE((w.topRightCorner<3, 1>() - y.v).norm() == 0.0);
    REQUIRE(w.row(3).norm() == 0.0);
  }
}

TEST_CASE("antisym_project") {
  std::mt19937_64 rng(104);
  Mat3 sym = Mat3::Random();
  sym = (sym + sym.transpose()).eval();
  REQUIRE(antisym_project(sym).norm() < 1e-15);

  Mat3 anti = skew(random_vec3(rng));
  REQUIRE((antisym_project(anti) - anti).norm() < 1e-15);

  for (int i = 0; i < 100; ++i) {
    Mat3 m = Mat3::Random();
    REQUIRE((antisym_project(m) - 0.5 * (m - m.transpose())).norm() < 1e-15);
  }
}

TEST_CASE("upsilon_a closed form on Rodriguez rotations") {
  REQUIRE(upsilon_a(Mat3::Identity()).norm() == 0.0);

  // rho = [1,0,0]: 2 rho / (1 + |rho|^2) = rho itself.
  Vec3 u = upsilon_a(rodriguez_to_rotation({1, 0, 0}));
  REQUIRE((u - Vec3{1, 0, 0}).norm() < 1e-14);

  std::mt19937_64 rng(105);
  for (int i = 0; i < 1000; ++i) {
    Vec3 rho = random_vec3(rng, -3, 3);
    Mat3 R = rodriguez_to_rotation(rho);
    Vec3 ua = upsilon_a(R);
    REQUIRE((ua - 2.0 * rho / (1.0 + rho.squaredNorm())).norm() < 1e-12);
    // |Y_a(R)|^2 = 4 (1 - |R|_I) |R|_I
    double d = distance_so3(R);
    REQUIRE(std::abs(ua.squaredNorm() - 4.0 * (1.0 - d) * d) < 1e-12);
  }
}

TEST_CASE("upsilon extracts [Y_a(R); p]") {
  REQUIRE(upsilon(Mat4::Identity()).norm() == 0.0);

  std::mt19937_64 rng(106);
  for (int i = 0; i < 100; ++i) {
    Twist y = random_twist(rng, 2.0);
    REQUIRE((upsilon(wedge(y)) - y.vec()).norm() < 1e-14);

    Pose err = random_pose(rng);
    Vec6 u = upsilon(err.matrix());
    REQUIRE((u.head<3>() - upsilon_a(err.R)).norm() == 0.0);
    REQUIRE((u.tail<3>() - err.p).norm() == 0.0);
  }
}

TEST_CASE("distance_so3") {
  REQUIRE(distance_so3(Mat3::Identity()) == 0.0);
  REQUIRE(distance_so3(Eigen::DiagonalMatrix<double, 3>(-1, -1, 1)) == 1.0);

  std::mt19937_64 rng(107);
  for (int i = 0; i < 1000; ++i) {
    Vec3 rho = random_vec3(rng, -4, 4);
    double n2 = rho.squaredNorm();
    REQUIRE(std::abs(distance_so3(rodriguez_to_rotation(rho)) - n2 / (1 + n2)) <
            1e-12);
  }
}

TEST_CASE("angle_axis_to_rotation") {
  std::mt19937_64 rng(108);
  REQUIRE((angle_axis_to_rotation(0.0, random_unit(rng)) - Mat3::Identity())
              .norm() < 1e-15);

  // 170 deg about [3,10,8]/|.|, the published initial-estimate block.
  Mat3 init = angle_axis_to_rotation(deg2rad(170.0),
                                     Vec3{3, 10, 8}.normalized());
  Mat3 expected;
  expected << -0.8816, 0.2386, 0.4074,
               0.4498, 0.1625, 0.8782,
               0.1433, 0.9574, -0.2505;
  REQUIRE((init - expected).cwiseAbs().maxCoeff() < 5e-4);

  Mat3 quarter = angle_axis_to_rotation(M_PI / 2.0, Vec3::UnitX());
  Mat3 quarter_expected;
  quarter_expected << 1, 0, 0,
                      0, 0, -1,
                      0, 1, 0;
  REQUIRE((quarter - quarter_expected).norm() < 1e-15);

  REQUIRE_THROWS_AS(angle_axis_to_rotation(1.0, Vec3{1, 1, 0}),
                    InvalidArgument);

  for (int i = 0; i < 200; ++i) {
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    Mat3 R = angle_axis_to_rotation(ang(rng), random_unit(rng));
    REQUIRE(is_rotation(R, 1e-12));
  }
}

TEST_CASE("rodriguez map and its inverse") {
  REQUIRE((rodriguez_to_rotation(Vec3::Zero()) - Mat3::Identity()).norm() <
          1e-15);

  // rho = tan(alpha/2) u with alpha = pi/2, u = e1 gives rho = [1,0,0].
  Mat3 R1 = rodriguez_to_rotation({1, 0, 0});
  REQUIRE((R1 - angle_axis_to_rotation(M_PI / 2.0, Vec3::UnitX())).norm() <
          1e-14);
  REQUIRE((rotation_to_rodriguez(R1) - Vec3{1, 0, 0}).norm() < 1e-13);

  REQUIRE(rotation_to_rodriguez(Mat3::Identity()).norm() == 0.0);
  REQUIRE_THROWS_AS(
      rotation_to_rodriguez(Eigen::DiagonalMatrix<double, 3>(-1, -1, 1)),
      SingularAttitude);

  std::mt19937_64 rng(109);
  for (int i = 0; i < 1000; ++i) {
    Vec3 rho = random_vec3(rng, -5, 5);
    Mat3 R = rodriguez_to_rotation(rho);
    REQUIRE(is_rotation(R, 1e-12));
    REQUIRE((rotation_to_rodriguez(R) - rho).norm() < 1e-10);
  }
}

TEST_CASE("adjoint matrix identities") {
  REQUIRE((adjoint_matrix(Pose::identity()) - Mat6::Identity()).norm() == 0.0);

  std::mt19937_64 rng(110);
  for (int i = 0; i < 1000; ++i) {
    Pose t1 = random_pose(rng);
    Pose t2 = random_pose(rng);
    REQUIRE((adjoint_matrix(t1 * t2) - adjoint_matrix(t1) * adjoint_matrix(t2))
                .norm() < 1e-10);
    REQUIRE((adjoint_matrix(t1) * adjoint_matrix(pose_inverse(t1)) -
             Mat6::Identity())
                .norm() < 1e-10);
  }
}

TEST_CASE("adjoint action") {
  std::mt19937_64 rng(111);
  Twist y0 = random_twist(rng);
  REQUIRE((adjoint_action(Pose::identity(), wedge(y0)) - wedge(y0)).norm() <
          1e-15);

  for (int i = 0; i < 1000; ++i) {
    Pose t = random_pose(rng);
    Twist y = random_twist(rng, 2.0);
    Mat4 lhs = adjoint_action(t, wedge(y));
    Vec6 mapped = adjoint_matrix(t) * y.vec();
    REQUIRE((lhs - wedge(mapped)).norm() < 1e-10);
    REQUIRE((upsilon(lhs) - mapped).norm() < 1e-10);
  }

  REQUIRE_THROWS_AS(adjoint_action(Pose::identity(), Mat4::Identity()),
                    InvalidArgument);
}

TEST_CASE("pose compose and inverse") {
  std::mt19937_64 rng(112);
  for (int i = 0; i < 200; ++i) {
    Pose a = random_pose(rng);
    Pose b = random_pose(rng);
    Pose c = random_pose(rng);

    Pose ident = a * pose_inverse(a);
    REQUIRE((ident.R - Mat3::Identity()).norm() < 1e-12);
    REQUIRE(ident.p.norm() < 1e-12);

    Pose ib = Pose::identity() * b;
    REQUIRE((ib.R - b.R).norm() == 0.0);
    REQUIRE((ib.p - b.p).norm() == 0.0);

    Pose left = (a * b) * c;
    Pose right = a * (b * c);
    REQUIRE((left.matrix() - right.matrix()).norm() < 1e-12);
    REQUIRE((left.matrix() - a.matrix() * b.matrix() * c.matrix()).norm() <
            1e-12);
  }
}

TEST_CASE("pose_exp") {
  Pose id = pose_exp(Twist{}, 0.5);
  REQUIRE((id.matrix() - Mat4::Identity()).norm() == 0.0);

  // Constant z-spin: rotation by w*dt about z, no translation.
  double w = 0.7, dt = 0.3;
  Pose spin = pose_exp(Twist{{0, 0, w}, Vec3::Zero()}, dt);
  REQUIRE((spin.R - angle_axis_to_rotation(w * dt, Vec3::UnitZ())).norm() <
          1e-14);
  REQUIRE(spin.p.norm() == 0.0);

  std::mt19937_64 rng(113);
  for (int i = 0; i < 100; ++i) {
    Twist y = random_twist(rng, 2.0);
    // First-order Taylor remainder is O(dt^2).
    for (double h : {1e-3, 5e-4}) {
      Mat4 rem = pose_exp(y, h).matrix() - Mat4::Identity() - h * wedge(y);
      REQUIRE(rem.norm() < 4.0 * h * h * y.vec().squaredNorm() + 1e-12);
    }
    REQUIRE(is_rotation(pose_exp(y, 0.1).R, 1e-12));
  }
}

TEST_CASE("section-2 identities") {
  std::mt19937_64 rng(114);
  for (int i = 0; i < 1000; ++i) {
    Vec3 alpha = random_vec3(rng, -3, 3);
    Vec3 beta = random_vec3(rng, -3, 3);
    Mat3 lhs = -skew(beta) * skew(alpha);
    Mat3 rhs = beta.dot(alpha) * Mat3::Identity() - alpha * beta.transpose();
    REQUIRE((lhs - rhs).norm() < 1e-12);

    Mat3 R = random_rotation(rng);
    REQUIRE((skew(R * alpha) - R * skew(alpha) * R.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("orthogonality drift stays bounded over long composition chains") {
  // 30'000 compositions with re-projection every 1000 steps.
  std::mt19937_64 rng(115);
  Pose T = Pose::identity();
  Twist y = {{0.3, -0.2, 0.4}, {0.1, 0.05, -0.2}};
  for (int i = 1; i <= 30000; ++i) {
    T = T * pose_exp(y, 1e-3);
    if (i % 1000 == 0) T.R = orthonormalize(T.R);
  }
  REQUIRE((T.R.transpose() * T.R - Mat3::Identity()).norm() <= 1e-9);
}

TEST_CASE("euler angles round-trip away from the pitch poles") {
  std::mt19937_64 rng(116);
  int used = 0;
  while (used < 200) {
    Mat3 R = random_rotation(rng);
    Vec3 e = euler_zyx(R);
    if (std::abs(std::abs(e.y()) - M_PI / 2.0) < 0.05) continue;
    ++used;
    REQUIRE((rotation_from_euler_zyx(e.x(), e.y(), e.z()) - R).norm() < 1e-9);
  }
}
