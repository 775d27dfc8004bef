#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "snkb/gram.hpp"
#include "snkb/kernel.hpp"
#include "test_util.hpp"

using namespace snkb;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("kernel_eval: unit diagonal for rbf and matern") {
  Rng rng(7);
  for (int d : {1, 3, 6}) {
    for (auto family : {KernelFamily::gaussian_rbf, KernelFamily::matern52}) {
      const KernelSpec spec{family, 0.7, d};
      for (int rep = 0; rep < 20; ++rep) {
        const Eigen::VectorXd a = 2.0 * rng.sphere(d);
        CHECK(kernel_eval(spec, a, a) == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("kernel_eval: orthogonal linear inputs") {
  const KernelSpec spec{KernelFamily::linear, 1.0, 2};
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(kernel_eval(spec, a, b) == 0.0);
}

TEST_CASE("kernel_eval: rbf cross value at distance one") {
  const KernelSpec spec{KernelFamily::gaussian_rbf, 1.0, 1};
  const double got = kernel_eval(spec, vec1(0.0), vec1(1.0));
  CHECK(got == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(got == doctest::Approx(0.60653).epsilon(1e-4));
}

TEST_CASE("kernel_eval: symmetry and bounded diagonal across families") {
  Rng rng(11);
  for (int rep = 0; rep < 60; ++rep) {
    const int d = 1 + static_cast<int>(rng.next() % 5);
    const KernelSpec spec = test::random_spec(rng, d);
    const Eigen::VectorXd a = test::random_ball_point(rng, d);
    const Eigen::VectorXd b = test::random_ball_point(rng, d);
    CHECK(kernel_eval(spec, a, b) == kernel_eval(spec, b, a));
    CHECK(kernel_eval(spec, a, a) <= 1.0 + 1e-12);
  }
}

TEST_CASE("kernel_eval: rejects bad inputs") {
  const KernelSpec linear{KernelFamily::linear, 1.0, 2};
  Eigen::VectorXd big(2), ok(2), wrong(3);
  big << 2.0, 0.0;
  ok << 0.5, 0.0;
  wrong << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(kernel_eval(linear, big, ok), std::invalid_argument);
  CHECK_THROWS_AS(kernel_eval(linear, ok, wrong), std::invalid_argument);
  const KernelSpec bad{KernelFamily::gaussian_rbf, -1.0, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gram: single point gives the 1x1 diagonal") {
  const KernelSpec spec{KernelFamily::gaussian_rbf, 1.0, 2};
  GramState state(spec);
  Eigen::VectorXd p(2);
  p << 0.3, -0.4;
  state.append(p);
  REQUIRE(state.size() == 1);
  CHECK(state.matrix()(0, 0) == kernel_eval(spec, p, p));
}

TEST_CASE("gram: batch equals sequential appends to 0 ulp") {
  Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 1 + static_cast<int>(rng.next() % 4);
    const int n = 1 + static_cast<int>(rng.next() % 12);
    const KernelSpec spec = test::random_spec(rng, d);
    std::vector<Eigen::VectorXd> points;
    for (int i = 0; i < n; ++i) points.push_back(test::random_ball_point(rng, d));

    const GramState batch = GramState::batch(spec, points);
    GramState sequential(spec);
    for (const auto& p : points) sequential.append(p);

    REQUIRE(batch.size() == sequential.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(batch.matrix()(i, j) == sequential.matrix()(i, j));
      }
    }
  }
}

TEST_CASE("gram: duplicate points keep the matrix PSD") {
  const KernelSpec spec{KernelFamily::gaussian_rbf, 1.0, 2};
  GramState state(spec);
  Eigen::VectorXd p(2);
  p << 0.1, 0.2;
  state.append(p);
  state.append(p);
  state.append(p);
  const Eigen::VectorXd eigs = state.eigenvalues();  // would throw if indefinite
  CHECK(eigs.minCoeff() >= 0.0);
  CHECK(eigs.maxCoeff() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("info_gain: empty state gives zero") {
  GramState state(KernelSpec{KernelFamily::gaussian_rbf, 1.0, 1});
  CHECK(state.info_gain(1.0) == 0.0);
  CHECK(state.info_gain(17.3) == 0.0);
}

TEST_CASE("info_gain: single unit point at rho = 1") {
  GramState state(KernelSpec{KernelFamily::gaussian_rbf, 1.0, 1});
  state.append(vec1(0.0));
  CHECK(state.info_gain(1.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(state.info_gain(1.0) == doctest::Approx(0.34657).epsilon(1e-4));
}

TEST_CASE("info_gain: closed form for 100 I_10 at rho = 10") {
  const GramState state =
      GramState::from_matrix(100.0 * Eigen::MatrixXd::Identity(10, 10));
  CHECK(state.info_gain(10.0) == doctest::Approx(5.0 * std::log(11.0)).epsilon(1e-14));
  CHECK(state.info_gain(10.0) == doctest::Approx(11.98945).epsilon(1e-5));
}

TEST_CASE("info_gain: rejects nonpositive rho") {
  GramState state(KernelSpec{KernelFamily::gaussian_rbf, 1.0, 1});
  CHECK_THROWS_AS(state.info_gain(0.0), std::invalid_argument);
  CHECK_THROWS_AS(state.info_gain(-1.0), std::invalid_argument);
}

TEST_CASE("info_gain: monotone in rho and in data") {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 1 + static_cast<int>(rng.next() % 5);
    const int n = 1 + static_cast<int>(rng.next() % 20);
    GramState state = test::random_gram(rng, d, n);
    const double rho_small = 0.2 + rng.u01();
    const double rho_large = rho_small + rng.u01() * 3.0;
    CHECK(state.info_gain(rho_small) >= state.info_gain(rho_large) - 1e-12);

    const double before = state.info_gain(rho_small);
    state.append(test::random_ball_point(rng, d));
    CHECK(state.info_gain(rho_small) >= before - 1e-12);
  }
}

TEST_CASE("info_gain: spectrum identity against the explicit covariance") {
  Rng rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 1 + static_cast<int>(rng.next() % 10);
    const int n = 1 + static_cast<int>(rng.next() % 50);
    const KernelSpec spec{KernelFamily::linear, 1.0, d};
    std::vector<Eigen::VectorXd> points;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      points.push_back(test::random_ball_point(rng, d));
      v += points.back() * points.back().transpose();
    }
    const GramState gram = GramState::batch(spec, points);
    const double rho = 0.3 + 2.0 * rng.u01();
    // Independent route: 0.5 log det(I + V / rho) through an LU determinant.
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d) + v / rho;
    const double direct = 0.5 * std::log(m.determinant());
    const double via_gram = gram.info_gain(rho);
    CHECK(std::abs(direct - via_gram) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("rho_star: trivial cases return exactly one") {
  GramState empty(KernelSpec{KernelFamily::gaussian_rbf, 1.0, 1});
  CHECK(empty.rho_star() == 1.0);
  GramState one_point(KernelSpec{KernelFamily::gaussian_rbf, 1.0, 1});
  one_point.append(vec1(0.0));
  CHECK(one_point.rho_star() == 1.0);  // gain at rho = 1 is 0.5 log 2 < 1
}

TEST_CASE("rho_star: bisection agrees with a dense grid scan") {
  const GramState state =
      GramState::from_matrix(100.0 * Eigen::MatrixXd::Identity(10, 10));
  const double r = state.rho_star();

  // Oracle: scan rho in steps of 1e-4 for the first rho >= gamma(rho^{-1}V).
  double grid = 1.0;
  while (grid < info_gain_from_eigs(state.eigenvalues(), grid)) grid += 1e-4;
  CHECK(std::abs(r - grid) <= 2e-4);
  CHECK(r == doctest::Approx(11.40).epsilon(2e-3));
  CHECK(std::abs(r - state.info_gain(r)) <= 1e-8);
}

TEST_CASE("rho_star: fixed-point residual on random states") {
  Rng rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 1 + static_cast<int>(rng.next() % 6);
    Eigen::MatrixXd shape = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) shape(i, i) = 50.0 * rng.u01();
    const GramState state = GramState::from_matrix(shape);
    const double r = state.rho_star();
    CHECK(r >= 1.0);
    if (r > 1.0) {
      CHECK(std::abs(r - std::max(1.0, state.info_gain(r))) <= 1e-8);
    } else {
      CHECK(state.info_gain(1.0) <= 1.0);
    }
  }
}

TEST_CASE("gram: trace bound for unit-ball covariates") {
  Rng rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + static_cast<int>(rng.next() % 6);
    const int n = 1 + static_cast<int>(rng.next() % 40);
    const GramState gram = test::random_gram(rng, d, n);
    const Eigen::VectorXd eigs = gram.eigenvalues();
    double acc = 0.0;
    for (int i = 0; i < eigs.size(); ++i) acc += std::log1p(eigs[i]);
    CHECK(acc <= n * std::log(2.0) + 1e-9);
  }
}

TEST_CASE("gram: diagonal jitter shifts the spectrum") {
  GramState state = GramState::from_matrix(Eigen::MatrixXd::Identity(2, 2));
  CHECK(state.info_gain(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  state.set_jitter(0.5);
  CHECK(state.eigenvalues()[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(state.info_gain(1.0) == doctest::Approx(std::log(2.5)).epsilon(1e-15));
  CHECK_THROWS_AS(state.set_jitter(-1.0), std::invalid_argument);
}

TEST_CASE("psd_eigenvalues: clipping policy") {
  Eigen::MatrixXd slightly(2, 2);
  slightly << 1.0, 0.0, 0.0, -1e-12;
  const Eigen::VectorXd eigs = psd_eigenvalues(slightly);
  CHECK(eigs[1] == 0.0);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1e-3;
  CHECK_THROWS_AS(psd_eigenvalues(indefinite), std::runtime_error);
}
