#include <doctest.h>

#include <cmath>
#include <random>

#include "fracindex/definiteness.hpp"
#include "fracindex/index_estimate.hpp"
#include "test_support.hpp"

using namespace fracindex;
using fracindex::testing::random_distinct_points;
using fracindex::testing::random_zero_sum;

namespace {

Configuration circle_quadruple() {
  return {{circle_point(0.0), circle_point(kPi / 2), circle_point(kPi),
           circle_point(3 * kPi / 2)},
          {1.0, -1.0, 1.0, -1.0}};
}

// Closed form for the quadruple with offset pi/2 on Circle(2pi):
// 4 pi^{2H} (1 - 2^{1-2H}), evaluated in extended precision.
long double quadruple_form_closed(long double H) {
  const long double pi = 3.14159265358979323846264338327950288L;
  return 4.0L * std::pow(pi, 2.0L * H) * (1.0L - std::pow(2.0L, 1.0L - 2.0L * H));
}

}  // namespace

TEST_CASE("quadratic form evaluation") {
  const SpaceDescriptor circle = Circle{kTwoPi};
  SUBCASE("antipodal quadruple vanishes at H = 1/2") {
    CHECK(std::abs(quadratic_form(circle, circle_quadruple(), 0.5)) < 1e-12);
  }
  SUBCASE("two point forms expand to -2 c^2 d^{2H}") {
    const Configuration pair{{circle_point(0.0), circle_point(1.0)}, {1.0, -1.0}};
    CHECK(quadratic_form(circle, pair, 0.5) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(quadratic_form(circle, pair, 0.8) == doctest::Approx(-2.0).epsilon(1e-14));
    const Configuration scaled{{circle_point(0.0), circle_point(1.0)}, {3.0, -3.0}};
    CHECK(quadratic_form(circle, scaled, 0.5) == doctest::Approx(-18.0).epsilon(1e-14));
  }
  SUBCASE("H = 0.6 quadruple against the closed form") {
    const double form = quadratic_form(circle, circle_quadruple(), 0.6);
    CHECK(form == doctest::Approx(2.0452198705731255).epsilon(1e-10));
    CHECK(form == doctest::Approx((double)quadruple_form_closed(0.6L)).epsilon(1e-10));
    CHECK(form > 0.0);
  }
  SUBCASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(
        quadratic_form(circle, {{circle_point(0.0), circle_point(1.0)}, {1.0, -0.5}}, 0.5),
        Error);
    CHECK_THROWS_AS(
        quadratic_form(circle, {{circle_point(0.0), circle_point(0.0)}, {1.0, -1.0}}, 0.5),
        Error);
    CHECK_THROWS_AS(quadratic_form(circle, circle_quadruple(), 1.5), Error);
  }
}

TEST_CASE("centered gram spectral test") {
  SUBCASE("euclidean line triple is clean, hand witness gives -4") {
    const SpaceDescriptor line = Euclidean{1};
    const std::vector<PointCoord> pts = {{{0.0}}, {{1.0}}, {{2.0}}};
    const auto report = centered_gram(line, pts, 0.5);
    CHECK(report.verdict == Verdict::no_violation);
    // 2 (c0 c1 d01 + c0 c2 d02 + c1 c2 d12) with c = (1, -2, 1).
    const Configuration config{pts, {1.0, -2.0, 1.0}};
    CHECK(quadratic_form(line, config, 0.5) == doctest::Approx(-4.0).epsilon(1e-14));
  }
  SUBCASE("50 equispaced circle points: clean at H = 0.5, violated at 0.6") {
    const SpaceDescriptor circle = Circle{kTwoPi};
    std::vector<PointCoord> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(circle_point(kTwoPi * i / 50));

    const auto clean = centered_gram(circle, pts, 0.5);
    CHECK(clean.verdict == Verdict::no_violation);
    CHECK(clean.max_eigenvalue <= clean.tolerance);

    const auto bad = centered_gram(circle, pts, 0.6);
    CHECK(bad.verdict == Verdict::violation);
    REQUIRE(bad.violating_coefficients.has_value());
    const Eigen::VectorXd& c = *bad.violating_coefficients;
    CHECK(std::abs(c.sum()) < 1e-10);
    CHECK(quadratic_form(bad.power_matrix, c) > 10.0 * bad.tolerance);
  }
  SUBCASE("power matrix is symmetric with zero diagonal") {
    const SpaceDescriptor circle = Circle{kTwoPi};
    std::mt19937_64 gen(31);
    const auto pts = random_distinct_points(circle, 8, gen);
    const auto A = power_matrix(circle, pts, 0.7);
    CHECK(A.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("covariance matrix of the pinned field") {
  const SpaceDescriptor sphere = Sphere{2, 1.0};
  const PointCoord north{{0, 0, 1}};
  SUBCASE("row and column vanish for the origin itself") {
    const std::vector<PointCoord> pts = {north, {{1, 0, 0}}, {{0, 1, 0}}};
    const auto cov = covariance_matrix(sphere, north, pts, 0.5);
    CHECK(cov.entries.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cov.entries.col(0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("diagonal carries d^{2H}(O, x)") {
    const std::vector<PointCoord> pts = {{{1, 0, 0}}, {{0, 1, 0}}};
    const auto cov = covariance_matrix(sphere, north, pts, 0.5);
    CHECK(cov.entries(0, 0) == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(cov.entries(1, 1) == doctest::Approx(kPi / 2).epsilon(1e-14));
  }
  SUBCASE("equator point at H = 1/2 has variance pi/2") {
    const auto cov = covariance_matrix(sphere, north, {{{1, 0, 0}}}, 0.5);
    CHECK(cov.entries(0, 0) == doctest::Approx(kPi / 2).epsilon(1e-14));
  }
}

TEST_CASE("schoenberg link between the form and the covariance") {
  std::mt19937_64 gen(57);
  const std::vector<SpaceDescriptor> spaces = {Circle{kTwoPi}, Sphere{2, 1.0}, Hyperbolic{2},
                                               Euclidean{2}, Cylinder{kTwoPi}};
  for (const auto& space : spaces) {
    CAPTURE(space_name(space));
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 3 + (int)(gen() % 5);
      const auto pts = random_distinct_points(space, n + 1, gen, 1e-2);
      const PointCoord origin = pts.back();
      const std::vector<PointCoord> body(pts.begin(), pts.end() - 1);
      const auto c = random_zero_sum(n, gen);
      const double H = 0.3 + 0.5 * (double)(gen() % 100) / 100.0;

      const Configuration config{body, c};
      const double form = quadratic_form(space, config, H);
      const auto cov = covariance_matrix(space, origin, body, H);
      const Eigen::VectorXd cv = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
      const double quad_cov = cv.dot(cov.entries * cv);
      CHECK(form == doctest::Approx(-2.0 * quad_cov).epsilon(1e-9));
    }
  }
}

TEST_CASE("nondegeneracy on hyperbolic spaces") {
  const SpaceDescriptor h2 = Hyperbolic{2};
  const PointCoord origin{{0.0, 0.0}};
  SUBCASE("five random points give a strictly positive minimum") {
    std::mt19937_64 gen(71);
    const auto pts = random_distinct_points(h2, 5, gen, 1e-2);
    CHECK(nondegeneracy_min_eigenvalue(h2, origin, pts, 0.5) > 0.0);
  }
  SUBCASE("well separated points stay clear of zero") {
    // Mutual distances >= 1 in the hyperbolic metric.
    std::vector<PointCoord> pts = {{{0.5, 0.0}}, {{-0.5, 0.0}}, {{0.0, 0.5}}, {{0.0, -0.5}}};
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        REQUIRE(distance(h2, pts[i], pts[j]) >= 1.0);
    CHECK(nondegeneracy_min_eigenvalue(h2, origin, pts, 0.5) > 1e-6);
  }
  SUBCASE("single point reduces to its variance") {
    const PointCoord x{{0.5, 0.0}};
    const double d = distance(h2, origin, x);
    CHECK(nondegeneracy_min_eigenvalue(h2, origin, {x}, 0.5) ==
          doctest::Approx(d).epsilon(1e-12));
  }
  SUBCASE("H above 1/2 is out of scope") {
    CHECK_THROWS_AS(nondegeneracy_min_eigenvalue(h2, origin, {{{0.5, 0.0}}}, 0.7), Error);
  }
}

TEST_CASE("stationary kernel matrices") {
  const SpaceDescriptor circle = Circle{kTwoPi};
  SUBCASE("three equispaced points give the circulant spectrum") {
    std::vector<PointCoord> pts = {circle_point(0), circle_point(kTwoPi / 3),
                                   circle_point(2 * kTwoPi / 3)};
    const auto k = stationary_kernel_matrix(circle, pts, 0.5, 1.0);
    const double q = std::exp(-kTwoPi / 3.0);  // circulant off-diagonal
    CHECK(k.entries(0, 1) == doctest::Approx(q).epsilon(1e-14));
    CHECK(k.entries(0, 0) == 1.0);
    // Circulant eigenvalues: 1 + 2q and 1 - q twice.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.entries);
    CHECK(es.eigenvalues()(0) == doctest::Approx(1.0 - q).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.0 - q).epsilon(1e-12));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0 + 2.0 * q).epsilon(1e-12));
    CHECK(k.min_eigenvalue > 0.0);
  }
  SUBCASE("single point") {
    const auto k = stationary_kernel_matrix(circle, {circle_point(1.0)}, 0.5, 2.0);
    CHECK(k.entries(0, 0) == 1.0);
    CHECK(k.min_eigenvalue == doctest::Approx(1.0));
  }
  SUBCASE("lambda zero collapses to the all-ones matrix") {
    std::vector<PointCoord> pts = {circle_point(0), circle_point(1.0), circle_point(2.0)};
    const auto k = stationary_kernel_matrix(circle, pts, 0.5, 0.0);
    CHECK(k.entries.minCoeff() == 1.0);
    CHECK(k.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("above the admissible exponent the kernel is still computed and reported") {
    std::vector<PointCoord> pts;
    for (int i = 0; i < 24; ++i) pts.push_back(circle_point(kTwoPi * i / 24));
    const auto ok = stationary_kernel_matrix(circle, pts, 0.5, 1.0);
    CHECK(ok.min_eigenvalue > 0.0);
    const auto bad = stationary_kernel_matrix(circle, pts, 0.9, 1.0);
    CHECK(std::isfinite(bad.min_eigenvalue));
    CHECK(bad.min_eigenvalue < ok.min_eigenvalue);
  }
}

TEST_CASE("form scaling properties") {
  std::mt19937_64 gen(83);
  SUBCASE("circle rescaling multiplies forms by lambda^{2H}") {
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 4 + (int)(gen() % 3);
      const auto pts = random_distinct_points(Circle{kTwoPi}, n, gen, 1e-2);
      const auto c = random_zero_sum(n, gen);
      const double H = 0.3 + 0.5 * (double)(gen() % 100) / 100.0;
      const double lam = 2.7;
      const Configuration config{pts, c};
      const double f1 = quadratic_form(Circle{kTwoPi}, config, H);
      const double f2 = quadratic_form(Circle{lam * kTwoPi}, config, H);
      CHECK(f2 == doctest::Approx(std::pow(lam, 2 * H) * f1).epsilon(1e-10));
    }
  }
  SUBCASE("rescaling preserves the sign of the top restricted eigenvalue") {
    std::vector<PointCoord> pts;
    for (int i = 0; i < 24; ++i) pts.push_back(circle_point(kTwoPi * i / 24));
    for (double H : {0.4, 0.5, 0.62, 0.8}) {
      const auto a1 = zero_sum_top(power_matrix(Circle{kTwoPi}, pts, H));
      const auto a2 = zero_sum_top(power_matrix(Circle{5.0 * kTwoPi}, pts, H));
      CHECK((a1.eigenvalue > 1e-12) == (a2.eigenvalue > 1e-12));
    }
  }
  SUBCASE("coefficient scaling is quadratic") {
    const auto pts = random_distinct_points(Euclidean{2}, 5, gen, 1e-2);
    auto c = random_zero_sum(5, gen);
    const Configuration config{pts, c};
    const double f1 = quadratic_form(Euclidean{2}, config, 0.7);
    for (auto& v : c) v *= 3.0;
    CHECK(quadratic_form(Euclidean{2}, {pts, c}, 0.7) ==
          doctest::Approx(9.0 * f1).epsilon(1e-12));
  }
  SUBCASE("permutation invariance") {
    auto pts = random_distinct_points(Sphere{2, 1.0}, 6, gen, 1e-2);
    auto c = random_zero_sum(6, gen);
    const double f1 = quadratic_form(Sphere{2, 1.0}, {pts, c}, 0.5);
    const auto s1 = centered_gram(Sphere{2, 1.0}, pts, 0.5).spectrum;
    std::swap(pts[0], pts[3]);
    std::swap(c[0], c[3]);
    std::swap(pts[2], pts[5]);
    std::swap(c[2], c[5]);
    CHECK(quadratic_form(Sphere{2, 1.0}, {pts, c}, 0.5) ==
          doctest::Approx(f1).epsilon(1e-12));
    const auto s2 = centered_gram(Sphere{2, 1.0}, pts, 0.5).spectrum;
    CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("quadruple family violation is monotone on the H grid") {
  const SpaceDescriptor circle = Circle{kTwoPi};
  for (double a : {0.4, kPi / 2, 2.0}) {
    Configuration quad{{circle_point(0), circle_point(a), circle_point(kPi),
                        circle_point(kPi + a)},
                       {1.0, -1.0, 1.0, -1.0}};
    bool seen_positive = false;
    for (double H = 0.30; H <= 1.001; H += 0.05) {
      const double form = quadratic_form(circle, quad, std::min(H, 1.0));
      if (seen_positive) CHECK(form > 0.0);
      if (form > 1e-9) seen_positive = true;
    }
    CHECK(seen_positive);
  }
}

TEST_CASE("index bracket estimation") {
  SUBCASE("circle brackets beta = 1 at grid step 0.05") {
    const auto bracket =
        estimate_fractional_index(Circle{kTwoPi}, {50, 2, 11}, {0.3, 1.0, 0.05}, 16);
    REQUIRE(bracket.violation_H.has_value());
    REQUIRE(bracket.evidence_H.has_value());
    CHECK(*bracket.violation_H == doctest::Approx(0.55));
    CHECK(*bracket.evidence_H == doctest::Approx(0.50));
    CHECK(*bracket.beta_lower() == doctest::Approx(1.0));
    CHECK(*bracket.beta_upper() == doctest::Approx(1.1));
    REQUIRE(bracket.witness.has_value());
    CHECK(quadratic_form(Circle{kTwoPi}, *bracket.witness, *bracket.violation_H) > 0.0);
  }
  SUBCASE("euclidean plane shows no violation through H = 1") {
    const auto bracket =
        estimate_fractional_index(Euclidean{2}, {40, 3, 5}, {0.3, 1.0, 0.05}, 8);
    CHECK(!bracket.violation_H.has_value());
    REQUIRE(bracket.evidence_H.has_value());
    CHECK(*bracket.evidence_H == doctest::Approx(1.0));
  }
  SUBCASE("cylinder waist sampling is violated at H = 1/2 by the perturbation witness") {
    // With no random point sets, the grams see only the equispaced waist
    // (clean through H = 1/2); the perturbation pipeline provides the first
    // certified violation, exactly at 1/2.
    const auto bracket =
        estimate_fractional_index(Cylinder{kTwoPi}, {32, 0, 5}, {0.4, 0.7, 0.05}, 8);
    REQUIRE(bracket.violation_H.has_value());
    CHECK(*bracket.violation_H == doctest::Approx(0.5));
    REQUIRE(bracket.witness.has_value());
    CHECK(bracket.witness->size() == 5);
    CHECK(quadratic_form(Cylinder{kTwoPi}, *bracket.witness, 0.5) > 0.0);
  }
  SUBCASE("random cylinder point sets surface violations below H = 1/2") {
    // The cylinder's fractional index is zero, so genuine violations exist
    // at every positive H; the Gram route may certify them before the
    // waist-witness grid point.
    const auto bracket =
        estimate_fractional_index(Cylinder{kTwoPi}, {32, 2, 5}, {0.4, 0.7, 0.05}, 8);
    REQUIRE(bracket.violation_H.has_value());
    CHECK(*bracket.violation_H <= 0.5 + 1e-12);
    REQUIRE(bracket.witness.has_value());
    const double form =
        quadratic_form(Cylinder{kTwoPi}, *bracket.witness, *bracket.violation_H);
    CHECK(form > 0.0);
  }
  SUBCASE("grid step precondition") {
    CHECK_THROWS_AS(
        estimate_fractional_index(Circle{kTwoPi}, {16, 1, 1}, {0.3, 1.0, 1e-4}, 4), Error);
  }
  SUBCASE("zero budget is rejected") {
    try {
      estimate_fractional_index(Circle{kTwoPi}, {16, 1, 1}, {0.3, 1.0, 0.05}, 0);
      FAIL("expected BudgetExhausted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::budget_exhausted);
    }
  }
  SUBCASE("sphere brackets beta = 1 through the equator quadruple family") {
    const auto bracket =
        estimate_fractional_index(Sphere{2, 1.0}, {36, 1, 23}, {0.4, 0.7, 0.05}, 16);
    REQUIRE(bracket.violation_H.has_value());
    CHECK(*bracket.violation_H == doctest::Approx(0.55));
    CHECK(*bracket.evidence_H == doctest::Approx(0.50));
  }
}

TEST_CASE("zero sum top maximizes the restricted form") {
  std::mt19937_64 gen(91);
  const auto pts = random_distinct_points(Sphere{2, 1.0}, 7, gen, 1e-2);
  const auto A = power_matrix(Sphere{2, 1.0}, pts, 0.5);
  const auto top = zero_sum_top(A);
  CHECK(std::abs(top.coefficients.sum()) < 1e-12);
  CHECK(top.coefficients.norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_zero_sum(7, gen);
    Eigen::VectorXd cv = Eigen::Map<const Eigen::VectorXd>(c.data(), 7);
    cv /= cv.norm();
    CHECK(cv.dot(A * cv) <= top.eigenvalue + 1e-10);
  }
}
