#include "fracindex/index_estimate.hpp"

#include <cmath>

#include "fracindex/rng.hpp"

namespace fracindex {

namespace {

std::vector<PointCoord> equispaced_circle_points(const SpaceDescriptor& space, int n) {
  std::vector<PointCoord> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double theta = kTwoPi * i / n;
    if (std::holds_alternative<Circle>(space)) {
      pts.push_back(circle_point(theta));
    } else if (std::holds_alternative<Cylinder>(space)) {
      pts.push_back(cylinder_point(theta, 0.0));
    } else if (const auto* torus = std::get_if<FlatTorus>(&space)) {
      std::vector<double> ang(torus->circumferences.size(), 0.0);
      ang[0] = theta;
      pts.push_back(torus_point(std::move(ang)));
    }
  }
  return pts;
}

std::vector<PointCoord> random_points(const SpaceDescriptor& space, int n, std::uint64_t key) {
  const CounterRng rng(key);
  std::uint64_t counter = 0;
  auto next = [&] { return rng.uniform(counter++); };
  std::vector<PointCoord> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (std::holds_alternative<Circle>(space)) {
      pts.push_back(circle_point(kTwoPi * next()));
    } else if (const auto* sph = std::get_if<Sphere>(&space)) {
      std::vector<double> x(sph->dim + 1);
      for (auto& v : x) v = rng.gaussian(counter++);
      pts.push_back(sphere_point(std::move(x)));
    } else if (const auto* hyp = std::get_if<Hyperbolic>(&space)) {
      std::vector<double> x(hyp->dim);
      double n2 = 0.0;
      for (auto& v : x) {
        v = 2.0 * next() - 1.0;
        n2 += v * v;
      }
      const double r = 0.8 * std::pow(next(), 1.0 / hyp->dim);
      const double s = n2 > 0 ? r / std::sqrt(n2) : 0.0;
      for (auto& v : x) v *= s;
      pts.push_back(PointCoord{std::move(x)});
    } else if (const auto* euc = std::get_if<Euclidean>(&space)) {
      std::vector<double> x(euc->dim);
      for (auto& v : x) v = 3.0 * next();
      pts.push_back(PointCoord{std::move(x)});
    } else if (std::holds_alternative<Cylinder>(space)) {
      pts.push_back(cylinder_point(kTwoPi * next(), 2.0 * next() - 1.0));
    } else if (const auto* torus = std::get_if<FlatTorus>(&space)) {
      std::vector<double> ang(torus->circumferences.size());
      for (auto& a : ang) a = kTwoPi * next();
      pts.push_back(torus_point(std::move(ang)));
    } else {
      throw Error(Errc::analytic_unavailable, "index estimation needs analytic distances");
    }
  }
  return pts;
}

struct ViolationCheck {
  bool found = false;
  bool inconclusive = false;
  std::optional<Configuration> witness;
};

// Certification: the extracted coefficients must realize a form above ten
// times the spectral tolerance; bare eigenvalues just over tol are reported
// as boundary-inconclusive.
void check_gram(const SpaceDescriptor& space, const std::vector<PointCoord>& pts, double H,
                double tol_scale, ViolationCheck& out) {
  if (pts.size() < 2 || out.found) return;
  const auto report = centered_gram(space, pts, H, tol_scale);
  if (report.verdict != Verdict::violation) return;
  const Eigen::VectorXd& c = *report.violating_coefficients;
  const double form = quadratic_form(report.power_matrix, c);
  if (form > 10.0 * report.tolerance) {
    out.found = true;
    Configuration config;
    config.points = pts;
    config.coefficients.assign(c.data(), c.data() + c.size());
    out.witness = std::move(config);
  } else {
    out.inconclusive = true;
  }
}

void check_quadruple_family(const SpaceDescriptor& space, double H, int budget,
                            ViolationCheck& out) {
  if (out.found || !has_circle_factor(space)) return;
  if (std::holds_alternative<WarpedCircleProduct>(space)) return;
  const int n_offsets = std::max(8, budget);
  for (int k = 1; k < n_offsets && !out.found; ++k) {
    const double a = kPi * k / n_offsets;
    const Configuration quad = antipodal_quadruple(space, 0.0, a);
    const Eigen::MatrixXd A = power_matrix(space, quad.points, H);
    const double form = quadratic_form(
        A, Eigen::Map<const Eigen::VectorXd>(quad.coefficients.data(), 4));
    if (form > 10.0 * criticality_tolerance(A)) {
      out.found = true;
      out.witness = quad;
    }
  }
}

void check_perturbation_witness(const SpaceDescriptor& space, double H, ViolationCheck& out) {
  if (out.found || std::abs(H - 0.5) > 1e-12) return;
  if (!std::holds_alternative<Cylinder>(space) && !std::holds_alternative<FlatTorus>(space))
    return;
  const auto report = witness_pipeline(space, 0.5);
  if (report.status == WitnessStatus::certified) {
    out.found = true;
    const auto& cert = *report.certificate;
    Configuration perturbed = cert.base;
    perturbed.coefficients[cert.perturbed_index] /= 2.0;
    perturbed.points.push_back(
        exp_map(space, cert.base.points[cert.perturbed_index], cert.direction,
                cert.certifying_eps));
    perturbed.coefficients.push_back(perturbed.coefficients[cert.perturbed_index]);
    out.witness = std::move(perturbed);
  }
}

}  // namespace

IndexBracket estimate_fractional_index(const SpaceDescriptor& space,
                                       const IndexSamplerSpec& sampler, const HGrid& grid,
                                       int per_h_budget, double tol_scale) {
  if (!(grid.step >= 1e-3)) throw Error(Errc::precondition, "grid step must be >= 1e-3");
  if (!(grid.h_min > 0.0) || grid.h_max > 1.0 || grid.h_min > grid.h_max)
    throw Error(Errc::precondition, "H grid must lie inside (0, 1]");
  if (per_h_budget < 1) throw Error(Errc::budget_exhausted, "per-H budget must be >= 1");

  IndexBracket bracket;
  bracket.grid_step = grid.step;

  const int n_steps = (int)std::floor((grid.h_max - grid.h_min) / grid.step + 1e-9);
  bool any_classified = false;
  for (int k = 0; k <= n_steps; ++k) {
    const double H = grid.h_min + k * grid.step;
    ViolationCheck check;
    check_gram(space, equispaced_circle_points(space, sampler.points_per_set), H, tol_scale,
               check);
    for (int s = 0; s < sampler.random_sets && !check.found; ++s) {
      const std::uint64_t key =
          CounterRng::derive(sampler.seed, CounterRng::derive((std::uint64_t)k, (std::uint64_t)s));
      check_gram(space, random_points(space, sampler.points_per_set, key), H, tol_scale, check);
    }
    check_quadruple_family(space, H, per_h_budget, check);
    check_perturbation_witness(space, H, check);

    any_classified = true;
    if (check.found) {
      bracket.violation_H = H;
      bracket.witness = check.witness;
      break;
    }
    if (check.inconclusive) {
      bracket.inconclusive_H.push_back(H);
    } else {
      bracket.evidence_H = H;
    }
  }
  if (!any_classified)
    throw Error(Errc::budget_exhausted, "empty H grid: no classification possible");
  return bracket;
}

}  // namespace fracindex
