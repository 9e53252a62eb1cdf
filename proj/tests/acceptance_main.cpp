// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracindex/configurations.hpp"
#include "fracindex/definiteness.hpp"
#include "fracindex/discrete_geodesics.hpp"
#include "fracindex/index_estimate.hpp"
#include "fracindex/rng.hpp"
#include "fracindex/sampler.hpp"
#include "fracindex/spaces.hpp"

using namespace fracindex;

namespace {

struct Criterion {
  int id;
  std::string label;
  double budget_seconds;
  std::function<bool(std::string&)> body;
};

bool check(bool cond, std::string& detail, const std::string& msg) {
  if (!cond && detail.empty()) detail = msg;
  return cond;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// --- criterion bodies ------------------------------------------------------

bool criterion_quadruple_zero(std::string& detail) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> base(0.0, kTwoPi);
  std::uniform_real_distribution<double> offset(0.05, kPi - 0.05);
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto quad = antipodal_quadruple(Circle{kTwoPi}, base(gen), offset(gen));
    const double form = std::abs(quadratic_form(Circle{kTwoPi}, quad, 0.5));
    worst = std::max(worst, form);
    ok &= form < 1e-12;
  }
  detail = "max |form| = " + fmt(worst);
  return ok;
}

bool criterion_quadruple_closed_form(std::string& detail) {
  const auto quad = antipodal_quadruple(Circle{kTwoPi}, 0.0, kPi / 2);
  const double form = quadratic_form(Circle{kTwoPi}, quad, 0.6);
  // Independent closed-form evaluation in extended precision.
  const long double pi = 3.14159265358979323846264338327950288L;
  const double expected =
      (double)(4.0L * std::pow(pi, 1.2L) * (1.0L - std::pow(2.0L, -0.2L)));
  const double rel = std::abs(form - expected) / expected;
  detail = "form = " + fmt(form) + ", closed form = " + fmt(expected) +
           ", rel err = " + fmt(rel);
  return rel < 1e-10;
}

bool criterion_sphere_gram(std::string& detail) {
  const int n = 200;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<PointCoord> pts;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.push_back(sphere_point({r * std::cos(golden * i), r * std::sin(golden * i), z}));
  }
  const auto report = centered_gram(Sphere{2, 1.0}, pts, 0.5);
  detail = "max eig = " + fmt(report.max_eigenvalue) + ", tol = " + fmt(report.tolerance);
  return report.verdict == Verdict::no_violation &&
         report.max_eigenvalue <= report.tolerance;
}

bool criterion_cylinder_witness(std::string& detail) {
  const SpaceDescriptor cyl = Cylinder{kTwoPi};
  const auto quad = antipodal_quadruple(cyl, 0.0, kPi / 2);
  const auto dir = make_tangent(cyl, quad.points[3], {0.0, 1.0});
  PerturbOptions opts;
  opts.eps_schedule = {1e-2, 1e-3};
  const auto cert = perturb_witness(cyl, quad, 3, dir, 0.5, opts);

  // Independent pair-by-pair oracle at eps = 0.01: circle distances among
  // the quadruple, hypot(arc, eps) to the perturbed point.
  const double angles[4] = {0.0, kPi / 2, kPi, 3 * kPi / 2};
  const double c[5] = {1.0, -1.0, 1.0, -0.5, -0.5};
  auto arc = [](double t1, double t2) {
    const double d = std::fmod(std::abs(t1 - t2), kTwoPi);
    return std::min(d, kTwoPi - d);
  };
  const double eps = 0.01;
  double oracle = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) oracle += 2.0 * c[i] * c[j] * arc(angles[i], angles[j]);
  for (int i = 0; i < 3; ++i)
    oracle += 2.0 * c[i] * c[4] * std::hypot(arc(angles[i], angles[3]), eps);
  oracle += 2.0 * c[3] * c[4] * eps;

  const double form_001 = cert.forms[0];
  const double slope_0001 = cert.forms[1] / cert.eps_values[1];
  detail = "form(0.01) = " + fmt(form_001) + " vs oracle " + fmt(oracle) +
           "; form/eps(1e-3) = " + fmt(slope_0001);
  bool ok = form_001 > 0.0;
  ok &= std::abs(form_001 - oracle) <= 0.05 * std::abs(oracle);
  ok &= std::abs(slope_0001 - 0.5) <= 0.05 * 0.5;
  return ok;
}

bool criterion_condition_g(std::string& detail) {
  const SpaceDescriptor cyl = Cylinder{kTwoPi};
  const Configuration cyl_pair{{cylinder_point(0, 0), cylinder_point(kPi, 0)}, {1.0, -1.0}};
  const auto g_cyl = check_condition_g(cyl, cyl_pair);

  const SpaceDescriptor sph = Sphere{2, 1.0};
  const Configuration sph_pair{{{{1, 0, 0}}, {{-1, 0, 0}}}, {1.0, -1.0}};
  const auto g_sph = check_condition_g(sph, sph_pair);

  detail = "cylinder spans = {" + std::to_string(g_cyl.span_dims[0]) + "," +
           std::to_string(g_cyl.span_dims[1]) + "} of 2; sphere spans = {" +
           std::to_string(g_sph.span_dims[0]) + "," + std::to_string(g_sph.span_dims[1]) +
           "} of 2";
  return g_cyl.span_dims == std::vector<int>{1, 1} && !g_cyl.pass &&
         g_sph.span_dims == std::vector<int>{2, 2} && g_sph.pass;
}

bool criterion_hyperbolic_nondegeneracy(std::string& detail) {
  const SpaceDescriptor h2 = Hyperbolic{2};
  const PointCoord origin{{0.0, 0.0}};
  double worst_ratio = 1e300;
  for (int run = 0; run < 20; ++run) {
    const CounterRng rng(CounterRng::derive(1000, (std::uint64_t)run));
    std::uint64_t counter = 0;
    std::vector<PointCoord> pts;
    while (pts.size() < 20) {
      const double x = 2.0 * rng.uniform(counter++) - 1.0;
      const double y = 2.0 * rng.uniform(counter++) - 1.0;
      if (x * x + y * y >= 0.85 * 0.85) continue;
      PointCoord cand{{x, y}};
      bool distinct = distance(h2, origin, cand) > 1e-3;
      for (const auto& p : pts)
        if (distance(h2, p, cand) < 1e-3) distinct = false;
      if (distinct) pts.push_back(std::move(cand));
    }
    const auto cov = covariance_matrix(h2, origin, pts, 0.5);
    const double ratio = cov.min_eigenvalue / cov.entries.trace();
    worst_ratio = std::min(worst_ratio, ratio);
    if (!(cov.min_eigenvalue > 1e-12 * cov.entries.trace())) {
      detail = "run " + std::to_string(run) + " min eig ratio " + fmt(ratio);
      return false;
    }
  }
  detail = "worst min-eig/trace over 20 runs = " + fmt(worst_ratio);
  return true;
}

bool criterion_immersion(std::string& detail) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unif(-0.85, 0.85);
  const SpaceDescriptor h2 = Hyperbolic{2};
  const SpaceDescriptor h3 = Hyperbolic{3};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    PointCoord p{{unif(gen), unif(gen)}};
    PointCoord q{{unif(gen), unif(gen)}};
    if (p.x[0] * p.x[0] + p.x[1] * p.x[1] >= 1.0 ||
        q.x[0] * q.x[0] + q.x[1] * q.x[1] >= 1.0) {
      --i;
      continue;
    }
    const double err =
        std::abs(distance(h2, p, q) - distance(h3, embed_hyperbolic(p), embed_hyperbolic(q)));
    worst = std::max(worst, err);
  }
  detail = "max |d2 - d3| = " + fmt(worst);
  return worst < 1e-12;
}

bool criterion_index_brackets(std::string& detail) {
  const auto circle =
      estimate_fractional_index(Circle{kTwoPi}, {50, 4, 17}, {0.3, 1.0, 0.05}, 16);
  bool ok = circle.evidence_H && std::abs(*circle.evidence_H - 0.50) < 1e-12;
  ok &= circle.violation_H && std::abs(*circle.violation_H - 0.55) < 1e-12;
  ok &= circle.beta_lower() && std::abs(*circle.beta_lower() - 1.0) < 1e-12;
  ok &= circle.beta_upper() && std::abs(*circle.beta_upper() - 1.1) < 1e-12;

  const auto plane =
      estimate_fractional_index(Euclidean{2}, {40, 4, 17}, {0.3, 1.0, 0.05}, 16);
  ok &= !plane.violation_H.has_value();
  ok &= plane.evidence_H && std::abs(*plane.evidence_H - 1.0) < 1e-12;

  detail = "circle bracket = [" + fmt(circle.beta_lower().value_or(-1)) + ", " +
           fmt(circle.beta_upper().value_or(-1)) + "], plane evidence H = " +
           fmt(plane.evidence_H.value_or(-1));
  return ok;
}

bool criterion_discrete_geodesics(std::string& detail) {
  bool ok = true;
  // Flat chart theta-distance pi at stencil radius 3.
  const auto flat = ParametricChart::flat(0.0, 1.0);
  const auto gf = build_graph(flat, 128, 17, 3);
  const double d_flat =
      graph_distance(gf, gf.nearest_vertex(0, 0.5), gf.nearest_vertex(kPi, 0.5)).length;
  ok &= check(std::abs(d_flat - kPi) <= 0.01 * kPi, detail, "flat distance " + fmt(d_flat));

  // Warped product f(z) = 1 + z^2: waist pair matches the circle arc and the
  // optimal path stays within one grid spacing of the waist.
  const auto warped = ParametricChart::warped_quadratic(1.0, -1.0, 1.0);
  const auto gw = build_graph(warped, 128, 33, 3);
  const auto pw = graph_distance(gw, gw.nearest_vertex(0, 0), gw.nearest_vertex(kPi, 0));
  const double spacing_w = 2.0 / 32.0;
  ok &= check(std::abs(pw.length - kPi) <= 0.01 * kPi, detail,
              "warped distance " + fmt(pw.length));
  ok &= check(path_deviation(gw, pw.vertices, 0.0) <= spacing_w + 1e-12, detail,
              "warped path deviation " + fmt(path_deviation(gw, pw.vertices, 0.0)));

  // Hyperboloid waist theta 0 -> pi within 1.5%, path on the waist.
  const auto hyp = ParametricChart::hyperboloid(-1.0, 1.0);
  const auto gh = build_graph(hyp, 128, 33, 3);
  const auto ph = graph_distance(gh, gh.nearest_vertex(0, 0), gh.nearest_vertex(kPi, 0));
  ok &= check(std::abs(ph.length - kPi) <= 0.015 * kPi, detail,
              "hyperboloid distance " + fmt(ph.length));
  ok &= check(path_deviation(gh, ph.vertices, 0.0) <= 2.0 / 32.0 + 1e-12, detail,
              "hyperboloid path leaves the waist");

  if (ok)
    detail = "flat = " + fmt(d_flat) + ", warped = " + fmt(pw.length) +
             ", hyperboloid = " + fmt(ph.length) + " (target pi)";
  return ok;
}

bool criterion_torus_witness(std::string& detail) {
  const auto report = witness_pipeline(FlatTorus{{kTwoPi, kTwoPi}}, 0.5);
  if (report.status != WitnessStatus::certified) {
    detail = "pipeline did not certify";
    return false;
  }
  const auto& cert = *report.certificate;
  detail = "certified at eps = " + fmt(cert.certifying_eps) +
           ", form = " + fmt(cert.forms.back());
  bool positive = cert.certified;
  for (std::size_t k = 0; k < cert.eps_values.size(); ++k)
    if (cert.eps_values[k] == cert.certifying_eps) positive &= cert.forms[k] > 0.0;
  return positive;
}

bool criterion_sampler(std::string& detail) {
  const SpaceDescriptor sphere = Sphere{2, 1.0};
  const PointCoord north{{0, 0, 1}};
  std::vector<PointCoord> pts = {north};
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < 4; ++i) {
    const double z = 0.6 - 0.35 * i;
    const double r = std::sqrt(1.0 - z * z);
    pts.push_back(sphere_point({r * std::cos(golden * i), r * std::sin(golden * i), z}));
  }
  const int n = 20000;
  const auto a = sample_fbm(sphere, north, pts, 0.5, n, 424242);
  const auto b = sample_fbm(sphere, north, pts, 0.5, n, 424242);

  bool ok = true;
  ok &= check((a.realizations - b.realizations).cwiseAbs().maxCoeff() == 0.0, detail,
              "identical seeds differ");
  ok &= check(a.realizations.col(0).cwiseAbs().maxCoeff() == 0.0, detail,
              "origin column not exactly zero");

  const auto entries = variogram_check(a);  // 10 pairs over 5 points
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, std::abs(e.z_score));
  ok &= check(entries.size() == 10, detail, "expected 10 pairs");
  ok &= check(worst <= 4.0, detail, "variogram z " + fmt(worst));
  if (ok) detail = "10 pair variograms, max |z| = " + fmt(worst) + ", bit-identical replay";
  return ok;
}

bool criterion_first_variation(std::string& detail) {
  struct Probe {
    SpaceDescriptor space;
    PointCoord p_i, p_n;
    std::vector<double> dir;
  };
  const double s = std::sqrt(0.5);
  std::vector<Probe> probes;
  probes.push_back({Sphere{2, 1.0}, {{1, 0, 0}}, {{std::cos(1.0), std::sin(1.0), 0}},
                    {0, 0, 1}});
  probes.push_back({Sphere{2, 1.0}, {{1, 0, 0}}, {{std::cos(1.0), std::sin(1.0), 0}},
                    {s * std::sin(1.0), -s * std::cos(1.0), s}});
  probes.push_back({Hyperbolic{2}, {{0.3, 0.1}}, {{-0.2, 0.4}}, {}});
  probes.push_back({Hyperbolic{2}, {{0.5, 0.0}}, {{-0.1, -0.3}}, {}});

  double worst_margin = 1e300;
  for (auto& probe : probes) {
    std::vector<double> comps = probe.dir;
    if (comps.empty()) {
      // Oblique mix of the perpendicular and reversed geodesic directions.
      const auto toward = minimal_direction_set(probe.space, probe.p_n, probe.p_i);
      const auto& u = toward[0].components;
      comps = {s * (-u[1] - u[0]), s * (u[0] - u[1])};
    }
    const double nrm = metric_norm(probe.space, probe.p_n, comps);
    for (auto& v : comps) v /= nrm;
    const auto dir = make_tangent(probe.space, probe.p_n, comps);
    const auto res =
        first_variation_probe(probe.space, probe.p_i, probe.p_n, dir, {1e-2, 1e-3, 1e-4});
    const double k_fit = 1.1 * std::max(std::abs(res[0].lhs - res[0].rhs) / res[0].eps,
                                        std::abs(res[1].lhs - res[1].rhs) / res[1].eps);
    const double err_small = std::abs(res[2].lhs - res[2].rhs);
    const double bound = k_fit * res[2].eps + 1e-10;
    worst_margin = std::min(worst_margin, bound - err_small);
    if (err_small > bound) {
      detail = "err(1e-4) = " + fmt(err_small) + " exceeds K eps = " + fmt(bound);
      return false;
    }
  }
  detail = "all probes linear; worst margin = " + fmt(worst_margin);
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "circle antipodal quadruple form vanishes at H = 1/2 (50 draws)", 1.0,
       criterion_quadruple_zero},
      {2, "circle quadruple at H = 0.6 matches 4 pi^1.2 (1 - 2^-0.2)", 1.0,
       criterion_quadruple_closed_form},
      {3, "sphere centered-Gram clean for 200 quasi-uniform points at H = 1/2", 5.0,
       criterion_sphere_gram},
      {4, "cylinder witness: form(0.01) vs pair oracle, slope 1/2 at 1e-3", 1.0,
       criterion_cylinder_witness},
      {5, "condition (G): cylinder pair fails 1/2, sphere pair passes 2/2", 1.0,
       criterion_condition_g},
      {6, "hyperbolic nondegeneracy: min covariance eigenvalue over 20 runs", 5.0,
       criterion_hyperbolic_nondegeneracy},
      {7, "hyperbolic immersion preserves 100 pair distances to 1e-12", 1.0,
       criterion_immersion},
      {8, "index brackets: circle [1.0, 1.1], euclidean clean to H = 1", 60.0,
       criterion_index_brackets},
      {9, "discrete geodesics: flat, warped, hyperboloid waist arcs", 30.0,
       criterion_discrete_geodesics},
      {10, "flat torus witness certificate with positive form", 1.0, criterion_torus_witness},
      {11, "sphere sampler: variograms in 4 SE, pinned origin, bit-exact replay", 30.0,
       criterion_sampler},
      {12, "first variation linear error bound on sphere and hyperbolic plane", 1.0,
       criterion_first_variation},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criterion.budget_seconds) {
      ok = false;
      detail += " [over budget " + fmt(seconds) + "s > " + fmt(criterion.budget_seconds) + "s]";
    }
    std::printf("[%s] criterion %2d: %s (%s; %.2fs)\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.label.c_str(), detail.c_str(), seconds);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
