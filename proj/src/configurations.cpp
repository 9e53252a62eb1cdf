#include "fracindex/configurations.hpp"

#include <algorithm>
#include <cmath>

#include "fracindex/discrete_geodesics.hpp"
#include "fracindex/rng.hpp"

namespace fracindex {

namespace {

std::vector<double> quadruple_angles(double base, double a) {
  return {wrap_angle(base), wrap_angle(base + a), wrap_angle(base + kPi),
          wrap_angle(base + kPi + a)};
}

PointCoord on_designated_circle(const SpaceDescriptor& space, double angle) {
  return std::visit(
      [&](const auto& s) -> PointCoord {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return circle_point(angle);
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return cylinder_point(angle, 0.0);
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          std::vector<double> ang(s.circumferences.size(), 0.0);
          ang[0] = wrap_angle(angle);
          return torus_point(std::move(ang));
        } else if constexpr (std::is_same_v<T, Sphere>) {
          std::vector<double> x(s.dim + 1, 0.0);
          x[0] = std::cos(angle);
          x[1] = std::sin(angle);
          return sphere_point(std::move(x));
        } else if constexpr (std::is_same_v<T, WarpedCircleProduct>) {
          return {{wrap_angle(angle), s.warp.z0}};
        } else {
          throw Error(Errc::no_circle_factor,
                      space_name(SpaceDescriptor(s)) + " has no designated circle factor");
        }
      },
      space);
}

}  // namespace

Configuration antipodal_quadruple(const SpaceDescriptor& space, double base_angle,
                                  double offset_a) {
  if (!(offset_a > 1e-12) || !(offset_a < kPi - 1e-12))
    throw Error(Errc::degenerate_offset, "offset must lie strictly inside (0, pi)");
  Configuration config;
  for (double ang : quadruple_angles(base_angle, offset_a))
    config.points.push_back(on_designated_circle(space, ang));
  config.coefficients = {1.0, -1.0, 1.0, -1.0};
  return config;
}

ConditionGReport check_condition_g(const SpaceDescriptor& space, const Configuration& config) {
  validate_configuration(space, config);
  ConditionGReport report;
  report.space_dim = dim(space);
  const std::size_t n = config.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<PointCoord> targets;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) targets.push_back(config.points[j]);
    report.span_dims.push_back(shortest_direction_span_dim(space, config.points[i], targets));
  }
  report.pass = std::all_of(report.span_dims.begin(), report.span_dims.end(),
                            [&](int d) { return d == report.space_dim; });
  return report;
}

namespace {

Configuration split_coefficient(const Configuration& config, int i, const PointCoord& extra) {
  Configuration out = config;
  out.coefficients[i] /= 2.0;
  out.points.push_back(extra);
  out.coefficients.push_back(out.coefficients[i]);
  return out;
}

void check_direction_perpendicular(const SpaceDescriptor& space, const Configuration& config,
                                   int i, const TangentVector& direction, double tol) {
  for (std::size_t j = 0; j < config.size(); ++j) {
    if ((int)j == i) continue;
    for (const auto& u :
         minimal_direction_set(space, config.points[i], config.points[j])) {
      const double ip = metric_inner(space, config.points[i], direction.components, u.components);
      if (std::abs(ip) > tol)
        throw Error(Errc::direction_not_perpendicular,
                    "direction has inner product " + std::to_string(ip) +
                        " with a minimal direction");
    }
  }
}

}  // namespace

WitnessCertificate perturb_witness(const SpaceDescriptor& space, const Configuration& config,
                                   int point_index, const TangentVector& direction, double H,
                                   const PerturbOptions& opts) {
  validate_configuration(space, config);
  if (!(H > 0.0) || !(H < 1.0))
    throw Error(Errc::precondition, "the perturbation argument needs H in (0, 1)");
  if (point_index < 0 || point_index >= (int)config.size())
    throw Error(Errc::precondition, "point index out of range");
  if (std::abs(direction.metric_norm - 1.0) > 1e-8)
    throw Error(Errc::precondition, "direction must be metric-unit");

  const Eigen::MatrixXd A = power_matrix(space, config.points, H);
  const double tol_crit = criticality_tolerance(A);
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(config.coefficients.data(),
                                                        (Eigen::Index)config.size());
  const double base_form = quadratic_form(A, c);
  if (std::abs(base_form) >= tol_crit)
    throw Error(Errc::not_critical, "base form " + std::to_string(base_form) +
                                        " exceeds the criticality tolerance");

  check_direction_perpendicular(space, config, point_index, direction,
                                opts.perpendicular_tol);

  WitnessCertificate cert;
  cert.base = config;
  cert.base_form = base_form;
  cert.perturbed_index = point_index;
  cert.direction = direction;
  cert.H = H;
  cert.threshold = 10.0 * tol_crit;
  const double ci = config.coefficients[point_index];
  cert.expected_slope = ci * ci / 2.0;

  for (double eps : opts.eps_schedule) {
    if (!(eps > 1e-12)) continue;
    const PointCoord moved = exp_map(space, config.points[point_index], direction, eps);
    const Configuration perturbed = split_coefficient(config, point_index, moved);
    const double form = quadratic_form(space, perturbed, H);
    cert.eps_values.push_back(eps);
    cert.forms.push_back(form);
    cert.form_lower.push_back(form);
    cert.form_upper.push_back(form);
    cert.slopes.push_back(form / power_distance(eps, 2.0 * H));
    if (form > cert.threshold && (!cert.certified || eps < cert.certifying_eps)) {
      cert.certified = true;
      cert.certifying_eps = eps;
    }
  }
  if (!cert.certified)
    throw Error(Errc::no_positivity_found, "no scheduled eps produced a certified positive form");
  return cert;
}

namespace {

// --- search_critical support -------------------------------------------

struct PointSampler {
  const SpaceDescriptor& space;
  const CounterRng& rng;
  mutable std::uint64_t counter = 0;

  double next() const { return rng.uniform(counter++); }

  PointCoord sample() const {
    return std::visit(
        [&](const auto& s) -> PointCoord {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Circle>) {
            return circle_point(kTwoPi * next());
          } else if constexpr (std::is_same_v<T, Sphere>) {
            std::vector<double> x(s.dim + 1);
            for (auto& v : x) v = rng.gaussian(counter++);
            return sphere_point(std::move(x));
          } else if constexpr (std::is_same_v<T, Hyperbolic>) {
            std::vector<double> x(s.dim);
            double nrm2 = 0.0;
            for (auto& v : x) {
              v = 2.0 * next() - 1.0;
              nrm2 += v * v;
            }
            const double r = 0.8 * std::pow(next(), 1.0 / s.dim);
            const double scale = nrm2 > 0 ? r / std::sqrt(nrm2) : 0.0;
            for (auto& v : x) v *= scale;
            return {std::move(x)};
          } else if constexpr (std::is_same_v<T, Euclidean>) {
            std::vector<double> x(s.dim);
            for (auto& v : x) v = 3.0 * next();
            return {std::move(x)};
          } else if constexpr (std::is_same_v<T, Cylinder>) {
            return cylinder_point(kTwoPi * next(), 2.0 * next() - 1.0);
          } else if constexpr (std::is_same_v<T, FlatTorus>) {
            std::vector<double> ang(s.circumferences.size());
            for (auto& a : ang) a = kTwoPi * next();
            return torus_point(std::move(ang));
          } else {
            throw Error(Errc::analytic_unavailable,
                        "critical search needs analytic distances");
          }
        },
        space);
  }
};

// Move one chart coordinate by delta, staying inside the chart.
PointCoord nudge(const SpaceDescriptor& space, const PointCoord& p, int coord, double delta) {
  return std::visit(
      [&](const auto& s) -> PointCoord {
        using T = std::decay_t<decltype(s)>;
        PointCoord q = p;
        if constexpr (std::is_same_v<T, Sphere>) {
          q.x[coord] += delta;
          double n2 = 0.0;
          for (double v : q.x) n2 += v * v;
          if (n2 < 1e-12) return p;
          const double n = std::sqrt(n2);
          for (auto& v : q.x) v /= n;
          return q;
        } else if constexpr (std::is_same_v<T, Hyperbolic>) {
          q.x[coord] += delta;
          double n2 = 0.0;
          for (double v : q.x) n2 += v * v;
          if (n2 >= 0.95 * 0.95) return p;
          return q;
        } else if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, FlatTorus>) {
          q.x[coord] = wrap_angle(q.x[coord] + delta);
          return q;
        } else if constexpr (std::is_same_v<T, Cylinder> ||
                             std::is_same_v<T, WarpedCircleProduct>) {
          if (coord == 0)
            q.x[0] = wrap_angle(q.x[0] + delta);
          else
            q.x[1] += delta;
          return q;
        } else {
          q.x[coord] += delta;
          return q;
        }
      },
      space);
}

double min_pairwise_distance(const SpaceDescriptor& space, const std::vector<PointCoord>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::min(best, distance(space, pts[i], pts[j]));
  return best;
}

struct SpectralEval {
  double max_eig;
  Eigen::VectorXd coeffs;
};

// Top of the form over zero-sum unit coefficients; the structural zero of
// the J A J spectrum would mask the signal on negative definite inputs.
SpectralEval spectral_objective(const SpaceDescriptor& space,
                                const std::vector<PointCoord>& pts, double H) {
  auto top = zero_sum_top(power_matrix(space, pts, H));
  return {top.eigenvalue, std::move(top.coefficients)};
}

}  // namespace

CriticalSearchResult search_critical(const SpaceDescriptor& space, int n_points, double H,
                                     int multistart_budget, std::uint64_t seed) {
  if (n_points < 3)
    throw Error(Errc::precondition,
                "two-point forms are strictly negative; need at least three points");
  if (!(H > 0.0) || H > 1.0) throw Error(Errc::precondition, "H must lie in (0, 1]");
  if (multistart_budget < 1) throw Error(Errc::budget_exhausted, "multistart budget must be >= 1");

  const double min_sep = 5e-2;
  const int coords = coord_size(space);

  CriticalSearchResult best;
  best.form = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < multistart_budget; ++restart) {
    const CounterRng rng(CounterRng::derive(seed, (std::uint64_t)restart));
    PointSampler sampler{space, rng};

    std::vector<PointCoord> pts;
    int guard = 0;
    while ((int)pts.size() < n_points && guard++ < 10000) {
      PointCoord cand = sampler.sample();
      bool ok = true;
      for (const auto& p : pts)
        if (distance(space, p, cand) < min_sep) ok = false;
      if (ok) pts.push_back(std::move(cand));
    }
    if ((int)pts.size() < n_points) continue;

    double obj = std::abs(spectral_objective(space, pts, H).max_eig);
    double step = 0.3;
    const int max_sweeps = 200;
    for (int sweep = 0; sweep < max_sweeps && step > 1e-10; ++sweep) {
      bool improved = false;
      for (int i = 0; i < n_points; ++i) {
        for (int k = 0; k < coords; ++k) {
          // Quadratic probe over {-step, 0, +step}.
          auto try_move = [&](double delta) -> std::optional<double> {
            auto cand = pts;
            cand[i] = nudge(space, pts[i], k, delta);
            if (min_pairwise_distance(space, cand) < min_sep) return std::nullopt;
            return std::abs(spectral_objective(space, cand, H).max_eig);
          };
          const auto minus = try_move(-step);
          const auto plus = try_move(step);
          double delta_best = 0.0;
          double obj_best = obj;
          if (minus && *minus < obj_best) {
            obj_best = *minus;
            delta_best = -step;
          }
          if (plus && *plus < obj_best) {
            obj_best = *plus;
            delta_best = step;
          }
          if (minus && plus) {
            const double denom = *plus - 2.0 * obj + *minus;
            if (denom > 1e-300) {
              const double vertex = 0.5 * step * (*minus - *plus) / denom;
              if (std::abs(vertex) <= step) {
                auto cand = pts;
                cand[i] = nudge(space, pts[i], k, vertex);
                if (min_pairwise_distance(space, cand) >= min_sep) {
                  const double v = std::abs(spectral_objective(space, cand, H).max_eig);
                  if (v < obj_best) {
                    obj_best = v;
                    delta_best = vertex;
                  }
                }
              }
            }
          }
          if (delta_best != 0.0) {
            pts[i] = nudge(space, pts[i], k, delta_best);
            obj = obj_best;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
      if (obj < 1e-14) break;
    }

    const auto eval = spectral_objective(space, pts, H);
    const Eigen::MatrixXd A = power_matrix(space, pts, H);
    const double form = quadratic_form(A, eval.coeffs);
    if (std::abs(form) < std::abs(best.form)) {
      best.form = form;
      best.config.points = pts;
      best.config.coefficients.assign(eval.coeffs.data(), eval.coeffs.data() + eval.coeffs.size());
      best.restarts_used = restart + 1;
      if (std::abs(form) < criticality_tolerance(A)) {
        best.critical = true;
        break;
      }
    }
  }
  return best;
}

namespace {

// --- warped-product witness ---------------------------------------------
//
// Distances between waist points are exact circle distances scaled by
// sqrt(f(z0)); distances to the perturbed point are bracketed between the
// constant-warp cylinder value (lower, since f >= f(z0)) and the straight
// chart segment bound with f taken at its maximum over [z0, z0+eps]
// (upper). The form is certified from its interval-evaluated lower bound.

double warp_max_on(const Warp& warp, double z_lo, double z_hi) {
  double m = std::max(warp.eval(z_lo), warp.eval(z_hi));
  const int steps = 64;
  for (int i = 1; i < steps; ++i)
    m = std::max(m, warp.eval(z_lo + (z_hi - z_lo) * i / steps));
  return m;
}

void verify_waist_minimality(const WarpedCircleProduct& s) {
  ParametricChart chart;
  chart.kind = ParametricChart::Kind::warped;
  chart.warp = s.warp;
  chart.circumference = s.circumference;
  chart.z_min = s.warp.z0 - 1.0;
  chart.z_max = s.warp.z0 + 1.0;
  const auto graph = build_graph(chart, 128, 33, 3);
  const double sqrt_f0 = std::sqrt(s.warp.min_value());
  const double expected = sqrt_f0 * s.circumference / 2.0;
  const double grid_dz = (chart.z_max - chart.z_min) / 32.0;
  for (double base : {0.0, kPi / 3.0}) {
    const int u = graph.nearest_vertex(base, s.warp.z0);
    const int v = graph.nearest_vertex(base + kPi, s.warp.z0);
    const auto path = graph_distance(graph, u, v);
    if (std::abs(path.length - expected) > 0.02 * expected ||
        path_deviation(graph, path.vertices, s.warp.z0) > grid_dz + 1e-12)
      throw Error(Errc::precondition,
                  "waist minimality could not be verified for the supplied warp");
  }
}

WitnessCertificate warped_waist_witness(const WarpedCircleProduct& s,
                                        const Configuration& quad, const WitnessOptions& opts) {
  const double scale = s.circumference / kTwoPi;
  const double f0 = s.warp.min_value();
  const double sqrt_f0 = std::sqrt(f0);
  const int i = 3;

  auto waist_dist = [&](const PointCoord& a, const PointCoord& b) {
    return sqrt_f0 * scale * std::abs(wrap_signed_angle(a.x[0] - b.x[0]));
  };

  Eigen::MatrixXd A(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      A(r, c) = r == c ? 0.0 : waist_dist(quad.points[r], quad.points[c]);
  const double tol_crit = criticality_tolerance(A);
  Eigen::VectorXd cvec =
      Eigen::Map<const Eigen::VectorXd>(quad.coefficients.data(), 4);
  const double base_form = quadratic_form(A, cvec);

  WitnessCertificate cert;
  cert.base = quad;
  cert.base_form = base_form;
  cert.perturbed_index = i;
  cert.direction = TangentVector{quad.points[i], {0.0, 1.0}, 1.0};
  cert.H = 0.5;
  cert.threshold = 10.0 * tol_crit;
  cert.expected_slope = 0.5;

  const std::vector<double> c_pert{1.0, -1.0, 1.0, -0.5, -0.5};
  for (double eps : opts.perturb.eps_schedule) {
    if (!(eps > 1e-12)) continue;
    const double f_hi = warp_max_on(s.warp, s.warp.z0, s.warp.z0 + eps);
    double lo = 0.0, hi = 0.0, mid = 0.0;
    for (int r = 0; r < 5; ++r) {
      for (int c = r + 1; c < 5; ++c) {
        double d_lo, d_hi;
        if (c < 4) {
          d_lo = d_hi = A(r, c);
        } else if (r == i) {
          d_lo = d_hi = eps;  // vertical geodesic
        } else {
          const double arc = scale * std::abs(wrap_signed_angle(quad.points[r].x[0] -
                                                                 quad.points[i].x[0]));
          d_lo = std::hypot(sqrt_f0 * arc, eps);
          d_hi = std::hypot(std::sqrt(f_hi) * arc, eps);
        }
        const double w = 2.0 * c_pert[r] * c_pert[c];
        lo += w * (w >= 0.0 ? d_lo : d_hi);
        hi += w * (w >= 0.0 ? d_hi : d_lo);
        mid += w * 0.5 * (d_lo + d_hi);
      }
    }
    cert.eps_values.push_back(eps);
    cert.forms.push_back(mid);
    cert.form_lower.push_back(lo);
    cert.form_upper.push_back(hi);
    cert.slopes.push_back(mid / eps);
    if (lo > cert.threshold && (!cert.certified || eps < cert.certifying_eps)) {
      cert.certified = true;
      cert.certifying_eps = eps;
    }
  }
  if (!cert.certified)
    throw Error(Errc::no_positivity_found, "no scheduled eps produced a certified positive form");
  return cert;
}

TangentVector complement_direction(const SpaceDescriptor& space, const PointCoord& at) {
  if (std::holds_alternative<Cylinder>(space))
    return make_tangent(space, at, {0.0, 1.0});
  if (const auto* torus = std::get_if<FlatTorus>(&space)) {
    std::vector<double> comp(torus->circumferences.size(), 0.0);
    comp[1] = kTwoPi / torus->circumferences[1];
    return make_tangent(space, at, std::move(comp));
  }
  throw Error(Errc::precondition, "no canonical complement direction for this space");
}

}  // namespace

WitnessReport witness_pipeline(const SpaceDescriptor& space, double H,
                               const WitnessOptions& opts) {
  if (std::abs(H - 0.5) > 1e-12)
    throw Error(Errc::precondition, "the antipodal witness construction needs H = 1/2");

  WitnessReport report;
  const Configuration quad = antipodal_quadruple(space, opts.base_angle, opts.offset_a);

  if (const auto* warped = std::get_if<WarpedCircleProduct>(&space)) {
    verify_waist_minimality(*warped);
    // Verified minimality pins every minimal direction to the waist circle.
    report.condition_g.span_dims = {1, 1, 1, 1};
    report.condition_g.space_dim = 2;
    report.condition_g.pass = false;
    try {
      report.certificate = warped_waist_witness(*warped, quad, opts);
      report.status = WitnessStatus::certified;
    } catch (const Error& e) {
      if (e.code() != Errc::no_positivity_found) throw;
      report.status = WitnessStatus::no_positivity_found;
    }
    return report;
  }

  report.condition_g = check_condition_g(space, quad);
  if (report.condition_g.pass) {
    report.status = WitnessStatus::g_not_failing;
    return report;
  }

  // Perturb the last point whose span falls short, matching the proof's
  // choice of P_n.
  int failing = -1;
  for (std::size_t i = 0; i < report.condition_g.span_dims.size(); ++i)
    if (report.condition_g.span_dims[i] < report.condition_g.space_dim) failing = (int)i;

  const TangentVector dir = complement_direction(space, quad.points[failing]);
  try {
    report.certificate = perturb_witness(space, quad, failing, dir, H, opts.perturb);
    report.status = WitnessStatus::certified;
  } catch (const Error& e) {
    if (e.code() != Errc::no_positivity_found) throw;
    report.status = WitnessStatus::no_positivity_found;
  }
  return report;
}

}  // namespace fracindex
