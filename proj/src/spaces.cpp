#include "fracindex/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

namespace fracindex {

namespace {

constexpr double kAntipodeRelTol = 1e-9;  // triggers the multi-geodesic branch
constexpr double kRankRelTol = 1e-8;

double sq(double x) { return x * x; }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

void scale_in_place(std::vector<double>& a, double s) {
  for (auto& v : a) v *= s;
}

double circle_arc(double t1, double t2) {
  return std::abs(wrap_signed_angle(t1 - t2));
}

double circle_distance(double circumference, double t1, double t2) {
  return circumference / kTwoPi * circle_arc(t1, t2);
}

// Poincare ball conformal factor, metric 4||dx||^2 / (1-||x||^2)^2.
double conformal_lambda(const std::vector<double>& p) { return 2.0 / (1.0 - dot(p, p)); }

// Mobius addition on the unit ball (curvature -1 gyrovector operation).
std::vector<double> mobius_add(const std::vector<double>& u, const std::vector<double>& v) {
  const double uv = dot(u, v);
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  const double den = 1.0 + 2.0 * uv + uu * vv;
  std::vector<double> r(u.size());
  const double cu = (1.0 + 2.0 * uv + vv) / den;
  const double cv = (1.0 - uu) / den;
  for (size_t i = 0; i < u.size(); ++i) r[i] = cu * u[i] + cv * v[i];
  return r;
}

std::vector<double> negate(std::vector<double> v) {
  for (auto& x : v) x = -x;
  return v;
}

}  // namespace

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::out_of_chart: return "OutOfChart";
    case Errc::analytic_unavailable: return "AnalyticUnavailable";
    case Errc::no_circle_factor: return "NoCircleFactor";
    case Errc::coincident_points: return "CoincidentPoints";
    case Errc::degenerate_offset: return "DegenerateOffset";
    case Errc::degenerate_chart: return "DegenerateChart";
    case Errc::disconnected: return "Disconnected";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::eigen_failure: return "EigenFailure";
    case Errc::not_critical: return "NotCritical";
    case Errc::direction_not_perpendicular: return "DirectionNotPerpendicular";
    case Errc::no_positivity_found: return "NoPositivityFound";
    case Errc::excess_clipping: return "ExcessClipping";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::budget_exhausted: return "BudgetExhausted";
    case Errc::precondition: return "Precondition";
  }
  return "Unknown";
}

double Warp::eval(double z) const {
  if (table.empty()) return 1.0 + quadratic_a * z * z;
  if (z <= table.front().first) return table.front().second;
  if (z >= table.back().first) return table.back().second;
  auto it = std::upper_bound(table.begin(), table.end(), z,
                             [](double v, const auto& e) { return v < e.first; });
  const auto& [z1, f1] = *it;
  const auto& [z0, f0] = *std::prev(it);
  const double t = (z - z0) / (z1 - z0);
  return f0 + t * (f1 - f0);
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double wrap_signed_angle(double delta) {
  double t = std::fmod(delta, kTwoPi);
  if (t > kPi) t -= kTwoPi;
  if (t <= -kPi) t += kTwoPi;
  return t;
}

int dim(const SpaceDescriptor& space) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) return 1;
        if constexpr (std::is_same_v<T, Sphere>) return s.dim;
        if constexpr (std::is_same_v<T, Hyperbolic>) return s.dim;
        if constexpr (std::is_same_v<T, Euclidean>) return s.dim;
        if constexpr (std::is_same_v<T, Cylinder>) return 2;
        if constexpr (std::is_same_v<T, FlatTorus>) return (int)s.circumferences.size();
        if constexpr (std::is_same_v<T, WarpedCircleProduct>) return 2;
      },
      space);
}

int coord_size(const SpaceDescriptor& space) {
  if (const auto* s = std::get_if<Sphere>(&space)) return s->dim + 1;
  return dim(space);
}

bool has_circle_factor(const SpaceDescriptor& space) {
  return std::holds_alternative<Circle>(space) || std::holds_alternative<Cylinder>(space) ||
         std::holds_alternative<FlatTorus>(space) || std::holds_alternative<Sphere>(space) ||
         std::holds_alternative<WarpedCircleProduct>(space);
}

std::string space_name(const SpaceDescriptor& space) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) return "circle";
        if constexpr (std::is_same_v<T, Sphere>) return "sphere";
        if constexpr (std::is_same_v<T, Hyperbolic>) return "hyperbolic";
        if constexpr (std::is_same_v<T, Euclidean>) return "euclidean";
        if constexpr (std::is_same_v<T, Cylinder>) return "cylinder";
        if constexpr (std::is_same_v<T, FlatTorus>) return "flat_torus";
        if constexpr (std::is_same_v<T, WarpedCircleProduct>) return "warped";
      },
      space);
}

void validate_space(const SpaceDescriptor& space) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Cylinder>) {
          if (!(s.circumference > 0.0))
            throw Error(Errc::precondition, "circumference must be positive");
        }
        if constexpr (std::is_same_v<T, Sphere>) {
          if (s.dim < 1) throw Error(Errc::precondition, "sphere dimension must be >= 1");
          if (!(s.radius > 0.0)) throw Error(Errc::precondition, "sphere radius must be positive");
        }
        if constexpr (std::is_same_v<T, Hyperbolic> || std::is_same_v<T, Euclidean>) {
          if (s.dim < 1) throw Error(Errc::precondition, "dimension must be >= 1");
        }
        if constexpr (std::is_same_v<T, FlatTorus>) {
          if (s.circumferences.empty())
            throw Error(Errc::precondition, "flat torus needs at least one factor");
          for (double L : s.circumferences)
            if (!(L > 0.0)) throw Error(Errc::precondition, "circumference must be positive");
        }
        if constexpr (std::is_same_v<T, WarpedCircleProduct>) {
          if (!(s.circumference > 0.0))
            throw Error(Errc::precondition, "circumference must be positive");
          if (!(s.warp.min_value() > 0.0))
            throw Error(Errc::precondition, "warp must be positive at its minimizer");
          for (const auto& [z, f] : s.warp.table) {
            if (!(f > 0.0)) throw Error(Errc::precondition, "warp table must be positive");
            if (f < s.warp.min_value() - 1e-12)
              throw Error(Errc::precondition, "warp table dips below declared minimum");
          }
        }
      },
      space);
}

void validate_point(const SpaceDescriptor& space, const PointCoord& p) {
  if ((int)p.x.size() != coord_size(space))
    throw Error(Errc::out_of_chart, "coordinate count mismatch for " + space_name(space));
  for (double v : p.x)
    if (!std::isfinite(v)) throw Error(Errc::out_of_chart, "non-finite coordinate");
  if (std::holds_alternative<Sphere>(space)) {
    if (std::abs(norm(p.x) - 1.0) > 1e-9)
      throw Error(Errc::out_of_chart, "sphere point must have unit ambient norm");
  } else if (std::holds_alternative<Hyperbolic>(space)) {
    if (!(norm(p.x) < 1.0)) throw Error(Errc::out_of_chart, "hyperbolic point must lie in the open ball");
  }
}

double metric_inner(const SpaceDescriptor& space, const PointCoord& base,
                    const std::vector<double>& u, const std::vector<double>& v) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return sq(s.circumference / kTwoPi) * u[0] * v[0];
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return sq(s.radius) * dot(u, v);
        } else if constexpr (std::is_same_v<T, Hyperbolic>) {
          return sq(conformal_lambda(base.x)) * dot(u, v);
        } else if constexpr (std::is_same_v<T, Euclidean>) {
          return dot(u, v);
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return sq(s.circumference / kTwoPi) * u[0] * v[0] + u[1] * v[1];
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          double acc = 0.0;
          for (size_t i = 0; i < s.circumferences.size(); ++i)
            acc += sq(s.circumferences[i] / kTwoPi) * u[i] * v[i];
          return acc;
        } else {
          static_assert(std::is_same_v<T, WarpedCircleProduct>);
          return s.warp.eval(base.x[1]) * sq(s.circumference / kTwoPi) * u[0] * v[0] +
                 u[1] * v[1];
        }
      },
      space);
}

double metric_norm(const SpaceDescriptor& space, const PointCoord& base,
                   const std::vector<double>& u) {
  return std::sqrt(std::max(0.0, metric_inner(space, base, u, u)));
}

TangentVector make_tangent(const SpaceDescriptor& space, const PointCoord& base,
                           std::vector<double> components) {
  validate_point(space, base);
  if (components.size() != base.x.size())
    throw Error(Errc::precondition, "tangent component count mismatch");
  TangentVector t{base, std::move(components), 0.0};
  t.metric_norm = metric_norm(space, base, t.components);
  return t;
}

double distance(const SpaceDescriptor& space, const PointCoord& p, const PointCoord& q) {
  validate_point(space, p);
  validate_point(space, q);
  if (p.x == q.x && !std::holds_alternative<WarpedCircleProduct>(space))
    return 0.0;  // keeps d(p, p) exact where acos/acosh would round
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return circle_distance(s.circumference, p.x[0], q.x[0]);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          // r arccos(<p, q>) evaluated through atan2 of the chord lengths;
          // well conditioned at coincidence and at the antipode.
          const auto diff = sub(p.x, q.x);
          std::vector<double> sum(p.x.size());
          for (size_t i = 0; i < sum.size(); ++i) sum[i] = p.x[i] + q.x[i];
          return s.radius * 2.0 * std::atan2(norm(diff), norm(sum));
        } else if constexpr (std::is_same_v<T, Hyperbolic>) {
          // arccosh(1 + u) = log1p(u + sqrt(u (u + 2))), stable for small u.
          const auto diff = sub(p.x, q.x);
          const double den = (1.0 - dot(p.x, p.x)) * (1.0 - dot(q.x, q.x));
          const double u = std::max(0.0, 2.0 * dot(diff, diff) / den);
          return std::log1p(u + std::sqrt(u * (u + 2.0)));
        } else if constexpr (std::is_same_v<T, Euclidean>) {
          return norm(sub(p.x, q.x));
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return std::hypot(circle_distance(s.circumference, p.x[0], q.x[0]), p.x[1] - q.x[1]);
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          double acc = 0.0;
          for (size_t i = 0; i < s.circumferences.size(); ++i)
            acc += sq(circle_distance(s.circumferences[i], p.x[i], q.x[i]));
          return std::sqrt(acc);
        } else {
          static_assert(std::is_same_v<T, WarpedCircleProduct>);
          throw Error(Errc::analytic_unavailable,
                      "warped product distance has no closed form; use discrete_geodesics");
        }
      },
      space);
}

PointCoord antipode(const SpaceDescriptor& space, const PointCoord& p) {
  validate_point(space, p);
  return std::visit(
      [&](const auto& s) -> PointCoord {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return {{wrap_angle(p.x[0] + kPi)}};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{wrap_angle(p.x[0] + kPi), p.x[1]}};
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          PointCoord r = p;
          r.x[0] = wrap_angle(r.x[0] + kPi);
          return r;
        } else if constexpr (std::is_same_v<T, Sphere>) {
          // Antipode on the designated great circle equals the sphere antipode.
          PointCoord r = p;
          for (auto& v : r.x) v = -v;
          return r;
        } else if constexpr (std::is_same_v<T, WarpedCircleProduct>) {
          if (std::abs(p.x[1] - s.warp.z0) > 1e-9)
            throw Error(Errc::precondition, "point must lie on the waist z = z0");
          return {{wrap_angle(p.x[0] + kPi), p.x[1]}};
        } else {
          throw Error(Errc::no_circle_factor,
                      space_name(SpaceDescriptor(s)) + " has no designated circle factor");
        }
      },
      space);
}

namespace {

// Tangent basis of the sphere at p: orthonormal complement of p in R^{d+1},
// scaled so each vector is metric-unit (ambient norm 1/r).
std::vector<TangentVector> sphere_tangent_basis(const SpaceDescriptor& space, const Sphere& s,
                                                const PointCoord& p) {
  const int n = s.dim + 1;
  Eigen::MatrixXd m(n, 1);
  for (int i = 0; i < n; ++i) m(i, 0) = p.x[i];
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.matrixQ();
  std::vector<TangentVector> basis;
  for (int c = 1; c < n; ++c) {
    std::vector<double> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = q(i, c) / s.radius;
    basis.push_back(make_tangent(space, p, std::move(comp)));
  }
  return basis;
}

}  // namespace

std::vector<TangentVector> minimal_direction_set(const SpaceDescriptor& space,
                                                 const PointCoord& p, const PointCoord& q) {
  validate_point(space, p);
  validate_point(space, q);
  return std::visit(
      [&](const auto& s) -> std::vector<TangentVector> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          const double delta = wrap_signed_angle(q.x[0] - p.x[0]);
          if (std::abs(delta) < 1e-14)
            throw Error(Errc::coincident_points, "p and q coincide");
          const double unit = kTwoPi / s.circumference;
          if (std::abs(std::abs(delta) - kPi) <= kAntipodeRelTol * kPi) {
            return {make_tangent(space, p, {unit}), make_tangent(space, p, {-unit})};
          }
          return {make_tangent(space, p, {delta > 0 ? unit : -unit})};
        } else if constexpr (std::is_same_v<T, Sphere>) {
          const double d = distance(space, p, q);
          if (d < 1e-14) throw Error(Errc::coincident_points, "p and q coincide");
          if (d >= kPi * s.radius * (1.0 - kAntipodeRelTol)) {
            return sphere_tangent_basis(space, s, p);
          }
          // Ambient direction toward q, projected tangent to p.
          const double c = std::clamp(dot(p.x, q.x), -1.0, 1.0);
          std::vector<double> v(q.x.size());
          for (size_t i = 0; i < v.size(); ++i) v[i] = q.x[i] - c * p.x[i];
          scale_in_place(v, 1.0 / (norm(v) * s.radius));
          return {make_tangent(space, p, std::move(v))};
        } else if constexpr (std::is_same_v<T, Hyperbolic>) {
          auto w = mobius_add(negate(p.x), q.x);
          const double wn = norm(w);
          if (wn < 1e-15) throw Error(Errc::coincident_points, "p and q coincide");
          scale_in_place(w, 1.0 / (wn * conformal_lambda(p.x)));
          return {make_tangent(space, p, std::move(w))};
        } else if constexpr (std::is_same_v<T, Euclidean>) {
          auto v = sub(q.x, p.x);
          const double n = norm(v);
          if (n < 1e-15) throw Error(Errc::coincident_points, "p and q coincide");
          scale_in_place(v, 1.0 / n);
          return {make_tangent(space, p, std::move(v))};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          const double scale = s.circumference / kTwoPi;
          const double delta = wrap_signed_angle(q.x[0] - p.x[0]);
          const double dz = q.x[1] - p.x[1];
          std::vector<double> deltas;
          if (std::abs(std::abs(delta) - kPi) <= kAntipodeRelTol * kPi) {
            deltas = {kPi, -kPi};
          } else {
            deltas = {delta};
          }
          std::vector<TangentVector> out;
          for (double dth : deltas) {
            const double len = std::hypot(scale * dth, dz);
            if (len < 1e-15) throw Error(Errc::coincident_points, "p and q coincide");
            out.push_back(make_tangent(space, p, {dth / len, dz / len}));
          }
          return out;
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          const size_t k = s.circumferences.size();
          std::vector<std::vector<double>> options(k);
          for (size_t i = 0; i < k; ++i) {
            const double delta = wrap_signed_angle(q.x[i] - p.x[i]);
            if (std::abs(std::abs(delta) - kPi) <= kAntipodeRelTol * kPi)
              options[i] = {kPi, -kPi};
            else
              options[i] = {delta};
          }
          std::vector<std::vector<double>> combos{{}};
          for (size_t i = 0; i < k; ++i) {
            std::vector<std::vector<double>> next;
            for (const auto& c : combos)
              for (double d : options[i]) {
                auto e = c;
                e.push_back(d);
                next.push_back(std::move(e));
              }
            combos = std::move(next);
          }
          std::vector<TangentVector> out;
          for (auto& c : combos) {
            double len2 = 0.0;
            for (size_t i = 0; i < k; ++i) len2 += sq(s.circumferences[i] / kTwoPi * c[i]);
            const double len = std::sqrt(len2);
            if (len < 1e-15) throw Error(Errc::coincident_points, "p and q coincide");
            for (auto& v : c) v /= len;
            out.push_back(make_tangent(space, p, std::move(c)));
          }
          return out;
        } else {
          throw Error(Errc::analytic_unavailable,
                      "minimal directions unavailable on warped products");
        }
      },
      space);
}

int shortest_direction_span_dim(const SpaceDescriptor& space, const PointCoord& p,
                                const std::vector<PointCoord>& targets) {
  if (targets.empty()) throw Error(Errc::precondition, "targets must be nonempty");
  std::vector<std::vector<double>> rows;
  for (const auto& t : targets) {
    for (auto& v : minimal_direction_set(space, p, t)) rows.push_back(std::move(v.components));
  }
  Eigen::MatrixXd m((int)rows.size(), (int)rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankRelTol * sv(0)) ++rank;
  return rank;
}

PointCoord exp_map(const SpaceDescriptor& space, const PointCoord& p,
                   const TangentVector& unit_dir, double t) {
  validate_point(space, p);
  const auto& u = unit_dir.components;
  if (std::abs(unit_dir.metric_norm - 1.0) > 1e-8)
    throw Error(Errc::precondition, "direction must be metric-unit");
  return std::visit(
      [&](const auto& s) -> PointCoord {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return {{wrap_angle(p.x[0] + t * u[0])}};
        } else if constexpr (std::is_same_v<T, Sphere>) {
          // Metric-unit tangent has ambient norm 1/r.
          const double ang = t / s.radius;
          std::vector<double> out(p.x.size());
          for (size_t i = 0; i < out.size(); ++i)
            out[i] = std::cos(ang) * p.x[i] + std::sin(ang) * s.radius * u[i];
          const double n = norm(out);
          for (auto& v : out) v /= n;
          return {std::move(out)};
        } else if constexpr (std::is_same_v<T, Hyperbolic>) {
          auto uhat = u;
          const double un = norm(uhat);
          if (un < 1e-300) return p;
          scale_in_place(uhat, std::tanh(t / 2.0) / un);
          return {mobius_add(p.x, uhat)};
        } else if constexpr (std::is_same_v<T, Euclidean>) {
          std::vector<double> out(p.x.size());
          for (size_t i = 0; i < out.size(); ++i) out[i] = p.x[i] + t * u[i];
          return {std::move(out)};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{wrap_angle(p.x[0] + t * u[0]), p.x[1] + t * u[1]}};
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          std::vector<double> out(p.x.size());
          for (size_t i = 0; i < out.size(); ++i) out[i] = wrap_angle(p.x[i] + t * u[i]);
          return {std::move(out)};
        } else {
          static_assert(std::is_same_v<T, WarpedCircleProduct>);
          // Vertical lines are geodesics of f(z) dtheta^2 + dz^2.
          if (std::abs(u[0]) > 1e-14)
            throw Error(Errc::analytic_unavailable,
                        "warped exponential map available only along the z factor");
          return {{p.x[0], p.x[1] + t * u[1]}};
        }
      },
      space);
}

std::vector<VariationProbe> first_variation_probe(const SpaceDescriptor& space,
                                                  const PointCoord& p_i, const PointCoord& p_n,
                                                  const TangentVector& direction,
                                                  const std::vector<double>& epsilons) {
  const double d0 = distance(space, p_i, p_n);
  // Arrival speeds at p_n of minimal geodesics from p_i are the negated
  // initial speeds toward p_i; the one-sided slope is the min inner product.
  const auto toward = minimal_direction_set(space, p_n, p_i);
  double rhs = std::numeric_limits<double>::infinity();
  for (const auto& u : toward) {
    auto w = u.components;
    scale_in_place(w, -1.0);
    rhs = std::min(rhs, metric_inner(space, p_n, direction.components, w));
  }
  std::vector<VariationProbe> probes;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw Error(Errc::precondition, "epsilons must be positive");
    const PointCoord moved = exp_map(space, p_n, direction, eps);
    const double lhs = (distance(space, p_i, moved) - d0) / eps;
    probes.push_back({eps, lhs, rhs});
  }
  return probes;
}

PointCoord embed_hyperbolic(const PointCoord& p) {
  PointCoord r = p;
  r.x.push_back(0.0);
  return r;
}

double power_distance(double d, double two_h) {
  if (two_h == 1.0) return d;
  if (two_h == 2.0) return d * d;
  return std::pow(d, two_h);
}

PointCoord circle_point(double theta) { return {{wrap_angle(theta)}}; }

PointCoord sphere_point(std::vector<double> ambient) {
  const double n = norm(ambient);
  if (n < 1e-12) throw Error(Errc::out_of_chart, "cannot normalize zero vector");
  scale_in_place(ambient, 1.0 / n);
  return {std::move(ambient)};
}

PointCoord cylinder_point(double theta, double z) { return {{wrap_angle(theta), z}}; }

PointCoord torus_point(std::vector<double> angles) {
  for (auto& a : angles) a = wrap_angle(a);
  return {std::move(angles)};
}

}  // namespace fracindex
