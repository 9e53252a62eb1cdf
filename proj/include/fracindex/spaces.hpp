#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "fracindex/errors.hpp"

namespace fracindex {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Warp profile for a circle-line product metric f(z) dtheta^2 + dz^2.
// Either the quadratic family f(z) = 1 + a z^2, or a tabulated profile
// interpolated linearly, with a declared global minimizer z0.
struct Warp {
  double quadratic_a = 1.0;
  std::vector<std::pair<double, double>> table;  // (z, f(z)), sorted by z
  double z0 = 0.0;

  double eval(double z) const;
  double min_value() const { return eval(z0); }
};

struct Circle {
  double circumference;
};
struct Sphere {
  int dim;
  double radius;
};
struct Hyperbolic {
  int dim;
};
struct Euclidean {
  int dim;
};
struct Cylinder {
  double circumference;
};
struct FlatTorus {
  std::vector<double> circumferences;
};
struct WarpedCircleProduct {
  double circumference;
  Warp warp;
};

using SpaceDescriptor = std::variant<Circle, Sphere, Hyperbolic, Euclidean, Cylinder,
                                     FlatTorus, WarpedCircleProduct>;

// Chart coordinates. Interpretation depends on the space:
//   Circle            [theta]                theta in [0, 2pi)
//   Sphere(d, r)      [x0..xd]               unit vector in ambient R^{d+1}
//   Hyperbolic(d)     [x0..x_{d-1}]          Poincare ball, |x| < 1
//   Euclidean(d)      [x0..x_{d-1}]
//   Cylinder          [theta, z]
//   FlatTorus(L1..Lk) [theta1..thetak]
//   Warped            [theta, z]
struct PointCoord {
  std::vector<double> x;

  friend bool operator==(const PointCoord&, const PointCoord&) = default;
};

// Tangent vector at a base point, components in the same chart as PointCoord
// (ambient components for the sphere). metric_norm caches the norm in the
// space's Riemannian inner product at the base point.
struct TangentVector {
  PointCoord base;
  std::vector<double> components;
  double metric_norm = 0.0;
};

int dim(const SpaceDescriptor& space);
int coord_size(const SpaceDescriptor& space);
bool has_circle_factor(const SpaceDescriptor& space);
std::string space_name(const SpaceDescriptor& space);

void validate_space(const SpaceDescriptor& space);
void validate_point(const SpaceDescriptor& space, const PointCoord& p);

double wrap_angle(double theta);              // into [0, 2pi)
double wrap_signed_angle(double delta);       // into (-pi, pi]

// Riemannian inner product of two chart tangent vectors at base.
double metric_inner(const SpaceDescriptor& space, const PointCoord& base,
                    const std::vector<double>& u, const std::vector<double>& v);
double metric_norm(const SpaceDescriptor& space, const PointCoord& base,
                   const std::vector<double>& u);

TangentVector make_tangent(const SpaceDescriptor& space, const PointCoord& base,
                           std::vector<double> components);

// Geodesic distance. WarpedCircleProduct has no closed form here and raises
// Errc::analytic_unavailable; use discrete_geodesics for that space.
double distance(const SpaceDescriptor& space, const PointCoord& p, const PointCoord& q);

// Antipodal point on the designated circle factor (the circle itself, the
// waist circle through p for cylinders, the first factor for flat tori,
// the equator for spheres, z = z0 for warped products).
PointCoord antipode(const SpaceDescriptor& space, const PointCoord& p);

// Unit initial speeds of minimal geodesics from p to q. Where the set is
// infinite (sphere antipodes) returns an orthonormal basis spanning the
// same subspace.
std::vector<TangentVector> minimal_direction_set(const SpaceDescriptor& space,
                                                 const PointCoord& p, const PointCoord& q);

// Numeric rank of the union of minimal directions from p to each target.
int shortest_direction_span_dim(const SpaceDescriptor& space, const PointCoord& p,
                                const std::vector<PointCoord>& targets);

// Geodesic flow: point at arc length t along the unit initial direction.
PointCoord exp_map(const SpaceDescriptor& space, const PointCoord& p,
                   const TangentVector& unit_dir, double t);

struct VariationProbe {
  double eps;
  double lhs;  // finite-difference slope of the distance
  double rhs;  // first-variation inner product
};

// Compares [d(p_i, exp_{p_n}(eps dir)) - d(p_i, p_n)]/eps against
// <dir, arrival speed of a minimal geodesic from p_i>, for each eps.
std::vector<VariationProbe> first_variation_probe(const SpaceDescriptor& space,
                                                  const PointCoord& p_i, const PointCoord& p_n,
                                                  const TangentVector& direction,
                                                  const std::vector<double>& epsilons);

// Isometric immersion H^d -> H^{d+1}: appends a zero coordinate.
PointCoord embed_hyperbolic(const PointCoord& p);

// d^{2H} with the exponent applied exactly for 2H in {1, 2}.
double power_distance(double d, double two_h);

// Point factories (wrap angles, normalize sphere coordinates).
PointCoord circle_point(double theta);
PointCoord sphere_point(std::vector<double> ambient);
PointCoord cylinder_point(double theta, double z);
PointCoord torus_point(std::vector<double> angles);

}  // namespace fracindex
