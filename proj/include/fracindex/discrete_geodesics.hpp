#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fracindex/spaces.hpp"

namespace fracindex {

// Parameter rectangle [0, 2pi) x [z_min, z_max], theta periodic, with a
// diagonal metric E(z) dtheta^2 + G(z) dz^2. Covers the hyperboloid of one
// sheet (embedded) and warped circle products (intrinsic); a warp with a = 0
// gives the flat chart.
struct ParametricChart {
  enum class Kind { hyperboloid, warped };

  Kind kind = Kind::warped;
  Warp warp;                     // used when kind == warped
  double circumference = kTwoPi; // scales the theta factor for warped charts
  double z_min = -1.0;
  double z_max = 1.0;

  double metric_theta(double z) const;  // E(z)
  double metric_z(double z) const;      // G(z)

  static ParametricChart hyperboloid(double z_min, double z_max);
  static ParametricChart warped_quadratic(double a, double z_min, double z_max,
                                          double circumference = kTwoPi);
  static ParametricChart flat(double z_min, double z_max);
};

struct GeodesicGraph {
  const ParametricChart* chart = nullptr;
  int n_theta = 0;
  int n_z = 0;
  int stencil_radius = 0;
  std::vector<double> thetas;  // size n_theta
  std::vector<double> zs;      // size n_z
  // CSR adjacency: neighbors of v are edges[offsets[v] .. offsets[v+1])
  std::vector<std::size_t> offsets;
  std::vector<int> edge_to;
  std::vector<double> edge_w;

  int vertex(int it, int iz) const { return iz * n_theta + it; }
  int theta_index(int v) const { return v % n_theta; }
  int z_index(int v) const { return v / n_theta; }
  double theta_of(int v) const { return thetas[theta_index(v)]; }
  double z_of(int v) const { return zs[z_index(v)]; }
  int vertex_count() const { return n_theta * n_z; }

  // Nearest grid vertex to a (theta, z) parameter pair.
  int nearest_vertex(double theta, double z) const;
};

GeodesicGraph build_graph(const ParametricChart& chart, int n_theta, int n_z,
                          int stencil_radius);

struct GraphPath {
  double length = 0.0;
  std::vector<int> vertices;
};

GraphPath graph_distance(const GeodesicGraph& graph, int u, int v);

// Distances from u to every vertex (single Dijkstra sweep), for field export.
std::vector<double> graph_distance_field(const GeodesicGraph& graph, int u);

struct RefineOptions {
  int base_n_theta = 64;
  int base_n_z = 9;
  int stencil_radius = 3;
  int max_doublings = 6;
};

// Doubles grid resolution until successive shortest-path lengths agree to
// rel_tol; throws Errc::no_convergence past max_doublings.
double refine_distance(const ParametricChart& chart, std::pair<double, double> u_param,
                       std::pair<double, double> v_param, double rel_tol,
                       const RefineOptions& opts = {});

// Maximum |z - waist_z| over path vertices.
double path_deviation(const GeodesicGraph& graph, const std::vector<int>& path, double waist_z);

}  // namespace fracindex
