#include "fracindex/discrete_geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace fracindex {

double ParametricChart::metric_theta(double z) const {
  if (kind == Kind::hyperboloid) return 1.0 + z * z;
  const double s = circumference / kTwoPi;
  return warp.eval(z) * s * s;
}

double ParametricChart::metric_z(double z) const {
  if (kind == Kind::hyperboloid) return (1.0 + 2.0 * z * z) / (1.0 + z * z);
  return 1.0;
}

ParametricChart ParametricChart::hyperboloid(double z_min, double z_max) {
  ParametricChart c;
  c.kind = Kind::hyperboloid;
  c.z_min = z_min;
  c.z_max = z_max;
  return c;
}

ParametricChart ParametricChart::warped_quadratic(double a, double z_min, double z_max,
                                                  double circumference) {
  ParametricChart c;
  c.kind = Kind::warped;
  c.warp.quadratic_a = a;
  c.circumference = circumference;
  c.z_min = z_min;
  c.z_max = z_max;
  return c;
}

ParametricChart ParametricChart::flat(double z_min, double z_max) {
  return warped_quadratic(0.0, z_min, z_max);
}

int GeodesicGraph::nearest_vertex(double theta, double z) const {
  const double h_theta = kTwoPi / n_theta;
  int it = (int)std::lround(wrap_angle(theta) / h_theta) % n_theta;
  const double h_z = (n_z > 1) ? (zs.back() - zs.front()) / (n_z - 1) : 1.0;
  int iz = (int)std::lround((z - zs.front()) / h_z);
  iz = std::clamp(iz, 0, n_z - 1);
  return vertex(it, iz);
}

GeodesicGraph build_graph(const ParametricChart& chart, int n_theta, int n_z,
                          int stencil_radius) {
  if (n_theta < 8) throw Error(Errc::precondition, "n_theta must be >= 8");
  if (n_z < 2) throw Error(Errc::precondition, "n_z must be >= 2");
  if (stencil_radius < 1 || stencil_radius > 3)
    throw Error(Errc::precondition, "stencil_radius must be in {1,2,3}");

  GeodesicGraph g;
  g.chart = &chart;
  g.n_theta = n_theta;
  g.n_z = n_z;
  g.stencil_radius = stencil_radius;
  g.thetas.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) g.thetas[i] = kTwoPi * i / n_theta;
  g.zs.resize(n_z);
  for (int j = 0; j < n_z; ++j)
    g.zs[j] = chart.z_min + (chart.z_max - chart.z_min) * j / (n_z - 1);

  // Coprime stencil offsets within the Chebyshev ball, excluding (0,0).
  std::vector<std::pair<int, int>> offs;
  for (int a = -stencil_radius; a <= stencil_radius; ++a)
    for (int b = -stencil_radius; b <= stencil_radius; ++b) {
      if (a == 0 && b == 0) continue;
      if (std::gcd(std::abs(a), std::abs(b)) != 1) continue;
      offs.emplace_back(a, b);
    }

  const double h_theta = kTwoPi / n_theta;
  const double h_z = (chart.z_max - chart.z_min) / (n_z - 1);
  const int n = n_theta * n_z;

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (int iz = 0; iz < n_z; ++iz) {
    for (int it = 0; it < n_theta; ++it) {
      const int v = g.vertex(it, iz);
      for (const auto& [a, b] : offs) {
        const int jz = iz + b;
        if (jz < 0 || jz >= n_z) continue;  // z is a hard wall
        const int jt = ((it + a) % n_theta + n_theta) % n_theta;
        const double z_mid = g.zs[iz] + 0.5 * b * h_z;
        const double e = chart.metric_theta(z_mid);
        const double gz = chart.metric_z(z_mid);
        if (!(e > 0.0) || !(gz > 0.0))
          throw Error(Errc::degenerate_chart, "non-positive metric sampled");
        const double dth = a * h_theta;
        const double dz = b * h_z;
        const double w = std::sqrt(e * dth * dth + gz * dz * dz);
        if (!std::isfinite(w) || !(w > 0.0))
          throw Error(Errc::degenerate_chart, "bad edge weight");
        adj[v].emplace_back(g.vertex(jt, jz), w);
      }
    }
  }

  g.offsets.resize(n + 1, 0);
  for (int v = 0; v < n; ++v) g.offsets[v + 1] = g.offsets[v] + adj[v].size();
  g.edge_to.resize(g.offsets[n]);
  g.edge_w.resize(g.offsets[n]);
  for (int v = 0; v < n; ++v) {
    std::size_t k = g.offsets[v];
    for (const auto& [to, w] : adj[v]) {
      g.edge_to[k] = to;
      g.edge_w[k] = w;
      ++k;
    }
  }
  return g;
}

namespace {

struct DijkstraResult {
  std::vector<double> dist;
  std::vector<int> prev;
};

DijkstraResult dijkstra(const GeodesicGraph& g, int source, int target) {
  const int n = g.vertex_count();
  DijkstraResult r;
  r.dist.assign(n, std::numeric_limits<double>::infinity());
  r.prev.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  r.dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > r.dist[v]) continue;
    if (v == target) break;
    for (std::size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const int to = g.edge_to[k];
      const double nd = d + g.edge_w[k];
      if (nd < r.dist[to]) {
        r.dist[to] = nd;
        r.prev[to] = v;
        heap.emplace(nd, to);
      }
    }
  }
  return r;
}

}  // namespace

GraphPath graph_distance(const GeodesicGraph& graph, int u, int v) {
  if (u < 0 || u >= graph.vertex_count() || v < 0 || v >= graph.vertex_count())
    throw Error(Errc::precondition, "vertex index out of range");
  if (u == v) return {0.0, {u}};
  const auto r = dijkstra(graph, u, v);
  if (!std::isfinite(r.dist[v])) throw Error(Errc::disconnected, "target unreachable");
  GraphPath path;
  path.length = r.dist[v];
  for (int cur = v; cur != -1; cur = r.prev[cur]) path.vertices.push_back(cur);
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

std::vector<double> graph_distance_field(const GeodesicGraph& graph, int u) {
  if (u < 0 || u >= graph.vertex_count())
    throw Error(Errc::precondition, "vertex index out of range");
  return dijkstra(graph, u, -1).dist;
}

double refine_distance(const ParametricChart& chart, std::pair<double, double> u_param,
                       std::pair<double, double> v_param, double rel_tol,
                       const RefineOptions& opts) {
  if (!(rel_tol > 0.0) || rel_tol > 0.1)
    throw Error(Errc::precondition, "rel_tol must lie in (0, 0.1]");
  int n_theta = opts.base_n_theta;
  int n_z = opts.base_n_z;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level <= opts.max_doublings; ++level) {
    const auto g = build_graph(chart, n_theta, n_z, opts.stencil_radius);
    const int u = g.nearest_vertex(u_param.first, u_param.second);
    const int v = g.nearest_vertex(v_param.first, v_param.second);
    const double d = graph_distance(g, u, v).length;
    if (level > 0) {
      const double scale = std::max(std::abs(d), 1e-300);
      if (std::abs(d - prev) / scale < rel_tol) return d;
    }
    prev = d;
    n_theta *= 2;
    n_z = 2 * n_z - 1;  // keeps endpoints on the grid
  }
  throw Error(Errc::no_convergence, "distance did not settle within the doubling budget");
}

double path_deviation(const GeodesicGraph& graph, const std::vector<int>& path, double waist_z) {
  if (path.empty()) throw Error(Errc::precondition, "path must be nonempty");
  double dev = 0.0;
  for (int v : path) dev = std::max(dev, std::abs(graph.z_of(v) - waist_z));
  return dev;
}

}  // namespace fracindex
