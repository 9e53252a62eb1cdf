#include "fracindex/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "fracindex/rng.hpp"

namespace fracindex {

namespace {

// Canonical point order makes the factorization, and therefore every
// realization, independent of how the caller listed the points.
std::vector<int> canonical_order(const std::vector<PointCoord>& points) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return points[a].x < points[b].x; });
  return order;
}

std::uint64_t point_set_key(const SpaceDescriptor& space, const std::vector<PointCoord>& points,
                            const std::vector<int>& order, double H,
                            std::optional<double> lambda) {
  ByteHasher h;
  h.add((std::uint64_t)space.index());
  h.add(H);
  if (lambda) h.add(*lambda);
  for (int idx : order) h.add(points[idx].x);
  return h.digest();
}

struct Factorization {
  Eigen::MatrixXd root;  // V sqrt(clip(Lambda))
  double clipped_mass = 0.0;
  double trace = 0.0;
};

Factorization factor_covariance(const Eigen::MatrixXd& cov, double clip_tolerance) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::eigen_failure, "covariance eigendecomposition failed");
  Eigen::VectorXd lam = solver.eigenvalues();
  Factorization f;
  f.trace = cov.trace();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < 0.0) {
      f.clipped_mass += -lam(i);
      lam(i) = 0.0;
    }
  }
  if (f.clipped_mass > clip_tolerance * std::max(f.trace, 1e-300))
    throw Error(Errc::excess_clipping,
                "clipped eigenvalue mass " + std::to_string(f.clipped_mass) +
                    " exceeds tolerance: covariance is not PSD at this H");
  f.root = solver.eigenvectors() * lam.cwiseSqrt().asDiagonal();
  return f;
}

// realizations(s, input index) = (root z_s)_canonical, z indexed by
// (sample, canonical position) through the counter generator.
Eigen::MatrixXd generate(const Factorization& f, const std::vector<int>& order,
                         std::uint64_t key, int n_samples, int threads) {
  const int n = (int)order.size();
  Eigen::MatrixXd out(n_samples, n);
  const CounterRng rng(key);

  auto fill_range = [&](int s_begin, int s_end) {
    Eigen::VectorXd z(n);
    for (int s = s_begin; s < s_end; ++s) {
      for (int k = 0; k < n; ++k)
        z(k) = rng.gaussian((std::uint64_t)s * (std::uint64_t)n + (std::uint64_t)k);
      const Eigen::VectorXd x = f.root * z;
      for (int k = 0; k < n; ++k) out(s, order[k]) = x(k);
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || n_samples < 2 * threads) {
    fill_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = t * chunk;
      const int e = std::min(n_samples, b + chunk);
      if (b < e) pool.emplace_back(fill_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace

FieldSample sample_fbm(const SpaceDescriptor& space, const PointCoord& origin,
                       const std::vector<PointCoord>& points, double H, int n_samples,
                       std::uint64_t seed, const SampleOptions& opts) {
  if (n_samples < 1) throw Error(Errc::precondition, "n_samples must be >= 1");
  const auto order = canonical_order(points);

  std::vector<PointCoord> sorted;
  sorted.reserve(points.size());
  for (int idx : order) sorted.push_back(points[idx]);

  const CovarianceMatrix cov = covariance_matrix(space, origin, sorted, H);
  const Factorization f = factor_covariance(cov.entries, opts.clip_tolerance);

  FieldSample sample;
  sample.space = space;
  sample.origin = origin;
  sample.points = points;
  sample.H = H;
  sample.seed = seed;
  sample.clipped_mass = f.clipped_mass;
  sample.covariance_trace = f.trace;

  const std::uint64_t key =
      CounterRng::derive(seed, point_set_key(space, points, order, H, std::nullopt));
  sample.realizations = generate(f, order, key, n_samples, opts.threads);

  // X_O = 0 almost surely: pin columns of points at zero distance from the
  // origin exactly, clearing factorization round-off.
  for (std::size_t j = 0; j < points.size(); ++j)
    if (distance(space, origin, points[j]) == 0.0) sample.realizations.col(j).setZero();
  return sample;
}

FieldSample sample_stationary(const SpaceDescriptor& space, const std::vector<PointCoord>& points,
                              double H, double lambda, int n_samples, std::uint64_t seed,
                              const SampleOptions& opts) {
  if (n_samples < 1) throw Error(Errc::precondition, "n_samples must be >= 1");
  if (!(lambda >= 0.0)) throw Error(Errc::precondition, "lambda must be nonnegative");
  const auto order = canonical_order(points);

  std::vector<PointCoord> sorted;
  sorted.reserve(points.size());
  for (int idx : order) sorted.push_back(points[idx]);

  const StationaryKernel kernel = stationary_kernel_matrix(space, sorted, H, lambda);
  const Factorization f = factor_covariance(kernel.entries, opts.clip_tolerance);

  FieldSample sample;
  sample.space = space;
  sample.points = points;
  sample.H = H;
  sample.lambda = lambda;
  sample.seed = seed;
  sample.clipped_mass = f.clipped_mass;
  sample.covariance_trace = f.trace;

  const std::uint64_t key =
      CounterRng::derive(seed, point_set_key(space, points, order, H, lambda));
  sample.realizations = generate(f, order, key, n_samples, opts.threads);
  return sample;
}

std::vector<VariogramEntry> variogram_check(const FieldSample& sample,
                                            const std::vector<std::pair<int, int>>& pairs) {
  const int n_samples = (int)sample.realizations.rows();
  const int n_points = (int)sample.realizations.cols();
  if (n_samples < 1000)
    throw Error(Errc::too_few_samples, "variogram check needs at least 1000 realizations");

  std::vector<std::pair<int, int>> selected = pairs;
  if (selected.empty()) {
    for (int i = 0; i < n_points; ++i)
      for (int j = i + 1; j < n_points; ++j) selected.emplace_back(i, j);
  }

  std::vector<VariogramEntry> out;
  out.reserve(selected.size());
  for (const auto& [i, j] : selected) {
    if (i < 0 || i >= n_points || j < 0 || j >= n_points)
      throw Error(Errc::precondition, "pair index out of range");
    VariogramEntry e;
    e.i = i;
    e.j = j;
    const Eigen::ArrayXd diff =
        sample.realizations.col(i).array() - sample.realizations.col(j).array();
    e.empirical = diff.square().mean();
    e.target =
        power_distance(distance(sample.space, sample.points[i], sample.points[j]), 2.0 * sample.H);
    // Mean of v chi^2_1 variates has standard error v sqrt(2/N).
    if (e.target > 0.0) {
      e.z_score = (e.empirical - e.target) / (e.target * std::sqrt(2.0 / n_samples));
    } else {
      e.z_score = e.empirical == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace fracindex
