#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fracindex/definiteness.hpp"
#include "fracindex/spaces.hpp"

namespace fracindex {

struct FieldSample {
  SpaceDescriptor space;
  std::optional<PointCoord> origin;  // absent for stationary samples
  std::vector<PointCoord> points;
  double H = 0.5;
  std::optional<double> lambda;      // stationary kernel decay, when used
  Eigen::MatrixXd realizations;      // n_samples x n_points
  std::uint64_t seed = 0;
  double clipped_mass = 0.0;         // |sum of negative eigenvalues| clipped to zero
  double covariance_trace = 0.0;
};

struct SampleOptions {
  double clip_tolerance = 1e-6;  // relative to the covariance trace
  int threads = 1;
};

// Draws centered Gaussian vectors with the pinned fBm covariance via
// symmetric eigen-factorization; negative eigenvalues are clipped at zero
// and their mass recorded. Clipped mass above clip_tolerance * trace raises
// Errc::excess_clipping: the covariance is not PSD, the field does not
// exist at this H.
FieldSample sample_fbm(const SpaceDescriptor& space, const PointCoord& origin,
                       const std::vector<PointCoord>& points, double H, int n_samples,
                       std::uint64_t seed, const SampleOptions& opts = {});

// Stationary field with covariance exp(-lambda d^{2H}); unit variance at
// every point, no origin pinning.
FieldSample sample_stationary(const SpaceDescriptor& space, const std::vector<PointCoord>& points,
                              double H, double lambda, int n_samples, std::uint64_t seed,
                              const SampleOptions& opts = {});

struct VariogramEntry {
  int i = 0;
  int j = 0;
  double empirical = 0.0;  // mean squared increment
  double target = 0.0;     // d^{2H}(x_i, x_j)
  double z_score = 0.0;    // under the chi-square sampling spread
};

// Empirical E(X_x - X_y)^2 against d^{2H} for the requested index pairs
// (all pairs when none are given). Needs at least 1000 realizations.
std::vector<VariogramEntry> variogram_check(const FieldSample& sample,
                                            const std::vector<std::pair<int, int>>& pairs = {});

}  // namespace fracindex
