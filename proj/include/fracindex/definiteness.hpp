#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fracindex/spaces.hpp"

namespace fracindex {

// Distinct points with nonzero coefficients summing to zero.
struct Configuration {
  std::vector<PointCoord> points;
  std::vector<double> coefficients;

  std::size_t size() const { return points.size(); }
};

// Throws Errc::precondition on violated invariants (coincident points,
// nonzero coefficient sum, zero coefficients).
void validate_configuration(const SpaceDescriptor& space, const Configuration& config);

enum class Verdict { no_violation, violation };

struct CenteredGramReport {
  double H = 0.0;
  Eigen::MatrixXd power_matrix;           // A_ij = d^{2H}(P_i, P_j)
  Eigen::VectorXd spectrum;               // eigenvalues of J A J, ascending
  double max_eigenvalue = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::no_violation;
  std::optional<Eigen::VectorXd> violating_coefficients;  // zero-sum, unit norm
};

struct CovarianceMatrix {
  PointCoord origin;
  std::vector<PointCoord> points;
  Eigen::MatrixXd entries;
  double min_eigenvalue = 0.0;
  bool positive_semidefinite = false;
};

struct IndexBracket {
  std::optional<double> evidence_H;   // largest grid H with no violation found
  std::optional<double> violation_H;  // smallest grid H with a certified violation
  double grid_step = 0.0;
  std::optional<Configuration> witness;  // certified violating configuration
  std::vector<double> inconclusive_H;    // spectral boundary cases, neither counted
  // Absence of a violation is one-sided evidence, not a certificate.
  bool evidence_is_one_sided = true;

  std::optional<double> beta_lower() const {
    return evidence_H ? std::optional<double>(2.0 * *evidence_H) : std::nullopt;
  }
  std::optional<double> beta_upper() const {
    return violation_H ? std::optional<double>(2.0 * *violation_H) : std::nullopt;
  }
};

inline constexpr double kDefaultTolScale = 1e-9;

// Full double sum  sum_{i,j} c_i c_j d^{2H}(P_i, P_j).
double quadratic_form(const SpaceDescriptor& space, const Configuration& config, double H);

// Same sum evaluated on a precomputed power matrix.
double quadratic_form(const Eigen::MatrixXd& power_matrix, const Eigen::VectorXd& coeffs);

Eigen::MatrixXd power_matrix(const SpaceDescriptor& space, const std::vector<PointCoord>& points,
                             double H);

// Spectral test of negative definiteness restricted to zero-sum coefficient
// vectors: verdict is violation iff the top eigenvalue of J A J exceeds
// tol_scale * n * max|A|. On violation the report carries a re-centered
// unit coefficient vector realizing a positive form.
CenteredGramReport centered_gram(const SpaceDescriptor& space,
                                 const std::vector<PointCoord>& points, double H,
                                 double tol_scale = kDefaultTolScale);
CenteredGramReport centered_gram_from_matrix(const Eigen::MatrixXd& A, double H,
                                             double tol_scale = kDefaultTolScale);

// Covariance of the H-fractional field pinned at origin:
// C_xy = (d^{2H}(O,x) + d^{2H}(O,y) - d^{2H}(x,y)) / 2.
CovarianceMatrix covariance_matrix(const SpaceDescriptor& space, const PointCoord& origin,
                                   const std::vector<PointCoord>& points, double H);

// Minimum covariance eigenvalue on hyperbolic space, H in (0, 1/2]; strictly
// positive when the pinned field is nondegenerate.
double nondegeneracy_min_eigenvalue(const SpaceDescriptor& space, const PointCoord& origin,
                                    const std::vector<PointCoord>& points, double H);

struct StationaryKernel {
  Eigen::MatrixXd entries;  // K_ij = exp(-lambda d^{2H})
  double min_eigenvalue = 0.0;
};

StationaryKernel stationary_kernel_matrix(const SpaceDescriptor& space,
                                          const std::vector<PointCoord>& points, double H,
                                          double lambda);

// Criticality scale used across modules: 1e-8 * n * max d^{2H}.
double criticality_tolerance(const Eigen::MatrixXd& power_matrix);

struct ZeroSumTop {
  double eigenvalue = 0.0;        // max of c^T A c over zero-sum unit c
  Eigen::VectorXd coefficients;   // the maximizer, exactly zero-sum
};

// Top of the quadratic form restricted to the zero-sum subspace, computed on
// an orthonormal basis of the complement of the constant vector. Unlike the
// J A J spectrum this carries no structural zero eigenvalue.
ZeroSumTop zero_sum_top(const Eigen::MatrixXd& power_matrix);

}  // namespace fracindex
