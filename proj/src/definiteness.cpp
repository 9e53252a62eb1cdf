#include "fracindex/definiteness.hpp"

#include <cmath>

namespace fracindex {

void validate_configuration(const SpaceDescriptor& space, const Configuration& config) {
  const std::size_t n = config.size();
  if (n < 2) throw Error(Errc::precondition, "configuration needs at least two points");
  if (config.coefficients.size() != n)
    throw Error(Errc::precondition, "coefficient count mismatch");
  double sum = 0.0;
  for (double c : config.coefficients) {
    if (c == 0.0) throw Error(Errc::precondition, "coefficients must be nonzero");
    sum += c;
  }
  if (std::abs(sum) >= 1e-12)
    throw Error(Errc::precondition, "coefficients must sum to zero");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(space, config.points[i], config.points[j]) <= 1e-12)
        throw Error(Errc::coincident_points, "configuration points must be distinct");
}

Eigen::MatrixXd power_matrix(const SpaceDescriptor& space, const std::vector<PointCoord>& points,
                             double H) {
  if (!(H > 0.0) || H > 1.0) throw Error(Errc::precondition, "H must lie in (0, 1]");
  const int n = (int)points.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = power_distance(distance(space, points[i], points[j]), 2.0 * H);
      A(i, j) = v;
      A(j, i) = v;
    }
  return A;
}

double quadratic_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& c) {
  return c.dot(A * c);
}

double quadratic_form(const SpaceDescriptor& space, const Configuration& config, double H) {
  validate_configuration(space, config);
  const Eigen::MatrixXd A = power_matrix(space, config.points, H);
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(config.coefficients.data(),
                                                        (Eigen::Index)config.size());
  return quadratic_form(A, c);
}

CenteredGramReport centered_gram_from_matrix(const Eigen::MatrixXd& A, double H,
                                             double tol_scale) {
  const int n = (int)A.rows();
  if (n < 2) throw Error(Errc::precondition, "need at least two points");

  CenteredGramReport report;
  report.H = H;
  report.power_matrix = A;

  // J A J with J = I - ones/n, kept explicitly symmetric.
  const Eigen::VectorXd row_mean = A.rowwise().mean();
  const double total_mean = A.mean();
  Eigen::MatrixXd B = A;
  B.colwise() -= row_mean;
  B.rowwise() -= row_mean.transpose();
  B.array() += total_mean;
  B = 0.5 * (B + B.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::eigen_failure, "eigendecomposition of the centered matrix failed");

  report.spectrum = solver.eigenvalues();
  report.max_eigenvalue = report.spectrum(n - 1);
  report.tolerance = tol_scale * n * A.cwiseAbs().maxCoeff();
  report.verdict =
      report.max_eigenvalue > report.tolerance ? Verdict::violation : Verdict::no_violation;

  if (report.verdict == Verdict::violation) {
    // Top eigenvector, re-centered onto the zero-sum subspace.
    Eigen::VectorXd c = solver.eigenvectors().col(n - 1);
    c.array() -= c.mean();
    const double nrm = c.norm();
    if (nrm > 0.0) c /= nrm;
    report.violating_coefficients = c;
  }
  return report;
}

CenteredGramReport centered_gram(const SpaceDescriptor& space,
                                 const std::vector<PointCoord>& points, double H,
                                 double tol_scale) {
  return centered_gram_from_matrix(power_matrix(space, points, H), H, tol_scale);
}

CovarianceMatrix covariance_matrix(const SpaceDescriptor& space, const PointCoord& origin,
                                   const std::vector<PointCoord>& points, double H) {
  if (!(H > 0.0) || H > 1.0) throw Error(Errc::precondition, "H must lie in (0, 1]");
  const int n = (int)points.size();
  CovarianceMatrix cov;
  cov.origin = origin;
  cov.points = points;
  cov.entries.resize(n, n);

  std::vector<double> to_origin(n);
  for (int i = 0; i < n; ++i)
    to_origin[i] = power_distance(distance(space, origin, points[i]), 2.0 * H);

  for (int i = 0; i < n; ++i) {
    cov.entries(i, i) = to_origin[i];
    for (int j = i + 1; j < n; ++j) {
      const double dij = power_distance(distance(space, points[i], points[j]), 2.0 * H);
      const double v = 0.5 * (to_origin[i] + to_origin[j] - dij);
      cov.entries(i, j) = v;
      cov.entries(j, i) = v;
    }
  }

  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov.entries);
    if (solver.info() != Eigen::Success)
      throw Error(Errc::eigen_failure, "covariance eigendecomposition failed");
    cov.min_eigenvalue = solver.eigenvalues()(0);
    const double scale = std::max(1.0, cov.entries.cwiseAbs().maxCoeff());
    cov.positive_semidefinite = cov.min_eigenvalue >= -1e-9 * n * scale;
  } else {
    cov.positive_semidefinite = true;
  }
  return cov;
}

double nondegeneracy_min_eigenvalue(const SpaceDescriptor& space, const PointCoord& origin,
                                    const std::vector<PointCoord>& points, double H) {
  if (!std::holds_alternative<Hyperbolic>(space))
    throw Error(Errc::precondition, "nondegeneracy check is defined on hyperbolic spaces");
  if (!(H > 0.0) || H > 0.5) throw Error(Errc::precondition, "H must lie in (0, 1/2]");
  if (points.empty()) throw Error(Errc::precondition, "points must be nonempty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (distance(space, origin, points[i]) <= 1e-12)
      throw Error(Errc::precondition, "points must be distinct from the origin");
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (distance(space, points[i], points[j]) <= 1e-12)
        throw Error(Errc::coincident_points, "points must be distinct");
  }
  return covariance_matrix(space, origin, points, H).min_eigenvalue;
}

StationaryKernel stationary_kernel_matrix(const SpaceDescriptor& space,
                                          const std::vector<PointCoord>& points, double H,
                                          double lambda) {
  if (!(lambda >= 0.0)) throw Error(Errc::precondition, "lambda must be nonnegative");
  const Eigen::MatrixXd A = power_matrix(space, points, H);
  StationaryKernel k;
  k.entries = (-lambda * A.array()).exp().matrix();
  if (points.empty()) return k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.entries);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::eigen_failure, "kernel eigendecomposition failed");
  k.min_eigenvalue = solver.eigenvalues()(0);
  return k;
}

double criticality_tolerance(const Eigen::MatrixXd& A) {
  return 1e-8 * (double)A.rows() * A.cwiseAbs().maxCoeff();
}

ZeroSumTop zero_sum_top(const Eigen::MatrixXd& A) {
  const int n = (int)A.rows();
  if (n < 2) throw Error(Errc::precondition, "need at least two points");
  Eigen::MatrixXd ones(n, 1);
  ones.setOnes();
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(ones);
  const Eigen::MatrixXd q = qr.matrixQ().rightCols(n - 1);  // basis of ones-perp
  const Eigen::MatrixXd m = q.transpose() * A * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success)
    throw Error(Errc::eigen_failure, "restricted eigendecomposition failed");
  ZeroSumTop top;
  top.eigenvalue = solver.eigenvalues()(n - 2);
  top.coefficients = q * solver.eigenvectors().col(n - 2);
  top.coefficients.array() -= top.coefficients.mean();
  const double nrm = top.coefficients.norm();
  if (nrm > 0.0) top.coefficients /= nrm;
  return top;
}

}  // namespace fracindex
