#include "trio/cca.hpp"

#include <algorithm>
#include <cmath>

#include "trio/errors.hpp"

namespace trio {

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& x, Eigen::VectorXd& means) {
  means = x.rowwise().mean();
  return x.colwise() - means;
}

// Symmetric inverse square root of a ridge-regularized covariance.
Eigen::MatrixXd inv_sqrt_cov(const Eigen::MatrixXd& xc, double ridge_scale,
                             const char* block_name) {
  const double denom = static_cast<double>(xc.cols()) - 1.0;
  Eigen::MatrixXd cov = xc * xc.transpose() / denom;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    if (!(cov(i, i) > 0.0))
      throw DataError(std::string("zero-variance channel in ") + block_name + " block");
  }
  const double ridge = ridge_scale * cov.trace() / static_cast<double>(cov.rows());
  cov.diagonal().array() += ridge;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  const Eigen::VectorXd lam = eig.eigenvalues();
  if (lam.minCoeff() <= 0.0) throw NumericError("covariance not positive definite");
  return eig.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

void CcaParams::validate() const {
  if (rho_threshold < 0.0 || rho_threshold > 1.0)
    throw ConfigError("rho_threshold must lie in [0, 1]");
  if (ridge_scale < 0.0) throw ConfigError("ridge must be non-negative");
  if (max_reject && *max_reject < 0) throw ConfigError("max_reject must be non-negative");
}

CcaResult compute_cca(const Recording& eeg, const Recording& refs, const CcaParams& params) {
  params.validate();
  if (eeg.n_samples() != refs.n_samples())
    throw DataError("EEG and reference blocks differ in sample count");
  const Eigen::Index p = eeg.n_channels();
  const Eigen::Index q = refs.n_channels();
  const Eigen::Index n = eeg.n_samples();
  if (n < 10 * (p + q)) throw DataError("sample count too small for CCA");

  CcaResult result;
  const Eigen::MatrixXd xc = centered(eeg.data, result.eeg_means);
  const Eigen::MatrixXd yc = centered(refs.data, result.ref_means);

  const Eigen::MatrixXd wx = inv_sqrt_cov(xc, params.ridge_scale, "EEG");
  const Eigen::MatrixXd wy = inv_sqrt_cov(yc, params.ridge_scale, "reference");

  const double denom = static_cast<double>(n) - 1.0;
  const Eigen::MatrixXd cross = xc * yc.transpose() / denom;
  const Eigen::MatrixXd m = wx * cross * wy;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index k = std::min(p, q);

  result.correlations = svd.singularValues().head(k).cwiseMin(1.0).cwiseMax(0.0);
  result.eeg_weights = wx * svd.matrixU().leftCols(k);
  result.ref_weights = wy * svd.matrixV().leftCols(k);

  // Reproducible sign convention: largest-|weight| EEG entry positive; the
  // reference weight flips with it so the correlation stays positive.
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index at = 0;
    result.eeg_weights.col(c).cwiseAbs().maxCoeff(&at);
    if (result.eeg_weights(at, c) < 0.0) {
      result.eeg_weights.col(c) *= -1.0;
      result.ref_weights.col(c) *= -1.0;
    }
  }

  // Least-squares mixing X_c ~ A * U.
  const Eigen::MatrixXd u = result.eeg_weights.transpose() * xc;  // K x n
  const Eigen::MatrixXd gram = u * u.transpose();
  result.eeg_mixing = gram.ldlt().solve(u * xc.transpose()).transpose();
  return result;
}

Eigen::MatrixXd component_time_courses(const CcaResult& result, const Recording& eeg) {
  if (eeg.n_channels() != result.eeg_weights.rows())
    throw DataError("recording does not match CCA result");
  return result.eeg_weights.transpose() * (eeg.data.colwise() - result.eeg_means);
}

std::vector<int> select_artifact_components(const CcaResult& result, const CcaParams& params) {
  params.validate();
  std::vector<int> reject;
  for (Eigen::Index i = 0; i < result.correlations.size(); ++i) {
    if (result.correlations(i) > params.rho_threshold) reject.push_back(static_cast<int>(i));
  }
  if (params.max_reject && static_cast<int>(reject.size()) > *params.max_reject)
    reject.resize(static_cast<size_t>(*params.max_reject));
  return reject;
}

Recording remove_components(const Recording& eeg, const CcaResult& result,
                            const std::vector<int>& reject) {
  if (eeg.n_channels() != result.eeg_weights.rows())
    throw DataError("recording does not match CCA result");
  for (int idx : reject) {
    if (idx < 0 || idx >= result.n_components())
      throw DataError("component index out of range");
  }
  if (reject.empty()) return eeg;

  const Eigen::MatrixXd xc = eeg.data.colwise() - result.eeg_means;
  Eigen::MatrixXd u_r(static_cast<Eigen::Index>(reject.size()), eeg.n_samples());
  for (size_t i = 0; i < reject.size(); ++i)
    u_r.row(static_cast<Eigen::Index>(i)) =
        result.eeg_weights.col(reject[i]).transpose() * xc;

  // Orthogonal projection of the rejected subspace out of every channel.
  const Eigen::MatrixXd gram = u_r * u_r.transpose();
  const Eigen::MatrixXd coeff = gram.ldlt().solve(u_r * xc.transpose()).transpose();

  Recording out = eeg;
  out.data = xc - coeff * u_r;
  out.data.colwise() += result.eeg_means;
  return out;
}

}  // namespace trio
