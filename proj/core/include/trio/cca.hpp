#pragma once

#include <optional>
#include <vector>

#include "trio/recording.hpp"

namespace trio {

struct CcaParams {
  /// Components with canonical correlation above this are artifactual.
  double rho_threshold = 0.4;
  /// Covariance ridge as a fraction of the mean covariance diagonal.
  double ridge_scale = 1e-8;
  /// Optional cap on how many components may be rejected.
  std::optional<int> max_reject;

  void validate() const;
};

/// Joint decomposition of an EEG block against a reference block. Component
/// time courses are U = eeg_weights^T * (X - eeg_means); X is reconstructed
/// as eeg_mixing * U plus a residual uncorrelated with U.
struct CcaResult {
  Eigen::VectorXd correlations;  // K = min(n_eeg, n_ref), sorted descending
  Eigen::MatrixXd eeg_weights;   // n_eeg x K
  Eigen::MatrixXd ref_weights;   // n_ref x K
  Eigen::MatrixXd eeg_mixing;    // n_eeg x K, least-squares X ~ A * U
  Eigen::VectorXd eeg_means;
  Eigen::VectorXd ref_means;

  Eigen::Index n_components() const { return correlations.size(); }
};

/// Canonical correlation analysis: whiten both blocks by their
/// ridge-regularized covariances and take the SVD of the whitened
/// cross-covariance. Deterministic; component signs are fixed so the
/// largest-magnitude EEG weight of each component is positive.
CcaResult compute_cca(const Recording& eeg, const Recording& refs,
                      const CcaParams& params = {});

/// Canonical variates of the EEG block (K x samples).
Eigen::MatrixXd component_time_courses(const CcaResult& result, const Recording& eeg);

/// Indices of components with correlation above the threshold (descending
/// order), truncated to max_reject when set.
std::vector<int> select_artifact_components(const CcaResult& result,
                                            const CcaParams& params = {});

/// Removes the rejected components by orthogonal projection of their time
/// courses out of the (centered) EEG data; means restored, markers kept.
Recording remove_components(const Recording& eeg, const CcaResult& result,
                            const std::vector<int>& reject);

}  // namespace trio
