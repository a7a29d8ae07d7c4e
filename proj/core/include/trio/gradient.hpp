#pragma once

#include <optional>
#include <string>

#include "trio/recording.hpp"

namespace trio {

/// Parameters for gradient-artifact onset detection and template subtraction.
struct GaParams {
  /// Channel used for onset detection; "auto" picks the channel with the
  /// largest 99th-percentile absolute first difference.
  std::string detection_channel = "auto";
  /// Threshold in multiples of the median absolute first difference.
  double threshold_factor = 10.0;
  /// When set, detected inter-onset intervals must match within 10%.
  std::optional<double> expected_period_s;
  /// Repetitions averaged per template (odd, centered on the corrected one).
  int window_reps = 21;
  /// Cross-correlation alignment search, in samples, applied per repetition.
  int align_search = 2;

  void validate() const;
};

/// Markers ("GA_ONSET") at the first sample of each artifact repetition,
/// found by thresholding the first difference of the detection channel and
/// grouping crossings at the repetition period. Returns an empty list when
/// nothing crosses the threshold.
MarkerList detect_gradient_onsets(const Recording& rec, const GaParams& params = {});

struct GaCorrection {
  Recording corrected;
  /// Everything that was subtracted; corrected.data + artifact.data equals
  /// the input exactly.
  Recording artifact;
  std::int64_t period_samples = 0;
};

/// Sliding-window average artifact subtraction. For each repetition the
/// template is the mean of the demeaned neighboring repetitions (window
/// truncated one-sided at the edges), optionally realigned within
/// +-align_search samples, and subtracted over one repetition length.
/// Samples outside all repetitions are left untouched.
GaCorrection subtract_gradient_artifact(const Recording& rec, const MarkerList& onsets,
                                        const GaParams& params = {});

}  // namespace trio
