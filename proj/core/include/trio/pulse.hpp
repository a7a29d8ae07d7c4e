#pragma once

#include <string>
#include <vector>

#include "trio/recording.hpp"

namespace trio {

enum class SuspectReason { RrTooShort, RrTooLong, LowAmplitude };

std::string to_string(SuspectReason r);

struct RPeakSuspect {
  std::size_t peak_index = 0;  // index into RPeakReport::peaks
  SuspectReason reason = SuspectReason::RrTooShort;
};

/// Automated half of semi-automatic R-peak verification: detected peaks plus
/// a list of beats whose interval or amplitude looks wrong. The manual half
/// is an externally edited marker file that replaces the detection.
struct RPeakReport {
  MarkerList peaks;  // label "R_PEAK", strictly increasing
  double rr_median_s = 0.0;
  std::vector<RPeakSuspect> suspects;
};

/// R-peak detection on the (single) ECG channel: 15 Hz zero-phase low-pass,
/// then local maxima above 0.6x the running 98th percentile, 0.3 s
/// refractory. Requires at least 5 s of data. Throws DataError when no ECG
/// channel exists or no peak is found.
RPeakReport detect_r_peaks(const Recording& rec);

struct BcgParams {
  /// Artifact lag after the R-peak.
  double delay_s = 0.21;
  /// Segment span as a fraction of the median RR interval, in (0, 1.5].
  double span_fraction = 1.0;
  /// Beats averaged per template (odd, >= 3, centered).
  int window_beats = 21;
  /// Mean template by default; median resists outlier beats.
  bool use_median = false;
  /// Channels to correct; the ECG channel is always left untouched.
  ChannelSelector channels = ChannelSelector::modality(Modality::EEG);

  void validate() const;
};

struct BcgCorrection {
  Recording corrected;
  Recording artifact;  // corrected.data + artifact.data equals the input
  std::int64_t span_samples = 0;
};

/// Cardiac-locked sliding-window average subtraction. Per beat, the segment
/// [peak + delay, peak + delay + span) is corrected with the demeaned
/// average of the neighboring beats' segments; overlapping segments are
/// truncated at the next segment start.
BcgCorrection subtract_pulse_artifact(const Recording& rec, const MarkerList& peaks,
                                      const BcgParams& params = {});

}  // namespace trio
