#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "trio/recording.hpp"

namespace trio {

/// Trials cut around markers: one channels x samples matrix per trial.
struct EpochSet {
  std::vector<Eigen::MatrixXd> trials;
  double pre_s = 0.0;
  double post_s = 0.0;
  double rate_hz = 0.0;
  std::vector<std::string> trial_labels;
  std::size_t n_dropped = 0;  // markers whose window fell outside the recording

  std::size_t n_trials() const { return trials.size(); }
};

/// Cut [marker - pre, marker + post) windows around every marker whose label
/// matches `label_key` (exact or "<key>/..."). Out-of-range trials are
/// dropped and counted. Throws DataError when no usable trial remains.
EpochSet epoch(const Recording& rec, std::string_view label_key, double pre_s,
               double post_s);
EpochSet epoch(const Recording& rec, const MarkerList& markers, double pre_s,
               double post_s);

/// Trial average, optionally after per-trial baseline-mean subtraction over
/// [start_s, end_s] relative to the marker (range must lie inside the epoch
/// window). Returns channels x samples.
Eigen::MatrixXd average_erp(
    const EpochSet& epochs,
    std::optional<std::pair<double, double>> baseline = std::nullopt);

struct ChannelCorrelation {
  std::vector<double> r;  // per channel, NaN when undefined
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n_used = 0;
};

/// Per-channel Pearson correlation between two equally shaped waveform
/// matrices. Zero-variance channels are reported as NaN and excluded from
/// the mean/sd summary.
ChannelCorrelation erp_channel_correlation(const Eigen::MatrixXd& erp_a,
                                           const Eigen::MatrixXd& erp_b);

enum class SpectrumWindow { Hann };

/// Averaged-segment amplitude spectrum: `magnitude[k]` of a unit sinusoid at
/// bin center k reads 1.0.
struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> magnitude;  // uV per bin
  SpectrumWindow window = SpectrumWindow::Hann;
  int n_fft = 0;
};

/// Hann-windowed, 50%-overlap averaged magnitude spectrum of one channel.
Spectrum magnitude_spectrum(const Eigen::VectorXd& series, double rate_hz,
                            int n_fft, SpectrumWindow window = SpectrumWindow::Hann);
Spectrum magnitude_spectrum(const Recording& rec, Eigen::Index channel, int n_fft,
                            SpectrumWindow window = SpectrumWindow::Hann);

/// Total squared magnitude inside +-1-bin bands around k * f0, k = 1..n.
double harmonic_power(const Spectrum& spec, double f0_hz, int n_harmonics);

/// Artifact-band power ratio 10*log10(P_before / P_after) per channel,
/// clamped to [-120, 120] dB.
struct HarmonicBandSpec {
  double f0_hz = 0.0;
  int n_harmonics = 1;
  int n_fft = 4096;
};
struct CardiacLockedSpec {
  MarkerList peaks;
  double pre_s = 0.0;
  double post_s = 0.5;
};
std::vector<double> artifact_attenuation(const Recording& before, const Recording& after,
                                         const HarmonicBandSpec& band);
std::vector<double> artifact_attenuation(const Recording& before, const Recording& after,
                                         const CardiacLockedSpec& locked);
std::vector<double> artifact_attenuation(const Recording& before, const Recording& after,
                                         const Recording& truth);

/// Event-locked trial average of one channel over [peak - pre, peak + post).
Eigen::VectorXd locked_average(const Recording& rec, Eigen::Index channel,
                               const MarkerList& events, double pre_s, double post_s);

struct DriftEstimate {
  double ms_per_s = 0.0;
  double flag_threshold_ms_per_s = 0.0;
  bool flagged = false;
};

/// Clock drift between an image stream (frames x frame period) and the
/// EEG-side trigger span, in milliseconds per second of stream duration.
DriftEstimate estimate_drift(std::int64_t mri_frames, double frame_period_s,
                             double eeg_trigger_span_s);

/// mean(image over roi) / sample standard deviation(image over noise mask).
/// Masks must be nonempty, disjoint, and shaped like the image.
double roi_snr(const Eigen::MatrixXd& image,
               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& roi_mask,
               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& noise_mask);

}  // namespace trio
