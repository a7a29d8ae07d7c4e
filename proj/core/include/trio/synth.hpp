#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trio/recording.hpp"

namespace trio {

/// The nine EEG electrode names of the default montage.
const std::vector<std::string>& default_eeg_names();

/// Full 15-channel default montage: 9 EEG, 2 EOG, 3 EMG, 1 ECG.
std::vector<ChannelInfo> default_montage();

// ---------------------------------------------------------------------------
// Stimulus protocol
// ---------------------------------------------------------------------------

struct ProtocolConfig {
  int n_trials = 12;
  std::vector<std::string> words;  // empty -> the 18 default VCV items
  std::vector<double> jitter_choices_s = {0.5, 0.75, 1.0};
  double fixation_s = 0.5;
  double word_s = 1.0;
  double go_s = 2.0;
  double blank_s = 0.5;
  double rest_s = 60.0;
  std::uint64_t seed = 1;

  const std::vector<std::string>& word_list() const;
  void validate() const;
};

struct ProtocolTimeline {
  MarkerList markers;
  std::int64_t n_samples = 0;
  double rate_hz = 0.0;
};

/// Marker timeline: REST_START/REST_END, then per trial ITI_START (jittered
/// duration), FIX, STIM/<word>, GO, BLANK. Word order is shuffled per seed;
/// segment durations tile the timeline with no gaps.
ProtocolTimeline generate_protocol(const ProtocolConfig& cfg, double rate_hz);

// ---------------------------------------------------------------------------
// Clean EEG (ground truth)
// ---------------------------------------------------------------------------

struct CleanEegConfig {
  double ar_coeff = 0.98;          // first-order autoregressive background
  double background_rms_uv = 10.0;
  std::vector<double> background_rms_scale;  // per channel, empty -> montage default
  /// Fraction of background variance carried by fields shared across
  /// channels (volume conduction); the rest is private per channel. Every
  /// channel remains an exact AR(ar_coeff) process at its target RMS.
  double shared_fraction = 0.78;
  double erp_peak_uv = 8.0;
  double erp_duration_s = 0.4;
  double erp_freq_hz = 5.0;
  double erp_decay_s = 0.18;
  std::vector<double> erp_gains;  // per channel, empty -> montage default
  std::uint64_t seed = 2;
};

/// Damped-sinusoid ERP waveform, normalized to erp_peak_uv.
Eigen::VectorXd erp_template(const CleanEegConfig& cfg, double rate_hz);

/// AR(1) background plus the ERP template at every STIM marker, one
/// recording with the nine default EEG channels and the protocol markers.
Recording synth_clean_eeg(const ProtocolTimeline& protocol, const CleanEegConfig& cfg);

// ---------------------------------------------------------------------------
// Gradient artifact
// ---------------------------------------------------------------------------

enum class GradientShape { Sawtooth, MultiHarmonic };

struct GradientArtifactConfig {
  bool enabled = true;
  int period_samples = 101;
  double amplitude_uv = 5000.0;
  GradientShape shape = GradientShape::Sawtooth;
  double drift_per_rep = 0.001;  // amplitude scale grows by this per repetition
  std::int64_t start_sample = 500;
  std::vector<double> channel_gains;  // per channel, empty -> 0.8..1.2 spread

  void validate() const;
};

struct GradientInjection {
  Recording contaminated;
  Recording addend;   // exactly what was added
  MarkerList onsets;  // "GA_ONSET" at each repetition start
};

GradientInjection add_gradient_artifact(const Recording& rec,
                                        const GradientArtifactConfig& cfg);

// ---------------------------------------------------------------------------
// ECG + ballistocardiogram
// ---------------------------------------------------------------------------

struct CardiacConfig {
  bool enabled = true;
  double bpm = 60.0;
  double hrv_jitter = 0.05;  // fractional RR jitter, uniform
  double ecg_peak_uv = 800.0;
  double bcg_peak_uv = 40.0;
  double delay_s = 0.21;            // artifact lag after the R-peak
  double amp_jitter = 0.05;         // per-beat amplitude jitter
  double latency_jitter_s = 0.002;  // per-beat latency jitter
  std::vector<double> eeg_gains;    // per EEG channel, empty -> montage default
                                    // (mastoids strongest, M2 sign-flipped)
  std::uint64_t seed = 3;

  void validate() const;
};

struct CardiacInjection {
  Recording contaminated;
  Recording addend;   // ECG waveform on the ECG channel, BCG on EEG channels
  MarkerList r_peaks; // "R_PEAK" truth
};

/// Writes a synthetic PQRST train onto the ECG channel and a pulse-artifact
/// waveform onto every EEG channel at R + delay.
CardiacInjection synth_ecg_and_bcg(const Recording& rec, const CardiacConfig& cfg);

// ---------------------------------------------------------------------------
// Myogenic + ocular contamination
// ---------------------------------------------------------------------------

struct MyogenicConfig {
  bool enabled = true;

  // Source 1: speech-related EMG bursts around GO markers (band-limited
  // noise plus a trial-locked motif).
  double emg_noise_uv = 60.0;
  double emg_locked_uv = 30.0;
  double emg_band_lo_hz = 20.0;
  double emg_band_hi_hz = 450.0;
  double burst_offset_s = -0.2;  // relative to GO
  double burst_duration_s = 2.0;

  // Source 2: blinks, random plus stimulus-locked.
  double blink_amp_uv = 90.0;
  double blink_rate_hz = 0.20;
  double blink_duration_s = 0.3;
  double blink_stim_locked_prob = 0.9;
  double blink_stim_latency_s = 0.35;
  double blink_stim_jitter_s = 0.10;

  // Source 3: horizontal eye movements locked to stimulus onset.
  double saccade_amp_uv = 45.0;
  double saccade_duration_s = 0.4;
  double saccade_latency_s = 0.15;
  double saccade_jitter_s = 0.08;

  double ref_noise_uv = 2.0;  // sensor noise on the EMG/EOG channels

  /// n_eeg x 3 mixing of (emg, blink, saccade) into the EEG channels;
  /// empty -> montage default.
  Eigen::MatrixXd eeg_mixing;
  std::uint64_t seed = 4;
};

struct MyogenicInjection {
  Recording contaminated;
  Recording addend;          // EEG mixture plus EMG/EOG channel content
  Eigen::MatrixXd sources;   // 3 x samples (emg, blink, saccade)
  Eigen::MatrixXd eeg_mixing;
  MarkerList events;         // EMG_BURST / BLINK / SACCADE truth markers
};

MyogenicInjection add_myogenic_ocular(const Recording& rec, const MyogenicConfig& cfg);

// ---------------------------------------------------------------------------
// Full session
// ---------------------------------------------------------------------------

struct SessionConfig {
  double rate_hz = 5000.0;
  std::uint64_t seed = 1;  // master seed; generator seeds are derived from it
  ProtocolConfig protocol;
  CleanEegConfig eeg;
  MyogenicConfig myogenic;
  CardiacConfig cardiac;
  GradientArtifactConfig gradient;
};

/// Simulator output: the contaminated session, the clean ground truth, every
/// injected addend (contaminated == base + myo + cardiac + gradient addends,
/// exactly), and the true event timings.
struct SessionTruth {
  Recording contaminated;  // full montage, protocol markers
  Recording clean_eeg;     // EEG channels only
  Recording base;          // full montage before any contamination
  Recording myo_addend;
  Recording cardiac_addend;
  Recording ga_addend;
  MarkerList true_onsets;  // protocol + GA_ONSET + R_PEAK + myogenic events
  Eigen::MatrixXd mixing_truth;  // EEG mixing of the myogenic sources
};

SessionTruth generate_session(const SessionConfig& cfg);

/// JSON form of SessionConfig; absent fields keep their defaults.
SessionConfig session_config_from_json_text(const std::string& text);
SessionConfig session_config_from_json_file(const std::string& path);
std::string session_config_to_json_text(const SessionConfig& cfg);

}  // namespace trio
