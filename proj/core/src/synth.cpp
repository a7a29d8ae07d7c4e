#include "trio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rng.hpp"
#include "trio/errors.hpp"
#include "trio/filters.hpp"

namespace trio {

namespace {

constexpr std::uint64_t kEegSalt = 0x45454701;
constexpr std::uint64_t kMyoSalt = 0x4d594f02;
constexpr std::uint64_t kCardiacSalt = 0x43415203;

const std::vector<std::string> kDefaultWords = {
    "apa", "ata", "aka", "asa", "asha", "ala", "afa", "ara", "aha",
    "awa", "aya", "aba", "ada", "aga", "atha", "ama", "ana", "ava"};

const std::vector<std::string> kEegNames = {"C3", "C4", "F3", "F4", "FPz",
                                            "O1", "O2", "M1", "M2"};

// Per-channel defaults, in kEegNames order.
const std::vector<double> kBackgroundScale = {1.0, 1.0, 1.1, 1.1, 1.4, 1.0, 1.0, 0.9, 0.9};
const std::vector<double> kErpGains = {2.5, 1.6, 2.1, 1.4, 1.0, 0.7, 0.7, 0.4, 0.4};

// Shared background field topographies (volume conduction): a global field
// and a frontal-occipital gradient. Both symmetric across hemispheres.
const std::vector<std::vector<double>> kFieldPatterns = {
    {0.9, 0.9, 1.0, 1.0, 1.1, 0.8, 0.8, 0.7, 0.7},
    {0.1, 0.1, 0.3, 0.3, 0.45, -1.0, -0.95, -0.5, -0.5},
};
const std::vector<double> kFieldStrength = {1.0, 0.8};
const std::vector<double> kBcgGains = {0.5, 0.5, 0.4, 0.4, 0.35, 0.45, 0.45, 1.0, -1.0};

// Myogenic mixing directions (emg, blink, saccade): unit-norm dipolar
// topographies orthogonal to the background fields, spread so the three
// sources together load every channel equally. Scaled by the source
// amplitudes at injection time.
const std::vector<double> kEmgPattern = {0.5659, 0.2616, -0.1717, -0.1962, -0.2091,
                                         0.2056, -0.2774, -0.4952, 0.3676};
const std::vector<double> kBlinkPattern = {0.0671, -0.0278, -0.0092, -0.5337, 0.4353,
                                           0.4077, -0.4180, -0.2719, 0.3246};
const std::vector<double> kSaccadePattern = {0.0928, -0.5139, 0.5512, 0.1001, -0.3164,
                                             -0.3533, 0.2857, -0.1190, 0.3046};

std::int64_t at_sample(double t_s, double rate_hz) {
  return static_cast<std::int64_t>(std::llround(t_s * rate_hz));
}

std::vector<Eigen::Index> channels_of(const Recording& rec, Modality m) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index ch = 0; ch < rec.n_channels(); ++ch)
    if (rec.channels[static_cast<size_t>(ch)].modality == m) idx.push_back(ch);
  return idx;
}

void sort_markers(MarkerList& markers) {
  std::stable_sort(markers.begin(), markers.end(),
                   [](const Marker& a, const Marker& b) { return a.sample < b.sample; });
}

// Raised-cosine envelope over [0, len) with `ramp` samples on each edge.
double envelope_at(std::int64_t i, std::int64_t len, std::int64_t ramp) {
  if (i < 0 || i >= len) return 0.0;
  if (i < ramp)
    return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(ramp));
  if (i >= len - ramp)
    return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(len - 1 - i) /
                                static_cast<double>(ramp));
  return 1.0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sub, std::uint64_t salt) {
  return detail::splitmix64(detail::splitmix64(master ^ salt) ^ sub);
}

}  // namespace

const std::vector<std::string>& default_eeg_names() { return kEegNames; }

std::vector<ChannelInfo> default_montage() {
  std::vector<ChannelInfo> channels;
  for (const auto& name : kEegNames) channels.push_back({name, Modality::EEG, "uV"});
  channels.push_back({"EOG1", Modality::EOG, "uV"});
  channels.push_back({"EOG2", Modality::EOG, "uV"});
  channels.push_back({"EMG1", Modality::EMG, "uV"});
  channels.push_back({"EMG2", Modality::EMG, "uV"});
  channels.push_back({"EMG3", Modality::EMG, "uV"});
  channels.push_back({"ECG", Modality::ECG, "uV"});
  return channels;
}

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

const std::vector<std::string>& ProtocolConfig::word_list() const {
  return words.empty() ? kDefaultWords : words;
}

void ProtocolConfig::validate() const {
  if (n_trials < 1) throw ConfigError("n_trials must be positive");
  if (word_list().empty()) throw ConfigError("word list must be nonempty");
  if (jitter_choices_s.empty()) throw ConfigError("jitter choices must be nonempty");
  for (double j : jitter_choices_s)
    if (!(j > 0.0)) throw ConfigError("jitter durations must be positive");
  for (double d : {fixation_s, word_s, go_s, blank_s, rest_s})
    if (!(d > 0.0)) throw ConfigError("protocol durations must be positive");
}

ProtocolTimeline generate_protocol(const ProtocolConfig& cfg, double rate_hz) {
  cfg.validate();
  if (!(rate_hz > 0.0)) throw ConfigError("rate must be positive");
  detail::Rng rng(cfg.seed);

  const auto& words = cfg.word_list();
  std::vector<std::string> order;
  while (order.size() < static_cast<size_t>(cfg.n_trials)) {
    std::vector<std::string> block = words;
    rng.shuffle(block);
    order.insert(order.end(), block.begin(), block.end());
  }
  order.resize(static_cast<size_t>(cfg.n_trials));

  ProtocolTimeline timeline;
  timeline.rate_hz = rate_hz;
  double t = 0.0;
  timeline.markers.push_back({at_sample(t, rate_hz), "REST_START"});
  t += cfg.rest_s;
  timeline.markers.push_back({at_sample(t, rate_hz), "REST_END"});

  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    const double iti =
        cfg.jitter_choices_s[static_cast<size_t>(rng.below(cfg.jitter_choices_s.size()))];
    timeline.markers.push_back({at_sample(t, rate_hz), "ITI_START"});
    t += iti;
    timeline.markers.push_back({at_sample(t, rate_hz), "FIX"});
    t += cfg.fixation_s;
    timeline.markers.push_back({at_sample(t, rate_hz), "STIM/" + order[static_cast<size_t>(trial)]});
    t += cfg.word_s;
    timeline.markers.push_back({at_sample(t, rate_hz), "GO"});
    t += cfg.go_s;
    timeline.markers.push_back({at_sample(t, rate_hz), "BLANK"});
    t += cfg.blank_s;
  }
  timeline.n_samples = at_sample(t, rate_hz);
  return timeline;
}

// ---------------------------------------------------------------------------
// Clean EEG
// ---------------------------------------------------------------------------

Eigen::VectorXd erp_template(const CleanEegConfig& cfg, double rate_hz) {
  if (!(cfg.erp_duration_s > 0.0) || !(cfg.erp_decay_s > 0.0))
    throw ConfigError("ERP duration and decay must be positive");
  const auto len = std::max<std::int64_t>(1, at_sample(cfg.erp_duration_s, rate_hz));
  Eigen::VectorXd v(len);
  for (std::int64_t i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    v(i) = std::sin(2.0 * std::numbers::pi * cfg.erp_freq_hz * t) * std::exp(-t / cfg.erp_decay_s);
  }
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak > 0.0) v *= cfg.erp_peak_uv / peak;
  return v;
}

Recording synth_clean_eeg(const ProtocolTimeline& protocol, const CleanEegConfig& cfg) {
  if (protocol.n_samples <= 0) throw ConfigError("protocol timeline is empty");
  const auto n_ch = static_cast<Eigen::Index>(kEegNames.size());

  std::vector<double> bg_scale =
      cfg.background_rms_scale.empty() ? kBackgroundScale : cfg.background_rms_scale;
  std::vector<double> gains = cfg.erp_gains.empty() ? kErpGains : cfg.erp_gains;
  if (bg_scale.size() != kEegNames.size() || gains.size() != kEegNames.size())
    throw ConfigError("per-channel parameter count does not match the montage");
  if (!(cfg.ar_coeff >= 0.0) || cfg.ar_coeff >= 1.0)
    throw ConfigError("AR coefficient must lie in [0, 1)");

  Recording rec;
  rec.rate_hz = protocol.rate_hz;
  rec.markers = protocol.markers;
  for (const auto& name : kEegNames) rec.channels.push_back({name, Modality::EEG, "uV"});
  rec.data.resize(n_ch, protocol.n_samples);

  if (cfg.shared_fraction < 0.0 || cfg.shared_fraction > 1.0)
    throw ConfigError("shared_fraction must lie in [0, 1]");

  detail::Rng rng(cfg.seed);
  const double stationary_scale = std::sqrt(1.0 - cfg.ar_coeff * cfg.ar_coeff);
  const auto ar_series = [&](double rms, Eigen::RowVectorXd& out) {
    double x = rms * rng.normal();
    out(0) = x;
    const double drive = rms * stationary_scale;
    for (Eigen::Index i = 1; i < out.size(); ++i) {
      x = cfg.ar_coeff * x + drive * rng.normal();
      out(i) = x;
    }
  };

  // Shared fields plus private noise; each channel sums independent AR(1)
  // processes with the same coefficient, so it stays exactly AR(1) at its
  // target RMS.
  const auto n_fields = static_cast<Eigen::Index>(kFieldPatterns.size());
  Eigen::MatrixXd fields(n_fields, protocol.n_samples);
  for (Eigen::Index f = 0; f < n_fields; ++f) {
    Eigen::RowVectorXd row(protocol.n_samples);
    ar_series(1.0, row);
    fields.row(f) = row;
  }

  Eigen::RowVectorXd private_row(protocol.n_samples);
  for (Eigen::Index ch = 0; ch < n_ch; ++ch) {
    const double rms = cfg.background_rms_uv * bg_scale[static_cast<size_t>(ch)];
    double raw_common = 0.0;
    for (Eigen::Index f = 0; f < n_fields; ++f) {
      const double w = kFieldStrength[static_cast<size_t>(f)] *
                       kFieldPatterns[static_cast<size_t>(f)][static_cast<size_t>(ch)];
      raw_common += w * w;
    }
    const double common_gain =
        raw_common > 0.0 ? rms * std::sqrt(cfg.shared_fraction / raw_common) : 0.0;
    rec.data.row(ch).setZero();
    for (Eigen::Index f = 0; f < n_fields; ++f) {
      const double w = common_gain * kFieldStrength[static_cast<size_t>(f)] *
                       kFieldPatterns[static_cast<size_t>(f)][static_cast<size_t>(ch)];
      rec.data.row(ch) += w * fields.row(f);
    }
    ar_series(rms * std::sqrt(1.0 - cfg.shared_fraction), private_row);
    rec.data.row(ch) += private_row;
  }

  const Eigen::VectorXd tmpl = erp_template(cfg, protocol.rate_hz);
  for (const Marker& m : markers_with_label(protocol.markers, "STIM")) {
    const std::int64_t len = std::min<std::int64_t>(tmpl.size(), protocol.n_samples - m.sample);
    for (Eigen::Index ch = 0; ch < n_ch; ++ch)
      rec.data.row(ch).segment(m.sample, len) +=
          gains[static_cast<size_t>(ch)] * tmpl.head(len).transpose();
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Gradient artifact
// ---------------------------------------------------------------------------

void GradientArtifactConfig::validate() const {
  if (period_samples < 10) throw ConfigError("gradient period must be at least 10 samples");
  if (!(amplitude_uv > 0.0)) throw ConfigError("gradient amplitude must be positive");
  if (start_sample < 0) throw ConfigError("start_sample must be non-negative");
}

GradientInjection add_gradient_artifact(const Recording& rec,
                                        const GradientArtifactConfig& cfg) {
  cfg.validate();
  const std::int64_t n = rec.n_samples();
  const std::int64_t period = cfg.period_samples;

  std::vector<double> gains = cfg.channel_gains;
  if (gains.empty()) {
    gains.resize(static_cast<size_t>(rec.n_channels()));
    for (size_t ch = 0; ch < gains.size(); ++ch) {
      gains[ch] = gains.size() > 1
                      ? 0.8 + 0.4 * static_cast<double>(ch) / static_cast<double>(gains.size() - 1)
                      : 1.0;
    }
  }
  if (gains.size() != static_cast<size_t>(rec.n_channels()))
    throw ConfigError("channel gain count does not match the recording");

  // One period of the waveform, exactly zero-mean.
  Eigen::VectorXd wave(period);
  if (cfg.shape == GradientShape::Sawtooth) {
    for (std::int64_t i = 0; i < period; ++i)
      wave(i) = 2.0 * static_cast<double>(i) / static_cast<double>(period - 1) - 1.0;
  } else {
    for (std::int64_t i = 0; i < period; ++i) {
      double v = 0.0;
      for (int k = 1; k <= 5; ++k)
        v += std::sin(2.0 * std::numbers::pi * k * static_cast<double>(i) /
                      static_cast<double>(period)) /
             static_cast<double>(k);
      wave(i) = v;
    }
    wave /= wave.cwiseAbs().maxCoeff();
  }
  wave *= cfg.amplitude_uv;

  GradientInjection inj;
  inj.addend = rec;
  inj.addend.data.setZero();
  inj.addend.markers.clear();

  for (std::int64_t rep = 0;; ++rep) {
    const std::int64_t start = cfg.start_sample + rep * period;
    if (start >= n) break;
    const double scale = 1.0 + cfg.drift_per_rep * static_cast<double>(rep);
    const std::int64_t len = std::min(period, n - start);
    for (Eigen::Index ch = 0; ch < rec.n_channels(); ++ch)
      inj.addend.data.row(ch).segment(start, len) +=
          gains[static_cast<size_t>(ch)] * scale * wave.head(len).transpose();
    inj.onsets.push_back({start, "GA_ONSET"});
  }

  inj.contaminated = rec;
  inj.contaminated.data += inj.addend.data;
  return inj;
}

// ---------------------------------------------------------------------------
// ECG + BCG
// ---------------------------------------------------------------------------

void CardiacConfig::validate() const {
  if (bpm < 30.0 || bpm > 180.0) throw ConfigError("bpm must lie in [30, 180]");
  if (hrv_jitter < 0.0 || hrv_jitter >= 1.0) throw ConfigError("hrv_jitter must lie in [0, 1)");
  if (!(ecg_peak_uv > 0.0)) throw ConfigError("ECG amplitude must be positive");
  if (delay_s < 0.0) throw ConfigError("delay must be non-negative");
}

namespace {

struct EcgBump {
  double amp;     // relative to the R amplitude
  double center;  // seconds from the R-peak
  double width;   // gaussian sigma in seconds
};

constexpr EcgBump kEcgShape[] = {
    {0.10, -0.190, 0.030},  // P
    {-0.08, -0.025, 0.010}, // Q
    {1.00, 0.000, 0.014},   // R
    {-0.10, 0.028, 0.010},  // S
    {0.18, 0.220, 0.045},   // T
};

Eigen::VectorXd bcg_waveform(double rate_hz) {
  const double duration = 0.5;
  const auto len = at_sample(duration, rate_hz);
  Eigen::VectorXd w(len);
  for (std::int64_t i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    const double osc = std::sin(2.0 * std::numbers::pi * 3.0 * t + 0.4);
    const double env = std::exp(-(t - 0.18) * (t - 0.18) / (2.0 * 0.09 * 0.09));
    w(i) = osc * env;
  }
  w /= w.cwiseAbs().maxCoeff();
  return w;
}

}  // namespace

CardiacInjection synth_ecg_and_bcg(const Recording& rec, const CardiacConfig& cfg) {
  cfg.validate();
  const auto ecg_idx = channels_of(rec, Modality::ECG);
  if (ecg_idx.size() != 1) throw DataError("recording must contain exactly one ECG channel");
  const Eigen::Index ecg = ecg_idx.front();
  const auto eeg_idx = channels_of(rec, Modality::EEG);

  std::vector<double> gains = cfg.eeg_gains;
  if (gains.empty()) {
    if (eeg_idx.size() == kEegNames.size()) {
      gains = kBcgGains;
    } else {
      gains.assign(eeg_idx.size(), 0.5);
    }
  }
  if (gains.size() != eeg_idx.size())
    throw ConfigError("BCG gain count does not match the EEG channel count");

  const std::int64_t n = rec.n_samples();
  const double rate = rec.rate_hz;
  detail::Rng rng(cfg.seed);

  // Planted R times.
  std::vector<double> r_times;
  const double rr = 60.0 / cfg.bpm;
  double t = 0.5;
  while (t < rec.duration_s() - 0.5) {
    r_times.push_back(t);
    t += rr * (1.0 + cfg.hrv_jitter * (2.0 * rng.uniform() - 1.0));
  }
  if (r_times.empty()) throw DataError("recording too short for any heartbeat");

  CardiacInjection inj;
  inj.addend = rec;
  inj.addend.data.setZero();
  inj.addend.markers.clear();

  const Eigen::VectorXd bcg = bcg_waveform(rate);
  const auto write_span = at_sample(0.4, rate);

  for (double rt : r_times) {
    const std::int64_t r_sample = at_sample(rt, rate);
    inj.r_peaks.push_back({r_sample, "R_PEAK"});

    for (const EcgBump& bump : kEcgShape) {
      const double c = rt + bump.center;
      const std::int64_t lo = std::max<std::int64_t>(0, at_sample(c, rate) - write_span);
      const std::int64_t hi = std::min<std::int64_t>(n, at_sample(c, rate) + write_span);
      for (std::int64_t i = lo; i < hi; ++i) {
        const double dt = static_cast<double>(i) / rate - c;
        inj.addend.data(ecg, i) +=
            cfg.ecg_peak_uv * bump.amp * std::exp(-dt * dt / (2.0 * bump.width * bump.width));
      }
    }

    // Per-beat jitters are shared across channels.
    const double amp = 1.0 + cfg.amp_jitter * (2.0 * rng.uniform() - 1.0);
    const double lat = cfg.latency_jitter_s * (2.0 * rng.uniform() - 1.0);
    const std::int64_t start = r_sample + at_sample(cfg.delay_s + lat, rate);
    const std::int64_t len = std::min<std::int64_t>(bcg.size(), n - start);
    if (start < 0 || len <= 0) continue;
    for (size_t k = 0; k < eeg_idx.size(); ++k) {
      inj.addend.data.row(eeg_idx[k]).segment(start, len) +=
          cfg.bcg_peak_uv * gains[k] * amp * bcg.head(len).transpose();
    }
  }

  inj.contaminated = rec;
  inj.contaminated.data += inj.addend.data;
  return inj;
}

// ---------------------------------------------------------------------------
// Myogenic + ocular
// ---------------------------------------------------------------------------

MyogenicInjection add_myogenic_ocular(const Recording& rec, const MyogenicConfig& cfg) {
  const auto eeg_idx = channels_of(rec, Modality::EEG);
  const auto eog_idx = channels_of(rec, Modality::EOG);
  const auto emg_idx = channels_of(rec, Modality::EMG);
  if (eeg_idx.empty()) throw DataError("no EEG channels to contaminate");

  Eigen::MatrixXd mixing = cfg.eeg_mixing;
  if (mixing.size() == 0) {
    mixing.resize(static_cast<Eigen::Index>(eeg_idx.size()), 3);
    if (eeg_idx.size() == kEegNames.size()) {
      for (size_t ch = 0; ch < eeg_idx.size(); ++ch) {
        mixing(static_cast<Eigen::Index>(ch), 0) = kEmgPattern[ch];
        mixing(static_cast<Eigen::Index>(ch), 1) = kBlinkPattern[ch];
        mixing(static_cast<Eigen::Index>(ch), 2) = kSaccadePattern[ch];
      }
      // Artifact topographies are peripheral dipoles; keep them out of the
      // span of the diffuse background fields (norms preserved).
      for (Eigen::Index c = 0; c < mixing.cols(); ++c) {
        const double norm0 = mixing.col(c).norm();
        for (const auto& pattern : kFieldPatterns) {
          Eigen::VectorXd f =
              Eigen::Map<const Eigen::VectorXd>(pattern.data(),
                                                static_cast<Eigen::Index>(pattern.size()));
          f.normalize();
          mixing.col(c) -= f.dot(mixing.col(c)) * f;
        }
        const double norm1 = mixing.col(c).norm();
        if (norm1 > 0.0) mixing.col(c) *= norm0 / norm1;
      }
    } else {
      mixing.setConstant(0.5);
    }
  }
  if (mixing.rows() != static_cast<Eigen::Index>(eeg_idx.size()) || mixing.cols() != 3)
    throw ConfigError("myogenic mixing must be n_eeg x 3");

  const std::int64_t n = rec.n_samples();
  const double rate = rec.rate_hz;
  detail::Rng rng(cfg.seed);

  MyogenicInjection inj;
  inj.eeg_mixing = mixing;
  inj.sources = Eigen::MatrixXd::Zero(3, n);
  inj.addend = rec;
  inj.addend.data.setZero();
  inj.addend.markers.clear();

  // --- EMG source: band-limited noise gated around GO markers, plus a
  // repeatable burst waveform that is identical across trials.
  const MarkerList go_markers = markers_with_label(rec.markers, "GO");
  const auto burst_len = std::max<std::int64_t>(1, at_sample(cfg.burst_duration_s, rate));
  const auto ramp = std::max<std::int64_t>(1, at_sample(0.1, rate));
  {
    const double hi = std::min(cfg.emg_band_hi_hz, 0.45 * rate);
    const double lo = std::min(cfg.emg_band_lo_hz, hi * 0.5);
    const IirCoeffs lp_hi = butterworth_lowpass(4, hi, rate);
    const IirCoeffs lp_lo = butterworth_lowpass(4, lo, rate);

    std::vector<double> white(static_cast<size_t>(n));
    for (auto& v : white) v = rng.normal();
    const std::vector<double> upper = filtfilt(lp_hi, white);
    const std::vector<double> lower = filtfilt(lp_lo, white);
    std::vector<double> band(static_cast<size_t>(n));
    double sq = 0.0;
    for (size_t i = 0; i < band.size(); ++i) {
      band[i] = upper[i] - lower[i];
      sq += band[i] * band[i];
    }
    const double band_rms = std::sqrt(sq / static_cast<double>(band.size()));

    // Trial-locked burst: one fixed band-limited realization reused per GO.
    std::vector<double> motif_white(static_cast<size_t>(burst_len + 4 * ramp));
    detail::Rng motif_rng(detail::splitmix64(cfg.seed ^ 0x6d6f7469ULL));
    for (auto& v : motif_white) v = motif_rng.normal();
    const std::vector<double> motif_hi = filtfilt(lp_hi, motif_white);
    const std::vector<double> motif_lo = filtfilt(lp_lo, motif_white);
    std::vector<double> motif(static_cast<size_t>(burst_len));
    double msq = 0.0;
    for (std::int64_t i = 0; i < burst_len; ++i) {
      motif[static_cast<size_t>(i)] =
          motif_hi[static_cast<size_t>(i + 2 * ramp)] - motif_lo[static_cast<size_t>(i + 2 * ramp)];
      msq += motif[static_cast<size_t>(i)] * motif[static_cast<size_t>(i)];
    }
    const double motif_rms = std::sqrt(msq / static_cast<double>(burst_len));

    for (const Marker& go : go_markers) {
      const std::int64_t start = go.sample + at_sample(cfg.burst_offset_s, rate);
      inj.events.push_back({std::max<std::int64_t>(0, start), "EMG_BURST"});
      for (std::int64_t i = 0; i < burst_len; ++i) {
        const std::int64_t s = start + i;
        if (s < 0 || s >= n) continue;
        const double env = envelope_at(i, burst_len, ramp);
        double v = 0.0;
        if (band_rms > 0.0) v += cfg.emg_noise_uv * band[static_cast<size_t>(s)] / band_rms;
        if (motif_rms > 0.0)
          v += cfg.emg_locked_uv * motif[static_cast<size_t>(i)] / motif_rms;
        inj.sources(0, s) += env * v;
      }
    }
  }

  // --- Blink source: random blinks plus stimulus-locked blinks.
  const auto blink_len = std::max<std::int64_t>(1, at_sample(cfg.blink_duration_s, rate));
  const auto add_blink = [&](std::int64_t center) {
    const std::int64_t start = center - blink_len / 2;
    for (std::int64_t i = 0; i < blink_len; ++i) {
      const std::int64_t s = start + i;
      if (s < 0 || s >= n) continue;
      const double ph = std::numbers::pi * static_cast<double>(i) / static_cast<double>(blink_len);
      inj.sources(1, s) += cfg.blink_amp_uv * std::sin(ph) * std::sin(ph);
    }
    inj.events.push_back({std::max<std::int64_t>(0, std::min(center, n - 1)), "BLINK"});
  };
  if (cfg.blink_rate_hz > 0.0) {
    double t = 1.0;
    while (true) {
      t += -std::log(1.0 - rng.uniform()) / cfg.blink_rate_hz + cfg.blink_duration_s;
      if (t >= rec.duration_s() - 1.0) break;
      add_blink(at_sample(t, rate));
    }
  }
  for (const Marker& stim : markers_with_label(rec.markers, "STIM")) {
    if (rng.uniform() >= cfg.blink_stim_locked_prob) continue;
    const double latency =
        cfg.blink_stim_latency_s + cfg.blink_stim_jitter_s * (2.0 * rng.uniform() - 1.0);
    add_blink(stim.sample + at_sample(latency, rate));
  }

  // --- Saccade source: gaze-shift plateau at stimulus onset, random sign.
  const auto sac_len = std::max<std::int64_t>(1, at_sample(cfg.saccade_duration_s, rate));
  const auto sac_ramp = std::max<std::int64_t>(1, at_sample(0.05, rate));
  for (const Marker& stim : markers_with_label(rec.markers, "STIM")) {
    const double latency =
        cfg.saccade_latency_s + cfg.saccade_jitter_s * (2.0 * rng.uniform() - 1.0);
    const std::int64_t start = stim.sample + at_sample(latency, rate);
    const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
    inj.events.push_back({std::max<std::int64_t>(0, std::min(start, n - 1)), "SACCADE"});
    for (std::int64_t i = 0; i < sac_len; ++i) {
      const std::int64_t s = start + i;
      if (s < 0 || s >= n) continue;
      inj.sources(2, s) += sign * cfg.saccade_amp_uv * envelope_at(i, sac_len, sac_ramp);
    }
  }
  sort_markers(inj.events);

  // --- Reference channels observe the sources plus sensor noise.
  const double emg_ref_gains[] = {1.0, 0.8, 0.6};
  const double blink_ref_gains[] = {1.0, 0.85};
  const double saccade_ref_gains[] = {0.6, -0.9};
  for (size_t k = 0; k < emg_idx.size(); ++k) {
    auto row = inj.addend.data.row(emg_idx[k]);
    row = emg_ref_gains[k % 3] * inj.sources.row(0);
    for (Eigen::Index i = 0; i < n; ++i) row(i) += cfg.ref_noise_uv * rng.normal();
  }
  for (size_t k = 0; k < eog_idx.size(); ++k) {
    auto row = inj.addend.data.row(eog_idx[k]);
    row = blink_ref_gains[k % 2] * inj.sources.row(1) +
          saccade_ref_gains[k % 2] * inj.sources.row(2);
    for (Eigen::Index i = 0; i < n; ++i) row(i) += cfg.ref_noise_uv * rng.normal();
  }

  // --- Mix the sources into the EEG channels.
  for (size_t ch = 0; ch < eeg_idx.size(); ++ch) {
    inj.addend.data.row(eeg_idx[ch]) +=
        mixing.row(static_cast<Eigen::Index>(ch)) * inj.sources;
  }

  inj.contaminated = rec;
  inj.contaminated.data += inj.addend.data;
  return inj;
}

// ---------------------------------------------------------------------------
// Full session
// ---------------------------------------------------------------------------

SessionTruth generate_session(const SessionConfig& cfg) {
  const ProtocolTimeline protocol = generate_protocol(cfg.protocol, cfg.rate_hz);

  CleanEegConfig eeg_cfg = cfg.eeg;
  eeg_cfg.seed = derive_seed(cfg.seed, cfg.eeg.seed, kEegSalt);
  SessionTruth truth;
  truth.clean_eeg = synth_clean_eeg(protocol, eeg_cfg);

  // Full montage baseline: clean EEG, silent reference and ECG channels.
  truth.base.rate_hz = cfg.rate_hz;
  truth.base.channels = default_montage();
  truth.base.markers = protocol.markers;
  truth.base.data =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(truth.base.channels.size()),
                            protocol.n_samples);
  truth.base.data.topRows(truth.clean_eeg.n_channels()) = truth.clean_eeg.data;

  truth.true_onsets = protocol.markers;

  Recording current = truth.base;

  if (cfg.myogenic.enabled) {
    MyogenicConfig myo_cfg = cfg.myogenic;
    myo_cfg.seed = derive_seed(cfg.seed, cfg.myogenic.seed, kMyoSalt);
    MyogenicInjection myo = add_myogenic_ocular(current, myo_cfg);
    truth.myo_addend = std::move(myo.addend);
    truth.mixing_truth = std::move(myo.eeg_mixing);
    truth.true_onsets.insert(truth.true_onsets.end(), myo.events.begin(), myo.events.end());
    current = std::move(myo.contaminated);
  } else {
    truth.myo_addend = truth.base;
    truth.myo_addend.data.setZero();
    truth.myo_addend.markers.clear();
  }

  if (cfg.cardiac.enabled) {
    CardiacConfig card_cfg = cfg.cardiac;
    card_cfg.seed = derive_seed(cfg.seed, cfg.cardiac.seed, kCardiacSalt);
    CardiacInjection card = synth_ecg_and_bcg(current, card_cfg);
    truth.cardiac_addend = std::move(card.addend);
    truth.true_onsets.insert(truth.true_onsets.end(), card.r_peaks.begin(), card.r_peaks.end());
    current = std::move(card.contaminated);
  } else {
    truth.cardiac_addend = truth.base;
    truth.cardiac_addend.data.setZero();
    truth.cardiac_addend.markers.clear();
  }

  if (cfg.gradient.enabled) {
    GradientInjection ga = add_gradient_artifact(current, cfg.gradient);
    truth.ga_addend = std::move(ga.addend);
    truth.true_onsets.insert(truth.true_onsets.end(), ga.onsets.begin(), ga.onsets.end());
    current = std::move(ga.contaminated);
  } else {
    truth.ga_addend = truth.base;
    truth.ga_addend.data.setZero();
    truth.ga_addend.markers.clear();
  }

  sort_markers(truth.true_onsets);
  truth.contaminated = std::move(current);
  return truth;
}

}  // namespace trio
