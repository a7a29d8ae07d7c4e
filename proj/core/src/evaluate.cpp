#include "trio/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft_utils.hpp"
#include "trio/errors.hpp"

namespace trio {

namespace {

constexpr double kAttenuationCapDb = 120.0;

double clamp_db(double db) {
  return std::clamp(db, -kAttenuationCapDb, kAttenuationCapDb);
}

double ratio_db(double p_before, double p_after) {
  if (p_before <= 0.0 && p_after <= 0.0) return 0.0;
  if (p_after <= 0.0) return kAttenuationCapDb;
  if (p_before <= 0.0) return -kAttenuationCapDb;
  return clamp_db(10.0 * std::log10(p_before / p_after));
}

void require_same_shape(const Recording& a, const Recording& b) {
  if (a.n_channels() != b.n_channels() || a.n_samples() != b.n_samples())
    throw DataError("recording shape mismatch");
}

}  // namespace

EpochSet epoch(const Recording& rec, const MarkerList& markers, double pre_s,
               double post_s) {
  if (pre_s < 0.0 || post_s < 0.0) throw ConfigError("epoch window must be non-negative");
  const auto pre = static_cast<std::int64_t>(std::llround(pre_s * rec.rate_hz));
  const auto post = static_cast<std::int64_t>(std::llround(post_s * rec.rate_hz));
  const std::int64_t len = pre + post;
  if (len <= 0) throw ConfigError("epoch window is empty");

  EpochSet set;
  set.pre_s = pre_s;
  set.post_s = post_s;
  set.rate_hz = rec.rate_hz;
  for (const Marker& m : markers) {
    const std::int64_t start = m.sample - pre;
    if (start < 0 || start + len > rec.n_samples()) {
      ++set.n_dropped;
      continue;
    }
    set.trials.push_back(rec.data.middleCols(start, len));
    set.trial_labels.push_back(m.label);
  }
  if (set.trials.empty()) throw DataError("no usable trials for epoching");
  return set;
}

EpochSet epoch(const Recording& rec, std::string_view label_key, double pre_s,
               double post_s) {
  return epoch(rec, markers_with_label(rec.markers, label_key), pre_s, post_s);
}

Eigen::MatrixXd average_erp(const EpochSet& epochs,
                            std::optional<std::pair<double, double>> baseline) {
  if (epochs.trials.empty()) throw DataError("empty epoch set");
  const Eigen::Index n_ch = epochs.trials.front().rows();
  const Eigen::Index n_s = epochs.trials.front().cols();

  Eigen::Index b0 = 0, b1 = 0;
  if (baseline) {
    const auto [start_s, end_s] = *baseline;
    b0 = static_cast<Eigen::Index>(std::llround((start_s + epochs.pre_s) * epochs.rate_hz));
    b1 = static_cast<Eigen::Index>(std::llround((end_s + epochs.pre_s) * epochs.rate_hz));
    if (b0 < 0 || b1 > n_s || b1 <= b0) throw ConfigError("baseline outside epoch window");
  }

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_ch, n_s);
  for (const Eigen::MatrixXd& trial : epochs.trials) {
    if (trial.rows() != n_ch || trial.cols() != n_s)
      throw DataError("inconsistent trial shape in epoch set");
    if (baseline) {
      const Eigen::VectorXd means = trial.middleCols(b0, b1 - b0).rowwise().mean();
      sum += trial.colwise() - means;
    } else {
      sum += trial;
    }
  }
  return sum / static_cast<double>(epochs.trials.size());
}

ChannelCorrelation erp_channel_correlation(const Eigen::MatrixXd& erp_a,
                                           const Eigen::MatrixXd& erp_b) {
  if (erp_a.rows() != erp_b.rows() || erp_a.cols() != erp_b.cols())
    throw DataError("ERP shape mismatch");

  ChannelCorrelation out;
  out.r.resize(static_cast<size_t>(erp_a.rows()),
               std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0, sum_sq = 0.0;
  for (Eigen::Index ch = 0; ch < erp_a.rows(); ++ch) {
    const Eigen::RowVectorXd a = erp_a.row(ch).array() - erp_a.row(ch).mean();
    const Eigen::RowVectorXd b = erp_b.row(ch).array() - erp_b.row(ch).mean();
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) continue;  // undefined, reported as missing
    const double r = a.dot(b) / (na * nb);
    out.r[static_cast<size_t>(ch)] = r;
    sum += r;
    sum_sq += r * r;
    ++out.n_used;
  }
  if (out.n_used > 0) {
    out.mean = sum / static_cast<double>(out.n_used);
    if (out.n_used > 1) {
      const double var =
          (sum_sq - sum * sum / static_cast<double>(out.n_used)) /
          static_cast<double>(out.n_used - 1);
      out.sd = std::sqrt(std::max(0.0, var));
    }
  }
  return out;
}

Spectrum magnitude_spectrum(const Eigen::VectorXd& series, double rate_hz, int n_fft,
                            SpectrumWindow window) {
  if (n_fft < 16) throw ConfigError("n_fft must be at least 16");
  if (series.size() < n_fft) throw DataError("series shorter than n_fft");
  if (!(rate_hz > 0.0)) throw ConfigError("rate must be positive");

  const auto n = static_cast<std::size_t>(n_fft);
  std::vector<double> win(n);
  double win_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n));
    win_sum += win[i];
  }

  const std::int64_t hop = n_fft / 2;
  const std::int64_t n_segments = 1 + (series.size() - n_fft) / hop;

  const std::size_t n_bins = n / 2 + 1;
  std::vector<double> power(n_bins, 0.0);
  std::vector<double> seg(n);
  for (std::int64_t s = 0; s < n_segments; ++s) {
    const std::int64_t off = s * hop;
    for (std::size_t i = 0; i < n; ++i)
      seg[i] = series[off + static_cast<std::int64_t>(i)] * win[i];
    const auto bins = detail::real_fft(seg);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double scale = (k == 0 || (n % 2 == 0 && k == n_bins - 1)) ? 1.0 : 2.0;
      const double amp = std::abs(bins[k]) * scale / win_sum;
      power[k] += amp * amp;
    }
  }

  Spectrum spec;
  spec.window = window;
  spec.n_fft = n_fft;
  spec.freqs_hz.resize(n_bins);
  spec.magnitude.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    spec.freqs_hz[k] = rate_hz * static_cast<double>(k) / static_cast<double>(n);
    spec.magnitude[k] = std::sqrt(power[k] / static_cast<double>(n_segments));
  }
  return spec;
}

Spectrum magnitude_spectrum(const Recording& rec, Eigen::Index channel, int n_fft,
                            SpectrumWindow window) {
  if (channel < 0 || channel >= rec.n_channels()) throw DataError("channel out of range");
  return magnitude_spectrum(rec.data.row(channel).transpose(), rec.rate_hz, n_fft, window);
}

double harmonic_power(const Spectrum& spec, double f0_hz, int n_harmonics) {
  if (!(f0_hz > 0.0) || n_harmonics < 1) throw ConfigError("invalid harmonic band request");
  if (spec.freqs_hz.size() < 2) throw ConfigError("spectrum too short");
  const double df = spec.freqs_hz[1] - spec.freqs_hz[0];
  const double nyquist = spec.freqs_hz.back();
  if (f0_hz * n_harmonics >= nyquist) throw ConfigError("harmonic band out of range");

  double total = 0.0;
  for (int k = 1; k <= n_harmonics; ++k) {
    const auto center = static_cast<std::int64_t>(std::llround(k * f0_hz / df));
    if (center + 1 >= static_cast<std::int64_t>(spec.magnitude.size()))
      throw ConfigError("harmonic band out of range");
    for (std::int64_t b = center - 1; b <= center + 1; ++b) {
      if (b < 0) continue;
      total += spec.magnitude[static_cast<std::size_t>(b)] *
               spec.magnitude[static_cast<std::size_t>(b)];
    }
  }
  return total;
}

std::vector<double> artifact_attenuation(const Recording& before, const Recording& after,
                                         const HarmonicBandSpec& band) {
  require_same_shape(before, after);
  std::vector<double> db(static_cast<size_t>(before.n_channels()));
  for (Eigen::Index ch = 0; ch < before.n_channels(); ++ch) {
    const double pb = harmonic_power(magnitude_spectrum(before, ch, band.n_fft),
                                     band.f0_hz, band.n_harmonics);
    const double pa = harmonic_power(magnitude_spectrum(after, ch, band.n_fft),
                                     band.f0_hz, band.n_harmonics);
    db[static_cast<size_t>(ch)] = ratio_db(pb, pa);
  }
  return db;
}

Eigen::VectorXd locked_average(const Recording& rec, Eigen::Index channel,
                               const MarkerList& events, double pre_s, double post_s) {
  if (channel < 0 || channel >= rec.n_channels()) throw DataError("channel out of range");
  const auto pre = static_cast<std::int64_t>(std::llround(pre_s * rec.rate_hz));
  const auto post = static_cast<std::int64_t>(std::llround(post_s * rec.rate_hz));
  const std::int64_t len = pre + post;
  if (len <= 0) throw ConfigError("locked-average window is empty");

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(len);
  std::int64_t used = 0;
  for (const Marker& m : events) {
    const std::int64_t start = m.sample - pre;
    if (start < 0 || start + len > rec.n_samples()) continue;
    sum += rec.data.row(channel).segment(start, len).transpose();
    ++used;
  }
  if (used == 0) throw DataError("no event window fits the recording");
  return sum / static_cast<double>(used);
}

std::vector<double> artifact_attenuation(const Recording& before, const Recording& after,
                                         const CardiacLockedSpec& locked) {
  require_same_shape(before, after);
  std::vector<double> db(static_cast<size_t>(before.n_channels()));
  for (Eigen::Index ch = 0; ch < before.n_channels(); ++ch) {
    const Eigen::VectorXd avg_b =
        locked_average(before, ch, locked.peaks, locked.pre_s, locked.post_s);
    const Eigen::VectorXd avg_a =
        locked_average(after, ch, locked.peaks, locked.pre_s, locked.post_s);
    db[static_cast<size_t>(ch)] =
        ratio_db(avg_b.squaredNorm() / avg_b.size(), avg_a.squaredNorm() / avg_a.size());
  }
  return db;
}

std::vector<double> artifact_attenuation(const Recording& before, const Recording& after,
                                         const Recording& truth) {
  require_same_shape(before, after);
  require_same_shape(before, truth);
  std::vector<double> db(static_cast<size_t>(before.n_channels()));
  for (Eigen::Index ch = 0; ch < before.n_channels(); ++ch) {
    const double pb = (before.data.row(ch) - truth.data.row(ch)).squaredNorm();
    const double pa = (after.data.row(ch) - truth.data.row(ch)).squaredNorm();
    db[static_cast<size_t>(ch)] = ratio_db(pb, pa);
  }
  return db;
}

DriftEstimate estimate_drift(std::int64_t mri_frames, double frame_period_s,
                             double eeg_trigger_span_s) {
  if (mri_frames <= 0 || !(frame_period_s > 0.0))
    throw ConfigError("frame count and period must be positive");
  if (!(eeg_trigger_span_s > 0.0)) throw ConfigError("zero span");

  const double mri_duration = static_cast<double>(mri_frames) * frame_period_s;
  DriftEstimate est;
  est.ms_per_s = std::abs(mri_duration - eeg_trigger_span_s) / mri_duration * 1000.0;
  est.flag_threshold_ms_per_s = frame_period_s * 1000.0;
  est.flagged = est.ms_per_s > est.flag_threshold_ms_per_s;
  return est;
}

double roi_snr(const Eigen::MatrixXd& image,
               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& roi_mask,
               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& noise_mask) {
  if (roi_mask.rows() != image.rows() || roi_mask.cols() != image.cols() ||
      noise_mask.rows() != image.rows() || noise_mask.cols() != image.cols())
    throw ConfigError("mask shape mismatch");

  double roi_sum = 0.0;
  std::int64_t roi_n = 0;
  double noise_sum = 0.0, noise_sq = 0.0;
  std::int64_t noise_n = 0;
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      if (roi_mask(r, c) && noise_mask(r, c)) throw ConfigError("roi and noise masks overlap");
      if (roi_mask(r, c)) {
        roi_sum += image(r, c);
        ++roi_n;
      }
      if (noise_mask(r, c)) {
        noise_sum += image(r, c);
        noise_sq += image(r, c) * image(r, c);
        ++noise_n;
      }
    }
  }
  if (roi_n == 0 || noise_n == 0) throw ConfigError("empty mask");
  if (noise_n < 2) throw ConfigError("noise mask too small");

  const double noise_var =
      (noise_sq - noise_sum * noise_sum / static_cast<double>(noise_n)) /
      static_cast<double>(noise_n - 1);
  const double sigma = std::sqrt(std::max(0.0, noise_var));
  if (sigma == 0.0) throw NumericError("zero noise deviation");
  return (roi_sum / static_cast<double>(roi_n)) / sigma;
}

}  // namespace trio
