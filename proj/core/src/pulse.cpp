#include "trio/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trio/errors.hpp"
#include "trio/filters.hpp"
#include "trio/parallel.hpp"

namespace trio {

namespace {

constexpr double kEcgLowpassHz = 15.0;
constexpr double kRefractoryS = 0.3;
constexpr double kThresholdFraction = 0.6;
constexpr double kPercentile = 0.98;
constexpr double kPercentileWindowS = 10.0;
constexpr double kRrDeviation = 0.25;
constexpr double kLowAmplitudeFraction = 0.4;

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lo);
  }
  return m;
}

Eigen::Index find_single_ecg(const Recording& rec) {
  Eigen::Index ecg = -1;
  for (Eigen::Index ch = 0; ch < rec.n_channels(); ++ch) {
    if (rec.channels[static_cast<size_t>(ch)].modality == Modality::ECG) {
      if (ecg >= 0) throw DataError("more than one ECG channel");
      ecg = ch;
    }
  }
  if (ecg < 0) throw DataError("no ECG channel");
  return ecg;
}

// Stepwise running percentile: one value per hop block, window centered.
std::vector<double> running_percentile(const std::vector<double>& x, double rate_hz,
                                       double window_s, double q, double hop_s) {
  const auto n = static_cast<std::int64_t>(x.size());
  const auto hop = std::max<std::int64_t>(1, std::llround(hop_s * rate_hz));
  const auto half = std::max<std::int64_t>(1, std::llround(window_s * rate_hz / 2.0));
  const std::int64_t blocks = (n + hop - 1) / hop;

  std::vector<double> out(static_cast<size_t>(blocks));
  std::vector<double> buf;
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::int64_t center = b * hop + hop / 2;
    const std::int64_t lo = std::max<std::int64_t>(0, center - half);
    const std::int64_t hi = std::min<std::int64_t>(n, center + half);
    buf.assign(x.begin() + lo, x.begin() + hi);
    const auto k = static_cast<size_t>(q * static_cast<double>(buf.size() - 1));
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k), buf.end());
    out[static_cast<size_t>(b)] = buf[k];
  }
  return out;
}

}  // namespace

std::string to_string(SuspectReason r) {
  switch (r) {
    case SuspectReason::RrTooShort: return "RR_TOO_SHORT";
    case SuspectReason::RrTooLong: return "RR_TOO_LONG";
    case SuspectReason::LowAmplitude: return "LOW_AMPLITUDE";
  }
  return "UNKNOWN";
}

RPeakReport detect_r_peaks(const Recording& rec) {
  const Eigen::Index ecg = find_single_ecg(rec);
  if (rec.duration_s() < 5.0) throw DataError("recording shorter than 5 s");

  const IirCoeffs lp = butterworth_lowpass(4, kEcgLowpassHz, rec.rate_hz);
  std::vector<double> raw(rec.data.row(ecg).begin(), rec.data.row(ecg).end());
  const std::vector<double> f = filtfilt(lp, raw);
  const auto n = static_cast<std::int64_t>(f.size());

  const auto hop_s = 2.5;
  const std::vector<double> pct =
      running_percentile(f, rec.rate_hz, kPercentileWindowS, kPercentile, hop_s);
  const auto hop = std::max<std::int64_t>(1, std::llround(hop_s * rec.rate_hz));
  const auto thr_at = [&](std::int64_t i) {
    const auto b = std::min<std::int64_t>(i / hop, static_cast<std::int64_t>(pct.size()) - 1);
    return kThresholdFraction * pct[static_cast<size_t>(b)];
  };

  const auto refractory = static_cast<std::int64_t>(std::llround(kRefractoryS * rec.rate_hz));
  std::vector<std::int64_t> peaks;
  for (std::int64_t i = 1; i + 1 < n; ++i) {
    const double v = f[static_cast<size_t>(i)];
    const double thr = thr_at(i);
    if (!(v > thr) || !(v > 0.0)) continue;
    if (v < f[static_cast<size_t>(i) - 1] || v <= f[static_cast<size_t>(i) + 1]) continue;
    if (!peaks.empty() && i - peaks.back() < refractory) {
      if (v > f[static_cast<size_t>(peaks.back())]) peaks.back() = i;
      continue;
    }
    peaks.push_back(i);
  }
  if (peaks.empty()) throw DataError("zero peaks found");

  RPeakReport report;
  report.peaks.reserve(peaks.size());
  for (std::int64_t p : peaks) report.peaks.push_back({p, "R_PEAK"});

  std::vector<double> rr(peaks.size() > 1 ? peaks.size() - 1 : 0);
  for (size_t i = 1; i < peaks.size(); ++i)
    rr[i - 1] = static_cast<double>(peaks[i] - peaks[i - 1]) / rec.rate_hz;
  report.rr_median_s = median_of(rr);

  // Interval suspects: RR deviating >25% from the median of its neighborhood.
  for (size_t i = 0; i < rr.size(); ++i) {
    const size_t lo = i >= 4 ? i - 4 : 0;
    const size_t hi = std::min(rr.size(), i + 5);
    const double local = median_of({rr.begin() + static_cast<std::ptrdiff_t>(lo),
                                    rr.begin() + static_cast<std::ptrdiff_t>(hi)});
    if (rr[i] > (1.0 + kRrDeviation) * local)
      report.suspects.push_back({i + 1, SuspectReason::RrTooLong});
    else if (rr[i] < (1.0 - kRrDeviation) * local)
      report.suspects.push_back({i + 1, SuspectReason::RrTooShort});
  }

  std::vector<double> amps(peaks.size());
  for (size_t i = 0; i < peaks.size(); ++i) amps[i] = f[static_cast<size_t>(peaks[i])];
  const double med_amp = median_of(amps);
  for (size_t i = 0; i < peaks.size(); ++i) {
    if (amps[i] < kLowAmplitudeFraction * med_amp)
      report.suspects.push_back({i, SuspectReason::LowAmplitude});
  }
  return report;
}

void BcgParams::validate() const {
  if (!(delay_s >= 0.0)) throw ConfigError("delay_s must be non-negative");
  if (!(span_fraction > 0.0) || span_fraction > 1.5)
    throw ConfigError("span exceeds median RR x 1.5");
  if (window_beats < 3 || window_beats % 2 == 0)
    throw ConfigError("window_beats must be odd and >= 3");
}

BcgCorrection subtract_pulse_artifact(const Recording& rec, const MarkerList& peaks,
                                      const BcgParams& params) {
  params.validate();
  if (peaks.size() < 3) throw DataError("fewer than 3 R-peaks");

  const auto n_beats = static_cast<std::int64_t>(peaks.size());
  std::vector<double> rr(peaks.size() - 1);
  for (size_t i = 1; i < peaks.size(); ++i) {
    const auto gap = peaks[i].sample - peaks[i - 1].sample;
    if (gap <= 0) throw DataError("R-peaks not strictly increasing");
    rr[i - 1] = static_cast<double>(gap);
  }
  const double median_rr = median_of(rr);
  const auto span = std::max<std::int64_t>(
      1, std::llround(params.span_fraction * median_rr));
  const auto delay = static_cast<std::int64_t>(std::llround(params.delay_s * rec.rate_hz));
  const std::int64_t n = rec.n_samples();

  // Segment starts and per-beat write extents (truncated at the next
  // segment's start and the end of the recording).
  std::vector<std::int64_t> seg_start(peaks.size());
  for (size_t b = 0; b < peaks.size(); ++b) seg_start[b] = peaks[b].sample + delay;
  std::vector<std::int64_t> extent(peaks.size());
  std::vector<std::int64_t> full;  // beats with the full span in range
  for (std::int64_t b = 0; b < n_beats; ++b) {
    std::int64_t len = std::min<std::int64_t>(span, n - seg_start[static_cast<size_t>(b)]);
    if (b + 1 < n_beats)
      len = std::min(len, seg_start[static_cast<size_t>(b) + 1] - seg_start[static_cast<size_t>(b)]);
    extent[static_cast<size_t>(b)] = std::max<std::int64_t>(0, len);
    if (seg_start[static_cast<size_t>(b)] >= 0 &&
        seg_start[static_cast<size_t>(b)] + span <= n)
      full.push_back(b);
  }
  if (full.size() < 2) throw DataError("not enough beats with a full segment in range");

  const int half = params.window_beats / 2;
  const Eigen::Index ecg = [&] {
    for (Eigen::Index ch = 0; ch < rec.n_channels(); ++ch)
      if (rec.channels[static_cast<size_t>(ch)].modality == Modality::ECG) return ch;
    return Eigen::Index{-1};
  }();

  std::vector<Eigen::Index> targets;
  for (Eigen::Index ch = 0; ch < rec.n_channels(); ++ch) {
    if (ch == ecg) continue;  // timing reference, never modified
    if (params.channels.matches(rec.channels[static_cast<size_t>(ch)])) targets.push_back(ch);
  }

  BcgCorrection result;
  result.corrected = rec;
  result.artifact = rec;
  result.artifact.data.setZero();
  result.span_samples = span;

  const auto n_full = static_cast<std::int64_t>(full.size());
  parallel_for(static_cast<std::int64_t>(targets.size()), [&](std::int64_t t) {
    const Eigen::Index ch = targets[static_cast<size_t>(t)];

    Eigen::MatrixXd segs(n_full, span);
    for (std::int64_t k = 0; k < n_full; ++k) {
      const auto seg =
          rec.data.row(ch).segment(seg_start[static_cast<size_t>(full[static_cast<size_t>(k)])], span);
      segs.row(k) = seg.array() - seg.mean();
    }

    // Map each beat to its position among full beats (nearest not after it).
    std::vector<std::int64_t> full_pos(peaks.size(), 0);
    {
      std::int64_t k = 0;
      for (std::int64_t b = 0; b < n_beats; ++b) {
        while (k + 1 < n_full && full[static_cast<size_t>(k) + 1] <= b) ++k;
        full_pos[static_cast<size_t>(b)] = k;
      }
    }

    Eigen::VectorXd window_sum = Eigen::VectorXd::Zero(span);
    std::int64_t win_lo = 0, win_hi = -1;
    Eigen::VectorXd tmpl(span);

    for (std::int64_t b = 0; b < n_beats; ++b) {
      const std::int64_t center = full_pos[static_cast<size_t>(b)];
      const std::int64_t want_lo = std::max<std::int64_t>(0, center - half);
      const std::int64_t want_hi = std::min<std::int64_t>(n_full - 1, center + half);

      if (params.use_median) {
        const std::int64_t w = want_hi - want_lo + 1;
        std::vector<double> col(static_cast<size_t>(w));
        for (std::int64_t t2 = 0; t2 < span; ++t2) {
          for (std::int64_t k = 0; k < w; ++k) col[static_cast<size_t>(k)] = segs(want_lo + k, t2);
          tmpl(t2) = median_of(col);
        }
      } else {
        while (win_hi < want_hi) window_sum += segs.row(++win_hi).transpose();
        while (win_lo < want_lo) window_sum -= segs.row(win_lo++).transpose();
        tmpl = window_sum / static_cast<double>(want_hi - want_lo + 1);
      }

      const std::int64_t start = seg_start[static_cast<size_t>(b)];
      for (std::int64_t t2 = 0; t2 < extent[static_cast<size_t>(b)]; ++t2) {
        if (start + t2 < 0) continue;
        result.artifact.data(ch, start + t2) = tmpl(t2);
        result.corrected.data(ch, start + t2) -= tmpl(t2);
      }
    }
  });

  return result;
}

}  // namespace trio
