#include "trio/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fft_utils.hpp"
#include "trio/errors.hpp"
#include "trio/parallel.hpp"

namespace trio {

namespace {

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

double percentile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const auto k = static_cast<size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

Eigen::Index pick_detection_channel(const Recording& rec, const GaParams& params) {
  if (params.detection_channel != "auto") return rec.channel_index(params.detection_channel);
  Eigen::Index best = 0;
  double best_score = -1.0;
  for (Eigen::Index ch = 0; ch < rec.n_channels(); ++ch) {
    std::vector<double> diffs(static_cast<size_t>(rec.n_samples() - 1));
    for (Eigen::Index i = 0; i + 1 < rec.n_samples(); ++i)
      diffs[static_cast<size_t>(i)] = std::abs(rec.data(ch, i + 1) - rec.data(ch, i));
    const double score = percentile_of(std::move(diffs), 0.99);
    if (score > best_score) {
      best_score = score;
      best = ch;
    }
  }
  return best;
}

// Dominant spacing of the crossing train, from its autocorrelation peak.
std::int64_t estimate_period(const std::vector<std::int64_t>& candidates,
                             std::int64_t n_samples) {
  if (candidates.size() < 2) return 0;
  std::vector<double> train(static_cast<size_t>(n_samples), 0.0);
  for (std::int64_t c : candidates) train[static_cast<size_t>(c)] = 1.0;
  const auto max_lag = static_cast<std::size_t>(n_samples / 2);
  const std::vector<double> ac = detail::autocorrelation(train, max_lag);

  std::int64_t best = 0;
  double best_val = 0.0;
  for (std::size_t lag = 5; lag < ac.size(); ++lag) {
    if (ac[lag] > best_val) {
      best_val = ac[lag];
      best = static_cast<std::int64_t>(lag);
    }
  }
  return best;
}

}  // namespace

void GaParams::validate() const {
  if (window_reps < 3 || window_reps % 2 == 0)
    throw ConfigError("window_reps must be odd and >= 3");
  if (!(threshold_factor > 0.0)) throw ConfigError("threshold_factor must be positive");
  if (align_search < 0) throw ConfigError("align_search must be non-negative");
  if (expected_period_s && !(*expected_period_s > 0.0))
    throw ConfigError("expected_period_s must be positive");
}

MarkerList detect_gradient_onsets(const Recording& rec, const GaParams& params) {
  params.validate();
  if (rec.n_samples() < 3) return {};
  const Eigen::Index ch = pick_detection_channel(rec, params);

  const Eigen::Index n = rec.n_samples();
  std::vector<double> absdiff(static_cast<size_t>(n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    absdiff[static_cast<size_t>(i)] = std::abs(rec.data(ch, i + 1) - rec.data(ch, i));

  const double baseline = median_of(absdiff);
  const double threshold = params.threshold_factor * baseline;

  // Rising-edge crossings; the repetition starts at the sample after the jump.
  std::vector<std::int64_t> candidates;
  bool above = false;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const bool over = absdiff[static_cast<size_t>(i)] > threshold;
    if (over && !above) candidates.push_back(i + 1);
    above = over;
  }
  if (candidates.empty()) return {};

  std::int64_t period = 0;
  if (params.expected_period_s) {
    period = std::llround(*params.expected_period_s * rec.rate_hz);
    if (period < 2) throw ConfigError("expected period shorter than 2 samples");
  } else {
    period = estimate_period(candidates, n);
    if (period < 2) {
      // Single repetition (or no repetition structure): report first crossing.
      MarkerList single{{candidates.front(), "GA_ONSET"}};
      return single;
    }
  }

  const std::int64_t refractory =
      std::max<std::int64_t>(1, period - std::max<std::int64_t>(params.align_search,
                                                                period / 10));
  MarkerList onsets;
  std::int64_t last = -refractory - 1;
  for (std::int64_t c : candidates) {
    if (c - last >= refractory) {
      onsets.push_back({c, "GA_ONSET"});
      last = c;
    }
  }

  if (params.expected_period_s && onsets.size() >= 2) {
    std::vector<double> gaps;
    for (size_t i = 1; i < onsets.size(); ++i)
      gaps.push_back(static_cast<double>(onsets[i].sample - onsets[i - 1].sample));
    const double dominant = median_of(gaps);
    if (std::abs(dominant - static_cast<double>(period)) >
        0.10 * static_cast<double>(period))
      throw DataError("period mismatch: detected interval " + std::to_string(dominant) +
                      " vs expected " + std::to_string(period));
  }
  return onsets;
}

GaCorrection subtract_gradient_artifact(const Recording& rec, const MarkerList& onsets,
                                        const GaParams& params) {
  params.validate();
  if (onsets.size() < 3) throw DataError("fewer than 3 artifact onsets");

  const auto n_reps = static_cast<std::int64_t>(onsets.size());
  std::vector<double> gaps;
  gaps.reserve(onsets.size() - 1);
  for (size_t i = 1; i < onsets.size(); ++i) {
    const auto gap = static_cast<double>(onsets[i].sample - onsets[i - 1].sample);
    if (gap <= 0) throw DataError("onsets not strictly increasing");
    gaps.push_back(gap);
  }
  const double median_gap = median_of(gaps);
  for (double gap : gaps) {
    if (std::abs(gap - median_gap) > 0.10 * median_gap)
      throw DataError("repetition length varies more than 10% across the recording");
  }
  const auto rep_len = static_cast<std::int64_t>(std::llround(median_gap));
  const std::int64_t n = rec.n_samples();
  const int half = params.window_reps / 2;
  const int s = params.align_search;

  GaCorrection result;
  result.corrected = rec;
  result.artifact = rec;
  result.artifact.data.setZero();
  result.period_samples = rep_len;

  // Repetitions with a full-length segment contribute to templates; a
  // truncated final repetition is still corrected.
  std::vector<std::int64_t> starts(onsets.size());
  for (size_t i = 0; i < onsets.size(); ++i) starts[i] = onsets[i].sample;
  std::int64_t n_full = 0;
  for (std::int64_t r = 0; r < n_reps; ++r)
    if (starts[static_cast<size_t>(r)] + rep_len <= n) ++n_full;
  if (n_full < 2) throw DataError("not enough full repetitions");

  parallel_for(rec.n_channels(), [&](std::int64_t ch) {
    // Demeaned full-length segments, one row per repetition.
    Eigen::MatrixXd segs(n_full, rep_len);
    for (std::int64_t r = 0; r < n_full; ++r) {
      const auto seg = rec.data.row(ch).segment(starts[static_cast<size_t>(r)], rep_len);
      segs.row(r) = seg.array() - seg.mean();
    }

    Eigen::VectorXd window_sum = Eigen::VectorXd::Zero(rep_len);
    std::int64_t win_lo = 0, win_hi = -1;  // inclusive range currently summed
    Eigen::VectorXd tmpl(rep_len);

    for (std::int64_t r = 0; r < n_reps; ++r) {
      const std::int64_t want_lo = std::max<std::int64_t>(0, std::min(r, n_full - 1) - half);
      const std::int64_t want_hi =
          std::min<std::int64_t>(n_full - 1, std::min(r, n_full - 1) + half);
      while (win_hi < want_hi) window_sum += segs.row(++win_hi).transpose();
      while (win_lo < want_lo) window_sum -= segs.row(win_lo++).transpose();
      tmpl = window_sum / static_cast<double>(want_hi - want_lo + 1);

      const std::int64_t start = starts[static_cast<size_t>(r)];
      std::int64_t len = std::min<std::int64_t>(rep_len, n - start);
      // Keep write regions disjoint when jitter shortens a gap.
      if (r + 1 < n_reps)
        len = std::min(len, starts[static_cast<size_t>(r) + 1] - start);

      // Alignment: shift the template within +-s samples to best match this
      // repetition's own (demeaned) segment.
      std::int64_t best_lag = 0;
      if (s > 0 && r < n_full) {
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::int64_t lag = -s; lag <= s; ++lag) {
          double score = 0.0;
          for (std::int64_t t = std::max<std::int64_t>(0, lag);
               t < std::min<std::int64_t>(rep_len, rep_len + lag); ++t)
            score += segs(r, t) * tmpl(t - lag);
          if (score > best_score) {
            best_score = score;
            best_lag = lag;
          }
        }
      }

      for (std::int64_t t = 0; t < len; ++t) {
        const std::int64_t src = t - best_lag;
        if (src < 0 || src >= rep_len) continue;
        result.artifact.data(ch, start + t) = tmpl(src);
        result.corrected.data(ch, start + t) -= tmpl(src);
      }
    }
  });

  return result;
}

}  // namespace trio
