#include "trio/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "trio/errors.hpp"
#include "trio/parallel.hpp"

namespace trio {

namespace {

// Expands prod_k (z - r_k) into polynomial coefficients, highest power first.
std::vector<std::complex<double>> poly_from_roots(
    const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> coeffs{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= coeffs[i] * r;
    }
    coeffs = std::move(next);
  }
  return coeffs;
}

struct FilterState {
  const IirCoeffs* c;
  // Transposed direct form II, state length = order.
  void run(const std::vector<double>& x, std::vector<double>& y,
           std::vector<double> z) const {
    const auto& b = c->b;
    const auto& a = c->a;
    const size_t m = z.size();
    y.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      const double yi = b[0] * xi + z[0];
      for (size_t j = 0; j + 1 < m; ++j) z[j] = b[j + 1] * xi + z[j + 1] - a[j + 1] * yi;
      z[m - 1] = b[m] * xi - a[m] * yi;
      y[i] = yi;
    }
  }
};

// Steady-state unit-step state vector: with z scaled by x[0], a constant
// input produces a constant output from the first sample.
std::vector<double> steady_state_step(const IirCoeffs& c) {
  const int m = c.order();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  // (I - A) zi = B with the companion-form state update of the transposed
  // direct form II realization.
  for (int j = 0; j < m; ++j) {
    sys(j, 0) = c.a[static_cast<size_t>(j) + 1];
    if (j + 1 < m) sys(j, j + 1) = -1.0;
    sys(j, j) += 1.0;
    rhs(j) = c.b[static_cast<size_t>(j) + 1] - c.b[0] * c.a[static_cast<size_t>(j) + 1];
  }
  const Eigen::VectorXd zi = sys.partialPivLu().solve(rhs);
  return {zi.data(), zi.data() + m};
}

}  // namespace

IirCoeffs butterworth_lowpass(int order, double cutoff_hz, double rate_hz) {
  if (order < 1 || order > 12) throw ConfigError("filter order out of range");
  if (!(rate_hz > 0.0)) throw ConfigError("rate must be positive");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= rate_hz / 2.0)
    throw ConfigError("cutoff must lie in (0, Nyquist)");

  using cplx = std::complex<double>;
  const double warped = 2.0 * rate_hz * std::tan(std::numbers::pi * cutoff_hz / rate_hz);

  std::vector<cplx> zpoles;
  zpoles.reserve(static_cast<size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order) +
                         std::numbers::pi / 2.0;
    const cplx s = warped * cplx(std::cos(theta), std::sin(theta));
    // Bilinear transform s -> z.
    zpoles.push_back((2.0 * rate_hz + s) / (2.0 * rate_hz - s));
  }

  const std::vector<cplx> zzeros(static_cast<size_t>(order), cplx(-1.0, 0.0));
  const auto a_c = poly_from_roots(zpoles);
  const auto b_c = poly_from_roots(zzeros);

  IirCoeffs c;
  c.a.resize(a_c.size());
  c.b.resize(b_c.size());
  for (size_t i = 0; i < a_c.size(); ++i) c.a[i] = a_c[i].real();

  // Normalize for unit DC gain.
  double a_sum = 0.0, b_sum = 0.0;
  for (double v : c.a) a_sum += v;
  for (const auto& v : b_c) b_sum += v.real();
  const double gain = a_sum / b_sum;
  for (size_t i = 0; i < b_c.size(); ++i) c.b[i] = b_c[i].real() * gain;
  return c;
}

std::vector<double> filter_forward(const IirCoeffs& c, const std::vector<double>& x) {
  std::vector<double> y;
  FilterState{&c}.run(x, y, std::vector<double>(static_cast<size_t>(c.order()), 0.0));
  return y;
}

std::vector<double> filtfilt(const IirCoeffs& c, const std::vector<double>& x) {
  const int order = c.order();
  const size_t pad = static_cast<size_t>(3 * order);
  if (x.size() <= pad) throw DataError("signal too short for zero-phase filtering");

  const size_t n = x.size();
  std::vector<double> ext(n + 2 * pad);
  for (size_t i = 0; i < pad; ++i) ext[i] = 2.0 * x.front() - x[pad - i];
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (size_t i = 0; i < pad; ++i) ext[n + pad + i] = 2.0 * x.back() - x[n - 2 - i];

  const std::vector<double> zi = steady_state_step(c);
  const FilterState f{&c};

  std::vector<double> fwd;
  {
    std::vector<double> z = zi;
    for (auto& v : z) v *= ext.front();
    f.run(ext, fwd, std::move(z));
  }
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd;
  {
    std::vector<double> z = zi;
    for (auto& v : z) v *= fwd.front();
    f.run(fwd, bwd, std::move(z));
  }
  std::reverse(bwd.begin(), bwd.end());

  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Recording lowpass(const Recording& rec, double cutoff_hz, const ChannelSelector& selector) {
  const IirCoeffs c = butterworth_lowpass(4, cutoff_hz, rec.rate_hz);
  const std::vector<Eigen::Index> idx = selected_indices(rec, selector);

  Recording out = rec;
  parallel_for(static_cast<std::int64_t>(idx.size()), [&](std::int64_t k) {
    const Eigen::Index ch = idx[static_cast<size_t>(k)];
    std::vector<double> row(rec.data.row(ch).begin(), rec.data.row(ch).end());
    const std::vector<double> filtered = filtfilt(c, row);
    out.data.row(ch) = Eigen::Map<const Eigen::RowVectorXd>(
        filtered.data(), static_cast<Eigen::Index>(filtered.size()));
  });
  return out;
}

}  // namespace trio
