#include "fft_utils.hpp"

#include <fftw3.h>

#include <mutex>

namespace trio::detail {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_fast_size(std::size_t n) {
  // Powers of two are always fast; good enough for our sizes.
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}
}  // namespace

std::vector<std::complex<double>> real_fft(const std::vector<double>& x) {
  const auto n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  std::vector<double> in(x);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
  const std::size_t n = x.size();
  const std::size_t m = next_fast_size(2 * n);
  std::vector<double> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());

  std::vector<std::complex<double>> spec = real_fft(padded);
  std::vector<double> power(m, 0.0);
  // |X|^2 back-transformed = circular autocorrelation; zero padding makes it
  // linear.
  std::vector<std::complex<double>> sq(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) sq[i] = std::norm(spec[i]);

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(m),
                                reinterpret_cast<fftw_complex*>(sq.data()),
                                power.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }

  const std::size_t lags = std::min(max_lag + 1, n);
  std::vector<double> ac(lags);
  for (std::size_t l = 0; l < lags; ++l) ac[l] = power[l] / static_cast<double>(m);
  return ac;
}

}  // namespace trio::detail
