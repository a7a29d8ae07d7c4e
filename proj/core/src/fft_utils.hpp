#pragma once

#include <complex>
#include <vector>

namespace trio::detail {

/// Real-to-complex FFT, output length n/2 + 1. Thread-safe (plans are
/// serialized internally).
std::vector<std::complex<double>> real_fft(const std::vector<double>& x);

/// Linear (zero-padded) autocorrelation of x for lags [0, max_lag].
std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag);

}  // namespace trio::detail
