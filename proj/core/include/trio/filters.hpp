#pragma once

#include <vector>

#include "trio/recording.hpp"

namespace trio {

/// Transfer-function coefficients, a[0] normalized to 1.
struct IirCoeffs {
  std::vector<double> b;
  std::vector<double> a;
  int order() const { return static_cast<int>(a.size()) - 1; }
};

/// Digital Butterworth low-pass via bilinear transform of the analog
/// prototype. Throws ConfigError unless 0 < cutoff_hz < rate_hz / 2.
IirCoeffs butterworth_lowpass(int order, double cutoff_hz, double rate_hz);

/// Single forward pass, zero initial state.
std::vector<double> filter_forward(const IirCoeffs& c, const std::vector<double>& x);

/// Zero-phase forward-backward filtering. The signal is extended by odd
/// reflection over 3x the filter order and the filter state is initialized
/// to steady state, so constants pass through exactly and edge transients
/// stay out of the output. Requires x.size() > 3 * order.
std::vector<double> filtfilt(const IirCoeffs& c, const std::vector<double>& x);

/// Zero-phase order-4 Butterworth low-pass applied to the selected channels;
/// unselected channels are copied through. Markers and metadata preserved.
Recording lowpass(const Recording& rec, double cutoff_hz,
                  const ChannelSelector& selector = ChannelSelector::all());

}  // namespace trio
