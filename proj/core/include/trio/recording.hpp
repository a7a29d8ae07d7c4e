#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <vector>

#include "trio/types.hpp"

namespace trio {

/// Multichannel uniformly sampled time series. `data` is channels x samples,
/// in microvolts. Recordings are treated as immutable values: every operation
/// in the library returns a new Recording.
struct Recording {
  double rate_hz = 0.0;
  std::vector<ChannelInfo> channels;
  Eigen::MatrixXd data;  // channels x samples
  MarkerList markers;

  Eigen::Index n_channels() const { return data.rows(); }
  Eigen::Index n_samples() const { return data.cols(); }
  double duration_s() const {
    return rate_hz > 0.0 ? static_cast<double>(n_samples()) / rate_hz : 0.0;
  }

  std::optional<Eigen::Index> find_channel(std::string_view name) const;
  /// Throws DataError when the channel does not exist.
  Eigen::Index channel_index(std::string_view name) const;

  /// Checks rate, channel metadata, marker ordering/range and finiteness.
  /// Throws DataError on the first violated invariant.
  void validate() const;
};

/// Sub-recording with the selected channels, preserving channel order,
/// sampling rate and markers. Throws DataError on an empty selection.
Recording select_channels(const Recording& rec, const ChannelSelector& selector);
Recording select_channels(const Recording& rec, Modality m);
Recording select_channels(const Recording& rec, const std::vector<std::string>& names);

std::vector<Eigen::Index> selected_indices(const Recording& rec,
                                           const ChannelSelector& selector);

}  // namespace trio
