#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trio {

enum class Modality { EEG, EOG, EMG, ECG, Other };

std::string to_string(Modality m);
Modality modality_from_string(std::string_view s);

struct ChannelInfo {
  std::string name;
  Modality modality = Modality::EEG;
  std::string unit = "uV";
};

/// Event on the recording timeline. Labels are free-form; the pipeline uses
/// "GA_ONSET", "R_PEAK", "SCAN_START" and protocol labels such as "STIM/ata".
struct Marker {
  std::int64_t sample = 0;
  std::string label;
};

using MarkerList = std::vector<Marker>;

bool markers_sorted(const MarkerList& markers);

/// Markers whose label equals `key` or starts with `key` + "/".
MarkerList markers_with_label(const MarkerList& markers, std::string_view key);

/// Channel subset predicate: all channels, one or more modalities, or an
/// explicit name list.
class ChannelSelector {
 public:
  ChannelSelector() = default;  // matches everything

  static ChannelSelector all();
  static ChannelSelector modality(Modality m);
  static ChannelSelector modalities(std::vector<Modality> mods);
  static ChannelSelector names(std::vector<std::string> names);

  bool matches(const ChannelInfo& info) const;
  std::string describe() const;

 private:
  enum class Kind { All, ByModality, ByNames };
  Kind kind_ = Kind::All;
  std::vector<Modality> mods_;
  std::vector<std::string> names_;
};

}  // namespace trio
