#include "trio/recording.hpp"

#include <algorithm>

#include "trio/errors.hpp"

namespace trio {

std::string to_string(Modality m) {
  switch (m) {
    case Modality::EEG: return "EEG";
    case Modality::EOG: return "EOG";
    case Modality::EMG: return "EMG";
    case Modality::ECG: return "ECG";
    case Modality::Other: return "OTHER";
  }
  return "OTHER";
}

Modality modality_from_string(std::string_view s) {
  if (s == "EEG") return Modality::EEG;
  if (s == "EOG") return Modality::EOG;
  if (s == "EMG") return Modality::EMG;
  if (s == "ECG") return Modality::ECG;
  if (s == "OTHER" || s == "Other" || s == "other") return Modality::Other;
  throw DataError("unknown modality '" + std::string(s) + "'");
}

bool markers_sorted(const MarkerList& markers) {
  return std::is_sorted(markers.begin(), markers.end(),
                        [](const Marker& a, const Marker& b) { return a.sample < b.sample; });
}

MarkerList markers_with_label(const MarkerList& markers, std::string_view key) {
  MarkerList out;
  const std::string prefix = std::string(key) + "/";
  for (const Marker& m : markers) {
    if (m.label == key || m.label.rfind(prefix, 0) == 0) out.push_back(m);
  }
  return out;
}

ChannelSelector ChannelSelector::all() { return ChannelSelector{}; }

ChannelSelector ChannelSelector::modality(Modality m) {
  ChannelSelector s;
  s.kind_ = Kind::ByModality;
  s.mods_ = {m};
  return s;
}

ChannelSelector ChannelSelector::modalities(std::vector<Modality> mods) {
  ChannelSelector s;
  s.kind_ = Kind::ByModality;
  s.mods_ = std::move(mods);
  return s;
}

ChannelSelector ChannelSelector::names(std::vector<std::string> names) {
  ChannelSelector s;
  s.kind_ = Kind::ByNames;
  s.names_ = std::move(names);
  return s;
}

bool ChannelSelector::matches(const ChannelInfo& info) const {
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::ByModality:
      return std::find(mods_.begin(), mods_.end(), info.modality) != mods_.end();
    case Kind::ByNames:
      return std::find(names_.begin(), names_.end(), info.name) != names_.end();
  }
  return false;
}

std::string ChannelSelector::describe() const {
  switch (kind_) {
    case Kind::All:
      return "all";
    case Kind::ByModality: {
      std::string s = "modality:";
      for (size_t i = 0; i < mods_.size(); ++i) s += (i ? "," : "") + to_string(mods_[i]);
      return s;
    }
    case Kind::ByNames: {
      std::string s = "names:";
      for (size_t i = 0; i < names_.size(); ++i) s += (i ? "," : "") + names_[i];
      return s;
    }
  }
  return "";
}

std::optional<Eigen::Index> Recording::find_channel(std::string_view name) const {
  for (size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].name == name) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

Eigen::Index Recording::channel_index(std::string_view name) const {
  if (auto idx = find_channel(name)) return *idx;
  throw DataError("channel '" + std::string(name) + "' not found");
}

void Recording::validate() const {
  if (!(rate_hz > 0.0)) throw DataError("rate_hz must be positive");
  if (static_cast<Eigen::Index>(channels.size()) != data.rows())
    throw DataError("channel metadata count does not match data rows");
  for (size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].name.empty()) throw DataError("channel name must be nonempty");
    for (size_t j = i + 1; j < channels.size(); ++j) {
      if (channels[i].name == channels[j].name)
        throw DataError("duplicate channel name '" + channels[i].name + "'");
    }
  }
  if (!data.allFinite()) throw DataError("non-finite value in recording data");
  if (!markers_sorted(markers)) throw DataError("markers not sorted by sample");
  for (const Marker& m : markers) {
    if (m.sample < 0 || m.sample >= n_samples())
      throw DataError("marker '" + m.label + "' outside recording range");
  }
}

std::vector<Eigen::Index> selected_indices(const Recording& rec,
                                           const ChannelSelector& selector) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < rec.n_channels(); ++i) {
    if (selector.matches(rec.channels[static_cast<size_t>(i)])) idx.push_back(i);
  }
  return idx;
}

Recording select_channels(const Recording& rec, const ChannelSelector& selector) {
  const std::vector<Eigen::Index> idx = selected_indices(rec, selector);
  if (idx.empty())
    throw DataError("channel selection '" + selector.describe() + "' matched no channels");

  Recording out;
  out.rate_hz = rec.rate_hz;
  out.markers = rec.markers;
  out.channels.reserve(idx.size());
  out.data.resize(static_cast<Eigen::Index>(idx.size()), rec.n_samples());
  for (size_t r = 0; r < idx.size(); ++r) {
    out.channels.push_back(rec.channels[static_cast<size_t>(idx[r])]);
    out.data.row(static_cast<Eigen::Index>(r)) = rec.data.row(idx[r]);
  }
  return out;
}

Recording select_channels(const Recording& rec, Modality m) {
  return select_channels(rec, ChannelSelector::modality(m));
}

Recording select_channels(const Recording& rec, const std::vector<std::string>& names) {
  return select_channels(rec, ChannelSelector::names(names));
}

}  // namespace trio
