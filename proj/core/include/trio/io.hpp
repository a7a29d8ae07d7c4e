#pragma once

#include <filesystem>

#include "trio/recording.hpp"

namespace trio {

/// TRIO container: a directory with
///   header.json  - {"rate_hz": number, "channels": [{name,modality,unit}...],
///                   "n_samples": integer}
///   data.f32     - raw little-endian float32, sample-major interleaved
///                  (frame t = channel 0..C-1)
///   markers.csv  - "sample,label" header plus one row per marker
Recording load_recording(const std::filesystem::path& container);
void save_recording(const Recording& rec, const std::filesystem::path& container);

MarkerList load_markers_csv(const std::filesystem::path& path);
void save_markers_csv(const MarkerList& markers, const std::filesystem::path& path);

/// Plain-CSV import for small fixtures. First line is a header; a first
/// column named "time" (or "t") is interpreted as seconds and used to infer
/// the sampling rate, otherwise `default_rate_hz` applies. Channel modality
/// is inferred from the name prefix (EOG*/EMG*/ECG* -> that modality,
/// anything else EEG).
Recording load_recording_csv(const std::filesystem::path& path,
                             double default_rate_hz = 5000.0);

}  // namespace trio
