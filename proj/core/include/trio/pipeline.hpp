#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trio/cca.hpp"
#include "trio/gradient.hpp"
#include "trio/pulse.hpp"

namespace trio {

/// Settings for the full correction pipeline (gradient -> pulse -> CCA).
/// Loadable from JSON; any field can be overridden with a dotted
/// "key=value" path, e.g. "cca.rho_threshold=0.3".
struct PipelineConfig {
  std::string input;
  std::string output;
  bool keep_intermediate = false;

  struct Stages {
    bool ga = true;
    bool bcg = true;
    bool cca = true;
  } stages;

  GaParams ga;
  std::string ga_onsets_file;  // optional externally supplied onsets

  BcgParams bcg;
  std::string bcg_peaks_file;  // optional manual R-peak override

  CcaParams cca;
  std::vector<int> cca_reject;  // optional explicit component selection

  struct Eval {
    double epoch_pre_s = 1.0;
    double epoch_post_s = 1.0;
    int n_fft = 5000;
    std::string erp_label = "STIM";
  } eval;

  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig from_json_file(const std::filesystem::path& path);
  std::string to_json_text() const;

  void apply_override(const std::string& key, const std::string& value);
  void validate() const;
};

struct StageReport {
  std::string name;
  bool enabled = false;
  bool ran = false;
  std::string error;
  // Stage-specific results.
  std::int64_t n_markers = 0;           // GA onsets / R-peaks
  std::int64_t period_samples = 0;      // GA repetition length / BCG span
  std::size_t n_suspects = 0;           // BCG
  std::vector<double> correlations;     // CCA
  std::vector<int> rejected;            // CCA
  double residual_max_rho = 0.0;        // CCA, recomputed after cleaning
  std::vector<double> attenuation_db;   // per channel, when computable
};

struct RunReport {
  std::string status = "ok";  // "ok" | "no-op" | "error"
  std::string input;
  std::string output;
  double rate_hz = 0.0;
  std::int64_t n_channels = 0;
  std::int64_t n_samples = 0;
  std::vector<StageReport> stages;
  std::string config_json;  // exact parameters used, reproducible

  std::string to_json_text() const;
};

/// Runs the enabled stages in fixed order on the input container and writes
/// the result plus a JSON report. Stage outputs are quantized to the stored
/// float32 precision, so a chained run is bit-identical to running the
/// stages one at a time through containers.
RunReport run_pipeline(const PipelineConfig& config);

}  // namespace trio
