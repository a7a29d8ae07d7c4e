#include "trio/pipeline.hpp"

#include <json.hpp>

#include <fstream>

#include "trio/errors.hpp"
#include "trio/evaluate.hpp"
#include "trio/io.hpp"

using nlohmann::json;

namespace trio {

namespace {

json params_to_json(const GaParams& p) {
  json j;
  j["detection_channel"] = p.detection_channel;
  j["threshold_factor"] = p.threshold_factor;
  if (p.expected_period_s)
    j["expected_period_s"] = *p.expected_period_s;
  else
    j["expected_period_s"] = nullptr;
  j["window_reps"] = p.window_reps;
  j["align_search"] = p.align_search;
  return j;
}

void params_from_json(const json& j, GaParams& p) {
  p.detection_channel = j.value("detection_channel", p.detection_channel);
  p.threshold_factor = j.value("threshold_factor", p.threshold_factor);
  if (j.contains("expected_period_s") && !j["expected_period_s"].is_null())
    p.expected_period_s = j["expected_period_s"].get<double>();
  p.window_reps = j.value("window_reps", p.window_reps);
  p.align_search = j.value("align_search", p.align_search);
}

json params_to_json(const BcgParams& p) {
  json j;
  j["delay_s"] = p.delay_s;
  j["span_fraction"] = p.span_fraction;
  j["window_beats"] = p.window_beats;
  j["use_median"] = p.use_median;
  return j;
}

void params_from_json(const json& j, BcgParams& p) {
  p.delay_s = j.value("delay_s", p.delay_s);
  p.span_fraction = j.value("span_fraction", p.span_fraction);
  p.window_beats = j.value("window_beats", p.window_beats);
  p.use_median = j.value("use_median", p.use_median);
}

json params_to_json(const CcaParams& p) {
  json j;
  j["rho_threshold"] = p.rho_threshold;
  j["ridge_scale"] = p.ridge_scale;
  if (p.max_reject)
    j["max_reject"] = *p.max_reject;
  else
    j["max_reject"] = nullptr;
  return j;
}

void params_from_json(const json& j, CcaParams& p) {
  p.rho_threshold = j.value("rho_threshold", p.rho_threshold);
  p.ridge_scale = j.value("ridge_scale", p.ridge_scale);
  if (j.contains("max_reject") && !j["max_reject"].is_null())
    p.max_reject = j["max_reject"].get<int>();
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["input"] = c.input;
  j["output"] = c.output;
  j["keep_intermediate"] = c.keep_intermediate;
  j["stages"] = {{"ga", c.stages.ga}, {"bcg", c.stages.bcg}, {"cca", c.stages.cca}};
  j["ga"] = params_to_json(c.ga);
  j["ga"]["onsets_file"] = c.ga_onsets_file;
  j["bcg"] = params_to_json(c.bcg);
  j["bcg"]["peaks_file"] = c.bcg_peaks_file;
  j["cca"] = params_to_json(c.cca);
  j["cca"]["reject"] = c.cca_reject;
  j["eval"] = {{"epoch_pre_s", c.eval.epoch_pre_s},
               {"epoch_post_s", c.eval.epoch_post_s},
               {"n_fft", c.eval.n_fft},
               {"erp_label", c.eval.erp_label}};
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    c.input = j.value("input", std::string());
    c.output = j.value("output", std::string());
    c.keep_intermediate = j.value("keep_intermediate", false);
    if (j.contains("stages")) {
      c.stages.ga = j["stages"].value("ga", true);
      c.stages.bcg = j["stages"].value("bcg", true);
      c.stages.cca = j["stages"].value("cca", true);
    }
    if (j.contains("ga")) {
      params_from_json(j["ga"], c.ga);
      c.ga_onsets_file = j["ga"].value("onsets_file", std::string());
    }
    if (j.contains("bcg")) {
      params_from_json(j["bcg"], c.bcg);
      c.bcg_peaks_file = j["bcg"].value("peaks_file", std::string());
    }
    if (j.contains("cca")) {
      params_from_json(j["cca"], c.cca);
      c.cca_reject = j["cca"].value("reject", std::vector<int>{});
    }
    if (j.contains("eval")) {
      c.eval.epoch_pre_s = j["eval"].value("epoch_pre_s", c.eval.epoch_pre_s);
      c.eval.epoch_post_s = j["eval"].value("epoch_post_s", c.eval.epoch_post_s);
      c.eval.n_fft = j["eval"].value("n_fft", c.eval.n_fft);
      c.eval.erp_label = j["eval"].value("erp_label", c.eval.erp_label);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

/// Quantize to the precision that a container round trip would impose.
void quantize_f32(Recording& rec) {
  rec.data = rec.data.cast<float>().cast<double>();
}

json stage_to_json(const StageReport& s) {
  json j;
  j["name"] = s.name;
  j["enabled"] = s.enabled;
  j["ran"] = s.ran;
  if (!s.error.empty()) j["error"] = s.error;
  if (s.ran) {
    if (s.name == "ga") {
      j["n_onsets"] = s.n_markers;
      j["period_samples"] = s.period_samples;
    } else if (s.name == "bcg") {
      j["n_peaks"] = s.n_markers;
      j["span_samples"] = s.period_samples;
      j["n_suspects"] = s.n_suspects;
    } else if (s.name == "cca") {
      j["correlations"] = s.correlations;
      j["rejected"] = s.rejected;
      j["residual_max_rho"] = s.residual_max_rho;
    }
    if (!s.attenuation_db.empty()) j["attenuation_db"] = s.attenuation_db;
  }
  return j;
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  return config_from_json(j);
}

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string PipelineConfig::to_json_text() const { return config_to_json(*this).dump(2); }

void PipelineConfig::apply_override(const std::string& key, const std::string& value) {
  json j = config_to_json(*this);
  json* node = &j;
  std::string rest = key;
  for (size_t dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
    const std::string head = rest.substr(0, dot);
    rest = rest.substr(dot + 1);
    if (!node->contains(head)) throw ConfigError("unknown config key '" + key + "'");
    node = &(*node)[head];
  }
  if (!node->contains(rest)) throw ConfigError("unknown config key '" + key + "'");
  json& leaf = (*node)[rest];
  try {
    if (leaf.is_string()) {
      leaf = value;
    } else if (leaf.is_boolean()) {
      if (value == "true" || value == "1") leaf = true;
      else if (value == "false" || value == "0") leaf = false;
      else throw ConfigError("expected boolean for '" + key + "'");
    } else if (leaf.is_number_integer()) {
      leaf = std::stoll(value);
    } else if (leaf.is_array()) {
      leaf = json::parse(value);
    } else {
      leaf = std::stod(value);
    }
  } catch (const std::exception&) {
    throw ConfigError("cannot parse value '" + value + "' for '" + key + "'");
  }
  *this = config_from_json(j);
}

void PipelineConfig::validate() const {
  if (input.empty()) throw ConfigError("pipeline input path is empty");
  if (output.empty()) throw ConfigError("pipeline output path is empty");
  if (input == output) throw ConfigError("input and output paths must differ");
  ga.validate();
  bcg.validate();
  cca.validate();
  if (eval.epoch_pre_s < 0.0 || eval.epoch_post_s < 0.0)
    throw ConfigError("epoch window must be non-negative");
}

std::string RunReport::to_json_text() const {
  json j;
  j["status"] = status;
  j["input"] = input;
  j["output"] = output;
  j["rate_hz"] = rate_hz;
  j["n_channels"] = n_channels;
  j["n_samples"] = n_samples;
  j["stages"] = json::array();
  for (const StageReport& s : stages) j["stages"].push_back(stage_to_json(s));
  j["config"] = json::parse(config_json);
  return j.dump(2);
}

RunReport run_pipeline(const PipelineConfig& config) {
  config.validate();

  RunReport report;
  report.input = config.input;
  report.output = config.output;
  report.config_json = config.to_json_text();

  Recording current = load_recording(config.input);
  report.rate_hz = current.rate_hz;
  report.n_channels = current.n_channels();
  report.n_samples = current.n_samples();

  const std::filesystem::path out_dir(config.output);
  const auto intermediate = [&](const Recording& rec, const std::string& tag) {
    if (config.keep_intermediate) save_recording(rec, out_dir.string() + "." + tag);
  };

  StageReport ga_stage{.name = "ga", .enabled = config.stages.ga};
  StageReport bcg_stage{.name = "bcg", .enabled = config.stages.bcg};
  StageReport cca_stage{.name = "cca", .enabled = config.stages.cca};

  bool failed = false;
  std::string failure;

  if (config.stages.ga && !failed) {
    try {
      MarkerList onsets = config.ga_onsets_file.empty()
                              ? detect_gradient_onsets(current, config.ga)
                              : load_markers_csv(config.ga_onsets_file);
      GaCorrection corr = subtract_gradient_artifact(current, onsets, config.ga);
      ga_stage.n_markers = static_cast<std::int64_t>(onsets.size());
      ga_stage.period_samples = corr.period_samples;
      if (corr.period_samples > 0) {
        const double f0 = current.rate_hz / static_cast<double>(corr.period_samples);
        const int max_harm = static_cast<int>(current.rate_hz / 2.0 / f0) - 1;
        const HarmonicBandSpec band{f0, std::clamp(max_harm, 1, 10), 4096};
        if (current.n_samples() >= band.n_fft)
          ga_stage.attenuation_db = artifact_attenuation(current, corr.corrected, band);
      }
      current = std::move(corr.corrected);
      quantize_f32(current);
      ga_stage.ran = true;
      intermediate(current, "ga");
    } catch (const Error& e) {
      failed = true;
      failure = e.what();
      ga_stage.error = e.what();
    }
  }

  if (config.stages.bcg && !failed) {
    try {
      MarkerList peaks;
      if (config.bcg_peaks_file.empty()) {
        const RPeakReport rp = detect_r_peaks(current);
        peaks = rp.peaks;
        bcg_stage.n_suspects = rp.suspects.size();
      } else {
        peaks = load_markers_csv(config.bcg_peaks_file);
      }
      BcgCorrection corr = subtract_pulse_artifact(current, peaks, config.bcg);
      bcg_stage.n_markers = static_cast<std::int64_t>(peaks.size());
      bcg_stage.period_samples = corr.span_samples;
      const CardiacLockedSpec locked{peaks, 0.0,
                                     config.bcg.delay_s + static_cast<double>(corr.span_samples) /
                                                              current.rate_hz};
      bcg_stage.attenuation_db = artifact_attenuation(current, corr.corrected, locked);
      current = std::move(corr.corrected);
      quantize_f32(current);
      bcg_stage.ran = true;
      intermediate(current, "bcg");
    } catch (const Error& e) {
      failed = true;
      failure = e.what();
      bcg_stage.error = e.what();
    }
  }

  if (config.stages.cca && !failed) {
    try {
      const Recording eeg = select_channels(current, Modality::EEG);
      const Recording refs =
          select_channels(current, ChannelSelector::modalities({Modality::EMG, Modality::EOG}));
      const CcaResult result = compute_cca(eeg, refs, config.cca);
      const std::vector<int> reject = config.cca_reject.empty()
                                          ? select_artifact_components(result, config.cca)
                                          : config.cca_reject;
      const Recording cleaned = remove_components(eeg, result, reject);

      cca_stage.correlations.assign(result.correlations.data(),
                                    result.correlations.data() + result.correlations.size());
      cca_stage.rejected = reject;
      if (!reject.empty()) {
        const CcaResult recheck = compute_cca(cleaned, refs, config.cca);
        cca_stage.residual_max_rho = recheck.correlations.size() ? recheck.correlations(0) : 0.0;
      } else {
        cca_stage.residual_max_rho =
            result.correlations.size() ? result.correlations(0) : 0.0;
      }

      // Write the cleaned EEG rows back into the full montage.
      Eigen::Index k = 0;
      for (Eigen::Index ch = 0; ch < current.n_channels(); ++ch) {
        if (current.channels[static_cast<size_t>(ch)].modality == Modality::EEG)
          current.data.row(ch) = cleaned.data.row(k++);
      }
      quantize_f32(current);
      cca_stage.ran = true;
    } catch (const Error& e) {
      failed = true;
      failure = e.what();
      cca_stage.error = e.what();
    }
  }

  report.stages = {ga_stage, bcg_stage, cca_stage};
  if (failed) {
    report.status = "error";
  } else if (!ga_stage.ran && !bcg_stage.ran && !cca_stage.ran) {
    report.status = "no-op";
  }

  save_recording(current, config.output);
  {
    std::ofstream out(out_dir.string() + ".report.json");
    if (!out) throw DataError("cannot write run report");
    out << report.to_json_text() << '\n';
  }
  if (failed) throw DataError("pipeline stage failed: " + failure);
  return report;
}

}  // namespace trio
