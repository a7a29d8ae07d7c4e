#include <json.hpp>

#include <fstream>

#include "trio/errors.hpp"
#include "trio/synth.hpp"

using nlohmann::json;

namespace trio {

namespace {

void get_if(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}
void get_if(const json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}
void get_if(const json& j, const char* key, bool& out) {
  if (j.contains(key)) out = j.at(key).get<bool>();
}
void get_if(const json& j, const char* key, std::int64_t& out) {
  if (j.contains(key)) out = j.at(key).get<std::int64_t>();
}
void get_if(const json& j, const char* key, std::uint64_t& out) {
  if (j.contains(key)) out = j.at(key).get<std::uint64_t>();
}
void get_if(const json& j, const char* key, std::vector<double>& out) {
  if (j.contains(key)) out = j.at(key).get<std::vector<double>>();
}
void get_if(const json& j, const char* key, std::vector<std::string>& out) {
  if (j.contains(key)) out = j.at(key).get<std::vector<std::string>>();
}

}  // namespace

SessionConfig session_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed session config: ") + e.what());
  }

  SessionConfig c;
  try {
    get_if(j, "rate_hz", c.rate_hz);
    get_if(j, "seed", c.seed);
    if (j.contains("protocol")) {
      const json& p = j["protocol"];
      get_if(p, "n_trials", c.protocol.n_trials);
      get_if(p, "words", c.protocol.words);
      get_if(p, "jitter_choices_s", c.protocol.jitter_choices_s);
      get_if(p, "fixation_s", c.protocol.fixation_s);
      get_if(p, "word_s", c.protocol.word_s);
      get_if(p, "go_s", c.protocol.go_s);
      get_if(p, "blank_s", c.protocol.blank_s);
      get_if(p, "rest_s", c.protocol.rest_s);
      get_if(p, "seed", c.protocol.seed);
    }
    if (j.contains("eeg")) {
      const json& p = j["eeg"];
      get_if(p, "ar_coeff", c.eeg.ar_coeff);
      get_if(p, "background_rms_uv", c.eeg.background_rms_uv);
      get_if(p, "background_rms_scale", c.eeg.background_rms_scale);
      get_if(p, "erp_peak_uv", c.eeg.erp_peak_uv);
      get_if(p, "erp_duration_s", c.eeg.erp_duration_s);
      get_if(p, "erp_freq_hz", c.eeg.erp_freq_hz);
      get_if(p, "erp_decay_s", c.eeg.erp_decay_s);
      get_if(p, "erp_gains", c.eeg.erp_gains);
      get_if(p, "seed", c.eeg.seed);
    }
    if (j.contains("myogenic")) {
      const json& p = j["myogenic"];
      get_if(p, "enabled", c.myogenic.enabled);
      get_if(p, "emg_noise_uv", c.myogenic.emg_noise_uv);
      get_if(p, "emg_locked_uv", c.myogenic.emg_locked_uv);
      get_if(p, "emg_band_lo_hz", c.myogenic.emg_band_lo_hz);
      get_if(p, "emg_band_hi_hz", c.myogenic.emg_band_hi_hz);
      get_if(p, "burst_offset_s", c.myogenic.burst_offset_s);
      get_if(p, "burst_duration_s", c.myogenic.burst_duration_s);
      get_if(p, "blink_amp_uv", c.myogenic.blink_amp_uv);
      get_if(p, "blink_rate_hz", c.myogenic.blink_rate_hz);
      get_if(p, "blink_duration_s", c.myogenic.blink_duration_s);
      get_if(p, "blink_stim_locked_prob", c.myogenic.blink_stim_locked_prob);
      get_if(p, "blink_stim_latency_s", c.myogenic.blink_stim_latency_s);
      get_if(p, "blink_stim_jitter_s", c.myogenic.blink_stim_jitter_s);
      get_if(p, "saccade_amp_uv", c.myogenic.saccade_amp_uv);
      get_if(p, "saccade_duration_s", c.myogenic.saccade_duration_s);
      get_if(p, "saccade_latency_s", c.myogenic.saccade_latency_s);
      get_if(p, "saccade_jitter_s", c.myogenic.saccade_jitter_s);
      get_if(p, "ref_noise_uv", c.myogenic.ref_noise_uv);
      get_if(p, "seed", c.myogenic.seed);
      if (p.contains("eeg_mixing")) {
        const auto rows = p["eeg_mixing"].get<std::vector<std::vector<double>>>();
        c.myogenic.eeg_mixing.resize(static_cast<Eigen::Index>(rows.size()),
                                     rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
        for (size_t r = 0; r < rows.size(); ++r)
          for (size_t k = 0; k < rows[r].size(); ++k)
            c.myogenic.eeg_mixing(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
                rows[r][k];
      }
    }
    if (j.contains("cardiac")) {
      const json& p = j["cardiac"];
      get_if(p, "enabled", c.cardiac.enabled);
      get_if(p, "bpm", c.cardiac.bpm);
      get_if(p, "hrv_jitter", c.cardiac.hrv_jitter);
      get_if(p, "ecg_peak_uv", c.cardiac.ecg_peak_uv);
      get_if(p, "bcg_peak_uv", c.cardiac.bcg_peak_uv);
      get_if(p, "delay_s", c.cardiac.delay_s);
      get_if(p, "amp_jitter", c.cardiac.amp_jitter);
      get_if(p, "latency_jitter_s", c.cardiac.latency_jitter_s);
      get_if(p, "eeg_gains", c.cardiac.eeg_gains);
      get_if(p, "seed", c.cardiac.seed);
    }
    if (j.contains("gradient")) {
      const json& p = j["gradient"];
      get_if(p, "enabled", c.gradient.enabled);
      get_if(p, "period_samples", c.gradient.period_samples);
      get_if(p, "amplitude_uv", c.gradient.amplitude_uv);
      get_if(p, "drift_per_rep", c.gradient.drift_per_rep);
      get_if(p, "start_sample", c.gradient.start_sample);
      get_if(p, "channel_gains", c.gradient.channel_gains);
      if (p.contains("shape")) {
        const std::string s = p["shape"].get<std::string>();
        if (s == "sawtooth") c.gradient.shape = GradientShape::Sawtooth;
        else if (s == "multi_harmonic") c.gradient.shape = GradientShape::MultiHarmonic;
        else throw ConfigError("unknown gradient shape '" + s + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad session config: ") + e.what());
  }
  return c;
}

SessionConfig session_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open session config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return session_config_from_json_text(text);
}

std::string session_config_to_json_text(const SessionConfig& c) {
  json j;
  j["rate_hz"] = c.rate_hz;
  j["seed"] = c.seed;
  j["protocol"] = {{"n_trials", c.protocol.n_trials},
                   {"words", c.protocol.word_list()},
                   {"jitter_choices_s", c.protocol.jitter_choices_s},
                   {"fixation_s", c.protocol.fixation_s},
                   {"word_s", c.protocol.word_s},
                   {"go_s", c.protocol.go_s},
                   {"blank_s", c.protocol.blank_s},
                   {"rest_s", c.protocol.rest_s},
                   {"seed", c.protocol.seed}};
  j["eeg"] = {{"ar_coeff", c.eeg.ar_coeff},
              {"background_rms_uv", c.eeg.background_rms_uv},
              {"erp_peak_uv", c.eeg.erp_peak_uv},
              {"erp_duration_s", c.eeg.erp_duration_s},
              {"erp_freq_hz", c.eeg.erp_freq_hz},
              {"erp_decay_s", c.eeg.erp_decay_s},
              {"seed", c.eeg.seed}};
  j["myogenic"] = {{"enabled", c.myogenic.enabled},
                   {"emg_noise_uv", c.myogenic.emg_noise_uv},
                   {"emg_locked_uv", c.myogenic.emg_locked_uv},
                   {"blink_amp_uv", c.myogenic.blink_amp_uv},
                   {"blink_rate_hz", c.myogenic.blink_rate_hz},
                   {"saccade_amp_uv", c.myogenic.saccade_amp_uv},
                   {"ref_noise_uv", c.myogenic.ref_noise_uv},
                   {"seed", c.myogenic.seed}};
  j["cardiac"] = {{"enabled", c.cardiac.enabled},
                  {"bpm", c.cardiac.bpm},
                  {"hrv_jitter", c.cardiac.hrv_jitter},
                  {"ecg_peak_uv", c.cardiac.ecg_peak_uv},
                  {"bcg_peak_uv", c.cardiac.bcg_peak_uv},
                  {"delay_s", c.cardiac.delay_s},
                  {"amp_jitter", c.cardiac.amp_jitter},
                  {"latency_jitter_s", c.cardiac.latency_jitter_s},
                  {"seed", c.cardiac.seed}};
  j["gradient"] = {{"enabled", c.gradient.enabled},
                   {"period_samples", c.gradient.period_samples},
                   {"amplitude_uv", c.gradient.amplitude_uv},
                   {"shape", c.gradient.shape == GradientShape::Sawtooth ? "sawtooth"
                                                                         : "multi_harmonic"},
                   {"drift_per_rep", c.gradient.drift_per_rep},
                   {"start_sample", c.gradient.start_sample}};
  return j.dump(2);
}

}  // namespace trio
