// Command-line front end for the trio artifact-suppression pipeline:
// session simulation, per-stage correction, evaluation tables, and the
// composed run-all pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "trio/cca.hpp"
#include "trio/errors.hpp"
#include "trio/evaluate.hpp"
#include "trio/gradient.hpp"
#include "trio/io.hpp"
#include "trio/pipeline.hpp"
#include "trio/pulse.hpp"
#include "trio/synth.hpp"

namespace fs = std::filesystem;
using namespace trio;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_erp_csv(const Eigen::MatrixXd& erp, const std::vector<ChannelInfo>& channels,
                   double rate_hz, double pre_s, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "time_s";
  for (const auto& ch : channels) out << ',' << ch.name;
  out << '\n';
  for (Eigen::Index i = 0; i < erp.cols(); ++i) {
    out << (static_cast<double>(i) / rate_hz - pre_s);
    for (Eigen::Index ch = 0; ch < erp.rows(); ++ch) out << ',' << erp(ch, i);
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no rows in " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw DataError("ragged CSV in " + path.string());
    for (size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

void write_attenuation_csv(const std::vector<double>& db,
                           const std::vector<ChannelInfo>& channels, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "channel,attenuation_db\n";
  for (size_t ch = 0; ch < db.size(); ++ch) out << channels[ch].name << ',' << db[ch] << '\n';
}

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;  // residual --key=value tokens
};

PipelineConfig load_pipeline_config(const CommonArgs& args) {
  PipelineConfig cfg;
  if (!args.config.empty()) cfg = PipelineConfig::from_json_file(args.config);
  for (const std::string& tok : args.overrides) {
    if (tok.rfind("--", 0) != 0) throw ConfigError("unrecognized argument '" + tok + "'");
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + tok + "' must look like --key=value");
    cfg.apply_override(tok.substr(2, eq - 2), tok.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trio: artifact suppression for simultaneous EEG/EMG/EOG/ECG in the scanner"};
  app.require_subcommand(1);

  CommonArgs common;

  // --- simulate -------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic session with ground truth");
  std::string sim_out;
  bool sim_full_truth = false;
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--config", common.config, "Session config JSON");
  sim->add_option("--seed", common.seed, "Master seed")->each([&](const std::string&) {
    common.seed_set = true;
  });
  sim->add_flag("--full-truth", sim_full_truth, "Also write per-stage addend containers");

  // --- ga-detect ------------------------------------------------------
  auto* gad = app.add_subcommand("ga-detect", "Detect gradient-artifact onsets");
  std::string in_path, out_path;
  gad->add_option("--in", in_path, "Input container")->required();
  gad->add_option("--out", out_path, "Output markers.csv")->required();
  gad->add_option("--config", common.config, "Pipeline config JSON");
  gad->allow_extras();

  // --- ga-correct -----------------------------------------------------
  auto* gac = app.add_subcommand("ga-correct", "Subtract the gradient artifact");
  std::string ga_onsets, ga_template_out;
  gac->add_option("--in", in_path, "Input container")->required();
  gac->add_option("--out", out_path, "Output container")->required();
  gac->add_option("--onsets", ga_onsets, "Onset markers.csv (default: detect)");
  gac->add_option("--template-out", ga_template_out, "Write the subtracted artifact stream");
  gac->add_option("--config", common.config, "Pipeline config JSON");
  gac->allow_extras();

  // --- rpeaks ---------------------------------------------------------
  auto* rp = app.add_subcommand("rpeaks", "Detect R-peaks on the ECG channel");
  std::string rp_report;
  rp->add_option("--in", in_path, "Input container")->required();
  rp->add_option("--out", out_path, "Output peaks csv (markers.csv format)")->required();
  rp->add_option("--report", rp_report, "Suspect-beat report csv");

  // --- bcg-correct ----------------------------------------------------
  auto* bcg = app.add_subcommand("bcg-correct", "Subtract the pulse artifact");
  std::string bcg_peaks, bcg_template_out;
  bcg->add_option("--in", in_path, "Input container")->required();
  bcg->add_option("--out", out_path, "Output container")->required();
  bcg->add_option("--peaks", bcg_peaks, "R-peak markers.csv (default: detect)");
  bcg->add_option("--template-out", bcg_template_out, "Write the subtracted artifact stream");
  bcg->add_option("--config", common.config, "Pipeline config JSON");
  bcg->allow_extras();

  // --- cca-clean ------------------------------------------------------
  auto* cca = app.add_subcommand("cca-clean", "Reject reference-correlated components");
  double cca_rho = 0.4;
  std::string cca_reject_list, cca_report, cca_components_out;
  cca->add_option("--in", in_path, "Input container")->required();
  cca->add_option("--out", out_path, "Output container")->required();
  cca->add_option("--rho", cca_rho, "Rejection threshold (default 0.4)");
  cca->add_option("--reject", cca_reject_list, "Explicit component list, e.g. 0,2,4");
  cca->add_option("--report", cca_report, "Component report csv");
  cca->add_option("--components-out", cca_components_out, "Component time courses csv");
  cca->add_option("--config", common.config, "Pipeline config JSON");
  cca->allow_extras();

  // --- epoch-erp ------------------------------------------------------
  auto* erp = app.add_subcommand("epoch-erp", "Cut epochs and write the trial average");
  std::string erp_label = "STIM", erp_baseline, erp_compare;
  double erp_pre = 1.0, erp_post = 1.0;
  erp->add_option("--in", in_path, "Input container")->required();
  erp->add_option("--out", out_path, "Output erp csv")->required();
  erp->add_option("--label", erp_label, "Marker label key (default STIM)");
  erp->add_option("--pre", erp_pre, "Window before the marker, seconds");
  erp->add_option("--post", erp_post, "Window after the marker, seconds");
  erp->add_option("--baseline", erp_baseline, "Baseline interval start,end (s, marker-relative)");
  erp->add_option("--compare", erp_compare, "Second erp csv; writes per-channel correlation");

  // --- spectra --------------------------------------------------------
  auto* spec = app.add_subcommand("spectra", "Averaged magnitude spectrum of one channel");
  std::string spec_channel;
  int spec_nfft = 5000;
  spec->add_option("--in", in_path, "Input container")->required();
  spec->add_option("--out", out_path, "Output csv")->required();
  spec->add_option("--channel", spec_channel, "Channel name")->required();
  spec->add_option("--nfft", spec_nfft, "FFT length (default 5000)");

  // --- drift ----------------------------------------------------------
  auto* drift = app.add_subcommand("drift", "Clock drift between image stream and trigger span");
  std::int64_t drift_frames = 0;
  double drift_period = 0.0, drift_span = 0.0;
  drift->add_option("--frames", drift_frames, "Image frame count")->required();
  drift->add_option("--frame-period", drift_period, "Frame period, seconds")->required();
  drift->add_option("--span", drift_span, "Trigger span, seconds")->required();
  drift->add_option("--out", out_path, "Optional JSON output");

  // --- snr ------------------------------------------------------------
  auto* snr = app.add_subcommand("snr", "ROI SNR of a decoded image");
  std::string snr_image, snr_roi, snr_noise;
  snr->add_option("--image", snr_image, "Image csv")->required();
  snr->add_option("--roi", snr_roi, "ROI mask csv (0/1)")->required();
  snr->add_option("--noise", snr_noise, "Noise mask csv (0/1)")->required();

  // --- run-all --------------------------------------------------------
  auto* run = app.add_subcommand("run-all", "Full pipeline: ga -> bcg -> cca");
  bool run_keep = false;
  run->add_option("--config", common.config, "Pipeline config JSON");
  run->add_option("--in", in_path, "Input container (overrides config)");
  run->add_option("--out", out_path, "Output container (overrides config)");
  run->add_flag("--keep-intermediate", run_keep, "Write per-stage containers");
  run->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      SessionConfig cfg;
      if (!common.config.empty()) cfg = session_config_from_json_file(common.config);
      if (common.seed_set) cfg.seed = common.seed;
      const SessionTruth truth = generate_session(cfg);
      const fs::path out(sim_out);
      fs::create_directories(out);
      save_recording(truth.contaminated, out / "contaminated.trio");
      save_recording(truth.clean_eeg, out / "clean.trio");
      save_markers_csv(truth.true_onsets, out / "truth_markers.csv");
      {
        std::ofstream cfg_out(out / "session_config.json");
        cfg_out << session_config_to_json_text(cfg) << '\n';
      }
      if (sim_full_truth) {
        save_recording(truth.base, out / "base.trio");
        save_recording(truth.myo_addend, out / "myo_addend.trio");
        save_recording(truth.cardiac_addend, out / "cardiac_addend.trio");
        save_recording(truth.ga_addend, out / "ga_addend.trio");
      }
      std::cout << "wrote session to " << out.string() << " ("
                << truth.contaminated.n_channels() << " channels, "
                << truth.contaminated.n_samples() << " samples at "
                << truth.contaminated.rate_hz << " Hz)\n";
    } else if (gad->parsed()) {
      common.overrides = gad->remaining();
      const PipelineConfig cfg = load_pipeline_config(common);
      const Recording rec = load_recording(in_path);
      const MarkerList onsets = detect_gradient_onsets(rec, cfg.ga);
      save_markers_csv(onsets, out_path);
      std::cout << onsets.size() << " onsets -> " << out_path << '\n';
    } else if (gac->parsed()) {
      common.overrides = gac->remaining();
      const PipelineConfig cfg = load_pipeline_config(common);
      const Recording rec = load_recording(in_path);
      const MarkerList onsets =
          ga_onsets.empty() ? detect_gradient_onsets(rec, cfg.ga) : load_markers_csv(ga_onsets);
      GaCorrection corr = subtract_gradient_artifact(rec, onsets, cfg.ga);
      save_recording(corr.corrected, out_path);
      if (!ga_template_out.empty()) save_recording(corr.artifact, ga_template_out);
      std::cout << "corrected " << onsets.size() << " repetitions (period "
                << corr.period_samples << " samples) -> " << out_path << '\n';
    } else if (rp->parsed()) {
      const Recording rec = load_recording(in_path);
      const RPeakReport report = detect_r_peaks(rec);
      save_markers_csv(report.peaks, out_path);
      if (!rp_report.empty()) {
        std::ofstream out(rp_report);
        if (!out) throw DataError("cannot write " + rp_report);
        out << "peak_index,sample,reason\n";
        for (const auto& s : report.suspects)
          out << s.peak_index << ',' << report.peaks[s.peak_index].sample << ','
              << to_string(s.reason) << '\n';
      }
      std::cout << report.peaks.size() << " peaks (median RR " << report.rr_median_s
                << " s, " << report.suspects.size() << " suspects) -> " << out_path << '\n';
    } else if (bcg->parsed()) {
      common.overrides = bcg->remaining();
      const PipelineConfig cfg = load_pipeline_config(common);
      const Recording rec = load_recording(in_path);
      const MarkerList peaks =
          bcg_peaks.empty() ? detect_r_peaks(rec).peaks : load_markers_csv(bcg_peaks);
      BcgCorrection corr = subtract_pulse_artifact(rec, peaks, cfg.bcg);
      save_recording(corr.corrected, out_path);
      if (!bcg_template_out.empty()) save_recording(corr.artifact, bcg_template_out);
      std::cout << "corrected " << peaks.size() << " beats (span " << corr.span_samples
                << " samples) -> " << out_path << '\n';
    } else if (cca->parsed()) {
      common.overrides = cca->remaining();
      PipelineConfig cfg = load_pipeline_config(common);
      cfg.cca.rho_threshold = cca_rho;
      const Recording rec = load_recording(in_path);
      const Recording eeg = select_channels(rec, Modality::EEG);
      const Recording refs =
          select_channels(rec, ChannelSelector::modalities({Modality::EMG, Modality::EOG}));
      const CcaResult result = compute_cca(eeg, refs, cfg.cca);
      std::vector<int> reject;
      if (!cca_reject_list.empty()) {
        for (const std::string& tok : split_list(cca_reject_list, ','))
          reject.push_back(std::stoi(tok));
      } else {
        reject = select_artifact_components(result, cfg.cca);
      }
      const Recording cleaned = remove_components(eeg, result, reject);
      Recording out_rec = rec;
      Eigen::Index k = 0;
      for (Eigen::Index ch = 0; ch < out_rec.n_channels(); ++ch)
        if (out_rec.channels[static_cast<size_t>(ch)].modality == Modality::EEG)
          out_rec.data.row(ch) = cleaned.data.row(k++);
      save_recording(out_rec, out_path);
      if (!cca_report.empty()) {
        std::ofstream out(cca_report);
        if (!out) throw DataError("cannot write " + cca_report);
        out << "component,rho,rejected\n";
        for (Eigen::Index i = 0; i < result.correlations.size(); ++i) {
          const bool rej = std::find(reject.begin(), reject.end(), static_cast<int>(i)) !=
                           reject.end();
          out << i << ',' << result.correlations(i) << ',' << (rej ? 1 : 0) << '\n';
        }
      }
      if (!cca_components_out.empty()) {
        const Eigen::MatrixXd u = component_time_courses(result, eeg);
        std::ofstream out(cca_components_out);
        if (!out) throw DataError("cannot write " + cca_components_out);
        out << "sample";
        for (Eigen::Index c = 0; c < u.rows(); ++c) out << ",component" << c;
        out << '\n';
        for (Eigen::Index i = 0; i < u.cols(); ++i) {
          out << i;
          for (Eigen::Index c = 0; c < u.rows(); ++c) out << ',' << u(c, i);
          out << '\n';
        }
      }
      std::cout << "rejected " << reject.size() << " of " << result.correlations.size()
                << " components -> " << out_path << '\n';
    } else if (erp->parsed()) {
      const Recording rec = load_recording(in_path);
      const EpochSet epochs = epoch(rec, erp_label, erp_pre, erp_post);
      std::optional<std::pair<double, double>> baseline;
      if (!erp_baseline.empty()) {
        const auto parts = split_list(erp_baseline, ',');
        if (parts.size() != 2) throw ConfigError("--baseline expects start,end");
        baseline = {std::stod(parts[0]), std::stod(parts[1])};
      }
      const Eigen::MatrixXd avg = average_erp(epochs, baseline);
      write_erp_csv(avg, rec.channels, rec.rate_hz, erp_pre, out_path);
      std::cout << epochs.n_trials() << " trials (" << epochs.n_dropped << " dropped) -> "
                << out_path << '\n';
      if (!erp_compare.empty()) {
        const Eigen::MatrixXd other =
            read_matrix_csv(erp_compare, true).rightCols(avg.rows()).transpose();
        const ChannelCorrelation corr = erp_channel_correlation(avg, other);
        const fs::path corr_path = fs::path(out_path).replace_extension(".corr.csv");
        std::ofstream out(corr_path);
        out << "channel,r\n";
        for (size_t ch = 0; ch < corr.r.size(); ++ch)
          out << rec.channels[ch].name << ',' << corr.r[ch] << '\n';
        std::cout << "mean r " << corr.mean << " (sd " << corr.sd << ") -> "
                  << corr_path.string() << '\n';
      }
    } else if (spec->parsed()) {
      const Recording rec = load_recording(in_path);
      const Spectrum s = magnitude_spectrum(rec, rec.channel_index(spec_channel), spec_nfft);
      std::ofstream out(out_path);
      if (!out) throw DataError("cannot write " + out_path);
      out << "freq_hz,magnitude_uv\n";
      for (size_t i = 0; i < s.freqs_hz.size(); ++i)
        out << s.freqs_hz[i] << ',' << s.magnitude[i] << '\n';
      std::cout << s.freqs_hz.size() << " bins -> " << out_path << '\n';
    } else if (drift->parsed()) {
      const DriftEstimate est = estimate_drift(drift_frames, drift_period, drift_span);
      std::cout << "drift " << est.ms_per_s << " ms/s (threshold "
                << est.flag_threshold_ms_per_s << " ms/s)"
                << (est.flagged ? " FLAGGED" : "") << '\n';
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << "{\n  \"ms_per_s\": " << est.ms_per_s
            << ",\n  \"flag_threshold_ms_per_s\": " << est.flag_threshold_ms_per_s
            << ",\n  \"flagged\": " << (est.flagged ? "true" : "false") << "\n}\n";
      }
    } else if (snr->parsed()) {
      const Eigen::MatrixXd image = read_matrix_csv(snr_image, false);
      const Eigen::MatrixXd roi = read_matrix_csv(snr_roi, false);
      const Eigen::MatrixXd noise = read_matrix_csv(snr_noise, false);
      const double value = roi_snr(image, roi.array() != 0.0, noise.array() != 0.0);
      std::cout << "roi snr " << value << '\n';
    } else if (run->parsed()) {
      common.overrides = run->remaining();
      PipelineConfig cfg = load_pipeline_config(common);
      if (!in_path.empty()) cfg.input = in_path;
      if (!out_path.empty()) cfg.output = out_path;
      if (run_keep) cfg.keep_intermediate = true;
      const RunReport report = run_pipeline(cfg);
      for (const StageReport& s : report.stages) {
        if (s.ran && !s.attenuation_db.empty()) {
          const Recording out_rec = load_recording(cfg.output);
          write_attenuation_csv(s.attenuation_db, out_rec.channels,
                                cfg.output + "." + s.name + ".attenuation.csv");
        }
      }
      std::cout << "pipeline " << report.status << " -> " << cfg.output << " (report "
                << cfg.output << ".report.json)\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
