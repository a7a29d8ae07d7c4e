#include "trio/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trio/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace trio {

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Modality modality_from_channel_name(const std::string& name) {
  if (name.rfind("EOG", 0) == 0) return Modality::EOG;
  if (name.rfind("EMG", 0) == 0) return Modality::EMG;
  if (name.rfind("ECG", 0) == 0) return Modality::ECG;
  return Modality::EEG;
}

}  // namespace

MarkerList load_markers_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  MarkerList markers;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "sample,label") continue;  // header optional on input
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError("malformed marker row '" + line + "' in " + path.string());
    Marker m;
    try {
      m.sample = std::stoll(line.substr(0, comma));
    } catch (const std::exception&) {
      throw DataError("malformed marker sample in " + path.string());
    }
    m.label = line.substr(comma + 1);
    markers.push_back(std::move(m));
  }
  if (!markers_sorted(markers))
    throw DataError("markers in " + path.string() + " are not sorted by sample");
  return markers;
}

void save_markers_csv(const MarkerList& markers, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "sample,label\n";
  for (const Marker& m : markers) out << m.sample << ',' << m.label << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

Recording load_recording(const fs::path& container) {
  if (!fs::exists(container)) throw DataError("container " + container.string() + " does not exist");

  const json header = read_json_file(container / "header.json");
  Recording rec;
  try {
    rec.rate_hz = header.at("rate_hz").get<double>();
    const auto& chans = header.at("channels");
    for (const auto& c : chans) {
      ChannelInfo info;
      info.name = c.at("name").get<std::string>();
      info.modality = modality_from_string(c.at("modality").get<std::string>());
      info.unit = c.value("unit", std::string("uV"));
      rec.channels.push_back(std::move(info));
    }
  } catch (const json::exception& e) {
    throw DataError("bad header in " + container.string() + ": " + e.what());
  }
  const auto n_samples = header.at("n_samples").get<std::int64_t>();
  const auto n_channels = static_cast<std::int64_t>(rec.channels.size());
  if (n_samples < 0) throw DataError("negative n_samples in header");

  const fs::path data_path = container / "data.f32";
  std::ifstream data_in(data_path, std::ios::binary);
  if (!data_in) throw DataError("cannot open " + data_path.string());
  data_in.seekg(0, std::ios::end);
  const std::int64_t bytes = data_in.tellg();
  data_in.seekg(0, std::ios::beg);
  const std::int64_t expected = n_channels * n_samples * static_cast<std::int64_t>(sizeof(float));
  if (bytes != expected)
    throw DataError("length mismatch in " + data_path.string() + ": header implies " +
                    std::to_string(expected) + " bytes, file has " + std::to_string(bytes));

  std::vector<float> buf(static_cast<size_t>(n_channels * n_samples));
  if (!buf.empty())
    data_in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (!data_in) throw DataError("short read from " + data_path.string());

  // data.f32 is frame-major, which is exactly column-major channels x samples.
  rec.data = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic>>(
                 buf.data(), n_channels, n_samples)
                 .cast<double>();

  const fs::path markers_path = container / "markers.csv";
  if (fs::exists(markers_path)) rec.markers = load_markers_csv(markers_path);

  rec.validate();
  return rec;
}

void save_recording(const Recording& rec, const fs::path& container) {
  if (!rec.data.allFinite()) throw DataError("non-finite value in recording data");
  rec.validate();

  std::error_code ec;
  fs::create_directories(container, ec);
  if (ec) throw DataError("cannot create " + container.string() + ": " + ec.message());

  json header;
  header["rate_hz"] = rec.rate_hz;
  header["n_samples"] = static_cast<std::int64_t>(rec.n_samples());
  header["channels"] = json::array();
  for (const ChannelInfo& c : rec.channels) {
    header["channels"].push_back({{"name", c.name}, {"modality", to_string(c.modality)}, {"unit", c.unit}});
  }
  {
    std::ofstream out(container / "header.json");
    if (!out) throw DataError("cannot write " + (container / "header.json").string());
    out << header.dump(2) << '\n';
    if (!out) throw DataError("write failed for header.json");
  }
  {
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic> f32 = rec.data.cast<float>();
    std::ofstream out(container / "data.f32", std::ios::binary);
    if (!out) throw DataError("cannot write " + (container / "data.f32").string());
    out.write(reinterpret_cast<const char*>(f32.data()),
              static_cast<std::streamsize>(sizeof(float)) * f32.size());
    if (!out) throw DataError("write failed for data.f32");
  }
  save_markers_csv(rec.markers, container / "markers.csv");
}

Recording load_recording_csv(const fs::path& path, double default_rate_hz) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV file " + path.string());
  std::vector<std::string> names = split_csv_line(strip(line));
  if (names.empty()) throw DataError("missing CSV header in " + path.string());
  for (auto& n : names) n = strip(n);

  bool has_time = false;
  {
    std::string first = names.front();
    for (auto& c : first) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    has_time = (first == "time" || first == "t");
  }
  const size_t first_chan = has_time ? 1 : 0;
  if (names.size() <= first_chan) throw DataError("no channel columns in " + path.string());

  std::vector<double> times;
  std::vector<std::vector<double>> cols(names.size() - first_chan);
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != names.size())
      throw DataError("CSV row width mismatch in " + path.string());
    size_t f = 0;
    try {
      if (has_time) times.push_back(std::stod(fields[f++]));
      for (size_t c = 0; c < cols.size(); ++c) cols[c].push_back(std::stod(fields[f++]));
    } catch (const std::exception&) {
      throw DataError("malformed numeric value in " + path.string());
    }
  }
  const auto n = static_cast<Eigen::Index>(cols.front().size());
  if (n == 0) throw DataError("no samples in " + path.string());

  Recording rec;
  rec.rate_hz = default_rate_hz;
  if (has_time && times.size() >= 2) {
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (dt > 0) rec.rate_hz = 1.0 / dt;
  }
  rec.data.resize(static_cast<Eigen::Index>(cols.size()), n);
  for (size_t c = 0; c < cols.size(); ++c) {
    rec.channels.push_back({names[first_chan + c], modality_from_channel_name(names[first_chan + c]), "uV"});
    rec.data.row(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::VectorXd>(cols[c].data(), n).transpose();
  }
  rec.validate();
  return rec;
}

}  // namespace trio
