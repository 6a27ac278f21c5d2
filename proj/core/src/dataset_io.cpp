#include "skelgait/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace skelgait {

using nlohmann::json;

std::optional<DataFormat> parse_data_format(std::string_view text) {
  if (text == "json") return DataFormat::json;
  if (text == "csv") return DataFormat::csv;
  return std::nullopt;
}

DataFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DataFormat::csv : DataFormat::json;
}

std::filesystem::path csv_metadata_path(const std::filesystem::path& path) {
  std::filesystem::path meta = path;
  meta += ".meta.csv";
  return meta;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("cannot format double");
  return std::string(buf, end);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------- JSON

std::string record_context(std::size_t index, const std::string& subject) {
  return "record " + std::to_string(index) + (subject.empty() ? "" : " ('" + subject + "')");
}

double json_coordinate(const json& v, const std::string& where) {
  if (v.is_number()) {
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(where + ": non-finite coordinate");
    return x;
  }
  if (v.is_null()) throw ValidationError(where + ": non-finite coordinate (null)");
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double parsed = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), parsed);
    if (ec == std::errc{} && ptr == s.data() + s.size() && !std::isfinite(parsed)) {
      throw ValidationError(where + ": non-finite coordinate '" + s + "'");
    }
    if (s == "NaN" || s == "nan" || s == "inf" || s == "-inf" || s == "Infinity" ||
        s == "-Infinity") {
      throw ValidationError(where + ": non-finite coordinate '" + s + "'");
    }
  }
  throw ParseError(where + ": coordinate must be a number");
}

SkeletonSequence sequence_from_json(const json& rec, std::size_t index) {
  if (!rec.is_object()) throw ParseError(record_context(index, "") + ": not an object");
  SkeletonSequence seq;
  if (!rec.contains("subject_id") || !rec["subject_id"].is_string()) {
    throw ParseError(record_context(index, "") + ": missing string field 'subject_id'");
  }
  seq.subject_id = rec["subject_id"].get<std::string>();
  const std::string ctx = record_context(index, seq.subject_id);

  if (auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(ctx + ": 'label' must be a string or null");
    auto label = parse_label(it->get<std::string>());
    if (!label) throw ParseError(ctx + ": unknown label '" + it->get<std::string>() + "'");
    seq.label = label;
  }
  if (auto it = rec.find("ados"); it != rec.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError(ctx + ": 'ados' must be an object or null");
    try {
      AdosRecord ados;
      ados.score = it->at("score").get<int>();
      ados.module_id = it->at("module").get<int>();
      ados.age_years = it->at("age").get<int>();
      seq.ados = ados;
    } catch (const json::exception& e) {
      throw ParseError(ctx + ": bad 'ados' object: " + e.what());
    }
  }
  if (auto it = rec.find("provenance"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(ctx + ": 'provenance' must be a string");
    try {
      seq.provenance = Provenance::parse(it->get<std::string>());
    } catch (const ValidationError& e) {
      throw ParseError(ctx + ": " + e.what());
    }
  }
  if (auto it = rec.find("frame_rate"); it != rec.end() && !it->is_null()) {
    if (!it->is_number()) throw ParseError(ctx + ": 'frame_rate' must be a number");
    seq.frame_rate = it->get<double>();
  }

  auto fit = rec.find("frames");
  if (fit == rec.end() || !fit->is_array()) {
    throw ParseError(ctx + ": missing array field 'frames'");
  }
  const json& frames = *fit;
  const std::size_t t_count = frames.size();
  if (t_count == 0) throw ValidationError(ctx + ": no frames");
  if (!frames[0].is_array()) throw ParseError(ctx + ": frame 0 is not an array");
  const std::size_t j_count = frames[0].size();
  if (j_count != kBodyJoints && j_count != kUpperBodyJoints) {
    throw ValidationError(ctx + ": joint count must be 25 or 10, got " + std::to_string(j_count));
  }
  seq.data = Tensor3(kCoordinateChannels, t_count, j_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    const json& frame = frames[t];
    if (!frame.is_array() || frame.size() != j_count) {
      throw ParseError(ctx + ": frame " + std::to_string(t) + " must hold " +
                       std::to_string(j_count) + " joints");
    }
    for (std::size_t j = 0; j < j_count; ++j) {
      const json& point = frame[j];
      const std::string where = ctx + " frame " + std::to_string(t) + " joint " + std::to_string(j);
      if (!point.is_array() || point.size() != kCoordinateChannels) {
        throw ParseError(where + ": expected [x, y, z]");
      }
      for (std::size_t c = 0; c < kCoordinateChannels; ++c) {
        seq.data(c, t, j) = json_coordinate(point[c], where);
      }
    }
  }
  try {
    validate(seq);
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  return seq;
}

json sequence_to_json(const SkeletonSequence& seq) {
  json rec = json::object();
  rec["subject_id"] = seq.subject_id;
  rec["label"] = seq.label ? json(std::string(to_string(*seq.label))) : json(nullptr);
  if (seq.ados) {
    rec["ados"] = {{"score", seq.ados->score},
                   {"module", seq.ados->module_id},
                   {"age", seq.ados->age_years}};
  } else {
    rec["ados"] = nullptr;
  }
  rec["provenance"] = seq.provenance.to_string();
  if (seq.frame_rate) rec["frame_rate"] = *seq.frame_rate;
  json frames = json::array();
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    json frame = json::array();
    for (std::size_t j = 0; j < seq.joints(); ++j) {
      frame.push_back({seq.data(0, t, j), seq.data(1, t, j), seq.data(2, t, j)});
    }
    frames.push_back(std::move(frame));
  }
  rec["frames"] = std::move(frames);
  return rec;
}

Dataset load_json(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) throw ParseError("'" + path.string() + "': top level must be an object");
  if (auto it = doc.find("topology"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != "kinect25") {
      throw ParseError("'" + path.string() + "': unsupported topology (expected \"kinect25\")");
    }
  }
  auto sit = doc.find("sequences");
  if (sit == doc.end() || !sit->is_array()) {
    throw ParseError("'" + path.string() + "': missing array 'sequences'");
  }
  Dataset ds;
  ds.sequences.reserve(sit->size());
  for (std::size_t i = 0; i < sit->size(); ++i) {
    ds.sequences.push_back(sequence_from_json((*sit)[i], i));
  }
  return ds;
}

void save_json(const Dataset& ds, const std::filesystem::path& path) {
  json doc = json::object();
  doc["topology"] = "kinect25";
  json seqs = json::array();
  for (const auto& s : ds.sequences) seqs.push_back(sequence_to_json(s));
  doc["sequences"] = std::move(seqs);
  auto out = open_for_write(path);
  out << doc.dump() << '\n';
  finish_write(out, path);
}

// ---------------------------------------------------------------- CSV

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (ch != '\r') {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

template <typename T>
T parse_number(const std::string& field, const std::string& where) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(where + ": cannot parse number '" + field + "'");
  }
  return value;
}

double parse_coordinate(const std::string& field, const std::string& where) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc{} && ptr == field.data() + field.size() && !field.empty()) {
    if (!std::isfinite(value)) throw ValidationError(where + ": non-finite coordinate");
    return value;
  }
  throw ParseError(where + ": cannot parse coordinate '" + field + "'");
}

constexpr std::string_view kCsvHeader = "record,subject_id,frame,joint,x,y,z";
constexpr std::string_view kMetaHeader =
    "record,subject_id,label,ados_score,ados_module,ados_age,provenance,frame_rate,frames,joints";

Dataset load_csv(const std::filesystem::path& path) {
  const auto meta_path = csv_metadata_path(path);
  std::ifstream meta(meta_path);
  if (!meta) throw IoError("cannot open metadata sidecar '" + meta_path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(meta, line) || split_csv_line(line) != split_csv_line(std::string(kMetaHeader))) {
    throw ParseError("'" + meta_path.string() + "' line 1: unexpected header");
  }
  ++line_no;
  Dataset ds;
  while (std::getline(meta, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = "'" + meta_path.string() + "' line " + std::to_string(line_no);
    auto f = split_csv_line(line);
    if (f.size() != 10) throw ParseError(where + ": expected 10 fields");
    const auto record = parse_number<std::size_t>(f[0], where);
    if (record != ds.sequences.size()) throw ParseError(where + ": records must be numbered 0..n-1");
    SkeletonSequence seq;
    seq.subject_id = f[1];
    if (!f[2].empty()) {
      auto label = parse_label(f[2]);
      if (!label) throw ParseError(where + ": unknown label '" + f[2] + "'");
      seq.label = label;
    }
    if (!f[3].empty() || !f[4].empty() || !f[5].empty()) {
      seq.ados = AdosRecord{parse_number<int>(f[3], where), parse_number<int>(f[4], where),
                            parse_number<int>(f[5], where)};
    }
    try {
      seq.provenance = Provenance::parse(f[6]);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!f[7].empty()) seq.frame_rate = parse_number<double>(f[7], where);
    const auto frames = parse_number<std::size_t>(f[8], where);
    const auto joints = parse_number<std::size_t>(f[9], where);
    if (frames == 0) throw ValidationError(where + ": no frames");
    if (joints != kBodyJoints && joints != kUpperBodyJoints) {
      throw ValidationError(where + ": joint count must be 25 or 10, got " + std::to_string(joints));
    }
    seq.data = Tensor3(kCoordinateChannels, frames, joints, std::numeric_limits<double>::quiet_NaN());
    ds.sequences.push_back(std::move(seq));
  }

  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  line_no = 0;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(std::string(kCsvHeader))) {
    throw ParseError("'" + path.string() + "' line 1: unexpected header");
  }
  ++line_no;
  std::vector<std::size_t> filled(ds.sequences.size(), 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = "'" + path.string() + "' line " + std::to_string(line_no);
    auto f = split_csv_line(line);
    if (f.size() != 7) throw ParseError(where + ": expected 7 fields");
    const auto record = parse_number<std::size_t>(f[0], where);
    if (record >= ds.sequences.size()) throw ParseError(where + ": unknown record " + f[0]);
    auto& seq = ds.sequences[record];
    if (f[1] != seq.subject_id) throw ParseError(where + ": subject_id does not match metadata");
    const auto t = parse_number<std::size_t>(f[2], where);
    const auto j = parse_number<std::size_t>(f[3], where);
    if (t >= seq.frames() || j >= seq.joints()) throw ParseError(where + ": frame/joint out of range");
    if (!std::isnan(seq.data(0, t, j))) throw ParseError(where + ": duplicate frame/joint entry");
    for (std::size_t c = 0; c < kCoordinateChannels; ++c) {
      seq.data(c, t, j) = parse_coordinate(f[4 + c], where);
    }
    ++filled[record];
  }
  for (std::size_t i = 0; i < ds.sequences.size(); ++i) {
    auto& seq = ds.sequences[i];
    if (filled[i] != seq.frames() * seq.joints()) {
      throw ParseError("'" + path.string() + "': " + record_context(i, seq.subject_id) +
                       " is missing coordinate rows");
    }
    try {
      validate(seq);
    } catch (const ValidationError& e) {
      throw ValidationError(record_context(i, seq.subject_id) + ": " + e.what());
    }
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  const auto meta_path = csv_metadata_path(path);
  auto meta = open_for_write(meta_path);
  meta << kMetaHeader << '\n';
  for (std::size_t i = 0; i < ds.sequences.size(); ++i) {
    const auto& s = ds.sequences[i];
    meta << i << ',' << s.subject_id << ',' << (s.label ? to_string(*s.label) : "") << ',';
    if (s.ados) {
      meta << s.ados->score << ',' << s.ados->module_id << ',' << s.ados->age_years;
    } else {
      meta << ",,";
    }
    meta << ',' << s.provenance.to_string() << ','
         << (s.frame_rate ? format_double(*s.frame_rate) : "") << ',' << s.frames() << ','
         << s.joints() << '\n';
  }
  finish_write(meta, meta_path);

  auto out = open_for_write(path);
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < ds.sequences.size(); ++i) {
    const auto& s = ds.sequences[i];
    for (std::size_t t = 0; t < s.frames(); ++t) {
      for (std::size_t j = 0; j < s.joints(); ++j) {
        out << i << ',' << s.subject_id << ',' << t << ',' << j << ','
            << format_double(s.data(0, t, j)) << ',' << format_double(s.data(1, t, j)) << ','
            << format_double(s.data(2, t, j)) << '\n';
      }
    }
  }
  finish_write(out, path);
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  return format == DataFormat::json ? load_json(path) : load_csv(path);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path, DataFormat format) {
  for (const auto& s : ds.sequences) {
    if (s.subject_id.find_first_of(",\n\r") != std::string::npos && format == DataFormat::csv) {
      throw ValidationError("subject id '" + s.subject_id + "' cannot be stored in CSV");
    }
    validate(s);
  }
  if (format == DataFormat::json) {
    save_json(ds, path);
  } else {
    save_csv(ds, path);
  }
}

}  // namespace skelgait
