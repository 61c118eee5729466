#include "tristat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "tristat/error.hpp"

namespace tristat {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Field> SplitCsv(std::string_view line) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    fields.push_back({line.substr(start, end - start), start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double ParseNumberField(const Field& f, std::size_t line, const char* name) {
  double v = 0.0;
  if (!parse_double(Trim(f.text), v)) {
    throw ParseError(line, f.column,
                     std::string(name) + " is not a number: '" + std::string(f.text) + "'");
  }
  return v;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

std::vector<MeasurementRecord> parse_measurements(std::istream& in) {
  std::vector<MeasurementRecord> out;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::map<std::tuple<std::string, std::string, double, int>, std::size_t> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (Trim(line) != kMeasurementHeader) {
        throw ParseError(line_no, 1, "expected header '" + std::string(kMeasurementHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (Trim(line).empty()) continue;

    const std::vector<Field> f = SplitCsv(line);
    if (f.size() != 8) {
      throw ParseError(line_no, 1, "expected 8 fields, found " + std::to_string(f.size()));
    }
    MeasurementRecord rec;
    rec.panel_id = std::string(Trim(f[0].text));
    rec.color_id = std::string(Trim(f[1].text));
    if (rec.panel_id.empty()) throw ParseError(line_no, f[0].column, "empty panel_id");
    if (rec.color_id.empty()) throw ParseError(line_no, f[1].column, "empty color_id");

    rec.brightness = ParseNumberField(f[2], line_no, "brightness");
    if (!(rec.brightness > 0.0 && rec.brightness <= 1.0)) {
      throw ValidationError("line " + std::to_string(line_no) + ": brightness " +
                            format_double(rec.brightness) + " outside (0, 1]");
    }

    const std::string_view rep = Trim(f[3].text);
    int repeat = 0;
    const auto rr = std::from_chars(rep.data(), rep.data() + rep.size(), repeat);
    if (rep.empty() || rr.ec != std::errc() || rr.ptr != rep.data() + rep.size()) {
      throw ParseError(line_no, f[3].column,
                       "repeat_index is not an integer: '" + std::string(f[3].text) + "'");
    }
    if (repeat < 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative repeat_index");
    }
    rec.repeat_index = repeat;

    if (!Trim(f[4].text).empty()) rec.timestamp = ParseNumberField(f[4], line_no, "timestamp");

    const double x = ParseNumberField(f[5], line_no, "X");
    const double y = ParseNumberField(f[6], line_no, "Y");
    const double z = ParseNumberField(f[7], line_no, "Z");
    if (x < 0.0 || y < 0.0 || z < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": negative tristimulus value");
    }
    rec.xyz = Tristimulus(x, y, z);

    const auto key = std::make_tuple(rec.panel_id, rec.color_id, rec.brightness, rec.repeat_index);
    const auto [it, inserted] = seen.emplace(key, line_no);
    if (!inserted) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate (panel_id, color_id, brightness, repeat_index) "
                            "first seen on line " + std::to_string(it->second));
    }
    out.push_back(std::move(rec));
  }
  if (!header_seen) throw ParseError(1, 1, "empty file, missing header");
  return out;
}

std::vector<MeasurementRecord> read_measurements(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return parse_measurements(in);
}

std::string format_measurements(std::span<const MeasurementRecord> records) {
  std::string out(kMeasurementHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.panel_id;
    out += ',';
    out += r.color_id;
    out += ',';
    out += format_double(r.brightness);
    out += ',';
    out += std::to_string(r.repeat_index);
    out += ',';
    if (r.timestamp) out += format_double(*r.timestamp);
    out += ',';
    out += format_double(r.xyz.X());
    out += ',';
    out += format_double(r.xyz.Y());
    out += ',';
    out += format_double(r.xyz.Z());
    out += '\n';
  }
  return out;
}

void write_measurements(const std::filesystem::path& path,
                        std::span<const MeasurementRecord> records) {
  for (const auto& r : records) {
    if (r.panel_id.find_first_of(",\n") != std::string::npos ||
        r.color_id.find_first_of(",\n") != std::string::npos) {
      throw ValidationError("ids must not contain commas or newlines");
    }
  }
  atomic_write(path, format_measurements(records));
}

KeyValueDocument KeyValueDocument::Parse(std::istream& in) {
  KeyValueDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 1, "expected 'key = value'");
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, 1, "empty key");
    if (doc.Has(key)) throw ParseError(line_no, 1, "duplicate key '" + key + "'");
    doc.Set(key, std::string(Trim(line.substr(eq + 1))));
  }
  return doc;
}

void KeyValueDocument::Set(const std::string& key, const std::string& value) {
  if (!values_.contains(key)) order_.push_back(key);
  values_[key] = value;
}

const std::string& KeyValueDocument::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("missing key '" + key + "'");
  return it->second;
}

double KeyValueDocument::GetDouble(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(Get(key), v)) {
    throw ValidationError("key '" + key + "' is not a number: '" + Get(key) + "'");
  }
  return v;
}

long long KeyValueDocument::GetInt(const std::string& key) const {
  const std::string& s = Get(key);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("key '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

void KeyValueDocument::RequireKind(std::string_view kind) const {
  if (Get("kind") != kind) {
    throw ValidationError("expected a " + std::string(kind) + " document, found '" +
                          Get("kind") + "'");
  }
  const long long version = GetInt("format_version");
  if (version != kFormatVersion) {
    throw ValidationError("unsupported format_version " + std::to_string(version));
  }
}

std::string KeyValueDocument::Format(std::string_view comment) const {
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  for (const auto& key : order_) {
    out += key;
    out += " = ";
    out += values_.at(key);
    out += '\n';
  }
  return out;
}

KeyValueDocument to_document(const NoiseModel& model) {
  KeyValueDocument doc;
  doc.Set("format_version", std::to_string(kFormatVersion));
  doc.Set("kind", "noise_model");
  doc.Set("a", model.a());
  doc.Set("ratio", model.ratio());
  doc.Set("provenance", std::string(to_string(model.provenance())));
  for (const auto& fit : model.fits()) {
    const std::string prefix = "fit." + std::string(to_string(fit.direction)) + ".";
    doc.Set(prefix + "k", fit.k);
    doc.Set(prefix + "residual_rms", fit.residual_rms);
    doc.Set(prefix + "n", std::to_string(fit.n));
  }
  return doc;
}

NoiseModel noise_model_from_document(const KeyValueDocument& doc) {
  doc.RequireKind("noise_model");
  NoiseModel model(doc.GetDouble("a"), doc.GetDouble("ratio"),
                   provenance_from_string(doc.Get("provenance")));
  std::vector<FitResult> fits;
  for (Direction d : kAllDirections) {
    const std::string prefix = "fit." + std::string(to_string(d)) + ".";
    if (!doc.Has(prefix + "k")) continue;
    FitResult fit;
    fit.direction = d;
    fit.k = doc.GetDouble(prefix + "k");
    fit.residual_rms = doc.GetDouble(prefix + "residual_rms");
    fit.n = static_cast<std::size_t>(doc.GetInt(prefix + "n"));
    fits.push_back(fit);
  }
  model.set_fits(std::move(fits));
  return model;
}

void write_noise_model(const std::filesystem::path& path, const NoiseModel& model) {
  atomic_write(path, to_document(model).Format("tristat noise model"));
}

NoiseModel read_noise_model(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return noise_model_from_document(KeyValueDocument::Parse(in));
}

KeyValueDocument to_document(const CalibrationMatrix& calib) {
  KeyValueDocument doc;
  doc.Set("format_version", std::to_string(kFormatVersion));
  doc.Set("kind", "calibration_matrix");
  doc.Set("weighting", std::string(to_string(calib.weighting)));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      doc.Set("m" + std::to_string(i + 1) + std::to_string(j + 1), calib.M(i, j));
    }
  }
  doc.Set("fit_pairs", std::to_string(calib.fit_pairs));
  doc.Set("condition_number", calib.condition_number);
  return doc;
}

CalibrationMatrix calibration_from_document(const KeyValueDocument& doc) {
  doc.RequireKind("calibration_matrix");
  CalibrationMatrix calib;
  calib.weighting = weighting_from_string(doc.Get("weighting"));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      calib.M(i, j) = doc.GetDouble("m" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  }
  const long long pairs = doc.GetInt("fit_pairs");
  if (pairs < 3) throw ValidationError("calibration fit_pairs must be >= 3");
  calib.fit_pairs = static_cast<std::size_t>(pairs);
  calib.condition_number = doc.GetDouble("condition_number");
  return calib;
}

void write_calibration(const std::filesystem::path& path, const CalibrationMatrix& calib) {
  atomic_write(path, to_document(calib).Format("tristat calibration matrix (row-major)"));
}

CalibrationMatrix read_calibration(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return calibration_from_document(KeyValueDocument::Parse(in));
}

std::string format_histogram(const DeltaEHistogram& h) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << format_double(h.edges[std::min(i, h.edges.size() - 1)]) << ',';
    if (i + 1 < h.edges.size()) os << format_double(h.edges[i + 1]);
    os << ',' << h.counts[i] << '\n';
  }
  return os.str();
}

DeltaEHistogram read_histogram(const std::filesystem::path& path, DeltaEGrouping grouping) {
  std::ifstream in = OpenForRead(path);
  std::string raw;
  std::size_t line_no = 0;
  DeltaEHistogram h;
  h.grouping = grouping;
  double weighted = 0.0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line_no == 1) {
      if (line != "bin_lo,bin_hi,count") throw ParseError(1, 1, "expected histogram header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 3) throw ParseError(line_no, 1, "expected 3 fields");
    const double lo = ParseNumberField(f[0], line_no, "bin_lo");
    const double count = ParseNumberField(f[2], line_no, "count");
    if (count < 0.0) throw ValidationError("line " + std::to_string(line_no) + ": negative count");
    double center = lo;
    if (!Trim(f[1].text).empty()) {
      const double hi = ParseNumberField(f[1], line_no, "bin_hi");
      if (!(hi > lo)) throw ValidationError("line " + std::to_string(line_no) + ": empty bin");
      center = 0.5 * (lo + hi);
      if (h.edges.empty()) h.edges.push_back(lo);
      h.edges.push_back(hi);
    }
    const auto n = static_cast<std::size_t>(std::llround(count));
    h.counts.push_back(n);
    h.sample_count += n;
    weighted += center * static_cast<double>(n);
  }
  if (h.counts.empty()) throw ValidationError("histogram '" + path.string() + "' has no bins");
  h.mean = h.sample_count > 0 ? weighted / static_cast<double>(h.sample_count) : 0.0;
  return h;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError("cannot move '" + tmp.string() + "' to '" + path.string() +
                          "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace tristat
