#include "dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "errors.hpp"

namespace etpsim {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const char* what, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(std::string("malformed ") + what + " '" + text + "'", line);
  }
  return v;
}

std::uint64_t parse_count(const std::string& text, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("counts must be a non-negative integer, got '" + text + "'", line);
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw InternalError("cannot format number");
  return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& out, const CoincidenceDataset& d) {
  out << kDatasetCsvHeader << '\n';
  for (const auto& r : d.records) {
    out << r.repetition << ',' << format_double(r.angle_deg) << ',' << r.counts << ','
        << format_double(r.sigma()) << '\n';
  }
}

CoincidenceDataset read_dataset_csv(std::istream& in, Scan scan) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset file", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetCsvHeader) {
    throw ParseError(std::string("expected header '") + kDatasetCsvHeader + "'", line_no);
  }

  CoincidenceDataset d;
  d.plan.scan = scan;
  std::map<double, int> grid;  // angle -> grid index
  int max_rep = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) throw ParseError("expected 4 columns", line_no);
    const double rep = parse_number(fields[0], "repetition", line_no);
    if (rep < 0 || rep != std::floor(rep) || rep > 1e9) {
      throw ParseError("repetition must be a non-negative integer", line_no);
    }
    CountRecord rec;
    rec.repetition = static_cast<int>(rep);
    rec.angle_deg = parse_number(fields[1], "angle_deg", line_no);
    rec.counts = parse_count(fields[2], line_no);
    const double sigma = parse_number(fields[3], "sigma", line_no);
    if (std::abs(sigma - rec.sigma()) > 1e-9 * std::max(1.0, rec.sigma())) {
      throw ParseError("sigma does not equal sqrt(counts)", line_no);
    }
    const auto [it, inserted] = grid.emplace(rec.angle_deg, static_cast<int>(grid.size()));
    if (inserted) d.plan.angles_deg.push_back(rec.angle_deg);
    rec.grid_index = it->second;
    max_rep = std::max(max_rep, rec.repetition);
    d.records.push_back(rec);
  }
  if (d.records.empty()) throw ParseError("dataset has no records", line_no);
  d.plan.repetitions = max_rep + 1;
  return d;
}

void write_dataset_json(std::ostream& out, const CoincidenceDataset& d) {
  nlohmann::ordered_json j;
  j["scan"] = std::string(to_string(d.plan.scan));
  j["seed"] = d.plan.seed;
  j["window_s"] = d.plan.window_s;
  j["rate_scale"] = d.plan.rate_scale;
  j["repetitions"] = d.plan.repetitions;
  j["angles_deg"] = d.plan.angles_deg;
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : d.records) {
    recs.push_back({{"repetition", r.repetition},
                    {"angle_deg", r.angle_deg},
                    {"counts", r.counts},
                    {"sigma", r.sigma()}});
  }
  out << j.dump(2) << '\n';
}

void write_model_csv(std::ostream& out, const std::vector<ModelPoint>& curve) {
  out << kModelCsvHeader << '\n';
  for (const auto& p : curve) {
    out << format_double(p.angle_deg) << ',' << format_double(p.expected_counts) << '\n';
  }
}

void write_model_json(std::ostream& out, Scan scan, const std::vector<ModelPoint>& curve) {
  nlohmann::ordered_json j;
  j["scan"] = std::string(to_string(scan));
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : curve) {
    pts.push_back({{"angle_deg", p.angle_deg}, {"expected_counts", p.expected_counts}});
  }
  out << j.dump(2) << '\n';
}

std::vector<ModelPoint> model_curve(const MixtureModel& m, const ExperimentPlan& plan) {
  std::vector<ModelPoint> out;
  for (double a : plan.angles_deg) out.push_back({a, expected_counts(m, plan, deg_to_rad(a))});
  return out;
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace etpsim
