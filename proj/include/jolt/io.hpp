#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "jolt/energy.hpp"
#include "jolt/ersom.hpp"
#include "jolt/errors.hpp"
#include "jolt/framework.hpp"
#include "jolt/scenario.hpp"
#include "jolt/tsplib.hpp"

namespace jolt {

inline constexpr int kOutputSchemaVersion = 1;

// ---- JSON ----------------------------------------------------------------

inline nlohmann::json to_json(const EnergyReport& r) {
  return {
      {"schema_version", kOutputSchemaVersion},
      {"e_iot_j", r.e_iot},
      {"e_iot_per_device_j", r.e_iot_j},
      {"e_hov_j", r.e_hov},
      {"hover_times_s", r.hover_times_s},
      {"tour_length_m", r.tour_length_m},
      {"e_fly_j", r.e_fly},
      {"weight_hover", r.weight_hover},
      {"weight_fly", r.weight_fly},
      {"objective", r.objective},
      {"total_energy_j", r.total_energy()},
  };
}

inline EnergyReport energy_report_from_json(const nlohmann::json& j) {
  try {
    EnergyReport r;
    r.e_iot = j.at("e_iot_j").get<double>();
    r.e_iot_j = j.at("e_iot_per_device_j").get<std::vector<double>>();
    r.e_hov = j.at("e_hov_j").get<double>();
    r.hover_times_s = j.at("hover_times_s").get<std::vector<double>>();
    r.tour_length_m = j.at("tour_length_m").get<double>();
    r.e_fly = j.at("e_fly_j").get<double>();
    r.weight_hover = j.at("weight_hover").get<double>();
    r.weight_fly = j.at("weight_fly").get<double>();
    r.objective = j.at("objective").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed energy report: ") + e.what());
  }
}

inline nlohmann::json to_json(const Solution& s) {
  nlohmann::json stops = nlohmann::json::array();
  for (auto p : s.deployment.stops) stops.push_back({{"x_m", p.x}, {"y_m", p.y}});
  nlohmann::json rows = nlohmann::json::array();
  const auto& a = s.assignment;
  for (std::size_t i = 0; i < a.devices; ++i) {
    rows.push_back({{"device", i},
                    {"stop", a.stop_of[i]},
                    {"rate_bps", a.assigned_rate(i)},
                    {"phase_indices", a.phases[i].indices}});
  }
  const int levels = a.phases.empty() ? 0 : a.phases.front().levels;
  return {
      {"schema_version", kOutputSchemaVersion},
      {"stops", stops},
      {"k", s.deployment.size()},
      {"tour", s.tour},
      {"phase_levels", levels},
      {"assignment", rows},
      {"energy", to_json(s.report)},
  };
}

// ---- CSV -----------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    throw ParameterError("no column '" + name + "'");
  }
};

namespace detail {

inline std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (c) out << ',';
    out << csv_field(row[c]);
  }
  out << '\n';
}

}  // namespace detail

inline void write_csv(std::ostream& out, const CsvTable& t) {
  detail::write_csv_row(out, t.header);
  for (const auto& r : t.rows) detail::write_csv_row(out, r);
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(records.size() + 1, "unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw ParseError(1, "empty CSV");
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw ParseError(r + 1, "expected " + std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

inline double csv_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  if (!detail::parse_double(s, v)) throw ParameterError("not a number: '" + s + "'");
  return v;
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

inline CsvTable trace_table(const std::vector<TraceRow>& trace) {
  CsvTable t{{"iteration", "objective", "k", "move"}, {}};
  for (const auto& r : trace) {
    t.rows.push_back({std::to_string(r.iteration), csv_number(r.objective), std::to_string(r.k),
                      std::string(move_name(r.move))});
  }
  return t;
}

inline std::vector<TraceRow> trace_from_table(const CsvTable& t) {
  std::vector<TraceRow> out;
  const std::size_t ci = t.column("iteration"), co = t.column("objective"), ck = t.column("k"), cm = t.column("move");
  for (const auto& r : t.rows) {
    TraceRow row;
    row.iteration = static_cast<std::size_t>(csv_double(r[ci]));
    row.objective = csv_double(r[co]);
    row.k = static_cast<std::size_t>(csv_double(r[ck]));
    const std::string& m = r[cm];
    if (m == "initial") row.move = Move::initial;
    else if (m == "insert") row.move = Move::insert;
    else if (m == "replace") row.move = Move::replace;
    else if (m == "delete") row.move = Move::remove;
    else if (m == "none") row.move = Move::none;
    else throw ParameterError("unknown move '" + m + "'");
    out.push_back(row);
  }
  return out;
}

struct RingSnapshotRow {
  std::size_t epoch = 0;
  std::size_t cell = 0;
  Point2 weight;
  std::size_t counter = 0;
};

inline void append_snapshot(std::vector<RingSnapshotRow>& rows, std::size_t epoch, const Ring& ring) {
  for (std::size_t i = 0; i < ring.size(); ++i) rows.push_back({epoch, i, ring.cells[i].weight, ring.cells[i].counter});
}

inline CsvTable snapshot_table(const std::vector<RingSnapshotRow>& rows) {
  CsvTable t{{"epoch", "cell", "x", "y", "counter"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.epoch), std::to_string(r.cell), csv_number(r.weight.x), csv_number(r.weight.y),
                      std::to_string(r.counter)});
  }
  return t;
}

inline std::vector<RingSnapshotRow> snapshots_from_table(const CsvTable& t) {
  std::vector<RingSnapshotRow> out;
  const std::size_t ce = t.column("epoch"), cc = t.column("cell"), cx = t.column("x"), cy = t.column("y"),
                    cn = t.column("counter");
  for (const auto& r : t.rows) {
    out.push_back({static_cast<std::size_t>(csv_double(r[ce])), static_cast<std::size_t>(csv_double(r[cc])),
                   {csv_double(r[cx]), csv_double(r[cy])}, static_cast<std::size_t>(csv_double(r[cn]))});
  }
  return out;
}

inline CsvTable tour_table(std::span<const Point2> stops, std::span<const std::size_t> order) {
  CsvTable t{{"position", "stop", "x", "y"}, {}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Point2 p = stops[order[k]];
    t.rows.push_back({std::to_string(k), std::to_string(order[k]), csv_number(p.x), csv_number(p.y)});
  }
  return t;
}

// ---- files ---------------------------------------------------------------

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_csv_file(const std::filesystem::path& path, const CsvTable& t) {
  std::ostringstream ss;
  write_csv(ss, t);
  write_text(path, ss.str());
}

inline CsvTable read_csv_file(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  return read_csv(in);
}

inline Scenario load_scenario_file(const std::filesystem::path& path) { return scenario_from_json(read_json(path)); }

inline void save_scenario_file(const std::filesystem::path& path, const Scenario& s) { write_json(path, to_json(s)); }

// config.json, trace.csv and solution.json for one search run.
inline void write_run_artifacts(const std::filesystem::path& dir, const nlohmann::json& resolved_config,
                                const Incumbent& inc) {
  ensure_directory(dir);
  write_json(dir / "config.json", resolved_config);
  write_csv_file(dir / "trace.csv", trace_table(inc.trace));
  nlohmann::json sol = to_json(inc.solution);
  sol["iteration_found"] = inc.iteration;
  sol["evaluations"] = inc.evaluations;
  write_json(dir / "solution.json", sol);
}

}  // namespace jolt
