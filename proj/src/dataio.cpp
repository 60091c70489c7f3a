#include "fourway/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "fourway/error.hpp"

namespace fourway {

namespace {

std::string record_label(std::size_t line, const std::string& id) {
  std::ostringstream os;
  os << "line " << line;
  if (!id.empty()) os << " (id " << id << ")";
  return os.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// A code is a '|'-separated list of accepted values; "*" accepts anything.
bool code_matches(const std::string& code, const std::string& value) {
  std::size_t start = 0;
  while (true) {
    const auto bar = code.find('|', start);
    const std::string alt = trim(code.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
    if (alt == "*" || alt == value) return true;
    if (bar == std::string::npos) return false;
    start = bar + 1;
  }
}

// One RFC-4180 record; quoted fields may contain commas, quotes ("") and
// newlines. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool blank(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(),
                     [](const std::string& f) { return trim(f).empty(); });
}

bool parse_double(const std::string& text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw ValidationError("grid needs at least two time points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ValidationError("non-finite grid value");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ValidationError("non-monotone grid: value " + std::to_string(grid[i]) +
                            " at position " + std::to_string(i) +
                            " does not exceed its predecessor");
    }
  }
}

}  // namespace

void Cohort::validate() const {
  check_grid(grid);
  if (records.empty()) throw ValidationError("empty cohort");
  const int K = intervals();
  for (const auto& r : records) {
    if (r.time_index < 1 || r.time_index > K) {
      throw ValidationError("record " + r.id + ": time index " + std::to_string(r.time_index) +
                            " outside 1.." + std::to_string(K));
    }
    if (r.covariates.size() != covariate_names.size()) {
      throw ValidationError("record " + r.id + ": expected " +
                            std::to_string(covariate_names.size()) + " covariates, found " +
                            std::to_string(r.covariates.size()));
    }
    for (double v : r.covariates) {
      if (!std::isfinite(v)) throw ValidationError("record " + r.id + ": non-finite covariate");
    }
  }
}

std::size_t Cohort::covariate_index(const std::string& name) const {
  const auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
  if (it == covariate_names.end()) throw ValidationError("unknown covariate: " + name);
  return static_cast<std::size_t>(it - covariate_names.begin());
}

void CsvSchema::apply(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("schema override must be key=value: " + assignment);
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key == "id") {
    id_column = value;
  } else if (key == "time") {
    time_column = value;
  } else if (key == "event") {
    event_column = value;
  } else if (key == "treatment") {
    treatment_column = value;
  } else if (key == "covariates") {
    covariates = split_list(value);
  } else if (key == "covariate") {
    covariates.push_back(value);
  } else if (key == "censored") {
    censored_code = value;
  } else if (key == "target") {
    target_code = value;
  } else if (key == "competing") {
    competing_code = value;
  } else if (key == "treated") {
    treated_value = value;
  } else if (key == "reference") {
    reference_value = value;
  } else if (key == "time_mode") {
    if (value == "index") {
      time_mode = TimeMode::Index;
    } else if (value == "value") {
      time_mode = TimeMode::Value;
    } else {
      throw ValidationError("time_mode must be 'index' or 'value'");
    }
  } else {
    throw ValidationError("unknown schema key: " + key);
  }
}

int bin_time(double t, const std::vector<double>& grid) {
  if (!(t >= grid.front())) {
    throw ValidationError("time " + std::to_string(t) + " precedes grid origin");
  }
  const auto it = std::lower_bound(grid.begin() + 1, grid.end(), t);
  if (it == grid.end()) {
    throw ValidationError("time " + std::to_string(t) + " beyond last grid point " +
                          std::to_string(grid.back()));
  }
  return static_cast<int>(it - grid.begin());
}

Cohort read_csv(std::istream& in, const CsvSchema& schema) {
  std::vector<std::string> header;
  if (!read_record(in, header)) throw ValidationError("empty cohort: missing header row");
  for (auto& h : header) h = trim(h);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError("missing column: " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column(schema.id_column);
  const std::size_t time_col = column(schema.time_column);
  const std::size_t event_col = column(schema.event_column);
  const std::size_t trt_col = column(schema.treatment_column);
  std::vector<std::size_t> cov_cols;
  for (const auto& c : schema.covariates) cov_cols.push_back(column(c));

  struct Raw {
    SubjectRecord record;
    double time;
  };
  std::vector<Raw> raws;
  std::vector<std::string> fields;
  std::size_t line = 1;
  while (read_record(in, fields)) {
    ++line;
    if (blank(fields)) continue;
    if (fields.size() != header.size()) {
      throw ValidationError(record_label(line, "") + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
    }
    Raw raw;
    raw.record.id = trim(fields[id_col]);
    const std::string where = record_label(line, raw.record.id);

    if (!parse_double(fields[time_col], raw.time)) {
      throw ValidationError(where + ": invalid time '" + fields[time_col] + "'");
    }
    const std::string ev = trim(fields[event_col]);
    if (code_matches(schema.censored_code, ev)) {
      raw.record.event = EventCode::Censored;
    } else if (code_matches(schema.target_code, ev)) {
      raw.record.event = EventCode::Target;
    } else if (code_matches(schema.competing_code, ev)) {
      raw.record.event = EventCode::Competing;
    } else {
      throw ValidationError(where + ": unknown event code '" + ev + "'");
    }
    const std::string trt = trim(fields[trt_col]);
    if (trt == schema.treated_value) {
      raw.record.treatment = Arm::Treated;
    } else if (trt == schema.reference_value) {
      raw.record.treatment = Arm::Reference;
    } else {
      throw ValidationError(where + ": non-binary treatment '" + trt + "'");
    }
    for (std::size_t j = 0; j < cov_cols.size(); ++j) {
      double v;
      if (!parse_double(fields[cov_cols[j]], v)) {
        throw ValidationError(where + ": missing covariate value for " + schema.covariates[j] +
                              " ('" + fields[cov_cols[j]] + "')");
      }
      raw.record.covariates.push_back(v);
    }
    raws.push_back(std::move(raw));
  }
  if (raws.empty()) throw ValidationError("empty cohort");

  Cohort cohort;
  cohort.covariate_names = schema.covariates;
  if (schema.time_mode == TimeMode::Index) {
    int max_k = 0;
    for (auto& r : raws) {
      const double k = r.time;
      if (k != std::floor(k) || k < 1 || k > std::numeric_limits<int>::max()) {
        throw ValidationError("record " + r.record.id + ": time index must be an integer >= 1");
      }
      r.record.time_index = static_cast<int>(k);
      max_k = std::max(max_k, r.record.time_index);
    }
    if (!schema.grid.empty()) {
      cohort.grid = schema.grid;
    } else {
      for (int k = 0; k <= max_k; ++k) cohort.grid.push_back(k);
    }
    check_grid(cohort.grid);
  } else {
    if (!schema.grid.empty()) {
      cohort.grid = schema.grid;
    } else {
      std::vector<double> times;
      for (const auto& r : raws) times.push_back(r.time);
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      cohort.grid.push_back(0.0);
      for (double t : times) {
        if (t > 0.0) cohort.grid.push_back(t);
      }
    }
    check_grid(cohort.grid);
    for (auto& r : raws) {
      try {
        r.record.time_index = bin_time(r.time, cohort.grid);
      } catch (const ValidationError& e) {
        throw ValidationError("record " + r.record.id + ": " + e.what());
      }
    }
  }
  cohort.records.reserve(raws.size());
  for (auto& r : raws) cohort.records.push_back(std::move(r.record));
  cohort.validate();
  return cohort;
}

Cohort load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file: " + path);
  return read_csv(in, schema);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const Cohort& cohort, std::ostream& out) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "id,time,event,treatment";
  for (const auto& name : cohort.covariate_names) os << ',' << csv_field(name);
  os << "\r\n";
  for (const auto& r : cohort.records) {
    const int code = r.event == EventCode::Censored ? 0 : r.event == EventCode::Target ? 1 : 2;
    os << csv_field(r.id) << ',' << cohort.grid[r.time_index] << ',' << code << ','
       << arm_value(r.treatment);
    for (double v : r.covariates) os << ',' << v;
    os << "\r\n";
  }
  out << os.str();
}

std::size_t RiskSetTable::events() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const RiskSetRow& r) { return r.outcome == 1; }));
}

RiskSetTable expand_person_periods(const Cohort& cohort, Cause cause) {
  RiskSetTable table;
  table.cause = cause;
  const EventCode own = cause == Cause::Target ? EventCode::Target : EventCode::Competing;
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    const auto& r = cohort.records[i];
    int last = r.time_index;
    if (r.event == EventCode::Censored) {
      last = r.time_index - 1;
    } else if (cause == Cause::Target && r.event == EventCode::Competing) {
      last = r.time_index - 1;
    }
    for (int s = 1; s <= last; ++s) {
      const int outcome = (r.event == own && s == r.time_index) ? 1 : 0;
      table.rows.push_back({i, s, outcome, r.treatment, cohort.grid[s]});
    }
  }
  return table;
}

}  // namespace fourway
