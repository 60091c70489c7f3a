#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fourway {

enum class EventCode { Censored, Target, Competing };

// Hazard-model cause. Target is Y, Competing is D.
enum class Cause { Target, Competing };

// Treatment arm: Treated is a, Reference is a*.
enum class Arm { Reference = 0, Treated = 1 };

inline constexpr int arm_value(Arm arm) { return arm == Arm::Treated ? 1 : 0; }

struct SubjectRecord {
  std::string id;
  int time_index = 0;  // k in 1..K, first event or censoring on the grid
  EventCode event = EventCode::Censored;
  Arm treatment = Arm::Reference;
  std::vector<double> covariates;
};

// Subjects observed on a shared grid t_0 < t_1 < ... < t_K. All subjects are
// event-free and uncensored at t_0.
struct Cohort {
  std::vector<double> grid;
  std::vector<std::string> covariate_names;
  std::vector<SubjectRecord> records;

  int intervals() const { return static_cast<int>(grid.size()) - 1; }
  std::size_t size() const { return records.size(); }

  // Throws ValidationError naming the first offending record.
  void validate() const;

  // Index of a named covariate; throws ValidationError if absent.
  std::size_t covariate_index(const std::string& name) const;
};

enum class TimeMode {
  Value,  // continuous time binned onto the grid
  Index,  // time column already holds the interval index k
};

// Column mapping and value coding for CSV ingestion.
struct CsvSchema {
  std::string id_column = "id";
  std::string time_column = "time";
  std::string event_column = "event";
  std::string treatment_column = "treatment";
  std::vector<std::string> covariates;

  // Event codes may list alternatives separated by '|'; "*" matches any
  // value. Codes are tried in the order censored, target, competing.
  std::string censored_code = "0";
  std::string target_code = "1";
  std::string competing_code = "2";
  std::string treated_value = "1";
  std::string reference_value = "0";

  TimeMode time_mode = TimeMode::Value;
  // Binning grid t_0..t_K for TimeMode::Value. Empty means t_0 = 0 followed by
  // the unique observed times.
  std::vector<double> grid;

  // Applies one `key=value` override, e.g. "time=dtime" or
  // "covariates=age,hg". Throws ValidationError for unknown keys.
  void apply(const std::string& assignment);
};

Cohort read_csv(std::istream& in, const CsvSchema& schema);
Cohort load_csv(const std::string& path, const CsvSchema& schema);

// Writes id,time,event,treatment,<covariates> with time = t_k and the default
// event/treatment coding, so that read_csv with grid = cohort.grid restores
// the cohort exactly.
void write_csv(const Cohort& cohort, std::ostream& out);

// Smallest k >= 1 with t <= grid[k]; a time equal to t_0 maps to k = 1.
int bin_time(double t, const std::vector<double>& grid);

struct RiskSetRow {
  std::size_t subject = 0;  // index into Cohort::records
  int interval = 0;         // s
  int outcome = 0;
  Arm treatment = Arm::Reference;
  double time = 0.0;  // t_s
};

// Person-period table for one cause-specific hazard.
struct RiskSetTable {
  Cause cause = Cause::Target;
  std::vector<RiskSetRow> rows;

  std::size_t events() const;
};

// Expands subjects into cause-specific risk sets under the within-interval
// ordering (C, D, Y): censoring at s removes s from both risk sets, a
// competing event at s removes s from the target risk set.
RiskSetTable expand_person_periods(const Cohort& cohort, Cause cause);

}  // namespace fourway
