#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "estimator.hpp"
#include "montecarlo.hpp"

namespace etpsim {

inline constexpr const char* kDatasetCsvHeader = "repetition,angle_deg,counts,sigma";
inline constexpr const char* kModelCsvHeader = "angle_deg,expected_counts";

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

void write_dataset_csv(std::ostream& out, const CoincidenceDataset& d);

/// Parses the dataset CSV. The plan is rebuilt from the records (grid in
/// order of first appearance, repetitions = max index + 1); `scan` is not
/// stored in the file and must be supplied. Throws ParseError with the
/// offending line number.
CoincidenceDataset read_dataset_csv(std::istream& in, Scan scan);

void write_dataset_json(std::ostream& out, const CoincidenceDataset& d);

struct ModelPoint {
  double angle_deg = 0.0;
  double expected_counts = 0.0;
};

void write_model_csv(std::ostream& out, const std::vector<ModelPoint>& curve);
void write_model_json(std::ostream& out, Scan scan, const std::vector<ModelPoint>& curve);

/// Expected counts on the plan's own grid.
std::vector<ModelPoint> model_curve(const MixtureModel& m, const ExperimentPlan& plan);

/// File helpers; throw IoError when the path cannot be opened.
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace etpsim
