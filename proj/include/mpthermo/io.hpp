#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpthermo/ifs.hpp"
#include "mpthermo/shift.hpp"

namespace mpt {

/// Shortest-round-trip formatting at 17 significant digits.
std::string format_double(double x);

nlohmann::json to_json(const CylinderMeasure& mu);
CylinderMeasure measure_from_json(const nlohmann::json& j);

/// {words, weights, measures: indices into cylinder_measures, cylinder_measures, epsilon, N, r}.
nlohmann::json to_json(const AttractorSample& sample);

/// Resolved experiment settings, written as "# key=value" header lines.
using ConfigMap = std::map<std::string, std::string>;

void write_config_header(std::ostream& os, const ConfigMap& config);

/// CSV with a config header; every double goes through format_double.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const ConfigMap& config, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

}  // namespace mpt
