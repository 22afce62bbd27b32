#include "mpthermo/io.hpp"

#include <cmath>
#include <cstdio>

namespace mpt {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json to_json(const CylinderMeasure& mu) {
  return {{"d", mu.space().alphabet()},
          {"gamma", mu.space().gamma()},
          {"depth", mu.depth()},
          {"masses", mu.masses()}};
}

CylinderMeasure measure_from_json(const nlohmann::json& j) {
  for (const char* key : {"d", "gamma", "depth", "masses"}) {
    require(j.contains(key), std::string("measure JSON is missing '") + key + "'");
  }
  const ShiftSpace space(j.at("d").get<std::size_t>(), j.at("gamma").get<double>());
  return CylinderMeasure(space, j.at("depth").get<std::size_t>(), j.at("masses").get<std::vector<double>>());
}

nlohmann::json to_json(const AttractorSample& sample) {
  nlohmann::json words = nlohmann::json::array();
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json refs = nlohmann::json::array();
  nlohmann::json measures = nlohmann::json::array();
  for (std::size_t i = 0; i < sample.leaves.size(); ++i) {
    const auto& leaf = sample.leaves[i];
    words.push_back(leaf.word.symbols());
    weights.push_back(leaf.weight);
    refs.push_back(i);
    measures.push_back(to_json(leaf.measure));
  }
  return {{"words", words},       {"weights", weights}, {"measures", refs}, {"cylinder_measures", measures},
          {"epsilon", sample.epsilon}, {"N", sample.N}, {"r", sample.rate}};
}

void write_config_header(std::ostream& os, const ConfigMap& config) {
  for (const auto& [key, value] : config) os << "# " << key << '=' << value << '\n';
}

CsvWriter::CsvWriter(std::ostream& os, const ConfigMap& config, const std::vector<std::string>& columns)
    : os_(os), columns_(columns.size()) {
  write_config_header(os_, config);
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  require(cells.size() == columns_, "CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
  os_ << '\n';
}

}  // namespace mpt
