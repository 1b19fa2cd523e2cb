#include "dsbm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsbm/errors.hpp"

namespace dsbm {

namespace {

using nlohmann::json;

Matrix read_square(const json& rows, int k, const char* key) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != k) {
    throw InvalidInput(std::string(key) + " must have K rows");
  }
  Matrix m(k, k);
  for (int i = 0; i < k; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != k) {
      throw InvalidInput(std::string(key) + " row " + std::to_string(i + 1) + " is ragged");
    }
    for (int j = 0; j < k; ++j) {
      if (!row[j].is_number()) throw InvalidInput(std::string(key) + " entries must be numbers");
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

}  // namespace

VarianceProfile parse_profile_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("matrix file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("matrix file must be a JSON object");
  if (!doc.contains("K") || !doc["K"].is_number_integer()) {
    throw InvalidInput("matrix file needs an integer \"K\"");
  }
  const int k = doc["K"].get<int>();
  if (k < 1) throw InvalidInput("K must be positive");
  const bool has_s = doc.contains("S");
  const bool has_p = doc.contains("P");
  if (has_s == has_p) throw InvalidInput("matrix file needs exactly one of \"S\" or \"P\"");
  if (has_p) return VarianceProfile::from_probabilities(read_square(doc["P"], k, "P"));
  return VarianceProfile::from_variances(read_square(doc["S"], k, "S"));
}

VarianceProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open matrix file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_profile_json(buffer.str());
}

std::string profile_to_json(const VarianceProfile& profile) {
  const int k = profile.size();
  const Matrix& m = profile.probabilities() ? *profile.probabilities() : profile.variances();
  json rows = json::array();
  for (int i = 0; i < k; ++i) {
    json row = json::array();
    for (int j = 0; j < k; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  json doc;
  doc["K"] = k;
  doc[profile.probabilities() ? "P" : "S"] = rows;
  return doc.dump();
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17e", value);
  return buf;
}

}  // namespace dsbm
