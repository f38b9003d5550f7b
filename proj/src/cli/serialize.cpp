#include "spectramech/serialize.hpp"

#include <charconv>
#include <cmath>

#include "spectramech/errors.hpp"

namespace spectramech {

void to_json(nlohmann::json& j, const RegularityResult& r) {
  j = {{"certified", r.certified}, {"grid_points", r.grid_points}, {"violation", nullptr}};
  if (r.violation) j["violation"] = {r.violation->first, r.violation->second};
}

void from_json(const nlohmann::json& j, RegularityResult& r) {
  r.certified = j.at("certified").get<bool>();
  r.grid_points = j.at("grid_points").get<std::size_t>();
  r.violation.reset();
  const auto& v = j.at("violation");
  if (!v.is_null()) r.violation = std::make_pair(v.at(0).get<double>(), v.at(1).get<double>());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw DomainError("CSV row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) out += (k ? "," : "") + header_[k];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + format_double(row[k]);
    out += '\n';
  }
  return out;
}

}  // namespace spectramech
