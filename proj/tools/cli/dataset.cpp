#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gaitd::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, bool comma) {
  std::vector<std::string> out;
  if (comma) {
    std::istringstream is(line);
    for (std::string cell; std::getline(is, cell, ',');) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
  } else {
    std::istringstream is(line);
    for (std::string cell; is >> cell;) out.push_back(cell);
  }
  return out;
}

bool as_double(const std::string& s, double& v) {
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

std::size_t column(const Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw DataError("column '" + name + "' not found in the data header");
  return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" || cell == "." ||
         cell == "?";
}

Table read_table(std::istream& in) {
  Table t;
  bool comma = false;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    if (t.header.empty()) {
      comma = line.find(',') != std::string::npos;
      t.header = split(line, comma);
      continue;
    }
    auto cells = split(line, comma);
    if (cells.size() != t.header.size()) {
      throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                      " fields, found " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(lineno);
  }
  if (t.header.empty()) throw DataError("data file has no header row");
  return t;
}

LoadedData build_data(const Table& t, const DataConfig& cfg) {
  const std::size_t ry = cfg.response.empty() ? 0 : column(t, cfg.response);
  const std::optional<std::size_t> rw =
      cfg.weight.empty() ? std::nullopt : std::optional<std::size_t>(column(t, cfg.weight));
  std::vector<std::size_t> rx;
  for (const auto& c : cfg.covariates) rx.push_back(column(t, c));

  LoadedData out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    bool missing = is_missing(row[ry]) || (rw && is_missing(row[*rw]));
    for (auto c : rx) missing = missing || is_missing(row[c]);
    if (missing) {
      ++out.dropped_missing;
      continue;
    }
    kept.push_back(i);
  }
  if (kept.empty()) throw DataError("no complete rows in the data");

  auto& d = out.data;
  std::vector<double> weights;
  for (auto i : kept) {
    const auto& cell = t.rows[i][ry];
    double v = 0.0;
    if (!as_double(cell, v) || v < 0.0 || v != std::floor(v)) {
      throw DataError("line " + std::to_string(t.lines[i]) + ": response '" + cell +
                      "' is not a nonnegative integer");
    }
    d.y.push_back(static_cast<Count>(v));
    if (rw) {
      double w = 0.0;
      if (!as_double(t.rows[i][*rw], w) || w < 0.0) {
        throw DataError("line " + std::to_string(t.lines[i]) + ": weight '" + t.rows[i][*rw] +
                        "' is not a nonnegative number");
      }
      weights.push_back(w);
    }
  }

  std::vector<std::vector<double>> cols;
  if (cfg.intercept) {
    cols.emplace_back(kept.size(), 1.0);
    d.x_names.push_back("(Intercept)");
  }
  for (std::size_t k = 0; k < rx.size(); ++k) {
    const auto& name = cfg.covariates[k];
    bool categorical = std::find(cfg.categorical.begin(), cfg.categorical.end(), name) != cfg.categorical.end();
    std::vector<double> numeric;
    for (auto i : kept) {
      double v = 0.0;
      if (!as_double(t.rows[i][rx[k]], v)) categorical = true;
      numeric.push_back(v);
    }
    if (!categorical) {
      cols.push_back(numeric);
      d.x_names.push_back(name);
      continue;
    }
    std::vector<std::string> levels;
    for (auto i : kept) {
      const auto& v = t.rows[i][rx[k]];
      if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(v);
    }
    std::string ref = levels.front();
    if (auto it = cfg.reference.find(name); it != cfg.reference.end()) {
      if (std::find(levels.begin(), levels.end(), it->second) == levels.end()) {
        throw DataError("reference level '" + it->second + "' does not occur in column '" + name + "'");
      }
      ref = it->second;
    }
    for (const auto& level : levels) {
      if (level == ref) continue;
      std::vector<double> dummy;
      for (auto i : kept) dummy.push_back(t.rows[i][rx[k]] == level ? 1.0 : 0.0);
      cols.push_back(std::move(dummy));
      d.x_names.push_back(name + "=" + level);
    }
  }
  if (cols.empty()) throw DataError("design has no columns; enable the intercept or list covariates");
  d.X.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < kept.size(); ++r) {
      d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c][r];
    }
  }
  if (rw) d.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return out;
}

LoadedData load_data(const std::string& path, const DataConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return build_data(read_table(in), cfg);
}

}  // namespace gaitd::cli
