#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace gaitd::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;  // source line of each row
};

/// Delimited text with a header row: comma separated when the header holds a
/// comma, whitespace separated otherwise. Lines starting with '#' are skipped.
Table read_table(std::istream& in);

bool is_missing(const std::string& cell);

struct LoadedData {
  Data data;
  std::size_t dropped_missing = 0;  // rows rejected for a missing value
};

/// Builds response, design and weights. Numeric covariates enter as is;
/// categorical ones (declared, or holding any non-numeric value) are one-hot
/// encoded against the declared reference or else the first level seen.
LoadedData build_data(const Table& table, const DataConfig& cfg);
LoadedData load_data(const std::string& path, const DataConfig& cfg);

}  // namespace gaitd::cli
