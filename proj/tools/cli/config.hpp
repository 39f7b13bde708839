#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gaitd/gaitd.hpp>

namespace gaitd::cli {

/// How a covariate enters the linear predictors.
struct ConstraintDecl {
  enum class Kind { Trivial, Parallel, Only, Matrix } kind = Kind::Trivial;
  std::vector<int> etas;   // 1-based eta indices for Only
  Eigen::MatrixXd matrix;  // for Matrix
  int line = 0;
};

struct GteConfig {
  bool present = false;
  std::vector<Count> ms;        // one entry: fixed m; several: search
  std::vector<Count> nus{0};
};

struct DataConfig {
  std::string response;  // default: first column
  std::string weight;
  std::vector<std::string> covariates;
  std::vector<std::string> categorical;
  std::map<std::string, std::string> reference;
  bool intercept = true;
};

struct ModelConfig {
  ModelSpec spec;
  bool has_params = false;
  GaitdParams params;
  std::map<std::string, ConstraintDecl> constraints;
  FitControl control;
  std::optional<std::uint64_t> seed;
  GteConfig gte;
  DataConfig data;
};

/// Sections a report carries besides [model] and [params]; skipped on parse.
const std::vector<std::string>& report_only_sections();

/// Parses the INI-style model configuration. Errors are ConfigErrors
/// anchored to the offending line.
ModelConfig parse_config(std::istream& in);
ModelConfig load_config(const std::string& path);

/// Integer list: comma/space separated values and inclusive ranges a-b.
std::vector<Count> parse_count_list(const std::string& text, int line = 0);

/// Full distribution from [model] and [params]; ConfigError if params are missing.
GaitdDist config_dist(const ModelConfig& cfg);

/// Constraint matrices aligned with the design columns.
std::vector<Eigen::MatrixXd> build_constraints(const ModelConfig& cfg, const std::vector<std::string>& x_names,
                                               int M);

}  // namespace gaitd::cli
