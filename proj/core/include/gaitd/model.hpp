#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitd/distribution.hpp"
#include "gaitd/links.hpp"

namespace gaitd {

/// A GAITD regression: family, special sets, theta links, one constraint
/// matrix H_k (M x R_k) per covariate column and a constant offset added to
/// every linear predictor before the inverse links.
struct ModelSpec {
  Family family = Family::Poisson;
  SpecialSets sets;
  std::vector<Link> theta_links;              // empty: family defaults
  std::vector<Eigen::MatrixXd> constraints;   // per covariate; empty matrix = identity
  Eigen::VectorXd offset;                     // length M, or empty
  bool strict_identifiability = true;
  DistOptions dist_options;

  EtaLayout layout() const { return EtaLayout(family, sets, theta_links); }
};

/// Responses, design matrix (n x d) and prior weights. Column names label
/// coefficients; an intercept is simply a column of ones.
struct Data {
  std::vector<Count> y;
  Eigen::MatrixXd X;
  Eigen::VectorXd weights;  // empty: all ones
  std::vector<std::string> x_names;

  static Data intercept_only(std::vector<Count> y, std::vector<double> weights = {});
  std::size_t size() const { return y.size(); }
  double weight(std::size_t i) const { return weights.size() == 0 ? 1.0 : weights[static_cast<Eigen::Index>(i)]; }
};

/// H_k for covariate k, defaulting to the M x M identity.
Eigen::MatrixXd constraint_matrix(const ModelSpec& spec, std::size_t k, int M);

/// Total coefficient count sum_k R_k.
int coefficient_count(const ModelSpec& spec, const Data& data);

/// Row block of the VLM design for one observation: M x P with the columns
/// of covariate k equal to x_k H_k.
Eigen::MatrixXd vlm_block(const ModelSpec& spec, const Eigen::RowVectorXd& x, int M);

/// Coefficient labels "<covariate>:<eta name>" when H_k's column is a unit
/// vector and "<covariate>:<column>" otherwise.
std::vector<std::string> coefficient_names(const ModelSpec& spec, const Data& data);

/// Linear predictor for one observation, offset included.
Eigen::VectorXd eta_at(const ModelSpec& spec, const Eigen::VectorXd& beta, const Eigen::RowVectorXd& x);

GaitdDist dist_from_eta(const ModelSpec& spec, const EtaLayout& layout, const Eigen::VectorXd& eta);

/// Structural checks before fitting. Throws ConfigError for invalid sets or
/// constraint shapes and DataError for responses that are truncated, outside
/// the support, or when no response is a nonspecial value.
void validate_model(const ModelSpec& spec, const Data& data);

}  // namespace gaitd
