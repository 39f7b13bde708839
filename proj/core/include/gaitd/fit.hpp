#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitd/model.hpp"

namespace gaitd {

struct FitControl {
  double tol = 1e-8;        // relative change in the log-likelihood
  double beta_tol = 1e-6;   // max |change| in any coefficient
  int max_iter = 100;
  int step_halving_max = 30;
  Count eim_window = 100'000;  // cap on support values summed per EIM
  unsigned threads = 0;        // 0: GAITD_NUM_THREADS
  bool drop_empty_alt_cells = true;
};

struct TraceRow {
  int iteration = 0;
  double loglik = 0.0;
  double step = 1.0;         // accepted fraction of the scoring step
  double max_abs_dbeta = 0.0;
};

struct FitResult {
  ModelSpec spec;  // after any zero-count A_np cells were moved into T
  std::vector<std::string> coef_names;
  std::vector<std::string> eta_names;
  std::vector<std::string> x_names;
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;
  std::vector<std::string> warnings;
  std::size_t n_obs = 0;
  double total_weight = 0.0;
  Eigen::RowVectorXd x_first;  // covariates of the first observation

  Eigen::VectorXd eta(const Eigen::RowVectorXd& x) const { return eta_at(spec, beta, x); }
  GaitdDist dist(const Eigen::RowVectorXd& x) const;
  /// Fitted distribution at the first observation's covariates.
  GaitdDist dist() const { return dist(x_first); }
};

/// sum_i w_i log f(y_i; eta_i). -inf when some response has zero probability
/// or the coefficients give an invalid distribution.
double loglik(const ModelSpec& spec, const Data& data, const Eigen::VectorXd& beta);

struct ScoreEim {
  double loglik = 0.0;
  Eigen::VectorXd gradient;     // d loglik / d beta
  Eigen::MatrixXd information;  // X_VLM^T W X_VLM
};

/// Scores by central differences on log f in eta; per-pattern EIMs summed
/// exactly over the support window.
ScoreEim score_and_eim(const ModelSpec& spec, const Data& data, const Eigen::VectorXd& beta,
                       const FitControl& control = {});

/// Method-of-moments theta on the nonspecial responses, empirical cell
/// proportions for the probabilities, projected onto the coefficient space.
Eigen::VectorXd initial_beta(const ModelSpec& spec, const Data& data);

FitResult fit_irls(const ModelSpec& spec, const Data& data, std::optional<Eigen::VectorXd> init = std::nullopt,
                   const FitControl& control = {});

struct Wald {
  double estimate = 0.0, se = 0.0, z = 0.0, p_value = 1.0, lower = 0.0, upper = 0.0;
};

/// Wald statistics for coefficient `index`. Throws NotConvergedError for a
/// fit that did not converge.
Wald wald_and_ci(const FitResult& fit, int index, double level = 0.95);

struct ParameterInterval {
  double estimate = 0.0, lower = 0.0, upper = 0.0;
  double eta_se = 0.0;
  bool back_transformed = false;  // false for probability entries (eta scale)
};

/// Interval for linear predictor `eta_index` at covariates x, mapped through
/// the inverse link for theta entries.
ParameterInterval parameter_ci(const FitResult& fit, int eta_index, const Eigen::RowVectorXd& x,
                               double level = 0.95);

/// Delta-method standard error of g(beta) using a central-difference gradient.
double delta_method_se(const FitResult& fit, const std::function<double(const Eigen::VectorXd&)>& g);

struct LrtResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

/// Likelihood ratio test of `nested` within `full`. Throws
/// std::invalid_argument unless every constraint space of `nested` lies in
/// the matching space of `full` for the same family, sets and data.
LrtResult lrt(const FitResult& full, const FitResult& nested);

}  // namespace gaitd
