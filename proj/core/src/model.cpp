#include "gaitd/model.hpp"

#include <cmath>

#include "gaitd/errors.hpp"

namespace gaitd {

Data Data::intercept_only(std::vector<Count> y, std::vector<double> weights) {
  Data d;
  d.X = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(y.size()), 1);
  d.y = std::move(y);
  d.x_names = {"(Intercept)"};
  if (!weights.empty()) d.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return d;
}

Eigen::MatrixXd constraint_matrix(const ModelSpec& spec, std::size_t k, int M) {
  if (k < spec.constraints.size() && spec.constraints[k].size() > 0) return spec.constraints[k];
  return Eigen::MatrixXd::Identity(M, M);
}

int coefficient_count(const ModelSpec& spec, const Data& data) {
  const int M = spec.layout().size();
  int total = 0;
  for (Eigen::Index k = 0; k < data.X.cols(); ++k) {
    total += static_cast<int>(constraint_matrix(spec, static_cast<std::size_t>(k), M).cols());
  }
  return total;
}

Eigen::MatrixXd vlm_block(const ModelSpec& spec, const Eigen::RowVectorXd& x, int M) {
  std::vector<Eigen::MatrixXd> hs;
  Eigen::Index total = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    hs.push_back(constraint_matrix(spec, static_cast<std::size_t>(k), M));
    total += hs.back().cols();
  }
  Eigen::MatrixXd out(M, total);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const auto& h = hs[static_cast<std::size_t>(k)];
    out.middleCols(col, h.cols()) = x[k] * h;
    col += h.cols();
  }
  return out;
}

std::vector<std::string> coefficient_names(const ModelSpec& spec, const Data& data) {
  const auto layout = spec.layout();
  const int M = layout.size();
  std::vector<std::string> out;
  for (Eigen::Index k = 0; k < data.X.cols(); ++k) {
    const auto h = constraint_matrix(spec, static_cast<std::size_t>(k), M);
    const std::string xname = static_cast<std::size_t>(k) < data.x_names.size()
                                  ? data.x_names[static_cast<std::size_t>(k)]
                                  : "x" + std::to_string(k + 1);
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      int unit = -1;
      int nonzero = 0;
      for (Eigen::Index r = 0; r < M; ++r) {
        if (h(r, c) != 0.0) {
          ++nonzero;
          if (h(r, c) == 1.0) unit = static_cast<int>(r);
        }
      }
      if (nonzero == 1 && unit >= 0) {
        out.push_back(xname + ":" + layout.entry(unit).name);
      } else {
        out.push_back(xname + ":" + std::to_string(c + 1));
      }
    }
  }
  return out;
}

Eigen::VectorXd eta_at(const ModelSpec& spec, const Eigen::VectorXd& beta, const Eigen::RowVectorXd& x) {
  const int M = spec.layout().size();
  Eigen::VectorXd eta = vlm_block(spec, x, M) * beta;
  if (spec.offset.size() == M) eta += spec.offset;
  return eta;
}

GaitdDist dist_from_eta(const ModelSpec& spec, const EtaLayout& layout, const Eigen::VectorXd& eta) {
  return GaitdDist(spec.family, spec.sets, layout.to_params(eta), spec.dist_options);
}

void validate_model(const ModelSpec& spec, const Data& data) {
  const auto violations = validate_sets(spec.sets, spec.family, spec.strict_identifiability);
  if (!violations.empty()) {
    std::string msg = "invalid special sets:";
    for (const auto& v : violations) msg += " [" + v.constraint + "] " + v.message + ";";
    throw ConfigError(msg);
  }
  const auto layout = spec.layout();
  const int M = layout.size();
  if (spec.offset.size() != 0 && spec.offset.size() != M) {
    throw ConfigError("offset has " + std::to_string(spec.offset.size()) + " entries, expected " + std::to_string(M));
  }
  if (data.X.rows() != static_cast<Eigen::Index>(data.y.size())) {
    throw DataError("design matrix rows do not match the response length");
  }
  if (data.weights.size() != 0 && data.weights.size() != data.X.rows()) {
    throw DataError("weight vector length does not match the response length");
  }
  if (spec.constraints.size() > static_cast<std::size_t>(data.X.cols())) {
    throw ConfigError("more constraint matrices than covariates");
  }
  for (std::size_t k = 0; k < spec.constraints.size(); ++k) {
    const auto& h = spec.constraints[k];
    if (h.size() == 0) continue;
    if (h.rows() != M) {
      throw ConfigError("constraint matrix " + std::to_string(k + 1) + " has " + std::to_string(h.rows()) +
                        " rows, expected " + std::to_string(M));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
    if (qr.rank() != h.cols()) {
      throw ConfigError("constraint matrix " + std::to_string(k + 1) + " is not of full column rank");
    }
  }

  const SpecialUnion s(spec.sets);
  const Count lo = support_min(spec.family);
  bool nonspecial = false;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const Count y = data.y[i];
    if (y < lo) {
      throw DataError("observation " + std::to_string(i + 1) + ": response " + std::to_string(y) +
                      " is below the support minimum");
    }
    const auto kind = s.classify(y).kind;
    if (kind == SetKind::Truncated) {
      throw DataError("observation " + std::to_string(i + 1) + ": response " + std::to_string(y) +
                      " lies in the truncation set");
    }
    if (data.weight(i) < 0.0 || !std::isfinite(data.weight(i))) {
      throw DataError("observation " + std::to_string(i + 1) + ": weight must be finite and nonnegative");
    }
    if (kind == SetKind::Nonspecial && data.weight(i) > 0.0) nonspecial = true;
  }
  if (!nonspecial) throw DataError("no observed response is a nonspecial value");
}

}  // namespace gaitd
