#include "gaitd/links.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitd/errors.hpp"

namespace gaitd {

std::string_view link_name(Link link) {
  switch (link) {
    case Link::Log:
      return "log";
    case Link::Logit:
      return "logit";
    case Link::Identity:
      return "identity";
  }
  return "?";
}

std::optional<Link> parse_link(std::string_view name) {
  for (auto l : {Link::Log, Link::Logit, Link::Identity}) {
    if (link_name(l) == name) return l;
  }
  return std::nullopt;
}

Link default_link(Family family, int /*param*/) {
  return family == Family::Logarithmic ? Link::Logit : Link::Log;
}

double link_apply(Link link, double theta) {
  switch (link) {
    case Link::Log:
      return std::log(theta);
    case Link::Logit:
      return std::log(theta) - std::log1p(-theta);
    case Link::Identity:
      return theta;
  }
  return theta;
}

double link_inverse(Link link, double eta) {
  switch (link) {
    case Link::Log:
      return std::exp(eta);
    case Link::Logit:
      return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    case Link::Identity:
      return eta;
  }
  return eta;
}

std::string_view theta_name(Family family, int param) {
  switch (family) {
    case Family::Poisson:
      return "lambda";
    case Family::NegBinomial:
      return param == 0 ? "mu" : "k";
    case Family::Logarithmic:
      return "p";
    case Family::Zeta:
      return "s";
  }
  return "?";
}

EtaLayout::EtaLayout(Family family, const SpecialSets& sets, std::vector<Link> theta_links)
    : family_(family), sets_(sets), links_(std::move(theta_links)) {
  const int arity = family_arity(family);
  if (links_.empty()) {
    for (int i = 0; i < arity; ++i) links_.push_back(default_link(family, i));
  }
  if (static_cast<int>(links_.size()) != arity) {
    throw std::invalid_argument("expected " + std::to_string(arity) + " theta links");
  }
  auto theta_block = [&](EtaRole role, const char* suffix) {
    for (int i = 0; i < arity; ++i) {
      entries_.push_back({role, i,
                          std::string(link_name(links_[static_cast<std::size_t>(i)])) + "(" +
                              std::string(theta_name(family, i)) + suffix + ")"});
    }
  };
  theta_block(EtaRole::ThetaPi, "");
  if (!sets.alt_p.empty()) {
    entries_.push_back({EtaRole::OmegaP, 0, "log(omega_p/N)"});
    theta_block(EtaRole::ThetaAlpha, "_a");
  }
  if (!sets.inf_p.empty()) {
    entries_.push_back({EtaRole::PhiP, 0, "log(phi_p/N)"});
    theta_block(EtaRole::ThetaIota, "_i");
  }
  if (!sets.def_p.empty()) {
    entries_.push_back({EtaRole::PsiP, 0, "log(psi_p/N)"});
    theta_block(EtaRole::ThetaDelta, "_d");
  }
  auto cells = [&](EtaRole role, const std::vector<Count>& set, const char* name) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      entries_.push_back({role, static_cast<int>(i),
                          "log(" + std::string(name) + "[" + std::to_string(set[i]) + "]/N)"});
    }
  };
  cells(EtaRole::OmegaNp, sets.alt_np, "omega");
  cells(EtaRole::PhiNp, sets.inf_np, "phi");
  cells(EtaRole::PsiNp, sets.def_np, "psi");
}

bool EtaLayout::is_probability(int j) const {
  switch (entry(j).role) {
    case EtaRole::ThetaPi:
    case EtaRole::ThetaAlpha:
    case EtaRole::ThetaIota:
    case EtaRole::ThetaDelta:
      return false;
    default:
      return true;
  }
}

Link EtaLayout::link_of(int j) const {
  if (is_probability(j)) throw std::invalid_argument("probability entries use the multinomial logit");
  return links_[static_cast<std::size_t>(entry(j).index)];
}

std::vector<int> EtaLayout::mean_indices() const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j) {
    if (!is_probability(j) && entry(j).index == 0) out.push_back(j);
  }
  return out;
}

std::vector<std::string> EtaLayout::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

double EtaLayout::baseline(const Eigen::VectorXd& eta) const {
  double top = 0.0;
  for (int j = 0; j < size(); ++j) {
    if (is_probability(j)) top = std::max(top, eta[j]);
  }
  double denom = std::exp(-top);
  for (int j = 0; j < size(); ++j) {
    if (is_probability(j)) denom += std::exp(eta[j] - top);
  }
  return std::exp(-top) / denom;
}

GaitdParams EtaLayout::to_params(const Eigen::VectorXd& eta) const {
  if (eta.size() != size()) throw std::invalid_argument("eta has the wrong length");
  GaitdParams p;
  const int arity = family_arity(family_);
  p.theta_pi.assign(static_cast<std::size_t>(arity), 0.0);
  if (!sets_.alt_p.empty()) p.theta_alpha.assign(static_cast<std::size_t>(arity), 0.0);
  if (!sets_.inf_p.empty()) p.theta_iota.assign(static_cast<std::size_t>(arity), 0.0);
  if (!sets_.def_p.empty()) p.theta_delta.assign(static_cast<std::size_t>(arity), 0.0);
  p.omega_np.assign(sets_.alt_np.size(), 0.0);
  p.phi_np.assign(sets_.inf_np.size(), 0.0);
  p.psi_np.assign(sets_.def_np.size(), 0.0);

  double top = 0.0;
  for (int j = 0; j < size(); ++j) {
    // A probability entry may be -inf (cell switched off); nothing else may be non-finite.
    const bool off_cell = is_probability(j) && eta[j] == -std::numeric_limits<double>::infinity();
    if (!std::isfinite(eta[j]) && !off_cell) {
      throw DomainError("non-finite linear predictor " + entry(j).name);
    }
    if (is_probability(j)) top = std::max(top, eta[j]);
  }
  double denom = std::exp(-top);
  for (int j = 0; j < size(); ++j) {
    if (is_probability(j)) denom += std::exp(eta[j] - top);
  }

  for (int j = 0; j < size(); ++j) {
    const auto& e = entries_[static_cast<std::size_t>(j)];
    const auto i = static_cast<std::size_t>(e.index);
    const double prob = is_probability(j) ? std::exp(eta[j] - top) / denom : 0.0;
    const double theta = is_probability(j) ? 0.0 : link_inverse(links_[i], eta[j]);
    switch (e.role) {
      case EtaRole::ThetaPi:
        p.theta_pi[i] = theta;
        break;
      case EtaRole::ThetaAlpha:
        p.theta_alpha[i] = theta;
        break;
      case EtaRole::ThetaIota:
        p.theta_iota[i] = theta;
        break;
      case EtaRole::ThetaDelta:
        p.theta_delta[i] = theta;
        break;
      case EtaRole::OmegaP:
        p.omega_p = prob;
        break;
      case EtaRole::PhiP:
        p.phi_p = prob;
        break;
      case EtaRole::PsiP:
        p.psi_p = prob;
        break;
      case EtaRole::OmegaNp:
        p.omega_np[i] = prob;
        break;
      case EtaRole::PhiNp:
        p.phi_np[i] = prob;
        break;
      case EtaRole::PsiNp:
        p.psi_np[i] = prob;
        break;
    }
  }
  return p;
}

Eigen::VectorXd EtaLayout::from_params(const GaitdParams& p) const {
  auto block = [&](const std::vector<double>& theta) -> const std::vector<double>& {
    return theta.empty() ? p.theta_pi : theta;
  };
  auto cell = [](const std::vector<double>& v, int i, const char* name) {
    if (static_cast<std::size_t>(i) >= v.size()) {
      throw std::invalid_argument(std::string(name) + " is shorter than its set");
    }
    return v[static_cast<std::size_t>(i)];
  };
  std::vector<double> probs;
  Eigen::VectorXd eta(size());
  for (int j = 0; j < size(); ++j) {
    const auto& e = entries_[static_cast<std::size_t>(j)];
    double theta = 0.0, prob = -1.0;
    switch (e.role) {
      case EtaRole::ThetaPi:
        theta = cell(p.theta_pi, e.index, "theta_pi");
        break;
      case EtaRole::ThetaAlpha:
        theta = cell(block(p.theta_alpha), e.index, "theta_alpha");
        break;
      case EtaRole::ThetaIota:
        theta = cell(block(p.theta_iota), e.index, "theta_iota");
        break;
      case EtaRole::ThetaDelta:
        theta = cell(block(p.theta_delta), e.index, "theta_delta");
        break;
      case EtaRole::OmegaP:
        prob = p.omega_p;
        break;
      case EtaRole::PhiP:
        prob = p.phi_p;
        break;
      case EtaRole::PsiP:
        prob = p.psi_p;
        break;
      case EtaRole::OmegaNp:
        prob = cell(p.omega_np, e.index, "omega_np");
        break;
      case EtaRole::PhiNp:
        prob = cell(p.phi_np, e.index, "phi_np");
        break;
      case EtaRole::PsiNp:
        prob = cell(p.psi_np, e.index, "psi_np");
        break;
    }
    if (is_probability(j)) {
      if (!(prob > 0.0)) throw DomainError(e.name + ": probability must be positive");
      probs.push_back(prob);
      eta[j] = std::log(prob);
    } else {
      eta[j] = link_apply(links_[static_cast<std::size_t>(e.index)], theta);
    }
  }
  double budget = 0.0;
  for (double v : probs) budget += v;
  if (!(budget < 1.0)) throw DomainError("special probabilities must sum to less than 1");
  const double log_n = std::log1p(-budget);
  for (int j = 0; j < size(); ++j) {
    if (is_probability(j)) eta[j] -= log_n;
  }
  return eta;
}

}  // namespace gaitd
