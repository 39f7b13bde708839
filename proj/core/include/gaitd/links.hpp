#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gaitd/distribution.hpp"

namespace gaitd {

enum class Link { Log, Logit, Identity };

std::string_view link_name(Link link);
std::optional<Link> parse_link(std::string_view name);

/// log for rates, means, shapes and zeta s; logit for the logarithmic p.
Link default_link(Family family, int param);

double link_apply(Link link, double theta);
double link_inverse(Link link, double eta);

/// Parameter names per family: lambda; mu, k; p; s.
std::string_view theta_name(Family family, int param);

enum class EtaRole { ThetaPi, OmegaP, ThetaAlpha, PhiP, ThetaIota, PsiP, ThetaDelta, OmegaNp, PhiNp, PsiNp };

struct EtaEntry {
  EtaRole role;
  int index;  // parameter index inside a theta block, or position inside an np set
  std::string name;
};

/// Ordering of the linear predictors: theta_pi, then (omega_p, theta_alpha),
/// (phi_p, theta_iota), (psi_p, theta_delta) for each nonempty parametric set,
/// then the nonparametric cells of A_np, I_np and D_np. Every probability is a
/// log ratio to the baseline cell N.
class EtaLayout {
 public:
  EtaLayout(Family family, const SpecialSets& sets, std::vector<Link> theta_links = {});

  Family family() const noexcept { return family_; }
  int size() const noexcept { return static_cast<int>(entries_.size()); }
  const std::vector<EtaEntry>& entries() const noexcept { return entries_; }
  const EtaEntry& entry(int j) const { return entries_.at(static_cast<std::size_t>(j)); }
  const std::vector<Link>& theta_links() const noexcept { return links_; }
  bool is_probability(int j) const;
  /// Link of a theta entry; throws for probability entries.
  Link link_of(int j) const;
  /// Indices of the first (mean or rate) parameter of every theta block.
  std::vector<int> mean_indices() const;
  std::vector<std::string> names() const;

  /// Softmax over the probability entries with the baseline fixed at 0.
  GaitdParams to_params(const Eigen::VectorXd& eta) const;
  /// Inverse of to_params; throws DomainError when the budget is not < 1 or a
  /// probability on a nonempty set is not positive.
  Eigen::VectorXd from_params(const GaitdParams& params) const;
  /// Baseline probability N implied by eta.
  double baseline(const Eigen::VectorXd& eta) const;

 private:
  Family family_;
  SpecialSets sets_;
  std::vector<Link> links_;
  std::vector<EtaEntry> entries_;
};

}  // namespace gaitd
