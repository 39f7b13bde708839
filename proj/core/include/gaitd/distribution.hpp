#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaitd/parents.hpp"
#include "gaitd/special_sets.hpp"

namespace gaitd {

/// All distribution parameters. theta_alpha/iota/delta may be left empty, in
/// which case they default to theta_pi. Probabilities attached to an empty
/// set are ignored; the np vectors align element-wise with their sets.
struct GaitdParams {
  std::vector<double> theta_pi;
  std::vector<double> theta_alpha, theta_iota, theta_delta;
  double omega_p = 0.0, phi_p = 0.0, psi_p = 0.0;
  std::vector<double> omega_np, phi_np, psi_np;
};

struct DistOptions {
  double tail_mass = 1e-12;       // truncation point for infinite sums
  Count max_window = 1'000'000;   // cap on cached/enumerated support length
};

struct ParamViolation {
  std::string constraint;
  std::string message;
  std::vector<Count> elements;
};

/// Per-value split of the pmf used for spikeplot overlays.
struct PmfComponents {
  double scaled_parent = 0.0;  // Delta f_pi(y) on I, D and nonspecial values
  double spike = 0.0;          // inflation added on I_p / I_np
  double dip = 0.0;            // deflation removed on D_p / D_np
  double altered = 0.0;        // probability on A_p / A_np
  double total() const { return scaled_parent + spike - dip + altered; }
};

/// Closed support interval used when enumerating the distribution.
struct SupportWindow {
  Count lo = 0;
  Count hi = 0;
  bool tail_truncated = false;  // true when hi is the last value before T's tail
};

/// The GAITD combo distribution for one parent family and one configuration
/// of special sets. Immutable; evaluation is thread-safe.
class GaitdDist {
 public:
  /// Throws DomainError for invalid theta, std::invalid_argument when
  /// probability vectors do not match their sets, and DegenerateModelError
  /// when truncation plus alteration leave no parent mass.
  GaitdDist(Family family, SpecialSets sets, GaitdParams params, DistOptions options = {});

  /// Rejects f_alpha/f_iota/f_delta from a different family than the parent.
  GaitdDist(const ParentSpec& parent, const ParentSpec& alpha, const ParentSpec& iota,
            const ParentSpec& delta, SpecialSets sets, GaitdParams probs, DistOptions options = {});

  Family family() const noexcept { return parent_.family(); }
  const ParentSpec& parent() const noexcept { return parent_; }
  const ParentSpec& alpha() const noexcept { return alpha_; }
  const ParentSpec& iota() const noexcept { return iota_; }
  const ParentSpec& delta_parent() const noexcept { return delta_; }
  const SpecialSets& sets() const noexcept { return sets_; }
  const GaitdParams& params() const noexcept { return params_; }
  const DistOptions& options() const noexcept { return options_; }
  const SpecialUnion& special() const noexcept { return *union_; }

  /// Normalizing constant applied to f_pi on I, D and nonspecial values.
  double delta() const noexcept { return delta_value_; }
  double delta_numerator() const noexcept { return numerator_; }
  double delta_denominator() const noexcept { return denominator_; }
  /// Sum of every special probability (omega, phi, psi; p and np).
  double budget() const noexcept { return budget_; }
  /// Baseline (reserve) probability 1 - budget.
  double baseline() const noexcept { return 1.0 - budget_; }
  /// Parent mass outside T.
  double kept_parent_mass() const noexcept { return kept_mass_; }
  /// Parent mass on A_p and A_np.
  double altered_parent_mass() const noexcept { return alt_mass_; }
  /// Parent mass on values outside S.
  double nonspecial_parent_mass() const noexcept { return nonspecial_mass_; }

  /// Conditional weights A_alpha, A_iota, A_delta aligned with alt_p / inf_p / def_p.
  const std::vector<double>& alt_weights() const noexcept { return alt_w_; }
  const std::vector<double>& inf_weights() const noexcept { return inf_w_; }
  const std::vector<double>& def_weights() const noexcept { return def_w_; }

  double pmf(Count y) const;
  double log_pmf(Count y) const;
  PmfComponents components(Count y) const;
  /// Indicator-sum form of the CDF.
  double cdf(Count y) const;
  /// E[Y^k]; nullopt when the parent moment diverges and is not truncated away.
  std::optional<double> moment(int k) const;
  /// Smallest y with cdf(y) >= p, 0 < p < 1.
  Count quantile(double p) const;

  std::vector<Count> sample(std::size_t n, std::uint64_t seed) const;
  std::vector<Count> sample(std::size_t n, std::mt19937_64& rng) const;

  /// Range holding all but tail_mass of the probability (or up to T's tail).
  SupportWindow support_window() const;

  /// Sum of y^k f_pi(y) over values not in T, optionally only y <= upto.
  std::optional<double> kept_parent_moment(int k, std::optional<Count> upto = std::nullopt) const;

 private:
  void init(GaitdParams probs);
  const std::vector<double>& cumulative() const;

  ParentSpec parent_, alpha_, iota_, delta_;
  SpecialSets sets_;
  GaitdParams params_;
  DistOptions options_;
  std::shared_ptr<const SpecialUnion> union_;

  double numerator_ = 1.0, denominator_ = 1.0, delta_value_ = 1.0;
  double budget_ = 0.0, kept_mass_ = 1.0, alt_mass_ = 0.0, nonspecial_mass_ = 1.0;
  std::vector<double> alt_w_, inf_w_, def_w_;

  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Positivity, budget < 1, Delta > 0 and pmf >= 0 on every deflated value.
std::vector<ParamViolation> validate_params(const GaitdDist& dist);

/// Uniform draw in (0, 1) from 53 random bits; identical across platforms.
double uniform_open01(std::mt19937_64& rng);

}  // namespace gaitd
