#pragma once

// Parent (base) count distributions: Poisson, negative binomial (mean/shape),
// logarithmic series and zeta. Everything here is a pure function of an
// immutable ParentSpec.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace gaitd {

using Count = std::int64_t;

enum class Family { Poisson, NegBinomial, Logarithmic, Zeta };

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

/// Number of parameters in theta for a family (1 or 2).
int family_arity(Family f);

/// Smallest support value: 0 for Poisson/NB, 1 for logarithmic/zeta.
Count support_min(Family f);

/// Family plus parameter vector. Poisson: (lambda). NegBinomial: (mu, k) with
/// variance mu + mu^2/k. Logarithmic: (p). Zeta: (s) with pmf y^-(s+1)/zeta(s+1).
class ParentSpec {
 public:
  /// Throws DomainError if theta has the wrong length or leaves the domain.
  ParentSpec(Family family, std::span<const double> theta);

  static ParentSpec poisson(double lambda);
  static ParentSpec negbin(double mu, double k);
  static ParentSpec logarithmic(double p);
  static ParentSpec zeta(double s);

  Family family() const noexcept { return family_; }
  int arity() const noexcept { return family_arity(family_); }
  std::span<const double> theta() const noexcept { return {theta_.data(), static_cast<std::size_t>(arity())}; }
  double theta(int i) const { return theta_.at(static_cast<std::size_t>(i)); }

  /// Same family with a different parameter vector.
  ParentSpec with_theta(std::span<const double> theta) const { return ParentSpec(family_, theta); }

  bool operator==(const ParentSpec& other) const;

 private:
  Family family_;
  std::array<double, 2> theta_{0.0, 0.0};
  // Constants hoisted out of the pmf: log normalizer per family.
  double log_norm_ = 0.0;
  double aux_ = 0.0;

  friend double parent_log_pmf(const ParentSpec&, Count);
};

/// Validates theta for the family; returns an empty string when valid.
std::string check_theta(Family family, std::span<const double> theta);

double parent_log_pmf(const ParentSpec& spec, Count y);
/// Zero outside the support.
double parent_pmf(const ParentSpec& spec, Count y);
/// Pr(Y <= y); 0 below the support minimum.
double parent_cdf(const ParentSpec& spec, Count y);
/// Pr(Y > y), accurate in the far upper tail.
double parent_sf(const ParentSpec& spec, Count y);

struct ParentMoments {
  double mean = 0.0;
  double variance = 0.0;
  bool mean_exists = true;
  bool variance_exists = true;
};

ParentMoments parent_moments(const ParentSpec& spec);

/// E[Y^k]; nullopt when the moment diverges (zeta with s <= k).
std::optional<double> parent_raw_moment(const ParentSpec& spec, int k);

/// Sum of y^k f(y) over y = first, first+step, ... (optionally <= last).
/// Unbounded sums for zeta use Hurwitz-zeta tails; nullopt if such a sum
/// diverges. Values below the support minimum are skipped.
std::optional<double> parent_partial_moment(const ParentSpec& spec, int k, Count first, Count step,
                                            std::optional<Count> last = std::nullopt);

/// Smallest Y with Pr(Y > Y) <= tail_mass. Saturates at kMaxSupportBound.
Count support_upper_bound(const ParentSpec& spec, double tail_mass);

inline constexpr Count kMaxSupportBound = Count{1} << 52;

/// Hurwitz zeta sum_{j>=0} (a+j)^-s for s > 1, a > 0 via Euler-Maclaurin.
double hurwitz_zeta(double s, double a);
/// Riemann zeta for s > 1.
double riemann_zeta(double s);

}  // namespace gaitd
