#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaitd/fit.hpp"

namespace gaitd {

struct MEstimate {
  double m_hat = 1.0;             // sample mean / sample variance
  double dispersion_index = 1.0;  // variance / mean
  bool slight = false;            // index in (2/3, 1): expansion is probably unnecessary
};

/// Throws DomainError unless variance > 0 and mean > 0.
MEstimate moment_estimate_m(double mean, double variance);

/// Expansion y -> nu + m y.
struct GteSpec {
  Count m = 1;
  Count nu = 0;
};

/// Maps every special value through nu + m v, truncates all values off the
/// lattice {nu, nu + m, ...} and adds log m to the offset of every
/// log-linked mean parameter. Rejects m > 1 for logarithmic and zeta
/// parents, whose parameters have no mean scale to offset.
ModelSpec build_gte_model(const ModelSpec& base, const GteSpec& gte);

/// Responses mapped to the expanded scale; covariates and weights unchanged.
Data expand_data(const Data& data, const GteSpec& gte);

/// Original-scale value of an expanded-scale quantity: (v - nu) / m.
double gte_back_transform(double expanded, const GteSpec& gte);

struct GteRow {
  GteSpec gte;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string error;  // nonempty when the fit failed; the row is then skipped
};

struct GteSearch {
  std::vector<GteRow> table;
  std::optional<std::size_t> best;  // index into table
  std::optional<FitResult> best_fit;
};

/// Fits every (m, nu) pair. The expansion is one-to-one on the counts, so the
/// log-likelihoods are comparable across m. Fits run on GAITD_NUM_THREADS
/// threads when control.threads is 0.
GteSearch search_m(const ModelSpec& base, const Data& data, const std::vector<Count>& ms,
                   const std::vector<Count>& nus = {0}, const FitControl& control = {});

enum class SegmentMode { UpperTail, LowerTailReflected };

/// A parent restricted to one side of nu and re-expressed as a count from
/// nu: Y - nu on {nu, nu+1, ...}, or nu - Y on {min, ..., nu}.
class SegmentDist {
 public:
  SegmentDist(GaitdDist base, SegmentMode mode, Count nu);

  double pmf(Count y) const;
  double cdf(Count y) const;
  /// Largest attainable value for the reflected mode.
  std::optional<Count> max_value() const;
  double mean() const;

  const GaitdDist& base() const noexcept { return base_; }
  SegmentMode mode() const noexcept { return mode_; }
  Count nu() const noexcept { return nu_; }

 private:
  GaitdDist base_;
  SegmentMode mode_;
  Count nu_;
};

SegmentDist gt_segment(const ParentSpec& parent, SegmentMode mode, Count nu);

}  // namespace gaitd
