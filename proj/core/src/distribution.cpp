#include "gaitd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "gaitd/errors.hpp"

namespace gaitd {

struct GaitdDist::Cache {
  std::once_flag once;
  std::vector<double> cumulative;
  SupportWindow window;
};

namespace {

std::vector<double> conditional_weights(const ParentSpec& spec, const std::vector<Count>& values) {
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) logs[i] = parent_log_pmf(spec, values[i]);
  if (logs.empty()) return logs;
  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) {
    throw DegenerateModelError("parametric special set has zero mass under its distribution");
  }
  double total = 0.0;
  for (double& l : logs) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logs) l /= total;
  return logs;
}

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void require_size(const std::vector<double>& probs, const std::vector<Count>& set, const char* name) {
  if (probs.size() != set.size()) {
    throw std::invalid_argument(std::string(name) + " has " + std::to_string(probs.size()) +
                                " probabilities for " + std::to_string(set.size()) + " values");
  }
}

std::vector<double> resolve_theta(const std::vector<double>& theta, const std::vector<double>& fallback) {
  return theta.empty() ? fallback : theta;
}

}  // namespace

double uniform_open01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

GaitdDist::GaitdDist(Family family, SpecialSets sets, GaitdParams params, DistOptions options)
    : parent_(family, params.theta_pi),
      alpha_(family, resolve_theta(params.theta_alpha, params.theta_pi)),
      iota_(family, resolve_theta(params.theta_iota, params.theta_pi)),
      delta_(family, resolve_theta(params.theta_delta, params.theta_pi)),
      sets_(std::move(sets)),
      options_(options) {
  init(std::move(params));
}

GaitdDist::GaitdDist(const ParentSpec& parent, const ParentSpec& alpha, const ParentSpec& iota,
                     const ParentSpec& delta, SpecialSets sets, GaitdParams probs, DistOptions options)
    : parent_(parent), alpha_(alpha), iota_(iota), delta_(delta), sets_(std::move(sets)), options_(options) {
  if (alpha.family() != parent.family() || iota.family() != parent.family() ||
      delta.family() != parent.family()) {
    throw std::invalid_argument("altered/inflated/deflated distributions must share the parent family");
  }
  auto copy = [](const ParentSpec& s) { return std::vector<double>(s.theta().begin(), s.theta().end()); };
  probs.theta_pi = copy(parent);
  probs.theta_alpha = copy(alpha);
  probs.theta_iota = copy(iota);
  probs.theta_delta = copy(delta);
  init(std::move(probs));
}

void GaitdDist::init(GaitdParams probs) {
  require_size(probs.omega_np, sets_.alt_np, "omega_np");
  require_size(probs.phi_np, sets_.inf_np, "phi_np");
  require_size(probs.psi_np, sets_.def_np, "psi_np");
  if (options_.tail_mass <= 0.0 || options_.tail_mass >= 1.0) {
    throw DomainError("tail_mass must lie in (0, 1)");
  }

  auto theta_of = [](const ParentSpec& s) { return std::vector<double>(s.theta().begin(), s.theta().end()); };
  probs.theta_pi = theta_of(parent_);
  probs.theta_alpha = theta_of(alpha_);
  probs.theta_iota = theta_of(iota_);
  probs.theta_delta = theta_of(delta_);
  if (sets_.alt_p.empty()) probs.omega_p = 0.0;
  if (sets_.inf_p.empty()) probs.phi_p = 0.0;
  if (sets_.def_p.empty()) probs.psi_p = 0.0;
  params_ = std::move(probs);
  union_ = std::make_shared<const SpecialUnion>(sets_);
  cache_ = std::make_shared<Cache>();

  alt_w_ = conditional_weights(alpha_, sets_.alt_p);
  inf_w_ = conditional_weights(iota_, sets_.inf_p);
  def_w_ = conditional_weights(delta_, sets_.def_p);

  const double s_omega = sum_of(params_.omega_np);
  const double s_phi = sum_of(params_.phi_np);
  const double s_psi = sum_of(params_.psi_np);
  budget_ = params_.omega_p + params_.phi_p + params_.psi_p + s_omega + s_phi + s_psi;
  numerator_ = 1.0 - params_.omega_p - params_.phi_p + params_.psi_p - s_omega - s_phi + s_psi;

  kept_mass_ = *kept_parent_moment(0);
  alt_mass_ = 0.0;
  for (const auto* set : {&sets_.alt_p, &sets_.alt_np}) {
    for (Count a : *set) alt_mass_ += parent_pmf(parent_, a);
  }
  denominator_ = kept_mass_ - alt_mass_;
  if (!(denominator_ > 0.0)) {
    throw DegenerateModelError("truncation and alteration remove all parent mass");
  }
  delta_value_ = numerator_ / denominator_;

  double inf_def_mass = 0.0;
  for (const auto* set : {&sets_.inf_p, &sets_.inf_np, &sets_.def_p, &sets_.def_np}) {
    for (Count v : *set) inf_def_mass += parent_pmf(parent_, v);
  }
  nonspecial_mass_ = std::max(0.0, denominator_ - inf_def_mass);
}

std::optional<double> GaitdDist::kept_parent_moment(int k, std::optional<Count> upto) const {
  const Count lo = support_min(family());
  Count first = lo;
  Count step = 1;
  if (sets_.lattice) {
    step = sets_.lattice->step;
    first = sets_.lattice->offset;
    if (first < lo) first += ((lo - first + step - 1) / step) * step;
  }
  std::optional<Count> last;
  if (sets_.trunc_tail_start) last = *sets_.trunc_tail_start - 1;
  if (upto) last = last ? std::min(*last, *upto) : *upto;

  std::optional<double> base;
  if (last && *last < first) {
    base = 0.0;
  } else if (!last && step == 1) {
    base = parent_raw_moment(parent_, k);
  } else if (k == 0 && step == 1) {
    base = parent_cdf(parent_, *last);
  } else {
    base = parent_partial_moment(parent_, k, first, step, last);
  }
  if (!base) return std::nullopt;

  double total = *base;
  for (Count t : sets_.trunc) {
    if (t < first) continue;
    if (sets_.lattice && !sets_.lattice->on_lattice(t)) continue;
    if (last && t > *last) continue;
    total -= std::pow(static_cast<double>(t), k) * parent_pmf(parent_, t);
  }
  return total;
}

double GaitdDist::pmf(Count y) const {
  if (y < support_min(family())) return 0.0;
  const auto slot = union_->classify(y);
  const auto i = static_cast<std::size_t>(slot.index);
  switch (slot.kind) {
    case SetKind::Truncated:
      return 0.0;
    case SetKind::AltP:
      return params_.omega_p * alt_w_[i];
    case SetKind::AltNp:
      return params_.omega_np[i];
    case SetKind::InfP:
      return delta_value_ * parent_pmf(parent_, y) + params_.phi_p * inf_w_[i];
    case SetKind::InfNp:
      return delta_value_ * parent_pmf(parent_, y) + params_.phi_np[i];
    case SetKind::DefP:
      return delta_value_ * parent_pmf(parent_, y) - params_.psi_p * def_w_[i];
    case SetKind::DefNp:
      return delta_value_ * parent_pmf(parent_, y) - params_.psi_np[i];
    case SetKind::Nonspecial:
      return delta_value_ * parent_pmf(parent_, y);
  }
  return 0.0;
}

double GaitdDist::log_pmf(Count y) const {
  if (y < support_min(family())) return -std::numeric_limits<double>::infinity();
  const auto kind = union_->classify(y).kind;
  if (kind == SetKind::Nonspecial && delta_value_ > 0.0) {
    return std::log(delta_value_) + parent_log_pmf(parent_, y);
  }
  const double p = pmf(y);
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

PmfComponents GaitdDist::components(Count y) const {
  PmfComponents c;
  if (y < support_min(family())) return c;
  const auto slot = union_->classify(y);
  const auto i = static_cast<std::size_t>(slot.index);
  switch (slot.kind) {
    case SetKind::Truncated:
      break;
    case SetKind::AltP:
      c.altered = params_.omega_p * alt_w_[i];
      break;
    case SetKind::AltNp:
      c.altered = params_.omega_np[i];
      break;
    case SetKind::InfP:
      c.scaled_parent = delta_value_ * parent_pmf(parent_, y);
      c.spike = params_.phi_p * inf_w_[i];
      break;
    case SetKind::InfNp:
      c.scaled_parent = delta_value_ * parent_pmf(parent_, y);
      c.spike = params_.phi_np[i];
      break;
    case SetKind::DefP:
      c.scaled_parent = delta_value_ * parent_pmf(parent_, y);
      c.dip = params_.psi_p * def_w_[i];
      break;
    case SetKind::DefNp:
      c.scaled_parent = delta_value_ * parent_pmf(parent_, y);
      c.dip = params_.psi_np[i];
      break;
    case SetKind::Nonspecial:
      c.scaled_parent = delta_value_ * parent_pmf(parent_, y);
      break;
  }
  return c;
}

double GaitdDist::cdf(Count y) const {
  if (y < support_min(family())) return 0.0;
  // Past every finite special value only scaled parent mass remains above y;
  // the complement keeps the far tail exact.
  const auto last = union_->max_finite();
  if ((!last || y >= *last) && parent_sf(parent_, y) < 0.5) {
    const auto tail = union_->tail_start();
    if (tail && y >= *tail - 1) return 1.0;
    double upper = sets_.lattice ? kept_mass_ - kept_parent_moment(0, y).value_or(0.0) : parent_sf(parent_, y);
    if (tail && !sets_.lattice) upper -= parent_sf(parent_, *tail - 1);
    return std::clamp(1.0 - delta_value_ * upper, 0.0, 1.0);
  }
  double special = 0.0;
  double alt_parent = 0.0;
  auto weighted = [&](const std::vector<Count>& set, const std::vector<double>& w, double scale) {
    double s = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (set[j] <= y) s += w[j];
    }
    return scale * s;
  };
  special += weighted(sets_.alt_p, alt_w_, params_.omega_p);
  special += weighted(sets_.inf_p, inf_w_, params_.phi_p);
  special -= weighted(sets_.def_p, def_w_, params_.psi_p);
  special += weighted(sets_.alt_np, params_.omega_np, 1.0);
  special += weighted(sets_.inf_np, params_.phi_np, 1.0);
  special -= weighted(sets_.def_np, params_.psi_np, 1.0);
  for (const auto* set : {&sets_.alt_p, &sets_.alt_np}) {
    for (Count a : *set) {
      if (a <= y) alt_parent += parent_pmf(parent_, a);
    }
  }
  const double kept = kept_parent_moment(0, y).value_or(0.0);
  const double f = special + delta_value_ * (kept - alt_parent);
  return std::clamp(f, 0.0, 1.0);
}

std::optional<double> GaitdDist::moment(int k) const {
  if (k < 1) throw DomainError("moment order must be >= 1");
  auto power = [k](Count v) { return std::pow(static_cast<double>(v), k); };
  double total = 0.0;
  auto weighted = [&](const std::vector<Count>& set, const std::vector<double>& w, double scale) {
    double s = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) s += power(set[j]) * w[j];
    return scale * s;
  };
  total += weighted(sets_.alt_p, alt_w_, params_.omega_p);
  total += weighted(sets_.inf_p, inf_w_, params_.phi_p);
  total -= weighted(sets_.def_p, def_w_, params_.psi_p);
  total += weighted(sets_.alt_np, params_.omega_np, 1.0);
  total += weighted(sets_.inf_np, params_.phi_np, 1.0);
  total -= weighted(sets_.def_np, params_.psi_np, 1.0);

  const auto kept = kept_parent_moment(k);
  if (!kept) return std::nullopt;
  double alt_parent = 0.0;
  for (const auto* set : {&sets_.alt_p, &sets_.alt_np}) {
    for (Count a : *set) alt_parent += power(a) * parent_pmf(parent_, a);
  }
  return total + delta_value_ * (*kept - alt_parent);
}

SupportWindow GaitdDist::support_window() const {
  SupportWindow w;
  w.lo = support_min(family());
  const Count cap = w.lo + options_.max_window - 1;
  if (sets_.trunc_tail_start) {
    w.hi = *sets_.trunc_tail_start - 1;
    w.tail_truncated = w.hi <= cap;
    w.hi = std::min(w.hi, cap);
    return w;
  }
  const double scaled_tail = options_.tail_mass / std::max(1.0, delta_value_);
  Count hi = support_upper_bound(parent_, scaled_tail);
  if (auto m = union_->max_finite()) hi = std::max(hi, *m);
  w.hi = std::min(hi, cap);
  return w;
}

const std::vector<double>& GaitdDist::cumulative() const {
  std::call_once(cache_->once, [this] {
    const auto w = support_window();
    cache_->window = w;
    auto& cum = cache_->cumulative;
    cum.reserve(static_cast<std::size_t>(w.hi - w.lo + 1));
    long double acc = 0.0L;
    for (Count y = w.lo; y <= w.hi; ++y) {
      acc += pmf(y);
      cum.push_back(static_cast<double>(acc));
    }
  });
  return cache_->cumulative;
}

Count GaitdDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile requires 0 < p < 1");
  const auto& cum = cumulative();
  const auto w = cache_->window;
  if (p <= cum.back()) {
    const auto it = std::lower_bound(cum.begin(), cum.end(), p);
    return w.lo + static_cast<Count>(it - cum.begin());
  }
  if (w.tail_truncated) {
    Count y = w.hi;
    while (y > w.lo && pmf(y) <= 0.0) --y;
    return y;
  }
  // Beyond the cached window: exponential search then bisection on the CDF.
  Count left = w.hi;
  Count right = std::max<Count>(w.hi + 1, 2 * w.hi);
  while (cdf(right) < p) {
    if (right >= kMaxSupportBound / 2) return kMaxSupportBound;
    left = right;
    right *= 2;
  }
  while (right - left > 1) {
    const Count mid = left + (right - left) / 2;
    if (cdf(mid) >= p) right = mid; else left = mid;
  }
  return right;
}

std::vector<Count> GaitdDist::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<Count> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(uniform_open01(rng)));
  return out;
}

std::vector<Count> GaitdDist::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  return sample(n, rng);
}

std::vector<ParamViolation> validate_params(const GaitdDist& dist) {
  std::vector<ParamViolation> out;
  const auto& s = dist.sets();
  const auto& p = dist.params();
  auto check_scalar = [&](const std::vector<Count>& set, double prob, const char* name) {
    if (!set.empty() && !(prob > 0.0)) {
      out.push_back({std::string(name) + " > 0", std::string(name) + " must be positive", set});
    }
  };
  auto check_vector = [&](const std::vector<Count>& set, const std::vector<double>& probs, const char* name) {
    std::vector<Count> bad;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!(probs[i] > 0.0)) bad.push_back(set[i]);
    }
    if (!bad.empty()) {
      out.push_back({std::string(name) + " > 0", std::string(name) + " entries must be positive", bad});
    }
  };
  check_scalar(s.alt_p, p.omega_p, "omega_p");
  check_scalar(s.inf_p, p.phi_p, "phi_p");
  check_scalar(s.def_p, p.psi_p, "psi_p");
  check_vector(s.alt_np, p.omega_np, "omega_np");
  check_vector(s.inf_np, p.phi_np, "phi_np");
  check_vector(s.def_np, p.psi_np, "psi_np");

  if (!(dist.budget() < 1.0)) {
    out.push_back({"budget < 1", "special probabilities sum to " + std::to_string(dist.budget()), {}});
  }
  if (!(dist.delta() > 0.0)) {
    out.push_back({"Delta > 0", "normalizing constant is " + std::to_string(dist.delta()), {}});
  }
  std::vector<Count> negative;
  for (const auto* set : {&s.def_p, &s.def_np}) {
    for (Count d : *set) {
      if (dist.pmf(d) < 0.0) negative.push_back(d);
    }
  }
  if (!negative.empty()) {
    out.push_back({"pmf >= 0 on deflated values", "deflation exceeds the scaled parent mass", negative});
  }
  return out;
}

}  // namespace gaitd
