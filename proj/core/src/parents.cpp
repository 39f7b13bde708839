#include "gaitd/parents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/zeta.hpp>

#include "gaitd/errors.hpp"

namespace gaitd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// B_{2k} / (2k)! for k = 1..8.
constexpr std::array<double, 8> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

double mode_hint(const ParentSpec& spec) {
  switch (spec.family()) {
    case Family::Poisson:
      return spec.theta(0);
    case Family::NegBinomial:
      return spec.theta(0);
    case Family::Logarithmic:
    case Family::Zeta:
      return 1.0;
  }
  return 0.0;
}

// Sum of y^k f(y) on an unbounded lattice for families with geometric or
// faster tails. Stops once past the bulk and terms are negligible.
double lattice_sum_light_tail(const ParentSpec& spec, int k, Count first, Count step,
                              std::optional<Count> last) {
  const double bulk = mode_hint(spec);
  const double sd = std::sqrt(std::max(1.0, parent_moments(spec).variance));
  long double sum = 0.0L;
  Count y = std::max(first, support_min(spec.family()));
  if (y != first) {
    // realign onto the lattice
    const Count off = (y - first) % step;
    if (off != 0) y += step - off;
  }
  double prev = 0.0;
  for (std::int64_t iter = 0;; ++iter, y += step) {
    if (last && y > *last) break;
    const double f = parent_pmf(spec, y);
    const double term = (k == 0) ? f : std::pow(static_cast<double>(y), k) * f;
    sum += term;
    const bool past_bulk = static_cast<double>(y) > bulk + 10.0 * sd;
    if (!last && past_bulk && term <= prev &&
        term <= 1e-20 * static_cast<double>(std::fabs(sum)) + std::numeric_limits<double>::min()) {
      break;
    }
    prev = term;
    if (iter > 200'000'000) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Poisson:
      return "poisson";
    case Family::NegBinomial:
      return "negbin";
    case Family::Logarithmic:
      return "logarithmic";
    case Family::Zeta:
      return "zeta";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "poisson" || name == "pois") return Family::Poisson;
  if (name == "negbin" || name == "nb" || name == "negbinomial") return Family::NegBinomial;
  if (name == "logarithmic" || name == "log" || name == "logff") return Family::Logarithmic;
  if (name == "zeta" || name == "zipf") return Family::Zeta;
  return std::nullopt;
}

int family_arity(Family f) { return f == Family::NegBinomial ? 2 : 1; }

Count support_min(Family f) {
  return (f == Family::Logarithmic || f == Family::Zeta) ? 1 : 0;
}

std::string check_theta(Family family, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != family_arity(family)) {
    return std::string(family_name(family)) + " expects " + std::to_string(family_arity(family)) +
           " parameter(s), got " + std::to_string(theta.size());
  }
  for (double t : theta) {
    if (!std::isfinite(t)) return "non-finite parameter";
  }
  switch (family) {
    case Family::Poisson:
      if (theta[0] <= 0) return "poisson lambda must be > 0";
      break;
    case Family::NegBinomial:
      if (theta[0] <= 0) return "negbin mu must be > 0";
      if (theta[1] <= 0) return "negbin k must be > 0";
      break;
    case Family::Logarithmic:
      if (theta[0] <= 0 || theta[0] >= 1) return "logarithmic p must lie in (0, 1)";
      break;
    case Family::Zeta:
      if (theta[0] <= 0) return "zeta s must be > 0";
      break;
  }
  return {};
}

ParentSpec::ParentSpec(Family family, std::span<const double> theta) : family_(family) {
  if (auto msg = check_theta(family, theta); !msg.empty()) throw DomainError(msg);
  std::copy(theta.begin(), theta.end(), theta_.begin());
  switch (family_) {
    case Family::Poisson:
      log_norm_ = std::log(theta_[0]);
      break;
    case Family::NegBinomial: {
      const double mu = theta_[0], k = theta_[1];
      log_norm_ = -k * std::log1p(mu / k);          // k log(k/(k+mu))
      aux_ = std::log(mu) - std::log(k + mu);       // log(mu/(k+mu))
      break;
    }
    case Family::Logarithmic:
      log_norm_ = std::log(-std::log1p(-theta_[0]));
      aux_ = std::log(theta_[0]);
      break;
    case Family::Zeta:
      log_norm_ = std::log(riemann_zeta(theta_[0] + 1.0));
      break;
  }
}

ParentSpec ParentSpec::poisson(double lambda) {
  const double t[] = {lambda};
  return ParentSpec(Family::Poisson, t);
}
ParentSpec ParentSpec::negbin(double mu, double k) {
  const double t[] = {mu, k};
  return ParentSpec(Family::NegBinomial, t);
}
ParentSpec ParentSpec::logarithmic(double p) {
  const double t[] = {p};
  return ParentSpec(Family::Logarithmic, t);
}
ParentSpec ParentSpec::zeta(double s) {
  const double t[] = {s};
  return ParentSpec(Family::Zeta, t);
}

bool ParentSpec::operator==(const ParentSpec& other) const {
  return family_ == other.family_ && theta_ == other.theta_;
}

double parent_log_pmf(const ParentSpec& spec, Count y) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (y < support_min(spec.family_)) return kNegInf;
  const double yd = static_cast<double>(y);
  switch (spec.family_) {
    case Family::Poisson:
      return yd * spec.log_norm_ - spec.theta_[0] - std::lgamma(yd + 1.0);
    case Family::NegBinomial: {
      const double k = spec.theta_[1];
      return std::lgamma(yd + k) - std::lgamma(k) - std::lgamma(yd + 1.0) + spec.log_norm_ +
             (y == 0 ? 0.0 : yd * spec.aux_);
    }
    case Family::Logarithmic:
      return yd * spec.aux_ - std::log(yd) - spec.log_norm_;
    case Family::Zeta:
      return -(spec.theta_[0] + 1.0) * std::log(yd) - spec.log_norm_;
  }
  return kNaN;
}

double parent_pmf(const ParentSpec& spec, Count y) {
  if (y < support_min(spec.family())) return 0.0;
  return std::exp(parent_log_pmf(spec, y));
}

double parent_cdf(const ParentSpec& spec, Count y) {
  const Count lo = support_min(spec.family());
  if (y < lo) return 0.0;
  if (spec.family() == Family::Zeta) {
    if (y > 1000) {
      const double s1 = spec.theta(0) + 1.0;
      return 1.0 - hurwitz_zeta(s1, static_cast<double>(y) + 1.0) / riemann_zeta(s1);
    }
  } else if (y - lo > 100000) {
    return 1.0 - parent_sf(spec, y);
  }
  long double sum = 0.0L;
  for (Count u = lo; u <= y; ++u) sum += parent_pmf(spec, u);
  return std::min(1.0, static_cast<double>(sum));
}

double parent_sf(const ParentSpec& spec, Count y) {
  const Count lo = support_min(spec.family());
  if (y < lo) return 1.0;
  if (spec.family() == Family::Zeta) {
    const double s1 = spec.theta(0) + 1.0;
    return hurwitz_zeta(s1, static_cast<double>(y) + 1.0) / riemann_zeta(s1);
  }
  const double bulk = mode_hint(spec);
  if (static_cast<double>(y) <= bulk || y - lo <= 100000) {
    const double c = [&] {
      long double sum = 0.0L;
      for (Count u = lo; u <= y; ++u) sum += parent_pmf(spec, u);
      return static_cast<double>(sum);
    }();
    if (1.0 - c > 1e-3) return 1.0 - c;
  }
  return lattice_sum_light_tail(spec, 0, y + 1, 1, std::nullopt);
}

ParentMoments parent_moments(const ParentSpec& spec) {
  ParentMoments m;
  switch (spec.family()) {
    case Family::Poisson:
      m.mean = m.variance = spec.theta(0);
      break;
    case Family::NegBinomial: {
      const double mu = spec.theta(0), k = spec.theta(1);
      m.mean = mu;
      m.variance = mu + mu * mu / k;
      break;
    }
    case Family::Logarithmic: {
      const double p = spec.theta(0);
      const double L = std::log1p(-p);
      m.mean = -p / ((1.0 - p) * L);
      m.variance = -p * (p + L) / ((1.0 - p) * (1.0 - p) * L * L);
      break;
    }
    case Family::Zeta: {
      const double s = spec.theta(0);
      const double z1 = riemann_zeta(s + 1.0);
      m.mean_exists = s > 1.0;
      m.variance_exists = s > 2.0;
      m.mean = m.mean_exists ? riemann_zeta(s) / z1 : std::numeric_limits<double>::infinity();
      m.variance = m.variance_exists ? riemann_zeta(s - 1.0) / z1 - m.mean * m.mean
                                     : std::numeric_limits<double>::infinity();
      break;
    }
  }
  return m;
}

std::optional<double> parent_raw_moment(const ParentSpec& spec, int k) {
  if (k < 0) throw DomainError("moment order must be nonnegative");
  if (k == 0) return 1.0;
  if (spec.family() == Family::Zeta) {
    const double s = spec.theta(0);
    if (s <= static_cast<double>(k)) return std::nullopt;
    return riemann_zeta(s + 1.0 - k) / riemann_zeta(s + 1.0);
  }
  if (k <= 2) {
    const auto m = parent_moments(spec);
    return k == 1 ? m.mean : m.variance + m.mean * m.mean;
  }
  return lattice_sum_light_tail(spec, k, support_min(spec.family()), 1, std::nullopt);
}

std::optional<double> parent_partial_moment(const ParentSpec& spec, int k, Count first, Count step,
                                            std::optional<Count> last) {
  if (step < 1) throw DomainError("lattice step must be >= 1");
  const Count lo = support_min(spec.family());
  if (first < lo) {
    const Count jumps = (lo - first + step - 1) / step;
    first += jumps * step;
  }
  if (last && *last < first) return 0.0;
  if (spec.family() != Family::Zeta) {
    return lattice_sum_light_tail(spec, k, first, step, last);
  }
  // (first + j step)^(k - s - 1) = step^(k-s-1) (first/step + j)^-(s+1-k)
  const double s = spec.theta(0);
  const double sigma = s + 1.0 - k;
  const double z1 = riemann_zeta(s + 1.0);
  const double a = static_cast<double>(first) / static_cast<double>(step);
  const double scale = std::pow(static_cast<double>(step), -sigma);
  if (!last) {
    if (sigma <= 1.0) return std::nullopt;
    return scale * hurwitz_zeta(sigma, a) / z1;
  }
  const Count count = (*last - first) / step + 1;
  if (sigma > 1.0 && count > 64) {
    return scale * (hurwitz_zeta(sigma, a) - hurwitz_zeta(sigma, a + static_cast<double>(count))) / z1;
  }
  long double sum = 0.0L;
  for (Count y = first; y <= *last; y += step) {
    sum += std::pow(static_cast<double>(y), -sigma);
  }
  return static_cast<double>(sum) / z1;
}

Count support_upper_bound(const ParentSpec& spec, double tail_mass) {
  const Count lo = support_min(spec.family());
  if (!(tail_mass > 0.0) || tail_mass >= 1.0) {
    if (tail_mass >= 1.0) return lo;
    throw DomainError("tail_mass must lie in (0, 1)");
  }
  if (spec.family() == Family::Zeta) {
    if (parent_sf(spec, lo) <= tail_mass) return lo;
    Count hi = lo + 1;
    while (parent_sf(spec, hi) > tail_mass) {
      if (hi >= kMaxSupportBound / 2) return kMaxSupportBound;
      hi *= 2;
    }
    Count left = hi / 2;  // sf(left) > tail_mass
    while (hi - left > 1) {
      const Count mid = left + (hi - left) / 2;
      if (parent_sf(spec, mid) > tail_mass) left = mid; else hi = mid;
    }
    return hi;
  }
  long double cdf = 0.0L;
  Count y = lo;
  for (;; ++y) {
    cdf += parent_pmf(spec, y);
    const double tail = 1.0 - static_cast<double>(cdf);
    if (tail <= tail_mass && tail > 1e-4) return y;
    if (tail <= 1e-4) break;
    if (y >= kMaxSupportBound) return kMaxSupportBound;
  }
  // Far tail: track the exact upper sum to avoid cancellation.
  long double sf = lattice_sum_light_tail(spec, 0, y + 1, 1, std::nullopt);
  while (static_cast<double>(sf) > tail_mass) {
    ++y;
    sf -= parent_pmf(spec, y);
    if (y >= kMaxSupportBound) return kMaxSupportBound;
  }
  return y;
}

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw DomainError("hurwitz_zeta requires s > 1");
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta requires a > 0");
  const double threshold = std::max(16.0, s + 8.0);
  long double head = 0.0L;
  double x = a;
  while (x < threshold) {
    head += std::pow(x, -s);
    x += 1.0;
  }
  // Euler-Maclaurin tail from x.
  double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;               // s (s+1) ... (s+2k-2)
  double xpow = std::pow(x, -s - 1.0);
  const double inv_x2 = 1.0 / (x * x);
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    const double term = kBernoulliOverFactorial[k] * rising * xpow;
    tail += term;
    if (std::fabs(term) < 1e-18 * std::fabs(tail)) break;
    const double two_k = 2.0 * static_cast<double>(k + 1);
    rising *= (s + two_k - 1.0) * (s + two_k);
    xpow *= inv_x2;
  }
  return static_cast<double>(head) + tail;
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw DomainError("riemann_zeta requires s > 1");
  return boost::math::zeta(s);
}

}  // namespace gaitd
