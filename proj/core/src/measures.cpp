#include "gaitd/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <thread>

#include "gaitd/errors.hpp"

namespace gaitd {

namespace {

double kld_with_nonspecial_weight(const GaitdDist& dist, double nonspecial_weight) {
  const auto& s = dist.sets();
  const auto& p = dist.params();
  const auto& parent = dist.parent();
  auto term = [&](double prob, Count y) {
    return prob > 0.0 ? prob * (std::log(prob) - parent_log_pmf(parent, y)) : 0.0;
  };
  double total = 0.0;
  for (std::size_t j = 0; j < s.alt_p.size(); ++j) total += term(p.omega_p * dist.alt_weights()[j], s.alt_p[j]);
  for (std::size_t j = 0; j < s.alt_np.size(); ++j) total += term(p.omega_np[j], s.alt_np[j]);
  for (const auto* set : {&s.inf_p, &s.inf_np, &s.def_p, &s.def_np}) {
    for (Count y : *set) total += term(dist.pmf(y), y);
  }
  const double d = dist.delta();
  if (d > 0.0) total += d * std::log(d) * nonspecial_weight;
  return total;
}

// Sum over the support of g(y) pmf(y), with g a quadratic c0 + c1 y + c2 y^2,
// assembled from the special-value terms and Delta times the kept parent sums.
std::optional<double> quadratic_expectation(const GaitdDist& dist, double c0, double c1, double c2) {
  auto g = [&](Count v) {
    const double y = static_cast<double>(v);
    return c0 + c1 * y + c2 * y * y;
  };
  const auto& s = dist.sets();
  const auto& p = dist.params();
  double total = 0.0;
  auto parametric = [&](const std::vector<Count>& set, const std::vector<double>& w, double scale) {
    double acc = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) acc += g(set[j]) * w[j];
    return scale * acc;
  };
  total += parametric(s.alt_p, dist.alt_weights(), p.omega_p);
  total += parametric(s.inf_p, dist.inf_weights(), p.phi_p);
  total -= parametric(s.def_p, dist.def_weights(), p.psi_p);
  total += parametric(s.alt_np, p.omega_np, 1.0);
  total += parametric(s.inf_np, p.phi_np, 1.0);
  total -= parametric(s.def_np, p.psi_np, 1.0);

  double kept = 0.0;
  const double coef[3] = {c0, c1, c2};
  for (int k = 0; k < 3; ++k) {
    if (coef[k] == 0.0) continue;
    const auto m = dist.kept_parent_moment(k);
    if (!m) return std::nullopt;
    kept += coef[k] * *m;
  }
  for (const auto* set : {&s.alt_p, &s.alt_np}) {
    for (Count a : *set) kept -= g(a) * parent_pmf(dist.parent(), a);
  }
  return total + dist.delta() * kept;
}

bool strictly_between(double w, double a, double b) {
  if (a > b) std::swap(a, b);
  return a < w && w < b;
}

}  // namespace

double kld_to_parent(const GaitdDist& dist) {
  return kld_with_nonspecial_weight(dist, dist.nonspecial_parent_mass());
}

double kld_baseline_weighted(const GaitdDist& dist) {
  return kld_with_nonspecial_weight(dist, dist.delta() * dist.nonspecial_parent_mass());
}

std::vector<HeapBalance> heap_seep_balance(const GaitdDist& dist) {
  const auto& s = dist.sets();
  std::vector<Count> inflated = s.inf_p;
  inflated.insert(inflated.end(), s.inf_np.begin(), s.inf_np.end());
  std::sort(inflated.begin(), inflated.end());
  std::vector<HeapBalance> out;
  for (Count i : inflated) {
    HeapBalance b;
    b.value = i;
    b.inflation = dist.components(i).spike;
    b.neighbour_deflation = dist.components(i - 1).dip + dist.components(i + 1).dip;
    out.push_back(b);
  }
  return out;
}

double xi_heapseep(const GaitdDist& dist) {
  const auto& s = dist.sets();
  const auto& p = dist.params();
  const double d = dist.delta();
  double total = 0.0;
  for (std::size_t j = 0; j < s.alt_p.size(); ++j) {
    total += std::abs(d * parent_pmf(dist.parent(), s.alt_p[j]) - p.omega_p * dist.alt_weights()[j]);
  }
  for (std::size_t j = 0; j < s.alt_np.size(); ++j) {
    total += std::abs(d * parent_pmf(dist.parent(), s.alt_np[j]) - p.omega_np[j]);
  }
  double inflation = s.inf_p.empty() ? 0.0 : p.phi_p;
  double deflation = s.def_p.empty() ? 0.0 : p.psi_p;
  for (double v : p.phi_np) inflation += v;
  for (double v : p.psi_np) deflation += v;
  return total + std::max(inflation, deflation);
}

std::string_view dispersion_name(Dispersion d) {
  switch (d) {
    case Dispersion::VMD_star:
      return "VMD_star";
    case Dispersion::VMD_pi:
      return "VMD_pi";
    case Dispersion::VVD:
      return "VVD";
    case Dispersion::DVMD:
      return "DVMD";
    case Dispersion::DIR:
      return "DIR";
  }
  return "?";
}

std::optional<Dispersion> parse_dispersion(std::string_view name) {
  for (auto d : {Dispersion::VMD_star, Dispersion::VMD_pi, Dispersion::VVD, Dispersion::DVMD, Dispersion::DIR}) {
    if (dispersion_name(d) == name) return d;
  }
  if (name == "VMD*" || name == "vmd_star") return Dispersion::VMD_star;
  if (name == "vmd_pi") return Dispersion::VMD_pi;
  if (name == "vvd") return Dispersion::VVD;
  if (name == "dvmd") return Dispersion::DVMD;
  if (name == "dir") return Dispersion::DIR;
  return std::nullopt;
}

double DispersionReport::value(Dispersion d) const {
  switch (d) {
    case Dispersion::VMD_star:
      return vmd_star;
    case Dispersion::VMD_pi:
      return vmd_pi;
    case Dispersion::VVD:
      return vvd;
    case Dispersion::DVMD:
      return dvmd;
    case Dispersion::DIR:
      return dir;
  }
  return 0.0;
}

bool DispersionReport::overdispersed(Dispersion d) const {
  return d == Dispersion::DIR ? dir > 1.0 : value(d) > 0.0;
}

DispersionReport dispersion_from_moments(double mean, double variance, double parent_mean,
                                         double parent_variance) {
  DispersionReport r;
  r.mean = mean;
  r.variance = variance;
  r.parent_mean = parent_mean;
  r.parent_variance = parent_variance;
  r.vmd_star = variance - mean;
  r.vmd_pi = variance - parent_mean;
  r.vvd = variance - parent_variance;
  r.dvmd = (variance - mean) - (parent_variance - parent_mean);
  r.dir = (variance / mean) / (parent_variance / parent_mean);
  return r;
}

std::optional<DispersionReport> dispersion_report(const GaitdDist& dist) {
  const auto pm = parent_moments(dist.parent());
  if (!pm.mean_exists || !pm.variance_exists) return std::nullopt;
  const auto mean = dist.moment(1);
  if (!mean) return std::nullopt;
  const auto var = quadratic_expectation(dist, *mean * *mean, -2.0 * *mean, 1.0);
  if (!var) return std::nullopt;
  return dispersion_from_moments(*mean, *var, pm.mean, pm.variance);
}

TheoremSides theorem_lhs(const GaitdDist& dist, Dispersion definition) {
  const auto mean = dist.moment(1);
  if (!mean) throw DomainError("mean of the modified distribution diverges");
  const double mu = *mean;
  TheoremSides out;
  if (definition == Dispersion::VMD_star) {
    const auto f2 = quadratic_expectation(dist, 0.0, -1.0, 1.0);
    if (!f2) throw DomainError("second factorial moment diverges");
    out.lhs = *f2;
    out.rhs = mu * mu;
    return out;
  }
  if (definition != Dispersion::VMD_pi && definition != Dispersion::VVD) {
    throw DomainError("theorem covers VMD_star, VMD_pi and VVD only");
  }
  const auto centered = quadratic_expectation(dist, mu * mu, -2.0 * mu, 1.0);
  const auto pm = parent_moments(dist.parent());
  if (!centered || !pm.mean_exists || !pm.variance_exists) throw DomainError("parent moments diverge");
  out.lhs = *centered;
  out.rhs = definition == Dispersion::VMD_pi ? pm.mean : pm.variance;
  return out;
}

double corollary_za(const ParentSpec& parent, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("omega must lie in (0, 1)");
  if (support_min(parent.family()) != 0) throw DomainError("parent must support 0");
  const auto pm = parent_moments(parent);
  const double f0 = parent_pmf(parent, 0);
  return (1.0 - omega) / (1.0 - f0) *
         (pm.variance - pm.mean + pm.mean * pm.mean * (omega - f0) / (1.0 - f0));
}

std::string_view table1_model_name(Table1Model m) {
  switch (m) {
    case Table1Model::ZAP:
      return "ZAP";
    case Table1Model::ZAB:
      return "ZAB";
    case Table1Model::ZIP:
      return "ZIP";
    case Table1Model::ZIB:
      return "ZIB";
    case Table1Model::ZTP:
      return "ZTP";
    case Table1Model::ZTB:
      return "ZTB";
  }
  return "?";
}

std::optional<Table1Model> parse_table1_model(std::string_view name) {
  for (auto m : {Table1Model::ZAP, Table1Model::ZAB, Table1Model::ZIP, Table1Model::ZIB, Table1Model::ZTP,
                 Table1Model::ZTB}) {
    if (table1_model_name(m) == name) return m;
  }
  return std::nullopt;
}

bool table1_is_binomial(Table1Model m) {
  return m == Table1Model::ZAB || m == Table1Model::ZIB || m == Table1Model::ZTB;
}

bool table1_condition(Table1Model model, Dispersion definition, const Table1Params& prm) {
  const double w = prm.w;
  if (definition == Dispersion::VMD_pi) {
    if (table1_is_binomial(model)) throw DomainError("VMD_pi is not tabulated for binomial rows");
    definition = Dispersion::VVD;
  }
  const bool vvd = definition == Dispersion::VVD;
  switch (model) {
    case Table1Model::ZAP: {
      const double e = std::exp(-prm.lambda);
      if (vvd) return strictly_between(w, e, 1.0 - (1.0 - e) / prm.lambda);
      return e < w;
    }
    case Table1Model::ZAB: {
      const double q = 1.0 - prm.p;
      const double n = prm.size;
      const double qn = std::pow(q, n);
      if (definition == Dispersion::VMD_star) return qn + (1.0 - qn) / n < w;
      if (vvd) return strictly_between(w, qn, 1.0 - q * (1.0 - qn) / (n * prm.p));
      return qn < w;
    }
    case Table1Model::ZIP:
      if (vvd) return w < 1.0 - 1.0 / prm.lambda;
      return true;
    case Table1Model::ZIB: {
      const double n = prm.size;
      // Var - E = (1 - phi) N p^2 (N phi - 1), so VMD_star needs phi > 1/N.
      if (definition == Dispersion::VMD_star) return w > 1.0 / n;
      if (vvd) return w < 1.0 - (1.0 - prm.p) / (n * prm.p);
      return true;
    }
    case Table1Model::ZTP:
    case Table1Model::ZTB:
      return false;
  }
  return false;
}

std::pair<double, double> zero_modified_binomial_moments(Table1Model kind, int size, double p, double w) {
  if (size < 1 || !(p > 0.0 && p < 1.0)) throw DomainError("binomial needs size >= 1 and 0 < p < 1");
  std::vector<double> f(static_cast<std::size_t>(size) + 1);
  for (int y = 0; y <= size; ++y) {
    f[static_cast<std::size_t>(y)] =
        std::exp(std::lgamma(size + 1.0) - std::lgamma(y + 1.0) - std::lgamma(size - y + 1.0) +
                 y * std::log(p) + (size - y) * std::log1p(-p));
  }
  const double f0 = f[0];
  std::vector<double> g(f.size());
  for (std::size_t y = 0; y < f.size(); ++y) {
    switch (kind) {
      case Table1Model::ZAB:
        g[y] = y == 0 ? w : (1.0 - w) * f[y] / (1.0 - f0);
        break;
      case Table1Model::ZIB:
        g[y] = (1.0 - w) * f[y] + (y == 0 ? w : 0.0);
        break;
      case Table1Model::ZTB:
        g[y] = y == 0 ? 0.0 : f[y] / (1.0 - f0);
        break;
      default:
        throw DomainError("not a binomial zero-modified model");
    }
  }
  double mean = 0.0;
  for (std::size_t y = 0; y < g.size(); ++y) mean += static_cast<double>(y) * g[y];
  double var = 0.0;
  for (std::size_t y = 0; y < g.size(); ++y) {
    const double d = static_cast<double>(y) - mean;
    var += d * d * g[y];
  }
  return {mean, var};
}

DispersionReport table1_numeric(Table1Model model, const Table1Params& prm) {
  if (table1_is_binomial(model)) {
    const auto [m, v] = zero_modified_binomial_moments(model, prm.size, prm.p, prm.w);
    const double n = prm.size;
    return dispersion_from_moments(m, v, n * prm.p, n * prm.p * (1.0 - prm.p));
  }
  SpecialSets sets;
  GaitdParams params;
  params.theta_pi = {prm.lambda};
  if (model == Table1Model::ZAP) {
    sets.alt_np = {0};
    params.omega_np = {prm.w};
  } else if (model == Table1Model::ZIP) {
    sets.inf_np = {0};
    params.phi_np = {prm.w};
  } else {
    sets.trunc = {0};
  }
  const GaitdDist dist(Family::Poisson, sets, params);
  return *dispersion_report(dist);
}

unsigned default_thread_count() {
  const char* env = std::getenv("GAITD_NUM_THREADS");
  unsigned n = 1;
  if (env) {
    const auto res = std::from_chars(env, env + std::strlen(env), n);
    if (res.ec != std::errc() || n == 0) n = 1;
  }
  return n;
}

RegionScan region_scan(Table1Model model, Dispersion definition, const RegionGrid& grid) {
  if (grid.nx < 2 || grid.nw < 2) throw DomainError("region grid needs at least 2 points per axis");
  const auto at = [](double lo, double hi, int n, int i) { return lo + (hi - lo) * i / (n - 1); };
  const bool binomial = table1_is_binomial(model);
  auto verdict = [&](double x, double w) {
    Table1Params prm;
    prm.w = w;
    prm.size = grid.size;
    if (binomial) prm.p = x; else prm.lambda = x;
    return table1_condition(model, definition, prm);
  };

  std::vector<std::vector<RegionPoint>> columns(static_cast<std::size_t>(grid.nx));
  std::vector<std::vector<RegionPoint>> edges(static_cast<std::size_t>(grid.nx));
  auto scan_column = [&](int i) {
    const double x = at(grid.x_lo, grid.x_hi, grid.nx, i);
    auto& col = columns[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid.nw; ++j) {
      const double w = at(grid.w_lo, grid.w_hi, grid.nw, j);
      col.push_back({x, w, verdict(x, w)});
    }
    for (std::size_t j = 1; j < col.size(); ++j) {
      if (col[j].over == col[j - 1].over) continue;
      double lo = col[j - 1].w, hi = col[j].w;
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (verdict(x, mid) == col[j - 1].over) lo = mid; else hi = mid;
      }
      edges[static_cast<std::size_t>(i)].push_back({x, 0.5 * (lo + hi), col[j].over});
    }
  };

  const unsigned threads = std::min<unsigned>(default_thread_count(), static_cast<unsigned>(grid.nx));
  if (threads <= 1) {
    for (int i = 0; i < grid.nx; ++i) scan_column(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = static_cast<int>(t); i < grid.nx; i += static_cast<int>(threads)) scan_column(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  RegionScan out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.points.insert(out.points.end(), columns[i].begin(), columns[i].end());
    out.boundary.insert(out.boundary.end(), edges[i].begin(), edges[i].end());
  }
  return out;
}

}  // namespace gaitd
