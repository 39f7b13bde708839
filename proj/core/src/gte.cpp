#include "gaitd/gte.hpp"

#include <cmath>
#include <mutex>
#include <thread>

#include "gaitd/errors.hpp"
#include "gaitd/measures.hpp"

namespace gaitd {

MEstimate moment_estimate_m(double mean, double variance) {
  if (!(variance > 0.0) || !(mean > 0.0)) throw DomainError("moment estimate of m needs positive mean and variance");
  MEstimate e;
  e.m_hat = mean / variance;
  e.dispersion_index = variance / mean;
  e.slight = e.dispersion_index > 2.0 / 3.0 && e.dispersion_index < 1.0;
  return e;
}

ModelSpec build_gte_model(const ModelSpec& base, const GteSpec& gte) {
  if (gte.m < 1) throw DomainError("GTE multiplier m must be >= 1");
  if (gte.nu < 0) throw DomainError("GTE shift nu must be >= 0");
  if (gte.m == 1 && gte.nu == 0) return base;
  if (gte.m > 1 && (base.family == Family::Logarithmic || base.family == Family::Zeta)) {
    throw DomainError("GTE with m > 1 needs a Poisson or negative binomial parent");
  }
  if (base.sets.lattice) throw ConfigError("model already has a lattice truncation");

  ModelSpec out = base;
  auto map = [&](std::vector<Count>& v) {
    for (Count& x : v) x = gte.nu + gte.m * x;
  };
  for (auto* v : {&out.sets.trunc, &out.sets.alt_p, &out.sets.alt_np, &out.sets.inf_p, &out.sets.inf_np,
                  &out.sets.def_p, &out.sets.def_np}) {
    map(*v);
  }
  if (out.sets.trunc_tail_start) *out.sets.trunc_tail_start = gte.nu + gte.m * *out.sets.trunc_tail_start;
  out.sets.lattice = Lattice{gte.m, gte.nu};

  const auto layout = out.layout();
  const int M = layout.size();
  if (out.offset.size() != M) out.offset = Eigen::VectorXd::Zero(M);
  for (int j : layout.mean_indices()) {
    if (layout.link_of(j) == Link::Log) out.offset[j] += std::log(static_cast<double>(gte.m));
  }
  return out;
}

Data expand_data(const Data& data, const GteSpec& gte) {
  Data out = data;
  for (Count& y : out.y) y = gte.nu + gte.m * y;
  return out;
}

double gte_back_transform(double expanded, const GteSpec& gte) {
  return (expanded - static_cast<double>(gte.nu)) / static_cast<double>(gte.m);
}

GteSearch search_m(const ModelSpec& base, const Data& data, const std::vector<Count>& ms,
                   const std::vector<Count>& nus, const FitControl& control) {
  GteSearch out;
  for (Count nu : nus) {
    for (Count m : ms) out.table.push_back({GteSpec{m, nu}, 0.0, false, 0, {}});
  }
  std::vector<std::optional<FitResult>> fits(out.table.size());

  const unsigned threads = std::min<unsigned>(control.threads ? control.threads : default_thread_count(),
                                              static_cast<unsigned>(std::max<std::size_t>(1, out.table.size())));
  FitControl inner = control;
  if (threads > 1) inner.threads = 1;

  auto run = [&](std::size_t i) {
    auto& row = out.table[i];
    try {
      const ModelSpec spec = build_gte_model(base, row.gte);
      auto fit = fit_irls(spec, expand_data(data, row.gte), std::nullopt, inner);
      row.loglik = fit.loglik;
      row.converged = fit.converged;
      row.iterations = fit.iterations;
      if (!fit.converged) row.error = "did not converge";
      fits[i] = std::move(fit);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < out.table.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < out.table.size(); i += threads) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < out.table.size(); ++i) {
    const auto& row = out.table[i];
    if (!row.error.empty()) continue;
    if (!out.best || row.loglik > out.table[*out.best].loglik) out.best = i;
  }
  if (out.best) out.best_fit = std::move(fits[*out.best]);
  return out;
}

SegmentDist::SegmentDist(GaitdDist base, SegmentMode mode, Count nu)
    : base_(std::move(base)), mode_(mode), nu_(nu) {}

double SegmentDist::pmf(Count y) const {
  if (y < 0) return 0.0;
  if (mode_ == SegmentMode::UpperTail) return base_.pmf(y + nu_);
  return base_.pmf(nu_ - y);
}

double SegmentDist::cdf(Count y) const {
  if (y < 0) return 0.0;
  if (mode_ == SegmentMode::UpperTail) return base_.cdf(y + nu_);
  // Pr(nu - Y <= y) = Pr(Y >= nu - y)
  return std::clamp(1.0 - base_.cdf(nu_ - y - 1), 0.0, 1.0);
}

std::optional<Count> SegmentDist::max_value() const {
  if (mode_ == SegmentMode::UpperTail) return std::nullopt;
  return nu_ - support_min(base_.family());
}

double SegmentDist::mean() const {
  const double m = base_.moment(1).value_or(std::nan(""));
  return mode_ == SegmentMode::UpperTail ? m - static_cast<double>(nu_) : static_cast<double>(nu_) - m;
}

SegmentDist gt_segment(const ParentSpec& parent, SegmentMode mode, Count nu) {
  const Count lo = support_min(parent.family());
  if (nu < lo) throw DomainError("nu must lie in the parent support");
  SpecialSets sets;
  if (mode == SegmentMode::UpperTail) {
    for (Count t = lo; t < nu; ++t) sets.trunc.push_back(t);
  } else {
    sets.trunc_tail_start = nu + 1;
  }
  GaitdParams params;
  params.theta_pi.assign(parent.theta().begin(), parent.theta().end());
  return SegmentDist(GaitdDist(parent.family(), sets, params), mode, nu);
}

}  // namespace gaitd
