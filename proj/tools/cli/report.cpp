#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace gaitd::cli {

namespace {

std::string join_counts(const std::vector<Count>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

std::string join_nums(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

std::vector<double> as_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_model_section(std::ostream& os, const ModelSpec& spec) {
  const auto& s = spec.sets;
  os << "[model]\n";
  os << "family = " << family_name(spec.family) << "\n";
  auto line = [&](const char* key, const std::vector<Count>& v) {
    if (!v.empty()) os << key << " = " << join_counts(v) << "\n";
  };
  line("T", s.trunc);
  if (s.trunc_tail_start) os << "T_tail = " << *s.trunc_tail_start << "\n";
  if (s.lattice) os << "lattice = " << s.lattice->step << " " << s.lattice->offset << "\n";
  line("A_p", s.alt_p);
  line("A_np", s.alt_np);
  line("I_p", s.inf_p);
  line("I_np", s.inf_np);
  line("D_p", s.def_p);
  line("D_np", s.def_np);
  os << "strict = " << (spec.strict_identifiability ? "true" : "false") << "\n";
  const auto layout = spec.layout();
  os << "links =";
  for (auto l : layout.theta_links()) os << " " << link_name(l);
  os << "\n";
}

void write_params_section(std::ostream& os, const GaitdDist& dist) {
  const auto& s = dist.sets();
  const auto& p = dist.params();
  os << "[params]\n";
  os << "theta_pi = " << join_nums(as_vec(dist.parent().theta())) << "\n";
  if (!s.alt_p.empty()) {
    os << "theta_alpha = " << join_nums(as_vec(dist.alpha().theta())) << "\n";
    os << "omega_p = " << num(p.omega_p) << "\n";
  }
  if (!s.inf_p.empty()) {
    os << "theta_iota = " << join_nums(as_vec(dist.iota().theta())) << "\n";
    os << "phi_p = " << num(p.phi_p) << "\n";
  }
  if (!s.def_p.empty()) {
    os << "theta_delta = " << join_nums(as_vec(dist.delta_parent().theta())) << "\n";
    os << "psi_p = " << num(p.psi_p) << "\n";
  }
  if (!s.alt_np.empty()) os << "omega_np = " << join_nums(p.omega_np) << "\n";
  if (!s.inf_np.empty()) os << "phi_np = " << join_nums(p.phi_np) << "\n";
  if (!s.def_np.empty()) os << "psi_np = " << join_nums(p.psi_np) << "\n";
}

void write_measures(std::ostream& os, const GaitdDist& dist) {
  os << "[measures]\n";
  os << "delta = " << num(dist.delta()) << "\n";
  os << "baseline_N = " << num(dist.baseline()) << "\n";
  os << "kld = " << num(kld_to_parent(dist)) << "\n";
  os << "kld_baseline_weighted = " << num(kld_baseline_weighted(dist)) << "\n";
  os << "xi = " << num(xi_heapseep(dist)) << "\n";
  const auto m1 = dist.moment(1);
  os << "mean = " << (m1 ? num(*m1) : "divergent") << "\n";
  if (const auto balance = heap_seep_balance(dist); !balance.empty()) {
    os << "[balance]\n# value\tinflation\tneighbour_deflation\timbalance\n";
    for (const auto& b : balance) {
      os << b.value << "\t" << num(b.inflation) << "\t" << num(b.neighbour_deflation) << "\t" << num(b.imbalance())
         << "\n";
    }
  }
  os << "[dispersion]\n";
  if (const auto r = dispersion_report(dist)) {
    for (auto d : {Dispersion::VMD_star, Dispersion::VMD_pi, Dispersion::VVD, Dispersion::DVMD, Dispersion::DIR}) {
      os << dispersion_name(d) << " = " << num(r->value(d)) << " " << (r->overdispersed(d) ? "over" : "not-over")
         << "\n";
    }
    os << "variance = " << num(r->variance) << "\n";
  } else {
    os << "available = false\n";
  }
}

void write_fit_report(std::ostream& os, const FitResult& fit, const std::optional<GteContext>& gte) {
  const auto dist = fit.dist();
  os << kReportHeader << "\n";
  write_model_section(os, fit.spec);
  write_params_section(os, dist);

  os << "[fit]\n";
  os << "converged = " << (fit.converged ? "true" : "false") << "\n";
  os << "iterations = " << fit.iterations << "\n";
  os << "loglik = " << num(fit.loglik) << "\n";
  os << "n = " << fit.n_obs << "\n";
  os << "total_weight = " << num(fit.total_weight) << "\n";
  os << "coefficients = " << fit.beta.size() << "\n";
  os << "etas = " << fit.eta_names.size() << "\n";

  os << "[coefficients]\n# name\testimate\tse\tz\tp\n";
  for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
    const double se = std::sqrt(fit.vcov(i, i));
    const double z = fit.beta[i] / se;
    os << fit.coef_names[static_cast<std::size_t>(i)] << "\t" << num(fit.beta[i]) << "\t" << num(se) << "\t"
       << num(z) << "\t" << num(std::erfc(std::abs(z) / std::sqrt(2.0))) << "\n";
  }
  os << "[vcov]\n";
  for (Eigen::Index i = 0; i < fit.vcov.rows(); ++i) {
    for (Eigen::Index j = 0; j < fit.vcov.cols(); ++j) os << (j ? "\t" : "") << num(fit.vcov(i, j));
    os << "\n";
  }
  if (fit.converged) {
    os << "[intervals]\n# eta\testimate\tlower95\tupper95\tscale\n";
    for (int j = 0; j < static_cast<int>(fit.eta_names.size()); ++j) {
      const auto ci = parameter_ci(fit, j, fit.x_first);
      os << fit.eta_names[static_cast<std::size_t>(j)] << "\t" << num(ci.estimate) << "\t" << num(ci.lower)
         << "\t" << num(ci.upper) << "\t" << (ci.back_transformed ? "parameter" : "eta") << "\n";
    }
  }
  write_measures(os, dist);

  os << "[trace]\n# iteration\tloglik\tstep\tmax_abs_dbeta\n";
  for (const auto& t : fit.trace) {
    os << t.iteration << "\t" << num(t.loglik) << "\t" << num(t.step) << "\t" << num(t.max_abs_dbeta) << "\n";
  }

  if (gte) {
    os << "[gte-result]\n";
    os << "m = " << gte->gte.m << "\n";
    os << "nu = " << gte->gte.nu << "\n";
    if (gte->m_estimate) {
      os << "m_hat = " << num(gte->m_estimate->m_hat) << "\n";
      os << "dispersion_index = " << num(gte->m_estimate->dispersion_index) << "\n";
      os << "slight_underdispersion = " << (gte->m_estimate->slight ? "true" : "false") << "\n";
    }
    if (const auto m1 = dist.moment(1)) {
      os << "mean_original_scale = " << num(gte_back_transform(*m1, gte->gte)) << "\n";
      const auto spec = fit.spec;
      const auto x = fit.x_first;
      const auto g = gte->gte;
      const double se = delta_method_se(fit, [&](const Eigen::VectorXd& b) {
        const auto d = dist_from_eta(spec, spec.layout(), eta_at(spec, b, x));
        return gte_back_transform(d.moment(1).value_or(std::nan("")), g);
      });
      os << "mean_original_scale_se = " << num(se) << "\n";
    }
    if (fit.converged && (fit.spec.family == Family::Poisson || fit.spec.family == Family::NegBinomial)) {
      const auto ci = parameter_ci(fit, 0, fit.x_first);
      const double m = static_cast<double>(gte->gte.m);
      os << "parent_mean_original_scale = " << num(ci.estimate / m) << "\n";
      os << "parent_mean_original_scale_ci95 = " << num(ci.lower / m) << " " << num(ci.upper / m) << "\n";
    }
    os << "likelihood_scale = responses compared after the one-to-one map y -> nu + m*y; no data window\n";
    if (!gte->table.empty()) {
      os << "[gte-table]\n# m\tnu\tloglik\tconverged\terror\n";
      for (const auto& r : gte->table) {
        os << r.gte.m << "\t" << r.gte.nu << "\t" << num(r.loglik) << "\t" << (r.converged ? "true" : "false")
           << "\t" << (r.error.empty() ? "-" : r.error) << "\n";
      }
    }
  }
  if (!fit.warnings.empty()) {
    os << "[warnings]\n";
    for (const auto& w : fit.warnings) os << "# " << w << "\n";
  }
}

void write_fit_summary(std::ostream& os, const FitResult& fit, const std::optional<GteContext>& gte) {
  const auto dist = fit.dist();
  os << "family " << family_name(fit.spec.family) << ", " << fit.beta.size() << " coefficients, "
     << fit.n_obs << " rows\n";
  os << (fit.converged ? "converged" : "NOT converged") << " after " << fit.iterations
     << " iterations; loglik " << num(fit.loglik) << "\n";
  for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
    os << "  " << fit.coef_names[static_cast<std::size_t>(i)] << " = " << num(fit.beta[i]) << " (se "
       << num(std::sqrt(fit.vcov(i, i))) << ")\n";
  }
  os << "KLD to parent " << num(kld_to_parent(dist)) << ", Xi " << num(xi_heapseep(dist)) << "\n";
  if (gte) {
    if (const auto m1 = dist.moment(1)) {
      os << "GTE m=" << gte->gte.m << " nu=" << gte->gte.nu << ", mean on original scale "
         << num(gte_back_transform(*m1, gte->gte)) << "\n";
    }
  }
  for (const auto& w : fit.warnings) os << "warning: " << w << "\n";
}

}  // namespace gaitd::cli
