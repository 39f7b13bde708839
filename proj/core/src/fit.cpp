#include "gaitd/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "gaitd/errors.hpp"
#include "gaitd/measures.hpp"

namespace gaitd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Observations sharing a covariate row share a distribution; responses are
// aggregated into (value, total weight) pairs.
struct Pattern {
  Eigen::RowVectorXd x;
  Eigen::MatrixXd block;
  std::vector<std::pair<Count, double>> ys;
  double weight = 0.0;
};

std::vector<Pattern> make_patterns(const ModelSpec& spec, const Data& data, int M) {
  std::map<std::vector<double>, std::size_t> index;
  std::vector<std::map<Count, double>> counts;
  std::vector<Pattern> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = data.weight(i);
    if (w == 0.0) continue;
    const Eigen::RowVectorXd x = data.X.row(static_cast<Eigen::Index>(i));
    std::vector<double> key(x.data(), x.data() + x.size());
    auto [it, inserted] = index.try_emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back({x, vlm_block(spec, x, M), {}, 0.0});
      counts.emplace_back();
    }
    counts[it->second][data.y[i]] += w;
    out[it->second].weight += w;
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    out[g].ys.assign(counts[g].begin(), counts[g].end());
  }
  return out;
}

// A distribution usable for fitting: constructible and nonnegative at every
// deflated value.
std::optional<GaitdDist> try_dist(const ModelSpec& spec, const EtaLayout& layout, const Eigen::VectorXd& eta) {
  try {
    GaitdDist d = dist_from_eta(spec, layout, eta);
    for (const auto* set : {&spec.sets.def_p, &spec.sets.def_np}) {
      for (Count v : *set) {
        if (d.pmf(v) < 0.0) return std::nullopt;
      }
    }
    return d;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const DegenerateModelError&) {
    return std::nullopt;
  }
}

Eigen::VectorXd pattern_eta(const ModelSpec& spec, const Pattern& p, const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = p.block * beta;
  if (spec.offset.size() == eta.size()) eta += spec.offset;
  return eta;
}

double patterns_loglik(const ModelSpec& spec, const EtaLayout& layout, const std::vector<Pattern>& patterns,
                       const Eigen::VectorXd& beta) {
  double total = 0.0;
  for (const auto& p : patterns) {
    const auto d = try_dist(spec, layout, pattern_eta(spec, p, beta));
    if (!d) return kNegInf;
    for (const auto& [y, w] : p.ys) {
      const double lp = d->log_pmf(y);
      if (!std::isfinite(lp)) return kNegInf;
      total += w * lp;
    }
  }
  return total;
}

struct PatternScore {
  Eigen::VectorXd score;  // sum of w * dl/deta over the pattern's responses
  Eigen::MatrixXd eim;    // per-observation expected information in eta
};

PatternScore pattern_score(const ModelSpec& spec, const EtaLayout& layout, const Pattern& p,
                           const Eigen::VectorXd& beta, const FitControl& control) {
  const Eigen::VectorXd eta = pattern_eta(spec, p, beta);
  const int M = static_cast<int>(eta.size());
  const auto d0 = try_dist(spec, layout, eta);
  if (!d0) throw DegenerateModelError("coefficients give an invalid distribution");

  const double base_h = std::cbrt(std::numeric_limits<double>::epsilon());
  std::vector<double> h(static_cast<std::size_t>(M));
  std::vector<std::optional<GaitdDist>> plus, minus;
  for (int j = 0; j < M; ++j) {
    h[static_cast<std::size_t>(j)] = base_h * std::max(1.0, std::abs(eta[j]));
    Eigen::VectorXd e = eta;
    e[j] += h[static_cast<std::size_t>(j)];
    plus.push_back(try_dist(spec, layout, e));
    e[j] = eta[j] - h[static_cast<std::size_t>(j)];
    minus.push_back(try_dist(spec, layout, e));
  }

  Eigen::VectorXd s(M);
  auto score_at = [&](Count y) {
    const double l0 = d0->log_pmf(y);
    for (int j = 0; j < M; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      const double lp = plus[jj] ? plus[jj]->log_pmf(y) : std::nan("");
      const double lm = minus[jj] ? minus[jj]->log_pmf(y) : std::nan("");
      if (std::isfinite(lp) && std::isfinite(lm)) {
        s[j] = (lp - lm) / (2.0 * h[jj]);
      } else if (std::isfinite(lp)) {
        s[j] = (lp - l0) / h[jj];
      } else if (std::isfinite(lm)) {
        s[j] = (l0 - lm) / h[jj];
      } else {
        s[j] = 0.0;
      }
    }
    return s;
  };

  PatternScore out{Eigen::VectorXd::Zero(M), Eigen::MatrixXd::Zero(M, M)};
  for (const auto& [y, w] : p.ys) out.score += w * score_at(y);

  const auto window = d0->support_window();
  const Count hi = std::min(window.hi, window.lo + control.eim_window - 1);
  for (Count y = window.lo; y <= hi; ++y) {
    const double py = d0->pmf(y);
    if (!(py > 0.0)) continue;
    out.eim.selfadjointView<Eigen::Lower>().rankUpdate(score_at(y), py);
  }
  out.eim = out.eim.selfadjointView<Eigen::Lower>();
  return out;
}

ScoreEim patterns_score(const ModelSpec& spec, const EtaLayout& layout, const std::vector<Pattern>& patterns,
                        const Eigen::VectorXd& beta, const FitControl& control) {
  const auto P = beta.size();
  std::vector<PatternScore> parts(patterns.size());
  const unsigned threads =
      std::min<unsigned>(control.threads ? control.threads : default_thread_count(),
                         static_cast<unsigned>(std::max<std::size_t>(1, patterns.size())));
  if (threads <= 1) {
    for (std::size_t g = 0; g < patterns.size(); ++g) {
      parts[g] = pattern_score(spec, layout, patterns[g], beta, control);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t g = t; g < patterns.size(); g += threads) {
            parts[g] = pattern_score(spec, layout, patterns[g], beta, control);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  ScoreEim out;
  out.gradient = Eigen::VectorXd::Zero(P);
  out.information = Eigen::MatrixXd::Zero(P, P);
  for (std::size_t g = 0; g < patterns.size(); ++g) {
    const auto& B = patterns[g].block;
    out.gradient += B.transpose() * parts[g].score;
    out.information += patterns[g].weight * (B.transpose() * parts[g].eim * B);
  }
  out.loglik = patterns_loglik(spec, layout, patterns, beta);
  return out;
}

void check_rank(const Eigen::MatrixXd& info, const std::vector<std::string>& names) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const auto& ev = es.eigenvalues();
  const double top = std::max(std::abs(ev.maxCoeff()), std::numeric_limits<double>::min());
  if (ev.minCoeff() > 1e-12 * top) return;
  const Eigen::VectorXd dir = es.eigenvectors().col(0);
  Eigen::Index arg = 0;
  dir.cwiseAbs().maxCoeff(&arg);
  std::string msg = "expected information is singular; null direction loads mostly on ";
  msg += static_cast<std::size_t>(arg) < names.size() ? names[static_cast<std::size_t>(arg)] : "coefficient " + std::to_string(arg + 1);
  throw RankDeficiencyError(msg);
}

double mom_logarithmic(double mean) {
  if (!(mean > 1.0 + 1e-9)) return 0.05;
  double lo = -30.0, hi = 30.0;  // logit scale
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p = link_inverse(Link::Logit, mid);
    const double m = -p / ((1.0 - p) * std::log1p(-p));
    if (m < mean) lo = mid; else hi = mid;
  }
  return link_inverse(Link::Logit, 0.5 * (lo + hi));
}

double mom_zeta(double mean) {
  if (!(mean > 1.0 + 1e-6)) return 10.0;
  double lo = 1.0 + 1e-6, hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double m = riemann_zeta(mid) / riemann_zeta(mid + 1.0);
    if (m > mean) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> mom_theta(Family family, double mean, double var) {
  switch (family) {
    case Family::Poisson:
      return {std::max(mean, 1e-2)};
    case Family::NegBinomial: {
      const double mu = std::max(mean, 1e-2);
      const double k = var > 1.01 * mu ? mu * mu / (var - mu) : 100.0;
      return {mu, std::clamp(k, 1e-2, 1e4)};
    }
    case Family::Logarithmic:
      return {mom_logarithmic(mean)};
    case Family::Zeta:
      return {mom_zeta(mean)};
  }
  return {};
}

// Moves A_np values without observations into T, trimming the matching rows
// of the offset and constraint matrices.
ModelSpec drop_empty_alt_cells(const ModelSpec& spec, const Data& data, std::vector<std::string>& warnings) {
  std::vector<Count> empty;
  for (Count a : spec.sets.alt_np) {
    double w = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.y[i] == a) w += data.weight(i);
    }
    if (w == 0.0) empty.push_back(a);
  }
  if (empty.empty()) return spec;

  const auto old_layout = spec.layout();
  std::vector<int> keep;
  for (int j = 0; j < old_layout.size(); ++j) {
    const auto& e = old_layout.entry(j);
    const bool dropped = e.role == EtaRole::OmegaNp &&
                         std::find(empty.begin(), empty.end(), spec.sets.alt_np[static_cast<std::size_t>(e.index)]) != empty.end();
    if (!dropped) keep.push_back(j);
  }
  ModelSpec out = spec;
  for (Count a : empty) {
    out.sets.alt_np.erase(std::find(out.sets.alt_np.begin(), out.sets.alt_np.end(), a));
    out.sets.trunc.push_back(a);
    warnings.push_back("altered value " + std::to_string(a) +
                       " has no observations; its probability is on the boundary so it is truncated instead");
  }
  auto take_rows = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd r(static_cast<Eigen::Index>(keep.size()), m.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) r.row(static_cast<Eigen::Index>(i)) = m.row(keep[i]);
    return r;
  };
  if (out.offset.size() != 0) out.offset = take_rows(out.offset);
  for (auto& h : out.constraints) {
    if (h.size() == 0) continue;
    Eigen::MatrixXd r = take_rows(h);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < r.cols(); ++c) {
      if (r.col(c).cwiseAbs().maxCoeff() > 0.0) cols.push_back(c);
    }
    Eigen::MatrixXd trimmed(r.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) trimmed.col(static_cast<Eigen::Index>(c)) = r.col(cols[c]);
    h = trimmed;
  }
  return out;
}

}  // namespace

GaitdDist FitResult::dist(const Eigen::RowVectorXd& x) const {
  return dist_from_eta(spec, spec.layout(), eta(x));
}

double loglik(const ModelSpec& spec, const Data& data, const Eigen::VectorXd& beta) {
  validate_model(spec, data);
  const auto layout = spec.layout();
  return patterns_loglik(spec, layout, make_patterns(spec, data, layout.size()), beta);
}

ScoreEim score_and_eim(const ModelSpec& spec, const Data& data, const Eigen::VectorXd& beta,
                       const FitControl& control) {
  validate_model(spec, data);
  const auto layout = spec.layout();
  return patterns_score(spec, layout, make_patterns(spec, data, layout.size()), beta, control);
}

Eigen::VectorXd initial_beta(const ModelSpec& spec, const Data& data) {
  const auto layout = spec.layout();
  const int M = layout.size();
  const SpecialUnion su(spec.sets);

  double W = 0.0, sw = 0.0, s1 = 0.0, s2 = 0.0;
  std::map<Count, double> special_weight;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = data.weight(i);
    W += w;
    const Count y = data.y[i];
    if (su.classify(y).kind == SetKind::Nonspecial) {
      sw += w;
      s1 += w * static_cast<double>(y);
      s2 += w * static_cast<double>(y) * static_cast<double>(y);
    } else {
      special_weight[y] += w;
    }
  }
  const double mean = sw > 0.0 ? s1 / sw : 1.0;
  const double var = sw > 0.0 ? std::max(s2 / sw - mean * mean, 0.0) : 1.0;

  GaitdParams p0;
  p0.theta_pi = mom_theta(spec.family, mean, var);
  const double floor = 1.0 / (2.0 * std::max(W, 1.0));
  auto prop = [&](Count v) {
    auto it = special_weight.find(v);
    return it == special_weight.end() ? 0.0 : it->second / W;
  };
  auto total_prop = [&](const std::vector<Count>& set) {
    double t = 0.0;
    for (Count v : set) t += prop(v);
    return t;
  };
  const auto& s = spec.sets;
  p0.omega_p = std::max(total_prop(s.alt_p), floor);
  p0.phi_p = std::max(0.5 * total_prop(s.inf_p), floor);
  p0.psi_p = std::max(0.25 * total_prop(s.def_p), floor);
  for (Count v : s.alt_np) p0.omega_np.push_back(std::max(prop(v), floor));
  for (Count v : s.inf_np) p0.phi_np.push_back(std::max(0.5 * prop(v), floor));
  for (Count v : s.def_np) p0.psi_np.push_back(std::max(0.25 * prop(v), floor));

  auto budget = [&] {
    double b = 0.0;
    if (!s.alt_p.empty()) b += p0.omega_p;
    if (!s.inf_p.empty()) b += p0.phi_p;
    if (!s.def_p.empty()) b += p0.psi_p;
    for (const auto* v : {&p0.omega_np, &p0.phi_np, &p0.psi_np}) {
      for (double x : *v) b += x;
    }
    return b;
  };
  if (const double b = budget(); b > 0.9) {
    const double scale = 0.9 / b;
    p0.omega_p *= scale;
    p0.phi_p *= scale;
    p0.psi_p *= scale;
    for (auto* v : {&p0.omega_np, &p0.phi_np, &p0.psi_np}) {
      for (double& x : *v) x *= scale;
    }
  }

  Eigen::VectorXd eta0 = layout.from_params(p0);
  for (int attempt = 0; attempt < 40 && !try_dist(spec, layout, eta0); ++attempt) {
    p0.psi_p *= 0.5;
    for (double& x : p0.psi_np) x *= 0.5;
    eta0 = layout.from_params(p0);
  }
  if (spec.offset.size() == M) eta0 -= spec.offset;

  const auto patterns = make_patterns(spec, data, M);
  const auto P = static_cast<Eigen::Index>(coefficient_count(spec, data));
  Eigen::MatrixXd A(static_cast<Eigen::Index>(patterns.size()) * M, P);
  Eigen::VectorXd b(A.rows());
  for (std::size_t g = 0; g < patterns.size(); ++g) {
    const double sq = std::sqrt(patterns[g].weight);
    A.middleRows(static_cast<Eigen::Index>(g) * M, M) = sq * patterns[g].block;
    b.segment(static_cast<Eigen::Index>(g) * M, M) = sq * eta0;
  }
  return A.colPivHouseholderQr().solve(b);
}

FitResult fit_irls(const ModelSpec& spec_in, const Data& data, std::optional<Eigen::VectorXd> init,
                   const FitControl& control) {
  validate_model(spec_in, data);
  FitResult r;
  r.spec = control.drop_empty_alt_cells ? drop_empty_alt_cells(spec_in, data, r.warnings) : spec_in;
  if (!(r.spec.sets == spec_in.sets)) validate_model(r.spec, data);
  const auto& spec = r.spec;
  const auto layout = spec.layout();
  const int M = layout.size();
  const auto patterns = make_patterns(spec, data, M);

  r.coef_names = coefficient_names(spec, data);
  r.eta_names = layout.names();
  r.x_names = data.x_names;
  r.n_obs = data.size();
  for (std::size_t i = 0; i < data.size(); ++i) r.total_weight += data.weight(i);
  r.x_first = data.X.row(0);

  const auto P = static_cast<Eigen::Index>(coefficient_count(spec, data));
  Eigen::VectorXd beta = init ? *init : initial_beta(spec, data);
  if (beta.size() != P) throw std::invalid_argument("initial coefficient vector has the wrong length");

  double ll = patterns_loglik(spec, layout, patterns, beta);
  if (!std::isfinite(ll)) throw DataError("initial coefficients give zero probability to some response");
  r.trace.push_back({0, ll, 0.0, 0.0});

  for (int iter = 1; iter <= control.max_iter; ++iter) {
    const auto se = patterns_score(spec, layout, patterns, beta, control);
    check_rank(se.information, r.coef_names);
    const Eigen::VectorXd step = se.information.ldlt().solve(se.gradient);
    r.iterations = iter;

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand;
    double ll_cand = kNegInf;
    for (int k = 0; k <= control.step_halving_max; ++k, t *= 0.5) {
      cand = beta + t * step;
      ll_cand = patterns_loglik(spec, layout, patterns, cand);
      if (ll_cand >= ll) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent along the scoring direction: stationary up to rounding.
      const double decrement = se.gradient.dot(step);
      r.converged = decrement <= 10.0 * control.tol * (std::abs(ll) + 1.0);
      break;
    }
    const double change = (t * step).cwiseAbs().maxCoeff();
    const double rel = std::abs(ll_cand - ll) / (std::abs(ll) + 1e-300);
    beta = cand;
    ll = ll_cand;
    r.trace.push_back({iter, ll, t, change});
    if (rel < control.tol && change < control.beta_tol) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) {
    r.warnings.push_back("Fisher scoring did not converge in " + std::to_string(r.iterations) + " iterations");
  }

  const auto final_se = patterns_score(spec, layout, patterns, beta, control);
  check_rank(final_se.information, r.coef_names);
  r.beta = beta;
  r.loglik = ll;
  r.vcov = final_se.information.ldlt().solve(Eigen::MatrixXd::Identity(P, P));
  r.vcov = 0.5 * (r.vcov + r.vcov.transpose());

  bool has_prob = false;
  for (int j = 0; j < M; ++j) has_prob = has_prob || layout.is_probability(j);
  if (has_prob) {
    for (const auto& p : patterns) {
      if (layout.baseline(pattern_eta(spec, p, beta)) < 1e-3) {
        r.warnings.push_back("baseline probability N is close to 0; estimates may sit on the boundary");
        break;
      }
    }
  }
  return r;
}

Wald wald_and_ci(const FitResult& fit, int index, double level) {
  if (!fit.converged) throw NotConvergedError("Wald inference needs a converged fit");
  if (index < 0 || index >= fit.beta.size()) throw std::out_of_range("coefficient index out of range");
  const boost::math::normal_distribution<> normal;
  const double zq = boost::math::quantile(normal, 0.5 + 0.5 * level);
  Wald w;
  w.estimate = fit.beta[index];
  w.se = std::sqrt(fit.vcov(index, index));
  w.z = w.estimate / w.se;
  w.p_value = std::erfc(std::abs(w.z) / std::sqrt(2.0));
  w.lower = w.estimate - zq * w.se;
  w.upper = w.estimate + zq * w.se;
  return w;
}

ParameterInterval parameter_ci(const FitResult& fit, int eta_index, const Eigen::RowVectorXd& x, double level) {
  if (!fit.converged) throw NotConvergedError("confidence intervals need a converged fit");
  const auto layout = fit.spec.layout();
  const int M = layout.size();
  if (eta_index < 0 || eta_index >= M) throw std::out_of_range("eta index out of range");
  const Eigen::RowVectorXd a = vlm_block(fit.spec, x, M).row(eta_index);
  double eta = a.dot(fit.beta);
  if (fit.spec.offset.size() == M) eta += fit.spec.offset[eta_index];
  const double se = std::sqrt(std::max(0.0, (a * fit.vcov * a.transpose())(0, 0)));
  const boost::math::normal_distribution<> normal;
  const double zq = boost::math::quantile(normal, 0.5 + 0.5 * level);
  ParameterInterval out;
  out.eta_se = se;
  if (layout.is_probability(eta_index)) {
    out.estimate = eta;
    out.lower = eta - zq * se;
    out.upper = eta + zq * se;
    return out;
  }
  const Link link = layout.link_of(eta_index);
  out.back_transformed = true;
  out.estimate = link_inverse(link, eta);
  out.lower = link_inverse(link, eta - zq * se);
  out.upper = link_inverse(link, eta + zq * se);
  return out;
}

double delta_method_se(const FitResult& fit, const std::function<double(const Eigen::VectorXd&)>& g) {
  const auto P = fit.beta.size();
  Eigen::VectorXd grad(P);
  for (Eigen::Index i = 0; i < P; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(fit.beta[i]));
    Eigen::VectorXd b = fit.beta;
    b[i] += h;
    const double up = g(b);
    b[i] = fit.beta[i] - h;
    grad[i] = (up - g(b)) / (2.0 * h);
  }
  return std::sqrt(std::max(0.0, grad.dot(fit.vcov * grad)));
}

LrtResult lrt(const FitResult& full, const FitResult& nested) {
  if (full.spec.family != nested.spec.family || !(full.spec.sets == nested.spec.sets)) {
    throw std::invalid_argument("models differ in family or special sets; not nested");
  }
  if (full.n_obs != nested.n_obs || full.total_weight != nested.total_weight || full.x_names != nested.x_names) {
    throw std::invalid_argument("models were fitted to different data");
  }
  const int M = full.spec.layout().size();
  const auto off_f = full.spec.offset.size() == M ? full.spec.offset : Eigen::VectorXd::Zero(M);
  const auto off_n = nested.spec.offset.size() == M ? nested.spec.offset : Eigen::VectorXd::Zero(M);
  if ((off_f - off_n).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("models have different offsets");
  for (std::size_t k = 0; k < full.x_names.size(); ++k) {
    const auto hf = constraint_matrix(full.spec, k, M);
    const auto hn = constraint_matrix(nested.spec, k, M);
    const Eigen::MatrixXd proj = hf * hf.colPivHouseholderQr().solve(hn);
    if ((proj - hn).norm() > 1e-8 * (1.0 + hn.norm())) {
      throw std::invalid_argument("constraint matrix for " + full.x_names[k] +
                                  " of the smaller model is not spanned by the larger model's");
    }
  }
  LrtResult out;
  out.df = static_cast<int>(full.beta.size() - nested.beta.size());
  if (out.df < 0) throw std::invalid_argument("the nested model has more coefficients than the full model");
  out.statistic = std::max(0.0, 2.0 * (full.loglik - nested.loglik));
  if (out.df > 0) {
    out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.df), out.statistic));
  }
  return out;
}

}  // namespace gaitd
