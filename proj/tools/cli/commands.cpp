#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "dataset.hpp"
#include "report.hpp"

namespace gaitd::cli {

namespace {

ModelConfig load_with_overrides(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required");
  auto cfg = load_config(opt.config);
  if (opt.tail_mass) cfg.spec.dist_options.tail_mass = *opt.tail_mass;
  if (opt.tol) cfg.control.tol = *opt.tol;
  if (opt.max_iter) cfg.control.max_iter = *opt.max_iter;
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.m_range.empty()) {
    cfg.gte.ms = parse_count_list(opt.m_range);
    cfg.gte.present = true;
  }
  if (!opt.nu_range.empty()) {
    cfg.gte.nus = parse_count_list(opt.nu_range);
    cfg.gte.present = true;
  }
  return cfg;
}

LoadedData load_checked(const Options& opt, const ModelConfig& cfg, std::ostream& err) {
  if (opt.data.empty()) throw ConfigError("--data is required");
  auto loaded = load_data(opt.data, cfg.data);
  if (loaded.dropped_missing > 0) {
    err << "warning: " << loaded.dropped_missing << " row(s) with missing values rejected\n";
  }
  return loaded;
}

// Initial coefficients from [params]: the implied eta projected onto the
// first observation's design block.
std::optional<Eigen::VectorXd> init_from_params(const ModelConfig& cfg, const ModelSpec& spec, const Data& data) {
  if (!cfg.has_params) return std::nullopt;
  const auto layout = spec.layout();
  Eigen::VectorXd eta = layout.from_params(cfg.params);
  if (spec.offset.size() == eta.size()) eta -= spec.offset;
  const Eigen::MatrixXd B = vlm_block(spec, data.X.row(0), layout.size());
  return B.colPivHouseholderQr().solve(eta);
}

void weighted_moments(const Data& d, double& mean, double& var) {
  double W = 0.0, s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    W += d.weight(i);
    s += d.weight(i) * static_cast<double>(d.y[i]);
  }
  mean = s / W;
  double ss = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = static_cast<double>(d.y[i]) - mean;
    ss += d.weight(i) * e * e;
  }
  var = ss / (W - 1.0);
}

template <class F>
int emit(const Options& opt, std::ostream& out, F&& body) {
  if (opt.out.empty()) {
    body(out);
    return 0;
  }
  std::ofstream file(opt.out);
  if (!file) throw ConfigError("cannot write '" + opt.out + "'");
  body(file);
  return 0;
}

int guarded(std::ostream& err, const std::function<int()>& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace

int cmd_fit(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_with_overrides(opt);
    auto data = load_checked(opt, cfg, err).data;
    ModelSpec spec = cfg.spec;
    spec.constraints = build_constraints(cfg, data.x_names, spec.layout().size());
    std::optional<GteContext> gte;
    if (cfg.gte.present) {
      if (cfg.gte.ms.size() != 1 || cfg.gte.nus.size() != 1) {
        throw ConfigError("fit needs a single GTE m and nu; use the gte command to search");
      }
      gte = GteContext{GteSpec{cfg.gte.ms[0], cfg.gte.nus[0]}, std::nullopt, {}};
      double mean = 0.0, var = 0.0;
      weighted_moments(data, mean, var);
      if (var > 0.0) gte->m_estimate = moment_estimate_m(mean, var);
      spec = build_gte_model(spec, gte->gte);
      data = expand_data(data, gte->gte);
    }
    const auto init = gte ? std::nullopt : init_from_params(cfg, spec, data);
    const auto fit = fit_irls(spec, data, init, cfg.control);
    emit(opt, out, [&](std::ostream& os) { write_fit_report(os, fit, gte); });
    if (!opt.out.empty()) write_fit_summary(out, fit, gte);
    return fit.converged ? 0 : 2;
  });
}

int cmd_eval(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_with_overrides(opt);
    const auto dist = config_dist(cfg);
    if (const auto v = validate_params(dist); !v.empty()) {
      throw ConfigError("invalid parameters: " + v.front().message);
    }
    return emit(opt, out, [&](std::ostream& os) {
      if (opt.query == "pmf" || opt.query == "cdf" || opt.query == "components") {
        const Count from = opt.from ? *opt.from : support_min(dist.family());
        const Count to = opt.to ? *opt.to : (opt.from ? from : std::max(from, dist.quantile(0.9999)));
        if (opt.query == "components") {
          os << "y\tpmf\tscaled_parent\tspike\tdip\taltered\n";
        } else {
          os << "y\t" << opt.query << "\n";
        }
        for (Count y = from; y <= to; ++y) {
          if (opt.query == "components") {
            const auto c = dist.components(y);
            os << y << "\t" << num(dist.pmf(y)) << "\t" << num(c.scaled_parent) << "\t" << num(c.spike) << "\t"
               << num(c.dip) << "\t" << num(c.altered) << "\n";
          } else {
            os << y << "\t" << num(opt.query == "pmf" ? dist.pmf(y) : dist.cdf(y)) << "\n";
          }
        }
      } else if (opt.query == "quantile") {
        if (!opt.p) throw ConfigError("quantile needs --p");
        os << "p\tquantile\n" << num(*opt.p) << "\t" << dist.quantile(*opt.p) << "\n";
      } else if (opt.query == "moment") {
        const auto m = dist.moment(opt.k);
        os << "k\tmoment\n" << opt.k << "\t" << (m ? num(*m) : "divergent") << "\n";
      } else {
        throw ConfigError("unknown query '" + opt.query + "' (pmf, cdf, components, quantile, moment)");
      }
    });
  });
}

int cmd_sample(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_with_overrides(opt);
    const auto dist = config_dist(cfg);
    if (const auto v = validate_params(dist); !v.empty()) {
      throw ConfigError("invalid parameters: " + v.front().message);
    }
    const auto draws = dist.sample(opt.n, cfg.seed.value_or(1));
    return emit(opt, out, [&](std::ostream& os) {
      for (Count y : draws) os << y << "\n";
    });
  });
}

int cmd_diagnose(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!opt.region.empty()) {
      const auto model = parse_table1_model(opt.region);
      if (!model) throw ConfigError("unknown region model '" + opt.region + "' (ZAP ZAB ZIP ZIB ZTP ZTB)");
      const auto def = parse_dispersion(opt.definition);
      if (!def) throw ConfigError("unknown definition '" + opt.definition + "'");
      RegionGrid grid;
      if (table1_is_binomial(*model)) {
        grid.x_lo = 0.01;
        grid.x_hi = 0.99;
      }
      if (!opt.grid.empty()) {
        std::string g = opt.grid;
        std::replace(g.begin(), g.end(), ',', ' ');
        std::istringstream is(g);
        std::vector<double> v;
        for (double x; is >> x;) v.push_back(x);
        if (v.size() != 2 && v.size() != 6 && v.size() != 7) {
          throw ConfigError("--grid takes nx,nw[,x_lo,x_hi,w_lo,w_hi[,size]]");
        }
        grid.nx = static_cast<int>(v[0]);
        grid.nw = static_cast<int>(v[1]);
        if (v.size() >= 6) {
          grid.x_lo = v[2];
          grid.x_hi = v[3];
          grid.w_lo = v[4];
          grid.w_hi = v[5];
        }
        if (v.size() == 7) grid.size = static_cast<int>(v[6]);
      }
      const auto scan = region_scan(*model, *def, grid);
      return emit(opt, out, [&](std::ostream& os) {
        os << "kind\tx\tw\tover\n";
        for (const auto& p : scan.points) os << "point\t" << num(p.x) << "\t" << num(p.w) << "\t" << p.over << "\n";
        for (const auto& p : scan.boundary) {
          os << "boundary\t" << num(p.x) << "\t" << num(p.w) << "\t" << p.over << "\n";
        }
      });
    }

    const auto cfg = load_with_overrides(opt);
    const auto dist = config_dist(cfg);
    std::map<Count, double> observed;
    double total = 0.0;
    if (!opt.data.empty()) {
      const auto data = load_checked(opt, cfg, err).data;
      const auto& lat = cfg.spec.sets.lattice;
      for (std::size_t i = 0; i < data.size(); ++i) {
        Count y = data.y[i];
        if (opt.expand && lat) y = lat->offset + lat->step * y;
        observed[y] += data.weight(i);
        total += data.weight(i);
      }
    }
    return emit(opt, out, [&](std::ostream& os) {
      Count hi = std::max(support_min(dist.family()), dist.quantile(1.0 - 1e-10));
      if (!observed.empty()) hi = std::max(hi, observed.rbegin()->first);
      os << "[spikeplot]\n";
      os << "y\tobserved\tfitted\tscaled_parent\tspike\tdip\taltered\tsqrt_observed\tsqrt_expected\tresidual\n";
      for (Count y = support_min(dist.family()); y <= hi; ++y) {
        const double f = dist.pmf(y);
        const auto it = observed.find(y);
        const double count = it == observed.end() ? 0.0 : it->second;
        if (f <= 0.0 && count <= 0.0) continue;
        const auto c = dist.components(y);
        const double prop = total > 0.0 ? count / total : 0.0;
        const double so = std::sqrt(count), se = std::sqrt(f * total);
        os << y << "\t" << num(prop) << "\t" << num(f) << "\t" << num(c.scaled_parent) << "\t" << num(c.spike)
           << "\t" << num(c.dip) << "\t" << num(c.altered) << "\t" << num(so) << "\t" << num(se) << "\t"
           << num(so - se) << "\n";
      }
      write_measures(os, dist);
    });
  });
}

int cmd_gte(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_with_overrides(opt);
    if (cfg.gte.ms.empty()) {
      for (Count m = 1; m <= 10; ++m) cfg.gte.ms.push_back(m);
    }
    const auto data = load_checked(opt, cfg, err).data;
    ModelSpec spec = cfg.spec;
    spec.constraints = build_constraints(cfg, data.x_names, spec.layout().size());
    double mean = 0.0, var = 0.0;
    weighted_moments(data, mean, var);
    std::optional<MEstimate> est;
    if (var > 0.0 && mean > 0.0) est = moment_estimate_m(mean, var);

    auto search = search_m(spec, data, cfg.gte.ms, cfg.gte.nus, cfg.control);
    if (!search.best_fit) {
      for (const auto& r : search.table) err << "m=" << r.gte.m << " nu=" << r.gte.nu << ": " << r.error << "\n";
      throw DataError("no multiplier produced a fit");
    }
    GteContext ctx{search.table[*search.best].gte, est, search.table};
    emit(opt, out, [&](std::ostream& os) { write_fit_report(os, *search.best_fit, ctx); });
    if (!opt.out.empty()) {
      if (est) out << "moment estimate m_hat = " << num(est->m_hat) << (est->slight ? " (slight underdispersion)" : "") << "\n";
      out << "m\tnu\tloglik\n";
      for (const auto& r : search.table) {
        out << r.gte.m << "\t" << r.gte.nu << "\t" << (r.error.empty() ? num(r.loglik) : r.error) << "\n";
      }
      out << "best m = " << ctx.gte.m << ", nu = " << ctx.gte.nu << "\n";
      write_fit_summary(out, *search.best_fit, ctx);
    }
    return search.best_fit->converged ? 0 : 2;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GAITD count distributions: evaluate, sample, fit and diagnose"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "model configuration file");
    sub->add_option("--out", opt.out, "output file (default stdout)");
    sub->add_option("--tail-mass", opt.tail_mass, "tail mass for infinite sums");
    sub->add_option("--seed", opt.seed, "random seed");
  };
  auto fitting = [&](CLI::App* sub) {
    sub->add_option("--data", opt.data, "data file");
    sub->add_option("--tol", opt.tol, "relative log-likelihood tolerance");
    sub->add_option("--max-iter", opt.max_iter, "maximum Fisher scoring iterations");
    sub->add_option("--m-range", opt.m_range, "GTE multipliers, e.g. 1-10");
    sub->add_option("--nu-range", opt.nu_range, "GTE shifts, e.g. 0");
  };

  auto* fit = app.add_subcommand("fit", "fit a model to data");
  common(fit);
  fitting(fit);
  auto* eval = app.add_subcommand("eval", "evaluate pmf, cdf, quantile or moment");
  common(eval);
  eval->add_option("--query", opt.query, "pmf | cdf | components | quantile | moment");
  eval->add_option("--from", opt.from, "first value");
  eval->add_option("--to", opt.to, "last value");
  eval->add_option("--p", opt.p, "probability for quantile");
  eval->add_option("--k", opt.k, "moment order");
  auto* sample = app.add_subcommand("sample", "draw a random sample");
  common(sample);
  sample->add_option("--n", opt.n, "number of draws");
  auto* diag = app.add_subcommand("diagnose", "spikeplot table, measures or region scan");
  common(diag);
  diag->add_option("--data", opt.data, "data file for observed proportions");
  diag->add_flag("--expand", opt.expand, "map responses onto the model's lattice (GTE reports)");
  diag->add_option("--region", opt.region, "region scan for ZAP, ZAB, ZIP, ZIB, ZTP or ZTB");
  diag->add_option("--definition", opt.definition, "VMD_star | VMD_pi | VVD | DVMD | DIR");
  diag->add_option("--grid", opt.grid, "nx,nw[,x_lo,x_hi,w_lo,w_hi[,size]]");
  auto* gte = app.add_subcommand("gte", "search GTE multipliers");
  common(gte);
  fitting(gte);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (fit->parsed()) return cmd_fit(opt, out, err);
  if (eval->parsed()) return cmd_eval(opt, out, err);
  if (sample->parsed()) return cmd_sample(opt, out, err);
  if (diag->parsed()) return cmd_diagnose(opt, out, err);
  return cmd_gte(opt, out, err);
}

}  // namespace gaitd::cli
