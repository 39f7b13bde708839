#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gaitd/distribution.hpp"

namespace gaitd {

/// Kullback-Leibler divergence D(f || f_pi), evaluated by the closed-form
/// decomposition over the special values plus a single nonspecial term.
double kld_to_parent(const GaitdDist& dist);

/// Same decomposition but with the nonspecial term Delta*log(Delta) weighted
/// by the model probability of a nonspecial value, Delta*Pr_pi(y not in S),
/// instead of the parent probability. Not a divergence; kept for comparison
/// with results computed that way.
double kld_baseline_weighted(const GaitdDist& dist);

/// Heaped/seeped proportion Xi: discrepancy between the pmf and the scaled
/// parent over the altered values plus the larger of total inflation and
/// total deflation.
double xi_heapseep(const GaitdDist& dist);

/// Inflation at an inflated value against the deflation at its two
/// neighbours. Equal masses would mean the heap was drawn exactly from the
/// adjacent values; this is reported only, never imposed.
struct HeapBalance {
  Count value = 0;
  double inflation = 0.0;
  double neighbour_deflation = 0.0;
  double imbalance() const { return inflation - neighbour_deflation; }
};
std::vector<HeapBalance> heap_seep_balance(const GaitdDist& dist);

enum class Dispersion { VMD_star, VMD_pi, VVD, DVMD, DIR };

std::string_view dispersion_name(Dispersion d);
std::optional<Dispersion> parse_dispersion(std::string_view name);

struct DispersionReport {
  double mean = 0.0, variance = 0.0;                // Y_*
  double parent_mean = 0.0, parent_variance = 0.0;  // Y_pi
  double vmd_star = 0.0, vmd_pi = 0.0, vvd = 0.0, dvmd = 0.0, dir = 1.0;

  /// Strict inequality; equality counts as not overdispersed.
  bool overdispersed(Dispersion d) const;
  double value(Dispersion d) const;
};

DispersionReport dispersion_from_moments(double mean, double variance, double parent_mean,
                                         double parent_variance);

/// nullopt when a needed moment of Y_* or Y_pi diverges.
std::optional<DispersionReport> dispersion_report(const GaitdDist& dist);

struct TheoremSides {
  double lhs = 0.0;
  double rhs = 0.0;
  bool overdispersed() const { return lhs > rhs; }
};

/// Sides of the factorial-moment inequalities for VMD_star, VMD_pi and VVD.
/// Throws DomainError for other definitions or when moments diverge.
TheoremSides theorem_lhs(const GaitdDist& dist, Dispersion definition);

/// VMD_star sign for a 0-altered model with parent f_pi and Pr(Y=0) = omega.
double corollary_za(const ParentSpec& parent, double omega);

enum class Table1Model { ZAP, ZAB, ZIP, ZIB, ZTP, ZTB };

std::string_view table1_model_name(Table1Model m);
std::optional<Table1Model> parse_table1_model(std::string_view name);
bool table1_is_binomial(Table1Model m);

/// lambda for Poisson rows; (size, p) for binomial rows; w is omega or phi.
struct Table1Params {
  double lambda = 1.0;
  int size = 1;
  double p = 0.5;
  double w = 0.0;
};

/// Closed-form verdict. VMD_pi is only tabulated through VVD for Poisson
/// rows; asking for it on a binomial row throws DomainError.
bool table1_condition(Table1Model model, Dispersion definition, const Table1Params& params);

/// Numeric report from enumerated moments (GaitdDist for Poisson rows).
DispersionReport table1_numeric(Table1Model model, const Table1Params& params);

/// Mean and variance of a binomial with Pr(0) altered to w, inflated by w,
/// or removed. kind is ZAB, ZIB or ZTB.
std::pair<double, double> zero_modified_binomial_moments(Table1Model kind, int size, double p, double w);

struct RegionGrid {
  double x_lo = 0.1, x_hi = 5.0;  // lambda, or p for binomial rows
  int nx = 100;
  double w_lo = 0.01, w_hi = 0.99;
  int nw = 100;
  int size = 10;  // binomial N
};

struct RegionPoint {
  double x = 0.0, w = 0.0;
  bool over = false;
};

struct RegionScan {
  std::vector<RegionPoint> points;    // row-major: x outer, w inner
  std::vector<RegionPoint> boundary;  // refined verdict changes along w
};

/// Grid verdicts from table1_condition plus boundary points refined by
/// bisection along w. Columns run on GAITD_NUM_THREADS threads (default 1).
RegionScan region_scan(Table1Model model, Dispersion definition, const RegionGrid& grid);

/// Thread count from the GAITD_NUM_THREADS environment variable, at least 1.
unsigned default_thread_count();

}  // namespace gaitd
