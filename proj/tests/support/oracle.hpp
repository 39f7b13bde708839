#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <gaitd/gaitd.hpp>

namespace gaitd::testing {

struct Config {
  Family family = Family::Poisson;
  SpecialSets sets;
  GaitdParams params;

  GaitdDist dist(DistOptions options = {}) const { return GaitdDist(family, sets, params, options); }
};

/// Parent pmf from Boost / closed forms, sharing no code with the library.
double ref_parent_pmf(Family family, const std::vector<double>& theta, Count y);
/// Largest y worth summing to: parent tail beyond it is below `tail`.
Count ref_upper(Family family, const std::vector<double>& theta, double tail);

/// GAITD pmf on 0..upper by direct evaluation of the mixture definition.
struct BruteForce {
  std::vector<double> pmf;
  std::vector<double> parent;
  double delta = 0.0;

  double at(Count y) const { return y >= 0 && y < static_cast<Count>(pmf.size()) ? pmf[static_cast<std::size_t>(y)] : 0.0; }
  double moment(int k) const;
  double cdf(Count y) const;
  double kld() const;
  double xi(const SpecialSets& sets) const;
  double mean() const { return moment(1); }
  double variance() const;
};

BruteForce brute_force(const Config& c, double tail = 1e-16);

/// Random valid configuration; sets are drawn around the bulk of the parent.
/// With `moments_to` > 0 the parent is restricted so that moments up to that
/// order exist and converge fast enough for brute-force summation.
Config random_config(std::mt19937_64& rng, Family family, int moments_to = 0);

/// Poisson-parent configuration with only A_np/I_np/D_np/T (no parametric sets).
Config random_poisson_config(std::mt19937_64& rng);

/// Number of strict local maxima of the pmf on [lo, hi].
int count_local_modes(const GaitdDist& d, Count lo, Count hi);

}  // namespace gaitd::testing
