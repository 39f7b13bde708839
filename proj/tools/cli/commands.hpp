#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace gaitd::cli {

struct Options {
  std::string config, data, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tail_mass, tol;
  std::optional<int> max_iter;
  std::string m_range, nu_range, grid;
  // eval
  std::string query = "pmf";
  std::optional<long long> from, to;
  std::optional<double> p;
  int k = 1;
  // sample
  std::size_t n = 0;
  // diagnose
  std::string region, definition = "VMD_star";
  bool expand = false;
};

/// Exit codes: 0 success, 1 usage/config/data error, 2 fit did not converge.
int cmd_fit(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_sample(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_diagnose(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_gte(const Options& opt, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the CLI tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gaitd::cli
