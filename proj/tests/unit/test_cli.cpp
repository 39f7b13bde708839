#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gaitd/gaitd.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace fs = std::filesystem;
using doctest::Approx;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gaitd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gaitd::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data_file(const std::string& name) { return std::string(GAITD_DATA_DIR) + "/" + name; }

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / ("gaitd_cli_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// value of "key = value" inside [section]
std::string report_value(const std::string& report, const std::string& section, const std::string& key) {
  std::istringstream in(report);
  std::string line, current;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '[') {
      current = line.substr(1, line.find(']') - 1);
      continue;
    }
    if (current == section && line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return {};
}

}  // namespace

TEST_CASE("sleep fit report") {
  const auto dir = scratch();
  // fixed multiplier through the command-line range
  const auto r = cli({"fit", "--config", data_file("sleep.cfg"), "--data", data_file("sleep.csv"), "--m-range", "5", "--out",
                      (dir / "fit.txt").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto report = slurp(dir / "fit.txt");
  CHECK(report.rfind("# gaitd-report v1", 0) == 0);
  CHECK(std::stod(report_value(report, "params", "phi_np")) == Approx(0.157).epsilon(0.07));
  CHECK(std::stod(report_value(report, "measures", "kld_baseline_weighted")) == Approx(4.57).epsilon(0.02));
  CHECK(std::stod(report_value(report, "gte-result", "mean_original_scale")) == Approx(7.297).epsilon(1e-3));
  CHECK(report_value(report, "fit", "converged") == "true");

  // the report can be read back as a configuration for diagnose
  const auto d = cli({"diagnose", "--config", (dir / "fit.txt").string(), "--data", data_file("sleep.csv"), "--expand"});
  REQUIRE_MESSAGE(d.code == 0, d.err);
  std::istringstream rows(d.out);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  double fitted = 0.0, observed = 0.0;
  while (std::getline(rows, line) && line[0] != '[') {
    std::istringstream f(line);
    double y, obs, fit;
    f >> y >> obs >> fit;
    fitted += fit;
    observed += obs;
  }
  CHECK(fitted <= 1.0 + 1e-12);
  CHECK(fitted == Approx(1.0).epsilon(1e-6));
  CHECK(observed == Approx(1.0).epsilon(1e-12));
  fs::remove_all(dir);
}

TEST_CASE("gte command") {
  const auto r = cli({"gte", "--config", data_file("sleep.cfg"), "--data", data_file("sleep.csv")});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(report_value(r.out, "gte-result", "m") == "5");
  CHECK(std::stod(report_value(r.out, "gte-result", "m_hat")) == Approx(5.67).epsilon(0.01));
  const auto one = cli({"gte", "--config", data_file("sleep.cfg"), "--data", data_file("sleep.csv"), "--m-range", "3"});
  REQUIRE(one.code == 0);
  const auto table = one.out.substr(one.out.find("[gte-table]"));
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
}

TEST_CASE("poisson fit recovers the sample mean") {
  const auto dir = scratch();
  gaitd::GaitdParams p;
  p.theta_pi = {3.3};
  const auto y = gaitd::GaitdDist(gaitd::Family::Poisson, {}, p).sample(500, 3);
  std::string csv = "y\n";
  double sum = 0.0;
  for (auto v : y) {
    csv += std::to_string(v) + "\n";
    sum += static_cast<double>(v);
  }
  const auto data = write(dir, "y.csv", csv);
  const auto cfg = write(dir, "p.cfg", "[model]\nfamily = poisson\n");
  const auto r = cli({"fit", "--config", cfg.string(), "--data", data.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(std::stod(report_value(r.out, "params", "theta_pi")) == Approx(sum / 500.0).epsilon(1e-7));
  fs::remove_all(dir);
}

TEST_CASE("malformed configuration is reported with its line") {
  const auto dir = scratch();
  const auto cfg = write(dir, "bad.cfg", "[model]\nfamily = poisson\nI_np = 1 x\n");
  const auto r = cli({"fit", "--config", cfg.string(), "--data", data_file("sleep.csv")});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 3") != std::string::npos);
  const auto dup = write(dir, "dup.cfg", "[model]\nfamily = poisson\nfamily = negbin\n");
  CHECK(cli({"eval", "--config", dup.string()}).err.find("line 3") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("eval queries") {
  const auto dir = scratch();
  const auto pois = write(dir, "p.cfg", "[model]\nfamily = poisson\n[params]\ntheta_pi = 5\n");
  auto r = cli({"eval", "--config", pois.string(), "--query", "quantile", "--p", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "p\tquantile\n0.5\t5\n");
  const auto zip = write(dir, "z.cfg", "[model]\nfamily = poisson\nI_np = 0\n[params]\ntheta_pi = 1\nphi_np = 0.2\n");
  r = cli({"eval", "--config", zip.string(), "--query", "moment", "--k", "1"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out.substr(r.out.find('\t', 9) + 1)) == Approx(0.8).epsilon(1e-12));

  r = cli({"eval", "--config", data_file("heaped_nb.cfg"), "--from", "0", "--to", "30"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 32);
  fs::remove_all(dir);
}

TEST_CASE("sample command") {
  const auto dir = scratch();
  const auto cfg = data_file("heaped_nb.cfg");
  REQUIRE(cli({"sample", "--config", cfg, "--n", "0", "--out", (dir / "e.txt").string()}).code == 0);
  CHECK(fs::file_size(dir / "e.txt") == 0);
  REQUIRE(cli({"sample", "--config", cfg, "--n", "500", "--seed", "4", "--out", (dir / "a.txt").string()}).code == 0);
  REQUIRE(cli({"sample", "--config", cfg, "--n", "500", "--seed", "4", "--out", (dir / "b.txt").string()}).code == 0);
  CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
  fs::remove_all(dir);
}

TEST_CASE("diagnose") {
  auto r = cli({"diagnose", "--region", "ZAP", "--definition", "VMD_star", "--grid", "20,20"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string kind;
  double x, w;
  int over;
  std::string header;
  std::getline(in, header);
  int boundary = 0;
  while (in >> kind >> x >> w >> over) {
    if (kind == "boundary") {
      ++boundary;
      CHECK(w == Approx(std::exp(-x)).epsilon(1e-4));
    }
  }
  CHECK(boundary > 0);

  const auto dir = scratch();
  const auto cfg = write(dir, "p.cfg", "[model]\nfamily = poisson\n[params]\ntheta_pi = 2\n");
  r = cli({"diagnose", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  std::istringstream rows(r.out);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  while (std::getline(rows, line) && line[0] != '[') {
    std::istringstream f(line);
    double y, obs, fitted, scaled, spike, dip, alt;
    f >> y >> obs >> fitted >> scaled >> spike >> dip >> alt;
    CHECK(scaled == Approx(fitted));
    CHECK(spike == 0.0);
    CHECK(dip == 0.0);
    CHECK(alt == 0.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("bad usage") {
  CHECK(cli({}).code != 0);
  CHECK(cli({"fit"}).code == 1);
  CHECK(cli({"eval", "--config", "/nonexistent.cfg"}).code == 1);
}
