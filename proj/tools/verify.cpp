// verify: runs the identity checks and prints reports.
//
//   verify mock-theta --delta -23
//   verify eta25 --n 1
//   verify zagier --d 3
//   verify duality --instance mock_theta
//   verify all
//
// Exit status: 0 when every check passes, 1 when any fails, 2 on bad configuration.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "cmtrace/checks.hpp"

using namespace cmtrace;

int main(int argc, char** argv) {
  CLI::App app{"Verify trace identities numerically"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<prec_t> prec;
  std::optional<double> tolerance;
  std::optional<std::int64_t> c_max;
  std::string cache, format = "json";
  int jobs = 1;
  bool no_timing = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--prec", prec, "Precision in bits (default 128, 256 for eta25)");
    sub->add_option("--tolerance", tolerance, "Relative tolerance (default 1e-10, 1e-6 for eta25)");
    sub->add_option("--c-max", c_max, "Fixed coset cutoff for Poincare series");
    sub->add_option("--cache", cache, "Trace cache file (default $CMTRACE_CACHE)");
    sub->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timing", no_timing, "Omit wall times so reports compare byte for byte");
  };

  std::int64_t delta = -23, n = 1, d = 3;
  std::string instance = "mock_theta";
  auto* mock = app.add_subcommand("mock-theta", "Mock theta coefficient from twisted traces");
  mock->add_option("--delta", delta, "Negative fundamental discriminant = 1 mod 24");
  auto* eta = app.add_subcommand("eta25", "Coefficient of eta^-25 from traces of a raised lift input");
  eta->add_option("--n", n, "Coefficient index, >= 1");
  auto* zag = app.add_subcommand("zagier", "Traces of J over positive forms");
  zag->add_option("--d", d, "Discriminant magnitude, = 0 or 3 mod 4");
  auto* dual = app.add_subcommand("duality", "Pairing of principal parts with traces");
  dual->add_option("--instance", instance, "mock_theta, eta25 or empty")
      ->check(CLI::IsMember({"mock_theta", "eta25", "empty"}));
  auto* all = app.add_subcommand("all", "The full battery");
  for (auto* sub : {mock, eta, zag, dual, all}) common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.prec_bits = prec;
  cfg.tolerance = tolerance;
  cfg.c_max = c_max;
  cfg.jobs = jobs;
  cfg.timing = !no_timing;
  cfg.cache_path = cache;
  if (cfg.cache_path.empty())
    if (const char* env = std::getenv("CMTRACE_CACHE")) cfg.cache_path = env;

  std::vector<CheckReport> reports;
  try {
    cfg.format = format_from_string(format);
    if (mock->parsed()) reports.push_back(cmd_mock_theta(delta, cfg));
    if (eta->parsed()) reports.push_back(cmd_eta25(n, cfg));
    if (zag->parsed()) reports.push_back(cmd_zagier(d, cfg));
    if (dual->parsed()) reports.push_back(cmd_duality(instance, cfg));
    if (all->parsed()) reports = run_all(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidDiscriminant& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::cout << render(reports, cfg.format, cfg.timing);
  for (const auto& r : reports)
    if (!r.pass) return 1;
  return 0;
}
