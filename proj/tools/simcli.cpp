// Command-line front end: closed-loop runs, trajectory re-verification,
// scenario assumption checks, and scenario listing.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "fracsim/fracnum.hpp"
#include "fracsim/nussbaum.hpp"
#include "fracsim/plant.hpp"
#include "fracsim/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;  // diverged run or failed verification/check
constexpr int kExitIo = 3;

struct CliOptions {
  std::string config_path;
  std::string scenario;
  std::string out_path;
  double dt = 0.0;
  double t_final = 0.0;
  double alpha = 0.0;
  std::size_t stride = 0;
  long long memory_truncation = -1;
  std::vector<std::string> gains;
};

void add_common(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--config", opt.config_path, "flat key = value config file");
  sub->add_option("--scenario", opt.scenario, "built-in scenario name (see `scenarios`)");
  sub->add_option("--dt", opt.dt, "time step in seconds");
  sub->add_option("--t-final", opt.t_final, "horizon in seconds");
  sub->add_option("--alpha", opt.alpha, "differentiation-order override in (0, 1]");
  sub->add_option("--out", opt.out_path, "CSV output path");
  sub->add_option("--stride", opt.stride, "log every k-th step");
  sub->add_option("--memory-truncation", opt.memory_truncation,
                  "cap adaptation history length (0 = full memory)");
  sub->add_option("--gain", opt.gains,
                  "dotted-key override, repeatable (e.g. gains.sub1.cbar1=3, control.rho=0.5, "
                  "example_a.gain_scale=-1)");
}

fracsim::SimConfig make_config(const CliOptions& opt) {
  fracsim::SimConfig cfg;
  if (!opt.config_path.empty()) cfg = fracsim::load_config(opt.config_path);
  if (!opt.scenario.empty()) cfg.scenario = opt.scenario;
  if (opt.dt != 0.0) cfg.dt = opt.dt;
  if (opt.t_final != 0.0) cfg.t_final = opt.t_final;
  if (opt.alpha != 0.0) cfg.alpha_override = opt.alpha;
  if (!opt.out_path.empty()) cfg.output_path = opt.out_path;
  if (opt.stride != 0) cfg.log_stride = opt.stride;
  if (opt.memory_truncation >= 0) {
    cfg.memory_truncation = static_cast<std::size_t>(opt.memory_truncation);
  }
  for (const std::string& kv : opt.gains) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
      throw std::invalid_argument("--gain expects key=value, got '" + kv + "'");
    }
    char* end = nullptr;
    const std::string val = kv.substr(eq + 1);
    const double v = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') {
      throw std::invalid_argument("--gain " + kv + ": value is not a number");
    }
    fracsim::apply_override(cfg, kv.substr(0, eq), v);
  }
  cfg.validate();
  return cfg;
}

int cmd_run(const CliOptions& opt) {
  const fracsim::SimConfig cfg = make_config(opt);
  const fracsim::SimResult result = fracsim::run_closed_loop(cfg);
  const fracsim::MetricsReport metrics = fracsim::compute_metrics(result);
  std::cout << "scenario: " << result.scenario.name << "  alpha = " << result.alpha
            << "  dt = " << cfg.dt << "  t_final = " << cfg.t_final << "\n"
            << fracsim::format_metrics(metrics);
  if (!cfg.output_path.empty()) std::cout << "csv: " << cfg.output_path << "\n";
  return result.diverged ? kExitFailed : kExitOk;
}

int cmd_verify(const CliOptions& opt, const std::string& csv_path) {
  const fracsim::SimConfig cfg = make_config(opt);
  const fracsim::MetricsReport metrics = fracsim::verify_csv(cfg, csv_path);
  std::cout << fracsim::format_metrics(metrics);
  return metrics.theorem_holds ? kExitOk : kExitFailed;
}

int cmd_check(const CliOptions& opt) {
  const fracsim::SimConfig cfg = make_config(opt);
  const fracsim::Scenario sc = fracsim::build_scenario(cfg);
  const fracsim::A2Report a2 = fracsim::check_assumption2(sc);
  std::cout << "interaction bounds on [-" << a2.box_halfwidth << ", " << a2.box_halfwidth
            << "]^d, " << a2.grid_per_dim << " points per dimension:\n";
  for (const fracsim::A2Entry& e : a2.entries) {
    std::cout << "  sub " << e.sub + 1 << " row " << e.row + 1 << ": worst |f|/bound = "
              << e.max_ratio << (e.violated ? "  VIOLATED at (" : "  ok");
    if (e.violated) {
      for (std::size_t i = 0; i < e.worst_point.size(); ++i) {
        std::cout << (i ? ", " : "") << e.worst_point[i];
      }
      std::cout << ")";
    }
    std::cout << "\n";
  }
  const fracsim::NussbaumWitnesses w = fracsim::check_nussbaum_property(cfg.kind, 10.0, 20.0);
  std::cout << "gain-function oscillation: ";
  if (w.sup_found && w.inf_found) {
    std::cout << "integral exceeds +10 by delta = " << w.sup_witness << ", falls below -10 by "
              << w.inf_witness << "\n";
  } else {
    std::cout << "FAILED to cross +/-10 within [0, 20]\n";
  }
  const bool ok = a2.pass && w.sup_found && w.inf_found;
  std::cout << "checks: " << (ok ? "pass" : "FAIL") << "\n";
  return ok ? kExitOk : kExitFailed;
}

int cmd_scenarios() {
  std::cout << "example_a  four interconnected second-order subsystems, mixed time-varying\n"
            << "           input gains, reference sin(2t) on every output (order 0.8)\n"
            << "pmsm       motor model: (speed, q-current) + d-current subsystems, bilinear\n"
            << "           couplings, speed tracks sin(2t), d-current regulates to 0 (order 0.9)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional-order decentralized adaptive control simulator"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* run = app.add_subcommand("run", "simulate a closed loop, print metrics");
  add_common(run, opt);
  CLI::App* verify = app.add_subcommand("verify", "energy-bound check on an existing run CSV");
  std::string csv_path;
  verify->add_option("csv", csv_path, "CSV produced by `run`")->required();
  add_common(verify, opt);
  CLI::App* check =
      app.add_subcommand("check", "interaction-bound and gain-oscillation checks");
  add_common(check, opt);
  app.add_subcommand("scenarios", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (verify->parsed()) return cmd_verify(opt, csv_path);
    if (check->parsed()) return cmd_check(opt);
    return cmd_scenarios();
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fracsim::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitFailed;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
