#include "cli/app.hpp"

#include <cstdint>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "ocdmd/error.hpp"

namespace ocdmd::cli {

namespace {

struct Flags {
  std::string kernel = "gaussian";
  double mu = 1.0;
  double a = 1.0;
  double eps = kDefaultEps;
  std::string quadrature = "auto";
  long long segment_len = 0;
  long long segment_stride = 0;
  std::string order = "eigenvalue";
  std::string transpose = "plain";
  std::string layout = "files";
  std::string x0;
  std::string out = ".";
  int threads = 0;

  std::string input;
  std::string model;
  std::string times;
  bool log10 = false;
  std::string system;
  int count = 10;
  double duration = 1.0;
  double dt = 0.01;
  std::uint64_t seed = 0;
};

RunConfig to_config(const Flags& f) {
  RunConfig c;
  try {
    c.kernel = {kernel_kind_from_string(f.kernel), f.mu};
    c.rule = quadrature_rule_from_string(f.quadrature);
    c.order = mode_order_from_string(f.order);
    c.transpose = modes_transpose_from_string(f.transpose);
    c.layout = input_layout_from_string(f.layout);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  c.a = f.a;
  c.eps = f.eps;
  c.segment_len = static_cast<Eigen::Index>(f.segment_len);
  c.segment_stride = static_cast<Eigen::Index>(f.segment_stride);
  c.out_dir = f.out;
  c.threads = f.threads;
  if (!f.x0.empty()) c.x0 = parse_point(f.x0);
  c.validate();
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Continuous-time dynamic mode decomposition with occupation kernels"};
  app.name(args.empty() ? "ocdmd" : args.front());
  app.set_config("--config", "", "TOML-style key = value file mirroring the flags (flags win)");
  app.require_subcommand(1);

  app.add_option("--kernel", f.kernel, "Kernel: gaussian | expdot")
      ->check(CLI::IsMember({"gaussian", "expdot"}));
  app.add_option("--mu", f.mu, "Kernel width mu");
  app.add_option("--scale-a", f.a, "Endpoint scaling a in (0, 1]");
  app.add_option("--eps", f.eps, "Relative Gram regularization");
  app.add_option("--quadrature", f.quadrature, "auto | simpson | trapezoid")
      ->check(CLI::IsMember({"auto", "simpson", "trapezoid"}));
  app.add_option("--segment-len", f.segment_len, "Samples per segment (0: no segmentation)");
  app.add_option("--segment-stride", f.segment_stride, "Segment start stride (default: length)");
  app.add_option("--order", f.order, "Mode ordering: eigenvalue | energy")
      ->check(CLI::IsMember({"eigenvalue", "energy"}));
  app.add_option("--modes-transpose", f.transpose, "plain | conjugate")
      ->check(CLI::IsMember({"plain", "conjugate"}));
  app.add_option("--layout", f.layout, "Input layout: files | single")
      ->check(CLI::IsMember({"files", "single"}));
  app.add_option("--x0", f.x0, "Initial condition, comma separated");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--threads", f.threads, "Worker threads (0: default)");

  auto* decompose = app.add_subcommand("decompose", "Fit a model to trajectory CSV files");
  decompose->fallthrough();
  decompose->add_option("input", f.input, "Trajectory file or directory")->required();

  auto* reconstruct = app.add_subcommand("reconstruct", "Evaluate the model on a time grid");
  reconstruct->fallthrough();
  reconstruct->add_option("model", f.model, "model.json")->required();
  reconstruct->add_option("--times", f.times, "start:stop:count or t0,t1,...")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Frequency/magnitude table of the modes");
  spectrum->fallthrough();
  spectrum->add_option("model", f.model, "model.json")->required();
  spectrum->add_flag("--log", f.log10, "log10 magnitudes (floor 1e-12)");

  auto* synth = app.add_subcommand("synth", "Generate synthetic trajectories");
  synth->fallthrough();
  synth->add_option("system", f.system, "oscillator | decay | vanderpol")->required();
  synth->add_option("--count", f.count, "Number of trajectories");
  synth->add_option("--duration", f.duration, "Trajectory length T");
  synth->add_option("--dt", f.dt, "RK4 step");
  synth->add_option("--seed", f.seed, "Random seed for initial conditions");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*decompose) {
      const RunConfig config = to_config(f);
      const auto summary = cmd_decompose(config, f.input);
      out << "decomposed " << summary.trajectories << " trajectories (n = " << summary.dim
          << ") into " << config.out_dir.string() << '\n';
    } else if (*reconstruct) {
      if (f.x0.empty()) throw UsageError("reconstruct requires --x0");
      if (cmd_reconstruct(f.model, parse_point(f.x0), parse_time_grid(f.times), f.out)) {
        err << "warning: time grid extends beyond the longest training trajectory; "
               "values there are extrapolated\n";
      }
    } else if (*spectrum) {
      std::optional<Eigen::VectorXd> x0;
      if (!f.x0.empty()) x0 = parse_point(f.x0);
      cmd_spectrum(f.model, x0, f.log10, f.out);
    } else if (*synth) {
      cmd_synth(f.system, f.count, f.duration, f.dt, f.seed, f.out);
      out << "wrote " << f.count << " " << f.system << " trajectories (seed " << f.seed
          << ") into " << f.out << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::Numeric ? kNumericError : kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kSuccess;
}

}  // namespace ocdmd::cli
