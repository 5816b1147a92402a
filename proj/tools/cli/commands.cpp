#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ocdmd/decomposition.hpp"
#include "ocdmd/digest.hpp"
#include "ocdmd/error.hpp"
#include "ocdmd/model_io.hpp"
#include "ocdmd/occupation.hpp"

namespace ocdmd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Collects output files as hidden temporaries and renames them into place on
/// commit(). Anything not committed, or committed only partially, is removed.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }
  ArtifactSet(const ArtifactSet&) = delete;
  ArtifactSet& operator=(const ArtifactSet&) = delete;

  ~ArtifactSet() {
    std::error_code ec;
    for (const auto& [tmp, final_path] : staged_) fs::remove(tmp, ec);
    if (!committed_) {
      for (const auto& p : placed_) fs::remove(p, ec);
    }
  }

  void stage(const std::string& name, const std::string& content) {
    const fs::path final_path = dir_ / name;
    const fs::path tmp = dir_ / ("." + name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + tmp.string());
      out << content;
      if (!out.flush()) throw IoError("failed writing " + tmp.string());
    }
    staged_.emplace_back(tmp, final_path);
  }

  void commit() {
    for (const auto& [tmp, final_path] : staged_) {
      std::error_code ec;
      fs::rename(tmp, final_path, ec);
      if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
      placed_.push_back(final_path);
    }
    staged_.clear();
    committed_ = true;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> staged_;
  std::vector<fs::path> placed_;
  bool committed_ = false;
};

std::string complex_list_csv(const Eigen::VectorXcd& values) {
  std::ostringstream out;
  out << "index,re,im\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << (i + 1) << ',' << format_double(values[i].real()) << ','
        << format_double(values[i].imag()) << '\n';
  }
  return out.str();
}

std::string modes_csv(const Eigen::MatrixXcd& modes) {
  std::ostringstream out;
  for (Eigen::Index c = 0; c < modes.cols(); ++c) {
    out << (c ? "," : "") << "re_" << (c + 1) << ",im_" << (c + 1);
  }
  out << '\n';
  for (Eigen::Index r = 0; r < modes.rows(); ++r) {
    for (Eigen::Index c = 0; c < modes.cols(); ++c) {
      out << (c ? "," : "") << format_double(modes(r, c).real()) << ','
          << format_double(modes(r, c).imag());
    }
    out << '\n';
  }
  return out.str();
}

double millis_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace

DecomposeSummary cmd_decompose(const RunConfig& config, const fs::path& input) {
  config.validate();
  apply_threads(config.threads);
  const auto t_start = std::chrono::steady_clock::now();

  ModelProvenance provenance;
  std::error_code ec;
  provenance.input = fs::absolute(input, ec).lexically_normal().string();
  provenance.layout = config.layout;
  provenance.segment_len = config.segment_len;
  provenance.segment_stride = config.segment_len > 0 && config.segment_stride == 0
                                  ? config.segment_len
                                  : config.segment_stride;
  provenance.rule = config.rule;
  provenance.order = config.order;

  for (const auto& file : trajectory_files(provenance.input, config.layout)) {
    provenance.files.push_back({file.string(), sha256_file(file)});
  }
  auto trajs = load_trajectories(provenance.input, config.layout);
  if (trajs.empty()) throw InvalidInput("no trajectories found in " + input.string());
  if (config.segment_len > 0) {
    trajs = segment_all(trajs, config.segment_len, provenance.segment_stride);
  }
  if (config.x0 && config.x0->size() != trajs.front().dim()) {
    throw UsageError("--x0 has dimension " + std::to_string(config.x0->size()) +
                     ", data has dimension " + std::to_string(trajs.front().dim()));
  }
  const double t_load = millis_since(t_start);

  auto shared = std::make_shared<const std::vector<Trajectory>>(std::move(trajs));
  const auto t_assemble_start = std::chrono::steady_clock::now();
  const GramData data = assemble(*shared, config.kernel, config.a, config.rule);
  const double t_assemble = millis_since(t_assemble_start);

  const auto t_model_start = std::chrono::steady_clock::now();
  DecompositionModel model = build_model(shared, data, config.eps, config.transpose);
  if (config.order == ModeOrder::Energy) model = order_by_energy(model, *config.x0);
  const double t_model = millis_since(t_model_start);

  json rules = json::array();
  for (const auto& w : data.weights) rules.push_back(std::string(to_string(w.rule_used)));
  json files = json::array();
  for (const auto& f : provenance.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}});

  json meta = {
      {"trajectories", model.M()},
      {"dim", model.dim()},
      {"kernel", {{"kind", std::string(to_string(config.kernel.kind))}, {"mu", config.kernel.mu}}},
      {"a", config.a},
      {"eps", config.eps},
      {"eps_hat", model.eps_hat()},
      {"degenerate_norm_factor", kDegenerateNormFactor},
      {"endpoint_policy", "raw first/last samples"},
      {"quadrature", {{"requested", std::string(to_string(config.rule))}, {"per_trajectory", rules}}},
      {"segment_len", provenance.segment_len},
      {"segment_stride", provenance.segment_stride},
      {"order", std::string(to_string(config.order))},
      {"modes_transpose", std::string(to_string(config.transpose))},
      {"files", files},
      {"timings_ms",
       {{"load", t_load}, {"assemble", t_assemble}, {"decompose", t_model}, {"total", millis_since(t_start)}}},
  };

  ArtifactSet artifacts(config.out_dir);
  artifacts.stage("model.json", model_to_json(model, provenance));
  artifacts.stage("eigenvalues.csv", complex_list_csv(model.eigenvalues()));
  artifacts.stage("modes.csv", modes_csv(model.modes()));
  if (config.x0) {
    const Eigen::VectorXcd phi = eigenfunctions_at(model, *config.x0);
    artifacts.stage("coefficients.csv", complex_list_csv(phi));
    std::vector<double> x0(config.x0->data(), config.x0->data() + config.x0->size());
    meta["x0"] = x0;
  }
  artifacts.stage("run_meta.json", meta.dump(2) + "\n");
  artifacts.commit();

  return {model.M(), model.dim(), model.eps_hat()};
}

bool cmd_reconstruct(const fs::path& model_path, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& times, const fs::path& out_dir) {
  const DecompositionModel model = load_model(model_path);
  if (x0.size() != model.dim()) {
    throw UsageError("--x0 has dimension " + std::to_string(x0.size()) + ", model expects " +
                     std::to_string(model.dim()));
  }
  const Reconstruction rec = reconstruct(model, x0, times);

  std::ostringstream out;
  out << 't';
  for (Eigen::Index c = 0; c < model.dim(); ++c) out << ",x" << (c + 1);
  out << ",imag_residual\n";
  const auto& states = rec.trajectory.states();
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    out << format_double(times[k]);
    for (Eigen::Index c = 0; c < model.dim(); ++c) out << ',' << format_double(states(k, c));
    out << ',' << format_double(rec.imag_residual[k]) << '\n';
  }
  ArtifactSet artifacts(out_dir);
  artifacts.stage("reconstruction.csv", out.str());
  artifacts.commit();
  return rec.extrapolated;
}

std::string spectrum_csv(const std::vector<SpectrumEntry>& entries, bool log10) {
  std::ostringstream out;
  out << "frequency_hz,magnitude\n";
  for (const auto& entry : entries) {
    const double m = log10 ? std::log10(std::max(entry.magnitude, 1e-12)) : entry.magnitude;
    out << format_double(entry.frequency_hz) << ',' << format_double(m) << '\n';
  }
  return out.str();
}

void cmd_spectrum(const fs::path& model_path, const std::optional<Eigen::VectorXd>& x0, bool log10,
                  const fs::path& out_dir) {
  const DecompositionModel model = load_model(model_path);
  const Eigen::VectorXd point = x0 ? *x0 : model.trajectories().front().start();
  if (point.size() != model.dim()) {
    throw UsageError("--x0 has dimension " + std::to_string(point.size()) + ", model expects " +
                     std::to_string(model.dim()));
  }
  ArtifactSet artifacts(out_dir);
  artifacts.stage("spectrum.csv", spectrum_csv(spectrum(model, point), log10));
  artifacts.commit();
}

std::vector<Trajectory> synth_trajectories(const std::string& system, int count, double T,
                                           double dt, std::uint64_t seed) {
  VectorFieldSpec field;
  if (system == "oscillator") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.0, -1.0, 0.0;
    field = LinearSystem{A};
  } else if (system == "decay") {
    Eigen::MatrixXd A = Eigen::Vector2d(-1.0, -2.0).asDiagonal();
    field = LinearSystem{A};
  } else if (system == "vanderpol") {
    field = VanDerPol{1.0};
  } else {
    throw UsageError("unknown system '" + system + "' (expected oscillator, decay or vanderpol)");
  }
  if (count < 0) throw UsageError("--count must be >= 0");

  // Uniform draws from the raw 64-bit stream keep files identical across
  // standard library implementations.
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return -1.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<Trajectory> out;
  const Eigen::Index n = dimension(field);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x0(n);
    for (Eigen::Index c = 0; c < n; ++c) x0[c] = uniform();
    out.push_back(simulate(field, x0, T, dt));
  }
  return out;
}

void cmd_synth(const std::string& system, int count, double T, double dt, std::uint64_t seed,
               const fs::path& out_dir) {
  const auto trajs = synth_trajectories(system, count, T, dt, seed);
  ArtifactSet artifacts(out_dir);
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    std::ostringstream out;
    write_trajectory_csv(out, trajs[k]);
    char name[32];
    std::snprintf(name, sizeof(name), "traj_%04zu.csv", k);
    artifacts.stage(name, out.str());
  }
  artifacts.commit();
}

}  // namespace ocdmd::cli
