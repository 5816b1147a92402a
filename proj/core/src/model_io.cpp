#include "ocdmd/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ocdmd/digest.hpp"
#include "ocdmd/error.hpp"
#include "ocdmd/occupation.hpp"

namespace ocdmd {

using nlohmann::json;

namespace {

json complex_vector(const Eigen::VectorXcd& v) {
  std::vector<double> re(v.size()), im(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  return {{"re", re}, {"im", im}};
}

json complex_matrix(const Eigen::MatrixXcd& m) {
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Eigen::VectorXcd read_complex_vector(const json& j) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw ParseError("re/im arrays differ in length");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v[static_cast<Eigen::Index>(i)] = {re[i], im[i]};
  return v;
}

Eigen::MatrixXcd read_complex_matrix(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) ||
      im.size() != re.size()) {
    throw ParseError("matrix shape does not match its re/im arrays");
  }
  Eigen::MatrixXcd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, ++k) m(r, c) = {re[k], im[k]};
  }
  return m;
}

}  // namespace

std::string model_to_json(const DecompositionModel& model, const ModelProvenance& provenance) {
  json files = json::array();
  for (const auto& f : provenance.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}});
  json rules = json::array();
  for (const auto& w : model.weights()) rules.push_back(std::string(to_string(w.rule_used)));

  json doc = {
      {"format", "ocdmd-model"},
      {"version", kModelFormatVersion},
      {"M", model.M()},
      {"n", model.dim()},
      {"kernel", {{"kind", std::string(to_string(model.kernel().kind))}, {"mu", model.kernel().mu}}},
      {"a", model.a()},
      {"eps", model.eps()},
      {"eps_hat", model.eps_hat()},
      {"modes_transpose", std::string(to_string(model.transpose()))},
      {"order", std::string(to_string(provenance.order))},
      {"eigenvalues", complex_vector(model.eigenvalues())},
      {"V", complex_matrix(model.V())},
      {"modes", complex_matrix(model.modes())},
      {"quadrature",
       {{"requested", std::string(to_string(provenance.rule))}, {"per_trajectory", rules}}},
      {"trajectories",
       {{"input", provenance.input},
        {"layout", std::string(to_string(provenance.layout))},
        {"segment_len", provenance.segment_len},
        {"segment_stride", provenance.segment_stride},
        {"files", files}}},
  };
  return doc.dump(2) + "\n";
}

ModelDocument parse_model_json(std::string_view text, const std::string& source) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "ocdmd-model") {
      throw ParseError(source + ": not an ocdmd model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ParseError(source + ": unsupported model version " + j.at("version").dump());
    }
    ModelDocument doc;
    doc.kernel.kind = kernel_kind_from_string(j.at("kernel").at("kind").get<std::string>());
    doc.kernel.mu = j.at("kernel").at("mu").get<double>();
    doc.a = j.at("a").get<double>();
    doc.eps = j.at("eps").get<double>();
    doc.eps_hat = j.at("eps_hat").get<double>();
    doc.transpose = modes_transpose_from_string(j.at("modes_transpose").get<std::string>());
    doc.eigenvalues = read_complex_vector(j.at("eigenvalues"));
    doc.V = read_complex_matrix(j.at("V"));
    doc.modes = read_complex_matrix(j.at("modes"));
    doc.rules_used = j.at("quadrature").at("per_trajectory").get<std::vector<std::string>>();

    auto& p = doc.provenance;
    p.order = mode_order_from_string(j.at("order").get<std::string>());
    p.rule = quadrature_rule_from_string(j.at("quadrature").at("requested").get<std::string>());
    const json& t = j.at("trajectories");
    p.input = t.at("input").get<std::string>();
    p.layout = input_layout_from_string(t.at("layout").get<std::string>());
    p.segment_len = t.at("segment_len").get<Eigen::Index>();
    p.segment_stride = t.at("segment_stride").get<Eigen::Index>();
    for (const auto& f : t.at("files")) {
      p.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    }
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(source + ": malformed model: " + e.what());
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

ModelDocument read_model_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_json(buf.str(), path.string());
}

void verify_sources(const ModelProvenance& provenance) {
  for (const auto& f : provenance.files) {
    std::error_code ec;
    if (!std::filesystem::exists(f.path, ec)) {
      throw StaleModelError("trajectory file " + f.path + " referenced by the model is missing");
    }
    if (sha256_file(f.path) != f.sha256) {
      throw StaleModelError("trajectory file " + f.path +
                            " changed since the model was fitted (digest mismatch)");
    }
  }
  const auto current = trajectory_files(provenance.input, provenance.layout);
  if (current.size() != provenance.files.size()) {
    throw StaleModelError("input " + provenance.input + " now holds " +
                          std::to_string(current.size()) + " trajectory files, model used " +
                          std::to_string(provenance.files.size()));
  }
}

std::vector<Trajectory> load_training_data(const ModelProvenance& provenance) {
  auto trajs = load_trajectories(provenance.input, provenance.layout);
  if (provenance.segment_len > 0) {
    trajs = segment_all(trajs, provenance.segment_len, provenance.segment_stride);
  }
  return trajs;
}

DecompositionModel rebuild_model(const ModelDocument& doc, std::vector<Trajectory> trajs) {
  auto weights = trajectory_weights(trajs, doc.provenance.rule);
  if (doc.rules_used.size() != weights.size()) {
    throw StaleModelError("model was fitted on " + std::to_string(doc.rules_used.size()) +
                          " trajectories, data yields " + std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (doc.rules_used[i] != to_string(weights[i].rule_used)) {
      throw StaleModelError("quadrature rule for trajectory " + std::to_string(i) +
                            " differs from the fitted model");
    }
  }
  auto shared = std::make_shared<const std::vector<Trajectory>>(std::move(trajs));
  return DecompositionModel(std::move(shared), std::move(weights), doc.kernel, doc.a, doc.eps,
                            doc.eps_hat, doc.eigenvalues, doc.V, doc.modes, doc.transpose);
}

DecompositionModel load_model(const std::filesystem::path& path) {
  const ModelDocument doc = read_model_document(path);
  verify_sources(doc.provenance);
  return rebuild_model(doc, load_training_data(doc.provenance));
}

}  // namespace ocdmd
