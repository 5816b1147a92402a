#include "ocdmd/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "ocdmd/error.hpp"

namespace ocdmd {

namespace fs = std::filesystem;

Trajectory::Trajectory(Eigen::VectorXd times, Eigen::MatrixXd states)
    : times_(std::move(times)), states_(std::move(states)) {
  if (times_.size() < 2) {
    throw InvalidInput("trajectory needs at least 2 samples, got " +
                       std::to_string(times_.size()));
  }
  if (states_.rows() != times_.size()) {
    throw InvalidInput("trajectory has " + std::to_string(times_.size()) +
                       " times but " + std::to_string(states_.rows()) + " states");
  }
  if (states_.cols() < 1) throw InvalidInput("trajectory states must have dimension >= 1");
  for (Eigen::Index k = 0; k + 1 < times_.size(); ++k) {
    if (!(times_[k + 1] > times_[k])) {
      throw InvalidInput("trajectory times must be strictly increasing (sample " +
                         std::to_string(k + 1) + ")");
    }
  }
  if (!times_.allFinite() || !states_.allFinite()) {
    throw InvalidInput("trajectory contains non-finite values");
  }
}

Trajectory Trajectory::rebased() const {
  Eigen::VectorXd t = times_.array() - times_[0];
  return Trajectory(std::move(t), states_);
}

std::string_view to_string(InputLayout layout) {
  switch (layout) {
    case InputLayout::OneFilePerTrajectory:
      return "files";
    case InputLayout::SingleFileWithId:
      return "single";
  }
  return "unknown";
}

InputLayout input_layout_from_string(std::string_view name) {
  if (name == "files") return InputLayout::OneFilePerTrajectory;
  if (name == "single") return InputLayout::SingleFileWithId;
  throw InvalidInput("unknown input layout '" + std::string(name) +
                     "' (expected files or single)");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    cells.push_back(trim(line.substr(begin, comma - begin)));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return cells;
}

template <typename T>
std::optional<T> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    return std::nullopt;
  }
  return value;
}

struct Rows {
  std::vector<double> times;
  std::vector<double> values;  // row-major samples x dim
  std::vector<std::size_t> lines;
};

Trajectory finish(const std::string& file, const Rows& rows, Eigen::Index dim) {
  const auto count = static_cast<Eigen::Index>(rows.times.size());
  if (count < 2) {
    const std::size_t line = rows.lines.empty() ? 1 : rows.lines.back();
    throw ParseError(file, line,
                     "trajectory has " + std::to_string(count) +
                         " sample(s); at least 2 are required");
  }
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(rows.times.data(), count);
  Eigen::MatrixXd x =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          rows.values.data(), count, dim);
  return Trajectory(std::move(t), std::move(x)).rebased();
}

void append_row(const std::string& file, std::size_t line_no,
                const std::vector<std::string_view>& cells, std::size_t first,
                Rows& rows) {
  const auto t = parse_number<double>(cells[first]);
  if (!t || !std::isfinite(*t)) {
    throw ParseError(file, line_no, "non-numeric time '" + std::string(cells[first]) + "'");
  }
  if (!rows.times.empty() && !(*t > rows.times.back())) {
    throw ParseError(file, line_no, "non-increasing time");
  }
  rows.times.push_back(*t);
  for (std::size_t c = first + 1; c < cells.size(); ++c) {
    const auto v = parse_number<double>(cells[c]);
    if (!v || !std::isfinite(*v)) {
      throw ParseError(file, line_no,
                       "non-numeric value '" + std::string(cells[c]) + "' in column " +
                           std::to_string(c + 1));
    }
    rows.values.push_back(*v);
  }
  rows.lines.push_back(line_no);
}

std::vector<Trajectory> parse_file(const fs::path& path, bool with_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file " + path.string());
  const std::string file = path.string();

  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  const std::size_t leading = with_id ? 2 : 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError(file, line_no == 0 ? 1 : line_no, "missing header");
  {
    const auto header = split(line);
    columns = header.size();
    const bool ok = with_id ? (columns >= 3 && header[0] == "traj_id" && header[1] == "t")
                            : (columns >= 2 && header[0] == "t");
    if (!ok) {
      throw ParseError(file, line_no,
                       with_id ? "header must be traj_id,t,x1,...,xn"
                               : "header must be t,x1,...,xn");
    }
  }
  const auto dim = static_cast<Eigen::Index>(columns - leading);

  std::vector<Trajectory> out;
  std::vector<long long> seen_ids;
  std::optional<long long> current_id;
  Rows rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns) {
      throw ParseError(file, line_no,
                       "expected " + std::to_string(columns) + " columns, found " +
                           std::to_string(cells.size()));
    }
    if (with_id) {
      const auto id = parse_number<long long>(cells[0]);
      if (!id) throw ParseError(file, line_no, "non-integer traj_id '" + std::string(cells[0]) + "'");
      if (!current_id || *id != *current_id) {
        if (std::find(seen_ids.begin(), seen_ids.end(), *id) != seen_ids.end()) {
          throw ParseError(file, line_no,
                           "rows of traj_id " + std::to_string(*id) + " are not contiguous");
        }
        if (current_id) {
          out.push_back(finish(file, rows, dim));
          rows = Rows{};
        }
        seen_ids.push_back(*id);
        current_id = *id;
      }
    }
    append_row(file, line_no, cells, leading - 1, rows);
  }

  if (!with_id || current_id) out.push_back(finish(file, rows, dim));
  return out;
}

void write_number(std::ostream& os, double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  os.write(buf, res.ptr - buf);
}

}  // namespace

std::vector<fs::path> trajectory_files(const fs::path& path, InputLayout layout) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError("input path does not exist: " + path.string());
  if (!fs::is_directory(path, ec)) return {path};
  if (layout == InputLayout::SingleFileWithId) {
    throw InvalidInput("single-file layout expects a file, got directory " + path.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

std::vector<Trajectory> load_trajectories(const fs::path& path, InputLayout layout) {
  std::vector<Trajectory> out;
  const bool with_id = layout == InputLayout::SingleFileWithId;
  for (const auto& file : trajectory_files(path, layout)) {
    auto trajs = parse_file(file, with_id);
    for (auto& t : trajs) {
      if (!out.empty() && t.dim() != out.front().dim()) {
        throw ParseError(file.string() + ": state dimension " + std::to_string(t.dim()) +
                         " differs from earlier trajectories (" +
                         std::to_string(out.front().dim()) + ")");
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (Eigen::Index c = 0; c < traj.dim(); ++c) out << ",x" << (c + 1);
  out << '\n';
  for (Eigen::Index r = 0; r < traj.samples(); ++r) {
    write_number(out, traj.times()[r]);
    for (Eigen::Index c = 0; c < traj.dim(); ++c) {
      out << ',';
      write_number(out, traj.states()(r, c));
    }
    out << '\n';
  }
}

void save_trajectory(const fs::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trajectory file " + path.string());
  write_trajectory_csv(out, traj);
  if (!out) throw IoError("failed writing trajectory file " + path.string());
}

std::vector<Trajectory> segment(const Trajectory& traj, Eigen::Index samples_per_segment,
                                Eigen::Index stride) {
  const Eigen::Index L = samples_per_segment;
  if (L < 2) throw InvalidInput("segment length must be >= 2, got " + std::to_string(L));
  if (stride == 0) stride = L;
  if (stride < 1) throw InvalidInput("segment stride must be >= 1, got " + std::to_string(stride));
  const Eigen::Index N = traj.samples();
  if (N < L) {
    throw InvalidInput("trajectory has " + std::to_string(N) + " samples, fewer than segment length " +
                       std::to_string(L));
  }

  auto window = [&](Eigen::Index begin, Eigen::Index count) {
    return Trajectory(traj.times().segment(begin, count), traj.states().middleRows(begin, count))
        .rebased();
  };

  std::vector<Trajectory> out;
  Eigen::Index begin = 0;
  Eigen::Index covered = 0;
  for (; begin + L <= N; begin += stride) {
    out.push_back(window(begin, L));
    covered = begin + L;
  }
  if (covered < N && N - begin >= 2) out.push_back(window(begin, N - begin));
  return out;
}

std::vector<Trajectory> segment_all(const std::vector<Trajectory>& trajs,
                                    Eigen::Index samples_per_segment, Eigen::Index stride) {
  std::vector<Trajectory> out;
  for (const auto& t : trajs) {
    auto pieces = segment(t, samples_per_segment, stride);
    std::move(pieces.begin(), pieces.end(), std::back_inserter(out));
  }
  return out;
}

Eigen::Index dimension(const VectorFieldSpec& field) {
  return std::visit(
      [](const auto& f) -> Eigen::Index {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, LinearSystem>) {
          return f.A.rows();
        } else if constexpr (std::is_same_v<F, VanDerPol>) {
          return 2;
        } else {
          return f.dim;
        }
      },
      field);
}

Eigen::VectorXd evaluate(const VectorFieldSpec& field, const Eigen::VectorXd& x) {
  return std::visit(
      [&x](const auto& f) -> Eigen::VectorXd {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, LinearSystem>) {
          return f.A * x;
        } else if constexpr (std::is_same_v<F, VanDerPol>) {
          Eigen::VectorXd dx(2);
          dx << x[1], f.mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
          return dx;
        } else {
          return f.rhs(x);
        }
      },
      field);
}

namespace {

void validate_field(const VectorFieldSpec& field) {
  if (const auto* lin = std::get_if<LinearSystem>(&field)) {
    if (lin->A.rows() != lin->A.cols() || lin->A.rows() < 1) {
      throw InvalidInput("linear system matrix must be square and non-empty");
    }
  } else if (const auto* custom = std::get_if<CustomField>(&field)) {
    if (custom->dim < 1 || !custom->rhs) {
      throw InvalidInput("custom vector field needs dim >= 1 and a right-hand side");
    }
  }
}

Eigen::VectorXd rk4_step(const VectorFieldSpec& field, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = evaluate(field, x);
  const Eigen::VectorXd k2 = evaluate(field, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = evaluate(field, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = evaluate(field, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory simulate(const VectorFieldSpec& field, const Eigen::VectorXd& x0, double T,
                    double dt) {
  validate_field(field);
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("simulation horizon T must be positive");
  if (!(dt > 0.0) || !(dt <= T)) throw InvalidInput("time step must satisfy 0 < dt <= T");
  if (x0.size() != dimension(field)) {
    throw InvalidInput("initial condition has dimension " + std::to_string(x0.size()) +
                       ", field expects " + std::to_string(dimension(field)));
  }

  constexpr double kSnap = 1e-9;
  const auto full_steps = static_cast<Eigen::Index>(std::floor(T / dt + kSnap));
  const bool tail = T - static_cast<double>(full_steps) * dt > kSnap * dt;
  const Eigen::Index samples = full_steps + 1 + (tail ? 1 : 0);

  Eigen::VectorXd times(samples);
  Eigen::MatrixXd states(samples, x0.size());
  Eigen::VectorXd x = x0;
  times[0] = 0.0;
  states.row(0) = x.transpose();

  auto advance = [&](Eigen::Index k, double h, double t) {
    x = rk4_step(field, x, h);
    if (!x.allFinite()) {
      std::ostringstream msg;
      msg << "simulation diverged: non-finite state at t = " << t;
      throw DivergenceError(t, msg.str());
    }
    times[k] = t;
    states.row(k) = x.transpose();
  };

  for (Eigen::Index k = 1; k <= full_steps; ++k) {
    advance(k, dt, static_cast<double>(k) * dt);
  }
  if (tail) {
    advance(samples - 1, T - times[full_steps], T);
  } else {
    times[samples - 1] = T;
  }
  return Trajectory(std::move(times), std::move(states));
}

}  // namespace ocdmd
