#include "cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <vector>

namespace ocdmd::cli {

namespace {

double parse_double(std::string_view cell, std::string_view what) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw UsageError("invalid number '" + std::string(cell) + "' in " + std::string(what));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(sep, begin);
    out.push_back(text.substr(begin, pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(kernel.mu > 0.0) || !std::isfinite(kernel.mu)) throw UsageError("--mu must be positive");
  if (!(a > 0.0 && a <= 1.0)) throw UsageError("--scale-a must lie in (0, 1]");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw UsageError("--eps must be >= 0");
  if (segment_len != 0 && segment_len < 2) throw UsageError("--segment-len must be >= 2");
  if (segment_stride < 0) throw UsageError("--segment-stride must be >= 1");
  if (segment_stride > 0 && segment_len == 0) {
    throw UsageError("--segment-stride requires --segment-len");
  }
  if (threads < 0) throw UsageError("--threads must be >= 0");
  if (order == ModeOrder::Energy && !x0) throw UsageError("--order energy requires --x0");
}

Eigen::VectorXd parse_point(std::string_view text) {
  const auto cells = split(text, ',');
  Eigen::VectorXd x(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = parse_double(cells[i], "point");
  }
  return x;
}

Eigen::VectorXd parse_time_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double start = parse_double(parts[0], "time grid");
    const double stop = parse_double(parts[1], "time grid");
    const double count = parse_double(parts[2], "time grid");
    if (count < 2 || count != std::floor(count) || !(stop > start)) {
      throw UsageError("time grid 'start:stop:count' needs stop > start and integer count >= 2");
    }
    return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(count), start, stop);
  }
  if (parts.size() != 1) throw UsageError("time grid must be start:stop:count or t0,t1,...");
  return parse_point(text);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace ocdmd::cli
