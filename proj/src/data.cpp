#include "locmac/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "locmac/error.hpp"
#include "locmac/random.hpp"

namespace locmac {

double sinc(double z, SincConvention convention) {
  const double arg = convention == SincConvention::Normalized ? std::numbers::pi * z : z;
  if (arg == 0.0) return 1.0;
  return std::sin(arg) / arg;
}

Dataset generate_sinc(const SincSpec& spec, std::uint64_t seed) {
  if (spec.n_points < 1) throw InputError("generate_sinc: n_points must be >= 1");
  if (!(spec.high > spec.low)) throw InputError("generate_sinc: empty interval");
  if (!(spec.noise_variance >= 0.0)) throw InputError("generate_sinc: negative noise variance");
  Rng x_rng = child_rng(seed, {0x73696e63ULL, 0});
  Rng e_rng = child_rng(seed, {0x73696e63ULL, 1});
  std::uniform_real_distribution<double> uniform(spec.low, spec.high);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(spec.noise_variance);

  Dataset out{MatrixXd(spec.n_points, 1), VectorXd(spec.n_points)};
  for (Index i = 0; i < spec.n_points; ++i) {
    const double x = uniform(x_rng);
    out.inputs(i, 0) = x;
    out.targets[i] = sinc(spec.frequency * x, spec.convention) + noise_sd * normal(e_rng);
  }
  return out;
}

double surface_value(const std::string& name, double x1, double x2) {
  if (name == "ridges") {
    constexpr double kFreq = 4.0;
    constexpr double kAngles[] = {0.0, std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0};
    constexpr double kOffsets[] = {0.3, -0.2, 0.1};
    double y = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double t = std::cos(kAngles[k]) * x1 + std::sin(kAngles[k]) * x2 - kOffsets[k];
      y += sinc(kFreq * t);
    }
    return y;
  }
  if (name == "smooth") {
    return std::sin(1.5 * x1) + 0.5 * std::cos(x2) + 0.3 * x1 * x2;
  }
  throw InputError("unknown surface '" + name + "' (expected ridges or smooth)");
}

Dataset generate_surface(const std::string& name, Index n_points, double noise_variance,
                         std::uint64_t seed) {
  if (n_points < 1) throw InputError("generate_surface: n_points must be >= 1");
  surface_value(name, 0.0, 0.0);  // validates the name
  Rng x_rng = child_rng(seed, {0x73757266ULL, 0});
  Rng e_rng = child_rng(seed, {0x73757266ULL, 1});
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(noise_variance);
  Dataset out{MatrixXd(n_points, 2), VectorXd(n_points)};
  for (Index i = 0; i < n_points; ++i) {
    const double x1 = uniform(x_rng);
    const double x2 = uniform(x_rng);
    out.inputs(i, 0) = x1;
    out.inputs(i, 1) = x2;
    out.targets[i] = surface_value(name, x1, x2) + noise_sd * normal(e_rng);
  }
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

CsvData load_csv(const std::string& path, const std::variant<std::string, Index>& target,
                 bool standardize) {
  std::ifstream in(path);
  if (!in) throw InputError("load_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("load_csv: '" + path + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  Index target_idx = -1;
  if (const auto* name = std::get_if<std::string>(&target)) {
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw InputError("load_csv: no column named '" + *name + "' in " + path);
    target_idx = it - header.begin();
  } else {
    target_idx = std::get<Index>(target);
    if (target_idx < 0 || target_idx >= static_cast<Index>(header.size())) {
      throw InputError("load_csv: target column index " + std::to_string(target_idx) +
                       " out of range for " + std::to_string(header.size()) + " columns");
    }
  }
  if (header.size() < 2) throw InputError("load_csv: need at least one input and one target column");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw InputError("load_csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), row[c]);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(row[c])) {
        throw InputError("load_csv: non-numeric value '" + cell + "' at line " +
                         std::to_string(line_no) + ", column '" + header[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("load_csv: no data rows in " + path);

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(header.size()) - 1;
  CsvData out;
  out.target_column = header[static_cast<std::size_t>(target_idx)];
  out.data.inputs.resize(n, d);
  out.data.targets.resize(n);
  for (Index c = 0, k = 0; c < static_cast<Index>(header.size()); ++c) {
    if (c == target_idx) continue;
    out.input_columns.push_back(header[static_cast<std::size_t>(c)]);
    for (Index r = 0; r < n; ++r) out.data.inputs(r, k) = rows[r][c];
    ++k;
  }
  for (Index r = 0; r < n; ++r) out.data.targets[r] = rows[r][target_idx];

  if (standardize) {
    Standardization s;
    s.columns = out.input_columns;
    s.mean = out.data.inputs.colwise().mean().transpose();
    s.scale.resize(d);
    for (Index k = 0; k < d; ++k) {
      const double var = (out.data.inputs.col(k).array() - s.mean[k]).square().mean();
      s.scale[k] = var > 0.0 ? std::sqrt(var) : 1.0;
      out.data.inputs.col(k) = (out.data.inputs.col(k).array() - s.mean[k]) / s.scale[k];
    }
    out.standardization = std::move(s);
  }
  return out;
}

void write_csv(const std::string& path, const Dataset& data,
               const std::vector<std::string>& input_columns, const std::string& target_column) {
  data.validate();
  if (!input_columns.empty() && static_cast<Index>(input_columns.size()) != data.dim()) {
    throw InputError("write_csv: column name count does not match input dimension");
  }
  std::ofstream out(path);
  if (!out) throw InputError("write_csv: cannot open '" + path + "' for writing");
  for (Index k = 0; k < data.dim(); ++k) {
    out << (input_columns.empty() ? "x" + std::to_string(k) : input_columns[k]) << ',';
  }
  out << target_column << '\n';
  for (Index r = 0; r < data.size(); ++r) {
    for (Index k = 0; k < data.dim(); ++k) out << format_double(data.inputs(r, k)) << ',';
    out << format_double(data.targets[r]) << '\n';
  }
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
  data.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("split_dataset: train_fraction must lie in (0, 1)");
  }
  if (data.size() < 2) throw InputError("split_dataset: need at least 2 rows to split");
  std::vector<Index> rows(static_cast<std::size_t>(data.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  Rng rng = child_rng(seed, {0x73706c6974ULL});
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::clamp<double>(std::round(train_fraction * static_cast<double>(rows.size())), 1.0,
                         static_cast<double>(rows.size()) - 1.0));
  std::vector<Index> tr(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Index> te(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  Dataset train{data.inputs(tr, Eigen::all), data.targets(tr)};
  Dataset test{data.inputs(te, Eigen::all), data.targets(te)};
  return {std::move(train), std::move(test)};
}

}  // namespace locmac
