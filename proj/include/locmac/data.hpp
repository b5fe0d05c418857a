#ifndef LOCMAC_DATA_HPP
#define LOCMAC_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "locmac/gpr.hpp"

namespace locmac {

enum class SincConvention {
  Normalized,    // sin(pi z) / (pi z)
  Unnormalized,  // sin(z) / z
};

double sinc(double z, SincConvention convention = SincConvention::Normalized);

/// y = sinc(frequency * x) + eps, x ~ U[low, high], eps ~ N(0, noise_variance).
struct SincSpec {
  Index n_points = 50;
  double low = -1.5;
  double high = 1.5;
  double noise_variance = 0.01;
  double frequency = 5.0;
  SincConvention convention = SincConvention::Normalized;
};

Dataset generate_sinc(const SincSpec& spec, std::uint64_t seed);

/// Two-dimensional test surfaces on [-1, 1]^2 with Gaussian noise.
/// "ridges": sum of sinc ridges along three directions (high frequency).
/// "smooth": low-frequency trigonometric surface.
Dataset generate_surface(const std::string& name, Index n_points, double noise_variance,
                         std::uint64_t seed);

/// Noise-free value of a named 2-D surface.
double surface_value(const std::string& name, double x1, double x2);

struct Standardization {
  std::vector<std::string> columns;
  VectorXd mean;
  VectorXd scale;  // standard deviation, 1 for constant columns
};

struct CsvData {
  Dataset data;
  std::vector<std::string> input_columns;
  std::string target_column;
  std::optional<Standardization> standardization;  // input columns only
};

/// Headered comma-separated numeric file. The target is selected by column
/// name or by zero-based index; every other column is an input. With
/// `standardize`, inputs are shifted to zero mean and unit variance.
CsvData load_csv(const std::string& path, const std::variant<std::string, Index>& target,
                 bool standardize = false);

/// Writes inputs as x0..x{d-1} (or the given names) followed by the target column.
void write_csv(const std::string& path, const Dataset& data,
               const std::vector<std::string>& input_columns = {},
               const std::string& target_column = "y");

/// Random train/test split of the rows.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

}  // namespace locmac

#endif  // LOCMAC_DATA_HPP
