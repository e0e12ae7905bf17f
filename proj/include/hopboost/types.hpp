#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>

#include "hopboost/error.hpp"

namespace hopboost {

// Tolerance on |‖x‖ - 1| for a column to count as unit-norm.
inline constexpr double kUnitNormTol = 1e-6;

struct HopfieldConfig {
  double beta = 4.0;             // inverse temperature
  bool normalize_inputs = true;  // require unit-norm patterns and queries

  void validate() const;
};

// Similarity used inside lse: dot product (patterns on the sphere) or
// negative half squared Euclidean distance.
enum class Geometry { kSphere, kEuclidean };

const char* geometry_name(Geometry g) noexcept;
Geometry parse_geometry(const std::string& name);

// d x N matrix, one stored pattern per column.
class PatternMemory {
 public:
  // Throws kZeroDim/kEmptyInput/kNonFinite; with normalized=true every column
  // must be unit-norm within kUnitNormTol (kNotNormalized otherwise).
  explicit PatternMemory(Eigen::MatrixXd data, bool normalized = false);

  // Sets the normalized flag iff every column is unit-norm.
  static PatternMemory detect(Eigen::MatrixXd data);

  Eigen::Index dim() const noexcept { return data_.rows(); }
  Eigen::Index count() const noexcept { return data_.cols(); }
  bool normalized() const noexcept { return normalized_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Eigen::MatrixXd::ConstColXpr column(Eigen::Index i) const { return data_.col(i); }

  // M = max_i ‖x_i‖
  double max_norm() const;

  // Concatenation (X‖O); normalized iff both are.
  static PatternMemory concat(const PatternMemory& a, const PatternMemory& b);

  // Columns selected by index (repeats allowed).
  PatternMemory select(std::span<const std::size_t> idx) const;

 private:
  Eigen::MatrixXd data_;
  bool normalized_ = false;
};

// Queries share the memory representation: d x n, one query per column.
using QueryBatch = PatternMemory;

bool is_unit_column(const Eigen::Ref<const Eigen::VectorXd>& v) noexcept;
bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) noexcept;

}  // namespace hopboost
