#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arspo {

inline constexpr double kDefaultSigmaFloor = 1e-8;

/// Row-major dense matrix, just enough for G x G Jacobians.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Group-relative z-scores of G rewards under the population standard
/// deviation. A group whose sigma falls below the floor is degenerate: all of
/// its advantages are zero and it carries no learning signal.
struct NormalizedGroup {
  std::vector<double> raw;
  std::vector<double> advantages;
  double mu = 0.0;
  double sigma = 0.0;
  bool degenerate = false;

  std::size_t size() const noexcept { return raw.size(); }
};

NormalizedGroup normalize_group(std::span<const double> rewards, double sigma_floor = kDefaultSigmaFloor);

/// J[i][j] = dA_hat_i / dA_j. Diagonal (1/(G sigma)) [(G-1) - A_hat_i^2],
/// off-diagonal -(1/(G sigma)) [1 + A_hat_i A_hat_j]. Throws SingularityError
/// on a degenerate group.
Matrix advantage_jacobian(const NormalizedGroup& group);

/// dA_hat/dtheta = J * A' assembled as Self-Term plus Cross-Term, without
/// materializing J.
std::vector<double> directional_advantage_derivative(const NormalizedGroup& group,
                                                     std::span<const double> reward_grads);

}  // namespace arspo
