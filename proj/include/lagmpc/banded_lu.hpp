/*
 Copyright 2026 The lagmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace lagmpc
{

/// Raised when a pivot falls below the singularity threshold.
class SingularMatrixError : public std::runtime_error
{
public:
  SingularMatrixError(const std::string &what, int pivot_index)
      : std::runtime_error(what), pivot_index_(pivot_index)
  {
  }
  int pivot_index() const { return pivot_index_; }

private:
  int pivot_index_;
};

/// Square matrix with kl sub-diagonals and ku super-diagonals, stored row-wise
/// with kl extra super-diagonals reserved for pivoting fill-in.
class BandedMatrix
{
public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int i, int j) const { return j - i >= -kl_ && j - i <= ku_; }
  double &operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  /// Adds v at (i, j); throws std::out_of_range outside the band.
  void add(int i, int j, double v);
  double max_abs() const;
  Eigen::VectorXd multiply(const Eigen::VectorXd &v) const;
  Eigen::MatrixXd to_dense() const;

private:
  friend class BandedLu;
  std::size_t index(int i, int j) const
  {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(j - i + kl_);
  }

  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  int width_ = 0; // 2*kl + ku + 1
  std::vector<double> data_;
};

/**
 * Gaussian elimination with partial pivoting restricted to the band, in the
 * style of LAPACK xGBTF2. Cost is O(n (kl + ku) kl) for factorization and
 * O(n (2 kl + ku)) per solve.
 *
 * A pivot with magnitude below pivot_tol * max|A| raises SingularMatrixError.
 */
class BandedLu
{
public:
  explicit BandedLu(BandedMatrix a, double pivot_tol = 1e-12);

  int size() const { return lu_.n_; }
  Eigen::VectorXd solve(const Eigen::VectorXd &b) const;

private:
  BandedMatrix lu_;
  std::vector<int> pivots_;
};

} // namespace lagmpc
