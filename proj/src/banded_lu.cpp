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

#include "lagmpc/banded_lu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lagmpc
{

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku)
{
  if (n < 0 || kl < 0 || ku < 0)
  {
    throw std::invalid_argument("invalid banded matrix shape");
  }
  width_ = 2 * kl + ku + 1;
  data_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(width_), 0.0);
}

void BandedMatrix::add(int i, int j, double v)
{
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || !in_band(i, j))
  {
    throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside band");
  }
  data_[index(i, j)] += v;
}

double BandedMatrix::max_abs() const
{
  double m = 0.0;
  for (double v : data_)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd &v) const
{
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i)
  {
    const int j0 = std::max(0, i - kl_);
    const int j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (int j = j0; j <= j1; ++j)
    {
      s += (*this)(i, j) * v(j);
    }
    out(i) = s;
  }
  return out;
}

Eigen::MatrixXd BandedMatrix::to_dense() const
{
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
  {
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
    {
      out(i, j) = (*this)(i, j);
    }
  }
  return out;
}

BandedLu::BandedLu(BandedMatrix a, double pivot_tol) : lu_(std::move(a))
{
  const int n = lu_.n_;
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_; // upper bandwidth of U
  const double threshold = pivot_tol * lu_.max_abs();
  pivots_.resize(static_cast<std::size_t>(n));

  for (int c = 0; c < n; ++c)
  {
    const int last_row = std::min(n - 1, c + kl);
    int p = c;
    double best = std::abs(lu_(c, c));
    for (int r = c + 1; r <= last_row; ++r)
    {
      const double v = std::abs(lu_(r, c));
      if (v > best)
      {
        best = v;
        p = r;
      }
    }
    pivots_[static_cast<std::size_t>(c)] = p;
    if (!(best > threshold))
    {
      throw SingularMatrixError("pivot " + std::to_string(c) + " below singularity threshold", c);
    }
    const int last_col = std::min(n - 1, c + kv);
    if (p != c)
    {
      for (int j = c; j <= last_col; ++j)
      {
        std::swap(lu_(c, j), lu_(p, j));
      }
    }
    const double pivot = lu_(c, c);
    for (int r = c + 1; r <= last_row; ++r)
    {
      double &l = lu_(r, c);
      if (l == 0.0)
      {
        continue;
      }
      l /= pivot;
      for (int j = c + 1; j <= last_col; ++j)
      {
        lu_(r, j) -= l * lu_(c, j);
      }
    }
  }
}

Eigen::VectorXd BandedLu::solve(const Eigen::VectorXd &b) const
{
  const int n = lu_.n_;
  if (b.size() != n)
  {
    throw std::invalid_argument("right-hand side size mismatch");
  }
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_;
  Eigen::VectorXd x = b;
  for (int c = 0; c < n; ++c)
  {
    const int p = pivots_[static_cast<std::size_t>(c)];
    if (p != c)
    {
      std::swap(x(c), x(p));
    }
    const double xc = x(c);
    if (xc == 0.0)
    {
      continue;
    }
    for (int r = c + 1; r <= std::min(n - 1, c + kl); ++r)
    {
      x(r) -= lu_(r, c) * xc;
    }
  }
  for (int c = n - 1; c >= 0; --c)
  {
    double s = x(c);
    for (int j = c + 1; j <= std::min(n - 1, c + kv); ++j)
    {
      s -= lu_(c, j) * x(j);
    }
    x(c) = s / lu_(c, c);
  }
  return x;
}

} // namespace lagmpc
