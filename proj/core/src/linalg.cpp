#include "hsadapt/linalg.hpp"

#include <cmath>
#include <vector>

#include "hsadapt/errors.hpp"

namespace hsadapt {

Matrix householder_thin_q(const Matrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m < n) throw DimensionError("householder_thin_q needs rows >= cols");

  Matrix work = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(static_cast<std::size_t>(n));

  for (Eigen::Index k = 0; k < n; ++k) {
    Vector v = work.block(k, k, m - k, 1);
    const double norm_x = v.norm();
    if (norm_x == 0.0) {
      // Zero column below the diagonal: identity reflector.
      reflectors.emplace_back(Vector::Zero(m - k));
      continue;
    }
    const double alpha = v(0) >= 0.0 ? -norm_x : norm_x;
    v(0) -= alpha;
    const double norm_v = v.norm();
    if (norm_v == 0.0) {
      reflectors.emplace_back(Vector::Zero(m - k));
      continue;
    }
    v /= norm_v;
    auto trailing = work.block(k, k, m - k, n - k);
    trailing.noalias() -= 2.0 * v * (v.transpose() * trailing);
    reflectors.push_back(std::move(v));
  }

  // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of the identity.
  Matrix q = Matrix::Identity(m, n);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const Vector& v = reflectors[static_cast<std::size_t>(k)];
    if (v.isZero(0.0)) continue;
    auto block = q.block(k, 0, m - k, n);
    block.noalias() -= 2.0 * v * (v.transpose() * block);
  }
  return q;
}

void normalize_column_signs(Matrix& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const double v = std::abs(q(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (q(best, j) < 0.0) q.col(j) *= -1.0;
  }
}

double inverse_condition(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double largest = s(0);
  if (!(largest > 0.0)) return 0.0;
  return s(s.size() - 1) / largest;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 2) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace hsadapt
