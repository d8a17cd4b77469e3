#pragma once

#include <span>

#include <Eigen/Dense>

namespace hsadapt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Householder thin QR of a tall matrix (rows >= cols); returns the rows x cols factor Q.
/// Q spans the column space of `a`; signs are whatever the reflections produce.
Matrix householder_thin_q(const Matrix& a);

/// Flips each column so that its largest-magnitude entry (first one on ties) is positive.
void normalize_column_signs(Matrix& q);

/// Ratio of smallest to largest singular value; 0 for an all-zero matrix.
double inverse_condition(const Matrix& a);

/// Pairwise (cascade) summation; fixed association order for a given length.
double pairwise_sum(std::span<const double> values);

}  // namespace hsadapt
