#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "depthcap/numerics/matrix.hpp"

// Value-level kernels. These are pure functions over Matrix; the tape ops in
// ops.hpp call them for their forward passes so both paths share arithmetic.
namespace depthcap::num {

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kL2NormFloor = 1e-12;

Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix add_row_broadcast(const Matrix& m, const Matrix& row);

Matrix linear(const Matrix& x, const Matrix& w, const std::optional<Matrix>& bias = std::nullopt);

// Row-wise softmax with max subtraction. `allowed`, when given, has one byte
// per element; disallowed entries get probability exactly zero. Every row
// must keep at least one allowed entry.
Matrix softmax_rows(const Matrix& m);
Matrix softmax_rows(const Matrix& m, std::span<const std::uint8_t> allowed);
// Backward of softmax given its output y and upstream gradient g.
Matrix softmax_rows_backward(const Matrix& y, const Matrix& g);

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gain,
                               std::span<const double> bias, double eps = kLayerNormEps);
Matrix layer_norm_rows(const Matrix& x, const Matrix& gain, const Matrix& bias,
                       double eps = kLayerNormEps);

std::vector<double> l2_normalize(std::span<const double> x);
Matrix l2_normalize_rows(const Matrix& x);

double gelu(double x);
double gelu_derivative(double x);
Matrix gelu(const Matrix& x);

Matrix log_softmax_rows(const Matrix& m);
// Mean over rows of -log softmax(logits)[target].
double cross_entropy(const Matrix& logits, std::span<const std::size_t> targets);

}  // namespace depthcap::num
