#include "depthcap/numerics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "depthcap/errors.hpp"

namespace depthcap::num {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes " + a.shape_string() + " and " +
                     b.shape_string() + " differ");
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + a.shape_string() + " by " + b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  const std::size_t n = a.cols();
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i).data();
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* b_row = b.row(k).data();
      for (std::size_t j = 0; j < m; ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: cannot multiply " + a.shape_string() + " by transpose of " +
                     b.shape_string());
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto br = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < ar.size(); ++k) acc += ar[k] * br[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: cannot multiply transpose of " + a.shape_string() + " by " +
                     b.shape_string());
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto ar = a.row(k);
    const auto br = b.row(k);
    for (std::size_t i = 0; i < ar.size(); ++i) {
      const double aki = ar[i];
      if (aki == 0.0) continue;
      double* out_row = out.row(i).data();
      for (std::size_t j = 0; j < br.size(); ++j) out_row[j] += aki * br[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

Matrix add_row_broadcast(const Matrix& m, const Matrix& row) {
  if (row.rows() != 1 || row.cols() != m.cols()) {
    throw ShapeError("add_row_broadcast: row " + row.shape_string() + " does not fit " +
                     m.shape_string());
  }
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += row(0, j);
  }
  return out;
}

Matrix linear(const Matrix& x, const Matrix& w, const std::optional<Matrix>& bias) {
  if (x.cols() != w.rows()) {
    throw ShapeError("linear: input " + x.shape_string() + " does not match weight " +
                     w.shape_string());
  }
  Matrix out = matmul(x, w);
  if (bias) out = add_row_broadcast(out, *bias);
  return out;
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto in = m.row(i);
    auto o = out.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (double& v : o) v /= total;
  }
  return out;
}

Matrix softmax_rows(const Matrix& m, std::span<const std::uint8_t> allowed) {
  if (allowed.size() != m.size()) {
    throw ShapeError("softmax_rows: mask length " + std::to_string(allowed.size()) +
                     " does not match " + m.shape_string());
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto in = m.row(i);
    auto o = out.row(i);
    const std::uint8_t* ok = allowed.data() + i * m.cols();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < in.size(); ++j)
      if (ok[j]) mx = std::max(mx, in[j]);
    if (!std::isfinite(mx)) throw ArgumentError("softmax_rows: row " + std::to_string(i) + " is fully masked");
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = ok[j] ? std::exp(in[j] - mx) : 0.0;
      total += o[j];
    }
    for (double& v : o) v /= total;
  }
  return out;
}

Matrix softmax_rows_backward(const Matrix& y, const Matrix& g) {
  require_same_shape(y, g, "softmax_rows_backward");
  Matrix out(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yr = y.row(i);
    const auto gr = g.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < yr.size(); ++j) dot += yr[j] * gr[j];
    auto o = out.row(i);
    for (std::size_t j = 0; j < yr.size(); ++j) o[j] = yr[j] * (gr[j] - dot);
  }
  return out;
}

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gain,
                               std::span<const double> bias, double eps) {
  if (x.size() != gain.size() || x.size() != bias.size()) {
    throw ShapeError("layer_norm: lengths " + std::to_string(x.size()) + ", " +
                     std::to_string(gain.size()) + ", " + std::to_string(bias.size()));
  }
  if (!(eps > 0.0)) throw ArgumentError("layer_norm: eps must be positive");
  if (x.empty()) return {};
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + eps);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * inv_std * gain[i] + bias[i];
  return out;
}

Matrix layer_norm_rows(const Matrix& x, const Matrix& gain, const Matrix& bias, double eps) {
  if (gain.rows() != 1 || bias.rows() != 1 || gain.cols() != x.cols() || bias.cols() != x.cols()) {
    throw ShapeError("layer_norm_rows: gain " + gain.shape_string() + " / bias " +
                     bias.shape_string() + " do not fit " + x.shape_string());
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = layer_norm(x.row(i), gain.row(0), bias.row(0), eps);
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> l2_normalize(std::span<const double> x) {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  const double norm = std::sqrt(sq);
  std::vector<double> out(x.begin(), x.end());
  if (norm < kL2NormFloor) return out;
  for (double& v : out) v /= norm;
  return out;
}

Matrix l2_normalize_rows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = l2_normalize(x.row(i));
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Matrix gelu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.data()) v = gelu(v);
  return out;
}

Matrix log_softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto in = m.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (double v : in) total += std::exp(v - mx);
    const double lse = mx + std::log(total);
    auto o = out.row(i);
    for (std::size_t j = 0; j < in.size(); ++j) o[j] = in[j] - lse;
  }
  return out;
}

double cross_entropy(const Matrix& logits, std::span<const std::size_t> targets) {
  if (targets.size() != logits.rows()) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for " +
                     logits.shape_string() + " logits");
  }
  if (logits.rows() == 0) throw ArgumentError("cross_entropy: no rows");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= logits.cols()) {
      throw IndexError("cross_entropy: target " + std::to_string(targets[i]) + " at row " +
                       std::to_string(i) + " out of range for width " +
                       std::to_string(logits.cols()));
    }
  }
  const Matrix logp = log_softmax_rows(logits);
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) total -= logp(i, targets[i]);
  return total / static_cast<double>(targets.size());
}

}  // namespace depthcap::num
