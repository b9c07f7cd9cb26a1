#include "depthcap/numerics/ops.hpp"

#include <cmath>

#include "depthcap/errors.hpp"

namespace depthcap::num {
namespace {

using Inputs = std::span<const Matrix* const>;
using Grads = std::span<Matrix* const>;

void accumulate(Matrix* dst, const Matrix& src) {
  if (dst == nullptr) return;
  for (std::size_t i = 0; i < dst->size(); ++i) dst->data()[i] += src.data()[i];
}

Tape& tape_of(Var a) {
  if (a.tape == nullptr) throw ArgumentError("Var not attached to a tape");
  return *a.tape;
}

Tape& tape_of(Var a, Var b) {
  if (a.tape != b.tape) throw ArgumentError("Vars belong to different tapes");
  return tape_of(a);
}

}  // namespace

Var matmul(Var a, Var b) {
  return tape_of(a, b).record(
      {a, b}, [](Inputs in) { return matmul(*in[0], *in[1]); },
      [](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        if (gin[0]) accumulate(gin[0], matmul_nt(g, *in[1]));
        if (gin[1]) accumulate(gin[1], matmul_tn(*in[0], g));
      });
}

Var matmul_nt(Var a, Var b) {
  return tape_of(a, b).record(
      {a, b}, [](Inputs in) { return matmul_nt(*in[0], *in[1]); },
      [](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        if (gin[0]) accumulate(gin[0], matmul(g, *in[1]));
        if (gin[1]) accumulate(gin[1], matmul_tn(g, *in[0]));
      });
}

Var transpose(Var a) {
  return tape_of(a).record(
      {a}, [](Inputs in) { return transpose(*in[0]); },
      [](Inputs, const Matrix&, const Matrix& g, Grads gin) { accumulate(gin[0], transpose(g)); });
}

Var add(Var a, Var b) {
  return tape_of(a, b).record(
      {a, b}, [](Inputs in) { return add(*in[0], *in[1]); },
      [](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        accumulate(gin[0], g);
        accumulate(gin[1], g);
      });
}

Var sub(Var a, Var b) {
  return tape_of(a, b).record(
      {a, b}, [](Inputs in) { return sub(*in[0], *in[1]); },
      [](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        accumulate(gin[0], g);
        if (gin[1]) accumulate(gin[1], scale(g, -1.0));
      });
}

Var hadamard(Var a, Var b) {
  return tape_of(a, b).record(
      {a, b}, [](Inputs in) { return hadamard(*in[0], *in[1]); },
      [](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        if (gin[0]) accumulate(gin[0], hadamard(g, *in[1]));
        if (gin[1]) accumulate(gin[1], hadamard(g, *in[0]));
      });
}

Var scale(Var a, double s) {
  return tape_of(a).record(
      {a}, [s](Inputs in) { return scale(*in[0], s); },
      [s](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        if (gin[0]) accumulate(gin[0], scale(g, s));
      });
}

Var add_row_broadcast(Var m, Var row) {
  return tape_of(m, row).record(
      {m, row}, [](Inputs in) { return add_row_broadcast(*in[0], *in[1]); },
      [](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        accumulate(gin[0], g);
        if (gin[1]) {
          for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) (*gin[1])(0, j) += g(i, j);
        }
      });
}

Var linear(Var x, Var w, std::optional<Var> bias) {
  if (x.cols() != w.rows()) {
    throw ShapeError("linear: input " + x.value().shape_string() + " does not match weight " +
                     w.value().shape_string());
  }
  Var out = matmul(x, w);
  return bias ? add_row_broadcast(out, *bias) : out;
}

Var softmax_rows(Var m) {
  return tape_of(m).record(
      {m}, [](Inputs in) { return softmax_rows(*in[0]); },
      [](Inputs, const Matrix& y, const Matrix& g, Grads gin) {
        if (gin[0]) accumulate(gin[0], softmax_rows_backward(y, g));
      });
}

Var softmax_rows(Var m, std::shared_ptr<const std::vector<std::uint8_t>> allowed) {
  if (!allowed) return softmax_rows(m);
  return tape_of(m).record(
      {m}, [allowed](Inputs in) { return softmax_rows(*in[0], *allowed); },
      [](Inputs, const Matrix& y, const Matrix& g, Grads gin) {
        // Masked entries have y == 0, so the unmasked formula already gives
        // them zero gradient.
        if (gin[0]) accumulate(gin[0], softmax_rows_backward(y, g));
      });
}

Var layer_norm_rows(Var x, Var gain, Var bias, double eps) {
  Tape& tape = tape_of(x, gain);
  tape_of(x, bias);
  return tape.record(
      {x, gain, bias}, [eps](Inputs in) { return layer_norm_rows(*in[0], *in[1], *in[2], eps); },
      [eps](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        const Matrix& xs = *in[0];
        const Matrix& gain_v = *in[1];
        const std::size_t n = xs.cols();
        const double nd = static_cast<double>(n);
        std::vector<double> xhat(n), dxhat(n);
        for (std::size_t i = 0; i < xs.rows(); ++i) {
          const auto r = xs.row(i);
          double mean = 0.0;
          for (double v : r) mean += v;
          mean /= nd;
          double var = 0.0;
          for (double v : r) var += (v - mean) * (v - mean);
          var /= nd;
          const double inv = 1.0 / std::sqrt(var + eps);
          double sum_d = 0.0;
          double sum_dx = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            xhat[j] = (r[j] - mean) * inv;
            dxhat[j] = g(i, j) * gain_v(0, j);
            sum_d += dxhat[j];
            sum_dx += dxhat[j] * xhat[j];
          }
          if (gin[0]) {
            for (std::size_t j = 0; j < n; ++j)
              (*gin[0])(i, j) += inv / nd * (nd * dxhat[j] - sum_d - xhat[j] * sum_dx);
          }
          if (gin[1]) {
            for (std::size_t j = 0; j < n; ++j) (*gin[1])(0, j) += g(i, j) * xhat[j];
          }
          if (gin[2]) {
            for (std::size_t j = 0; j < n; ++j) (*gin[2])(0, j) += g(i, j);
          }
        }
      });
}

Var l2_normalize_rows(Var x) {
  return tape_of(x).record(
      {x}, [](Inputs in) { return l2_normalize_rows(*in[0]); },
      [](Inputs in, const Matrix& y, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        const Matrix& xs = *in[0];
        for (std::size_t i = 0; i < xs.rows(); ++i) {
          double sq = 0.0;
          for (double v : xs.row(i)) sq += v * v;
          const double norm = std::sqrt(sq);
          if (norm < kL2NormFloor) {
            for (std::size_t j = 0; j < xs.cols(); ++j) (*gin[0])(i, j) += g(i, j);
            continue;
          }
          double dot = 0.0;
          for (std::size_t j = 0; j < xs.cols(); ++j) dot += y(i, j) * g(i, j);
          for (std::size_t j = 0; j < xs.cols(); ++j)
            (*gin[0])(i, j) += (g(i, j) - y(i, j) * dot) / norm;
        }
      });
}

Var gelu(Var x) {
  return tape_of(x).record(
      {x}, [](Inputs in) { return gelu(*in[0]); },
      [](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        for (std::size_t i = 0; i < g.size(); ++i)
          gin[0]->data()[i] += g.data()[i] * gelu_derivative(in[0]->data()[i]);
      });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ArgumentError("concat_rows: nothing to concatenate");
  Tape& tape = tape_of(parts.front());
  for (Var p : parts) {
    tape_of(parts.front(), p);
    if (p.cols() != parts.front().cols()) {
      throw ShapeError("concat_rows: widths " + parts.front().value().shape_string() + " and " +
                       p.value().shape_string());
    }
  }
  return tape.record(
      parts,
      [](Inputs in) {
        std::size_t rows = 0;
        for (const Matrix* m : in) rows += m->rows();
        const std::size_t cols = in.front()->cols();
        std::vector<double> data;
        data.reserve(rows * cols);
        for (const Matrix* m : in) data.insert(data.end(), m->data().begin(), m->data().end());
        return Matrix(rows, cols, std::move(data));
      },
      [](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          const std::size_t n = in[k]->size();
          if (gin[k]) {
            for (std::size_t i = 0; i < n; ++i) gin[k]->data()[i] += g.data()[offset + i];
          }
          offset += n;
        }
      });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ArgumentError("concat_cols: nothing to concatenate");
  Tape& tape = tape_of(parts.front());
  for (Var p : parts) {
    tape_of(parts.front(), p);
    if (p.rows() != parts.front().rows()) {
      throw ShapeError("concat_cols: heights " + parts.front().value().shape_string() + " and " +
                       p.value().shape_string());
    }
  }
  return tape.record(
      parts,
      [](Inputs in) {
        std::size_t cols = 0;
        for (const Matrix* m : in) cols += m->cols();
        Matrix out(in.front()->rows(), cols);
        std::size_t offset = 0;
        for (const Matrix* m : in) {
          for (std::size_t i = 0; i < m->rows(); ++i)
            for (std::size_t j = 0; j < m->cols(); ++j) out(i, offset + j) = (*m)(i, j);
          offset += m->cols();
        }
        return out;
      },
      [](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (gin[k]) {
            for (std::size_t i = 0; i < in[k]->rows(); ++i)
              for (std::size_t j = 0; j < in[k]->cols(); ++j) (*gin[k])(i, j) += g(i, offset + j);
          }
          offset += in[k]->cols();
        }
      });
}

Var slice_rows(Var x, std::size_t begin, std::size_t count) {
  if (begin + count > x.rows()) {
    throw ShapeError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of " + x.value().shape_string());
  }
  return tape_of(x).record(
      {x},
      [begin, count](Inputs in) {
        const Matrix& m = *in[0];
        const auto first = m.data().begin() + static_cast<std::ptrdiff_t>(begin * m.cols());
        return Matrix(count, m.cols(),
                      std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * m.cols())));
      },
      [begin](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        const std::size_t offset = begin * in[0]->cols();
        for (std::size_t i = 0; i < g.size(); ++i) gin[0]->data()[offset + i] += g.data()[i];
      });
}

Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  if (begin + count > x.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of " + x.value().shape_string());
  }
  return tape_of(x).record(
      {x},
      [begin, count](Inputs in) {
        const Matrix& m = *in[0];
        Matrix out(m.rows(), count);
        for (std::size_t i = 0; i < m.rows(); ++i)
          for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, begin + j);
        return out;
      },
      [begin](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) (*gin[0])(i, begin + j) += g(i, j);
      });
}

Var gather_rows(Var table, std::vector<std::size_t> indices) {
  for (std::size_t idx : indices) {
    if (idx >= table.rows()) {
      throw IndexError("gather_rows: index " + std::to_string(idx) + " out of " +
                       table.value().shape_string());
    }
  }
  auto shared = std::make_shared<const std::vector<std::size_t>>(std::move(indices));
  return tape_of(table).record(
      {table},
      [shared](Inputs in) {
        const Matrix& t = *in[0];
        Matrix out(shared->size(), t.cols());
        for (std::size_t i = 0; i < shared->size(); ++i) {
          const auto src = t.row((*shared)[i]);
          std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
      },
      [shared](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        for (std::size_t i = 0; i < shared->size(); ++i) {
          auto dst = gin[0]->row((*shared)[i]);
          const auto src = g.row(i);
          for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
        }
      });
}

Var cross_entropy(Var logits, std::vector<std::size_t> targets) {
  // Validate eagerly so errors surface at graph construction.
  (void)cross_entropy(logits.value(), targets);
  auto shared = std::make_shared<const std::vector<std::size_t>>(std::move(targets));
  return tape_of(logits).record(
      {logits},
      [shared](Inputs in) { return Matrix(1, 1, cross_entropy(*in[0], *shared)); },
      [shared](Inputs in, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        const Matrix p = softmax_rows(*in[0]);
        const double w = g(0, 0) / static_cast<double>(shared->size());
        for (std::size_t i = 0; i < p.rows(); ++i) {
          for (std::size_t j = 0; j < p.cols(); ++j) {
            const double onehot = j == (*shared)[i] ? 1.0 : 0.0;
            (*gin[0])(i, j) += w * (p(i, j) - onehot);
          }
        }
      });
}

Var sum(Var x) {
  return tape_of(x).record(
      {x},
      [](Inputs in) {
        double total = 0.0;
        for (double v : in[0]->data()) total += v;
        return Matrix(1, 1, total);
      },
      [](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        for (double& v : gin[0]->data()) v += g(0, 0);
      });
}

Var weighted_sum(Var x, Matrix weights) {
  if (weights.rows() != x.rows() || weights.cols() != x.cols()) {
    throw ShapeError("weighted_sum: weights " + weights.shape_string() + " vs " +
                     x.value().shape_string());
  }
  auto shared = std::make_shared<const Matrix>(std::move(weights));
  return tape_of(x).record(
      {x},
      [shared](Inputs in) {
        double total = 0.0;
        for (std::size_t i = 0; i < in[0]->size(); ++i) total += in[0]->data()[i] * shared->data()[i];
        return Matrix(1, 1, total);
      },
      [shared](Inputs, const Matrix&, const Matrix& g, Grads gin) {
        if (!gin[0]) return;
        for (std::size_t i = 0; i < gin[0]->size(); ++i) gin[0]->data()[i] += g(0, 0) * shared->data()[i];
      });
}

}  // namespace depthcap::num
