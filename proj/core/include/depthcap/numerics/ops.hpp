#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "depthcap/numerics/kernels.hpp"
#include "depthcap/numerics/tape.hpp"

// Differentiable operations recorded on a Tape. Forward values come from the
// kernels in kernels.hpp.
namespace depthcap::num {

Var matmul(Var a, Var b);
Var matmul_nt(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
Var add_row_broadcast(Var m, Var row);
Var linear(Var x, Var w, std::optional<Var> bias = std::nullopt);

Var softmax_rows(Var m);
// Entries whose mask byte is zero get probability exactly zero.
Var softmax_rows(Var m, std::shared_ptr<const std::vector<std::uint8_t>> allowed);
Var layer_norm_rows(Var x, Var gain, Var bias, double eps = kLayerNormEps);
Var l2_normalize_rows(Var x);
Var gelu(Var x);

Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
Var slice_rows(Var x, std::size_t begin, std::size_t count);
Var slice_cols(Var x, std::size_t begin, std::size_t count);
// out[i] = table[indices[i]]; gradients scatter-add back into the table.
Var gather_rows(Var table, std::vector<std::size_t> indices);

// 1x1 results.
Var cross_entropy(Var logits, std::vector<std::size_t> targets);
Var sum(Var x);
Var weighted_sum(Var x, Matrix weights);

}  // namespace depthcap::num
