#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "depthcap/errors.hpp"
#include "depthcap/numerics/grad_check.hpp"
#include "depthcap/numerics/kernels.hpp"
#include "depthcap/numerics/ops.hpp"
#include "depthcap/numerics/tape.hpp"
#include "depthcap/numerics/transformer.hpp"
#include "support.hpp"

using namespace depthcap;
using num::Matrix;
using depthcap::testing::random_matrix;

namespace {

double row_sum(const Matrix& m, std::size_t r) {
  double s = 0.0;
  for (double x : m.row(r)) s += x;
  return s;
}

}  // namespace

TEST(Matrix, ConstructionAndAccess) {
  Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.shape_string(), "(2x3)");
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), ShapeError);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  num::SplitMix64 rng(1);
  Matrix m = random_matrix(rng, 3, 4);
  EXPECT_EQ(num::matmul(Matrix::identity(3), m), m);
}

TEST(Matmul, HandProduct) {
  Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  Matrix b = Matrix::from_rows({{5}, {6}});
  EXPECT_EQ(num::matmul(a, b), Matrix::from_rows({{17}, {39}}));
}

TEST(Matmul, ShapeErrorNamesBothShapes) {
  try {
    num::matmul(Matrix(2, 3), Matrix(4, 5));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x3"), std::string::npos) << what;
    EXPECT_NE(what.find("4x5"), std::string::npos) << what;
  }
}

TEST(Matmul, AssociativityOnRandomTriples) {
  num::SplitMix64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + rng.below(6), q = 1 + rng.below(6), r = 1 + rng.below(6), s = 1 + rng.below(6);
    Matrix a = random_matrix(rng, p, q), b = random_matrix(rng, q, r), c = random_matrix(rng, r, s);
    EXPECT_LE(num::max_abs_diff(num::matmul(num::matmul(a, b), c), num::matmul(a, num::matmul(b, c))), 1e-9);
  }
}

TEST(Matmul, TransposedVariantsAgree) {
  num::SplitMix64 rng(3);
  Matrix a = random_matrix(rng, 3, 4), b = random_matrix(rng, 5, 4), c = random_matrix(rng, 3, 2);
  EXPECT_LE(num::max_abs_diff(num::matmul_nt(a, b), num::matmul(a, num::transpose(b))), 1e-15);
  EXPECT_LE(num::max_abs_diff(num::matmul_tn(a, c), num::matmul(num::transpose(a), c)), 1e-15);
}

TEST(Linear, MatchesProductPlusBias) {
  Matrix x = Matrix::from_rows({{1, 2}, {3, 4}});
  Matrix w = Matrix::from_rows({{5}, {6}});
  EXPECT_EQ(num::linear(x, w), Matrix::from_rows({{17}, {39}}));
  EXPECT_EQ(num::linear(x, w, Matrix::from_rows({{1}})), Matrix::from_rows({{18}, {40}}));
  EXPECT_EQ(num::linear(x, Matrix::identity(2)), x);
  EXPECT_THROW(num::linear(x, Matrix(3, 1)), ShapeError);
  EXPECT_THROW(num::linear(x, w, Matrix(1, 2)), ShapeError);
}

TEST(Softmax, UniformRow) {
  Matrix y = num::softmax_rows(Matrix(1, 4));
  for (double v : y.row(0)) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  Matrix y = num::softmax_rows(Matrix::from_rows({{1000, 0}}));
  EXPECT_TRUE(y.all_finite());
  EXPECT_NEAR(y(0, 0), 1.0, 1e-300);
  EXPECT_NEAR(y(0, 1), 0.0, 1e-300);
}

TEST(Softmax, ClosedForm) {
  Matrix y = num::softmax_rows(Matrix::from_rows({{std::log(1.0), std::log(3.0)}}));
  EXPECT_NEAR(y(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(y(0, 1), 0.75, 1e-15);
}

TEST(Softmax, RowsSumToOneAndShiftInvariant) {
  num::SplitMix64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m = random_matrix(rng, 1 + rng.below(5), 1 + rng.below(8), -50.0, 50.0);
    Matrix y = num::softmax_rows(m);
    Matrix shifted = m;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double c = rng.uniform(-100.0, 100.0);
      for (double& v : shifted.row(r)) v += c;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      EXPECT_NEAR(row_sum(y, r), 1.0, 1e-12);
      for (double v : y.row(r)) EXPECT_GE(v, 0.0);
    }
    EXPECT_LE(num::max_abs_diff(num::softmax_rows(shifted), y), 1e-12);
  }
}

TEST(Softmax, MaskedEntriesAreExactlyZero) {
  Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const std::vector<std::uint8_t> allowed{1, 0, 1, 0, 0, 1};
  Matrix y = num::softmax_rows(m, allowed);
  EXPECT_EQ(y(0, 1), 0.0);
  EXPECT_EQ(y(1, 0), 0.0);
  EXPECT_EQ(y(1, 1), 0.0);
  EXPECT_EQ(y(1, 2), 1.0);
  EXPECT_NEAR(y(0, 0), 1.0 / (1.0 + std::exp(2.0)), 1e-15);
  const std::vector<std::uint8_t> none{0, 0, 0, 1, 1, 1};
  EXPECT_THROW(num::softmax_rows(m, none), ArgumentError);
}

TEST(LayerNorm, Examples) {
  const std::vector<double> ones{1.0, 1.0}, zeros{0.0, 0.0};
  for (double v : num::layer_norm(std::vector<double>{0.0, 0.0}, ones, zeros)) EXPECT_EQ(v, 0.0);
  for (double v : num::layer_norm(std::vector<double>{7.0, 7.0}, ones, zeros)) EXPECT_EQ(v, 0.0);
  const auto y = num::layer_norm(std::vector<double>{1.0, 3.0}, ones, zeros, 1e-300);
  EXPECT_NEAR(y[0], -1.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-15);
  // With the default eps the variance term is 1 + 1e-5.
  const auto z = num::layer_norm(std::vector<double>{1.0, 3.0}, ones, zeros);
  EXPECT_NEAR(z[1], 1.0 / std::sqrt(1.0 + 1e-5), 1e-15);
  EXPECT_THROW(num::layer_norm(std::vector<double>{1.0, 2.0, 3.0}, ones, zeros), ShapeError);
}

TEST(LayerNorm, AffineApplied) {
  const auto y = num::layer_norm(std::vector<double>{1.0, 3.0}, std::vector<double>{2.0, 3.0},
                                 std::vector<double>{0.5, -0.5}, 1e-300);
  EXPECT_NEAR(y[0], -1.5, 1e-15);
  EXPECT_NEAR(y[1], 2.5, 1e-15);
}

TEST(L2Normalize, Examples) {
  const auto y = num::l2_normalize(std::vector<double>{3.0, 4.0});
  EXPECT_NEAR(y[0], 0.6, 1e-16);
  EXPECT_NEAR(y[1], 0.8, 1e-16);
  const auto zero = num::l2_normalize(std::vector<double>{0.0, 0.0});
  EXPECT_EQ(zero, (std::vector<double>{0.0, 0.0}));
  const std::vector<double> tiny{1e-13, 0.0};
  EXPECT_EQ(num::l2_normalize(tiny), tiny);
}

TEST(L2Normalize, Idempotent) {
  num::SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m = random_matrix(rng, 3, 1 + rng.below(10), -10.0, 10.0);
    Matrix once = num::l2_normalize_rows(m);
    EXPECT_LE(num::max_abs_diff(num::l2_normalize_rows(once), once), 1e-12);
  }
}

TEST(Gelu, KnownValues) {
  EXPECT_EQ(num::gelu(0.0), 0.0);
  EXPECT_NEAR(num::gelu(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(num::gelu(-1.0), -0.15865525393145707, 1e-15);
  const double h = 1e-6;
  for (double x : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    EXPECT_NEAR(num::gelu_derivative(x), (num::gelu(x + h) - num::gelu(x - h)) / (2 * h), 1e-8);
  }
}

TEST(CrossEntropy, Examples) {
  const std::vector<std::size_t> t3{0, 3, 7};
  EXPECT_NEAR(num::cross_entropy(Matrix(3, 10), t3), std::log(10.0), 1e-15);
  const std::vector<std::size_t> t1{5};
  EXPECT_NEAR(num::cross_entropy(Matrix(1, 72), t1), std::log(72.0), 1e-15);
  EXPECT_NEAR(std::log(72.0), 4.2767, 5e-5);
  Matrix peaked(1, 4);
  peaked(0, 2) = 1000.0;
  const std::vector<std::size_t> t2{2};
  EXPECT_NEAR(num::cross_entropy(peaked, t2), 0.0, 1e-300);
  const std::vector<std::size_t> bad{4};
  EXPECT_THROW(num::cross_entropy(Matrix(1, 4), bad), IndexError);
  const std::vector<std::size_t> wrong_count{0, 1};
  EXPECT_THROW(num::cross_entropy(Matrix(1, 4), wrong_count), ShapeError);
}

TEST(Params, XavierIsDeterministicAndBounded) {
  num::ParamStore a(42), b(42), c(43);
  auto& pa = a.add("w", 20, 30, num::Init::Xavier);
  auto& pb = b.add("w", 20, 30, num::Init::Xavier);
  auto& pc = c.add("w", 20, 30, num::Init::Xavier);
  EXPECT_EQ(pa.value, pb.value);
  EXPECT_NE(pa.value, pc.value);
  const double bound = std::sqrt(6.0 / 50.0);
  for (double v : pa.value.data()) EXPECT_LE(std::abs(v), bound);
  EXPECT_THROW(a.add("w", 1, 1, num::Init::Zeros), ArgumentError);
}

TEST(Params, InitIsIndependentOfRegistrationOrder) {
  num::ParamStore a(7), b(7);
  a.add("first", 3, 3, num::Init::Xavier);
  auto& a2 = a.add("second", 4, 2, num::Init::Xavier);
  auto& b2 = b.add("second", 4, 2, num::Init::Xavier);
  EXPECT_EQ(a2.value, b2.value);
}

TEST(SplitMix, ReferenceSequence) {
  // First outputs of the reference splitmix64 seeded with 0.
  num::SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(Tape, ReplayIsBitIdentical) {
  num::SplitMix64 rng(6);
  num::ParamStore store(1);
  auto& w = store.add("w", 4, 3, num::Init::Xavier);
  num::Tape tape;
  num::Var x = tape.constant(random_matrix(rng, 2, 4));
  num::Var y = num::sum(num::gelu(num::layer_norm_rows(num::matmul(x, tape.parameter(w)),
                                                        tape.constant(Matrix(1, 3, 1.0)),
                                                        tape.constant(Matrix(1, 3)))));
  const double before = y.value()(0, 0);
  tape.replay();
  EXPECT_EQ(y.value()(0, 0), before);
}

TEST(Tape, ConstantHasZeroGradient) {
  num::ParamStore store(1);
  auto& w = store.add("w", 2, 2, num::Init::Xavier);
  num::Tape tape;
  num::Var c = tape.constant(Matrix::from_rows({{1, 2}, {3, 4}}));
  num::Var loss = num::sum(num::matmul(c, tape.parameter(w)));
  tape.backward(loss);
  EXPECT_FALSE(tape.requires_grad(c));
  EXPECT_EQ(tape.grad(c), Matrix(2, 2));
}

TEST(Tape, BackwardRequiresScalar) {
  num::Tape tape;
  num::Var x = tape.constant(Matrix(2, 2));
  EXPECT_THROW(tape.backward(x), ShapeError);
}

TEST(GradCheck, Square) {
  num::ParamStore store(1);
  auto& x = store.add("x", 1, 1, num::Init::Zeros);
  x.value(0, 0) = 3.0;
  auto report = num::grad_check(
      [&](num::Tape& t) {
        num::Var v = t.parameter(x);
        return num::sum(num::hadamard(v, v));
      },
      {&x}, {});
  EXPECT_TRUE(report.passed);
  EXPECT_NEAR(report.worst.analytic, 6.0, 1e-12);
  EXPECT_NEAR(report.worst.numeric, 6.0, 1e-8);
}

TEST(GradCheck, ConstantFunction) {
  num::ParamStore store(1);
  auto& x = store.add("x", 2, 2, num::Init::Xavier);
  auto report = num::grad_check([&](num::Tape& t) { return t.constant(Matrix(1, 1, 5.0)); }, {&x}, {});
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.max_rel_error, 0.0);
  EXPECT_EQ(x.grad, Matrix(2, 2));
}

TEST(GradCheck, NonFiniteLossThrows) {
  num::ParamStore store(1);
  auto& x = store.add("x", 1, 1, num::Init::Zeros);
  EXPECT_THROW(num::grad_check([&](num::Tape& t) { return num::scale(num::sum(t.parameter(x)), NAN); }, {&x}, {}),
               EvaluationError);
}

TEST(GradCheck, DetectsAWrongGradient) {
  // A custom op whose backward is off by a factor of two must fail.
  num::ParamStore store(1);
  auto& x = store.add("x", 1, 3, num::Init::Xavier);
  auto broken = [&](num::Tape& t) {
    num::Var v = t.parameter(x);
    num::Var y = t.record(
        {v}, [](std::span<const Matrix* const> in) { return num::scale(*in[0], 3.0); },
        [](std::span<const Matrix* const>, const Matrix&, const Matrix& g, std::span<Matrix* const> grads) {
          if (grads[0] != nullptr) *grads[0] = num::add(*grads[0], num::scale(g, 6.0));
        });
    return num::sum(y);
  };
  EXPECT_FALSE(num::grad_check(broken, {&x}, {}).passed);
}

// Every differentiable op against central differences on random inputs.
class OpGradient : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(OpGradient, AllOpsMatchFiniteDifferences) {
  const std::uint64_t seed = GetParam();
  num::SplitMix64 rng(seed);
  num::ParamStore store(seed);
  auto& a = store.add("a", 3, 4, num::Init::Xavier);
  auto& b = store.add("b", 4, 5, num::Init::Xavier);
  auto& c = store.add("c", 3, 4, num::Init::Xavier);
  auto& row = store.add("row", 1, 4, num::Init::Xavier);
  auto& gain = store.add("gain", 1, 4, num::Init::Xavier);
  auto& bias = store.add("bias", 1, 4, num::Init::Xavier);
  for (auto& p : store.all()) depthcap::testing::randomize(p, rng);
  const Matrix w_out = random_matrix(rng, 3, 5);
  const Matrix w_sq = random_matrix(rng, 3, 3);
  const Matrix w_34 = random_matrix(rng, 3, 4);
  const Matrix w_row = random_matrix(rng, 5, 4);
  const auto mask = std::make_shared<const std::vector<std::uint8_t>>(
      std::vector<std::uint8_t>{1, 1, 0, 1, 0, 1, 1, 1, 1});

  using Graph = std::function<num::Var(num::Tape&)>;
  auto P = [](num::Tape& t, num::Parameter& p) { return t.parameter(p); };
  const std::vector<std::pair<std::string, Graph>> graphs = {
      {"matmul", [&](num::Tape& t) { return num::weighted_sum(num::matmul(P(t, a), P(t, b)), w_out); }},
      {"matmul_nt", [&](num::Tape& t) { return num::weighted_sum(num::matmul_nt(P(t, a), P(t, c)), w_sq); }},
      {"transpose",
       [&](num::Tape& t) { return num::weighted_sum(num::transpose(num::transpose(P(t, a))), w_34); }},
      {"add_sub_hadamard_scale",
       [&](num::Tape& t) {
         num::Var x = num::hadamard(num::add(P(t, a), P(t, c)), num::sub(P(t, a), num::scale(P(t, c), 0.7)));
         return num::weighted_sum(x, w_34);
       }},
      {"linear",
       [&](num::Tape& t) {
         num::Var bias5 = num::slice_cols(num::concat_cols({P(t, row), P(t, row)}), 0, 5);
         return num::weighted_sum(num::linear(P(t, a), P(t, b), bias5), w_out);
       }},
      {"add_row_broadcast",
       [&](num::Tape& t) { return num::weighted_sum(num::add_row_broadcast(P(t, a), P(t, row)), w_34); }},
      {"softmax", [&](num::Tape& t) { return num::weighted_sum(num::softmax_rows(P(t, a)), w_34); }},
      {"masked_softmax",
       [&](num::Tape& t) {
         return num::weighted_sum(num::softmax_rows(num::matmul_nt(P(t, a), P(t, c)), mask), w_sq);
       }},
      {"layer_norm",
       [&](num::Tape& t) {
         return num::weighted_sum(num::layer_norm_rows(P(t, a), P(t, gain), P(t, bias)), w_34);
       }},
      {"l2_normalize", [&](num::Tape& t) { return num::weighted_sum(num::l2_normalize_rows(P(t, a)), w_34); }},
      {"gelu", [&](num::Tape& t) { return num::weighted_sum(num::gelu(P(t, a)), w_34); }},
      {"concat_slice",
       [&](num::Tape& t) {
         num::Var x = num::concat_rows({P(t, a), P(t, c), P(t, row)});
         return num::weighted_sum(num::slice_rows(x, 2, 3), w_34);
       }},
      {"gather_rows",
       [&](num::Tape& t) {
         return num::weighted_sum(num::gather_rows(num::transpose(P(t, b)), {0, 4, 4, 2, 0}), w_row);
       }},
      {"cross_entropy",
       [&](num::Tape& t) { return num::cross_entropy(num::matmul(P(t, a), P(t, b)), {0, 4, 2}); }},
  };
  std::vector<num::Parameter*> params;
  for (auto& p : store.all()) params.push_back(&p);
  for (const auto& [name, graph] : graphs) {
    const auto report = num::grad_check(graph, params, {});
    EXPECT_TRUE(report.passed) << name << ": worst " << report.worst.param << "[" << report.worst.index
                               << "] analytic " << report.worst.analytic << " numeric " << report.worst.numeric;
  }
}

TEST_P(OpGradient, MultiHeadAttentionAndEncoderLayer) {
  const std::uint64_t seed = GetParam();
  num::SplitMix64 rng(seed);
  num::ParamStore store(seed);
  auto layer = num::EncoderLayerParams::create(store, "enc", 8, 2, 16);
  auto& bias = store.add("attn_bias", 5, 5, num::Init::Xavier);
  for (auto& p : store.all()) depthcap::testing::randomize(p, rng, -0.5, 0.5);
  const Matrix x = random_matrix(rng, 5, 8);
  const Matrix w = random_matrix(rng, 5, 8);
  auto mask = std::make_shared<const std::vector<std::uint8_t>>(25, 1);
  std::vector<num::Parameter*> params;
  for (auto& p : store.all()) params.push_back(&p);

  auto encoder = [&](num::Tape& t) { return num::weighted_sum(layer(t.constant(x), mask), w); };
  EXPECT_TRUE(num::grad_check(encoder, params, {}).passed);

  auto biased = [&](num::Tape& t) {
    num::Var in = t.constant(x);
    return num::weighted_sum(num::multi_head_attention(in, in, in, 2, t.parameter(bias)), w);
  };
  EXPECT_TRUE(num::grad_check(biased, params, {}).passed);
}

INSTANTIATE_TEST_SUITE_P(Seeds, OpGradient, ::testing::Values(11u, 12u, 13u));

TEST(Attention, HeadsMustDivideWidth) {
  num::Tape t;
  num::Var x = t.constant(Matrix(2, 6));
  EXPECT_THROW(num::multi_head_attention(x, x, x, 4), ShapeError);
}
