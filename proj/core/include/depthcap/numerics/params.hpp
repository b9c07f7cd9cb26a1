#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "depthcap/numerics/matrix.hpp"

namespace depthcap::num {

// SplitMix64 generator. Small, seedable and identical across platforms, which
// keeps initialization and fixtures byte-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
};

// Derive a child seed from a parent seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

enum class Init { Xavier, Zeros, Ones };

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Owns every learned matrix of a model in declaration order. Addresses are
// stable for the lifetime of the store, so layers keep plain references.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed) : seed_(seed) {}
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  // Xavier init draws from a stream keyed by (store seed, name), so adding a
  // parameter never perturbs the values of the others.
  Parameter& add(const std::string& name, std::size_t rows, std::size_t cols, Init init);

  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const;
  std::deque<Parameter>& all() noexcept { return params_; }
  const std::deque<Parameter>& all() const noexcept { return params_; }

  void zero_grad();

 private:
  std::uint64_t seed_;
  std::deque<Parameter> params_;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(Matrix& m, SplitMix64& rng);

}  // namespace depthcap::num
