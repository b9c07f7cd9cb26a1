#include "depthcap/numerics/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthcap/errors.hpp"

namespace depthcap::num {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("SplitMix64::below: empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % n;
}

double SplitMix64::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  SplitMix64 mix(seed ^ h);
  return mix.next();
}

void xavier_uniform(Matrix& m, SplitMix64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.data()) v = rng.uniform(-bound, bound);
}

Parameter& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols, Init init) {
  if (contains(name)) throw ArgumentError("parameter '" + name + "' registered twice");
  Parameter p{name, Matrix(rows, cols), Matrix(rows, cols)};
  switch (init) {
    case Init::Xavier: {
      SplitMix64 rng(derive_seed(seed_, name));
      xavier_uniform(p.value, rng);
      break;
    }
    case Init::Zeros:
      break;
    case Init::Ones:
      p.value.fill(1.0);
      break;
  }
  params_.push_back(std::move(p));
  return params_.back();
}

Parameter& ParamStore::get(std::string_view name) {
  auto it = std::find_if(params_.begin(), params_.end(), [&](const Parameter& p) { return p.name == name; });
  if (it == params_.end()) throw ArgumentError("unknown parameter '" + std::string(name) + "'");
  return *it;
}

const Parameter& ParamStore::get(std::string_view name) const {
  return const_cast<ParamStore*>(this)->get(name);
}

bool ParamStore::contains(std::string_view name) const {
  return std::any_of(params_.begin(), params_.end(), [&](const Parameter& p) { return p.name == name; });
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

}  // namespace depthcap::num
