#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depthcap/eval/metrics.hpp"
#include "depthcap/ingest/depth_map.hpp"
#include "depthcap/numerics/params.hpp"

// Independent reference implementations shared by the unit tests and the
// acceptance runner.
namespace depthcap::testing {

using eval::Corpus;
using eval::CorpusEntry;
using eval::Tokens;

// Mode of a half-open integer pixel rectangle, smaller value on ties.
inline std::uint8_t brute_force_mode(const ingest::DepthMap& m, int x0, int y0, int x1, int y1) {
  std::map<int, int> counts;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) counts[m.values[static_cast<std::size_t>(y) * m.width + x]]++;
  }
  int best_value = -1, best_count = -1;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {
      best_value = value;
      best_count = count;
    }
  }
  return static_cast<std::uint8_t>(best_value);
}

// Straight transcription of the metric definitions with naive counting,
// kept independent of the library code.
namespace oracle {

using Gram = std::vector<std::string>;

inline std::vector<Gram> grams(const Tokens& t, std::size_t n) {
  std::vector<Gram> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) out.emplace_back(t.begin() + i, t.begin() + i + n);
  return out;
}

inline std::size_t count(const std::vector<Gram>& all, const Gram& g) {
  return static_cast<std::size_t>(std::count(all.begin(), all.end(), g));
}

inline double bleu(const Corpus& corpus) {
  double log_p = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    double matched = 0, total = 0;
    for (const auto& [id, e] : corpus) {
      const auto cg = grams(e.candidate, n);
      total += cg.size();
      std::vector<Gram> seen;
      for (const auto& g : cg) {
        if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
        seen.push_back(g);
        std::size_t best = 0;
        for (const auto& r : e.references) best = std::max(best, count(grams(r, n), g));
        matched += std::min(count(cg, g), best);
      }
    }
    if (matched == 0) return 0.0;
    log_p += std::log(matched / total) / 4.0;
  }
  double c = 0, r = 0;
  for (const auto& [id, e] : corpus) {
    c += e.candidate.size();
    double best = -1;
    for (const auto& ref : e.references) {
      const double len = ref.size();
      const double d = std::abs(len - static_cast<double>(e.candidate.size()));
      const double bd = std::abs(best - static_cast<double>(e.candidate.size()));
      if (best < 0 || d < bd || (d == bd && len < best)) best = len;
    }
    r += best;
  }
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_p);
}

inline double cider(const Corpus& corpus, double sigma) {
  const double n_images = static_cast<double>(corpus.size());
  double total = 0.0;
  for (const auto& [id, e] : corpus) {
    double per_image = 0.0;
    for (const auto& ref : e.references) {
      double sum_n = 0.0;
      for (std::size_t n = 1; n <= 4; ++n) {
        auto df = [&](const Gram& g) {
          double d = 0;
          for (const auto& [other_id, other] : corpus) {
            bool has = false;
            for (const auto& r : other.references) has = has || count(grams(r, n), g) > 0;
            d += has;
          }
          return d;
        };
        auto vec = [&](const Tokens& t) {
          std::map<Gram, double> v;
          const auto g = grams(t, n);
          for (const auto& x : g) v[x] = count(g, x) * (std::log(n_images) - std::log(std::max(1.0, df(x))));
          return v;
        };
        auto norm = [](const std::map<Gram, double>& v) {
          double s = 0;
          for (const auto& [g, w] : v) s += w * w;
          return std::sqrt(s);
        };
        const auto vh = vec(e.candidate), vr = vec(ref);
        double dot = 0;
        for (const auto& [g, w] : vh) {
          auto it = vr.find(g);
          if (it != vr.end()) dot += std::min(w, it->second) * it->second;
        }
        const double nh = norm(vh), nr = norm(vr);
        if (nh != 0 && nr != 0) dot /= nh * nr;
        const double delta = static_cast<double>(e.candidate.size()) - static_cast<double>(ref.size());
        sum_n += dot * std::exp(-delta * delta / (2 * sigma * sigma));
      }
      per_image += sum_n / 4.0;
    }
    total += per_image * 10.0 / e.references.size();
  }
  return total / n_images;
}

}  // namespace oracle

// Small alphabet so n-grams overlap often.
inline Corpus random_corpus(std::uint64_t seed) {
  num::SplitMix64 rng(seed);
  const std::vector<std::string> alphabet{"a", "b", "c", "d", "e", "f"};
  auto sentence = [&] {
    Tokens t(1 + rng.below(9));
    for (auto& w : t) w = alphabet[rng.below(alphabet.size())];
    return t;
  };
  Corpus c;
  const std::size_t images = 2 + rng.below(5);
  for (std::size_t i = 0; i < images; ++i) {
    CorpusEntry e;
    e.candidate = sentence();
    e.references.resize(1 + rng.below(4));
    for (auto& r : e.references) r = sentence();
    if (rng.below(3) == 0) e.candidate = e.references.front();
    c["img" + std::to_string(i)] = e;
  }
  return c;
}

}  // namespace depthcap::testing
