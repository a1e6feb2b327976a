#pragma once

// Seeded sampling of joint kernels and chi-square frequency tests on the
// sampled trajectories.

#include <algorithm>
#include <cstdint>
#include <map>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "uac/graph.hpp"
#include "uac/kernel.hpp"
#include "uac/verifier.hpp"

namespace uac {

/// Seed of worker `index` under a master seed (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Row sampler with precomputed cumulative probabilities.
class KernelSampler {
 public:
  explicit KernelSampler(const JointKernel& k) : k_(&k), cumulative_(k.size()) {
    for (std::size_t i = 0; i < k.size(); ++i) {
      Rational acc = 0;
      for (const auto& t : k.row(i)) {
        acc += t.probability;
        cumulative_[i].push_back(to_double(acc));
      }
    }
  }

  /// Index of the next state. The uniform draw uses the top 53 bits so the
  /// stream is identical across standard libraries.
  std::size_t step(std::size_t i, std::mt19937_64& rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto& c = cumulative_[i];
    std::size_t j = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
    if (j >= c.size()) j = c.size() - 1;
    return *k_->index_of(k_->row(i)[j].target);
  }

 private:
  const JointKernel* k_;
  std::vector<std::vector<double>> cumulative_;
};

struct Trajectory {
  std::vector<StatePair> states;  // steps + 1 entries, starting at the kernel's start
  std::size_t collisions = 0;     // transitions that met or stepped onto the other token
};

inline Trajectory simulate(const JointKernel& k, std::size_t steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("simulate: steps must be at least 1");
  KernelSampler sampler(k);
  std::mt19937_64 rng(seed);
  Trajectory out;
  out.states.reserve(steps + 1);
  std::size_t i = k.start_index();
  out.states.push_back(k.state(i));
  for (std::size_t t = 0; t < steps; ++t) {
    const StatePair before = k.state(i);
    i = sampler.step(i, rng);
    const StatePair after = k.state(i);
    if (after.x == after.y || after.x == before.y) ++out.collisions;
    out.states.push_back(after);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chi-square tests
// ---------------------------------------------------------------------------

/// Upper tail of the chi-square law with `df` degrees of freedom.
inline double chi_square_sf(double statistic, double df) {
  if (df <= 0) return 1.0;
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

struct BucketResult {
  std::vector<VertexId> history;         // observed positions, oldest first
  std::size_t count = 0;
  std::map<VertexId, std::size_t> next;  // observed next positions
  double statistic = 0.0;
  double p_value = 1.0;
};

struct FrequencyReport {
  std::vector<BucketResult> tested;
  std::vector<std::vector<VertexId>> skipped;  // buckets below min_count
  double alpha = 0.01;
  double threshold = 0.0;                      // alpha / tested.size()
  bool reject = false;
  std::size_t worst = 0;                       // index into tested with the smallest p-value
};

/// Next-position counts per length-h history of one token; mergeable across
/// workers.
class HistoryCounts {
 public:
  HistoryCounts(const Graph& g, Token token, std::size_t h) : g_(&g), token_(token), h_(h) {
    if (h < 1) throw std::invalid_argument("history window must be at least 1");
  }

  void add(const std::vector<StatePair>& states) {
    for (std::size_t t = h_; t < states.size(); ++t) {
      std::vector<VertexId> key(h_);
      for (std::size_t j = 0; j < h_; ++j) key[j] = detail::observed(states[t - h_ + j], token_);
      ++buckets_[key][detail::observed(states[t], token_)];
    }
  }

  void merge(const HistoryCounts& other) {
    for (const auto& [key, row] : other.buckets_)
      for (const auto& [w, c] : row) buckets_[key][w] += c;
  }

  FrequencyReport test(double alpha, std::size_t min_count) const {
    FrequencyReport r;
    r.alpha = alpha;
    for (const auto& [key, row] : buckets_) {
      std::size_t total = 0;
      for (const auto& [w, c] : row) total += c;
      if (total < min_count) {
        r.skipped.push_back(key);
        continue;
      }
      BucketResult b{key, total, row, 0.0, 1.0};
      const VertexId v = key.back();
      const auto nb = g_->neighbors(v);
      bool off_graph = false;
      for (const auto& [w, c] : row)
        if (!g_->adjacent(v, w)) off_graph = true;
      if (off_graph) {
        b.statistic = std::numeric_limits<double>::infinity();
        b.p_value = 0.0;
      } else {
        const double expected = static_cast<double>(total) / static_cast<double>(nb.size());
        for (VertexId w : nb) {
          const auto it = row.find(w);
          const double o = it == row.end() ? 0.0 : static_cast<double>(it->second);
          b.statistic += (o - expected) * (o - expected) / expected;
        }
        b.p_value = chi_square_sf(b.statistic, static_cast<double>(nb.size()) - 1.0);
      }
      r.tested.push_back(std::move(b));
    }
    if (r.tested.empty())
      throw std::runtime_error("trajectory too short: every history bucket is below min_count");
    r.threshold = alpha / static_cast<double>(r.tested.size());
    for (std::size_t i = 0; i < r.tested.size(); ++i)
      if (r.tested[i].p_value < r.tested[r.worst].p_value) r.worst = i;
    r.reject = r.tested[r.worst].p_value < r.threshold;
    return r;
  }

 private:
  const Graph* g_;
  Token token_;
  std::size_t h_;
  std::map<std::vector<VertexId>, std::map<VertexId, std::size_t>> buckets_;
};

/// Chi-square test of each length-h history's next step against 1/d(current),
/// Bonferroni-corrected over the tested buckets.
inline FrequencyReport history_frequency_test(const Trajectory& traj, const Graph& g, Token token,
                                              std::size_t h, double alpha = 0.01,
                                              std::size_t min_count = 50) {
  HistoryCounts counts(g, token, h);
  counts.add(traj.states);
  return counts.test(alpha, min_count);
}

/// Chi-square test of each visited state's empirical successors against its
/// kernel row. The bucket history holds the state as {x, y}.
inline FrequencyReport transition_frequency_test(const JointKernel& k, const Trajectory& traj,
                                                 double alpha = 0.01, std::size_t min_count = 50) {
  std::map<StatePair, std::map<StatePair, std::size_t>> counts;
  for (std::size_t t = 1; t < traj.states.size(); ++t) ++counts[traj.states[t - 1]][traj.states[t]];
  FrequencyReport r;
  r.alpha = alpha;
  for (const auto& [s, row] : counts) {
    std::size_t total = 0;
    for (const auto& [w, c] : row) total += c;
    if (total < min_count) {
      r.skipped.push_back({s.x, s.y});
      continue;
    }
    BucketResult b{{s.x, s.y}, total, {}, 0.0, 1.0};
    const auto i = k.index_of(s);
    std::size_t matched = 0;
    for (const auto& t : k.row(*i)) {
      const auto it = row.find(t.target);
      const double o = it == row.end() ? 0.0 : static_cast<double>(it->second);
      if (it != row.end()) matched += it->second;
      const double e = static_cast<double>(total) * to_double(t.probability);
      b.statistic += (o - e) * (o - e) / e;
    }
    if (matched != total) {
      b.statistic = std::numeric_limits<double>::infinity();
      b.p_value = 0.0;
    } else {
      b.p_value = chi_square_sf(b.statistic, static_cast<double>(k.row(*i).size()) - 1.0);
    }
    r.tested.push_back(std::move(b));
  }
  if (r.tested.empty())
    throw std::runtime_error("trajectory too short: every state bucket is below min_count");
  r.threshold = alpha / static_cast<double>(r.tested.size());
  for (std::size_t i = 0; i < r.tested.size(); ++i)
    if (r.tested[i].p_value < r.tested[r.worst].p_value) r.worst = i;
  r.reject = r.tested[r.worst].p_value < r.threshold;
  return r;
}

/// History test over `workers` independent trajectories of `steps` each,
/// seeded as derive_seed(master_seed, worker). Counts are summed, so the
/// result does not depend on scheduling.
inline FrequencyReport monte_carlo_history_test(const JointKernel& k, Token token, std::size_t h,
                                                std::size_t steps, std::uint64_t master_seed,
                                                unsigned workers = 1, double alpha = 0.01,
                                                std::size_t min_count = 50) {
  workers = std::max(1u, workers);
  std::vector<HistoryCounts> parts(workers, HistoryCounts(k.graph(), token, h));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] { parts[w].add(simulate(k, steps, derive_seed(master_seed, w)).states); });
  pool.clear();
  for (unsigned w = 1; w < workers; ++w) parts[0].merge(parts[w]);
  return parts[0].test(alpha, min_count);
}

}  // namespace uac
