#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

#include "qcg/backends.hpp"
#include "qcg/io.hpp"
#include "qcg/rng.hpp"

namespace qcg {

struct SearchCaps {
  int radius_cap = 8;
  std::size_t memory_cap = 1 << 22;  // max stored ball elements
};

// Breadth-first ball around the identity, shared across queries. Word
// length queries are answered bidirectionally: an element g with
// C(g) <= 2 * radius splits as g = v * w with both halves inside the ball,
// and the minimum of depth(v) + depth(w) over found splits is exact. Only
// complete levels are kept, so a memory-capped ball still never reports a
// wrong length; it reports censoring instead.
template <GroupBackend B>
class BallSearcher {
 public:
  BallSearcher(const B& backend, SearchCaps caps) : backend_(&backend), caps_(caps) {
    if (caps.radius_cap < 1) throw std::invalid_argument("BallSearcher: radius_cap must be >= 1");
    if (caps.memory_cap < 1 + backend.generators().size())
      throw std::invalid_argument("BallSearcher: memory_cap below the radius-1 ball");
    build_();
  }

  int radius() const { return radius_; }
  std::size_t size() const { return nodes_.size(); }
  bool memory_capped() const { return capped_; }
  bool exhausted_group() const { return exhausted_; }
  const std::vector<std::size_t>& level_sizes() const { return level_sizes_; }

  // Cumulative ball size |B(r)|.
  std::size_t ball_size(int r) const {
    std::size_t total = 0;
    for (int i = 0; i <= r && i < static_cast<int>(level_sizes_.size()); ++i)
      total += level_sizes_[i];
    return total;
  }

  std::optional<int> depth_of_key(const std::string& key) const {
    const auto it = depth_.find(key);
    if (it == depth_.end()) return std::nullopt;
    return it->second;
  }

  // Exact word length of g, or nullopt when it exceeds what the ball can
  // certify (2 * radius for a capped ball, unbounded once the whole group
  // has been enumerated).
  std::optional<int> complexity(const typename B::element_type& g) const {
    if (const auto d = depth_of_key(backend_->canonical_key(g))) return d;
    if (exhausted_) return std::nullopt;  // g outside a fully enumerated group: unreachable
    int best = std::numeric_limits<int>::max();
    for (const auto& node : nodes_) {
      // nodes are in depth order; a deeper v cannot improve on best since
      // the second factor contributes at least 1 once the direct lookup missed
      if (node.depth + 1 >= best) break;
      const auto w = backend_->multiply(node.inverse, g);
      if (const auto dw = depth_of_key(backend_->canonical_key(w)))
        best = std::min(best, node.depth + *dw);
    }
    if (best <= 2 * radius_) return best;
    return std::nullopt;
  }

 private:
  struct Node {
    typename B::element_type element;
    typename B::element_type inverse;
    int depth;
  };

  void build_() {
    const auto id = backend_->identity();
    depth_.emplace(backend_->canonical_key(id), 0);
    nodes_.push_back({id, backend_->inverse(id), 0});
    level_sizes_.push_back(1);
    std::size_t level_begin = 0;
    for (int r = 1; r <= caps_.radius_cap; ++r) {
      const std::size_t level_end = nodes_.size();
      std::vector<std::string> staged_keys;
      bool over_cap = false;
      for (std::size_t i = level_begin; i < level_end && !over_cap; ++i) {
        for (const auto& gen : backend_->generators()) {
          auto cand = backend_->multiply(nodes_[i].element, gen.element);
          auto key = backend_->canonical_key(cand);
          if (depth_.count(key)) continue;
          if (nodes_.size() + 1 > caps_.memory_cap) {
            over_cap = true;
            break;
          }
          depth_.emplace(key, r);
          staged_keys.push_back(std::move(key));
          auto inv = backend_->inverse(cand);
          nodes_.push_back({std::move(cand), std::move(inv), r});
        }
      }
      if (over_cap) {
        // drop the partial level; only complete levels make answers exact
        for (const auto& k : staged_keys) depth_.erase(k);
        nodes_.resize(level_end);
        capped_ = true;
        break;
      }
      if (nodes_.size() == level_end) {
        exhausted_ = true;  // finite group fully enumerated
        break;
      }
      level_sizes_.push_back(nodes_.size() - level_end);
      radius_ = r;
      level_begin = level_end;
    }
  }

  const B* backend_;
  SearchCaps caps_;
  std::unordered_map<std::string, int> depth_;
  std::vector<Node> nodes_;  // BFS order, non-decreasing depth
  std::vector<std::size_t> level_sizes_;
  int radius_ = 0;
  bool capped_ = false;
  bool exhausted_ = false;
};

// One-shot query; builds a private ball. Experiments share a BallSearcher.
template <GroupBackend B>
std::optional<int> exact_complexity(const B& backend, const typename B::element_type& g,
                                    SearchCaps caps) {
  return BallSearcher<B>(backend, caps).complexity(g);
}

struct WalkRecord {
  std::string backend_id;
  int k = 0;
  std::vector<std::string> word;  // generator labels in application order
  std::string element_key;
  std::optional<int> complexity;  // nullopt = exceeds the searchable range
  int ball_radius = 0;
  std::size_t ball_size = 0;
  std::uint64_t seed = 0;
};

// Uniform word h_1 h_2 ... h_k over the generator list, multiplied left to
// right. Identical (backend, k, seed) give identical records.
template <GroupBackend B>
std::pair<WalkRecord, typename B::element_type> random_word_element(const B& backend, int k,
                                                                    std::uint64_t seed) {
  if (k < 0) throw std::invalid_argument("random_word: k must be >= 0");
  const auto& gens = backend.generators();
  Rng rng(seed);
  WalkRecord rec;
  rec.backend_id = backend.name();
  rec.k = k;
  rec.seed = seed;
  auto acc = backend.identity();
  rec.word.reserve(k);
  for (int i = 0; i < k; ++i) {
    const std::size_t pick = static_cast<std::size_t>(rng.below(gens.size()));
    rec.word.push_back(gens[pick].label);
    acc = backend.multiply(acc, gens[pick].element);
  }
  rec.element_key = backend.canonical_key(acc);
  return {std::move(rec), std::move(acc)};
}

template <GroupBackend B>
WalkRecord random_word(const B& backend, int k, std::uint64_t seed) {
  return random_word_element(backend, k, seed).first;
}

template <GroupBackend B>
typename B::element_type word_product(const B& backend, int k, std::uint64_t seed) {
  const auto& gens = backend.generators();
  Rng rng(seed);
  auto acc = backend.identity();
  for (int i = 0; i < k; ++i) acc = backend.multiply(acc, gens[rng.below(gens.size())].element);
  return acc;
}

struct KingmanPerK {
  int k = 0;
  std::optional<double> mean_ratio;  // mean of C(g_k)/k over uncensored trials
  std::optional<double> stderr_;
  int trials = 0;
  int censored_count = 0;
};

struct GrowthEstimate {
  std::vector<KingmanPerK> per_k;
  std::vector<WalkRecord> records;  // k-major, trial order
};

// Sampled word-length ratios C(g_k)/k for each k. The ball is built once by
// the caller and shared; records land in preallocated slots so thread count
// does not affect the output.
template <GroupBackend B>
GrowthEstimate kingman_estimate(const B& backend, const BallSearcher<B>& ball,
                                const std::vector<int>& k_list, int trials, std::uint64_t seed,
                                int threads = 1) {
  if (k_list.empty()) throw std::invalid_argument("kingman_estimate: k_list must be nonempty");
  if (trials < 1) throw std::invalid_argument("kingman_estimate: trials must be >= 1");
  for (int k : k_list)
    if (k < 1) throw std::invalid_argument("kingman_estimate: k values must be >= 1");

  GrowthEstimate est;
  est.records.resize(k_list.size() * static_cast<std::size_t>(trials));
  parallel_for(est.records.size(), threads, [&](std::size_t idx) {
    const std::size_t ki = idx / trials;
    const int trial = static_cast<int>(idx % trials);
    const int k = k_list[ki];
    const std::uint64_t s =
        derive_seed(seed, (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint32_t>(trial));
    auto [rec, elem] = random_word_element(backend, k, s);
    rec.complexity = ball.complexity(elem);
    rec.ball_radius = ball.radius();
    rec.ball_size = ball.size();
    est.records[idx] = std::move(rec);
  });

  for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
    KingmanPerK row;
    row.k = k_list[ki];
    row.trials = trials;
    double sum = 0.0, sumsq = 0.0;
    int m = 0;
    for (int t = 0; t < trials; ++t) {
      const WalkRecord& rec = est.records[ki * trials + t];
      if (!rec.complexity) {
        ++row.censored_count;
        continue;
      }
      if (*rec.complexity > row.k)
        throw std::runtime_error("kingman_estimate: computed length exceeds the sampled word length");
      const double ratio = static_cast<double>(*rec.complexity) / row.k;
      sum += ratio;
      sumsq += ratio * ratio;
      ++m;
    }
    if (m > 0) {
      const double mean = sum / m;
      row.mean_ratio = mean;
      if (m > 1) {
        const double var = std::max(0.0, (sumsq - m * mean * mean) / (m - 1));
        row.stderr_ = std::sqrt(var / m);
      } else {
        row.stderr_ = 0.0;
      }
    }
    est.per_k.push_back(row);
  }
  return est;
}

struct ReturnPerK {
  int k = 0;       // walk length is 2k
  int trials = 0;
  int returns = 0;
  double rho_estimate = 0.0;  // (returns/trials)^(1/2k), upper bound if none seen
  bool upper_bound = false;
};

template <GroupBackend B>
std::vector<ReturnPerK> return_probability(const B& backend, const std::vector<int>& k_list,
                                           int trials, std::uint64_t seed, int threads = 1) {
  if (k_list.empty()) throw std::invalid_argument("return_probability: k_list must be nonempty");
  if (trials < 1) throw std::invalid_argument("return_probability: trials must be >= 1");
  for (int k : k_list)
    if (k < 1) throw std::invalid_argument("return_probability: k values must be >= 1");

  const std::string id_key = backend.canonical_key(backend.identity());
  std::vector<ReturnPerK> out(k_list.size());
  std::vector<std::uint8_t> returned(k_list.size() * static_cast<std::size_t>(trials), 0);
  parallel_for(returned.size(), threads, [&](std::size_t idx) {
    const std::size_t ki = idx / trials;
    const int trial = static_cast<int>(idx % trials);
    const int k = k_list[ki];
    const std::uint64_t s =
        derive_seed(seed, (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint32_t>(trial));
    const auto elem = word_product(backend, 2 * k, s);
    returned[idx] = (backend.canonical_key(elem) == id_key) ? 1 : 0;
  });
  for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
    ReturnPerK& row = out[ki];
    row.k = k_list[ki];
    row.trials = trials;
    for (int t = 0; t < trials; ++t) row.returns += returned[ki * trials + t];
    const double exponent = 1.0 / (2.0 * row.k);
    if (row.returns > 0) {
      row.rho_estimate = std::pow(static_cast<double>(row.returns) / trials, exponent);
    } else {
      row.rho_estimate = std::pow(1.0 / trials, exponent);
      row.upper_bound = true;
    }
  }
  return out;
}

struct SubadditivityCheck {
  int checked = 0;
  int violations = 0;
};

// Samples word pairs (u, v) with lengths up to max_len and verifies
// C(uv) <= C(u) + C(v). Requires a ball deep enough that every involved
// length is certifiable, i.e. max_len <= radius.
template <GroupBackend B>
SubadditivityCheck sample_subadditivity(const B& backend, const BallSearcher<B>& ball, int pairs,
                                        int max_len, std::uint64_t seed) {
  if (pairs < 1) throw std::invalid_argument("sample_subadditivity: pairs must be >= 1");
  if (max_len < 1 || max_len > ball.radius())
    throw std::invalid_argument("sample_subadditivity: max_len must be in [1, ball radius]");
  SubadditivityCheck chk;
  Rng lens(derive_seed(seed, 0xabcdef));
  for (int p = 0; p < pairs; ++p) {
    const int lu = 1 + static_cast<int>(lens.below(max_len));
    const int lv = 1 + static_cast<int>(lens.below(max_len));
    const auto u = word_product(backend, lu, derive_seed(seed, 2 * p));
    const auto v = word_product(backend, lv, derive_seed(seed, 2 * p + 1));
    const auto cu = ball.complexity(u);
    const auto cv = ball.complexity(v);
    const auto cuv = ball.complexity(backend.multiply(u, v));
    if (!cu || !cv || !cuv)
      throw std::runtime_error("sample_subadditivity: length exceeded the searchable range");
    ++chk.checked;
    if (*cuv > *cu + *cv) ++chk.violations;
  }
  return chk;
}

}  // namespace qcg
