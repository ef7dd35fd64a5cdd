#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qcg/linalg.hpp"

namespace qcg {

// A block architecture: n qubits and an ordered list of two-qubit slots.
// One layer applies a gate to every slot in order; k layers repeat the list.
struct BlockArchitecture {
  int n = 0;
  std::string name;
  std::vector<std::pair<int, int>> slots;

  int block_size() const { return static_cast<int>(slots.size()); }
};

inline void validate_architecture(const BlockArchitecture& b) {
  if (b.n < 2) throw std::invalid_argument("architecture: n must be >= 2");
  if (b.slots.empty()) throw std::invalid_argument("architecture: needs at least one slot");
  for (const auto& [i, j] : b.slots) {
    if (i == j) throw std::invalid_argument("architecture: slot indices must differ");
    if (i < 0 || j < 0 || i >= b.n || j >= b.n)
      throw std::invalid_argument("architecture: slot index out of range");
  }
}

// Adjacency lists of the connectivity graph induced by the slot list.
inline std::vector<std::vector<int>> connectivity(const BlockArchitecture& b) {
  validate_architecture(b);
  std::vector<std::vector<int>> adj(b.n);
  for (const auto& [i, j] : b.slots) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return adj;
}

inline BlockArchitecture brickwork(int n) {
  if (n < 2) throw std::invalid_argument("brickwork: n must be >= 2");
  BlockArchitecture b;
  b.n = n;
  b.name = "brickwork" + std::to_string(n);
  for (int i = 0; i + 1 < n; i += 2) b.slots.emplace_back(i, i + 1);
  for (int i = 1; i + 1 < n; i += 2) b.slots.emplace_back(i, i + 1);
  validate_architecture(b);
  return b;
}

inline BlockArchitecture single_slot(int n, int i = 0, int j = 1) {
  BlockArchitecture b;
  b.n = n;
  b.name = "single" + std::to_string(n);
  b.slots.emplace_back(i, j);
  validate_architecture(b);
  return b;
}

enum class Universality { certified, unknown };

namespace detail {

// Wire permutations are stored as pos[q] = current wire of qubit q.
inline void apply_wire_swap(std::vector<int>& pos, int x, int y) {
  for (int& p : pos)
    if (p == x)
      p = y;
    else if (p == y)
      p = x;
}

inline std::string perm_bytes(const std::vector<int>& pos) {
  std::string s;
  s.reserve(pos.size());
  for (int p : pos) s.push_back(static_cast<char>(p));
  return s;
}

}  // namespace detail

// Sufficient routing criterion for one-block universality: a block whose
// slots each carry either SWAP or identity, except one payload slot m, can
// place an arbitrary two-qubit gate on any qubit pair provided the prefix
// permutation routes that pair onto slot m and the suffix undoes the prefix
// exactly. The check enumerates all SWAP subsets of the slots before and
// after each candidate payload slot, so it certifies architectures or
// answers unknown; it never claims non-universality.
inline Universality universal_block(const BlockArchitecture& b) {
  validate_architecture(b);
  const int nb = b.block_size();
  if (nb > 16) return Universality::unknown;  // enumeration budget
  if (b.n > 255) return Universality::unknown;

  // Per payload slot m: all prefix permutations (over slots [0, m)) and all
  // suffix permutations (over slots (m, nb)) reachable by SWAP subsets.
  std::vector<std::vector<std::vector<int>>> prefixes(nb);
  std::vector<std::unordered_set<std::string>> suffixes(nb);
  std::vector<int> ident(b.n);
  for (int q = 0; q < b.n; ++q) ident[q] = q;

  for (int m = 0; m < nb; ++m) {
    std::unordered_set<std::string> seen;
    const std::uint32_t pre_count = 1u << m;
    for (std::uint32_t mask = 0; mask < pre_count; ++mask) {
      std::vector<int> pos = ident;
      for (int s = 0; s < m; ++s)
        if (mask & (1u << s)) detail::apply_wire_swap(pos, b.slots[s].first, b.slots[s].second);
      if (seen.insert(detail::perm_bytes(pos)).second) prefixes[m].push_back(std::move(pos));
    }
    const int suf = nb - 1 - m;
    const std::uint32_t suf_count = 1u << suf;
    for (std::uint32_t mask = 0; mask < suf_count; ++mask) {
      std::vector<int> pos = ident;
      for (int s = 0; s < suf; ++s)
        if (mask & (1u << s))
          detail::apply_wire_swap(pos, b.slots[m + 1 + s].first, b.slots[m + 1 + s].second);
      suffixes[m].insert(detail::perm_bytes(pos));
    }
  }

  for (int i = 0; i < b.n; ++i) {
    for (int j = i + 1; j < b.n; ++j) {
      bool routed = false;
      for (int m = 0; m < nb && !routed; ++m) {
        const int a = b.slots[m].first;
        const int c = b.slots[m].second;
        for (const auto& pos : prefixes[m]) {
          const bool onto = (pos[i] == a && pos[j] == c) || (pos[i] == c && pos[j] == a);
          if (!onto) continue;
          // suffix must invert the prefix: sigma = pi^{-1}, i.e. the map
          // wire -> qubit of pi, read as a wire permutation.
          std::vector<int> inv(b.n);
          for (int q = 0; q < b.n; ++q) inv[pos[q]] = q;
          if (suffixes[m].count(detail::perm_bytes(inv))) {
            routed = true;
            break;
          }
        }
      }
      if (!routed) return Universality::unknown;
    }
  }
  return Universality::certified;
}

inline void to_json(nlohmann::json& j, const BlockArchitecture& b) {
  j = nlohmann::json{{"n", b.n}, {"name", b.name}, {"slots", nlohmann::json::array()}};
  for (const auto& [x, y] : b.slots) j["slots"].push_back({x, y});
}

inline void from_json(const nlohmann::json& j, BlockArchitecture& b) {
  b.n = j.at("n").get<int>();
  b.name = j.at("name").get<std::string>();
  b.slots.clear();
  for (const auto& s : j.at("slots")) {
    if (!s.is_array() || s.size() != 2)
      throw std::invalid_argument("architecture: each slot must be a pair");
    b.slots.emplace_back(s[0].get<int>(), s[1].get<int>());
  }
  validate_architecture(b);
}

inline BlockArchitecture load_architecture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("architecture: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j.get<BlockArchitecture>();
}

inline void save_architecture(const BlockArchitecture& b, const std::string& path) {
  validate_architecture(b);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("architecture: cannot write " + path);
  nlohmann::json j = b;
  out << j.dump(2) << "\n";
}

// A point of the construction map's domain: one SU(4) gate per slot per
// layer, in application order (layer-major, slot order within a layer).
struct CircuitPoint {
  BlockArchitecture arch;
  int k = 0;
  std::vector<cmatrix> gates;
};

inline void validate_point(const CircuitPoint& p) {
  validate_architecture(p.arch);
  if (p.k < 0) throw std::invalid_argument("point: k must be >= 0");
  const std::size_t expect = static_cast<std::size_t>(p.k) * p.arch.block_size();
  if (p.gates.size() != expect)
    throw std::invalid_argument("point: gate count must equal k * block_size");
  for (const auto& g : p.gates) {
    if (g.rows() != 4 || g.cols() != 4)
      throw std::invalid_argument("point: gates must be 4x4");
    if (unitarity_defect(g) > 1e-9)
      throw std::invalid_argument("point: gate not unitary within 1e-9");
    if (std::abs(g.determinant() - complexd(1.0, 0.0)) > 1e-9)
      throw std::invalid_argument("point: gate determinant must be 1 within 1e-9");
  }
}

inline CircuitPoint sample_point(const BlockArchitecture& b, int k, Rng& rng) {
  validate_architecture(b);
  if (k < 0) throw std::invalid_argument("sample_point: k must be >= 0");
  CircuitPoint p;
  p.arch = b;
  p.k = k;
  p.gates.reserve(static_cast<std::size_t>(k) * b.block_size());
  for (int m = 0; m < k * b.block_size(); ++m) p.gates.push_back(haar_random_su(4, rng));
  return p;
}

inline CircuitPoint identity_point(const BlockArchitecture& b, int k) {
  validate_architecture(b);
  if (k < 0) throw std::invalid_argument("identity_point: k must be >= 0");
  CircuitPoint p;
  p.arch = b;
  p.k = k;
  p.gates.assign(static_cast<std::size_t>(k) * b.block_size(), cmatrix::Identity(4, 4));
  return p;
}

inline std::pair<int, int> slot_of_gate(const BlockArchitecture& b, int m) {
  return b.slots[static_cast<std::size_t>(m) % b.slots.size()];
}

// Evaluate the construction map: the circuit unitary with gate m applied
// before gate m+1, so the product reads gates.back() * ... * gates.front().
inline cmatrix construct(const CircuitPoint& p) {
  validate_point(p);
  const int dim = 1 << p.arch.n;
  cmatrix u = cmatrix::Identity(dim, dim);
  for (std::size_t m = 0; m < p.gates.size(); ++m) {
    const cmatrix g = embed_two_qubit(p.gates[m], slot_of_gate(p.arch, static_cast<int>(m)), p.arch.n);
    u = g * u;
  }
  if (unitarity_defect(u) > 1e-8)
    throw std::runtime_error("construct: accumulated unitarity defect above 1e-8");
  if (std::abs(u.determinant() - complexd(1.0, 0.0)) > 1e-8)
    throw std::runtime_error("construct: determinant drifted from 1 beyond 1e-8");
  return u;
}

}  // namespace qcg
