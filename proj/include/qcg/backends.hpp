#pragma once

#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "qcg/exact_unitary.hpp"

namespace qcg {

template <typename E>
struct Generator {
  std::string label;
  E element;
};

// A finitely generated group presented operationally: identity, product,
// inverse, an injective canonical key (platform-stable bytes), and an
// inverse-closed, identity-free generator list.
template <typename B>
concept GroupBackend = requires(const B& b, const typename B::element_type& x,
                                const typename B::element_type& y) {
  typename B::element_type;
  { b.name() } -> std::convertible_to<std::string>;
  { b.identity() } -> std::same_as<typename B::element_type>;
  { b.multiply(x, y) } -> std::same_as<typename B::element_type>;
  { b.inverse(x) } -> std::same_as<typename B::element_type>;
  { b.canonical_key(x) } -> std::same_as<std::string>;
  { b.generators() } -> std::same_as<const std::vector<Generator<typename B::element_type>>&>;
};

// Single-qubit Clifford+T group over the exact ring. Projective mode (the
// default) keys elements by their phase class, so words are counted in the
// quotient by the eight global phases; the raw mode keeps phases distinct.
class CliffordTBackend {
 public:
  using element_type = RingMatrix2;

  explicit CliffordTBackend(GateSet set = clifford_t_gateset(), bool projective = true)
      : projective_(projective), set_name_(set.name) {
    const auto findings = gateset_findings(set);
    if (!findings.empty())
      throw std::invalid_argument("CliffordTBackend: " + findings.front());
    for (auto& [label, m] : set.elements) gens_.push_back({label, m});
  }

  std::string name() const {
    return (projective_ ? "clifford-t" : "clifford-t-raw") +
           (set_name_ == "clifford_t" ? std::string() : ":" + set_name_);
  }
  bool projective() const { return projective_; }

  element_type identity() const { return ring_mat_identity(); }
  element_type multiply(const element_type& x, const element_type& y) const {
    return ring_mat_mul(x, y);
  }
  element_type inverse(const element_type& x) const { return ring_mat_adjoint(x); }
  std::string canonical_key(const element_type& x) const {
    return projective_ ? ring_mat_key_bytes(ring_mat_phase_canonical(x)) : ring_mat_key_bytes(x);
  }
  const std::vector<Generator<element_type>>& generators() const { return gens_; }

 private:
  bool projective_;
  std::string set_name_;
  std::vector<Generator<element_type>> gens_;
};

// Free abelian group Z^d with the standard generators +-e_i.
class LatticeBackend {
 public:
  using element_type = std::vector<std::int64_t>;

  explicit LatticeBackend(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("LatticeBackend: dim must be >= 1");
    for (int i = 0; i < dim; ++i) {
      element_type plus(dim, 0), minus(dim, 0);
      plus[i] = 1;
      minus[i] = -1;
      gens_.push_back({"+e" + std::to_string(i), std::move(plus)});
      gens_.push_back({"-e" + std::to_string(i), std::move(minus)});
    }
  }

  std::string name() const { return "lattice" + std::to_string(dim_); }
  int dim() const { return dim_; }

  element_type identity() const { return element_type(dim_, 0); }
  element_type multiply(const element_type& x, const element_type& y) const {
    element_type r(dim_);
    for (int i = 0; i < dim_; ++i) r[i] = x[i] + y[i];
    return r;
  }
  element_type inverse(const element_type& x) const {
    element_type r(dim_);
    for (int i = 0; i < dim_; ++i) r[i] = -x[i];
    return r;
  }
  std::string canonical_key(const element_type& x) const {
    std::string s;
    s.reserve(8 * dim_);
    for (std::int64_t v : x) {
      const std::uint64_t u = static_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) s.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
    }
    return s;
  }
  const std::vector<Generator<element_type>>& generators() const { return gens_; }

 private:
  int dim_;
  std::vector<Generator<element_type>> gens_;
};

// Symmetric group on m points, elements as one-line images. The default
// generator list is the adjacent transpositions, which are involutions and
// hence inverse-closed.
class PermutationBackend {
 public:
  using element_type = std::vector<std::uint8_t>;

  explicit PermutationBackend(int m, std::vector<std::vector<int>> generators = {}) : m_(m) {
    if (m < 2 || m > 255) throw std::invalid_argument("PermutationBackend: m must be in [2, 255]");
    if (generators.empty()) {
      for (int i = 0; i + 1 < m; ++i) {
        element_type t(m);
        for (int q = 0; q < m; ++q) t[q] = static_cast<std::uint8_t>(q);
        std::swap(t[i], t[i + 1]);
        gens_.push_back({"t" + std::to_string(i), std::move(t)});
      }
    } else {
      int idx = 0;
      for (const auto& g : generators) {
        gens_.push_back({"g" + std::to_string(idx++), check_perm_(g)});
      }
    }
    // identity-free and inverse-closed, by exact membership
    for (const auto& g : gens_) {
      if (g.element == identity())
        throw std::invalid_argument("PermutationBackend: identity generator not allowed");
      const element_type inv = inverse(g.element);
      bool found = false;
      for (const auto& h : gens_)
        if (h.element == inv) {
          found = true;
          break;
        }
      if (!found)
        throw std::invalid_argument("PermutationBackend: generator list not inverse-closed");
    }
  }

  std::string name() const { return "permutation" + std::to_string(m_); }
  int points() const { return m_; }

  element_type identity() const {
    element_type e(m_);
    for (int q = 0; q < m_; ++q) e[q] = static_cast<std::uint8_t>(q);
    return e;
  }
  // Composition x after y: (x*y)(i) = x[y[i]].
  element_type multiply(const element_type& x, const element_type& y) const {
    element_type r(m_);
    for (int i = 0; i < m_; ++i) r[i] = x[y[i]];
    return r;
  }
  element_type inverse(const element_type& x) const {
    element_type r(m_);
    for (int i = 0; i < m_; ++i) r[x[i]] = static_cast<std::uint8_t>(i);
    return r;
  }
  std::string canonical_key(const element_type& x) const {
    return std::string(reinterpret_cast<const char*>(x.data()), x.size());
  }
  const std::vector<Generator<element_type>>& generators() const { return gens_; }

 private:
  element_type check_perm_(const std::vector<int>& g) const {
    if (static_cast<int>(g.size()) != m_)
      throw std::invalid_argument("PermutationBackend: generator has wrong length");
    std::vector<bool> seen(m_, false);
    element_type e(m_);
    for (int i = 0; i < m_; ++i) {
      if (g[i] < 0 || g[i] >= m_ || seen[g[i]])
        throw std::invalid_argument("PermutationBackend: not a permutation");
      seen[g[i]] = true;
      e[i] = static_cast<std::uint8_t>(g[i]);
    }
    return e;
  }

  int m_;
  std::vector<Generator<element_type>> gens_;
};

static_assert(GroupBackend<CliffordTBackend>);
static_assert(GroupBackend<LatticeBackend>);
static_assert(GroupBackend<PermutationBackend>);

}  // namespace qcg
