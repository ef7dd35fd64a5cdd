#pragma once

#include <array>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qcg/linalg.hpp"
#include "qcg/ring.hpp"

namespace qcg {

// Row-major exact 2x2 matrix over the cyclotomic ring. The raw layer does
// no phase bookkeeping; ExactUnitary below adds the projective invariant.
using RingMatrix2 = std::array<RingScalar, 4>;

inline RingMatrix2 ring_mat_identity() {
  return {RingScalar::one(), RingScalar::zero(), RingScalar::zero(), RingScalar::one()};
}

inline RingMatrix2 ring_mat_mul(const RingMatrix2& x, const RingMatrix2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

inline RingMatrix2 ring_mat_adjoint(const RingMatrix2& x) {
  return {x[0].conj(), x[2].conj(), x[1].conj(), x[3].conj()};
}

inline bool ring_mat_equal(const RingMatrix2& x, const RingMatrix2& y) {
  return x[0] == y[0] && x[1] == y[1] && x[2] == y[2] && x[3] == y[3];
}

inline bool ring_mat_is_identity(const RingMatrix2& x) {
  return ring_mat_equal(x, ring_mat_identity());
}

// Exact unitarity: U†U equals the identity in the ring, no tolerances.
inline bool ring_mat_is_unitary(const RingMatrix2& x) {
  return ring_mat_is_identity(ring_mat_mul(ring_mat_adjoint(x), x));
}

// Entrywise multiplication by w: numerator (a, b, c, d) -> (-d, a, b, c).
// Rotating by a unit preserves each entry's canonical reduced form.
inline RingMatrix2 ring_mat_times_omega(const RingMatrix2& x) {
  RingMatrix2 r;
  for (int i = 0; i < 4; ++i)
    r[i] = RingScalar(-x[i].d(), x[i].a(), x[i].b(), x[i].c(), x[i].k());
  return r;
}

inline int ring_mat_compare(const RingMatrix2& x, const RingMatrix2& y) {
  for (int i = 0; i < 4; ++i) {
    const int c = x[i].compare(y[i]);
    if (c != 0) return c;
  }
  return 0;
}

// Representative of the phase class {w^m U}: the lexicographic minimum over
// the eight multiples. Allocation-free ordering on (k, a, b, c, d) tuples.
inline RingMatrix2 ring_mat_phase_canonical(const RingMatrix2& x) {
  RingMatrix2 best = x;
  RingMatrix2 cur = x;
  for (int m = 1; m < 8; ++m) {
    cur = ring_mat_times_omega(cur);
    if (ring_mat_compare(cur, best) < 0) best = cur;
  }
  return best;
}

inline std::string ring_mat_key_bytes(const RingMatrix2& x) {
  std::string out;
  for (const auto& e : x) e.append_bytes(out);
  return out;
}

inline cmatrix ring_mat_to_complex(const RingMatrix2& x) {
  cmatrix m(2, 2);
  m(0, 0) = x[0].to_complex();
  m(0, 1) = x[1].to_complex();
  m(1, 0) = x[2].to_complex();
  m(1, 1) = x[3].to_complex();
  return m;
}

// Exactly represented single-qubit unitary, stored as the canonical phase
// representative of its class. Equality therefore means phase equality.
class ExactUnitary {
 public:
  ExactUnitary() : e_(ring_mat_phase_canonical(ring_mat_identity())) {}

  static ExactUnitary from_entries(const RingMatrix2& m, bool require_unitary = true) {
    if (require_unitary && !ring_mat_is_unitary(m))
      throw std::invalid_argument("ExactUnitary: entries are not exactly unitary");
    return ExactUnitary(ring_mat_phase_canonical(m));
  }

  static ExactUnitary identity() { return ExactUnitary(); }

  const RingMatrix2& entries() const { return e_; }
  const RingScalar& entry(int r, int c) const { return e_[2 * r + c]; }

  friend ExactUnitary multiply(const ExactUnitary& u, const ExactUnitary& v) {
    return ExactUnitary(ring_mat_phase_canonical(ring_mat_mul(u.e_, v.e_)));
  }

  ExactUnitary inverse() const { return ExactUnitary(ring_mat_phase_canonical(ring_mat_adjoint(e_))); }

  bool is_unitary_exact() const { return ring_mat_is_unitary(e_); }

  friend bool phase_equal(const ExactUnitary& u, const ExactUnitary& v) {
    return ring_mat_equal(u.e_, v.e_);
  }
  friend bool operator==(const ExactUnitary& u, const ExactUnitary& v) { return phase_equal(u, v); }
  friend bool operator!=(const ExactUnitary& u, const ExactUnitary& v) { return !(u == v); }

  std::string canonical_key() const { return ring_mat_key_bytes(e_); }

  cmatrix to_complex_matrix() const { return ring_mat_to_complex(e_); }

 private:
  explicit ExactUnitary(RingMatrix2 m) : e_(std::move(m)) {}

  RingMatrix2 e_;
};

// Literal generator matrices of the Clifford+T gate set, as written: H, the
// phase gates S and S†, and the pi/8 gates T and T†. All entries live in
// the ring with k <= 1.
inline std::vector<std::pair<std::string, RingMatrix2>> clifford_t_raw_gates() {
  const RingScalar zero = RingScalar::zero();
  const RingScalar one = RingScalar::one();
  const RingScalar h = RingScalar(1, 0, 0, 0, 1);       // 1/sqrt(2)
  const RingScalar neg_h = RingScalar(-1, 0, 0, 0, 1);  // -1/sqrt(2)
  std::vector<std::pair<std::string, RingMatrix2>> g;
  g.emplace_back("H", RingMatrix2{h, h, h, neg_h});
  g.emplace_back("S", RingMatrix2{one, zero, zero, RingScalar::omega_power(2)});
  g.emplace_back("Sdg", RingMatrix2{one, zero, zero, RingScalar::omega_power(-2)});
  g.emplace_back("T", RingMatrix2{one, zero, zero, RingScalar::omega_power(1)});
  g.emplace_back("Tdg", RingMatrix2{one, zero, zero, RingScalar::omega_power(-1)});
  return g;
}

struct GateSet {
  std::string name;
  std::vector<std::pair<std::string, RingMatrix2>> elements;
  bool closed_under_inverse = false;
};

// Structural findings on a gate set; empty means well-formed. Messages are
// stable strings used by config validation.
inline std::vector<std::string> gateset_findings(const GateSet& gs) {
  std::vector<std::string> findings;
  if (gs.elements.empty()) {
    findings.push_back("gate set is empty");
    return findings;
  }
  for (const auto& [label, m] : gs.elements)
    if (!ring_mat_is_unitary(m)) findings.push_back("gate " + label + " is not exactly unitary");
  if (!findings.empty()) return findings;

  std::vector<RingMatrix2> canon;
  canon.reserve(gs.elements.size());
  for (const auto& [label, m] : gs.elements) canon.push_back(ring_mat_phase_canonical(m));

  const RingMatrix2 id_canon = ring_mat_phase_canonical(ring_mat_identity());
  for (std::size_t i = 0; i < canon.size(); ++i) {
    if (ring_mat_equal(canon[i], id_canon))
      findings.push_back("gate " + gs.elements[i].first + " is the identity class");
    for (std::size_t j = i + 1; j < canon.size(); ++j)
      if (ring_mat_equal(canon[i], canon[j]))
        findings.push_back("gates " + gs.elements[i].first + " and " + gs.elements[j].first +
                           " are phase-equal duplicates");
  }
  for (std::size_t i = 0; i < canon.size(); ++i) {
    const RingMatrix2 inv = ring_mat_phase_canonical(ring_mat_adjoint(gs.elements[i].second));
    bool found = false;
    for (const auto& c : canon)
      if (ring_mat_equal(c, inv)) {
        found = true;
        break;
      }
    if (!found)
      findings.push_back("not inverse-closed: missing inverse of " + gs.elements[i].first);
  }
  return findings;
}

inline GateSet make_gateset(std::string name,
                            std::vector<std::pair<std::string, RingMatrix2>> elements,
                            bool verify = true) {
  GateSet gs;
  gs.name = std::move(name);
  gs.elements = std::move(elements);
  const auto findings = gateset_findings(gs);
  gs.closed_under_inverse = true;
  for (const auto& f : findings)
    if (f.rfind("not inverse-closed", 0) == 0) gs.closed_under_inverse = false;
  if (verify && !findings.empty())
    throw std::invalid_argument("gate set '" + gs.name + "': " + findings.front());
  return gs;
}

inline GateSet clifford_t_gateset() { return make_gateset("clifford_t", clifford_t_raw_gates()); }

// JSON schema: {"name": ..., "elements": [{"label": ..., "entries":
// [[a,b,c,d,k] x 4 row-major]}]}. Integer components are limited to the
// int64 range on file, which covers every gate set written in practice.
inline nlohmann::json gateset_to_json(const GateSet& gs) {
  nlohmann::json j;
  j["name"] = gs.name;
  j["elements"] = nlohmann::json::array();
  for (const auto& [label, m] : gs.elements) {
    nlohmann::json e;
    e["label"] = label;
    e["entries"] = nlohmann::json::array();
    for (const auto& s : m)
      e["entries"].push_back({s.a().convert_to<long long>(), s.b().convert_to<long long>(),
                              s.c().convert_to<long long>(), s.d().convert_to<long long>(),
                              s.k()});
    j["elements"].push_back(std::move(e));
  }
  return j;
}

inline GateSet gateset_from_json(const nlohmann::json& j, bool verify = true) {
  std::vector<std::pair<std::string, RingMatrix2>> elements;
  for (const auto& e : j.at("elements")) {
    const auto& ent = e.at("entries");
    if (!ent.is_array() || ent.size() != 4)
      throw std::invalid_argument("gate set: each gate needs 4 entries");
    RingMatrix2 m;
    for (int i = 0; i < 4; ++i) {
      const auto& t = ent[i];
      if (!t.is_array() || t.size() != 5)
        throw std::invalid_argument("gate set: entry must be [a,b,c,d,k]");
      m[i] = RingScalar(bigint(t[0].get<long long>()), bigint(t[1].get<long long>()),
                        bigint(t[2].get<long long>()), bigint(t[3].get<long long>()),
                        t[4].get<int>());
    }
    elements.emplace_back(e.at("label").get<std::string>(), std::move(m));
  }
  return make_gateset(j.at("name").get<std::string>(), std::move(elements), verify);
}

inline GateSet load_gateset(const std::string& path, bool verify = true) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("gate set: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return gateset_from_json(j, verify);
}

}  // namespace qcg
