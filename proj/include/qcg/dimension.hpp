#pragma once

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>

#include "json.hpp"
#include "qcg/architecture.hpp"
#include "qcg/io.hpp"

namespace qcg {

namespace detail {

// Shared immutable basis cache; entries are built once and never mutated,
// so concurrent readers only contend on the lookup lock.
inline const GeneratorBasis& cached_basis(int d) {
  static std::map<int, GeneratorBasis> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, generator_basis(d)).first;
  return it->second;
}

inline double hs_inner_real(const cmatrix& a, const cmatrix& b) {
  // Tr(a b) for Hermitian a, b; the imaginary part cancels exactly.
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace detail

struct TangentFrame {
  CircuitPoint point;
  rmatrix jacobian;  // (4^n - 1) rows, 15 * k * block_size columns
};

// Differential of the construction map at a point, expressed in orthonormal
// coordinates on both sides. Column (m, j) is the tangent direction obtained
// by perturbing gate m along local generator j; with A the product of the
// gates applied after m, that direction equals A (i H_j) A† up to the usual
// right-translation by the point itself, which preserves rank and lets the
// whole frame be accumulated from suffix products alone.
inline TangentFrame jacobian_at(const CircuitPoint& p) {
  validate_point(p);
  if (p.k < 1) throw std::invalid_argument("jacobian_at: k must be >= 1");
  const int n = p.arch.n;
  const int dim = 1 << n;
  const int nb = p.arch.block_size();
  const int gate_count = p.k * nb;
  const GeneratorBasis& local = detail::cached_basis(4);
  const GeneratorBasis& global = detail::cached_basis(dim);
  const int rows = dim * dim - 1;

  std::vector<cmatrix> embedded(gate_count);
  for (int m = 0; m < gate_count; ++m)
    embedded[m] = embed_two_qubit(p.gates[m], slot_of_gate(p.arch, m), n);

  // after[m] = product of embedded gates applied after gate m.
  std::vector<cmatrix> after(gate_count);
  after[gate_count - 1] = cmatrix::Identity(dim, dim);
  for (int m = gate_count - 2; m >= 0; --m) after[m] = after[m + 1] * embedded[m + 1];

  // The 15 embedded local generators depend only on the slot, not the layer.
  std::vector<std::array<cmatrix, 15>> slot_gens(nb);
  for (int s = 0; s < nb; ++s)
    for (int j = 0; j < 15; ++j)
      slot_gens[s][j] = detail::embed_two_qubit_any(local.generators[j], p.arch.slots[s], n);

  rmatrix jac(rows, 15 * gate_count);
  const complexd iu(0.0, 1.0);
  for (int m = 0; m < gate_count; ++m) {
    const int s = m % nb;
    for (int j = 0; j < 15; ++j) {
      const cmatrix t = after[m] * (iu * slot_gens[s][j]) * after[m].adjoint();
      if (std::abs(t.trace()) > 1e-9)
        throw std::runtime_error("jacobian_at: tangent direction trace residue above 1e-9");
      const cmatrix ht = complexd(0.0, -1.0) * t;  // Hermitian part carrier
      const int col = 15 * m + j;
      for (int r = 0; r < rows; ++r)
        jac(r, col) = detail::hs_inner_real(global.generators[r], ht);
    }
  }
  return TangentFrame{p, std::move(jac)};
}

struct SampleRank {
  int rank = 0;                  // at the working tolerance
  std::array<int, 3> sweep{};    // at rel_tol * {0.1, 1, 10}
  bool tol_stable = false;
  std::uint64_t seed = 0;
};

inline SampleRank rank_sample(const BlockArchitecture& b, int k, double rel_tol, std::uint64_t seed) {
  Rng rng(seed);
  const CircuitPoint pt = sample_point(b, k, rng);
  const TangentFrame frame = jacobian_at(pt);
  const std::vector<double> sv = singular_values(frame.jacobian);
  SampleRank out;
  out.sweep = {rank_from_singular_values(sv, rel_tol * 0.1),
               rank_from_singular_values(sv, rel_tol),
               rank_from_singular_values(sv, rel_tol * 10.0)};
  out.rank = out.sweep[1];
  out.tol_stable = (out.sweep[0] == out.sweep[1] && out.sweep[1] == out.sweep[2]);
  out.seed = seed;
  return out;
}

struct DimensionEstimate {
  int d_estimate = 0;
  std::vector<SampleRank> samples;
  bool all_tol_stable = true;
};

// Max Jacobian rank over independently seeded Haar points. Tolerance-swept
// ranks that disagree mark the sample unstable; unstable samples are flagged
// and excluded from the estimate unless every sample is unstable.
inline DimensionEstimate accessible_dimension(const BlockArchitecture& b, int k, int samples,
                                              double rel_tol, std::uint64_t seed, int threads = 1) {
  validate_architecture(b);
  if (k < 0) throw std::invalid_argument("accessible_dimension: k must be >= 0");
  if (samples < 1) throw std::invalid_argument("accessible_dimension: samples must be >= 1");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("accessible_dimension: rel_tol must lie in (0, 1)");
  DimensionEstimate est;
  est.samples.resize(samples);
  if (k == 0) {
    for (int i = 0; i < samples; ++i) {
      est.samples[i].tol_stable = true;
      est.samples[i].seed = derive_seed(seed, i);
    }
    return est;
  }
  parallel_for(samples, threads, [&](std::size_t i) {
    est.samples[i] = rank_sample(b, k, rel_tol, derive_seed(seed, i));
  });
  int best_stable = -1, best_any = -1;
  for (const auto& s : est.samples) {
    best_any = std::max(best_any, s.rank);
    if (s.tol_stable)
      best_stable = std::max(best_stable, s.rank);
    else
      est.all_tol_stable = false;
  }
  est.d_estimate = (best_stable >= 0) ? best_stable : best_any;
  return est;
}

struct DimensionCurve {
  BlockArchitecture arch;
  int samples = 0;
  double rel_tol = 0.0;
  struct Entry {
    int k = 0;
    int d_estimate = 0;
    std::vector<SampleRank> sample_ranks;
    bool tol_stable = true;  // all samples swept clean
    std::uint64_t seed = 0;
  };
  std::vector<Entry> entries;  // k = 0 .. k_max

  bool all_tol_stable() const {
    for (const auto& e : entries)
      if (!e.tol_stable) return false;
    return true;
  }
};

inline DimensionCurve dimension_curve(const BlockArchitecture& b, int k_max, int samples,
                                      double rel_tol, std::uint64_t seed, int threads = 1) {
  validate_architecture(b);
  if (k_max < 1) throw std::invalid_argument("dimension_curve: k_max must be >= 1");
  DimensionCurve curve;
  curve.arch = b;
  curve.samples = samples;
  curve.rel_tol = rel_tol;
  curve.entries.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    const std::uint64_t entry_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    const DimensionEstimate est = accessible_dimension(b, k, samples, rel_tol, entry_seed, threads);
    DimensionCurve::Entry e;
    e.k = k;
    e.d_estimate = est.d_estimate;
    e.sample_ranks = est.samples;
    e.tol_stable = est.all_tol_stable;
    e.seed = entry_seed;
    curve.entries.push_back(std::move(e));
  }
  return curve;
}

// Structure-free upper bound: min(15 s, 4^n - 1) for s two-qubit gates.
inline long long allstructure_dimension_upper(int n, long long s) {
  if (n < 2) throw std::invalid_argument("allstructure_dimension_upper: n must be >= 2");
  if (s < 0) throw std::invalid_argument("allstructure_dimension_upper: s must be >= 0");
  const long long full = (1ll << (2 * n)) - 1;
  return std::min(15 * s, full);
}

struct RankProbe {
  int generic_rank = 0;
  int deficient_count = 0;
  std::vector<int> ranks;
};

inline RankProbe generic_rank_probe(const BlockArchitecture& b, int k, int trials, double rel_tol,
                                    std::uint64_t seed, int threads = 1) {
  if (trials < 2) throw std::invalid_argument("generic_rank_probe: trials must be >= 2");
  if (k < 1) throw std::invalid_argument("generic_rank_probe: k must be >= 1");
  RankProbe probe;
  probe.ranks.resize(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    probe.ranks[i] = rank_sample(b, k, rel_tol, derive_seed(seed, i)).rank;
  });
  probe.generic_rank = *std::max_element(probe.ranks.begin(), probe.ranks.end());
  for (int r : probe.ranks)
    if (r < probe.generic_rank) ++probe.deficient_count;
  return probe;
}

struct ShortcutRow {
  int k = 0;
  int d_estimate = 0;
  long long upper = 0;       // structure-free bound at budget floor(c * k)
  bool strictly_above = false;
};

struct GrowthReport {
  std::string architecture;
  int n = 0;
  int block_size = 0;
  int k_max = 0;
  bool eq2_pass = false;          // d <= min(15 k |B|, 4^n - 1) at every entry and sample
  bool monotone_pass = false;
  bool subadditive_pass = false;
  std::optional<int> saturation_k;
  double c2_fit = 0.0;            // min over measured k >= 1 of d(k)/k
  double shortcut_c = 0.0;
  std::vector<ShortcutRow> shortcut;
  bool tol_stable = true;
};

inline GrowthReport growth_report(const DimensionCurve& curve, double shortcut_c = 0.5) {
  if (curve.entries.empty()) throw std::invalid_argument("growth_report: empty curve");
  for (std::size_t i = 0; i < curve.entries.size(); ++i)
    if (curve.entries[i].k != static_cast<int>(i))
      throw std::invalid_argument("growth_report: curve must cover k = 0..k_max without gaps");
  if (!(shortcut_c > 0.0)) throw std::invalid_argument("growth_report: shortcut_c must be > 0");

  const BlockArchitecture& b = curve.arch;
  GrowthReport rep;
  rep.architecture = b.name;
  rep.n = b.n;
  rep.block_size = b.block_size();
  rep.k_max = curve.entries.back().k;
  rep.shortcut_c = shortcut_c;
  rep.tol_stable = curve.all_tol_stable();

  const long long full = (1ll << (2 * b.n)) - 1;
  rep.eq2_pass = true;
  for (const auto& e : curve.entries) {
    const long long cap = std::min<long long>(15ll * e.k * b.block_size(), full);
    if (e.d_estimate > cap) rep.eq2_pass = false;
    for (const auto& s : e.sample_ranks)
      if (s.rank > cap) rep.eq2_pass = false;
  }

  rep.monotone_pass = true;
  for (std::size_t i = 1; i < curve.entries.size(); ++i)
    if (curve.entries[i].d_estimate < curve.entries[i - 1].d_estimate) rep.monotone_pass = false;

  rep.subadditive_pass = true;
  const int k_max = rep.k_max;
  for (int k1 = 0; k1 <= k_max; ++k1)
    for (int k2 = 0; k1 + k2 <= k_max; ++k2)
      if (curve.entries[k1 + k2].d_estimate >
          curve.entries[k1].d_estimate + curve.entries[k2].d_estimate)
        rep.subadditive_pass = false;

  for (const auto& e : curve.entries)
    if (e.d_estimate >= full) {
      rep.saturation_k = e.k;
      break;
    }

  rep.c2_fit = 0.0;
  bool first = true;
  for (const auto& e : curve.entries) {
    if (e.k < 1) continue;
    const double ratio = static_cast<double>(e.d_estimate) / e.k;
    if (first || ratio < rep.c2_fit) rep.c2_fit = ratio;
    first = false;
  }

  for (const auto& e : curve.entries) {
    ShortcutRow row;
    row.k = e.k;
    row.d_estimate = e.d_estimate;
    row.upper = allstructure_dimension_upper(b.n, static_cast<long long>(shortcut_c * e.k));
    row.strictly_above = e.d_estimate > row.upper;
    rep.shortcut.push_back(row);
  }
  return rep;
}

// CSV body for a curve: header row plus one row per k. Callers prepend any
// comment lines (timestamp, config hash) they need.
inline void write_curve_csv_rows(std::ostream& os, const DimensionCurve& curve) {
  os << "k,d_estimate,samples,deficient_count,tol_stable,seed\n";
  for (const auto& e : curve.entries) {
    int deficient = 0;
    for (const auto& s : e.sample_ranks)
      if (s.rank < e.d_estimate) ++deficient;
    os << e.k << ',' << e.d_estimate << ',' << e.sample_ranks.size() << ',' << deficient << ','
       << (e.tol_stable ? 1 : 0) << ',' << e.seed << "\n";
  }
}

inline nlohmann::json curve_to_json(const DimensionCurve& curve) {
  nlohmann::json j;
  j["architecture"] = curve.arch;
  j["samples"] = curve.samples;
  j["rel_tol"] = curve.rel_tol;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : curve.entries) {
    nlohmann::json je;
    je["k"] = e.k;
    je["d_estimate"] = e.d_estimate;
    je["tol_stable"] = e.tol_stable;
    je["seed"] = e.seed;
    je["sample_ranks"] = nlohmann::json::array();
    for (const auto& s : e.sample_ranks) {
      je["sample_ranks"].push_back(
          {{"rank", s.rank}, {"sweep", s.sweep}, {"tol_stable", s.tol_stable}, {"seed", s.seed}});
    }
    j["entries"].push_back(std::move(je));
  }
  return j;
}

inline nlohmann::json growth_report_to_json(const GrowthReport& rep) {
  nlohmann::json j;
  j["architecture"] = rep.architecture;
  j["n"] = rep.n;
  j["block_size"] = rep.block_size;
  j["k_max"] = rep.k_max;
  j["eq2_pass"] = rep.eq2_pass;
  j["monotone_pass"] = rep.monotone_pass;
  j["subadditive_pass"] = rep.subadditive_pass;
  if (rep.saturation_k)
    j["saturation_k"] = *rep.saturation_k;
  else
    j["saturation_k"] = nullptr;
  j["c2_fit"] = rep.c2_fit;
  j["shortcut_c"] = rep.shortcut_c;
  j["tol_stable"] = rep.tol_stable;
  j["shortcut"] = nlohmann::json::array();
  for (const auto& row : rep.shortcut)
    j["shortcut"].push_back({{"k", row.k},
                             {"d_estimate", row.d_estimate},
                             {"upper", row.upper},
                             {"strictly_above", row.strictly_above}});
  return j;
}

}  // namespace qcg
