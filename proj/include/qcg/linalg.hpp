#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qcg/rng.hpp"

namespace qcg {

using complexd = std::complex<double>;
using cmatrix = Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic>;
using rmatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

// Frobenius norm of U†U - I.
inline double unitarity_defect(const cmatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("unitarity_defect: matrix must be square");
  return (m.adjoint() * m - cmatrix::Identity(m.rows(), m.cols())).norm();
}

inline bool is_unitary(const cmatrix& m, double tol = 1e-10) {
  return unitarity_defect(m) <= tol;
}

inline bool is_hermitian(const cmatrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_anti_hermitian(const cmatrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return (m + m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_traceless(const cmatrix& m, double tol = 1e-12) {
  return std::abs(m.trace()) <= tol;
}

struct GeneratorBasis {
  int dim = 0;
  std::vector<cmatrix> generators;  // d^2 - 1 traceless Hermitian, orthonormal in HS inner product
};

// Orthonormal traceless Hermitian basis of the d-dimensional special unitary
// algebra (times i). Enumeration order: for i < j lexicographic, the
// symmetric then antisymmetric off-diagonal pair; then the d-1 diagonal
// generators. For d = 2 these are the Pauli matrices scaled by 1/sqrt(2).
inline GeneratorBasis generator_basis(int d) {
  if (d < 2) throw std::invalid_argument("generator_basis: d must be >= 2");
  std::vector<cmatrix> gens;
  gens.reserve(static_cast<std::size_t>(d) * d - 1);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      cmatrix x = cmatrix::Zero(d, d);
      x(i, j) = s;
      x(j, i) = s;
      gens.push_back(std::move(x));
      cmatrix y = cmatrix::Zero(d, d);
      y(i, j) = complexd(0.0, -s);
      y(j, i) = complexd(0.0, s);
      gens.push_back(std::move(y));
    }
  }
  for (int l = 1; l < d; ++l) {
    cmatrix z = cmatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int i = 0; i < l; ++i) z(i, i) = norm;
    z(l, l) = -static_cast<double>(l) * norm;
    gens.push_back(std::move(z));
  }
  // Explicit re-orthonormalization pass; the constructions above are already
  // orthonormal, this pins the invariant against rounding.
  for (std::size_t r = 0; r < gens.size(); ++r) {
    for (std::size_t q = 0; q < r; ++q) {
      const complexd proj = (gens[q].adjoint() * gens[r]).trace();
      gens[r] -= proj * gens[q];
    }
    const double nrm = std::sqrt(std::real((gens[r].adjoint() * gens[r]).trace()));
    if (nrm < 1e-12) throw std::runtime_error("generator_basis: degenerate element");
    gens[r] /= nrm;
  }
  return GeneratorBasis{d, std::move(gens)};
}

// exp(A) for anti-Hermitian A, via the spectral decomposition of iA.
inline cmatrix expm_antihermitian(const cmatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("expm_antihermitian: matrix must be square");
  if (!is_anti_hermitian(a, 1e-10))
    throw std::invalid_argument("expm_antihermitian: input not anti-Hermitian within 1e-10");
  const cmatrix h = complexd(0.0, 1.0) * a;  // Hermitian
  Eigen::SelfAdjointEigenSolver<cmatrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_antihermitian: eigensolver failed");
  const auto& lam = es.eigenvalues();
  const cmatrix& v = es.eigenvectors();
  cmatrix out = cmatrix::Zero(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    // exp(a) = exp(-i h) = sum_i exp(-i lam_i) v_i v_i†
    const complexd phase = std::polar(1.0, -lam(i));
    out.noalias() += phase * (v.col(i) * v.col(i).adjoint());
  }
  return out;
}

// Haar-distributed element of the special unitary group of dimension d.
// Complex Ginibre draw, QR, diagonal phase fix of R (Mezzadri's recipe),
// then division by the principal d-th root of the determinant.
inline cmatrix haar_random_su(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("haar_random_su: d must be >= 2");
  cmatrix g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      g(r, c) = complexd(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<cmatrix> qr(g);
  cmatrix q = qr.householderQ() * cmatrix::Identity(d, d);
  const cmatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    const complexd rc = r(c, c);
    const double mag = std::abs(rc);
    q.col(c) *= (mag > 0.0) ? (rc / mag) : complexd(1.0, 0.0);
  }
  const complexd det = q.determinant();
  q *= std::polar(1.0, -std::arg(det) / d);
  return q;
}

inline std::vector<double> singular_values(const rmatrix& m) {
  if (m.size() == 0) throw std::invalid_argument("singular_values: empty matrix");
  if (!m.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  Eigen::JacobiSVD<rmatrix> svd(m);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

// Count of singular values strictly above rel_tol * sigma_max. The values
// must be sorted non-increasing (as singular_values returns them).
inline int rank_from_singular_values(const std::vector<double>& sv, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("rank: rel_tol must lie in (0, 1)");
  if (sv.empty()) throw std::invalid_argument("rank: no singular values");
  const double smax = sv.front();
  if (smax == 0.0) return 0;
  const double cut = rel_tol * smax;
  int rank = 0;
  while (rank < static_cast<int>(sv.size()) && sv[rank] > cut) ++rank;
  return rank;
}

inline int numerical_rank(const rmatrix& m, double rel_tol) {
  return rank_from_singular_values(singular_values(m), rel_tol);
}

namespace detail {

// Linear two-qubit embedding without the unitarity gate; also used to lift
// algebra generators, which are Hermitian rather than unitary.
inline cmatrix embed_two_qubit_any(const cmatrix& u, std::pair<int, int> qubits, int n) {
  const int qi = qubits.first;
  const int qj = qubits.second;
  if (n < 2) throw std::invalid_argument("embed_two_qubit: n must be >= 2");
  if (qi == qj || qi < 0 || qj < 0 || qi >= n || qj >= n)
    throw std::invalid_argument("embed_two_qubit: qubit indices must be distinct and in range");
  if (u.rows() != 4 || u.cols() != 4)
    throw std::invalid_argument("embed_two_qubit: gate must be 4x4");
  const int size = 1 << n;
  const int shift_i = n - 1 - qi;
  const int shift_j = n - 1 - qj;
  const int mask = (1 << shift_i) | (1 << shift_j);
  cmatrix m = cmatrix::Zero(size, size);
  for (int col = 0; col < size; ++col) {
    const int bi = (col >> shift_i) & 1;
    const int bj = (col >> shift_j) & 1;
    const int a = (bi << 1) | bj;
    const int base = col & ~mask;
    for (int ap = 0; ap < 4; ++ap) {
      const int row = base | (((ap >> 1) & 1) << shift_i) | ((ap & 1) << shift_j);
      m(row, col) = u(ap, a);
    }
  }
  return m;
}

}  // namespace detail

// Lift a two-qubit unitary to n qubits, acting on the ordered pair
// (qubits.first, qubits.second). Qubit 0 is the most significant bit of the
// computational index, and qubits.first is the more significant qubit of the
// 4-dimensional gate index.
inline cmatrix embed_two_qubit(const cmatrix& u, std::pair<int, int> qubits, int n) {
  if (u.rows() == 4 && u.cols() == 4 && !is_unitary(u, 1e-6))
    throw std::invalid_argument("embed_two_qubit: gate not unitary");
  return detail::embed_two_qubit_any(u, qubits, n);
}

}  // namespace qcg
