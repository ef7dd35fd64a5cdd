#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcg {

using bigint = boost::multiprecision::cpp_int;

// Scalar (a + b w + c w^2 + d w^3) / sqrt(2)^k with w = exp(i pi/4), so
// w^2 = i and w^4 = -1. Every value has a unique canonical form: k = 0, or
// the numerator not divisible by sqrt(2) = w - w^3. Instances are always
// kept canonical, which makes equality componentwise.
class RingScalar {
 public:
  RingScalar() : k_(0) {}

  RingScalar(bigint a, bigint b, bigint c, bigint d, int k = 0)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), k_(k) {
    if (k < 0) throw std::invalid_argument("RingScalar: k must be >= 0");
    reduce_();
  }

  static RingScalar from_int(long long v) { return RingScalar(bigint(v), 0, 0, 0, 0); }
  static RingScalar zero() { return RingScalar(); }
  static RingScalar one() { return from_int(1); }

  // w^m for any integer m; w^4 = -1 folds the exponent into 0..7.
  static RingScalar omega_power(long long m) {
    long long r = m % 8;
    if (r < 0) r += 8;
    const int sign = (r >= 4) ? -1 : 1;
    bigint comp[4] = {0, 0, 0, 0};
    comp[r % 4] = sign;
    return RingScalar(comp[0], comp[1], comp[2], comp[3], 0);
  }

  const bigint& a() const { return a_; }
  const bigint& b() const { return b_; }
  const bigint& c() const { return c_; }
  const bigint& d() const { return d_; }
  int k() const { return k_; }

  bool is_zero() const { return a_ == 0 && b_ == 0 && c_ == 0 && d_ == 0; }

  friend bool operator==(const RingScalar& x, const RingScalar& y) {
    return x.k_ == y.k_ && x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.d_ == y.d_;
  }
  friend bool operator!=(const RingScalar& x, const RingScalar& y) { return !(x == y); }

  RingScalar operator-() const {
    RingScalar r;
    r.a_ = -a_;
    r.b_ = -b_;
    r.c_ = -c_;
    r.d_ = -d_;
    r.k_ = k_;  // negation preserves canonicality
    return r;
  }

  friend RingScalar operator+(const RingScalar& x, const RingScalar& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    RingScalar xs = x, ys = y;
    const int k = std::max(x.k_, y.k_);
    xs.scale_to_exponent_(k);
    ys.scale_to_exponent_(k);
    return RingScalar(xs.a_ + ys.a_, xs.b_ + ys.b_, xs.c_ + ys.c_, xs.d_ + ys.d_, k);
  }

  friend RingScalar operator-(const RingScalar& x, const RingScalar& y) { return x + (-y); }

  friend RingScalar operator*(const RingScalar& x, const RingScalar& y) {
    // w^4 = -1 wraps the cyclic convolution with a sign.
    bigint a = x.a_ * y.a_ - x.b_ * y.d_ - x.c_ * y.c_ - x.d_ * y.b_;
    bigint b = x.a_ * y.b_ + x.b_ * y.a_ - x.c_ * y.d_ - x.d_ * y.c_;
    bigint c = x.a_ * y.c_ + x.b_ * y.b_ + x.c_ * y.a_ - x.d_ * y.d_;
    bigint d = x.a_ * y.d_ + x.b_ * y.c_ + x.c_ * y.b_ + x.d_ * y.a_;
    return RingScalar(std::move(a), std::move(b), std::move(c), std::move(d), x.k_ + y.k_);
  }

  // Complex conjugation: w -> w^{-1} = -w^3.
  RingScalar conj() const {
    RingScalar r;
    r.a_ = a_;
    r.b_ = -d_;
    r.c_ = -c_;
    r.d_ = -b_;
    r.k_ = k_;  // conjugation preserves canonicality
    return r;
  }

  std::complex<double> to_complex() const {
    const double s = 0.70710678118654752440;  // sqrt(2)/2
    const double av = a_.convert_to<double>();
    const double bv = b_.convert_to<double>();
    const double cv = c_.convert_to<double>();
    const double dv = d_.convert_to<double>();
    const double scale = std::pow(2.0, -0.5 * k_);
    return {(av + s * (bv - dv)) * scale, (cv + s * (bv + dv)) * scale};
  }

  // Total order on canonical forms: (k, a, b, c, d) lexicographic.
  int compare(const RingScalar& o) const {
    if (k_ != o.k_) return k_ < o.k_ ? -1 : 1;
    if (a_ != o.a_) return a_ < o.a_ ? -1 : 1;
    if (b_ != o.b_) return b_ < o.b_ ? -1 : 1;
    if (c_ != o.c_) return c_ < o.c_ ? -1 : 1;
    if (d_ != o.d_) return d_ < o.d_ ? -1 : 1;
    return 0;
  }

  // Injective, platform-independent byte serialization of the canonical form.
  void append_bytes(std::string& out) const {
    append_u32_(out, static_cast<std::uint32_t>(k_));
    append_bigint_(out, a_);
    append_bigint_(out, b_);
    append_bigint_(out, c_);
    append_bigint_(out, d_);
  }

  // Numerator multiplied by sqrt(2) = w - w^3, same k; used by exponent
  // alignment and exposed for tests of the divisibility rule.
  RingScalar times_sqrt2_numerator() const {
    RingScalar r;
    r.a_ = b_ - d_;
    r.b_ = a_ + c_;
    r.c_ = b_ + d_;
    r.d_ = c_ - a_;
    r.k_ = k_;
    return r;
  }

  bool numerator_divisible_by_sqrt2() const {
    return (a_ - c_) % 2 == 0 && (b_ - d_) % 2 == 0;
  }

 private:
  void reduce_() {
    if (is_zero()) {
      k_ = 0;
      return;
    }
    while (k_ > 0 && numerator_divisible_by_sqrt2()) {
      // numerator / sqrt(2), exact by the parity test
      bigint na = (b_ - d_) / 2;
      bigint nb = (a_ + c_) / 2;
      bigint nc = (b_ + d_) / 2;
      bigint nd = (c_ - a_) / 2;
      a_ = std::move(na);
      b_ = std::move(nb);
      c_ = std::move(nc);
      d_ = std::move(nd);
      --k_;
    }
  }

  // Rescale so this and a partner share denominator exponent k >= k_.
  void scale_to_exponent_(int k) {
    int delta = k - k_;
    if (delta <= 0) return;
    if (delta % 2 == 1) {
      *this = times_sqrt2_numerator();
      delta -= 1;
    }
    const int shift = delta / 2;
    a_ <<= shift;
    b_ <<= shift;
    c_ <<= shift;
    d_ <<= shift;
    k_ = k;
  }

  static void append_u32_(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }

  static void append_bigint_(std::string& out, const bigint& v) {
    if (v == 0) {
      out.push_back(1);
      append_u32_(out, 0);
      return;
    }
    out.push_back(v < 0 ? 0 : 2);
    std::string mag;
    bigint abs_v = v < 0 ? bigint(-v) : v;
    while (abs_v != 0) {
      const bigint low = abs_v & 0xff;
      mag.push_back(static_cast<char>(low.convert_to<unsigned>()));
      abs_v >>= 8;
    }
    append_u32_(out, static_cast<std::uint32_t>(mag.size()));
    out += mag;
  }

  bigint a_, b_, c_, d_;
  int k_;
};

// Canonicalization is a constructor invariant; reduce on an existing value
// is the identity and is kept for callers that want to state the intent.
inline RingScalar reduce(const RingScalar& x) { return x; }

inline RingScalar ring_add(const RingScalar& x, const RingScalar& y) { return x + y; }
inline RingScalar ring_mul(const RingScalar& x, const RingScalar& y) { return x * y; }
inline RingScalar ring_conj(const RingScalar& x) { return x.conj(); }

}  // namespace qcg
