#ifndef OPENTRI_NUMERICS_HPP
#define OPENTRI_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

// Small shared numerics: Brent root finding, adaptive Gauss-Kronrod
// quadrature, and the deterministic per-sample RNG streams used by the
// verification samplers.

namespace opentri {

// Brent's method on [a, b] with f(a) and f(b) of opposite sign.
template <typename F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double xtol = 1e-14, int max_iter = 120) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0) == (fb < 0))
    throw std::invalid_argument("brent_root: no sign change in bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb < 0) == (fc < 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;
    } else {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2 * p < std::min(3 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

namespace detail {
// 7-point Gauss / 15-point Kronrod nodes on [-1, 1].
inline constexpr double kGk15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double kGk15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <typename F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
  const double hl = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double gauss = 0.0;
  kronrod = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(mid + hl * kGk15Nodes[i]);
    kronrod += kGk15Weights[i] * v;
    if (i % 2 == 1) gauss += kG7Weights[i / 2] * v;
  }
  kronrod *= hl;
  gauss *= hl;
  err = std::abs(kronrod - gauss);
}

template <typename F>
double gk_adaptive(F&& f, double a, double b, double tol, int depth) {
  double v, err;
  gk15(f, a, b, v, err);
  if (err <= tol || depth <= 0) return v;
  const double mid = 0.5 * (a + b);
  return gk_adaptive(f, a, mid, 0.5 * tol, depth - 1) +
         gk_adaptive(f, mid, b, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Gauss-Kronrod quadrature of f over [a, b]. Handles integrable
// endpoint behaviour by subdivision; depth-limited.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-11,
                          int max_depth = 48) {
  if (a == b) return 0.0;
  const double sign = (b >= a) ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  return sign * detail::gk_adaptive(f, lo, hi, tol, max_depth);
}

// Deterministic per-sample random stream: splitmix64-seeded xoshiro256**.
// Verification samplers draw one stream per sample index, so reports are
// byte-identical regardless of worker count.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& si : s_) si = splitmix(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(
                                                  hi - lo + 1));
  }

 private:
  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace opentri

#endif
