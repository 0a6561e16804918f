#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace endolab {

// All experiments run on T^2 or T^3; storage is dimension-generic but
// capped at 3 so the hot loops stay on the stack.
inline constexpr int kMaxDim = 3;

using Vec  = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat  = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using IVec = Eigen::Matrix<long long, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define ENDOLAB_DEFINE_ERROR(Name) \
  struct Name : Error {            \
    using Error::Error;            \
  }

ENDOLAB_DEFINE_ERROR(NotHyperbolic);
ENDOLAB_DEFINE_ERROR(ComplexUnstablePair);
ENDOLAB_DEFINE_ERROR(UnsupportedDimension);
ENDOLAB_DEFINE_ERROR(NotFound);
ENDOLAB_DEFINE_ERROR(DegeneratePeriod);
ENDOLAB_DEFINE_ERROR(NewtonDivergence);
ENDOLAB_DEFINE_ERROR(FrameCollapse);
ENDOLAB_DEFINE_ERROR(NoConvergence);
ENDOLAB_DEFINE_ERROR(InsufficientScales);
ENDOLAB_DEFINE_ERROR(NoDomination);
ENDOLAB_DEFINE_ERROR(OrientationFlip);
ENDOLAB_DEFINE_ERROR(MatchingFailure);
ENDOLAB_DEFINE_ERROR(OracleMismatch);
ENDOLAB_DEFINE_ERROR(ConfigError);

#undef ENDOLAB_DEFINE_ERROR

inline double wrap01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;  // guards against x = -1e-18
  return r;
}

inline Vec wrap(const Vec& x) {
  Vec r = x;
  for (int i = 0; i < r.size(); ++i) r[i] = wrap01(r[i]);
  return r;
}

/// Distance in the quotient metric of T^d (min over integer translates).
inline double torusDist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    d -= std::round(d);
    s += d * d;
  }
  return std::sqrt(s);
}

// ------------------------------------------------------------------ RNG
// splitmix64: deterministic stream derivation, stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derives an independent substream seed from (seed, index).
inline std::uint64_t deriveStream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x2545f4914f6cdd1dull * (index + 1));
  return splitmix64(s);
}

/// Minimal xoshiro-free generator; std::mt19937_64 output is standardized
/// so it is safe for reproducible fixtures.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {}
  std::uint64_t next() { return splitmix64(s_); }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  Vec uniformVec(int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform();
    return v;
  }

 private:
  std::uint64_t s_;
};

// ------------------------------------------------------------- summation
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

// ------------------------------------------------------- small linear algebra

/// Modified Gram-Schmidt QR of B (square, d<=3). On return `q` holds the
/// orthonormal frame and `rdiag` the (positive) diagonal of R.
inline void mgsQR(const Mat& b, Mat& q, Vec& rdiag) {
  const int d = static_cast<int>(b.cols());
  q = b;
  rdiag.resize(d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) {
      double dot = q.col(i).dot(q.col(j));
      q.col(j) -= dot * q.col(i);
    }
    double n = q.col(j).norm();
    rdiag[j] = n;
    if (n > 0) q.col(j) /= n;
  }
}

/// Roots of x^2 + b x + c. Returns complex pair.
std::array<std::complex<double>, 2> solveMonicQuadratic(double b, double c);

/// Roots of x^3 + a x^2 + b x + c.
std::array<std::complex<double>, 3> solveMonicCubic(double a, double b, double c);

/// Eigenvalues of a real d x d matrix (d<=3) via closed-form characteristic
/// roots, sorted by ascending modulus.
std::vector<std::complex<double>> smallEigenvalues(const Mat& m);

}  // namespace endolab
