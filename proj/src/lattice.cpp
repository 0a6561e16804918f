#include "endolab/lattice.hpp"

#include <algorithm>
#include <complex>

namespace endolab {

// ----------------------------------------------------------- root solvers

std::array<std::complex<double>, 2> solveMonicQuadratic(double b, double c) {
  double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    double sq = std::sqrt(disc);
    // stable formula: avoid cancellation on the small root
    double r1 = (b >= 0.0) ? (-b - sq) / 2.0 : (-b + sq) / 2.0;
    double r2 = (r1 != 0.0) ? c / r1 : (-b - r1);
    return {std::complex<double>(r1, 0.0), std::complex<double>(r2, 0.0)};
  }
  double re = -b / 2.0, im = std::sqrt(-disc) / 2.0;
  return {std::complex<double>(re, im), std::complex<double>(re, -im)};
}

std::array<std::complex<double>, 3> solveMonicCubic(double a, double b, double c) {
  // depressed form t^3 + p t + q with x = t - a/3
  double p = b - a * a / 3.0;
  double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  double shift = -a / 3.0;
  double disc = -4.0 * p * p * p - 27.0 * q * q;
  std::array<std::complex<double>, 3> roots;
  if (disc >= 0.0) {
    // three real roots, trigonometric form
    if (p >= 0.0) {
      // only possible with p ~ 0, triple-ish root
      double r = std::cbrt(-q);
      roots = {std::complex<double>(r + shift, 0), std::complex<double>(r + shift, 0),
               std::complex<double>(r + shift, 0)};
      return roots;
    }
    double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      double t = m * std::cos(theta - 2.0 * M_PI * k / 3.0);
      roots[static_cast<size_t>(k)] = std::complex<double>(t + shift, 0.0);
    }
    return roots;
  }
  // one real root, Cardano
  double sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  double u = std::cbrt(-q / 2.0 + sq);
  double v = std::cbrt(-q / 2.0 - sq);
  double t0 = u + v;
  double re = -t0 / 2.0;
  double im = std::sqrt(3.0) / 2.0 * (u - v);
  roots = {std::complex<double>(t0 + shift, 0.0),
           std::complex<double>(re + shift, im),
           std::complex<double>(re + shift, -im)};
  return roots;
}

// polish roots of a monic polynomial with a few Newton steps; the closed
// forms above are already accurate, this pins fixtures to ~1 ulp
static std::complex<double> polishRoot(const std::vector<double>& monic,
                                       std::complex<double> z) {
  const int d = static_cast<int>(monic.size());  // monic: c0..c_{d-1}, lead 1
  for (int it = 0; it < 3; ++it) {
    std::complex<double> p(1.0, 0.0), dp(0.0, 0.0);
    for (int i = d - 1; i >= 0; --i) {
      dp = dp * z + p;
      p = p * z + monic[static_cast<size_t>(i)];
    }
    if (std::abs(dp) == 0.0) break;
    z -= p / dp;
  }
  return z;
}

std::vector<std::complex<double>> smallEigenvalues(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  std::vector<std::complex<double>> ev;
  if (d == 1) {
    ev = {std::complex<double>(m(0, 0), 0.0)};
  } else if (d == 2) {
    double tr = m(0, 0) + m(1, 1);
    double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    auto r = solveMonicQuadratic(-tr, det);
    ev = {r[0], r[1]};
    std::vector<double> monic = {det, -tr};
    for (auto& z : ev) z = polishRoot(monic, z);
  } else if (d == 3) {
    double tr = m.trace();
    double c2 = -tr;
    double c1 = 0.0;  // sum of principal 2x2 minors
    c1 += m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    c1 += m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    c1 += m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    double c0 = -m.determinant();
    auto r = solveMonicCubic(c2, c1, c0);
    ev = {r[0], r[1], r[2]};
    std::vector<double> monic = {c0, c1, c2};
    for (auto& z : ev) z = polishRoot(monic, z);
  } else {
    throw UnsupportedDimension("smallEigenvalues: d must be <= 3");
  }
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return a.imag() < b.imag();
  });
  return ev;
}

// -------------------------------------------------------------- IntMatrix

IntMatrix IntMatrix::fromRows(const std::vector<std::vector<long long>>& rows) {
  IntMatrix m;
  m.dim = static_cast<int>(rows.size());
  if (m.dim < 1 || m.dim > kMaxDim)
    throw UnsupportedDimension("IntMatrix: dim must be 1..3");
  for (int i = 0; i < m.dim; ++i) {
    if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != m.dim)
      throw ConfigError("IntMatrix: ragged rows");
    for (int j = 0; j < m.dim; ++j)
      m.at(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return m;
}

IntMatrix IntMatrix::identity(int d) {
  IntMatrix m;
  m.dim = d;
  for (int i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::companionCubic(long long a, long long b, long long c) {
  // companion of x^3 + a x^2 + b x + c
  return fromRows({{0, 0, -c}, {1, 0, -b}, {0, 1, -a}});
}

IntMatrix IntMatrix::blockDiag(const IntMatrix& m2, long long scalar) {
  if (m2.dim != 2) throw ConfigError("blockDiag expects a 2x2 block");
  IntMatrix m;
  m.dim = 3;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.at(i, j) = m2.at(i, j);
  m.at(2, 2) = scalar;
  return m;
}

long long IntMatrix::det() const {
  if (dim == 1) return at(0, 0);
  if (dim == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

IntMatrix IntMatrix::adjugate() const {
  IntMatrix a;
  a.dim = dim;
  if (dim == 1) {
    a.at(0, 0) = 1;
    return a;
  }
  if (dim == 2) {
    a.at(0, 0) = at(1, 1);
    a.at(0, 1) = -at(0, 1);
    a.at(1, 0) = -at(1, 0);
    a.at(1, 1) = at(0, 0);
    return a;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
      int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
      // adj = transpose of cofactor matrix
      a.at(j, i) = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
    }
  return a;
}

IntMatrix IntMatrix::mul(const IntMatrix& o) const {
  IntMatrix r;
  r.dim = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      long long s = 0;
      for (int k = 0; k < dim; ++k) s += at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

IntMatrix IntMatrix::pow(int n) const {
  IntMatrix r = identity(dim);
  for (int i = 0; i < n; ++i) r = r.mul(*this);
  return r;
}

IntMatrix IntMatrix::minusIdentity() const {
  IntMatrix r = *this;
  for (int i = 0; i < dim; ++i) r.at(i, i) -= 1;
  return r;
}

IVec IntMatrix::apply(const IVec& v) const {
  IVec r(dim);
  for (int i = 0; i < dim; ++i) {
    long long s = 0;
    for (int j = 0; j < dim; ++j) s += at(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

std::vector<long long> IntMatrix::charPoly() const {
  if (dim == 2) {
    long long tr = at(0, 0) + at(1, 1);
    return {det(), -tr, 1};
  }
  if (dim == 3) {
    long long tr = at(0, 0) + at(1, 1) + at(2, 2);
    long long m01 = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    long long m02 = at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0);
    long long m12 = at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1);
    return {-det(), m01 + m02 + m12, -tr, 1};
  }
  if (dim == 1) return {-at(0, 0), 1};
  throw UnsupportedDimension("charPoly: d must be <= 3");
}

Mat IntMatrix::real() const {
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = static_cast<double>(at(i, j));
  return m;
}

// --------------------------------------------------------------- splitting

std::vector<double> SpectralSplitting::unstableLogModuli() const {
  std::vector<double> r;
  for (int i = stable_dim; i < dim(); ++i)
    r.push_back(std::log(moduli[static_cast<size_t>(i)]));
  return r;
}

double SpectralSplitting::stableLogModulus() const {
  if (stable_dim != 1) throw Error("stableLogModulus requires stable_dim == 1");
  return std::log(moduli[0]);
}

double SpectralSplitting::gapToOne() const {
  double g = std::numeric_limits<double>::infinity();
  for (double m : moduli) g = std::min(g, std::abs(m - 1.0));
  return g;
}

// kernel vector of (M - lambda I) for a real eigenvalue, d <= 3
static Vec realEigenvector(const Mat& m, double lambda) {
  const int d = static_cast<int>(m.rows());
  Mat b = m;
  for (int i = 0; i < d; ++i) b(i, i) -= lambda;
  if (d == 2) {
    Vec v1(2), v2(2);
    v1 << b(0, 1), -b(0, 0);
    v2 << b(1, 1), -b(1, 0);
    Vec v = (v1.norm() >= v2.norm()) ? v1 : v2;
    return v / v.norm();
  }
  // d == 3: cross products of row pairs span the row space complement
  Eigen::Vector3d r0 = b.row(0), r1 = b.row(1), r2 = b.row(2);
  Eigen::Vector3d c01 = r0.cross(r1), c02 = r0.cross(r2), c12 = r1.cross(r2);
  Eigen::Vector3d best = c01;
  if (c02.norm() > best.norm()) best = c02;
  if (c12.norm() > best.norm()) best = c12;
  Vec v(3);
  v << best(0), best(1), best(2);
  return v / v.norm();
}

SpectralSplitting spectral_splitting(const IntMatrix& m, double tol) {
  const int d = m.dim;
  if (d < 2 || d > 3)
    throw UnsupportedDimension("spectral_splitting: d must be 2 or 3");
  if (m.det() == 0) throw NotHyperbolic("singular matrix");

  SpectralSplitting s;
  s.degree = m.degree();
  s.eigenvalues = smallEigenvalues(m.real());
  for (auto& z : s.eigenvalues) s.moduli.push_back(std::abs(z));

  for (double mod : s.moduli)
    if (std::abs(mod - 1.0) < tol)
      throw NotHyperbolic("eigenvalue of modulus 1 within tolerance");

  for (const auto& z : s.eigenvalues)
    if (std::abs(z.imag()) > tol * (1.0 + std::abs(z)))
      throw ComplexUnstablePair(
          "non-real eigenvalue pair: dominated one-dimensional blocks "
          "unavailable");

  s.stable_dim = 0;
  for (double mod : s.moduli)
    if (mod < 1.0) ++s.stable_dim;

  // group unstable moduli into dominated blocks (equal moduli share a block)
  for (int i = s.stable_dim; i < d;) {
    int j = i + 1;
    while (j < d && std::abs(s.moduli[static_cast<size_t>(j)] -
                             s.moduli[static_cast<size_t>(i)]) <
                        1e-9 * s.moduli[static_cast<size_t>(i)])
      ++j;
    s.unstable_dims.push_back(j - i);
    i = j;
  }

  s.basis.resize(d, d);
  for (int i = 0; i < d; ++i)
    s.basis.col(i) = realEigenvector(m.real(), s.eigenvalues[static_cast<size_t>(i)].real());
  if (std::abs(s.basis.determinant()) < 1e-9)
    throw NotHyperbolic("defective eigenbasis (repeated eigenvalue)");
  s.adapted_inverse = s.basis.inverse();
  return s;
}

// ---------------------------------------------------------- irreducibility

bool check_irreducible(const IntMatrix& m) {
  if (m.dim > 3)
    throw UnsupportedDimension("check_irreducible supports d <= 3");
  std::vector<long long> c = m.charPoly();  // monic, integer
  long long c0 = c[0];
  if (c0 == 0) return false;  // root 0
  auto eval = [&](long long x) {
    long long v = 1;  // leading coefficient
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i)
      v = v * x + c[static_cast<size_t>(i)];
    return v;
  };
  long long a0 = std::llabs(c0);
  for (long long p = 1; p * p <= a0; ++p) {
    if (a0 % p != 0) continue;
    for (long long r : {p, -p, a0 / p, -(a0 / p)})
      if (eval(r) == 0) return false;
  }
  return true;
}

IntMatrix search_irreducible_model(int coeff_bound) {
  if (coeff_bound < 0) throw ConfigError("coeff_bound must be >= 0");
  const long long B = coeff_bound;
  for (long long a = -B; a <= B; ++a)
    for (long long b = -B; b <= B; ++b)
      for (long long c = -B; c <= B; ++c) {
        if (std::llabs(c) < 2) continue;  // need degree >= 2
        IntMatrix m = IntMatrix::companionCubic(a, b, c);
        auto roots = solveMonicCubic(static_cast<double>(a),
                                     static_cast<double>(b),
                                     static_cast<double>(c));
        bool allReal = true;
        for (const auto& z : roots)
          if (std::abs(z.imag()) > 1e-9) allReal = false;
        if (!allReal) continue;
        std::array<double, 3> mod{std::abs(roots[0]), std::abs(roots[1]),
                                  std::abs(roots[2])};
        std::sort(mod.begin(), mod.end());
        bool hyper = true;
        for (double x : mod)
          if (std::abs(x - 1.0) < 1e-9) hyper = false;
        if (!hyper) continue;
        if (!(mod[0] < 1.0 && mod[1] > 1.0 && mod[2] > 1.0)) continue;
        if (std::abs(mod[2] - mod[1]) < 1e-9) continue;  // distinct unstable
        if (!check_irreducible(m)) continue;
        return m;
      }
  throw NotFound("no irreducible hyperbolic companion matrix within bound");
}

// --------------------------------------------------------- lattice cosets

static bool cosetEquivalent(const IntMatrix& adj, long long det, const IVec& a,
                            const IVec& b) {
  // a ~ b  iff  M^{ -1}(a-b) in Z^d  iff  adj(M)(a-b) == 0 mod det
  IVec d = a - b;
  IVec w = adj.apply(d);
  for (int i = 0; i < w.size(); ++i)
    if (w[i] % det != 0) return false;
  return true;
}

std::vector<IVec> preimage_offsets(const IntMatrix& m) {
  long long det = m.det();
  if (det == 0) throw DegeneratePeriod("singular matrix has no coset system");
  long long D = std::llabs(det);
  const int d = m.dim;
  std::vector<IVec> reps;
  if (D == 1) {
    reps.push_back(IVec::Zero(d));
    return reps;
  }
  IntMatrix adj = m.adjugate();
  // D * Z^d is contained in M Z^d, so every coset has a representative in
  // [0, D)^d; scan lexicographically and keep the first of each class.
  std::array<long long, kMaxDim> idx{};
  while (true) {
    IVec r(d);
    for (int i = 0; i < d; ++i) r[i] = idx[static_cast<size_t>(i)];
    bool fresh = true;
    for (const auto& p : reps)
      if (cosetEquivalent(adj, det, r, p)) {
        fresh = false;
        break;
      }
    if (fresh) {
      reps.push_back(r);
      if (static_cast<long long>(reps.size()) == D) break;
    }
    // lexicographic increment, last coordinate fastest
    int k = d - 1;
    while (k >= 0 && ++idx[static_cast<size_t>(k)] == D) {
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  if (static_cast<long long>(reps.size()) != D)
    throw Error("coset scan did not find |det| representatives");
  return reps;
}

long long count_linear_periodic(const IntMatrix& m, int n) {
  long long det = m.pow(n).minusIdentity().det();
  if (det == 0) throw DegeneratePeriod("det(M^n - I) = 0");
  return std::llabs(det);
}

}  // namespace endolab
