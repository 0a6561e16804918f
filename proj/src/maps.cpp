#include "endolab/maps.hpp"

#include <sstream>

namespace endolab {

void validateShear(const ShearMove& move, int dim) {
  if (move.direction.size() != dim)
    throw ConfigError("shear direction has wrong dimension");
  if (std::abs(move.direction.norm() - 1.0) > 1e-9)
    throw ConfigError("shear direction must be a unit vector");
  if (move.modulator.dim != dim)
    throw ConfigError("shear modulator has wrong dimension");
  for (const auto& t : move.modulator.terms)
    for (int j = 0; j < dim; ++j)
      if (std::abs(move.direction[j]) > 1e-12 && t.freq[static_cast<size_t>(j)] != 0)
        throw ConfigError(
            "shear modulator may only depend on coordinates annihilated by "
            "the shear direction");
}

Vec resolveDirection(const std::string& selector, const SpectralSplitting& s) {
  const int d = s.dim();
  if (selector == "su-eigvec") {
    Vec v = s.basis.col(d - 1);
    return v / v.norm();
  }
  if (selector.rfind("axis:", 0) == 0) {
    int k = std::stoi(selector.substr(5));
    if (k < 0 || k >= d) throw ConfigError("axis index out of range: " + selector);
    Vec v = Vec::Zero(d);
    v[k] = 1.0;
    return v;
  }
  throw ConfigError("unknown direction selector: " + selector);
}

static double operatorNorm(const Mat& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

EndomorphismModel EndomorphismModel::make(const IntMatrix& a,
                                          PerturbationSpec pert,
                                          double spectral_tol) {
  EndomorphismModel m;
  m.a_ = a;
  m.split_ = spectral_splitting(a, spectral_tol);
  m.pert_ = std::move(pert);
  m.areal_ = a.real();
  m.ainv_ = m.areal_.inverse();
  m.offsets_ = preimage_offsets(a);

  const int d = a.dim;
  double normA = operatorNorm(m.areal_);
  double cond = operatorNorm(m.split_.basis) * operatorNorm(m.split_.adapted_inverse);

  double bound = 0.0;
  switch (m.pert_.kind) {
    case PerturbationKind::None:
      break;
    case PerturbationKind::ShearChain: {
      double prod = 1.0;
      for (const auto& mv : m.pert_.moves) {
        validateShear(mv, d);
        prod *= 1.0 + std::abs(mv.amplitude) * mv.modulator.gradBound();
      }
      bound = normA * (prod - 1.0);
      break;
    }
    case PerturbationKind::ManufacturedConjugacy: {
      if (m.pert_.bump.dim != d || m.pert_.bump.comps.empty())
        throw ConfigError("manufactured conjugacy needs a bump displacement");
      double L = m.pert_.bump.jacBound();
      if (L >= 1.0)
        throw ConfigError("bump Lipschitz bound must be < 1 for invertibility");
      bound = normA * (L + L / (1.0 - L) + L * L / (1.0 - L));
      break;
    }
    case PerturbationKind::GenericDisplacement: {
      if (m.pert_.eta.dim != d || m.pert_.eta.comps.empty())
        throw ConfigError("generic displacement needs a field eta");
      bound = std::abs(m.pert_.epsilon) * normA * m.pert_.eta.jacBound();
      break;
    }
  }
  m.c1_bound_ = cond * bound;
  m.c1_budget_ = m.split_.gapToOne() / 4.0;
  return m;
}

EndomorphismModel EndomorphismModel::scaledPerturbation(double t) const {
  PerturbationSpec p = pert_;
  switch (p.kind) {
    case PerturbationKind::None:
      break;
    case PerturbationKind::ShearChain:
      for (auto& mv : p.moves) mv.amplitude *= t;
      break;
    case PerturbationKind::ManufacturedConjugacy:
      for (auto& comp : p.bump.comps)
        for (auto& term : comp.terms) {
          term.c *= t;
          term.s *= t;
        }
      break;
    case PerturbationKind::GenericDisplacement:
      p.epsilon *= t;
      break;
  }
  return make(a_, std::move(p));
}

Vec EndomorphismModel::phiLift(const Vec& x) const {
  switch (pert_.kind) {
    case PerturbationKind::None:
      return x;
    case PerturbationKind::ShearChain: {
      Vec y = x;
      for (const auto& mv : pert_.moves)
        y += mv.amplitude * mv.modulator.eval(y) * mv.direction;
      return y;
    }
    case PerturbationKind::GenericDisplacement:
      return x + pert_.epsilon * pert_.eta.eval(x);
    case PerturbationKind::ManufacturedConjugacy:
      return ainv_ * applyLift(x);
  }
  return x;
}

Vec EndomorphismModel::phiInverseLift(const Vec& z) const {
  switch (pert_.kind) {
    case PerturbationKind::None:
      return z;
    case PerturbationKind::ShearChain: {
      Vec y = z;
      for (auto it = pert_.moves.rbegin(); it != pert_.moves.rend(); ++it)
        y -= it->amplitude * it->modulator.eval(y) * it->direction;
      return y;
    }
    case PerturbationKind::GenericDisplacement:
      return newtonPreimage(areal_ * z, ainv_ * (areal_ * z));
    case PerturbationKind::ManufacturedConjugacy:
      return liftInverse(areal_ * z);
  }
  return z;
}

Vec EndomorphismModel::conjHLift(const Vec& x) const {
  return x + pert_.bump.eval(x);
}

Vec EndomorphismModel::conjHInvLift(const Vec& x) const {
  Vec y = x;
  for (int it = 0; it < 200; ++it) {
    Vec yn = x - pert_.bump.eval(y);
    double delta = (yn - y).cwiseAbs().maxCoeff();
    y = yn;
    if (delta < 1e-14) break;
  }
  return y;
}

Mat EndomorphismModel::conjDH(const Vec& x) const {
  Mat j = pert_.bump.jacobian(x);
  for (int i = 0; i < dim(); ++i) j(i, i) += 1.0;
  return j;
}

Vec EndomorphismModel::applyLift(const Vec& x) const {
  if (pert_.kind == PerturbationKind::ManufacturedConjugacy)
    return conjHLift(areal_ * conjHInvLift(x));
  return areal_ * phiLift(x);
}

Vec EndomorphismModel::liftInverse(const Vec& y) const {
  switch (pert_.kind) {
    case PerturbationKind::None:
      return ainv_ * y;
    case PerturbationKind::ShearChain:
      return phiInverseLift(ainv_ * y);
    case PerturbationKind::ManufacturedConjugacy:
      return conjHLift(ainv_ * conjHInvLift(y));
    case PerturbationKind::GenericDisplacement:
      return newtonPreimage(y, ainv_ * y);
  }
  return ainv_ * y;
}

Mat EndomorphismModel::differential(const Vec& x) const {
  const int d = dim();
  switch (pert_.kind) {
    case PerturbationKind::None:
      return areal_;
    case PerturbationKind::ShearChain: {
      Mat dphi = Mat::Identity(d, d);
      Vec y = x;
      for (const auto& mv : pert_.moves) {
        Vec g = mv.modulator.grad(y);
        // (I + amp * dir * grad^T) * dphi
        dphi += (mv.amplitude * mv.direction) * (g.transpose() * dphi);
        y += mv.amplitude * mv.modulator.eval(y) * mv.direction;
      }
      return areal_ * dphi;
    }
    case PerturbationKind::GenericDisplacement: {
      Mat j = pert_.eta.jacobian(x) * pert_.epsilon;
      for (int i = 0; i < d; ++i) j(i, i) += 1.0;
      return areal_ * j;
    }
    case PerturbationKind::ManufacturedConjugacy: {
      Vec z = conjHInvLift(x);
      Mat dh_z = conjDH(z);
      Mat dh_az = conjDH(areal_ * z);
      return dh_az * areal_ * dh_z.inverse();
    }
  }
  return areal_;
}

double EndomorphismModel::logJacobian(const Vec& x) const {
  if (conservative()) {
    // shear moves are unit-determinant by construction
    return std::log(static_cast<double>(degree()));
  }
  return std::log(std::abs(differential(x).determinant()));
}

Vec EndomorphismModel::newtonPreimage(const Vec& target, const Vec& seed) const {
  Vec x = seed;
  for (int it = 0; it < 50; ++it) {
    Vec r = applyLift(x) - target;
    double res = r.cwiseAbs().maxCoeff();
    if (res < 1e-12) return x;
    Mat j = differential(x);
    x -= j.inverse() * r;
  }
  double res = (applyLift(x) - target).cwiseAbs().maxCoeff();
  std::ostringstream os;
  os << "Newton preimage failed to converge: residual " << res << " from seed ("
     << seed.transpose() << "); perturbation likely outside the certified C1 budget";
  throw NewtonDivergence(os.str());
}

std::vector<Vec> EndomorphismModel::preimages(const Vec& y) const {
  Vec y0 = wrap(y);
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(degree()));
  for (const auto& r : offsets_) {
    Vec target = y0;
    for (int i = 0; i < dim(); ++i) target[i] += static_cast<double>(r[i]);
    out.push_back(wrap(liftInverse(target)));
  }
  return out;
}

std::vector<Vec> EndomorphismModel::randomBackwardOrbit(const Vec& x0, int n,
                                                        std::uint64_t stream) const {
  Rng rng(stream);
  std::vector<Vec> chain;
  chain.reserve(static_cast<size_t>(n));
  Vec cur = wrap(x0);
  for (int k = 0; k < n; ++k) {
    auto pre = preimages(cur);
    cur = pre[static_cast<size_t>(rng.below(pre.size()))];
    chain.push_back(cur);
  }
  return chain;
}

double EndomorphismModel::c1GridSup(int per_axis) const {
  const int d = dim();
  double sup = 0.0;
  std::array<int, kMaxDim> idx{};
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = idx[static_cast<size_t>(i)] / static_cast<double>(per_axis);
    sup = std::max(sup, (differential(x) - areal_).norm());
    int k = d - 1;
    while (k >= 0 && ++idx[static_cast<size_t>(k)] == per_axis) {
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return sup;
}

}  // namespace endolab
