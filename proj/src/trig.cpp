#include "endolab/trig.hpp"

namespace endolab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double TrigPoly::eval(const Vec& x) const {
  double r = 0.0;
  for (const auto& t : terms) {
    double phase = 0.0;
    for (int i = 0; i < dim; ++i) phase += t.freq[static_cast<size_t>(i)] * x[i];
    phase *= kTwoPi;
    r += t.c * std::cos(phase) + t.s * std::sin(phase);
  }
  return r;
}

Vec TrigPoly::grad(const Vec& x) const {
  Vec g = Vec::Zero(dim);
  for (const auto& t : terms) {
    double phase = 0.0;
    for (int i = 0; i < dim; ++i) phase += t.freq[static_cast<size_t>(i)] * x[i];
    phase *= kTwoPi;
    double dphi = -t.c * std::sin(phase) + t.s * std::cos(phase);
    for (int i = 0; i < dim; ++i)
      g[i] += kTwoPi * t.freq[static_cast<size_t>(i)] * dphi;
  }
  return g;
}

double TrigPoly::supBound() const {
  double b = 0.0;
  for (const auto& t : terms) b += std::hypot(t.c, t.s);
  return b;
}

double TrigPoly::gradBound() const {
  double b = 0.0;
  for (const auto& t : terms) {
    double k2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double k = t.freq[static_cast<size_t>(i)];
      k2 += k * k;
    }
    b += kTwoPi * std::sqrt(k2) * std::hypot(t.c, t.s);
  }
  return b;
}

double TrigPoly::hessBound() const {
  double b = 0.0;
  for (const auto& t : terms) {
    double k2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double k = t.freq[static_cast<size_t>(i)];
      k2 += k * k;
    }
    b += kTwoPi * kTwoPi * k2 * std::hypot(t.c, t.s);
  }
  return b;
}

Vec TrigDisplacement::eval(const Vec& x) const {
  Vec v = Vec::Zero(dim);
  for (int i = 0; i < static_cast<int>(comps.size()); ++i)
    v[i] = comps[static_cast<size_t>(i)].eval(x);
  return v;
}

Mat TrigDisplacement::jacobian(const Vec& x) const {
  Mat j = Mat::Zero(dim, dim);
  for (int i = 0; i < static_cast<int>(comps.size()); ++i)
    j.row(i) = comps[static_cast<size_t>(i)].grad(x).transpose();
  return j;
}

double TrigDisplacement::supBound() const {
  double s = 0.0;
  for (const auto& c : comps) {
    double b = c.supBound();
    s += b * b;
  }
  return std::sqrt(s);
}

double TrigDisplacement::jacBound() const {
  double s = 0.0;
  for (const auto& c : comps) {
    double b = c.gradBound();
    s += b * b;
  }
  return std::sqrt(s);
}

double TrigDisplacement::hessBound() const {
  double s = 0.0;
  for (const auto& c : comps) s = std::max(s, c.hessBound());
  return s;
}

}  // namespace endolab
