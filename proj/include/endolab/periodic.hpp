#pragma once

#include "endolab/maps.hpp"

namespace endolab {

struct PeriodicOrbitRecord {
  int period = 0;
  Vec point;                    // torus representative
  IVec lattice;                 // lift displacement: F^n(p) = p + m
  double jacobian = 0.0;        // |det Df^n(p)|
  std::vector<double> moduli;   // eigenvalue moduli of Df^n(p), ascending
  double residual = 0.0;
};

/// All n-periodic points of the linear toral map, via exact lattice
/// enumeration; count = |det(A^n - I)|.
std::vector<Vec> linear_periodic_points(const IntMatrix& a, int n);

/// Newton continuation of one periodic point from a linear seed, on the
/// lift with the seed's lattice displacement held fixed.
PeriodicOrbitRecord continue_periodic(const EndomorphismModel& f, int n,
                                      const Vec& seed);

struct ContinuationResult {
  std::vector<PeriodicOrbitRecord> records;  // deduplicated
  int duplicates = 0;                        // seeds that merged
};

/// Continuation from every linear seed, deduplicated at quotient distance
/// 1e-8.
ContinuationResult continue_all_periodic(const EndomorphismModel& f, int n);

struct VolumeVerdict {
  bool consistent_with_volume = true;
  std::vector<bool> per_record;
  double max_relative_deviation = 0.0;
};

/// Jac f^n(p) = k^n at every periodic point, the C1-invariant-volume
/// criterion; relative tolerance 1e-8.
VolumeVerdict volume_criterion(const std::vector<PeriodicOrbitRecord>& records,
                               long long degree_k);

struct SpecialnessVerdict {
  bool pass = true;
  double max_deviation = 0.0;
};

/// Compares per-orbit stable exponents (1/n log of smallest eigenvalue
/// modulus of Df^n(p)) with lambda^s of the linearization, tolerance 1e-8.
/// A pass is consistent with the map being special; a fail certifies it is
/// not.
SpecialnessVerdict periodic_specialness_certificate(
    const EndomorphismModel& f, const std::vector<PeriodicOrbitRecord>& records);

}  // namespace endolab
