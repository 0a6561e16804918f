#pragma once

#include "endolab/experiment.hpp"

namespace endolab::testhelp {

inline IntMatrix mat2() { return IntMatrix::fromRows({{3, 1}, {1, 1}}); }
inline IntMatrix mat3() { return IntMatrix::blockDiag(mat2(), 2); }

/// Canonical two-move shear family on T^3: a strong-unstable shear
/// modulated by x3 and an axis-2 shear modulated by (x1, x2).
inline EndomorphismModel crossShear(double ea, double eb) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "model": {
      "matrix": [[3, 1, 0], [1, 1, 0], [0, 0, 2]],
      "perturbation": {
        "kind": "shear-chain",
        "moves": [
          {"direction": "su-eigvec", "amplitude": 0.0,
           "modulator": {"terms": [{"freq": [0, 0, 1], "sin": 1.0}]}},
          {"direction": "axis:2", "amplitude": 0.0,
           "modulator": {"terms": [{"freq": [1, 0, 0], "sin": 1.0},
                                   {"freq": [0, 1, 0], "cos": 0.7}]}}
        ]
      }
    },
    "seed": 1
  })");
  doc["model"]["perturbation"]["moves"][0]["amplitude"] = ea;
  doc["model"]["perturbation"]["moves"][1]["amplitude"] = eb;
  return build_model(parse_config(doc));
}

/// Conjugated linear model f = H A H^{-1} with a small trig bump H - Id.
inline EndomorphismModel manufactured(double amp) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "model": {
      "matrix": [[3, 1, 0], [1, 1, 0], [0, 0, 2]],
      "perturbation": {
        "kind": "manufactured",
        "bump": {"components": [
          {"terms": [{"freq": [1, 0, 0], "sin": 0.0}]},
          {"terms": [{"freq": [0, 1, 0], "cos": 0.0}]},
          {"terms": [{"freq": [0, 0, 1], "sin": 0.0}]}
        ]}
      }
    },
    "seed": 1
  })");
  auto& comps = doc["model"]["perturbation"]["bump"]["components"];
  comps[0]["terms"][0]["sin"] = amp;
  comps[1]["terms"][0]["cos"] = amp;
  comps[2]["terms"][0]["sin"] = amp;
  return build_model(parse_config(doc));
}

/// Generic (non volume preserving) displacement family.
inline EndomorphismModel generic(double eps) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "model": {
      "matrix": [[3, 1, 0], [1, 1, 0], [0, 0, 2]],
      "perturbation": {
        "kind": "generic",
        "epsilon": 0.0,
        "eta": {"components": [
          {"terms": [{"freq": [1, 1, 0], "sin": 1.0}]},
          {"terms": [{"freq": [0, 1, 1], "cos": 1.0}]},
          {"terms": [{"freq": [1, 0, 1], "sin": 0.5, "cos": 0.5}]}
        ]}
      }
    },
    "seed": 1
  })");
  doc["model"]["perturbation"]["epsilon"] = eps;
  return build_model(parse_config(doc));
}

inline constexpr double kSqrt2 = 1.4142135623730950488;

}  // namespace endolab::testhelp
