import json
import math

import endolab


BLOCK = [[3, 1, 0], [1, 1, 0], [0, 0, 2]]


def test_eigen_moduli():
    moduli = endolab.eigen_moduli(BLOCK)
    assert abs(moduli[0] - (2 - math.sqrt(2))) < 1e-12
    assert abs(moduli[1] - 2.0) < 1e-12
    assert abs(moduli[2] - (2 + math.sqrt(2))) < 1e-12


def test_periodic_count_and_offsets():
    assert endolab.periodic_count([[3, 1], [1, 1]], 2) == 7
    offsets = endolab.preimage_offsets(BLOCK)
    assert len(offsets) == 4


def test_linear_spectrum():
    model = endolab.Model.linear(BLOCK)
    assert model.degree() == 4
    rep = endolab.qr_spectrum(model, [0.3, 0.7, 0.11], 4000)
    expected = [math.log(2 - math.sqrt(2)), math.log(2.0), math.log(2 + math.sqrt(2))]
    for got, want in zip(rep["exponents"], expected):
        assert abs(got - want) < 1e-9


def test_model_from_config_and_specialness():
    doc = {
        "model": {
            "matrix": BLOCK,
            "perturbation": {
                "kind": "shear-chain",
                "moves": [
                    {
                        "direction": "su-eigvec",
                        "amplitude": 0.05,
                        "modulator": {
                            "terms": [{"freq": [0, 0, 1], "sin": 1.0}]
                        },
                    }
                ],
            },
        },
        "seed": 7,
    }
    model = endolab.Model.from_config(json.dumps(doc))
    assert model.conservative()
    pre = model.preimages([0.25, 0.5, 0.75])
    assert len(pre) == 4
    scan = endolab.specialness_scan(model, points=5, chain_len=40, chains=6, seed=3)
    assert scan["max_variance"] < 1e-10
