from math import sqrt

import numpy as np
import pytest

from mirrorsqkd.fock import (
    ALICE,
    BOB,
    HADAMARD,
    ONE_IN_0,
    ONE_IN_1,
    VACUUM,
    DegenerateStateError,
    DimensionMismatchError,
    FockStateVector,
    inner_product,
    measurement_probabilities,
    project,
    to_computational_amplitudes,
    to_hadamard_amplitudes,
)


def plus_state(**kw):
    return FockStateVector.from_components(
        {(ONE_IN_0, VACUUM, 0): 1 / sqrt(2), (ONE_IN_1, VACUUM, 0): 1 / sqrt(2)}, **kw
    )


def test_inner_product_of_plus_with_basis_state():
    a = FockStateVector.from_components({(ONE_IN_0, VACUUM, 0): 1.0})
    assert inner_product(a, plus_state()) == pytest.approx(1 / sqrt(2))


def test_inner_product_is_conjugate_linear_in_first_argument():
    a = FockStateVector.from_components({(ONE_IN_0, VACUUM, 0): 1j})
    b = FockStateVector.from_components({(ONE_IN_0, VACUUM, 0): 1.0})
    assert inner_product(a, b) == pytest.approx(-1j)


def test_inner_product_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        inner_product(FockStateVector.zeros(4), FockStateVector.zeros(3))


def test_bad_shape_rejected():
    with pytest.raises(DimensionMismatchError):
        FockStateVector(np.zeros((3, 3, 3, 2, 1)))


def test_normalize_zero_vector():
    with pytest.raises(DegenerateStateError):
        FockStateVector.from_components({}, normalize=True)


def test_normalized_flag_checked():
    with pytest.raises(ValueError):
        FockStateVector(np.ones((2, 2, 2, 2, 1)), normalized=True)


def test_amplitudes_read_only():
    v = plus_state()
    with pytest.raises(ValueError):
        v.amplitudes[0, 1, 0, 0, 0] = 3.0


def test_computational_measurement_of_plus():
    p = measurement_probabilities(plus_state(), BOB)
    assert p["click0"] == pytest.approx(0.5)
    assert p["click1"] == pytest.approx(0.5)
    assert p["vacuum"] == 0.0 and p["double"] == 0.0


def test_hadamard_measurement_of_plus_is_deterministic():
    p = measurement_probabilities(plus_state(), BOB, HADAMARD)
    assert p["plus"] == pytest.approx(1.0)
    assert p["minus"] == pytest.approx(0.0, abs=1e-15)


def test_hadamard_measurement_of_basis_state_is_uniform():
    v = FockStateVector.from_components({(ONE_IN_1, VACUUM, 0): 1.0})
    p = measurement_probabilities(v, BOB, HADAMARD)
    assert p["plus"] == pytest.approx(0.5)
    assert p["minus"] == pytest.approx(0.5)


def test_two_photons_in_one_mode_split_by_beam_splitter():
    # |2,0> through a 50:50 splitter: 1/4 |2,0>, 1/2 |1,1>, 1/4 |0,2>
    v = FockStateVector.from_components({((2, 0), VACUUM, 0): 1.0})
    p = measurement_probabilities(v, BOB, HADAMARD)
    assert p["double"] == pytest.approx(0.5)
    assert p["plus"] == pytest.approx(0.25)
    assert p["minus"] == pytest.approx(0.25)


def test_hong_ou_mandel_pair_never_double_clicks():
    v = FockStateVector.from_components({((1, 1), VACUUM, 0): 1.0})
    p = measurement_probabilities(v, BOB, HADAMARD)
    assert p["double"] == pytest.approx(0.0, abs=1e-15)
    assert p["plus"] + p["minus"] == pytest.approx(1.0)


def test_probabilities_track_unnormalized_weight():
    v = FockStateVector.from_components({(ONE_IN_0, VACUUM, 0): 0.5})
    assert sum(measurement_probabilities(v, BOB).values()) == pytest.approx(0.25)


def test_alice_register_measurement():
    v = FockStateVector.from_components({(VACUUM, ONE_IN_1, 0): 1.0})
    assert measurement_probabilities(v, ALICE)["click1"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        measurement_probabilities(v, ALICE, HADAMARD)


def test_zero_state_measurement():
    with pytest.raises(DegenerateStateError):
        measurement_probabilities(FockStateVector.zeros(), BOB)


def test_frame_change_is_an_involution():
    v = plus_state()
    h = to_hadamard_amplitudes(v)
    assert h.bob_basis == HADAMARD
    assert h.amplitude(ONE_IN_0) == pytest.approx(1.0)
    back = to_computational_amplitudes(h)
    np.testing.assert_allclose(back.amplitudes, v.amplitudes, atol=1e-15)


def test_project_keeps_matching_labels_only():
    v = plus_state()
    branch = project(v, BOB, "click0")
    assert branch.norm_squared() == pytest.approx(0.5)
    assert set(branch.components()) == {(ONE_IN_0, VACUUM, 0)}
