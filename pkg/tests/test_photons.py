"""Physical layer: exact transition table, sampling, collapse, consistency."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkdsim.photons import (
    BB84_ALPHABET,
    BB84_FILTERS,
    ERASURE,
    THREE_STATE_ALPHABET,
    THREE_STATE_FILTERS,
    MeasurementOutcome,
    Polarization,
    ResendPolicy,
    bit_map,
    collapse_and_resend,
    consistent_inputs,
    detected,
    detection_probability,
    has_deterministic_outcome,
    infer_polarization,
    measure,
    measure_arrival,
    transition_distribution,
)
from qkdsim.rng import RandomSource

ALL = tuple(Polarization)
polarizations = st.sampled_from(ALL)

HALF = Fraction(1, 2)

# The full exact transmission table: rows are photons, columns filters.
EXPECTED_PROBABILITY = {
    (Polarization.Z0, Polarization.Z0): Fraction(1),
    (Polarization.Z0, Polarization.D45): HALF,
    (Polarization.Z0, Polarization.Z90): Fraction(0),
    (Polarization.Z0, Polarization.D135): HALF,
    (Polarization.D45, Polarization.Z0): HALF,
    (Polarization.D45, Polarization.D45): Fraction(1),
    (Polarization.D45, Polarization.Z90): HALF,
    (Polarization.D45, Polarization.D135): Fraction(0),
    (Polarization.Z90, Polarization.Z0): Fraction(0),
    (Polarization.Z90, Polarization.D45): HALF,
    (Polarization.Z90, Polarization.Z90): Fraction(1),
    (Polarization.Z90, Polarization.D135): HALF,
    (Polarization.D135, Polarization.Z0): HALF,
    (Polarization.D135, Polarization.D45): Fraction(0),
    (Polarization.D135, Polarization.Z90): HALF,
    (Polarization.D135, Polarization.D135): Fraction(1),
}


def test_detection_probability_full_table():
    for (photon, filt), expected in EXPECTED_PROBABILITY.items():
        assert detection_probability(photon, filt) == expected


def test_degrees_and_from_degrees_roundtrip():
    for p in ALL:
        assert Polarization.from_degrees(p.degrees) is p
    with pytest.raises(ValueError):
        Polarization.from_degrees(30)


@given(polarizations)
def test_orthogonal_is_an_involution(p):
    assert p.orthogonal.orthogonal is p
    assert p.orthogonal is not p


@given(polarizations)
def test_orthogonal_never_detects(p):
    assert detection_probability(p, p.orthogonal) == 0
    assert detection_probability(p, p) == 1


def test_basis_groups_the_alphabet():
    assert Polarization.Z0.basis == Polarization.Z90.basis
    assert Polarization.D45.basis == Polarization.D135.basis
    assert Polarization.Z0.basis != Polarization.D45.basis


def test_deterministic_outcome_cells():
    # Exactly 5 of the 9 three-state cells are deterministic: the four
    # rectilinear pairings plus the diagonal/diagonal cell.
    kept = {
        (s, f)
        for s in THREE_STATE_ALPHABET
        for f in THREE_STATE_FILTERS
        if has_deterministic_outcome(s, f)
    }
    assert kept == {
        (Polarization.Z0, Polarization.Z0),
        (Polarization.Z0, Polarization.Z90),
        (Polarization.Z90, Polarization.Z0),
        (Polarization.Z90, Polarization.Z90),
        (Polarization.D45, Polarization.D45),
    }


@given(st.sampled_from(BB84_ALPHABET), st.sampled_from(BB84_FILTERS))
def test_deterministic_outcome_is_basis_match(photon, filt):
    assert has_deterministic_outcome(photon, filt) == (photon.basis == filt.basis)


def test_bit_map_values():
    assert bit_map(Polarization.Z0) == 0
    assert bit_map(Polarization.D45) == 0
    assert bit_map(Polarization.Z90) == 1
    assert bit_map(Polarization.D135) == 1


@given(polarizations)
def test_infer_polarization_two_branches(filt):
    assert infer_polarization(filt, detected(filt)) is filt
    assert infer_polarization(filt, ERASURE) is filt.orthogonal


def test_outcomes_are_interned():
    rng = RandomSource(0)
    for _ in range(100):
        out = measure(Polarization.D45, Polarization.Z0, rng)
        assert out is ERASURE or out is detected(Polarization.Z0)
    assert detected(Polarization.Z0) is detected(Polarization.Z0)
    assert MeasurementOutcome(None) == ERASURE


def test_detected_repr():
    assert repr(detected(Polarization.Z0)) == "Detected(Z0)"
    assert repr(ERASURE) == "Erasure"


@given(polarizations, polarizations)
def test_transition_distribution_is_normalized(photon, filt):
    dist = transition_distribution(photon, filt)
    assert sum(dist.values()) == 1
    assert all(p >= 0 for p in dist.values())


@given(polarizations, polarizations, st.integers(0, 2**32))
def test_measure_consumes_exactly_one_variate(photon, filt, seed):
    a = RandomSource(seed)
    b = RandomSource(seed)
    measure(photon, filt, a)
    b.uniform()
    # After one draw each, the two twins must stay in lockstep.
    assert a.uniforms(4) == b.uniforms(4)


def test_measure_deterministic_cells():
    rng = RandomSource(1)
    for p in ALL:
        assert measure(p, p, rng) is detected(p)
        assert measure(p, p.orthogonal, rng) is ERASURE


def test_measure_half_probability_frequency():
    rng = RandomSource(2026)
    n = 100_000
    hits = sum(
        measure(Polarization.D45, Polarization.Z0, rng).is_detected for _ in range(n)
    )
    assert abs(hits / n - 0.5) < 0.01


def test_measure_arrival_absence_is_erasure_without_a_draw():
    a = RandomSource(8)
    b = RandomSource(8)
    assert measure_arrival(None, Polarization.Z0, a) is ERASURE
    assert a.uniforms(4) == b.uniforms(4)


def test_measure_arrival_present_equals_measure():
    a = RandomSource(9)
    b = RandomSource(9)
    for p in ALL:
        assert measure_arrival(p, Polarization.D45, a) == measure(
            p, Polarization.D45, b
        )


def test_collapse_and_resend_detection_echoes_filter():
    rng = RandomSource(0)
    for policy in ResendPolicy:
        out = collapse_and_resend(
            detected(Polarization.D45), Polarization.D45, policy, rng
        )
        assert out is Polarization.D45


def test_collapse_and_resend_erasure_branches():
    rng = RandomSource(0)
    assert (
        collapse_and_resend(
            ERASURE, Polarization.Z0, ResendPolicy.ORTHOGONAL_INFERENCE, rng
        )
        is Polarization.Z90
    )
    assert (
        collapse_and_resend(ERASURE, Polarization.Z0, ResendPolicy.SEND_NOTHING, rng)
        is None
    )
    draws = {
        collapse_and_resend(ERASURE, Polarization.Z0, ResendPolicy.UNIFORM_RANDOM, rng)
        for _ in range(200)
    }
    assert draws == set(THREE_STATE_ALPHABET)


def test_collapse_under_diagonal_filter_can_leave_the_honest_alphabet():
    # An erasure behind a diagonal filter reads "orthogonal to 45°", i.e.
    # 135° — a state the three-state source never emits.  The channel
    # carries it regardless; the receiver's physics handles it fine.
    rng = RandomSource(0)
    resent = collapse_and_resend(
        ERASURE, Polarization.D45, ResendPolicy.ORTHOGONAL_INFERENCE, rng
    )
    assert resent is Polarization.D135
    assert resent not in THREE_STATE_ALPHABET


def test_consistent_inputs_three_state_table():
    A = THREE_STATE_ALPHABET
    cases = {
        (Polarization.Z0, detected(Polarization.Z0)): {Polarization.Z0, Polarization.D45},
        (Polarization.Z0, ERASURE): {Polarization.D45, Polarization.Z90},
        (Polarization.Z90, detected(Polarization.Z90)): {Polarization.D45, Polarization.Z90},
        (Polarization.Z90, ERASURE): {Polarization.Z0, Polarization.D45},
        (Polarization.D45, detected(Polarization.D45)): set(A),
        (Polarization.D45, ERASURE): {Polarization.Z0, Polarization.Z90},
    }
    for (filt, outcome), expected in cases.items():
        assert set(consistent_inputs(filt, outcome, A)) == expected


def test_consistent_inputs_rejects_foreign_detection():
    with pytest.raises(ValueError):
        consistent_inputs(
            Polarization.Z0, detected(Polarization.D45), THREE_STATE_ALPHABET
        )


@given(polarizations, polarizations)
def test_consistent_inputs_contains_the_truth(photon, filt):
    # Whatever outcome the physics can produce, the true input is always in
    # the consistent set for that outcome.
    for outcome, p in transition_distribution(photon, filt).items():
        if p > 0:
            assert photon in consistent_inputs(filt, outcome, ALL)
