"""Three-state protocol: confirmation, key/auth split, tamper evidence."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkdsim.eavesdrop import StuckFilter
from qkdsim.photons import (
    ERASURE,
    THREE_STATE_ALPHABET,
    THREE_STATE_FILTERS,
    Polarization,
    detected,
)
from qkdsim.rng import RandomSource
from qkdsim.three_state import (
    authenticate,
    confirm,
    infer_key_state,
    three_state_key_count,
    three_state_run,
)

Z0, D45, Z90 = Polarization.Z0, Polarization.D45, Polarization.Z90


def test_confirm_truth_table():
    # All nine (sent, filter) cells; exactly five survive.
    sent = [s for s in THREE_STATE_ALPHABET for _ in THREE_STATE_FILTERS]
    filters = [f for _ in THREE_STATE_ALPHABET for f in THREE_STATE_FILTERS]
    result = confirm(sent, filters)
    kept_cells = {(sent[i], filters[i]) for i in result.confirmed_indices}
    assert kept_cells == {(Z0, Z0), (Z0, Z90), (Z90, Z0), (Z90, Z90), (D45, D45)}
    assert result.count == 5


def test_confirm_length_mismatch():
    with pytest.raises(ValueError):
        confirm([Z0], [Z0, Z90])


def test_infer_key_state_four_cases():
    assert infer_key_state(Z0, detected(Z0)) is Z0
    assert infer_key_state(Z0, ERASURE) is Z90
    assert infer_key_state(Z90, detected(Z90)) is Z90
    assert infer_key_state(Z90, ERASURE) is Z0


def test_infer_key_state_rejects_diagonal_filter():
    with pytest.raises(ValueError):
        infer_key_state(D45, detected(D45))


def test_authenticate_clean():
    report = authenticate([detected(D45)] * 8)
    assert report.auth_checked == 8
    assert report.auth_failures == 0
    assert not report.tamper_detected
    assert report.model_certification == 1.0 - 3.0**-8


def test_authenticate_single_erasure_alarms():
    report = authenticate([detected(D45), ERASURE, detected(D45)])
    assert report.auth_failures == 1
    assert report.tamper_detected


def test_authenticate_empty():
    report = authenticate([])
    assert report.auth_checked == 0
    assert not report.tamper_detected
    assert report.model_certification == 0.0


def test_key_count_examples():
    assert three_state_key_count(54) == 24
    assert three_state_key_count(9) == 4
    assert three_state_key_count(18) == 8
    assert three_state_key_count(1) == Fraction(4, 9)
    assert three_state_key_count(0) == 0
    with pytest.raises(ValueError):
        three_state_key_count(-1)


def test_honest_run_agrees_and_stays_quiet():
    result = three_state_run(5000, RandomSource(21))
    assert result.alice_key_bits == result.key_material.key_bits
    assert not result.tamper.tamper_detected
    assert result.tamper.auth_failures == 0
    assert result.photons_intercepted == 0


def test_honest_fractions_near_exact_rates():
    n = 30_000
    result = three_state_run(n, RandomSource(6))
    assert abs(result.confirmation.count / n - 5 / 9) < 0.02
    assert abs(len(result.key_material.key_positions) / n - 4 / 9) < 0.02
    assert abs(len(result.key_material.auth_positions) / n - 1 / 9) < 0.02


def test_key_positions_use_rectilinear_filters_only():
    result = three_state_run(600, RandomSource(2))
    for i in result.key_material.key_positions:
        assert result.bob.filters[i] in (Z0, Z90)
    for i in result.key_material.auth_positions:
        assert result.bob.filters[i] is D45
        assert result.alice.sent[i] is D45


@given(n=st.integers(1, 400), seed=st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_key_plus_auth_is_confirmed(n, seed):
    result = three_state_run(n, RandomSource(seed))
    assert (
        len(result.key_material.key_positions)
        + len(result.key_material.auth_positions)
        == result.confirmation.count
    )


def test_run_reproducible():
    a = three_state_run(400, RandomSource(123))
    b = three_state_run(400, RandomSource(123))
    assert a.alice.sent == b.alice.sent
    assert a.key_material.key_bits == b.key_material.key_bits
    assert a.transcript.to_jsonable() == b.transcript.to_jsonable()


def test_stuck_rectilinear_reader_corrupts_nothing_but_alarms():
    # A filter stuck at 0° reads every key position correctly (its resends
    # are never mistaken at rectilinear filters) yet alarms on roughly half
    # the authentication positions.  The key stays clean; the session burns.
    result = three_state_run(20_000, RandomSource(14), attack=StuckFilter(angle=Z0))
    assert result.alice_key_bits == result.key_material.key_bits
    alarm_rate = result.tamper.auth_failures / result.tamper.auth_checked
    assert abs(alarm_rate - 0.5) < 0.02
    assert result.tamper.tamper_detected


def test_transcript_matches_confirmation():
    result = three_state_run(300, RandomSource(8))
    assert result.transcript.kept_positions() == result.confirmation.confirmed_indices
    assert result.transcript.announced_filters() == result.bob.filters
