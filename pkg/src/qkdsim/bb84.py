"""Four-state/two-filter key distribution with parity-round certification.

The baseline protocol: the sender transmits photons uniformly over all four
polarizations, the receiver filters at 0 or 45 degrees, and sifting keeps
the positions where the sent state's basis matches the filter's — exactly
the positions whose reading is deterministic, so the receiver's inference
is guaranteed there.  Tampering is caught afterwards by comparing odd
parities of random key subsets, paying one discarded bit per round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .eavesdrop import Attack, ChannelTap, EveRecord, NoAttack
from .photons import (
    BB84_ALPHABET,
    BB84_FILTERS,
    MeasurementOutcome,
    Polarization,
    bit_map,
    has_deterministic_outcome,
    infer_polarization,
    measure_arrival,
)
from .rng import RandomSource
from .transcript import Transcript


class KeyTooShort(ValueError):
    """Raised when a key cannot pay for the requested parity rounds."""


class NonPositiveKey(ValueError):
    """Raised when the expected usable key length is not positive."""


@dataclass(frozen=True)
class BB84AliceState:
    """The sender's record: her polarization choices and their bit values."""

    sent: list[Polarization]

    @property
    def bits(self) -> list[int]:
        return [bit_map(p) for p in self.sent]


@dataclass(frozen=True)
class BB84BobState:
    """The receiver's record: filter settings, raw readings, inferences."""

    filters: list[Polarization]
    outcomes: list[MeasurementOutcome]
    inferred: list[Polarization]


@dataclass(frozen=True)
class SiftResult:
    kept_indices: list[int]
    alice_key: list[int]
    bob_key: list[int]


@dataclass(frozen=True)
class BB84Run:
    """Everything produced by one transmission + sifting pass."""

    alice: BB84AliceState
    bob: BB84BobState
    sift: SiftResult
    transcript: Transcript
    photons_intercepted: int = 0
    eve_records: list[EveRecord] = field(default_factory=list)


def sift_keeps(sent: Polarization, filter_angle: Polarization) -> bool:
    """The public keep rule: keep iff the reading is deterministic.

    Equivalent to "the filter's basis matches the sent state's basis".
    """
    return has_deterministic_outcome(sent, filter_angle)


def bb84_run(
    n: int,
    rng: RandomSource,
    attack: Attack = NoAttack(),
    record_eve: bool = False,
) -> BB84Run:
    """Simulate one session photon by photon: transmit, measure, sift.

    The session source ``rng`` is never drawn from directly; the sender,
    receiver and attacker each own a derived child stream (indices 0, 1, 2;
    index 3 is reserved for the later certification rounds), so an attack
    cannot perturb the honest parties' choices.
    """
    if n < 1:
        raise ValueError("need at least one photon")
    alice_rng, bob_rng, eve_rng = rng.child(0), rng.child(1), rng.child(2)
    tap = ChannelTap(attack, BB84_FILTERS, BB84_ALPHABET, eve_rng, record=record_eve)

    sent = [alice_rng.choice(BB84_ALPHABET) for _ in range(n)]
    filters = [bob_rng.choice(BB84_FILTERS) for _ in range(n)]
    outcomes = [measure_arrival(tap(sent[i]), filters[i], bob_rng) for i in range(n)]
    inferred = [infer_polarization(f, o) for f, o in zip(filters, outcomes)]

    transcript = Transcript()
    transcript.announce_filters(filters)
    kept = [i for i in range(n) if sift_keeps(sent[i], filters[i])]
    transcript.announce_kept(kept)

    sift = SiftResult(
        kept_indices=kept,
        alice_key=[bit_map(sent[i]) for i in kept],
        bob_key=[bit_map(inferred[i]) for i in kept],
    )
    return BB84Run(
        alice=BB84AliceState(sent),
        bob=BB84BobState(filters, outcomes, inferred),
        sift=sift,
        transcript=transcript,
        photons_intercepted=tap.photons_intercepted,
        eve_records=tap.records,
    )


@dataclass(frozen=True)
class CertificationResult:
    """Outcome of the m parity rounds over a sifted key."""

    rounds: int
    mismatch_detected: bool
    bits_discarded: int
    final_key_length: int
    detection_round: Optional[int]
    surviving_positions: list[int]

    def surviving_bits(self, key: Sequence[int]) -> list[int]:
        """The key bits left after the per-round discards."""
        return [key[i] for i in self.surviving_positions]


def parity_certify(
    alice_key: Sequence[int],
    bob_key: Sequence[int],
    m: int,
    rng: RandomSource,
    transcript: Optional[Transcript] = None,
) -> CertificationResult:
    """Compare odd parities of m random key subsets, discarding one bit each.

    Per round: a uniformly random non-empty subset of the surviving
    positions (each included independently with probability 1/2, resampled
    if empty) is queried; both parties compute the subset's parity; a
    mismatch is recorded but the remaining rounds still run.  The
    lowest-index subset member is then discarded to pay for the leaked
    parity bit.  Any single disagreeing bit makes each round's comparison
    fail with probability exactly 1/2, which is what gives m rounds their
    1 - 2^-m detection power.
    """
    if m < 0:
        raise ValueError("round count must be non-negative")
    if len(alice_key) != len(bob_key):
        raise ValueError("keys must have equal length")
    if len(alice_key) <= m:
        raise KeyTooShort(
            f"key of {len(alice_key)} bits cannot pay for {m} parity rounds"
        )
    survivors = list(range(len(alice_key)))
    detection_round: Optional[int] = None
    for round_number in range(1, m + 1):
        subset = [i for i in survivors if rng.below(0.5)]
        while not subset:
            subset = [i for i in survivors if rng.below(0.5)]
        parity_a = 0
        parity_b = 0
        for i in subset:
            parity_a ^= alice_key[i]
            parity_b ^= bob_key[i]
        if transcript is not None:
            transcript.parity_query(round_number, subset)
            transcript.parity_response(round_number, parity_b)
        if parity_a != parity_b and detection_round is None:
            detection_round = round_number
        survivors.remove(subset[0])  # subset is ascending; [0] is the lowest index
    return CertificationResult(
        rounds=m,
        mismatch_detected=detection_round is not None,
        bits_discarded=m,
        final_key_length=len(survivors),
        detection_round=detection_round,
        surviving_positions=survivors,
    )


def bb84_usable_key(n: int, m: int) -> Fraction:
    """Expected usable key length: half the photons sift, minus m discards.

    Exact rational; display rounding is the caller's choice.
    """
    if n < 1:
        raise ValueError("need at least one photon")
    if m < 0:
        raise ValueError("round count must be non-negative")
    expected = Fraction(n, 2) - m
    if expected <= 0:
        raise NonPositiveKey(f"n={n}, m={m} leaves no expected key")
    return expected
