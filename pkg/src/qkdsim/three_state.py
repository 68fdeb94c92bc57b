"""Three-state/three-filter key distribution with built-in tamper evidence.

The sender uses only the polarizations {0°, 45°, 90°}; the receiver filters
uniformly over the same three angles.  After the receiver announces his
filter sequence, the sender confirms every position whose (sent, filter)
pair has a deterministic reading — 5 of the 9 pairs.  Confirmed positions
split by filter:

* rectilinear filter (0° or 90°): the receiver's detect-or-erase reading
  identifies the sent state exactly, yielding a secret key bit (4/9 of all
  positions on average);
* diagonal filter (45°): the sent state must have been the 45° photon, so
  the position carries no secret — but its reading is forced to be a
  detection, and any erasure there is hard evidence that the channel was
  disturbed (1/9 of positions).

Those diagonal positions therefore double as authentication: tampering
shows up without any further key comparison, which is the whole point of
the design.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .eavesdrop import Attack, ChannelTap, EveRecord, NoAttack
from .photons import (
    MeasurementOutcome,
    Polarization,
    THREE_STATE_ALPHABET,
    THREE_STATE_FILTERS,
    bit_map,
    has_deterministic_outcome,
    infer_polarization,
    measure_arrival,
)
from .rng import RandomSource
from .transcript import Transcript


@dataclass(frozen=True)
class ThreeStateAliceState:
    """The sender's record; never contains the 135-degree state."""

    sent: list[Polarization]


@dataclass(frozen=True)
class ThreeStateBobState:
    filters: list[Polarization]
    outcomes: list[MeasurementOutcome]


@dataclass(frozen=True)
class Confirmation:
    """The sender's public per-position correct/incorrect verdicts."""

    correct: list[bool]

    @property
    def confirmed_indices(self) -> list[int]:
        return [i for i, ok in enumerate(self.correct) if ok]

    @property
    def count(self) -> int:
        return sum(self.correct)


def confirm(
    sent: Sequence[Polarization], filters: Sequence[Polarization]
) -> Confirmation:
    """Mark every position whose (sent, filter) pair reads deterministically.

    A function of the sent states and announced filters only — the
    receiver's outcomes play no part, so announcing the verdicts leaks
    nothing about his data.  A rectilinear photon is confirmed under either
    rectilinear filter (aligned → certain detection, orthogonal → certain
    erasure, both informative); the diagonal photon is confirmed only under
    the diagonal filter.
    """
    if len(sent) != len(filters):
        raise ValueError("sent and filter sequences must have equal length")
    return Confirmation(
        [has_deterministic_outcome(s, f) for s, f in zip(sent, filters)]
    )


def infer_key_state(
    filter_angle: Polarization, outcome: MeasurementOutcome
) -> Polarization:
    """Resolve a confirmed rectilinear-filter reading to the sent state.

    Detection means the state aligned with the filter; erasure means the
    orthogonal one.  Only valid at key positions, hence the filter guard.
    """
    if filter_angle not in (Polarization.Z0, Polarization.Z90):
        raise ValueError("key bits come from rectilinear-filter positions only")
    return infer_polarization(filter_angle, outcome)


@dataclass(frozen=True)
class KeyMaterial:
    """The receiver's confirmed positions, split into key and authentication."""

    key_positions: list[int]
    key_bits: list[int]
    auth_positions: list[int]


@dataclass(frozen=True)
class TamperReport:
    """Verdict from the authentication positions.

    ``model_certification`` is the idealized detection-confidence curve
    1 - 3^(-count): it treats every wrong-filter interception at an
    authentication position as certain to alarm, so it is an upper model,
    not a prediction for any concrete resend policy.  The simulator reports
    it alongside the observed behaviour rather than asserting it.
    """

    auth_checked: int
    auth_failures: int
    tamper_detected: bool
    model_certification: float


def authenticate(outcomes: Sequence[MeasurementOutcome]) -> TamperReport:
    """Check the readings at confirmed diagonal-filter positions.

    Honest physics forces every one of them to be a detection, so each
    erasure among them is unambiguous tamper evidence.  The receiver can
    run this check alone, with no extra public traffic.
    """
    failures = sum(1 for o in outcomes if o.is_erasure)
    count = len(outcomes)
    return TamperReport(
        auth_checked=count,
        auth_failures=failures,
        tamper_detected=failures > 0,
        model_certification=1.0 - 3.0 ** (-count),
    )


def three_state_key_count(n: int) -> Fraction:
    """Expected key bits from n photons: 4n/9, exact."""
    if n < 0:
        raise ValueError("photon count must be non-negative")
    return Fraction(4 * n, 9)


@dataclass(frozen=True)
class ThreeStateRun:
    """Everything produced by one full session."""

    alice: ThreeStateAliceState
    bob: ThreeStateBobState
    confirmation: Confirmation
    key_material: KeyMaterial
    alice_key_bits: list[int]
    tamper: TamperReport
    transcript: Transcript
    photons_intercepted: int = 0
    eve_records: list[EveRecord] = field(default_factory=list)


def three_state_run(
    n: int,
    rng: RandomSource,
    attack: Attack = NoAttack(),
    record_eve: bool = False,
) -> ThreeStateRun:
    """Simulate one session: transmit, announce, confirm, split, check.

    Child-stream layout matches :func:`qkdsim.bb84.bb84_run`: sender,
    receiver and attacker draw from children 0, 1 and 2 of the session
    source (child 3 stays reserved), so attacks never perturb honest
    choices and sessions are reproducible from the seed alone.
    """
    if n < 1:
        raise ValueError("need at least one photon")
    alice_rng, bob_rng, eve_rng = rng.child(0), rng.child(1), rng.child(2)
    tap = ChannelTap(
        attack, THREE_STATE_FILTERS, THREE_STATE_ALPHABET, eve_rng, record=record_eve
    )

    sent = [alice_rng.choice(THREE_STATE_ALPHABET) for _ in range(n)]
    filters = [bob_rng.choice(THREE_STATE_FILTERS) for _ in range(n)]
    outcomes = [measure_arrival(tap(sent[i]), filters[i], bob_rng) for i in range(n)]

    transcript = Transcript()
    transcript.announce_filters(filters)
    confirmation = confirm(sent, filters)
    confirmed = confirmation.confirmed_indices
    transcript.announce_kept(confirmed)

    key_positions = [i for i in confirmed if filters[i] is not Polarization.D45]
    auth_positions = [i for i in confirmed if filters[i] is Polarization.D45]
    key_material = KeyMaterial(
        key_positions=key_positions,
        key_bits=[
            bit_map(infer_key_state(filters[i], outcomes[i])) for i in key_positions
        ],
        auth_positions=auth_positions,
    )
    alice_key_bits = [bit_map(sent[i]) for i in key_positions]
    tamper = authenticate([outcomes[i] for i in auth_positions])

    return ThreeStateRun(
        alice=ThreeStateAliceState(sent),
        bob=ThreeStateBobState(filters, outcomes),
        confirmation=confirmation,
        key_material=key_material,
        alice_key_bits=alice_key_bits,
        tamper=tamper,
        transcript=transcript,
        photons_intercepted=tap.photons_intercepted,
        eve_records=tap.records,
    )
