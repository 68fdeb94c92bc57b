"""Discrete polarizing-filter physics for single photons.

A photon in one of four discrete polarization states meets a polarizing
filter at one of the same four angles.  It passes the filter (collapsing to
the filter orientation) with probability cos^2 of the angular difference,
and is absorbed otherwise.  Because photons are sent on a clock, absorption
is observable as an *erasure*: a tick with no detection.

For the 45-degree-spaced alphabet the pass probabilities are exactly 0, 1/2
or 1, so the whole channel is enumerable with exact rationals.
:func:`transition_distribution` returns those rationals and serves as the
enumeration oracle against which every Monte Carlo statistic is checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .rng import RandomSource


class Polarization(Enum):
    """The four discrete polarization angles, named by degrees.

    ``Z0``/``Z90`` form the rectilinear orthogonal pair, ``D45``/``D135``
    the diagonal one.
    """

    Z0 = 0
    D45 = 45
    Z90 = 90
    D135 = 135

    @property
    def degrees(self) -> int:
        return self.value

    @classmethod
    def from_degrees(cls, degrees: int) -> "Polarization":
        try:
            return cls(degrees)
        except ValueError:
            raise ValueError(
                f"no polarization at {degrees} degrees; expected one of 0, 45, 90, 135"
            ) from None

    @property
    def orthogonal(self) -> "Polarization":
        """The perpendicular polarization (an involution)."""
        return Polarization((self.value + 90) % 180)

    @property
    def basis(self) -> int:
        """0 for the rectilinear pair {Z0, Z90}, 45 for the diagonal pair."""
        return self.value % 90


# A filter setting is fully characterized by its orientation angle.
FilterSetting = Polarization

BB84_ALPHABET = (Polarization.Z0, Polarization.D45, Polarization.Z90, Polarization.D135)
THREE_STATE_ALPHABET = (Polarization.Z0, Polarization.D45, Polarization.Z90)
BB84_FILTERS = (Polarization.Z0, Polarization.D45)
THREE_STATE_FILTERS = (Polarization.Z0, Polarization.D45, Polarization.Z90)


@dataclass(frozen=True)
class MeasurementOutcome:
    """What a detector records at one clock tick.

    ``detected_as`` is the filter orientation the photon collapsed to, or
    ``None`` for an erasure.  Erasures carry no polarization information.
    """

    detected_as: Optional[Polarization]

    @property
    def is_detected(self) -> bool:
        return self.detected_as is not None

    @property
    def is_erasure(self) -> bool:
        return self.detected_as is None

    def __repr__(self) -> str:
        if self.detected_as is None:
            return "Erasure"
        return f"Detected({self.detected_as.name})"


ERASURE = MeasurementOutcome(None)
_DETECTED = {p: MeasurementOutcome(p) for p in Polarization}


def detected(angle: Polarization) -> MeasurementOutcome:
    """The (interned) detection outcome for a filter at ``angle``."""
    return _DETECTED[angle]


# cos^2 of the angular difference, exact for the 45-degree grid.
_COS2 = {0: Fraction(1), 45: Fraction(1, 2), 90: Fraction(0), 135: Fraction(1, 2)}


def detection_probability(photon: Polarization, filter_angle: FilterSetting) -> Fraction:
    """Exact probability that ``photon`` passes a filter at ``filter_angle``.

    Always one of 0, 1/2 or 1 for the discrete angle set.
    """
    return _COS2[abs(photon.value - filter_angle.value) % 180]


def has_deterministic_outcome(photon: Polarization, filter_angle: FilterSetting) -> bool:
    """True when the detector reading is fully determined by (photon, filter).

    Holds exactly when the pass probability is 0 or 1, i.e. the photon is
    aligned with or orthogonal to the filter.  Both protocols keep precisely
    these positions: whoever knows (sent state, filter) can predict the
    receiver's datum without being told it.
    """
    return detection_probability(photon, filter_angle) in (Fraction(0), Fraction(1))


def bit_map(polarization: Polarization) -> int:
    """Classical bit conventionally encoded by each polarization.

    0 and 45 degrees encode 0; 90 and 135 degrees encode 1.  The mapping is
    an arbitrary but fixed convention; it satisfies
    ``bit_map(p.orthogonal) == 1 - bit_map(p)``.
    """
    return 0 if polarization.value in (0, 45) else 1


def infer_polarization(
    filter_angle: FilterSetting, outcome: MeasurementOutcome
) -> Polarization:
    """The receiver's estimate of the sent state from one clocked reading.

    A detection collapses the photon to the filter angle, so that is the
    estimate; an erasure is read as the state orthogonal to the filter.  The
    estimate is guaranteed correct only at positions where the sender later
    vouches that (sent, filter) had a deterministic outcome.
    """
    if outcome.is_detected:
        return outcome.detected_as  # type: ignore[return-value]
    return filter_angle.orthogonal


def transition_distribution(
    photon: Polarization, filter_angle: FilterSetting
) -> dict[MeasurementOutcome, Fraction]:
    """Exact outcome distribution for one photon-filter encounter.

    This is the ground truth for all statistical checks: Monte Carlo
    frequencies must converge to these rationals.
    """
    p = detection_probability(photon, filter_angle)
    return {detected(filter_angle): p, ERASURE: 1 - p}


# Float view of detection_probability, for the hot measurement path.
_P_DETECT = {
    (p, f): float(_COS2[abs(p.value - f.value) % 180])
    for p in Polarization
    for f in Polarization
}


def measure(
    photon: Polarization, filter_angle: FilterSetting, rng: RandomSource
) -> MeasurementOutcome:
    """Send one photon through a filter and read the detector.

    A pure function of (photon, filter, next variate): exactly one variate is
    consumed per call, even when the outcome is deterministic, so replaying a
    RandomSource reproduces the identical outcome sequence.
    """
    if rng.uniform() < _P_DETECT[(photon, filter_angle)]:
        return _DETECTED[filter_angle]
    return ERASURE


def measure_arrival(
    photon: Optional[Polarization], filter_angle: FilterSetting, rng: RandomSource
) -> MeasurementOutcome:
    """Like :func:`measure`, but the clock tick may carry no photon at all.

    An empty tick (``photon is None``, e.g. an interceptor absorbed the
    photon and sent nothing) is always an erasure and consumes no variate.
    """
    if photon is None:
        return ERASURE
    return measure(photon, filter_angle, rng)


class ResendPolicy(Enum):
    """What an interceptor retransmits when her own filter shows an erasure.

    A detection always collapses the photon to her filter angle, so only the
    erasure branch is a free choice:

    * ``ORTHOGONAL_INFERENCE`` - resend the state orthogonal to her filter
      (the erasure tells her the photon was orthogonal *if* it came from her
      filter's own basis pair).  Under a 45-degree filter this resends a
      135-degree photon, which honest senders never use; the channel carries
      it anyway.
    * ``SEND_NOTHING`` - absorb the photon; the receiver sees an erasure.
    * ``UNIFORM_RANDOM`` - resend a uniform draw from the sender alphabet.
    """

    ORTHOGONAL_INFERENCE = "orthogonal"
    SEND_NOTHING = "nothing"
    UNIFORM_RANDOM = "random"


def collapse_and_resend(
    outcome: MeasurementOutcome,
    filter_angle: FilterSetting,
    policy: ResendPolicy,
    rng: RandomSource,
    alphabet: tuple[Polarization, ...] = THREE_STATE_ALPHABET,
) -> Optional[Polarization]:
    """What leaves an intercepting measurement station.

    A detected photon is retransmitted at the filter angle it collapsed to;
    an erasure is handled per ``policy``.  Returns ``None`` when nothing is
    resent.  Collapse destroys input information: the resent photon depends
    only on (outcome, filter), never on the original polarization.
    """
    if outcome.is_detected:
        return outcome.detected_as
    if policy is ResendPolicy.ORTHOGONAL_INFERENCE:
        return filter_angle.orthogonal
    if policy is ResendPolicy.SEND_NOTHING:
        return None
    return rng.choice(alphabet)


def consistent_inputs(
    filter_angle: FilterSetting,
    outcome: MeasurementOutcome,
    alphabet: tuple[Polarization, ...],
) -> tuple[Polarization, ...]:
    """All alphabet states that could have produced ``outcome`` under this filter.

    Used to ask whether a measurement record pins down the sender's state:
    it does exactly when one state remains.
    """
    if outcome.is_detected and outcome.detected_as is not filter_angle:
        raise ValueError("a detection always matches the filter that produced it")
    if outcome.is_detected:
        return tuple(p for p in alphabet if detection_probability(p, filter_angle) > 0)
    return tuple(p for p in alphabet if detection_probability(p, filter_angle) < 1)
