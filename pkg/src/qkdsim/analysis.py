"""Closed-form analysis of both protocols, in exact rational arithmetic.

Everything here is derived by enumeration over the discrete channel model
in :mod:`qkdsim.photons`, with probabilities kept as :class:`~fractions.Fraction`
until the caller asks for floats.  Entropies stay symbolic too: every
probability in play is of the form 2^a·3^b, so any entropy is an exact
rational combination ``q + r·log2(3)`` (:class:`ExactBits`).

The same enumeration machinery doubles as the oracle for the Monte Carlo
suite: :func:`receiver_outcome_distribution` predicts what the receiver
sees under any intercept-resend configuration, and the per-position attack
statistics (:func:`auth_failure_probability`, :func:`key_error_probability`,
:func:`bb84_sift_error_probability`) are what empirical sweeps are checked
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .eavesdrop import Attack, InterceptResend, NoAttack, normalize_attack
from .photons import (
    BB84_ALPHABET,
    BB84_FILTERS,
    ERASURE,
    MeasurementOutcome,
    Polarization,
    ResendPolicy,
    THREE_STATE_ALPHABET,
    THREE_STATE_FILTERS,
    bit_map,
    detected,
    detection_probability,
    has_deterministic_outcome,
    infer_polarization,
    transition_distribution,
)

LOG2_3 = math.log2(3)

# Receiver outcome classes, in display order.
THREE_STATE_OUTCOMES = (
    detected(Polarization.Z0),
    detected(Polarization.D45),
    detected(Polarization.Z90),
    ERASURE,
)
BB84_OUTCOMES = (detected(Polarization.Z0), detected(Polarization.D45), ERASURE)


class EmptyInput(ValueError):
    """Raised when an estimator is given nothing to estimate from."""


# ---------------------------------------------------------------------------
# Exact entropy bookkeeping: values of the form q + r·log2(3)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactBits:
    """An exact quantity of bits: ``constant + log3_coefficient * log2(3)``.

    Closed under the operations entropy calculations need, because all
    channel probabilities factor as 2^a·3^b.
    """

    constant: Fraction = Fraction(0)
    log3_coefficient: Fraction = Fraction(0)

    def __float__(self) -> float:
        return float(self.constant) + float(self.log3_coefficient) * LOG2_3

    def __add__(self, other: "ExactBits") -> "ExactBits":
        return ExactBits(
            self.constant + other.constant,
            self.log3_coefficient + other.log3_coefficient,
        )

    def __sub__(self, other: "ExactBits") -> "ExactBits":
        return ExactBits(
            self.constant - other.constant,
            self.log3_coefficient - other.log3_coefficient,
        )

    def __neg__(self) -> "ExactBits":
        return ExactBits(-self.constant, -self.log3_coefficient)

    def scaled(self, factor: Union[int, Fraction]) -> "ExactBits":
        return ExactBits(self.constant * factor, self.log3_coefficient * factor)

    def __str__(self) -> str:
        if self.log3_coefficient == 0:
            return str(self.constant)
        core = f"{self.log3_coefficient}*log2(3)"
        if self.constant == 0:
            return core
        sign = "+" if self.constant > 0 else "-"
        return f"{core} {sign} {abs(self.constant)}"

    def to_jsonable(self) -> dict:
        return {
            "constant": str(self.constant),
            "log3_coefficient": str(self.log3_coefficient),
            "bits": float(self),
        }


def exact_log2(x: Fraction) -> ExactBits:
    """log2 of a positive rational whose only prime factors are 2 and 3."""
    if x <= 0:
        raise ValueError("logarithm of a non-positive value")

    def split(k: int) -> tuple[int, int, int]:
        twos = threes = 0
        while k % 2 == 0:
            k //= 2
            twos += 1
        while k % 3 == 0:
            k //= 3
            threes += 1
        return k, twos, threes

    rest_n, twos_n, threes_n = split(x.numerator)
    rest_d, twos_d, threes_d = split(x.denominator)
    if rest_n != 1 or rest_d != 1:
        raise ValueError(f"{x} is not of the form 2^a·3^b; no exact log2")
    return ExactBits(Fraction(twos_n - twos_d), Fraction(threes_n - threes_d))


def entropy_bits(probabilities: Iterable[Fraction]) -> ExactBits:
    """Shannon entropy of an exact distribution, symbolically."""
    total = ExactBits()
    for p in probabilities:
        if p < 0:
            raise ValueError("negative probability")
        if p == 0:
            continue
        total = total + exact_log2(p).scaled(-p)
    return total


# ---------------------------------------------------------------------------
# The honest three-state channel: joint distribution and entropies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint law of (sent state, receiver outcome class)."""

    cells: dict[tuple[Polarization, MeasurementOutcome], Fraction]
    senders: tuple[Polarization, ...]
    outcomes: tuple[MeasurementOutcome, ...]

    def probability(self, sent: Polarization, outcome: MeasurementOutcome) -> Fraction:
        return self.cells.get((sent, outcome), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.cells.values(), Fraction(0))

    def sender_marginal(self) -> dict[Polarization, Fraction]:
        out = {s: Fraction(0) for s in self.senders}
        for (s, _), p in self.cells.items():
            out[s] += p
        return out

    def receiver_marginal(self) -> dict[MeasurementOutcome, Fraction]:
        out = {o: Fraction(0) for o in self.outcomes}
        for (_, o), p in self.cells.items():
            out[o] += p
        return out


def joint_distribution(
    alphabet: Sequence[Polarization] = THREE_STATE_ALPHABET,
    filter_set: Sequence[Polarization] = THREE_STATE_FILTERS,
) -> JointDistribution:
    """Exact composition: uniform sender x uniform filter x channel physics.

    The receiver outcome classes are one detection class per filter angle
    plus the erasure class (the filter identity is public, the reading is
    not, so "detected at 45°" and "erasure" are the receiver's datum).
    """
    senders = tuple(alphabet)
    outcomes = tuple(detected(f) for f in filter_set) + (ERASURE,)
    cells: dict[tuple[Polarization, MeasurementOutcome], Fraction] = {
        (s, o): Fraction(0) for s in senders for o in outcomes
    }
    w_sender = Fraction(1, len(senders))
    w_filter = Fraction(1, len(filter_set))
    for s in senders:
        for f in filter_set:
            for outcome, p in transition_distribution(s, f).items():
                cells[(s, outcome)] += w_sender * w_filter * p
    return JointDistribution(cells, senders, outcomes)


@dataclass(frozen=True)
class EntropyReport:
    """The channel's information accounting, exact and in floats.

    ``mutual_info`` is what the receiver's datum reveals about the sent
    state; its complement ``equivocation`` (the conditional entropy of the
    sent state given the datum) is the per-photon uncertainty an observer
    of one end retains.
    """

    h_a: ExactBits
    h_b: ExactBits
    h_ab: ExactBits
    mutual_info: ExactBits

    @property
    def equivocation(self) -> ExactBits:
        return self.h_ab - self.h_b

    def as_floats(self) -> dict[str, float]:
        return {
            "h_a": float(self.h_a),
            "h_b": float(self.h_b),
            "h_ab": float(self.h_ab),
            "mutual_info": float(self.mutual_info),
        }


def entropy_report(
    joint: Optional[JointDistribution] = None,
) -> EntropyReport:
    """Entropies of sender, receiver and pair, plus their mutual information."""
    if joint is None:
        joint = joint_distribution()
    h_a = entropy_bits(joint.sender_marginal().values())
    h_b = entropy_bits(joint.receiver_marginal().values())
    h_ab = entropy_bits(joint.cells.values())
    return EntropyReport(h_a=h_a, h_b=h_b, h_ab=h_ab, mutual_info=h_a + h_b - h_ab)


# ---------------------------------------------------------------------------
# Rates: keep/key/auth fractions and the staged information-rate chain
# ---------------------------------------------------------------------------


def kept_fraction(
    alphabet: Sequence[Polarization] = THREE_STATE_ALPHABET,
    filter_set: Sequence[Polarization] = THREE_STATE_FILTERS,
) -> Fraction:
    """Probability a uniform (sent, filter) position survives keep/discard."""
    cells = [(s, f) for s in alphabet for f in filter_set]
    keepers = sum(1 for s, f in cells if has_deterministic_outcome(s, f))
    return Fraction(keepers, len(cells))


def three_state_key_fraction() -> Fraction:
    """Kept positions under a rectilinear filter: the secret-bit rate."""
    cells = [(s, f) for s in THREE_STATE_ALPHABET for f in THREE_STATE_FILTERS]
    hits = sum(
        1
        for s, f in cells
        if has_deterministic_outcome(s, f) and f is not Polarization.D45
    )
    return Fraction(hits, len(cells))


def three_state_auth_fraction() -> Fraction:
    """Kept positions under the diagonal filter: the tamper-evidence rate."""
    return kept_fraction() - three_state_key_fraction()


@dataclass(frozen=True)
class InformationRateChain:
    """Per-photon information budget, narrowed in three stages.

    Start from the receiver-side equivocation of 4/3 bits per photon; drop
    the third of photons that only ever serve authentication (x 2/3); let
    the binary detect-or-erase reading resolve half of what remains (x 1/2).
    The end of the chain must equal the key rate computed by counting
    confirmed rectilinear positions — the two derivations agree at 4/9.
    """

    per_photon_uncertainty: Fraction
    after_auth_exclusion: Fraction
    usable_key_rate: Fraction

    @property
    def stages(self) -> tuple[Fraction, Fraction, Fraction]:
        return (
            self.per_photon_uncertainty,
            self.after_auth_exclusion,
            self.usable_key_rate,
        )


def information_rate_chain() -> InformationRateChain:
    report = entropy_report()
    equivocation = report.equivocation
    if equivocation.log3_coefficient != 0:
        raise AssertionError("equivocation should be purely rational")
    start = equivocation.constant
    after_exclusion = start * Fraction(2, 3)
    final = after_exclusion * Fraction(1, 2)
    if final != three_state_key_fraction():
        raise AssertionError("rate chain must land on the counting-based key rate")
    return InformationRateChain(start, after_exclusion, final)


# ---------------------------------------------------------------------------
# Protocol comparison: key counts and certification confidence
# ---------------------------------------------------------------------------


def three_state_certification_probability(n: int) -> float:
    """Model curve 1 - 3^(-n/9) for detecting a full intercept.

    Idealized: assumes one authentication position per nine photons and a
    certain alarm whenever the interceptor's filter was not the diagonal
    one.  Concrete resend policies alarm less often (see
    :func:`auth_failure_probability`); this curve is reported next to the
    enumerated truth, never asserted against it.
    """
    if n < 0:
        raise ValueError("photon count must be non-negative")
    return 1.0 - 3.0 ** (-(n / 9))


def bb84_certification_probability(m: int) -> float:
    """1 - 2^(-m): each parity round halves the chance of missing an error."""
    if m < 0:
        raise ValueError("round count must be non-negative")
    return 1.0 - 2.0 ** (-m)


def equal_confidence_rounds(n: int) -> float:
    """Parity rounds m at which both certification curves coincide.

    Solves 2^-m = 3^(-n/9): m = n·log2(3)/9 ≈ 0.176·n.  More rounds than
    this favours the parity approach on confidence (at a key-length cost).
    """
    return n * LOG2_3 / 9


@dataclass(frozen=True)
class RateComparison:
    """Both protocols' yields at the same photon budget, exactly."""

    n: int
    m: int
    three_state_key: Fraction
    bb84_key: Fraction
    three_state_cert: float
    bb84_cert: float
    crossover_n: int

    @property
    def key_advantage(self) -> Fraction:
        """Three-state key bits minus the baseline's (positive ⇔ n < 18m)."""
        return self.three_state_key - self.bb84_key

    @property
    def favored_on_key(self) -> str:
        if self.key_advantage > 0:
            return "three_state"
        if self.key_advantage < 0:
            return "bb84"
        return "tie"


def compare(n: int, m: int) -> RateComparison:
    """Key counts and certification confidence for both protocols.

    The expected key counts 4n/9 and n/2 - m meet exactly at n = 18m; below
    the crossover the three-state protocol yields more bits.
    """
    if n < 1:
        raise ValueError("need at least one photon")
    if m < 0:
        raise ValueError("round count must be non-negative")
    return RateComparison(
        n=n,
        m=m,
        three_state_key=Fraction(4 * n, 9),
        bb84_key=Fraction(n, 2) - m,
        three_state_cert=three_state_certification_probability(n),
        bb84_cert=bb84_certification_probability(m),
        crossover_n=18 * m,
    )


# ---------------------------------------------------------------------------
# Attack enumeration oracles
# ---------------------------------------------------------------------------


def arrival_distribution(
    sent: Polarization,
    attack: Attack,
    filter_set: Sequence[Polarization] = THREE_STATE_FILTERS,
    alphabet: Sequence[Polarization] = THREE_STATE_ALPHABET,
) -> dict[Optional[Polarization], Fraction]:
    """Exact law of what leaves the attacked channel (None = nothing).

    Enumerates the interceptor's branches — fraction gate, filter choice,
    her detect/erase outcome, resend policy — with exact weights.
    """
    attack = normalize_attack(attack)
    out: dict[Optional[Polarization], Fraction] = {}

    def add(state: Optional[Polarization], w: Fraction) -> None:
        if w:
            out[state] = out.get(state, Fraction(0)) + w

    if not isinstance(attack, InterceptResend):
        add(sent, Fraction(1))
        return out
    fraction = Fraction(attack.fraction)
    add(sent, 1 - fraction)
    if fraction == 0:
        return out
    if attack.filter_choice is not None:
        filter_weights = {attack.filter_choice: Fraction(1)}
    else:
        filter_weights = {f: Fraction(1, len(filter_set)) for f in filter_set}
    for eve_filter, w_filter in filter_weights.items():
        w_branch = fraction * w_filter
        p_detect = detection_probability(sent, eve_filter)
        add(eve_filter, w_branch * p_detect)
        w_erase = w_branch * (1 - p_detect)
        if attack.resend is ResendPolicy.ORTHOGONAL_INFERENCE:
            add(eve_filter.orthogonal, w_erase)
        elif attack.resend is ResendPolicy.SEND_NOTHING:
            add(None, w_erase)
        else:
            for a in alphabet:
                add(a, w_erase / len(alphabet))
    return out


def receiver_outcome_distribution(
    sent: Polarization,
    receiver_filter: Polarization,
    attack: Attack = NoAttack(),
    filter_set: Sequence[Polarization] = THREE_STATE_FILTERS,
    alphabet: Sequence[Polarization] = THREE_STATE_ALPHABET,
) -> dict[MeasurementOutcome, Fraction]:
    """Exact law of the receiver's reading at one position under attack."""
    out: dict[MeasurementOutcome, Fraction] = {}
    for arriving, w in arrival_distribution(sent, attack, filter_set, alphabet).items():
        if arriving is None:
            out[ERASURE] = out.get(ERASURE, Fraction(0)) + w
            continue
        for outcome, p in transition_distribution(arriving, receiver_filter).items():
            if p:
                out[outcome] = out.get(outcome, Fraction(0)) + w * p
    return out


def auth_failure_probability(attack: Attack) -> Fraction:
    """Chance one authentication position alarms (erasure where a detection
    is forced), per the exact enumeration.  Scales linearly with the
    attacked fraction, since untouched photons never alarm there."""
    dist = receiver_outcome_distribution(Polarization.D45, Polarization.D45, attack)
    return dist.get(ERASURE, Fraction(0))


def key_error_probability(attack: Attack) -> Fraction:
    """Chance a confirmed key position silently yields disagreeing bits.

    Averaged over the four equally likely (rectilinear sent, rectilinear
    filter) cells.  These errors raise no alarm at the position itself —
    which is exactly why the diagonal positions carry the tamper check.
    """
    rect = (Polarization.Z0, Polarization.Z90)
    cells = [(s, f) for s in rect for f in rect]
    err = Fraction(0)
    for s, f in cells:
        dist = receiver_outcome_distribution(s, f, attack)
        for outcome, p in dist.items():
            if bit_map(infer_polarization(f, outcome)) != bit_map(s):
                err += p
    return err / len(cells)


def bb84_sift_error_probability(attack: Attack) -> Fraction:
    """Chance a sifted baseline-protocol position carries disagreeing bits."""
    cells = [
        (s, f)
        for s in BB84_ALPHABET
        for f in BB84_FILTERS
        if has_deterministic_outcome(s, f)
    ]
    err = Fraction(0)
    for s, f in cells:
        dist = receiver_outcome_distribution(s, f, attack, BB84_FILTERS, BB84_ALPHABET)
        for outcome, p in dist.items():
            if bit_map(infer_polarization(f, outcome)) != bit_map(s):
                err += p
    return err / len(cells)


def model_auth_failure_rate(fraction: Union[float, Fraction]) -> Fraction:
    """The idealized per-authentication-position alarm rate, 2/3 x fraction.

    2/3 is the chance the interceptor's uniform filter choice is not the
    diagonal one, counted as a certain alarm — the model curve reported
    alongside enumerated and empirical values in sweep tables.
    """
    return Fraction(2, 3) * Fraction(fraction)


def session_detection_probability(
    per_auth_failure: Union[float, Fraction], n: int
) -> float:
    """Chance at least one of a session's auth positions alarms.

    Each photon independently lands in the (diagonal, diagonal) cell with
    probability 1/9 and then alarms with the given per-position rate.
    """
    p = float(per_auth_failure) / 9.0
    return 1.0 - (1.0 - p) ** n


# ---------------------------------------------------------------------------
# Empirical estimators (Monte Carlo side of the empirical-vs-exact checks)
# ---------------------------------------------------------------------------


def _plugin_entropy(frequencies: Iterable[float]) -> float:
    return -sum(p * math.log2(p) for p in frequencies if p > 0)


def standard_error(p: float, trials: int) -> float:
    """Binomial standard error of a frequency estimate."""
    if trials <= 0:
        raise ValueError("need a positive sample size")
    return math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class EmpiricalStatistics:
    """Plug-in estimates pooled from session reports, with standard errors."""

    photons: int
    joint_frequencies: dict[str, dict[str, float]]
    receiver_frequencies: dict[str, float]
    h_a: float
    h_b: float
    h_ab: float
    mutual_info: float
    confirmed_fraction: float
    key_fraction: float
    auth_fraction: float
    standard_errors: dict[str, float]


def empirical_statistics(reports: Sequence) -> EmpiricalStatistics:
    """Pool per-session counts into frequency estimates.

    Accepts any objects exposing ``joint_counts`` (sent-name → outcome-label
    → count) and ``counts`` (with sent/confirmed/key/auth totals), i.e.
    session reports.  Pooling is pure summation, so the result is
    independent of report order.
    """
    if not reports:
        raise EmptyInput("no session reports to pool")
    pooled: dict[str, dict[str, int]] = {}
    totals = {"sent": 0, "confirmed": 0, "key": 0, "auth": 0}
    for report in reports:
        for sent_name, row in report.joint_counts.items():
            dest = pooled.setdefault(sent_name, {})
            for label, count in row.items():
                dest[label] = dest.get(label, 0) + count
        for field in totals:
            totals[field] += report.counts[field]
    # Canonical key order before any float work: integer pooling commutes,
    # but float summation only does if it always runs in the same order.
    joint = {
        s: {label: row[label] for label in sorted(row)} for s, row in sorted(pooled.items())
    }
    photons = totals["sent"]
    if photons == 0:
        raise EmptyInput("pooled reports contain no photons")

    joint_freq = {
        s: {label: count / photons for label, count in row.items()}
        for s, row in joint.items()
    }
    sender_freq = [sum(row.values()) / photons for row in joint.values()]
    receiver_freq: dict[str, float] = {}
    for row in joint.values():
        for label, count in row.items():
            receiver_freq[label] = receiver_freq.get(label, 0.0) + count / photons

    h_a = _plugin_entropy(sender_freq)
    h_b = _plugin_entropy(receiver_freq.values())
    h_ab = _plugin_entropy(
        count / photons for row in joint.values() for count in row.values()
    )
    confirmed_fraction = totals["confirmed"] / photons
    key_fraction = totals["key"] / photons
    auth_fraction = totals["auth"] / photons
    errors = {
        "confirmed_fraction": standard_error(confirmed_fraction, photons),
        "key_fraction": standard_error(key_fraction, photons),
        "auth_fraction": standard_error(auth_fraction, photons),
    }
    for label, freq in receiver_freq.items():
        errors[f"receiver_{label}"] = standard_error(freq, photons)
    return EmpiricalStatistics(
        photons=photons,
        joint_frequencies=joint_freq,
        receiver_frequencies=receiver_freq,
        h_a=h_a,
        h_b=h_b,
        h_ab=h_ab,
        mutual_info=h_a + h_b - h_ab,
        confirmed_fraction=confirmed_fraction,
        key_fraction=key_fraction,
        auth_fraction=auth_fraction,
        standard_errors=errors,
    )
