"""Experiment harness: configured sessions, seeded trials, serialized reports.

A :class:`SessionConfig` fully determines a batch of sessions — protocol,
photon budget, attack, seed, trial count — and :func:`run` executes it
reproducibly: trial t draws everything from a child seed mixed from
(master seed, t), so reports are byte-identical across runs and trials can
be pooled in any order.  Serialization is deliberately boring: one JSON
document per invocation, schema-versioned, keys sorted, no timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence

from .analysis import (
    auth_failure_probability,
    key_error_probability,
    model_auth_failure_rate,
)
from .bb84 import bb84_run, parity_certify
from .eavesdrop import (
    Attack,
    InterceptResend,
    NoAttack,
    PassiveClassical,
    StuckFilter,
)
from .photons import MeasurementOutcome, Polarization, ResendPolicy
from .rng import RandomSource, derive_child_seed
from .three_state import three_state_run

SCHEMA_VERSION = 1
PROTOCOL_THREE_STATE = "three_state"
PROTOCOL_BB84 = "bb84"
_PROTOCOLS = (PROTOCOL_THREE_STATE, PROTOCOL_BB84)


class InvalidConfig(ValueError):
    """A session configuration that fails validation, with the field named."""


@dataclass(frozen=True)
class SessionConfig:
    """Everything needed to reproduce a batch of sessions."""

    protocol: str
    n: int
    m: Optional[int] = None
    attack: Attack = NoAttack()
    seed: int = 0
    trials: int = 1
    abort_on_tamper: bool = True
    include_transcripts: bool = False

    def validate(self) -> "SessionConfig":
        if self.protocol not in _PROTOCOLS:
            raise InvalidConfig(
                f"protocol: expected one of {_PROTOCOLS}, got {self.protocol!r}"
            )
        if self.n < 1:
            raise InvalidConfig(f"n: need at least one photon, got {self.n}")
        if self.trials < 1:
            raise InvalidConfig(f"trials: need at least one trial, got {self.trials}")
        if self.protocol == PROTOCOL_BB84:
            if self.m is None:
                raise InvalidConfig("m: parity round count is required for bb84")
            if self.m < 0:
                raise InvalidConfig(f"m: must be non-negative, got {self.m}")
        elif self.m is not None:
            raise InvalidConfig(
                "m: parity rounds belong to bb84; omit for three_state"
            )
        return self


def outcome_label(outcome: MeasurementOutcome) -> str:
    """Stable string form of a receiver outcome class, for report keys."""
    if outcome.is_erasure:
        return "erasure"
    return f"detected_{outcome.detected_as.degrees}"


def attack_to_jsonable(attack: Attack) -> dict[str, Any]:
    if isinstance(attack, NoAttack):
        return {"kind": "no_attack"}
    if isinstance(attack, PassiveClassical):
        return {"kind": "passive_classical"}
    if isinstance(attack, StuckFilter):
        return {"kind": "stuck_filter", "angle": attack.angle.name}
    if isinstance(attack, InterceptResend):
        choice = "uniform" if attack.filter_choice is None else attack.filter_choice.name
        return {
            "kind": "intercept_resend",
            "filter_choice": choice,
            "resend": attack.resend.value,
            "fraction": attack.fraction,
        }
    raise TypeError(f"unknown attack type {type(attack).__name__}")


def config_to_jsonable(config: SessionConfig) -> dict[str, Any]:
    return {
        "protocol": config.protocol,
        "n": config.n,
        "m": config.m,
        "attack": attack_to_jsonable(config.attack),
        "seed": config.seed,
        "trials": config.trials,
        "abort_on_tamper": config.abort_on_tamper,
        "include_transcripts": config.include_transcripts,
    }


@dataclass(frozen=True)
class SessionReport:
    """One trial's outcome in serializable form."""

    protocol: str
    trial: int
    seed: int
    counts: dict[str, int]
    outcome_counts: dict[str, int]
    joint_counts: dict[str, dict[str, int]]
    tamper: dict[str, Any]
    aborted: bool
    key_agreement: Optional[dict[str, Any]]
    transcript: Optional[list[dict[str, Any]]] = None

    def to_jsonable(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "protocol": self.protocol,
            "trial": self.trial,
            "seed": self.seed,
            "counts": self.counts,
            "outcome_counts": self.outcome_counts,
            "joint_counts": self.joint_counts,
            "tamper": self.tamper,
            "aborted": self.aborted,
            "key_agreement": self.key_agreement,
        }
        if self.transcript is not None:
            doc["transcript"] = self.transcript
        return doc


def _tally(
    sent: Sequence[Polarization], outcomes: Sequence[MeasurementOutcome]
) -> tuple[dict[str, int], dict[str, dict[str, int]]]:
    outcome_counts: dict[str, int] = {}
    joint: dict[str, dict[str, int]] = {}
    for s, o in zip(sent, outcomes):
        label = outcome_label(o)
        outcome_counts[label] = outcome_counts.get(label, 0) + 1
        row = joint.setdefault(s.name, {})
        row[label] = row.get(label, 0) + 1
    return outcome_counts, joint


def _key_agreement(alice_key: Sequence[int], bob_key: Sequence[int]) -> dict[str, Any]:
    differing = sum(1 for a, b in zip(alice_key, bob_key) if a != b)
    length = len(alice_key)
    return {
        "length": length,
        "matching": length - differing,
        "differing": differing,
        "error_rate": differing / length if length else 0.0,
        "keys_match": differing == 0,
    }


def run_trial(config: SessionConfig, trial: int) -> SessionReport:
    """Execute one session with the trial's derived seed."""
    trial_seed = derive_child_seed(config.seed, trial)
    rng = RandomSource(trial_seed)
    if config.protocol == PROTOCOL_THREE_STATE:
        result = three_state_run(config.n, rng, config.attack)
        counts = {
            "sent": config.n,
            "confirmed": result.confirmation.count,
            "key": len(result.key_material.key_positions),
            "auth": len(result.key_material.auth_positions),
        }
        tamper: dict[str, Any] = {
            "method": "auth_positions",
            "auth_checked": result.tamper.auth_checked,
            "auth_failures": result.tamper.auth_failures,
            "tamper_detected": result.tamper.tamper_detected,
            "model_certification": result.tamper.model_certification,
        }
        tampered = result.tamper.tamper_detected
        alice_key: Sequence[int] = result.alice_key_bits
        bob_key: Sequence[int] = result.key_material.key_bits
        sent, outcomes = result.alice.sent, result.bob.outcomes
        transcript = result.transcript
    else:
        run_result = bb84_run(config.n, rng, config.attack)
        assert config.m is not None  # validate() guarantees it
        cert = parity_certify(
            run_result.sift.alice_key,
            run_result.sift.bob_key,
            config.m,
            rng.child(3),
            transcript=run_result.transcript,
        )
        counts = {
            "sent": config.n,
            "confirmed": len(run_result.sift.kept_indices),
            "key": cert.final_key_length,
            "auth": config.m,
        }
        tamper = {
            "method": "parity_rounds",
            "rounds": cert.rounds,
            "mismatch_detected": cert.mismatch_detected,
            "detection_round": cert.detection_round,
            "tamper_detected": cert.mismatch_detected,
        }
        tampered = cert.mismatch_detected
        alice_key = cert.surviving_bits(run_result.sift.alice_key)
        bob_key = cert.surviving_bits(run_result.sift.bob_key)
        sent, outcomes = run_result.alice.sent, run_result.bob.outcomes
        transcript = run_result.transcript

    outcome_counts, joint_counts = _tally(sent, outcomes)
    aborted = tampered and config.abort_on_tamper
    return SessionReport(
        protocol=config.protocol,
        trial=trial,
        seed=trial_seed,
        counts=counts,
        outcome_counts=outcome_counts,
        joint_counts=joint_counts,
        tamper=tamper,
        aborted=aborted,
        key_agreement=None if aborted else _key_agreement(alice_key, bob_key),
        transcript=transcript.to_jsonable() if config.include_transcripts else None,
    )


def run(config: SessionConfig) -> list[SessionReport]:
    """Execute all configured trials sequentially and reproducibly."""
    config.validate()
    return [run_trial(config, t) for t in range(config.trials)]


def aggregate(reports: Sequence[SessionReport]) -> dict[str, Any]:
    """Pool per-trial counts into batch statistics.

    Pure sums and ratios of sums, so the result does not depend on the
    order the reports are supplied in.
    """
    if not reports:
        raise InvalidConfig("reports: nothing to aggregate")
    trials = len(reports)
    totals = {"sent": 0, "confirmed": 0, "key": 0, "auth": 0}
    for r in reports:
        for k in totals:
            totals[k] += r.counts[k]
    tampered = sum(1 for r in reports if r.tamper["tamper_detected"])
    aborted = sum(1 for r in reports if r.aborted)
    key_bits = sum(r.key_agreement["length"] for r in reports if r.key_agreement)
    key_errors = sum(r.key_agreement["differing"] for r in reports if r.key_agreement)
    auth_checked = sum(r.tamper.get("auth_checked", 0) for r in reports)
    auth_failures = sum(r.tamper.get("auth_failures", 0) for r in reports)
    out: dict[str, Any] = {
        "trials": trials,
        "totals": totals,
        "mean_key_count": totals["key"] / trials,
        "confirmed_fraction": totals["confirmed"] / totals["sent"],
        "key_fraction": totals["key"] / totals["sent"],
        "auth_fraction": totals["auth"] / totals["sent"],
        "detection_rate": tampered / trials,
        "aborted_trials": aborted,
        "key_error_rate": key_errors / key_bits if key_bits else 0.0,
        "compared_key_bits": key_bits,
    }
    if auth_checked:
        out["auth_failure_rate"] = auth_failures / auth_checked
    return out


def report_document(
    config: SessionConfig, reports: Sequence[SessionReport]
) -> dict[str, Any]:
    """The one-JSON-document-per-invocation shape the CLI emits."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "session_batch",
        "config": config_to_jsonable(config),
        "trials": [r.to_jsonable() for r in reports],
        "aggregate": aggregate(reports),
    }


def to_json(document: dict[str, Any]) -> str:
    """Canonical serialization: sorted keys, two-space indent, one newline."""
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Attack sweeps
# ---------------------------------------------------------------------------

SWEEP_HEADER = (
    "policy, fraction, empirical_failure, oracle_failure, paper_model, "
    "detection_rate, key_error_rate"
)
DEFAULT_FILTER_CHOICES: tuple[Optional[Polarization], ...] = (
    None,
    Polarization.Z0,
    Polarization.D45,
    Polarization.Z90,
)
DEFAULT_RESEND_POLICIES = tuple(ResendPolicy)


def filter_choice_label(choice: Optional[Polarization]) -> str:
    return "uniform" if choice is None else choice.name.lower()


@dataclass(frozen=True)
class SweepRow:
    """One (filter choice, resend policy, fraction) cell of a sweep."""

    policy: str
    fraction: float
    empirical_failure: float
    oracle_failure: float
    paper_model: float
    detection_rate: float
    key_error_rate: float
    auth_positions: int = 0
    oracle_key_error: float = 0.0

    def csv_fields(self) -> list[str]:
        return [
            self.policy,
            str(self.fraction),
            f"{self.empirical_failure:.6f}",
            f"{self.oracle_failure:.6f}",
            f"{self.paper_model:.6f}",
            f"{self.detection_rate:.6f}",
            f"{self.key_error_rate:.6f}",
        ]

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "policy": self.policy,
            "fraction": self.fraction,
            "empirical_failure": self.empirical_failure,
            "oracle_failure": self.oracle_failure,
            "paper_model": self.paper_model,
            "detection_rate": self.detection_rate,
            "key_error_rate": self.key_error_rate,
            "auth_positions": self.auth_positions,
            "oracle_key_error": self.oracle_key_error,
        }


def attack_sweep(
    base: SessionConfig,
    filter_choices: Sequence[Optional[Polarization]] = DEFAULT_FILTER_CHOICES,
    policies: Sequence[ResendPolicy] = DEFAULT_RESEND_POLICIES,
    fractions: Sequence[float] = (1.0,),
) -> list[SweepRow]:
    """Run the interception grid and line results up against the oracles.

    Per cell the table shows the measured per-auth-position failure rate,
    the exact enumeration prediction, and the idealized 2/3-per-interception
    model curve — three numbers that the sweep exists to compare.  Sessions
    run with aborts disabled, since the point is to measure what tampering
    does to the key material.
    """
    base.validate()
    if base.protocol != PROTOCOL_THREE_STATE:
        raise InvalidConfig("protocol: attack sweeps target the three_state protocol")
    rows = []
    for choice in filter_choices:
        for policy in policies:
            for fraction in fractions:
                attack = InterceptResend(
                    filter_choice=choice, resend=policy, fraction=fraction
                )
                config = replace(base, attack=attack, abort_on_tamper=False)
                reports = run(config)
                agg = aggregate(reports)
                auth_checked = sum(r.tamper["auth_checked"] for r in reports)
                auth_failures = sum(r.tamper["auth_failures"] for r in reports)
                rows.append(
                    SweepRow(
                        policy=f"{filter_choice_label(choice)}/{policy.value}",
                        fraction=fraction,
                        empirical_failure=(
                            auth_failures / auth_checked if auth_checked else 0.0
                        ),
                        oracle_failure=float(auth_failure_probability(attack)),
                        paper_model=float(model_auth_failure_rate(fraction)),
                        detection_rate=agg["detection_rate"],
                        key_error_rate=agg["key_error_rate"],
                        auth_positions=auth_checked,
                        oracle_key_error=float(key_error_probability(attack)),
                    )
                )
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    lines.extend(", ".join(row.csv_fields()) for row in rows)
    return "\n".join(lines) + "\n"
