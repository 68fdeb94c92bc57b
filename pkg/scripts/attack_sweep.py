#!/usr/bin/env python3
"""Print the full interception grid: empirical vs enumerated vs model rates.

Each row is one (interceptor filter, resend policy, fraction) cell.  The
empirical per-auth-position failure rate comes from seeded sessions; the
oracle column is the exact branch enumeration; the model column is the
idealized 2/3 x fraction curve that assumes every wrong-filter interception
alarms.
"""

import argparse

from qkdsim.harness import SessionConfig, attack_sweep, sweep_to_csv


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=90_000, help="photons per session")
    parser.add_argument("--trials", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--fractions",
        default="1.0",
        help="comma-separated interception fractions, e.g. 0.25,0.5,1.0",
    )
    args = parser.parse_args(argv)

    fractions = [float(x) for x in args.fractions.split(",") if x.strip()]
    base = SessionConfig(
        protocol="three_state", n=args.n, seed=args.seed, trials=args.trials
    )
    rows = attack_sweep(base, fractions=fractions)
    print(sweep_to_csv(rows), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
