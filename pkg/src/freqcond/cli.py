"""Command-line front end: ``freqcond <subcommand> [options]``.

Every subcommand writes one JSON report (or a CSV table with
``--format csv``) that embeds the tool version and the full run
configuration, so a rerun with the same arguments is byte-identical.
Exact rationals are written as ``"p/q"`` strings and integers that may
exceed 64 bits as decimal strings.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from .asymptotics import convergence_sweep
from .enumeration import (
    DEFAULT_CAP,
    count_paths_brute,
    count_with_term_brute,
    enumerate_chain_strings,
    iid_conditional_brute,
    iid_pair_conditional_brute,
)
from .exceptions import ConsistencyError, FreqCondError, InvalidInputError
from .model import FrequencyMatrix, MarkovModel, balance_report, frequency_of_trajectory, load_json
from .posterior import BRUTE, WHITTLE, iid_pair_posterior, iid_posterior, markov_posterior
from .simulate import MIN_HITS, default_threads, verify_exact_vs_mc
from .whittle import first_transition_breakdown, whittle_breakdown

# used by `sweep` and `mc-verify` when no --model is given
DEFAULT_MODEL = {
    "N": 3,
    "P": [[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.3, 0.3, 0.4]],
    "pi0": [0.5, 0.3, 0.2],
}


def fmt(x):
    """JSON-safe rendering: Fractions as ``"p/q"``, ints as strings."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return x


def _load_freq(path) -> FrequencyMatrix:
    return FrequencyMatrix.from_dict(load_json(path))


def _load_model(path) -> MarkovModel:
    return MarkovModel.from_dict(load_json(path) if path else DEFAULT_MODEL)


def _balance(freq: FrequencyMatrix) -> dict:
    rep = balance_report(freq)
    return {"kind": rep.kind, "d": list(rep.d), "head": rep.head, "tail": rep.tail,
            "candidate_heads": sorted(rep.candidate_heads)}


def cmd_count(args):
    freq = _load_freq(args.freq)
    b = whittle_breakdown(freq, args.from_, args.to)
    row = {"u": args.from_, "v": args.to, "N_uv": fmt(b.count), "multinomial": fmt(b.multinomial),
           "cofactor": fmt(b.cofactor), "admissible": b.admissible}
    return {"freq": freq.to_dict(), "balance": _balance(freq), **row}, [row]


def cmd_first_count(args):
    freq = _load_freq(args.freq)
    b = first_transition_breakdown(freq, args.i, args.j)
    row = {"i": args.i, "j": args.j, "count": fmt(b.count), "by_decrement": fmt(b.by_decrement),
           "by_closed_form": fmt(b.by_closed_form), "tail": b.tail, "N_iv": fmt(b.N_iv),
           "fstar_cofactor": fmt(b.fstar_cofactor), "fstar_tilde_cofactor": fmt(b.fstar_tilde_cofactor)}
    return {"freq": freq.to_dict(), **row}, [row]


def cmd_posterior(args):
    freq = _load_freq(args.freq)
    model = _load_model(args.model)
    if model.N != freq.N:
        raise InvalidInputError(f"model has {model.N} states but the event has {freq.N}")
    table = markov_posterior(freq, model.pi0, args.method)
    rows = []
    for (i, j), p in sorted(table.entries.items()):
        rows.append({"i": i, "j": j, "posterior": fmt(p) if isinstance(p, Fraction) else p, "float": float(p),
                     "given_start": fmt(table.given_start[(i, j)])})
    start = [{"i": i, "posterior": fmt(p) if isinstance(p, Fraction) else p} for i, p in sorted(table.start.items())]
    report = {"freq": freq.to_dict(), "balance": _balance(freq), "method": args.method,
              "exact": table.exact, "start": start, "entries": rows}
    return report, rows


def _parse_counts(text: str) -> dict:
    try:
        counts = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"--counts: invalid JSON at column {exc.colno}: {exc.msg}") from exc
    if not isinstance(counts, dict):
        raise InvalidInputError("--counts must be a JSON object mapping values to counts")
    return counts


def cmd_iid(args):
    counts = _parse_counts(args.counts)
    report = {"counts": counts}
    rows = []
    if args.m is not None:
        report["posterior"] = fmt(iid_posterior(counts, args.m))
        if args.brute:
            n = sum(counts.values())
            report["brute"] = [fmt(iid_conditional_brute(counts, ell, args.m)) for ell in range(1, n + 1)]
        rows.append({"m1": args.m, "m2": "", "posterior": report["posterior"]})
    if args.pairs or args.m is None:
        values = sorted(counts)
        table = []
        for m1 in values:
            for m2 in values:
                entry = {"m1": m1, "m2": m2, "posterior": fmt(iid_pair_posterior(counts, m1, m2))}
                if args.brute:
                    entry["brute"] = fmt(iid_pair_conditional_brute(counts, 1, 2, m1, m2))
                table.append(entry)
        report["pairs"] = table
        rows.extend(table)
    return report, rows


def cmd_oracle(args):
    freq = _load_freq(args.freq)
    strings = enumerate_chain_strings(freq, head=args.head, cap=args.cap)
    if args.to is not None:
        strings = [s for s in strings if s.tail == args.to]
    report = {"freq": freq.to_dict(), "balance": _balance(freq), "head": args.head, "tail": args.to,
              "count": fmt(len(strings))}
    rows = [{"string": " ".join(map(str, s.states)), "head": s.head, "tail": s.tail} for s in strings]
    if args.list:
        report["strings"] = [r["string"] for r in rows]
    return report, rows


def _random_event(rng: random.Random, max_N: int, max_n: int) -> FrequencyMatrix:
    N = rng.randint(1, max_N)
    n = rng.randint(1, max_n)
    if rng.random() < 0.8:
        traj = [rng.randint(1, N) for _ in range(n + 1)]
        return frequency_of_trajectory(traj, N)
    nu = [[0] * N for _ in range(N)]
    for _ in range(n):
        nu[rng.randrange(N)][rng.randrange(N)] += 1
    return FrequencyMatrix(nu)


def cmd_oracle_check(args):
    rng = random.Random(args.seed)
    checked = mismatches = 0
    failures = []
    for _ in range(args.trials):
        freq = _random_event(rng, args.max_N, args.max_n)
        states = range(1, freq.N + 1)
        for u in states:
            for v in states:
                got, want = whittle_breakdown(freq, u, v).count, count_paths_brute(freq, u, v, args.cap)
                checked += 1
                if got != want:
                    mismatches += 1
                    failures.append({"freq": freq.to_dict(), "what": "N_uv", "u": u, "v": v,
                                     "whittle": fmt(got), "brute": fmt(want)})
        for i in states:
            for j in states:
                got = first_transition_breakdown(freq, i, j).count
                want = count_with_term_brute(freq, 1, i, j, args.cap)
                checked += 1
                if got != want:
                    mismatches += 1
                    failures.append({"freq": freq.to_dict(), "what": "first", "i": i, "j": j,
                                     "whittle": fmt(got), "brute": fmt(want)})
    summary = "all counts agree" if not mismatches else f"{mismatches} of {checked} counts disagree"
    report = {"trials": args.trials, "comparisons": checked, "mismatches": mismatches,
              "summary": summary, "failures": failures}
    if mismatches:
        raise _Failed(report, failures)
    return report, [{"trials": args.trials, "comparisons": checked, "mismatches": 0, "summary": summary}]


def cmd_mc_verify(args):
    model = _load_model(args.model)
    report = verify_exact_vs_mc(model, args.n, args.samples, args.seed, args.min_hits, threads=args.threads)
    rows = [{"key": e["key"], "hits": e["hits"], **c} for e in report["events"] for c in e["cells"]]
    return report, rows


def cmd_sweep(args):
    model = _load_model(args.model)
    report = convergence_sweep(model, args.n_list, args.mu, args.samples, args.seed, threads=args.threads)
    return report.to_dict(), [asdict(r) for r in report.rows]


class _Failed(FreqCondError):
    """A check ran to completion and found disagreements; the report is still written."""

    def __init__(self, report, rows):
        super().__init__(report["summary"])
        self.report, self.rows = report, rows


def _n_list(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        values = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("every n must be >= 1")
    return values


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freqcond", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"freqcond {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("count", parents=[common], help="Whittle count of strings from u to v")
    p.add_argument("--freq", required=True, help="frequency matrix JSON")
    p.add_argument("--from", dest="from_", type=int, required=True, metavar="U")
    p.add_argument("--to", type=int, required=True, metavar="V")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("first-count", parents=[common], help="strings starting with (i, j), both routes")
    p.add_argument("--freq", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(func=cmd_first_count)

    p = sub.add_parser("posterior", parents=[common], help="posterior law of the first transition")
    p.add_argument("--model", required=True, help="Markov model JSON")
    p.add_argument("--freq", required=True)
    p.add_argument("--method", choices=(WHITTLE, BRUTE), default=WHITTLE)
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("iid", parents=[common], help="i.i.d. posterior nu_m / n and the pairwise table")
    p.add_argument("--counts", required=True, help='JSON object, e.g. \'{"1":2,"2":1}\'')
    p.add_argument("--m", help="value whose posterior to report")
    p.add_argument("--pairs", action="store_true", help="also emit the pairwise table")
    p.add_argument("--brute", action="store_true", help="add brute-force enumeration values")
    p.set_defaults(func=cmd_iid)

    p = sub.add_parser("oracle", parents=[common], help="brute-force enumeration of chain strings")
    p.add_argument("--freq", required=True)
    p.add_argument("--head", type=int)
    p.add_argument("--to", type=int, help="keep only strings with this tail")
    p.add_argument("--list", action="store_true", help="include the strings in the JSON report")
    p.add_argument("--cap", type=_positive, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("oracle-check", parents=[common], help="random Whittle-vs-brute equivalence check")
    p.add_argument("--max-n", type=_positive, default=6)
    p.add_argument("--max-N", type=_positive, default=3)
    p.add_argument("--trials", type=_positive, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=_positive, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("mc-verify", parents=[common], help="Monte Carlo check of the exact posterior")
    p.add_argument("--model", help="Markov model JSON (default: built-in 3-state chain)")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--samples", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--min-hits", type=_positive, default=MIN_HITS)
    p.add_argument("--threads", type=_positive, help="worker threads (default: FREQCOND_THREADS or 1)")
    p.set_defaults(func=cmd_mc_verify)

    p = sub.add_parser("sweep", parents=[common], help="large-n diagnostics on typical events")
    p.add_argument("--model", help="Markov model JSON (default: built-in 3-state chain)")
    p.add_argument("--n-list", type=_n_list, required=True, help="comma-separated, e.g. 50,200,800")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--samples", type=_positive, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=_positive)
    p.set_defaults(func=cmd_sweep)
    return parser


def _config(args) -> dict:
    skip = {"func", "output", "threads"}
    return {k.rstrip("_"): v for k, v in sorted(vars(args).items()) if k not in skip}


def _render(report: dict, rows: list[dict], args) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        names = list(dict.fromkeys(k for r in rows for k in r))
        writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    doc = {"tool": "freqcond", "version": __version__, "config": _config(args), "report": report}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(text: str, path) -> None:
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InvalidInputError(f"cannot write {path}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    """Parse ``argv``, run one subcommand, and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        args.threads = default_threads()
    try:
        report, rows = args.func(args)
    except _Failed as exc:
        _emit(_render(exc.report, exc.rows, args), args.output)
        print(f"freqcond: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"freqcond: internal consistency failure: {exc}", file=sys.stderr)
        return 1
    except (FreqCondError, ValueError) as exc:
        print(f"freqcond: error: {exc}", file=sys.stderr)
        return 1
    try:
        _emit(_render(report, rows, args), args.output)
    except FreqCondError as exc:
        print(f"freqcond: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
