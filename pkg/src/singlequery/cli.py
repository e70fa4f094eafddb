"""Command-line experiment runner.

Every subcommand prints a list of records with the fields ``algorithm``,
``params``, ``predicted``, ``observed``, ``transcripts_summary`` and
``cost_report``. Output depends only on the arguments, so a repeated
invocation with the same seed is byte-identical.

Exit codes: 0 success, 2 bad arguments, 3 resource cap, 4 invariant
violation, 1 any other library failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .algebra import DigitString, random_generators
from .algorithms import CoinWeighing, IndexedSearch, huffman_search, walsh_search
from .baselines import (
    classical_bisection,
    classical_huffman_search,
    classical_parity_readout,
    classical_random_code,
)
from .codes import (
    SourceDistribution,
    build_huffman,
    code_length,
    collision_probability,
    collision_probability_approx,
    collision_probability_independent,
    random_candidates,
    slack_bits,
    truncation_error_probability,
)
from .costmodel import (
    ALGORITHMS,
    coin_bound,
    crossover,
    info_bound,
    predetermined_limit,
    runtime,
)
from .errors import (
    DimensionError,
    DomainError,
    InvariantViolation,
    PreconditionError,
    ResourceError,
)
from .oracle import Database, n_prime
from .quantum import inner_product

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_INVARIANT = 4

# runs x state dimension simulated by one invocation
MAX_WORK = 2**30
MAX_TRIALS = 10**6
FIDELITY_TOL = 1e-12
PROB_TOL = 1e-9
DIST_TOL = 1e-6
MAX_OVERLAP_CHECK = 64

COST_MODES = {"serial": "serial_xor", "parallel-xor": "parallel_xor"}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- helpers


def _rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent stream per (seed, sweep point, trial)."""
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def _require_seed(args) -> int:
    if args.seed is None:
        raise UsageError(f"{args.command} draws random inputs here; pass --seed")
    return args.seed


def _check_work(runs: int, dim: int) -> None:
    if runs > MAX_TRIALS:
        raise ResourceError(f"{runs} runs exceeds the cap of {MAX_TRIALS}")
    if runs * dim > MAX_WORK:
        raise ResourceError(
            f"{runs} runs on a {dim}-dimensional state exceeds the work cap of 2**30 amplitudes"
        )


def _trial_plan(args, population: int) -> tuple[str, int]:
    """``("exhaustive", population)`` or ``("sampled", trials)``."""
    if args.exhaustive:
        return "exhaustive", population
    if args.trials is None:
        raise UsageError(f"{args.command} needs --exhaustive or --trials")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    _require_seed(args)
    return "sampled", args.trials


def _sigma(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


def _within(observed: float, predicted: float, sigma: float, width: float = 3.0) -> bool:
    if sigma == 0.0:
        return abs(observed - predicted) <= 1e-12
    return abs(observed - predicted) <= width * sigma


def _summary(transcripts: Sequence, weights: Sequence[int] | None = None) -> dict:
    weights = list(weights) if weights is not None else [1] * len(transcripts)
    runs = sum(weights)
    ok = sum(w for t, w in zip(transcripts, weights) if t.success)
    amb = sum(w for t, w in zip(transcripts, weights) if t.ambiguous)
    calls = sum(w * t.oracle_calls for t, w in zip(transcripts, weights))
    out = {
        "runs": runs,
        "successes": ok,
        "failures": runs - ok,
        "ambiguous": amb,
        "success_rate": ok / runs if runs else None,
        "mean_oracle_calls": calls / runs if runs else None,
        "max_oracle_calls": max((t.oracle_calls for t in transcripts), default=None),
    }
    fids = [t.answer_register_fidelity for t in transcripts if t.answer_register_fidelity is not None]
    if fids:
        out["min_final_outcome_probability"] = min(t.final_outcome_probability for t in transcripts)
        out["min_answer_register_fidelity"] = min(fids)
    return out


def _check_quantum(transcripts: Iterable, deterministic: bool) -> None:
    for t in transcripts:
        if t.oracle_calls != 1:
            raise InvariantViolation(f"{t.algorithm} used {t.oracle_calls} oracle calls")
        if t.answer_register_fidelity is not None and t.answer_register_fidelity < 1 - FIDELITY_TOL:
            raise InvariantViolation(
                f"{t.algorithm} disturbed the answer register (fidelity {t.answer_register_fidelity})"
            )
        if deterministic and (not t.success or t.final_outcome_probability < 1 - PROB_TOL):
            raise InvariantViolation(f"{t.algorithm} failed a deterministic recovery")


def _cost(args, algorithm: str, n: int, m: int | None = None) -> dict:
    return runtime(algorithm, n, m, args.t_preset, COST_MODES[args.cost_mode]).to_dict()


def _record(algorithm, params, predicted, observed, summary, cost) -> dict:
    return {
        "algorithm": algorithm,
        "params": params,
        "predicted": predicted,
        "observed": observed,
        "transcripts_summary": summary,
        "cost_report": cost,
    }


def parse_distribution(text: str) -> SourceDistribution:
    """Probabilities from an inline list (commas or spaces) or a file of reals."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        values = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"--dist: {exc}") from None
    if len(values) < 2:
        raise UsageError("--dist needs at least two probabilities")
    if any(v < 0 or not math.isfinite(v) for v in values):
        raise UsageError("--dist probabilities must be finite and non-negative")
    total = math.fsum(values)
    if abs(total - 1.0) > DIST_TOL:
        raise UsageError(f"--dist probabilities sum to {total}, not 1 within {DIST_TOL}")
    return SourceDistribution.normalized(values)


# ------------------------------------------------------------ subcommands


def cmd_coin_weigh(args) -> list[dict]:
    records = []
    for n in args.n:
        if n < 1:
            raise UsageError("--n must be >= 1")
        mode, runs = _trial_plan(args, 2**n)
        _check_work(runs, 2**n * (n_prime(n) + 1))
        algo = CoinWeighing(n, n_prime(n) + 1)
        if mode == "exhaustive":
            ys = [DigitString.from_index(i, n) for i in range(2**n)]
        else:
            rng = _rng_for(args.seed, n)
            ys = [DigitString.from_index(int(i), n) for i in rng.integers(0, 2**n, size=runs)]
        quantum, classical = [], []
        for y in ys:
            quantum.append(algo.run(Database.of(y, "spring_scale")))
            classical.append(classical_parity_readout(Database.of(y, "spring_scale")))
        _check_quantum(quantum, deterministic=True)
        for q, c in zip(quantum, classical):
            if c.success and q.recovered != c.recovered:
                raise InvariantViolation("quantum and classical recoveries disagree")
        records.append(_record(
            "coin_weighing",
            {"n": n, "n_prime": n_prime(n), "answer_alphabet": n_prime(n) + 1,
             "mode": mode, "trials": runs, "seed": args.seed},
            {"success_rate": 1.0, "quantum_oracle_calls": 1, "classical_oracle_calls": n,
             "coin_bound": coin_bound(n)},
            {"success_rate": _summary(quantum)["success_rate"],
             "quantum_oracle_calls": _summary(quantum)["mean_oracle_calls"],
             "classical_oracle_calls": _summary(classical)["mean_oracle_calls"]},
            {"quantum": _summary(quantum), "classical": _summary(classical)},
            _cost(args, "coin_weighing", n),
        ))
    return records


def cmd_walsh_search(args) -> list[dict]:
    records = []
    for n in args.n:
        if n < 2 or n & (n - 1):
            raise UsageError(f"--n {n}: Walsh search needs a power of two >= 2")
        mode, runs = _trial_plan(args, n)
        _check_work(runs, 2 * n)
        search = walsh_search(n)
        if mode == "exhaustive":
            marks = list(range(n))
        else:
            marks = [int(i) for i in _rng_for(args.seed, n).integers(0, n, size=runs)]
        quantum, classical = [], []
        for i in marks:
            y = DigitString.unit(n, i)
            quantum.append(search.run(Database.of(y)))
            classical.append(classical_bisection(Database.of(y), n))
        _check_quantum(quantum, deterministic=True)
        for q, c in zip(quantum, classical):
            if q.recovered != c.recovered:
                raise InvariantViolation("quantum and classical recoveries disagree")
        observed = {
            "success_rate": _summary(quantum)["success_rate"],
            "quantum_oracle_calls": _summary(quantum)["mean_oracle_calls"],
            "classical_oracle_calls": _summary(classical)["mean_oracle_calls"],
        }
        if n <= MAX_OVERLAP_CHECK:
            states = [search.post_query_state(Database.of(DigitString.unit(n, i))) for i in range(n)]
            observed["max_pairwise_overlap"] = max(
                (abs(inner_product(states[i], states[j])) for i in range(n) for j in range(i + 1, n)),
                default=0.0,
            )
        log_n = n.bit_length() - 1
        records.append(_record(
            "walsh_search",
            {"n": n, "mode": mode, "trials": runs, "seed": args.seed},
            {"success_rate": 1.0, "quantum_oracle_calls": 1, "classical_oracle_calls": log_n,
             "info_bound": info_bound(log_n, 2)},
            observed,
            {"quantum": _summary(quantum), "classical": _summary(classical)},
            _cost(args, "walsh_search", n),
        ))
    return records


def cmd_huffman_search(args) -> list[dict]:
    if args.dist is None:
        raise UsageError("huffman-search needs --dist")
    source = parse_distribution(args.dist)
    code = build_huffman(source)
    ms = args.m if args.m else list(range(1, code.max_length + 1))
    records = []
    for m in ms:
        if not 1 <= m <= code.max_length:
            raise UsageError(f"--m {m}: pick 1 <= m <= {code.max_length}, the longest codeword")
        mode, runs = _trial_plan(args, source.n)
        _check_work(source.n, 2**m * 2)
        search = huffman_search(source, m, code)
        if mode == "exhaustive":
            marks = list(range(source.n))
            weights = None
        else:
            draws = _rng_for(args.seed, m).choice(source.n, size=runs, p=np.array(source.probabilities))
            counts = np.bincount(draws, minlength=source.n)
            marks = [i for i in range(source.n) if counts[i]]
            weights = [int(counts[i]) for i in marks]
        # the outcome for a marked item is deterministic, so each distinct item runs once
        quantum, classical = [], []
        for i in marks:
            y = DigitString.unit(source.n, i)
            quantum.append(search.run(Database.of(y)))
            classical.append(classical_huffman_search(Database.of(y), code))
        _check_quantum(quantum, deterministic=False)
        predicted_err = truncation_error_probability(code, m)
        if mode == "exhaustive":
            failed = math.fsum(source.probabilities[i] for i, t in zip(marks, quantum) if not t.success)
            calls = math.fsum(source.probabilities[i] * t.oracle_calls for i, t in zip(marks, classical))
            err_sigma = calls_sigma = 0.0
        else:
            failed = sum(w for t, w in zip(quantum, weights) if not t.success) / runs
            per_call = np.repeat([t.oracle_calls for t in classical], weights)
            calls = float(per_call.mean())
            err_sigma = _sigma(predicted_err, runs)
            lengths = np.array(code.lengths, dtype=float)
            var = float(np.dot(source.probabilities, (lengths - code.mean_length()) ** 2))
            calls_sigma = math.sqrt(var / runs)
        records.append(_record(
            "huffman_search",
            {"n": source.n, "m": m, "mode": mode, "trials": runs, "seed": args.seed,
             "code": [row["codeword"] for row in code.table()]},
            {"failure_rate": predicted_err, "quantum_oracle_calls": 1,
             "classical_oracle_calls": code.mean_length(), "entropy": source.entropy(),
             "info_bound": info_bound(source.entropy(), 2)},
            {"failure_rate": failed, "failure_rate_sigma": err_sigma,
             "failure_within_3_sigma": _within(failed, predicted_err, err_sigma),
             "classical_oracle_calls": calls, "classical_calls_sigma": calls_sigma,
             "classical_within_3_sigma": _within(calls, code.mean_length(), calls_sigma)},
            {"quantum": _summary(quantum, weights), "classical": _summary(classical, weights)},
            _cost(args, "huffman_search", source.n, m),
        ))
    return records


def cmd_random_code(args) -> list[dict]:
    seed = _require_seed(args)
    if args.trials is None or args.trials < 1:
        raise UsageError("random-code needs --trials >= 1")
    if args.A is None or args.k is None or args.l is None:
        raise UsageError("random-code needs --A, --k and --l")
    records = []
    for point, (n, k, l) in enumerate((n, k, l) for n in args.n for k in args.k for l in args.l):
        a = args.A
        if k < 1 or l < 0:
            raise UsageError("need k >= 1 and l >= 0")
        m = code_length(a, k, l)
        if m > n:
            raise UsageError(f"code length m = {m} exceeds n = {n}")
        if a**n < k:
            raise UsageError(f"only {a}**{n} distinct strings, cannot draw k = {k}")
        if float(a) ** m > 2**20:
            raise ResourceError(f"A**m = {a}**{m} exceeds the simulator cap 2**20")
        _check_work(args.trials, a**m * a)
        quantum, classical = [], []
        for t in range(args.trials):
            rng = _rng_for(seed, point, t)
            cands = random_candidates(k, n, a, rng)
            y = cands[int(rng.integers(k))]
            gens = random_generators(n, m, a, rng)
            q = IndexedSearch("random_coding", gens, cands).run(Database.of(y, "zA_dot", a))
            c = classical_random_code(Database.of(y, "zA_dot", a), gens, cands)
            if q.success != c.success:
                raise InvariantViolation("quantum and classical random-code runs disagree")
            quantum.append(q)
            classical.append(c)
        _check_quantum(quantum, deterministic=False)
        p = collision_probability(a, m, k)
        p_ind = collision_probability_independent(a, m, k, n)
        failed = 1.0 - _summary(quantum)["success_rate"]
        sigma = _sigma(p_ind, args.trials)
        records.append(_record(
            "random_coding",
            {"A": a, "n": n, "k": k, "l": l, "m": m, "trials": args.trials, "seed": seed},
            {"p_col": p, "p_col_independent_generators": p_ind,
             "p_col_approx": collision_probability_approx(k, slack_bits(a, m, k)),
             "quantum_oracle_calls": 1, "classical_oracle_calls": m},
            {"failure_rate": failed, "failure_rate_sigma": sigma,
             "failure_within_3_sigma": _within(failed, p_ind, sigma),
             "p_col_within_3_sigma": _within(failed, p, _sigma(p, args.trials))},
            {"quantum": _summary(quantum), "classical": _summary(classical)},
            _cost(args, "random_coding", n, m),
        ))
    return records


def cmd_bounds(args) -> list[dict]:
    records = []
    for n in args.n:
        if n < 1:
            raise UsageError("--n must be >= 1")
        limit = predetermined_limit(n) if n >= 2 else None
        cb = coin_bound(n)
        records.append(_record(
            "bounds",
            {"n": n},
            {"coin_bound": cb, "predetermined_limit": limit,
             "limit_over_bound": limit / cb if limit is not None else None,
             "weight_one_info_bound": info_bound(math.log2(n), 2)},
            None, None, None,
        ))
    return records


def cmd_cost(args) -> list[dict]:
    mode = COST_MODES[args.cost_mode]
    ms = args.m or [None]
    records = []
    for n in args.n:
        if n < 1:
            raise UsageError("--n must be >= 1")
        for algorithm in ALGORITHMS:
            if algorithm == "walsh_search" and (n < 2 or n & (n - 1)):
                continue
            needs_m = algorithm in ("huffman_search", "random_coding")
            for m in (ms if needs_m else [None]):
                if needs_m and m is None:
                    continue
                report = runtime(algorithm, n, m, args.t_preset, mode)
                records.append(_record(
                    algorithm,
                    {"n": n, "m": m, "mode": mode, "t_preset": args.t_preset},
                    {"quantum_time": report.quantum_time,
                     "classical_time": report.classical_time,
                     "crossover_n": crossover(algorithm, args.t_preset, m, mode)},
                    None, None, report.to_dict(),
                ))
    return records


COMMANDS = {
    "coin-weigh": cmd_coin_weigh,
    "walsh-search": cmd_walsh_search,
    "huffman-search": cmd_huffman_search,
    "random-code": cmd_random_code,
    "bounds": cmd_bounds,
    "cost": cmd_cost,
}


# ----------------------------------------------------------------- output


def _flatten(value, prefix: str, out: dict) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(sub, f"{prefix}.{key}" if prefix else key, out)
    elif isinstance(value, list):
        out[prefix] = json.dumps(value)
    else:
        out[prefix] = "" if value is None else value


def to_csv(records: list[dict]) -> str:
    rows = []
    for rec in records:
        flat: dict = {}
        _flatten(rec, "", flat)
        rows.append(flat)
    columns: list[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def render(records: list[dict], fmt: str) -> str:
    if fmt == "csv":
        return to_csv(records)
    return json.dumps({"version": __version__, "records": records}, indent=2, allow_nan=False) + "\n"


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, nargs="+", help="database sizes or string lengths (sweep)")
    common.add_argument("--A", type=int, help="alphabet size of the Z_A database")
    common.add_argument("--k", type=int, nargs="+", help="number of candidate strings (sweep)")
    common.add_argument("--l", type=int, nargs="+", help="slack digits beyond ceil(log_A k) (sweep)")
    common.add_argument("--m", type=int, nargs="+", help="number of queries in the code (sweep)")
    common.add_argument("--seed", type=int, help="seed for every random draw")
    common.add_argument("--trials", type=int, help="number of sampled runs per sweep point")
    common.add_argument("--exhaustive", action="store_true", help="run every possible database")
    common.add_argument("--dist", help="probabilities, inline or a file of whitespace-separated reals")
    common.add_argument("--cost-mode", choices=sorted(COST_MODES), default="serial")
    common.add_argument("--t-preset", choices=["log", "linear", "quadratic"], default="log")
    common.add_argument("--output", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="singlequery",
        description="Single-query quantum database algorithms and their classical baselines.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "coin-weigh": "recover an n-bit string from one spring-scale query",
        "walsh-search": "find one marked item among n = 2**p with one parity query",
        "huffman-search": "single-query search with the first m Huffman queries of --dist",
        "random-code": "single-query recovery among k candidates with a random Z_A code",
        "bounds": "information-theoretic coin-weighing bounds",
        "cost": "modeled quantum and classical running times",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.n is None and args.command != "huffman-search":
            raise UsageError(f"{args.command} needs --n")
        records = COMMANDS[args.command](args)
        text = render(records, args.output)
    except (UsageError, DomainError, PreconditionError, DimensionError) as exc:
        print(f"singlequery {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"singlequery {args.command}: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantViolation as exc:
        print(f"singlequery {args.command}: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except Exception as exc:  # noqa: BLE001
        print(f"singlequery {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
