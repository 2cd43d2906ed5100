"""Command-line front end.

Exit codes: 0 HUP (or a passing check), 1 NOT_HUP (or a failing check),
2 UNKNOWN, 3 other computation errors, 64 malformed input, 65
certificate/instance mismatch, 66 light-like normal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .certificates import FourierPair, verify_vanishing, wave_convergence, wave_demo
from .cone import ConeInstance, cross_validate_hyperbola, decide_cone
from .decider import decide
from .dynamics import DEFAULT_DEPTH
from .errors import CertificateMismatch, HupkitError, InstanceError, LightlikeNormal
from .instances import HUP, NOT_HUP, UNKNOWN, CrossInstance
from .serialization import canonical_dumps

SCHEMA_VERSION = 1

EXIT_HUP, EXIT_NOT_HUP, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3
EXIT_MALFORMED, EXIT_MISMATCH, EXIT_LIGHTLIKE = 64, 65, 66

VERDICT_EXIT = {HUP: EXIT_HUP, NOT_HUP: EXIT_NOT_HUP, UNKNOWN: EXIT_UNKNOWN}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    instance: str | None = None
    depth: int = DEFAULT_DEPTH
    tol: float = 1e-9
    samples: int = 10_000
    q_max: int = 10_000
    output: str | None = None
    jobs: int = 1
    k1: float = 2.0
    trials: int = 1000
    allow_lightlike: bool = False

    def __post_init__(self):
        for name in ("depth", "samples", "q_max", "jobs", "trials"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")


def _load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _error(code: int, message: str) -> tuple[int, dict]:
    return code, {"schema_version": SCHEMA_VERSION, "error": message, "exit_code": code}


def _decide_one(path: str, config: RunConfig) -> tuple[int, dict]:
    try:
        instance = CrossInstance.from_json(_load_json(path))
    except (UsageError, HupkitError, KeyError, TypeError, ValueError) as exc:
        return _error(EXIT_MALFORMED, f"malformed instance: {exc}")
    try:
        decision = decide(instance, config.depth)
        out = {"schema_version": SCHEMA_VERSION, **decision.to_json()}
        if decision.verdict == NOT_HUP:
            cert = decision.certificate
            report = verify_vanishing(
                cert, instance, config.samples, config.tol, everywhere=cert.kind == "thm2A"
            )
            out["verification"] = report.to_json()
    except HupkitError as exc:
        return _error(EXIT_ERROR, f"{type(exc).__name__}: {exc}")
    return VERDICT_EXIT[decision.verdict], out


def _cone_one(path: str, config: RunConfig) -> tuple[int, dict]:
    try:
        data = _load_json(path)
        if isinstance(data, dict) and "q_max" not in data:
            data = {**data, "q_max": config.q_max}
        instance = ConeInstance.from_json(data)
    except (UsageError, HupkitError, KeyError, TypeError, ValueError) as exc:
        return _error(EXIT_MALFORMED, f"malformed cone instance: {exc}")
    try:
        decision = decide_cone(
            instance, tol=config.tol, lightlike="reduce" if config.allow_lightlike else "reject"
        )
    except LightlikeNormal as exc:
        return _error(EXIT_LIGHTLIKE, str(exc))
    except InstanceError as exc:
        return _error(EXIT_MALFORMED, str(exc))
    except HupkitError as exc:
        return _error(EXIT_ERROR, f"{type(exc).__name__}: {exc}")
    return VERDICT_EXIT[decision.verdict], {"schema_version": SCHEMA_VERSION, **decision.to_json()}


def _batch(worker, config: RunConfig) -> tuple[int, dict]:
    """Run ``worker`` on one file, or on every ``*.json`` file of a directory."""
    target = Path(config.input)
    if not target.is_dir():
        return worker(str(target), config)
    files = sorted(str(p) for p in target.glob("*.json"))
    if config.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(worker, files, [config] * len(files)))
    else:
        results = [worker(f, config) for f in files]
    out = {Path(f).name: {"exit_code": code, **res} for f, (code, res) in zip(files, results)}
    code = max((c for c, _ in results), default=EXIT_HUP)
    return code, {"schema_version": SCHEMA_VERSION, "results": out}


def run_decide(config: RunConfig) -> tuple[int, dict]:
    return _batch(_decide_one, config)


def run_cone(config: RunConfig) -> tuple[int, dict]:
    return _batch(_cone_one, config)


def run_verify(config: RunConfig) -> tuple[int, dict]:
    try:
        data = _load_json(config.input)
        if isinstance(data, dict) and "certificate" in data and "kind" not in data:
            data = data["certificate"]
        pair = FourierPair.from_json(data)
        instance = CrossInstance.from_json(_load_json(config.instance))
    except (UsageError, HupkitError, KeyError, TypeError, ValueError, AttributeError) as exc:
        return _error(EXIT_MALFORMED, f"malformed input: {exc}")
    try:
        report = verify_vanishing(
            pair, instance, config.samples, config.tol, everywhere=pair.kind == "thm2A"
        )
    except CertificateMismatch as exc:
        return _error(EXIT_MISMATCH, str(exc))
    except HupkitError as exc:
        return _error(EXIT_ERROR, f"{type(exc).__name__}: {exc}")
    out = {"schema_version": SCHEMA_VERSION, **report.to_json()}
    return (EXIT_HUP if report.passed else EXIT_NOT_HUP), out


def run_demo(config: RunConfig) -> tuple[int, dict]:
    try:
        single = wave_demo(config.k1)
        study = wave_convergence(config.k1)
    except ValueError as exc:
        return _error(EXIT_MALFORMED, str(exc))
    return 0, {"schema_version": SCHEMA_VERSION, "demo": single, "convergence": study}


def seed_from_env() -> int:
    raw = os.environ.get("HUPKIT_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"HUPKIT_SEED must be an integer, got {raw!r}") from exc


def run_xval(config: RunConfig) -> tuple[int, dict]:
    seed = seed_from_env()
    report = cross_validate_hyperbola(config.trials, np.random.default_rng(seed), tol=config.tol)
    out = {"schema_version": SCHEMA_VERSION, "seed": seed, **report.to_json()}
    return (EXIT_NOT_HUP if report.disagreements else EXIT_HUP), out


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means UNKNOWN here
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hupkit", description="Heisenberg uniqueness pair decisions.")
    common = _Parser(add_help=False)
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--q-max", dest="q_max", type=int, default=10_000)
    common.add_argument("--output", "-o")
    common.add_argument("--jobs", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decide", parents=[common], help="decide a coordinate-cross instance")
    p.add_argument("input", help="instance JSON file or a directory of them")
    p = sub.add_parser("verify", parents=[common], help="replay a certificate against an instance")
    p.add_argument("input", metavar="certificate")
    p.add_argument("instance")
    p = sub.add_parser("cone", parents=[common], help="decide a light-cone instance")
    p.add_argument("input", help="cone JSON file or a directory of them")
    p.add_argument("--allow-lightlike", action="store_true",
                   help="decide light-like normals by the single-hyperplane rule")
    p = sub.add_parser("demo", parents=[common], help="run a demonstration")
    p.add_argument("which", choices=["wave"])
    p.add_argument("--k1", type=float, default=2.0)
    p = sub.add_parser("xval", parents=[common], help="cross-validate criteria")
    p.add_argument("which", choices=["hyperbola"])
    p.add_argument("--trials", type=int, default=1000)
    return parser


RUNNERS = {
    "decide": run_decide,
    "verify": run_verify,
    "cone": run_cone,
    "demo": run_demo,
    "xval": run_xval,
}


def _config(ns: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in fields})


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = _config(build_parser().parse_args(argv))
        code, out = RUNNERS[config.command](config)
    except UsageError as exc:
        code, out = _error(EXIT_MALFORMED, str(exc))
        config = None
    text = canonical_dumps(out) + "\n"
    if config is not None and config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code >= EXIT_ERROR:
        print(f"hupkit: {out.get('error', 'error')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
