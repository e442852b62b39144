"""Batch command-line surface over the symbolic and spectral layers.

Every subcommand prints a short human summary to stdout and, when
``--out`` is given, writes a machine-readable file (JSON, or CSV for the
row-shaped outputs).  Outputs are deterministic: a fixed configuration
-- including the recorded random seed for the property sweeps --
reproduces the output files byte for byte.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 numeric
non-convergence.
"""

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .acceptance import ALL_CHECKS, CHECK_IDS, format_result, run_checks
from .actions import act_e, act_e_right, act_f, act_f_right, act_h, act_k, act_weight
from .algebra import AlgebraElement, normalize_word
from .functionals import haar
from .hochschild import COCYCLES, PSI_132, PSI_213, VOLUME_CHAIN, Cochain, boundary
from .modular import phi_res_over_r
from .sampling import make_rng, random_monomial
from .scalars import Scalar
from .spectral import (
    OMEGA_TAGS,
    NonConvergenceError,
    residue_extract,
    sector_spectrum_closed,
    tail_bound,
    upsilon_value,
)

__all__ = ["RunConfig", "parse_element", "run_command", "main"]


class UsageError(ValueError):
    """Bad arguments or inputs; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Element input syntax: whitespace-separated generator letters with
# optional ^k powers, fraction tokens p/q, and v^k scalar tokens.

_LETTER = re.compile(r"([abcd])(?:\^([0-9]+))?\Z")
_FRACTION = re.compile(r"([+-]?[0-9]+)(?:/([0-9]+))?\Z")
_VPOWER = re.compile(r"v(?:\^([+-]?[0-9]+))?\Z")


def parse_element(text: str) -> AlgebraElement:
    """One monomial term: e.g. ``"3/2 v^-1 a^2 b"``."""
    tokens = text.split()
    if not tokens:
        raise UsageError("empty element; expected generator letters "
                         "a b c d with optional ^k, fractions p/q, v^k")
    coeff = Scalar.one()
    letters: List[str] = []
    for tok in tokens:
        m = _LETTER.match(tok)
        if m:
            letters.extend(m.group(1) * int(m.group(2) or "1"))
            continue
        m = _FRACTION.match(tok)
        if m:
            coeff = coeff * Scalar.from_fraction(
                Fraction(int(m.group(1)), int(m.group(2) or "1")))
            continue
        m = _VPOWER.match(tok)
        if m:
            coeff = coeff * Scalar.v_pow(int(m.group(1) or "1"))
            continue
        raise UsageError(
            f"unrecognized token {tok!r}; use generator letters a b c d "
            "with optional ^k, fractions p/q, and v^k scalars")
    x = normalize_word(letters) if letters else AlgebraElement.unit()
    return x.scale(coeff)


def _parse_schedule(text: str) -> Tuple[float, ...]:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    try:
        sched = tuple(float(p) for p in parts if p)
    except ValueError as exc:
        raise UsageError(f"bad epsilon schedule {text!r}") from exc
    if not sched:
        raise UsageError("empty epsilon schedule")
    return sched


# ---------------------------------------------------------------------------
# Configuration: flags, optionally seeded from a key=value file
# (explicit flags win over the file).

@dataclass
class RunConfig:
    """Merged run configuration for one subcommand invocation."""

    command: str
    q: Optional[float] = None
    lmax: Optional[int] = None
    z_from: Optional[float] = None
    z_to: Optional[float] = None
    z_steps: Optional[int] = None
    eps: Optional[Tuple[float, ...]] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    format: Optional[str] = None
    extras: Dict[str, object] = field(default_factory=dict)


_CASTERS = {
    "q": float,
    "lmax": int,
    "z_from": float,
    "z_to": float,
    "z_steps": int,
    "eps": _parse_schedule,
    "seed": int,
    "out": str,
    "format": str,
    "omega": str,
    "which": str,
    "side": str,
    "cocycle": str,
    "tuples": int,
    "only": str,
    "max_error_bar": float,
}

_CORE_KEYS = ("q", "lmax", "z_from", "z_to", "z_steps", "eps", "seed",
              "out", "format")


def _read_config_file(path: str) -> Dict[str, str]:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    mapping: Dict[str, str] = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"config line {line!r} is not key=value")
        key, value = line.split("=", 1)
        mapping[key.strip().replace("-", "_")] = value.strip()
    return mapping


def _merge(ns: argparse.Namespace) -> RunConfig:
    values: Dict[str, object] = {}
    file_values: Dict[str, str] = {}
    if getattr(ns, "config", None):
        file_values = _read_config_file(ns.config)
    for dest, caster in _CASTERS.items():
        current = getattr(ns, dest, None)
        if current is None and dest in file_values:
            try:
                current = caster(file_values[dest])
            except (TypeError, ValueError) as exc:
                raise UsageError(
                    f"bad config value {dest}={file_values[dest]!r}"
                ) from exc
        elif isinstance(current, str) and caster is _parse_schedule:
            current = caster(current)
        values[dest] = current
    unknown = set(file_values) - set(_CASTERS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = RunConfig(command=ns.command,
                    **{k: values[k] for k in _CORE_KEYS})
    cfg.extras = {k: v for k, v in values.items() if k not in _CORE_KEYS}
    if cfg.format not in (None, "json", "csv"):
        raise UsageError(f"unknown format {cfg.format!r}; choose json or csv")
    return cfg


# ---------------------------------------------------------------------------
# Output plumbing.

def _render_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _render_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(cfg: RunConfig, human: List[str], payload: Optional[str]) -> None:
    for line in human:
        print(line)
    if cfg.out is not None:
        if payload is None:
            raise UsageError(
                f"{cfg.command} has no machine-readable output")
        Path(cfg.out).write_text(payload)
        print(f"wrote {cfg.out}")


def _element_payload(command: str, source: str,
                     result: AlgebraElement) -> Dict[str, object]:
    return {
        "command": command,
        "input": source,
        "result": str(result),
        "element": result.to_json(),
    }


def _scalar_payload(command: str, inputs: Sequence[str],
                    value: Scalar) -> Dict[str, object]:
    return {
        "command": command,
        "inputs": list(inputs),
        "value": str(value),
        "scalar": value.to_json(),
    }


def _named_cochains() -> Dict[str, Cochain]:
    table: Dict[str, Cochain] = dict(COCYCLES)
    table["psi_132"] = PSI_132
    table["psi_213"] = PSI_213
    table["phi_res_over_R"] = Cochain(3, phi_res_over_r, "phi_res_over_R")
    return table


# ---------------------------------------------------------------------------
# Subcommand handlers: return the exit code.

def _cmd_normalize(cfg: RunConfig, ns: argparse.Namespace) -> int:
    x = parse_element(ns.element)
    _emit(cfg, [f"{ns.element.strip()}  =  {x}"],
          _render_json(_element_payload("normalize", ns.element, x)))
    return 0


def _cmd_act(cfg: RunConfig, ns: argparse.Namespace) -> int:
    which = cfg.extras.get("which") or "e"
    side = cfg.extras.get("side") or "left"
    x = parse_element(ns.element)
    table = {
        ("e", "left"): act_e,
        ("f", "left"): act_f,
        ("h", "left"): act_h,
        ("k", "left"): lambda y: act_k(y, 1),
        ("kinv", "left"): lambda y: act_k(y, -1),
        ("e", "right"): act_e_right,
        ("f", "right"): act_f_right,
        ("k", "right"): lambda y: act_weight(y, "right", 1),
        ("kinv", "right"): lambda y: act_weight(y, "right", -1),
    }
    fn = table.get((which, side))
    if fn is None:
        raise UsageError(f"action {which!r} is not available on side {side!r}")
    result = fn(x)
    payload = _element_payload("act", ns.element, result)
    payload["which"] = which
    payload["side"] = side
    _emit(cfg, [f"{which}[{side}] . ({x})  =  {result}"],
          _render_json(payload))
    return 0


def _cmd_haar(cfg: RunConfig, ns: argparse.Namespace) -> int:
    x = parse_element(ns.element)
    value = haar(x)
    _emit(cfg, [f"h({x})  =  {value}"],
          _render_json(_scalar_payload("haar", [ns.element], value)))
    return 0


def _cmd_cocycle_eval(cfg: RunConfig, ns: argparse.Namespace) -> int:
    table = _named_cochains()
    name = cfg.extras.get("cocycle")
    if name not in table:
        raise UsageError(f"unknown cocycle {name!r}; choose from "
                         f"{', '.join(sorted(table))}")
    cochain = table[name]
    need = cochain.degree + 1
    if len(ns.elements) != need:
        raise UsageError(f"{name} takes {need} element arguments, "
                         f"got {len(ns.elements)}")
    args = [parse_element(e) for e in ns.elements]
    value = cochain(*args)
    payload = _scalar_payload("cocycle-eval", ns.elements, value)
    payload["cocycle"] = name
    _emit(cfg, [f"{name}({', '.join(str(a) for a in args)})  =  {value}"],
          _render_json(payload))
    return 0


def _cmd_pair_dvol(cfg: RunConfig, ns: argparse.Namespace) -> int:
    table = {n: c for n, c in _named_cochains().items() if c.degree == 3}
    name = cfg.extras.get("cocycle") or "phi"
    if name not in table:
        raise UsageError(f"unknown 3-cochain {name!r}; choose from "
                         f"{', '.join(sorted(table))}")
    value = table[name].pair_chain(VOLUME_CHAIN)
    payload = _scalar_payload("pair-dvol", [name], value)
    payload["cocycle"] = name
    _emit(cfg, [f"{name}(dvol)  =  {value}"], _render_json(payload))
    return 0


def _cmd_hochschild_check(cfg: RunConfig, ns: argparse.Namespace) -> int:
    seed = cfg.seed if cfg.seed is not None else 0
    tuples = int(cfg.extras.get("tuples") or 50)
    if tuples < 1:
        raise UsageError("tuple count must be positive")
    rng = make_rng(seed)
    cochains = _named_cochains()
    cochains = {n: c for n, c in cochains.items() if c.degree == 3}
    bounds = {name: boundary(c) for name, c in cochains.items()}
    nonzero = {name: 0 for name in bounds}
    for _ in range(tuples):
        tup = tuple(AlgebraElement.from_mono(random_monomial(rng, 3))
                    for _ in range(5))
        for name, bf in bounds.items():
            if not bf(*tup).is_zero():
                nonzero[name] += 1
    all_zero = not any(nonzero.values())
    human = [f"coboundary sweep: {tuples} seeded 5-tuples (seed {seed})"]
    for name in sorted(bounds):
        human.append(f"  b({name}): {nonzero[name]} nonzero")
    human.append("all coboundaries vanish"
                 if all_zero else "NONZERO COBOUNDARY FOUND")
    payload = _render_json({
        "command": "hochschild-check",
        "seed": seed,
        "tuples": tuples,
        "nonzero_counts": {k: nonzero[k] for k in sorted(nonzero)},
        "all_zero": all_zero,
    })
    _emit(cfg, human, payload)
    return 0 if all_zero else 1


def _cmd_spectrum(cfg: RunConfig, ns: argparse.Namespace) -> int:
    q = cfg.q if cfg.q is not None else 0.5
    lmax = cfg.lmax if cfg.lmax is not None else 6
    rows: List[Tuple[int, float, int]] = []
    for l2 in range(0, lmax + 1):
        for val in sector_spectrum_closed(l2, q):
            rows.append((l2, val, l2 + 1))
    dim = sum((l2 + 1) * 2 * (l2 + 1) for l2 in range(0, lmax + 1))
    human = [f"spectrum q={q}, 2l <= {lmax}: {len(rows)} levels, "
             f"total dimension {dim}, range "
             f"[{min(r[1] for r in rows):.6f}, {max(r[1] for r in rows):.6f}]"]
    if (cfg.format or "csv") == "json":
        payload = _render_json({
            "command": "spectrum", "q": q, "lmax": lmax,
            "levels": [{"l2": l2, "eigenvalue": v, "multiplicity": mult}
                       for l2, v, mult in rows],
        })
    else:
        payload = _render_csv(("l2", "eigenvalue", "multiplicity"), rows)
    _emit(cfg, human, payload)
    return 0


def _cmd_upsilon_scan(cfg: RunConfig, ns: argparse.Namespace) -> int:
    omega = cfg.extras.get("omega")
    if omega not in OMEGA_TAGS:
        raise UsageError(f"unknown weight tag {omega!r}; choose from "
                         f"{', '.join(OMEGA_TAGS)}")
    q = cfg.q if cfg.q is not None else 0.5
    lmax = cfg.lmax if cfg.lmax is not None else 200
    z_from = cfg.z_from if cfg.z_from is not None else 3.2
    z_to = cfg.z_to if cfg.z_to is not None else 4.0
    steps = cfg.z_steps if cfg.z_steps is not None else 5
    if steps < 1:
        raise UsageError("z-steps must be positive")
    if steps == 1:
        zs = [z_from]
    else:
        width = (z_to - z_from) / (steps - 1)
        zs = [z_from + k * width for k in range(steps)]
    rows = []
    for z in zs:
        partial = upsilon_value(omega, z, q, lmax)
        bound = tail_bound(omega, lmax, z, q)
        rows.append((omega, q, z, lmax, partial, bound))
    human = [f"{len(rows)} scan rows: omega={omega}, q={q}, "
             f"z in [{zs[0]}, {zs[-1]}], lmax={lmax}"]
    if (cfg.format or "csv") == "json":
        payload = _render_json({
            "command": "upsilon-scan",
            "rows": [{"omega_tag": o, "q": qq, "z": z, "lmax": lm,
                      "partial_sum": p, "tail_bound": t}
                     for o, qq, z, lm, p, t in rows],
        })
    else:
        payload = _render_csv(
            ("omega_tag", "q", "z", "lmax", "partial_sum", "tail_bound"),
            rows)
    _emit(cfg, human, payload)
    return 0


def _cmd_residue(cfg: RunConfig, ns: argparse.Namespace) -> int:
    omega = cfg.extras.get("omega")
    if omega not in OMEGA_TAGS:
        raise UsageError(f"unknown weight tag {omega!r}; choose from "
                         f"{', '.join(OMEGA_TAGS)}")
    q = cfg.q if cfg.q is not None else 0.5
    kwargs = {}
    if cfg.eps is not None:
        kwargs["schedule"] = cfg.eps
    if cfg.lmax is not None:
        kwargs["lmax"] = cfg.lmax
    bar_cap = cfg.extras.get("max_error_bar")
    if bar_cap is not None:
        kwargs["max_error_bar"] = float(bar_cap)
    report = residue_extract(omega, q, **kwargs)
    doc = report.to_json_dict()
    human = [f"residue({omega}, q={q})  =  {report.estimate:.6f} "
             f"+- {report.error_bar:.2e}   [{report.method}]"]
    if (cfg.format or "json") == "csv":
        header = tuple(doc.keys())
        payload = _render_csv(header, [tuple(doc[k] for k in header)])
    else:
        payload = _render_json(doc)
    _emit(cfg, human, payload)
    return 0


def _cmd_verify_all(cfg: RunConfig, ns: argparse.Namespace) -> int:
    only = cfg.extras.get("only")
    ids = None
    if only:
        ids = [p for chunk in str(only).split(",") for p in chunk.split()]
    try:
        results = run_checks(ids, report=print)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    if cfg.out is not None:
        payload = _render_json([
            {"check_id": r.check_id, "passed": r.passed} for r in results])
        Path(cfg.out).write_text(payload)
        print(f"wrote {cfg.out}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser assembly and entry point.

def _add_common(sub: argparse.ArgumentParser, *names: str) -> None:
    sub.add_argument("--config", help="key=value file mirroring the flags "
                     "(explicit flags win)")
    if "q" in names:
        sub.add_argument("--q", type=float, default=None,
                         help="deformation parameter in (0, 1)")
    if "lmax" in names:
        sub.add_argument("--lmax", type=int, default=None,
                         help="doubled-spin cutoff")
    if "zgrid" in names:
        sub.add_argument("--z-from", dest="z_from", type=float, default=None)
        sub.add_argument("--z-to", dest="z_to", type=float, default=None)
        sub.add_argument("--z-steps", dest="z_steps", type=int, default=None)
    if "eps" in names:
        sub.add_argument("--eps", default=None,
                         help="comma-separated epsilon schedule")
    if "seed" in names:
        sub.add_argument("--seed", type=int, default=None,
                         help="PRNG seed recorded in the output")
    sub.add_argument("--out", default=None,
                     help="write machine-readable output to this path")
    sub.add_argument("--format", default=None, choices=("json", "csv"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suq2",
        description="Exact quantum-SU(2) Hochschild calculus and the "
                    "spectral residue numerics over it.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("normalize", help="normal form of a monomial word")
    p.add_argument("element", help='e.g. "d a" or "3/2 v^-1 a^2 b"')
    _add_common(p)

    p = subs.add_parser("act", help="apply a Hopf action to an element")
    p.add_argument("--which", default=None,
                   choices=("e", "f", "h", "k", "kinv"))
    p.add_argument("--side", default=None, choices=("left", "right"))
    p.add_argument("element")
    _add_common(p)

    p = subs.add_parser("haar", help="Haar state of an element")
    p.add_argument("element")
    _add_common(p)

    p = subs.add_parser("cocycle-eval", help="evaluate a named cochain")
    p.add_argument("--cocycle", default=None)
    p.add_argument("elements", nargs="+")
    _add_common(p)

    p = subs.add_parser("pair-dvol",
                        help="pair a 3-cochain with the volume chain")
    p.add_argument("--cocycle", default=None)
    _add_common(p)

    p = subs.add_parser("hochschild-check",
                        help="seeded coboundary-vanishing sweep")
    p.add_argument("--tuples", type=int, default=None)
    _add_common(p, "seed")

    p = subs.add_parser("spectrum", help="closed-form truncated spectrum")
    _add_common(p, "q", "lmax")

    p = subs.add_parser("upsilon-scan",
                        help="weighted trace scan over a z grid")
    p.add_argument("--omega", default=None, help="weight tag")
    _add_common(p, "q", "lmax", "zgrid")

    p = subs.add_parser("residue", help="residue extraction at z = 3")
    p.add_argument("--omega", default=None, help="weight tag")
    p.add_argument("--max-error-bar", dest="max_error_bar", type=float,
                   default=None,
                   help="fail with exit 3 if the error bar exceeds this")
    _add_common(p, "q", "lmax", "eps")

    p = subs.add_parser("verify-all", help="run the verification battery")
    p.add_argument("--only", default=None,
                   help=f"comma-separated subset of: {', '.join(CHECK_IDS)}")
    _add_common(p)
    return parser


_HANDLERS = {
    "normalize": _cmd_normalize,
    "act": _cmd_act,
    "haar": _cmd_haar,
    "cocycle-eval": _cmd_cocycle_eval,
    "pair-dvol": _cmd_pair_dvol,
    "hochschild-check": _cmd_hochschild_check,
    "spectrum": _cmd_spectrum,
    "upsilon-scan": _cmd_upsilon_scan,
    "residue": _cmd_residue,
    "verify-all": _cmd_verify_all,
}


def run_command(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge(ns)
        return _HANDLERS[ns.command](cfg, ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
