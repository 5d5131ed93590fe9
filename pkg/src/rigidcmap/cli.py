"""Command-line harness: ``cmap check|metric|moduli``.

Reports are JSON Lines (one record per check per point, then a summary
record). Exit codes: 0 all checks pass, 1 some check failed, 2 bad config.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import moduli
from .base_geometry import NondegenerateCheckFailed, base_metric, gamma_matrix, general_position_check
from .cmap import FiberPoint, hk_metric, hk_metric_inverse
from .jets import VERY_SPECIAL, Prepotential, PrepotentialError, jet, load_prepotential
from .report import CheckRecord, VerificationReport, dumps
from .suites import DEFAULT_TOLERANCES, SUITES, run_point
from .symmetry import Lattice, LatticeError, load_lattice

log = logging.getLogger("rigidcmap")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
MAX_REJECTIONS_PER_POINT = 50


class ConfigError(Exception):
    pass


@dataclass
class BoxSampler:
    center: complex
    radius: float
    count: int
    seed: int

    @classmethod
    def parse(cls, text: str) -> "BoxSampler":
        try:
            center, radius, count, seed = text.split(",")
            sampler = cls(complex(center.replace(" ", "")), float(radius), int(count), int(seed))
        except ValueError as exc:
            raise ConfigError(f"--sample expects center,radius,count,seed; got {text!r}") from exc
        if sampler.count <= 0 or sampler.radius < 0:
            raise ConfigError("sample count must be positive and radius nonnegative")
        return sampler


@dataclass
class RunConfig:
    prepotential: Prepotential
    lattice: Lattice | None = None
    points: list | None = None
    sampler: BoxSampler | None = None
    tolerances: dict = field(default_factory=dict)
    suites: tuple = SUITES
    json_path: str | None = None


def _disk(rng, radius, size):
    r = radius * np.sqrt(rng.uniform(size=size))
    return r * np.exp(2j * np.pi * rng.uniform(size=size))


def sample_points(F: Prepotential, sampler: BoxSampler, dim: int, with_fiber: bool = True) -> list:
    """Seeded draws in a polydisk around ``center``; points off general position are
    rejected (up to a budget, after which they are kept and will fail downstream)."""
    rng = np.random.default_rng(sampler.seed)
    out = []
    rejections = 0
    while len(out) < sampler.count:
        z = sampler.center + _disk(rng, sampler.radius, dim)
        w = _disk(rng, sampler.radius, dim) if with_fiber else np.zeros(dim)
        try:
            probe = z if dim == F.dim else moduli.lift(z)
            ok = general_position_check(jet(F, probe, order=2)).passed
        except ValueError:
            ok = False
        if not ok and rejections < MAX_REJECTIONS_PER_POINT * sampler.count:
            rejections += 1
            log.info("rejected sample %s (general position)", z)
            continue
        out.append((z, w))
    return out


def _read_complex_list(items) -> np.ndarray:
    vals = []
    for x in items:
        if isinstance(x, (list, tuple)):
            vals.append(complex(x[0], x[1]))
        elif isinstance(x, str):
            vals.append(complex(x.replace(" ", "")))
        else:
            vals.append(complex(x))
    return np.array(vals, dtype=complex)


def read_points(path: str, key: str = "z") -> list:
    """Points file: JSON list of ``{"z": [[re, im], ...], "w": [...]}`` (``w`` optional)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
        out = []
        for item in doc:
            z = _read_complex_list(item[key] if key in item else item["z"])
            w = _read_complex_list(item["w"]) if "w" in item else np.zeros(len(z), dtype=complex)
            out.append((z, w))
        return out
    except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"cannot read points from {path}: {exc}") from exc


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        name, _, value = item.partition("=")
        if not value:
            raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {item!r}") from exc
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CMAP_THREADS", "1")))
    except ValueError:
        return 1


def _ordered_map(fn, items):
    # executor.map yields in submission order, so output stays deterministic
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(fn, items))


def _emit(lines, json_path):
    text = "\n".join(lines) + "\n"
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _points_for(config: RunConfig, dim: int, key: str = "z", with_fiber: bool = True) -> list:
    if config.points is not None:
        pts = config.points
    elif config.sampler is not None:
        pts = sample_points(config.prepotential, config.sampler, dim, with_fiber)
    else:
        raise ConfigError("either --points or --sample is required")
    for z, w in pts:
        if len(z) != dim or len(w) != dim:
            raise ConfigError(f"point has {len(z)} coordinates, expected {dim}")
    return pts


# --------------------------------------------------------------------------
# commands


def cmd_check(config: RunConfig) -> tuple:
    F = config.prepotential
    seed = config.sampler.seed if config.sampler else 0
    pts = _points_for(config, F.dim)
    tol = dict(DEFAULT_TOLERANCES)
    unknown = set(config.tolerances) - set(tol)
    if unknown:
        raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")
    tol.update(config.tolerances)

    def one(item):
        idx, (z, w) = item
        try:
            return run_point(F, FiberPoint(z, w), idx, config.suites, tol, config.lattice, seed)
        except (NondegenerateCheckFailed, LatticeError, ValueError, np.linalg.LinAlgError) as exc:
            return [CheckRecord("general_position", idx, float("inf"), tol["general_position"], {"error": str(exc)})]

    report = VerificationReport()
    for recs in _ordered_map(one, list(enumerate(pts))):
        report.extend(recs)
    return report, report.lines()


def metric_record(F: Prepotential, z, w, index: int = 0) -> dict:
    at = FiberPoint(z, w)
    try:
        J = jet(F, at.z, order=3)
        if not general_position_check(J).passed:
            raise NondegenerateCheckFailed("Im F_ij is singular")
        base = base_metric(J)
    except (NondegenerateCheckFailed, ValueError) as exc:
        return {"point": index, "check": "general_position", "error": str(exc), "pass": False}
    Gb = hk_metric(F, at)
    G = Gb.matrix
    return {
        "point": index,
        "z": at.z,
        "w": at.w,
        "G": G,
        "G_inv": hk_metric_inverse(Gb, base),
        "signature": list(Gb.signature),
        "base_signature": list(base.signature),
        "eigenvalues": np.linalg.eigvalsh(G),
        "pass": True,
    }


def cmd_metric(config: RunConfig) -> tuple:
    F = config.prepotential
    pts = _points_for(config, F.dim)
    records = _ordered_map(lambda item: metric_record(F, item[1][0], item[1][1], item[0]), list(enumerate(pts)))
    ok = all(r["pass"] for r in records)
    return ok, [dumps(r) for r in records]


def moduli_records(F_hat: Prepotential, q, index: int, tolerances: dict, lattice: Lattice | None) -> list:
    """Formal-moduli, theta, projective, Hodge, Jacobian and signature records at one chart point."""
    n = len(q)
    z = moduli.lift(q)
    out = []
    try:
        fm = moduli.formal_moduli_check(F_hat, [z], euler_tol=tolerances["euler"])[0]
    except ValueError as exc:
        return [{"check": "formal_moduli", "point": index, "error": str(exc), "pass": False}]
    out.append({
        "check": "formal_moduli",
        "point": index,
        "z": z,
        "cone": fm.cone,
        "positivity": fm.positivity,
        "negativity": fm.negativity,
        "eigenvalues": fm.eigenvalues,
        "euler_residual": fm.euler_residual,
        "pass": fm.passed,
    })
    if F_hat.kind == VERY_SPECIAL and fm.cone:
        theta = moduli.third_fundamental_form(F_hat, q)
        out.append({"check": "theta", "point": index, "theta": theta.real, "imag_max": float(np.max(np.abs(theta.imag))),
                    "pass": bool(np.max(np.abs(theta.imag)) <= tolerances["theta"])})
    if not fm.passed:
        return out

    hodge = moduli.hodge_structure(F_hat, z)
    u = hodge.u
    radial = moduli.projective_special_metric(u, u)
    tangent = [moduli.projective_special_metric(u, hodge.H21[:, a]) for a in range(n)]
    out.append({"check": "projective_metric", "point": index, "radial": radial, "h21_values": tangent,
                "pass": bool(abs(radial) <= tolerances["projective"] and all(t < 0 for t in tangent))})
    S = hodge.stacked
    Hg = gamma_matrix(n + 1)
    orth = float(np.max(np.abs(u @ Hg @ np.conj(hodge.H21))))
    out.append({"check": "hodge", "point": index, "rank": int(np.linalg.matrix_rank(S)),
                "gamma_u_h21": orth, "gamma_uu": float((u @ Hg @ np.conj(u)).real),
                "pass": bool(np.linalg.matrix_rank(S) == 2 * n + 2 and orth <= tolerances["hodge"])})
    lat = lattice if lattice is not None else Lattice.standard(n + 1)
    jf = moduli.jacobian_fiber(F_hat, z, lat)
    out.append({"check": "jacobian_fiber", "point": index, "real_rank": jf.real_rank, "rcond": jf.rcond,
                "period_matrix": jf.period_matrix, "pass": jf.real_rank == 2 * (n + 1)})
    sig = hk_metric(F_hat, FiberPoint(z, np.zeros(n + 1))).signature
    out.append({"check": "hk_signature", "point": index, "signature": list(sig),
                "expected": [2, 2 * n], "pass": tuple(sig) == (2, 2 * n)})
    return out


def cmd_moduli(config: RunConfig) -> tuple:
    F_hat = config.prepotential
    n = F_hat.dim - 1
    tol = {"euler": 1e-9, "theta": 1e-12, "projective": 1e-12, "hodge": 1e-10}
    tol.update({k: v for k, v in config.tolerances.items() if k in tol})
    pts = _points_for(config, n, key="q", with_fiber=False)
    records = []
    for batch in _ordered_map(lambda item: moduli_records(F_hat, item[1][0], item[0], tol, config.lattice),
                              list(enumerate(pts))):
        records.extend(batch)
    thetas = [np.array(r["theta"]) for r in records if r["check"] == "theta"]
    if len(thetas) > 1:
        spread = max(float(np.max(np.abs(t - thetas[0]))) for t in thetas)
        records.append({"check": "theta_constancy", "spread": spread, "pass": spread <= tol["theta"]})
    ok = all(r["pass"] for r in records)
    summary = {"summary": True, "total": len(records), "passed": sum(bool(r["pass"]) for r in records)}
    return ok, [dumps(r) for r in records] + [dumps(summary)]


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "metric", "moduli"):
        p = sub.add_parser(name)
        p.add_argument("--prepotential", required=True, metavar="PATH")
        p.add_argument("--lattice", default=None, metavar="PATH|standard")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--points", metavar="PATH")
        group.add_argument("--sample", metavar="center,radius,count,seed")
        p.add_argument("--tol", action="append", metavar="NAME=VAL")
        p.add_argument("--json", dest="json_path", metavar="PATH")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "check":
            p.add_argument("--suite", action="append", choices=SUITES,
                           help="restrict to the named suites (repeatable); default runs all")
    return parser


def load_config(args) -> RunConfig:
    try:
        F = load_prepotential(args.prepotential)
    except (OSError, PrepotentialError) as exc:
        raise ConfigError(f"cannot load prepotential: {exc}") from exc
    dim = F.dim
    lattice = None
    if args.lattice:
        try:
            lattice = load_lattice(args.lattice, dim)
        except (OSError, LatticeError, ValueError) as exc:
            raise ConfigError(f"cannot load lattice: {exc}") from exc
    key = "q" if args.command == "moduli" else "z"
    return RunConfig(
        prepotential=F,
        lattice=lattice,
        points=read_points(args.points, key) if args.points else None,
        sampler=BoxSampler.parse(args.sample) if args.sample else None,
        tolerances=parse_tolerances(args.tol),
        suites=tuple(getattr(args, "suite", None) or SUITES),
        json_path=args.json_path,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        config = load_config(args)
        if args.command == "check":
            report, lines = cmd_check(config)
            ok = report.passed
            summary = report.summary()
            print(f"{summary['passed']}/{summary['total']} checks passed", file=sys.stderr)
            for name, worst in sorted(summary["max_residual"].items()):
                print(f"  {name:26s} max residual {worst:.3e}", file=sys.stderr)
        elif args.command == "metric":
            ok, lines = cmd_metric(config)
        else:
            ok, lines = cmd_moduli(config)
            print(lines[-1], file=sys.stderr)
    except ConfigError as exc:
        print(f"cmap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(lines, config.json_path)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
