"""Batch verification front end.

Subcommands map the constructive claims about Cartan-Hartogs domains onto
machine-checkable runs: potential pullback identities (`verify-immersion`),
totally geodesic slices with geodesic spot checks (`verify-tg`), single
geodesic traces with energy bookkeeping (`geodesic`), the linear-support
direction scan (`linear-scan`), and the sequence-space norm residual
(`embed-residual`).

Reports echo their full configuration (seed included) and are byte-identical
across runs with the same config: wall time is shown on stderr only.  Exit
codes: 0 all checks pass, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .domains import DomainSpec, LinearEmbedding, polydisk_embedding, product_embedding
from .hartogs import (
    HartogsPotential,
    HartogsSpec,
    h_sample,
    potential,
    slice_chart,
)
from .l2embed import (
    GeodesicClass,
    Truncation,
    line_constraints,
    line_deviation,
    norm_residual,
)
from .metric import distance_to_span, geodesic_ivp, hermitian_inner, tg_residual, _metric_matrix

DEFAULT_TOLERANCES = {
    "pullback": 1e-12,
    "tg_residual": 1e-9,
    "energy_drift": 1e-8,
    "metric_fd": 1e-7,
    "embed": 1e-10,
    "confinement": 1e-6,
}
SCAN_LINEAR_MAX = 1e-6
SCAN_CURVED_MIN = 1e-5


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    spec: HartogsSpec
    seed: int = 0
    samples: int = 200
    shrink: float = 0.6
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    truncation: Truncation = Truncation(40, 40)

    def echo(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "seed": self.seed,
            "samples": self.samples,
            "shrink": self.shrink,
            "tolerances": dict(sorted(self.tolerances.items())),
            "truncation": {"k_max": self.truncation.k_max, "a_max": self.truncation.a_max},
        }


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check]
    extra: dict = field(default_factory=dict)
    status: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def payload(self) -> dict:
        out = {
            "command": self.command,
            "config": self.config,
            "checks": [
                {
                    "name": c.name,
                    "status": "pass" if c.passed else "fail",
                    "measured": c.measured,
                    "tolerance": c.tolerance,
                }
                for c in self.checks
            ],
            "overall": "pass" if self.passed else "fail",
        }
        if self.status:
            out["status"] = self.status
        out.update(self.extra)
        return out


def _pool() -> ThreadPoolExecutor:
    cap = os.environ.get("HARTOGS_GEOM_THREADS")
    workers = max(1, int(cap)) if cap else min(4, os.cpu_count() or 1)
    return ThreadPoolExecutor(max_workers=workers)


def _load_config(args) -> RunConfig:
    obj = {}
    if args.config:
        try:
            with open(args.config) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    try:
        spec = (
            HartogsSpec.from_json(obj["spec"])
            if "spec" in obj
            else HartogsSpec(DomainSpec.type_i(2, 2), 1.0)
        )
        tolerances = dict(DEFAULT_TOLERANCES)
        tolerances.update(obj.get("tolerances", {}))
        trunc = obj.get("truncation", {})
        cfg = RunConfig(
            spec=spec,
            seed=int(obj.get("seed", 0)),
            samples=int(obj.get("samples", 200)),
            shrink=float(obj.get("shrink", 0.6)),
            tolerances=tolerances,
            truncation=Truncation(int(trunc.get("k_max", 40)), int(trunc.get("a_max", 40))),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    for name in ("seed", "samples", "shrink"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    for name in DEFAULT_TOLERANCES:
        val = getattr(args, name.replace("-", "_"), None)
        if val is not None:
            cfg.tolerances[name] = val
    if cfg.samples < 1:
        raise ConfigError("samples must be >= 1")
    if not 0 < cfg.shrink <= 1:
        raise ConfigError("shrink must lie in (0, 1]")
    if any(t <= 0 for t in cfg.tolerances.values()):
        raise ConfigError("tolerances must be positive")
    return cfg


def _parse_complex_vector(text: str, expected: int | None = None) -> np.ndarray:
    try:
        vec = np.array([complex(part.strip().replace(" ", "")) for part in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex vector {text!r}: {exc}") from exc
    if expected is not None and len(vec) != expected:
        raise ConfigError(f"expected {expected} components, got {len(vec)}")
    return vec


# -- commands -------------------------------------------------------------------


def cmd_verify_immersion(cfg: RunConfig) -> Report:
    base = cfg.spec.base
    emb = product_embedding(base) if base.kind == "product" else polydisk_embedding(base)
    r = base.rank
    h_poly = HartogsSpec(DomainSpec.polydisk(r), cfg.spec.mu)

    def one(i: int) -> tuple[float, float]:
        p = h_sample(h_poly, cfg.shrink, cfg.seed + i)
        z, w = p[:-1], p[-1]
        img = np.append(emb(z), w)
        pull = abs(potential(cfg.spec, img) - potential(h_poly, p))
        norm = abs(float(base._norm(emb(z))) - float(np.prod(1.0 - np.abs(z) ** 2)))
        return pull, norm

    with _pool() as pool:
        results = list(pool.map(one, range(cfg.samples)))
    max_pull = max(r[0] for r in results)
    max_norm = max(r[1] for r in results)
    tol = cfg.tolerances["pullback"]
    return Report(
        command="verify-immersion",
        config=cfg.echo(),
        checks=[
            Check("potential_pullback_identity", max_pull < tol, max_pull, tol),
            Check("generic_norm_identity", max_norm < tol, max_norm, tol),
        ],
    )


_POLYDISK_ALIASES = {
    "typeI-polydisk": "I",
    "typeII-polydisk": "II",
    "typeIII-polydisk": "III",
    "typeIV-polydisk": "IV",
}


def _build_chart(cfg: RunConfig, selector: str, sub_rank: int):
    base = cfg.spec.base
    if selector == "polydisk" or selector in _POLYDISK_ALIASES:
        want = _POLYDISK_ALIASES.get(selector)
        if want and base.kind != want:
            raise ConfigError(f"selector {selector} requires a type {want} base")
        emb = product_embedding(base) if base.kind == "product" else polydisk_embedding(base)
        return slice_chart(cfg.spec, emb)
    is_polydisk = all(
        f.kind == "I" and f.params == (1, 1) for f in base.irreducible_factors
    )
    if not is_polydisk:
        raise ConfigError(f"selector {selector} requires a polydisk base")
    n = base.dim
    if selector == "factor-slice":
        if not 1 <= sub_rank < n:
            raise ConfigError("sub-rank must lie in 1..n-1")
        mat = np.zeros((n, sub_rank), dtype=np.complex128)
        mat[:sub_rank, :] = np.eye(sub_rank)
        emb = LinearEmbedding(DomainSpec.polydisk(sub_rank), base, mat)
        return slice_chart(cfg.spec, emb)
    if selector == "diagonal-slice":
        if n < 2:
            raise ConfigError("diagonal slice needs a polydisk of dimension >= 2")
        mat = np.zeros((n, 1), dtype=np.complex128)
        mat[0, 0] = 1.0
        mat[1, 0] = 1.0
        emb = LinearEmbedding(DomainSpec.polydisk(1), base, mat)
        return slice_chart(cfg.spec, emb)
    raise ConfigError(f"unknown slice selector {selector!r}")


def cmd_verify_tg(cfg: RunConfig, selector: str, sub_rank: int = 1) -> Report:
    chart = _build_chart(cfg, selector, sub_rank)
    pot = HartogsPotential(cfg.spec)

    def residual(i: int) -> float:
        q = chart.sample(cfg.shrink, cfg.seed + i)
        return tg_residual(pot, chart, q)

    with _pool() as pool:
        residuals = list(pool.map(residual, range(cfg.samples)))
    max_resid = max(residuals)

    rng = np.random.default_rng(cfg.seed)
    basis0 = chart.tangent_basis(np.zeros(chart.n_params))
    max_dev, max_drift = 0.0, 0.0
    for i in range(5):
        q = chart.sample(0.4, cfg.seed + 1000 + i)
        p0 = chart.embed(q)
        coeff = rng.normal(size=basis0.shape[1]) + 1j * rng.normal(size=basis0.shape[1])
        v0 = basis0 @ coeff
        g = _metric_matrix(pot, p0)
        v0 = v0 / np.sqrt(np.real(hermitian_inner(g, v0, v0)) + 1e-300) * 0.4
        trace = geodesic_ivp(pot, p0, v0, 1.0, tol=1e-9)
        dev = max(distance_to_span(p, basis0) for p in trace.positions)
        max_dev = max(max_dev, dev)
        max_drift = max(max_drift, trace.energy_drift())

    tol_tg = cfg.tolerances["tg_residual"]
    tol_conf = cfg.tolerances["confinement"]
    tol_drift = cfg.tolerances["energy_drift"]
    return Report(
        command="verify-tg",
        config=cfg.echo(),
        checks=[
            Check("tg_residual_max", max_resid < tol_tg, max_resid, tol_tg),
            Check("geodesic_confinement_max", max_dev < tol_conf, max_dev, tol_conf),
            Check("geodesic_energy_drift", max_drift < tol_drift, max_drift, tol_drift),
        ],
        extra={"selector": selector},
    )


def cmd_geodesic(cfg: RunConfig, p0, v0, T: float, trace_path: str | None) -> Report:
    pot = HartogsPotential(cfg.spec)
    trace = geodesic_ivp(pot, p0, v0, T, tol=1e-10)
    drift = trace.energy_drift()
    if trace_path:
        with open(trace_path, "w", newline="") as fh:
            trace.write_csv(fh)
    tol = cfg.tolerances["energy_drift"]
    extra = {
        "T": T,
        "steps": len(trace.times),
        "final_time": float(trace.times[-1]),
        "trace_csv": trace_path or "",
    }
    if not np.any(p0):
        # confinement diagnostic for runs from the origin: distance of the
        # trajectory from the complex line through the initial direction
        basis = (v0 / np.linalg.norm(v0)).reshape(-1, 1)
        extra["line_deviation"] = max(
            distance_to_span(p, basis) for p in trace.positions
        )
    return Report(
        command="geodesic",
        config=cfg.echo(),
        checks=[Check("energy_drift", drift < tol, drift, tol)],
        extra=extra,
        status=trace.status,
    )


def _scan_directions(r: int) -> list[tuple[str, np.ndarray]]:
    pure_base = np.zeros(r + 1, dtype=np.complex128)
    pure_base[0] = 1.0
    pure_fiber = np.zeros(r + 1, dtype=np.complex128)
    pure_fiber[r] = 1.0
    mixed_equal = np.ones(r + 1, dtype=np.complex128)
    # base moduli 1..r, fiber 2: distinct from mixed_equal even at r = 1
    mixed_unequal = np.array([1.0 + k for k in range(r)] + [2.0], dtype=np.complex128)
    out = [
        ("pure-base", pure_base),
        ("pure-fiber", pure_fiber),
        ("mixed-equal", mixed_equal / np.linalg.norm(mixed_equal)),
        ("mixed-unequal", mixed_unequal / np.linalg.norm(mixed_unequal)),
    ]
    return out


def cmd_linear_scan(cfg: RunConfig, mu_grid, r_grid, T: float = 0.5) -> Report:
    cells = [
        (mu, r, name, xi)
        for mu in mu_grid
        for r in r_grid
        for name, xi in _scan_directions(r)
    ]

    def one(cell):
        mu, r, name, xi = cell
        verdict = line_constraints(r, mu, xi)
        deviation = line_deviation(r, mu, xi, T)
        if verdict.klass == GeodesicClass.IMPOSSIBLE:
            consistent = deviation > SCAN_CURVED_MIN
        else:
            consistent = deviation < SCAN_LINEAR_MAX
        record = {
            "mu": mu,
            "r": r,
            "direction": name,
            "xi": [[float(c.real), float(c.imag)] for c in xi],
            "deviation": deviation,
            "consistent": consistent,
        }
        record.update(verdict.to_json())
        return record

    with _pool() as pool:
        records = list(pool.map(one, cells))
    bad = sum(1 for rec in records if not rec["consistent"])
    return Report(
        command="linear-scan",
        config=cfg.echo(),
        checks=[Check("verdict_deviation_consistency", bad == 0, float(bad), 0.5)],
        extra={"records": records, "grid": {"mu": list(mu_grid), "r": list(r_grid), "T": T}},
    )


def cmd_embed_residual(cfg: RunConfig, point) -> Report:
    base = cfg.spec.base
    if any(f.kind != "I" or f.params != (1, 1) for f in base.irreducible_factors):
        raise ConfigError("embed-residual requires a polydisk base")
    from .hartogs import h_contains

    if not h_contains(cfg.spec, np.asarray(point, dtype=np.complex128)):
        raise ConfigError("point lies outside the configured Hartogs domain")
    r = base.rank
    mu = cfg.spec.mu
    table = {}
    for k in (10, 20, 40, 60):
        table[k] = norm_residual(r, mu, point, Truncation(k, k))
    resid = norm_residual(r, mu, point, cfg.truncation)
    keys = sorted(table)
    floor = 1e-14
    monotone = all(
        table[b] < table[a] or table[b] < floor for a, b in zip(keys, keys[1:])
    )
    tol = cfg.tolerances["embed"]
    return Report(
        command="embed-residual",
        config=cfg.echo(),
        checks=[
            Check("norm_residual", resid < tol, resid, tol),
            Check("residual_monotone_decrease", monotone, 0.0 if monotone else 1.0, 0.5),
        ],
        extra={
            "point": [[float(c.real), float(c.imag)] for c in np.asarray(point, dtype=complex)],
            "convergence_table": {str(k): table[k] for k in keys},
        },
    )


# -- output ----------------------------------------------------------------------


def _emit(report: Report, args, wall: float) -> int:
    for c in report.checks:
        print(
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: measured={c.measured:.3e} "
            f"tolerance={c.tolerance:.3e}",
            file=sys.stderr,
        )
    print(f"wall time: {wall:.2f}s", file=sys.stderr)
    if args.format == "csv":
        lines = ["name,status,measured,tolerance"]
        lines += [
            f"{c.name},{'pass' if c.passed else 'fail'},{c.measured!r},{c.tolerance!r}"
            for c in report.checks
        ]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report.payload(), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--shrink", type=float, default=None)
    p.add_argument("--out", help="report destination (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    for name in DEFAULT_TOLERANCES:
        p.add_argument(f"--{name.replace('_', '-')}", type=float, default=None, dest=name)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hartogs-geom",
        description="Verification harness for Cartan-Hartogs geometry",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-immersion", help="potential pullback and norm identities")
    _add_common(p)

    p = sub.add_parser("verify-tg", help="totally geodesic slice verification")
    _add_common(p)
    p.add_argument(
        "--slice",
        dest="selector",
        default="polydisk",
        choices=["polydisk", *_POLYDISK_ALIASES, "factor-slice", "diagonal-slice"],
    )
    p.add_argument("--sub-rank", type=int, default=1)

    p = sub.add_parser("geodesic", help="integrate one geodesic and dump its trace")
    _add_common(p)
    p.add_argument("--p0", required=True, help="comma-separated complex initial point")
    p.add_argument("--v0", required=True, help="comma-separated complex initial velocity")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--trace-out", default="trace.csv", help="CSV trace destination")

    p = sub.add_parser("linear-scan", help="linear-support direction classification scan")
    _add_common(p)
    p.add_argument("--mu-grid", default="0.5,1,2")
    p.add_argument("--r-grid", default="1,2")
    p.add_argument("--T", type=float, default=0.5)

    p = sub.add_parser("embed-residual", help="sequence-space embedding residual")
    _add_common(p)
    p.add_argument("--point", required=True, help="comma-separated complex point (z..., w)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = _load_config(args)
        if args.command == "verify-immersion":
            report = cmd_verify_immersion(cfg)
        elif args.command == "verify-tg":
            report = cmd_verify_tg(cfg, args.selector, args.sub_rank)
        elif args.command == "geodesic":
            n = cfg.spec.n_coords
            p0 = _parse_complex_vector(args.p0, n)
            v0 = _parse_complex_vector(args.v0, n)
            report = cmd_geodesic(cfg, p0, v0, args.T, args.trace_out)
        elif args.command == "linear-scan":
            try:
                mu_grid = [float(x) for x in args.mu_grid.split(",") if x.strip()]
                r_grid = [int(x) for x in args.r_grid.split(",") if x.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad scan grid: {exc}") from exc
            if not mu_grid or not r_grid:
                raise ConfigError("scan grid must be nonempty")
            report = cmd_linear_scan(cfg, mu_grid, r_grid, args.T)
        elif args.command == "embed-residual":
            point = _parse_complex_vector(args.point, cfg.spec.n_coords)
            report = cmd_embed_residual(cfg, point)
        else:  # pragma: no cover - argparse enforces choices
            raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return _emit(report, args, time.perf_counter() - t0)


if __name__ == "__main__":
    raise SystemExit(main())
