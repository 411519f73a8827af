"""freefock command line: seeded verification runs that write CSV/JSON results.

Exit codes: 0 success, 2 config or validation error, 3 a bound or identity
failed (the offending instance is dumped next to the output file).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .bogoljubov import OrthogonalRep, bogoljubov_act, claim_check, mixing_coefficient
from .fock import HilbertSpec, HVector, inner
from .measures import (
    DEFAULT_GRID,
    FamilyParams,
    cantor_family,
    m_infinity,
    measure_from_dict,
    measure_to_dict,
    rajchman_profile,
    support_cells,
)
from .sampling import random_conj_frame, random_expression, random_letter, random_space
from .spectra import disjointness_matrix, eta_from_measure, exoticness_probe
from .subspaces import (
    AdmissibilityError,
    EpsFamily,
    SubspaceFrame,
    delta_iterate,
    eps_of_pair,
    family_bound_check,
    four_projection_bound,
    random_eps_family,
    three_subspace_fact,
    two_projection_bound,
)
from .wick import semicircle_moment, trace, vacuum_image, wick_adjoint, wick_apply, wick_product

ENV_OUTPUT_DIR = "FREEFOCK_OUTPUT_DIR"
RANDOMIZED = {"wick-check", "bogoljubov-mix", "claim-scan", "eps-bounds"}
OUTPUT_KEYS = {"out", "measure_out"}
DIRAC0 = {"type": "atomic", "atoms": [[0.0, 1.0]]}

DEFAULTS: dict[str, dict[str, Any]] = {
    "fock-moments": {"norm": 1.0, "max_order": 12, "dim": 1},
    "wick-check": {"trials": 200, "dim": 3, "max_degree": 3},
    "bogoljubov-mix": {"trials": 100, "dim": 4, "gmax": 6},
    "claim-scan": {"trials": 50, "dim": 6, "rank": 3, "cutoff": 4, "gmax": 6},
    "eps-bounds": {"trials": 1000, "dim": 32, "max_rank": 6, "eps": 0.15},
    "measure-fourier": {"measure": DIRAC0, "window": 64, "kind": "coefficients"},
    "measure-minf": {"measure": DIRAC0, "terms": 20, "grid": DEFAULT_GRID, "window": 64, "measure_out": None},
    "family-build": {"bits": 2, "ratio": 0.125, "offsets": [0.0, 0.625, 0.875], "depth": 40},
    "spectra-report": {
        "bits": 1,
        "ratio": 0.125,
        "offsets": [0.0, 0.625, 0.875],
        "depth": 40,
        "levels": [8, 10, 12],
        "terms": 20,
        "grid": DEFAULT_GRID,
        "window": 32,
    },
}

FLAGS: dict[str, tuple[Callable, str]] = {
    "trials": (int, "number of random instances"),
    "dim": (int, "dimension of the one-particle space"),
    "rank": (int, "largest subspace rank"),
    "max_rank": (int, "largest subspace rank"),
    "cutoff": (int, "Fock space cutoff (largest word length)"),
    "max_degree": (int, "largest Wick word degree"),
    "max_order": (int, "largest moment order"),
    "norm": (float, "norm of the letter e"),
    "gmax": (int, "group elements are drawn from [-gmax, gmax]"),
    "eps": (float, "largest target eps, in [0, 1/2)"),
    "grid": (int, "grid size, a power of two"),
    "window": (int, "Fourier window N (modes -N..N)"),
    "terms": (int, "number of convolution terms M"),
    "bits": (int, "length of the family index bit strings"),
    "ratio": (float, "Cantor contraction ratio"),
    "offsets": (lambda s: [float(t) for t in s.split(",")], "comma separated child offsets"),
    "depth": (int, "Cantor depth"),
    "level": (int, "dyadic resolution level"),
    "levels": (lambda s: [int(t) for t in s.split(",")], "comma separated dyadic levels"),
    "kind": (str, "coefficients or profile"),
    "measure": (str, "measure as inline JSON or a path to a JSON file"),
    "measure_out": (str, "optional path for the computed measure (JSON)"),
}

COMMAND_FLAGS = {
    "fock-moments": ["norm", "max_order", "dim", "cutoff"],
    "wick-check": ["trials", "dim", "max_degree", "cutoff"],
    "bogoljubov-mix": ["trials", "dim", "gmax"],
    "claim-scan": ["trials", "dim", "rank", "cutoff", "gmax"],
    "eps-bounds": ["trials", "dim", "max_rank", "eps"],
    "measure-fourier": ["measure", "window", "kind"],
    "measure-minf": ["measure", "terms", "grid", "window", "measure_out"],
    "family-build": ["bits", "ratio", "offsets", "depth", "level"],
    "spectra-report": ["bits", "ratio", "offsets", "depth", "levels", "terms", "grid", "window"],
}

SUMMARY = {
    "fock-moments": "moments of W(e) against Catalan numbers",
    "wick-check": "Wick product, adjoint and trace identities on random expressions",
    "bogoljubov-mix": "trace of sigma_g(W(e))W(f) against <pi(g)e, f>",
    "claim-scan": "compression norm of rho(g) on K (x) Fock space against its bound",
    "eps-bounds": "random almost-orthogonal families against the projection bounds",
    "measure-fourier": "Fourier coefficients or decay profile of a circle measure",
    "measure-minf": "mu^inf = sum 2^-m mu^{*m} on a grid",
    "family-build": "Cantor family indexed by bit strings, with support cells",
    "spectra-report": "pairwise and vs-Haar affinities of the torus measures eta_x",
}

DEFAULT_OUT = {
    "fock-moments": "fock_moments.csv",
    "wick-check": "wick_check.csv",
    "bogoljubov-mix": "bogoljubov_mix.csv",
    "claim-scan": "claim_scan.csv",
    "eps-bounds": "eps_bounds.csv",
    "measure-fourier": "measure_fourier.csv",
    "measure-minf": "measure_minf.csv",
    "family-build": "family.json",
    "spectra-report": "spectra_report.json",
}


class Counterexample(Exception):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def load_schema() -> dict:
    return json.loads(resources.files("freefock").joinpath("config_schema.json").read_text())


def resolve_out(path: str | None, command: str) -> Path:
    base = os.environ.get(ENV_OUTPUT_DIR)
    p = Path(path) if path else Path(DEFAULT_OUT[command])
    if not p.is_absolute() and base:
        p = Path(base) / p
    return p


def _writable(p: Path) -> bool:
    parent = p.parent if str(p.parent) else Path(".")
    if p.exists():
        return os.access(p, os.W_OK) and p.is_file()
    return parent.is_dir() and os.access(parent, os.W_OK)


def _is_pow2(n) -> bool:
    return isinstance(n, int) and n >= 1 and n & (n - 1) == 0


def validate(config: dict) -> list[str]:
    """Failures for a resolved config; an empty list means the config is usable. No side effects."""
    import jsonschema

    failures = []
    for err in sorted(jsonschema.Draft202012Validator(load_schema()).iter_errors(config), key=lambda e: list(e.path)):
        where = ".".join(str(p) for p in err.path) or "config"
        failures.append(f"{where}: {err.message}")
    cmd = config.get("command")
    if cmd not in DEFAULTS:
        failures.append(f"unknown command {cmd!r}")
        return failures
    if cmd in RANDOMIZED and config.get("seed") is None:
        failures.append(f"seed is required for {cmd}")
    eps = config.get("eps")
    if cmd == "eps-bounds" and isinstance(eps, (int, float)) and not 0 <= eps < 0.5:
        failures.append(f"eps = {eps} is outside the delta domain [0, 1/2)")
    if "grid" in config and not _is_pow2(config["grid"]):
        failures.append(f"grid = {config['grid']} is not a power of two")
    if cmd == "wick-check" and config.get("cutoff") is not None and isinstance(config.get("max_degree"), int):
        if config["cutoff"] < 2 * config["max_degree"]:
            failures.append("cutoff must be at least 2 * max_degree for exact operator composition")
    if cmd == "eps-bounds" and isinstance(config.get("dim"), int) and config["dim"] < 8:
        failures.append("eps-bounds needs dim >= 8 to host a family of 8 subspaces")
    if cmd == "spectra-report" and isinstance(config.get("bits"), int) and config["bits"] > 6:
        failures.append("spectra-report supports bits <= 6")
    for key in OUTPUT_KEYS:
        val = config.get(key)
        if isinstance(val, str) and not _writable(resolve_out(val, cmd)):
            failures.append(f"{key}: cannot write to {resolve_out(val, cmd)}")
    return failures


def config_hash(config: dict) -> str:
    core = {k: v for k, v in config.items() if k not in OUTPUT_KEYS}
    return hashlib.sha256(json.dumps(core, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _meta(config: dict) -> dict:
    seed = config.get("seed")
    return {"version": __version__, "seed": "none" if seed is None else seed, "config_sha256": config_hash(config)}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)  # no negative zeros
    return str(v)


def write_csv(path: Path, header: list[str], rows, config: dict):
    m = _meta(config)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        fh.write(f"# version={m['version']} seed={m['seed']} config_sha256={m['config_sha256']}\n")


def write_json(path: Path, obj: dict, config: dict):
    obj = dict(obj)
    obj["meta"] = _meta(config)
    with open(path, "w") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def trial_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent per-trial generators, so results do not depend on execution order."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _cplx(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


# ---- commands ---------------------------------------------------------------------


def cmd_fock_moments(cfg: dict, out: Path):
    space = HilbertSpec(cfg["dim"])
    e = HVector.basis(space, 0) * cfg["norm"]
    K = cfg["max_order"]
    cutoff = cfg.get("cutoff")
    rows = []
    for k in range(1, K + 1):
        v = semicircle_moment(e, k, cutoff)
        if k % 2:
            if abs(v) > 1e-12 * max(1.0, cfg["norm"] ** k):
                raise Counterexample(f"odd moment {k} is {v!r}", {"order": k, "value": v})
            continue
        cat = math.comb(k, k // 2) // (k // 2 + 1) * cfg["norm"] ** k
        if abs(v - cat) > 1e-9 * cat:
            raise Counterexample(f"moment {k} is {v!r}, Catalan value {cat!r}", {"order": k, "value": v, "catalan": cat})
        rows.append((k, v, float(cat)))
    write_csv(out, ["order", "value", "catalan"], rows, cfg)


def cmd_wick_check(cfg: dict, out: Path):
    D = cfg["max_degree"]
    L = cfg.get("cutoff") or 2 * D
    rows = []
    for t, rng in enumerate(trial_rngs(cfg["seed"], cfg["trials"])):
        space = random_space(cfg["dim"], rng)
        x, y, z = (random_expression(space, rng, D) for _ in range(3))
        yo, zo = vacuum_image(y, L), vacuum_image(z, L)
        xyo = vacuum_image(wick_product(x, y), L)
        scale = max(1.0, xyo.norm())
        prod_err = (xyo - wick_apply(x, yo)).norm() / scale
        lhs = inner(wick_apply(x, yo), zo)
        rhs = inner(yo, wick_apply(wick_adjoint(x), zo))
        adj_err = abs(lhs - rhs) / max(1.0, abs(lhs))
        a, b = trace(wick_product(x, y)), trace(wick_product(y, x))
        tr_err = abs(a - b) / max(1.0, abs(a))
        rows.append((t, prod_err, adj_err, tr_err))
        if max(prod_err, adj_err, tr_err) > 1e-10:
            raise Counterexample(
                f"trial {t}: Wick identities fail (product {prod_err:.3e}, adjoint {adj_err:.3e}, trace {tr_err:.3e})",
                {"trial": t, "x": json.loads(x.to_json()), "y": json.loads(y.to_json()), "z": json.loads(z.to_json())},
            )
    write_csv(out, ["trial", "product_err", "adjoint_err", "trace_err"], rows, cfg)


def cmd_bogoljubov_mix(cfg: dict, out: Path):
    rows = []
    for t, rng in enumerate(trial_rngs(cfg["seed"], cfg["trials"])):
        space = random_space(cfg["dim"], rng)
        rep = OrthogonalRep.random(space, rng)
        g = int(rng.integers(-cfg["gmax"], cfg["gmax"] + 1))
        e, f = random_letter(space, rng, real=True), random_letter(space, rng, real=True)
        res = mixing_coefficient(rep, g, e, f)
        x = random_expression(space, rng, 3)
        tr_err = abs(trace(bogoljubov_act(rep, g, x)) - trace(x))
        rows.append((t, g, res.tau.real, res.tau.imag, res.inner.real, res.inner.imag, res.residual, tr_err))
        if res.residual > 1e-10 or tr_err > 1e-10:
            raise Counterexample(
                f"trial {t}: mixing residual {res.residual:.3e}, trace error {tr_err:.3e}",
                {"trial": t, "g": g, "rep": json.loads(rep.to_json()), "e": [_cplx(z) for z in e.coeffs], "f": [_cplx(z) for z in f.coeffs]},
            )
    write_csv(out, ["trial", "g", "tau_re", "tau_im", "inner_re", "inner_im", "residual", "trace_err"], rows, cfg)


def cmd_claim_scan(cfg: dict, out: Path):
    rows = []
    for t, rng in enumerate(trial_rngs(cfg["seed"], cfg["trials"])):
        space = random_space(cfg["dim"], rng)
        rep = OrthogonalRep.random(space, rng)
        r = int(rng.integers(1, min(cfg["rank"], cfg["dim"]) + 1))
        K = random_conj_frame(space, r, rng)
        g = int(rng.integers(1, cfg["gmax"] + 1)) * int(rng.choice([-1, 1]))
        res = claim_check(rep, g, K, cfg["cutoff"])
        rows.append((t, g, K.rank, res.measured, res.predicted))
        if res.measured > res.predicted + 1e-9:
            raise Counterexample(
                f"trial {t}: compression norm {res.measured!r} exceeds {res.predicted!r}",
                {"trial": t, "g": g, "rep": json.loads(rep.to_json()), "K": [[_cplx(z) for z in col] for col in K.frame.T]},
            )
    write_csv(out, ["trial", "g", "rank", "measured", "predicted"], rows, cfg)


EPS_KINDS = ("two", "three", "four", "family4", "family8")


def eps_instance(kind: str, dim: int, max_rank: int, eps: float, rng: np.random.Generator, attempts: int = 60):
    """Draw an admissible instance; returns (frames, measured eps, rank)."""
    count = {"two": 2, "three": 3, "four": 4, "family4": 4, "family8": 8}[kind]
    target = eps
    for _ in range(attempts):
        rank = int(rng.integers(1, min(max_rank, dim // count) + 1))
        frames = random_eps_family(count, rank, dim, target * rng.uniform(0.25, 1.0), rng)
        m = max(eps_of_pair(frames[i], frames[j]) for i in range(count) for j in range(i + 1, count))
        try:
            if kind in ("two", "three"):
                ok = m < 0.45
            elif kind == "four":
                ok = m < 0.5
            else:
                delta_iterate(m, count.bit_length() - 2)
                ok = True
        except AdmissibilityError:
            ok = False
        if ok:
            return frames, m, rank
        target *= 0.8
    raise RuntimeError(f"no admissible {kind} instance found")


def eps_trial(kind: str, frames: list[SubspaceFrame], m: float, xi: np.ndarray) -> list[tuple[float, float]]:
    if kind == "two":
        return [two_projection_bound(frames[0], frames[1], m, xi)]
    if kind == "three":
        return [three_subspace_fact(*frames, m)]
    if kind == "four":
        return [four_projection_bound(frames, m)]
    fam = EpsFamily(tuple(frames), m)
    return [family_bound_check(fam, lev, xi) for lev in range(1, fam.k + 1)]


def cmd_eps_bounds(cfg: dict, out: Path):
    rows = []
    for t, rng in enumerate(trial_rngs(cfg["seed"], cfg["trials"])):
        kind = EPS_KINDS[t % len(EPS_KINDS)]
        frames, m, rank = eps_instance(kind, cfg["dim"], cfg["max_rank"], cfg["eps"], rng)
        xi = rng.standard_normal(cfg["dim"]) + 1j * rng.standard_normal(cfg["dim"])
        xi /= np.linalg.norm(xi)
        for lhs, rhs in eps_trial(kind, frames, m, xi):
            rows.append((t, kind, len(frames), rank, m, lhs, rhs))
            if lhs > rhs + 1e-9:
                raise Counterexample(
                    f"trial {t} ({kind}): {lhs!r} > {rhs!r}",
                    {
                        "trial": t,
                        "kind": kind,
                        "eps": m,
                        "xi": [_cplx(z) for z in xi],
                        "frames": [[[_cplx(z) for z in col] for col in F.frame.T] for F in frames],
                    },
                )
    write_csv(out, ["trial", "kind", "count", "rank", "eps", "lhs", "rhs"], rows, cfg)


def _measure(cfg: dict):
    return measure_from_dict(cfg["measure"])


def cmd_measure_fourier(cfg: dict, out: Path):
    mu = _measure(cfg)
    if cfg["kind"] == "profile":
        p = rajchman_profile(mu, cfg["window"])
        write_csv(out, ["m", "abs", "tail_sup"], zip(p.m, p.abs_coeffs, p.tail_sup), cfg)
        return
    w = mu.fourier(cfg["window"])
    write_csv(out, ["n", "re", "im", "abs"], zip(w.n, w.coeffs.real, w.coeffs.imag, np.abs(w.coeffs)), cfg)


def cmd_measure_minf(cfg: dict, out: Path):
    mu = _measure(cfg)
    r = m_infinity(mu, cfg["terms"], cfg["grid"], resample=True)
    w = r.fourier(cfg["window"])
    write_csv(out, ["n", "re", "im", "abs"], zip(w.n, w.coeffs.real, w.coeffs.imag, np.abs(w.coeffs)), cfg)
    if cfg.get("measure_out"):
        write_json(resolve_out(cfg["measure_out"], "measure-minf"), {"measure": measure_to_dict(r)}, cfg)


def _family_params(cfg: dict) -> FamilyParams:
    return FamilyParams(cfg["bits"], cfg["ratio"], tuple(cfg["offsets"]), cfg["depth"])


def _bitstrings(bits: int) -> list[str]:
    return [format(j, f"0{bits}b") if bits else "" for j in range(2**bits)]


def cmd_family_build(cfg: dict, out: Path):
    params = _family_params(cfg)
    level = cfg.get("level", params.construction_level)
    members, seen, total = [], set(), 0
    for x in _bitstrings(params.bits):
        mu = cantor_family(x, params)
        cells = sorted(support_cells(mu, level))
        total += len(cells)
        seen.update(cells)
        members.append({"x": x, "measure": measure_to_dict(mu), "support_cells": cells})
    if len(seen) != total:
        raise Counterexample(f"supports overlap at level {level}", {"level": level, "members": members})
    write_json(out, {"level": level, "construction_level": params.construction_level, "members": members}, cfg)


def cmd_spectra_report(cfg: dict, out: Path):
    params = _family_params(cfg)
    xs = _bitstrings(params.bits)
    fam = [cantor_family(x, params) for x in xs]
    rep = disjointness_matrix(fam, cfg["levels"], cfg["window"], cfg["terms"], cfg["grid"], ids=xs)
    report = rep.to_dict()
    report["fiber_probes"] = {
        x: exoticness_probe(eta_from_measure(mu, cfg["window"], cfg["terms"], cfg["grid"]), cfg["levels"], 4).to_dict()
        for x, mu in zip(xs, fam)
    }
    write_json(out, report, cfg)
    rows = [
        (lev, xs[i], xs[j], rep.matrices[li, i, j])
        for li, lev in enumerate(rep.levels)
        for i in range(len(xs))
        for j in range(len(xs))
    ]
    rows += [(lev, xs[i], "haar", rep.vs_haar[li, i]) for li, lev in enumerate(rep.levels) for i in range(len(xs))]
    write_csv(out.with_suffix(".summary.csv"), ["level", "a", "b", "score"], rows, cfg)


COMMANDS = {
    "fock-moments": cmd_fock_moments,
    "wick-check": cmd_wick_check,
    "bogoljubov-mix": cmd_bogoljubov_mix,
    "claim-scan": cmd_claim_scan,
    "eps-bounds": cmd_eps_bounds,
    "measure-fourier": cmd_measure_fourier,
    "measure-minf": cmd_measure_minf,
    "family-build": cmd_family_build,
    "spectra-report": cmd_spectra_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freefock", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, keys in COMMAND_FLAGS.items():
        sp = sub.add_parser(name, help=SUMMARY[name], description=SUMMARY[name], argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="JSON config; flags override its values")
        sp.add_argument("--seed", type=int, help="master seed (required for randomized commands)")
        sp.add_argument("--out", help=f"output path (default {DEFAULT_OUT[name]} in ${ENV_OUTPUT_DIR} or the cwd)")
        for key in keys:
            typ, helptext = FLAGS[key]
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, help=helptext)
    return p


def _parse_measure(value):
    if isinstance(value, dict):
        return value
    text = value.strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return json.loads(text)


def resolve_config(args: argparse.Namespace) -> dict:
    given = vars(args).copy()
    cmd = given.pop("command")
    path = given.pop("config", None)
    cfg: dict[str, Any] = {"command": cmd, **DEFAULTS[cmd]}
    if path:
        file_cfg = json.loads(Path(path).read_text())
        if not isinstance(file_cfg, dict):
            raise ValueError("config file must hold a JSON object")
        if file_cfg.get("command", cmd) != cmd:
            raise ValueError(f"config is for {file_cfg['command']!r}, not {cmd!r}")
        cfg.update(file_cfg)
    cfg.update(given)
    if "measure" in cfg:
        cfg["measure"] = _parse_measure(cfg["measure"])
    return cfg


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
    except (OSError, ValueError) as exc:
        print(f"freefock: config error: {exc}", file=sys.stderr)
        return 2
    failures = validate(cfg)
    if failures:
        for f in failures:
            print(f"freefock: invalid config: {f}", file=sys.stderr)
        return 2
    out = resolve_out(cfg.get("out"), cfg["command"])
    try:
        COMMANDS[cfg["command"]](cfg, out)
    except Counterexample as exc:
        dump = out.with_name(out.name + ".counterexample.json")
        write_json(dump, {"message": str(exc), "instance": exc.payload}, cfg)
        print(f"freefock: counterexample: {exc} (dumped to {dump})", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"freefock: invalid parameters: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
