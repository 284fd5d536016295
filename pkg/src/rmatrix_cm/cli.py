"""Command-line driver: verification suites, spin chains and Lax dynamics.

    rmatrix-cm verify --family bb --d 2 --n 3
    rmatrix-cm chain --n 5 --d 2
    rmatrix-cm chain --deformed --epsilon generic --n 3 --d 2
    rmatrix-cm lax --n 3 --d 2 --mu 0.31+0.17i [--quantum]

A ``--config FILE`` holds ``key = value`` lines with the flag names as keys
(``#`` starts a comment); flags given on the command line win.  Complex values
are written ``a+bi``.  Exit status: 0 pass, 1 numerical failure, 2 bad config.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import re
import sys

import numpy as np

from . import elliptic_kernel as ell
from . import dunkl_hamiltonians as dh
from . import lax_dynamics as lax
from . import rmatrix_families as rf
from . import spin_chains as sc
from .reports import dumps, make_report, write_atomic
from .tensor_space import BudgetError

log = logging.getLogger("rmatrix_cm")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
FAMILIES = ("scalar", "bb", "kronp", "trig", "trigp")
DEFAULTS = {"family": "bb", "d": 2, "n": 3, "tau": 1j, "g": 0.7, "flavor": None, "seed": 0,
            "samples": 20, "tol": None, "out": ".", "deformed": False, "epsilon": "generic",
            "mu": lax.DEFAULT_MU, "quantum": False}
COMPLEX_KEYS = ("tau", "g", "mu")
INT_KEYS = ("d", "n", "seed", "samples")
BOOL_KEYS = ("deformed", "quantum")

_COMPLEX_RE = re.compile(r"^\s*[-+0-9.eEij\s]+\s*$")


class UsageError(ValueError):
    pass


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise UsageError(f"not a complex number: {text!r}")
    s = s.replace("i", "j")
    if s.endswith("j") and (len(s) == 1 or s[-2] in "+-"):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise UsageError(f"not a complex number: {text!r}") from exc


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        out[key] = val
    return out


def _coerce(key: str, val):
    if val is None:
        return None
    if key in COMPLEX_KEYS:
        return parse_complex(val)
    if key in INT_KEYS:
        try:
            return int(val)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{key} must be an integer, got {val!r}") from exc
    if key in BOOL_KEYS:
        if isinstance(val, bool):
            return val
        if str(val).lower() in ("1", "true", "yes", "on"):
            return True
        if str(val).lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{key} must be a boolean, got {val!r}")
    if key == "tol":
        try:
            return float(val)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"tol must be a number, got {val!r}") from exc
    return val


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.command == "lax":
        cfg["g"] = lax.DYNAMICS_G
    if args.config:
        cfg.update({k: _coerce(k, v) for k, v in read_config_file(args.config).items()})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = _coerce(key, val)
    if cfg["family"] not in FAMILIES:
        raise UsageError(f"unknown family {cfg['family']!r}")
    if cfg["n"] < 2 or cfg["d"] < 1:
        raise UsageError("need n >= 2 and d >= 1")
    if cfg["samples"] < 1:
        raise UsageError("samples must be positive")
    trig = cfg["family"] in ("trig", "trigp")
    flavor = "trigonometric" if trig else "elliptic"
    if cfg["flavor"] not in (None, flavor):
        raise UsageError(f"family {cfg['family']} has flavor {flavor}, not {cfg['flavor']}")
    cfg["flavor"] = flavor
    if not trig:
        ell.as_tau(cfg["tau"])  # Im tau floor
    return cfg


def build_params(cfg: dict) -> dh.ModelParams:
    return dh.make_params(cfg["family"], cfg["d"], cfg["n"], cfg["g"], cfg["tau"])


def _config_echo(cfg: dict) -> dict:
    return {k: (format_complex(v) if isinstance(v, complex) else v) for k, v in sorted(cfg.items()) if k != "out"}


def _finish(cfg: dict, reports: list, extra: dict | None = None) -> int:
    passed = all(r.get("passed", True) for r in reports)
    doc = {"config": _config_echo(cfg), "reports": reports, "passed": passed}
    if extra:
        doc.update(extra)
    os.makedirs(cfg["out"], exist_ok=True)
    write_atomic(os.path.join(cfg["out"], "report.json"), dumps(doc) + "\n")
    for r in reports:
        status = "PASS" if r.get("passed", True) else "FAIL"
        log.info("%s %s %s %.3e", status, r["family"], r["identity"], r["max_residual"])
    return EXIT_OK if passed else EXIT_FAIL


# -- commands ----------------------------------------------------------------------

def cmd_verify(cfg: dict) -> int:
    p = build_params(cfg)
    fam = p.family
    tol = cfg["tol"]
    seed, samples = cfg["seed"], cfg["samples"]
    reps = rf.identity_suite(fam, samples, seed, tol=tol or 1e-8)
    if fam.kind is rf.FamilyKind.BAXTER_BELAVIN and fam.d == 2:
        dev = rf.eight_vertex_agreement(fam.tau, samples, seed)
        reps.append(make_report(fam.label, "eight_vertex_agreement", samples, dev, seed, tol or 1e-10))
    if fam.d > 1:
        for name, val in rf.classical_suite(fam, samples, seed).items():
            reps.append(make_report(fam.label, f"classical_{name}", samples, val, seed, tol or 1e-8))
    reps.append(dh.dunkl_commutativity(p, samples, seed, tol or 1e-9))
    reps.append(dh.dunkl_equivariance(p, min(samples, 5), seed, tol or 1e-9))
    for r in (1, 2, 3):
        if r <= p.n:
            reps.append(dh.classical_reduction(r, p, min(samples, 5), seed, tol or 1e-9))
    if fam.is_trig:
        reps += dh.trig_braid_suite(p, samples, seed, tol or 1e-9)
    else:
        reps += dh.translation_suite(p, samples, seed, tol or 1e-9)
    return _finish(cfg, reps)


def _epsilon(cfg: dict, n: int) -> tuple:
    spec = str(cfg["epsilon"]).strip()
    if spec == "generic":
        rng = np.random.default_rng([cfg["seed"], 7])
        return tuple(complex(a, b) for a, b in zip(rng.uniform(-0.3, 0.3, n), rng.uniform(-0.3, 0.3, n)))
    if spec == "degenerate":
        return (complex(cfg["mu"]),) + (0j,) * (n - 1)
    vals = tuple(parse_complex(s) for s in spec.split(","))
    if len(vals) != n:
        raise UsageError(f"epsilon needs {n} entries, got {len(vals)}")
    return vals


def _write_spectra(cfg: dict, spectra: list) -> None:
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    write_atomic(os.path.join(out, "spectra.json"), dumps(spectra) + "\n")
    tmp = os.path.join(out, "spectra.csv.tmp")
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["operator", "index", "re", "im"])
        for s in spectra:
            for k, (re_, im_) in enumerate(s["eigenvalues"]):
                w.writerow([s["operator"], k, repr(re_), repr(im_)])
    os.replace(tmp, os.path.join(out, "spectra.csv"))


def cmd_chain(cfg: dict) -> int:
    p = build_params(cfg)
    tol = cfg["tol"] or 1e-10
    if cfg["deformed"]:
        if p.n < 3:
            raise UsageError("the deformed chain needs n >= 3")
        eps = _epsilon(cfg, p.n)
        ops = [sc.orbit_representation(w, eps, p) for w in sc.DEFORMED]
        rep = sc.deformed_suite(p, eps, tol)
        rep["epsilon"] = [format_complex(e) for e in eps]
        reps = [rep]
    else:
        ops = [sc.freeze(2, p)]
        if p.n >= 3:
            ops.append(sc.freeze(3, p))
            reps = [sc.chain_suite(p, tol)]
        else:
            reps = []
    spectra = [sc.diagonalize(o, [q for q in ops if q is not o]) for o in ops]
    _write_spectra(cfg, spectra)
    return _finish(cfg, reps)


def cmd_lax(cfg: dict) -> int:
    p = build_params(cfg)
    mu, seed, samples = cfg["mu"], cfg["seed"], cfg["samples"]
    tol = cfg["tol"]
    reps = [lax.lax_suite(p, samples, seed, mu, tol or 1e-8)]
    pt = lax.spread_phase_point(p, np.random.default_rng([seed, 1]))
    if p.n >= 3 and p.family.d > 1 and p.g != 0:
        nr = lax.scalar_commutator_norm(pt, p, mu, "dr")
        rep = make_report(p.family.label, "diagonal_r_prime_not_removable", 1, nr, seed)
        rep["passed"] = bool(nr > 1e-3)
        reps.append(rep)
    traj = lax.integrate_flow(pt, p, 1e-3, 1000)
    fr = lax.flow_report(p, traj, mu)
    reps.append(make_report(p.family.label, "energy_drift", traj.stats["steps"], fr["energy_drift"], seed, 1e-8))
    reps.append(make_report(p.family.label, "trace_power_drift", traj.stats["steps"], fr["trace_drift"], seed, tol or 1e-6))
    if cfg["quantum"]:
        reps.append(lax.quantum_lax_residual(p, mu, samples, seed, tol or 1e-8))
    os.makedirs(cfg["out"], exist_ok=True)
    path = os.path.join(cfg["out"], "trajectory.csv")
    lax.write_trajectory_csv(path + ".tmp", p, traj, mu, every=10)
    os.replace(path + ".tmp", path)
    return _finish(cfg, reps, {"trajectory": {"aborted_at": traj.stats["aborted_at"],
                                              "steps": traj.stats["steps"]}})


COMMANDS = {"verify": cmd_verify, "chain": cmd_chain, "lax": cmd_lax}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--d", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--tau")
    common.add_argument("--g")
    common.add_argument("--flavor", choices=("elliptic", "trigonometric"))
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--out")
    common.add_argument("--deformed", action="store_true")
    common.add_argument("--epsilon", help="'generic', 'degenerate' (mu,0,...) or a comma list")
    common.add_argument("--mu")
    common.add_argument("--quantum", action="store_true")
    common.add_argument("--config")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="rmatrix-cm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, ell.ConfigError, BudgetError) as exc:
        print(f"rmatrix-cm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ell.PoleError as exc:
        print(f"rmatrix-cm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
