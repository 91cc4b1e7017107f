"""JSON front end: ``gaudin-oper {solve,verify,spectrum,miura} problem.json``.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 invalid
input, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any

import jsonschema
import numpy as np

from .bethe import (
    BETHE_VECTOR_CAP,
    BetheSolution,
    SolverConfig,
    admissible_color_counts,
    bae_residual,
    bethe_vector,
    colors_from_counts,
    highest_weight_defect,
    solution_weight,
    solve_bae,
)
from .errors import GaudinError, InputError, ResourceCapError
from .gaudin import GaudinProblem, apply_gaudin_hamiltonian, joint_spectrum
from .liealg import Weight, classify_weight_at_infinity, type_a_data
from .opers import (
    INFINITY,
    frobenius_obstruction,
    infinity_consistency,
    miura_oper,
    miura_sl2,
    miura_sln,
    oper_residues,
    predicted_eigenvalues,
    regularity_check,
)
from .ratfun import RationalFunction
from .repmod import irreducible_rep, singular_space, tensor_rep

log = logging.getLogger("gaudin_oper")

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
TENSOR_DIM_CAP = 4000

# verification thresholds
TOL_INVARIANCE = 1e-9
TOL_EIGEN = 1e-8
TOL_REGULAR = 1e-9
TOL_OBSTRUCTION = 1e-9
TOL_RESIDUE_SUM = 1e-10
TOL_BAE = 1e-10

_SCALAR = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_RATFUN = {
    "type": "object",
    "properties": {
        "poles": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"at": _SCALAR, "coeffs": {"type": "array", "items": _SCALAR}},
                "required": ["at", "coeffs"],
                "additionalProperties": False,
            },
        },
        "poly": {"type": "array", "items": _SCALAR},
    },
    "additionalProperties": False,
}
_INT_LIST = {"type": "array", "items": {"type": "integer"}}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema"],
    "properties": {
        "schema": {"const": 1},
        "algebra": {
            "type": "object",
            "properties": {"type": {"const": "A"}, "rank": {"type": "integer", "minimum": 1}},
            "required": ["type", "rank"],
            "additionalProperties": False,
        },
        "points": {"type": "array", "items": _SCALAR, "minItems": 1},
        "weights": {"type": "array", "items": _INT_LIST, "minItems": 1},
        "weight_at_infinity": _INT_LIST,
        "colors": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "mu": _INT_LIST,
        "solver": {
            "type": "object",
            "properties": {
                "seed": {"type": "integer"},
                "starts": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "dedup": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "options": {
            "type": "object",
            "properties": {"perturb": {"type": "number"}},
            "additionalProperties": False,
        },
        "connection": {
            "oneOf": [
                {"type": "object", "properties": {"u": _RATFUN}, "required": ["u"], "additionalProperties": False},
                {
                    "type": "object",
                    "properties": {"eps": {"type": "array", "items": _RATFUN, "minItems": 2}},
                    "required": ["eps"],
                    "additionalProperties": False,
                },
            ]
        },
    },
    "additionalProperties": False,
}


# -- encoding ----------------------------------------------------------------


def enc(x) -> Any:
    """Exact rationals as ``"p/q"``, complex numbers as ``[re, im]``."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, (complex, np.complexfloating)):
        return [_float(x.real), _float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return _float(x)
    if isinstance(x, Weight):
        return [str(c) for c in x.coords]
    if isinstance(x, RationalFunction):
        return {
            "poles": [{"at": enc(p), "coeffs": [enc(c) for c in cs]} for p, cs in x.poles.items()],
            "poly": [enc(c) for c in x.poly],
        }
    if isinstance(x, (list, tuple)):
        return [enc(v) for v in x]
    raise TypeError(f"cannot encode {type(x).__name__}")


def _float(v) -> float | str:
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return str(v)
    return v + 0.0  # no negative zero


def _scalar(v, ptr: str):
    if isinstance(v, list):
        return complex(v[0], v[1])
    try:
        return Fraction(v.replace(" ", "")) if isinstance(v, str) else Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc), ptr) from None


def _ratfun(d: dict, ptr: str) -> RationalFunction:
    poles = {}
    for k, entry in enumerate(d.get("poles", [])):
        at = _scalar(entry["at"], f"{ptr}/poles/{k}/at")
        poles[at] = [_scalar(c, f"{ptr}/poles/{k}/coeffs/{j}") for j, c in enumerate(entry["coeffs"])]
    poly = [_scalar(c, f"{ptr}/poly/{j}") for j, c in enumerate(d.get("poly", []))]
    try:
        return RationalFunction(poles, poly)
    except (ValueError, GaudinError) as exc:
        raise InputError(str(exc), ptr) from None


# -- problem parsing -----------------------------------------------------------


@dataclass
class Problem:
    raw: dict
    gp: GaudinProblem | None
    colors: tuple[int, ...] | None
    mu: Weight | None
    solver: SolverConfig
    perturb: float | None


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def load_problem(doc: Any, command: str, overrides: dict) -> Problem:
    try:
        jsonschema.validate(doc, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(exc.message, _pointer(exc.absolute_path)) from None
    needs = ["connection"] if command == "miura" else ["algebra", "points", "weights"]
    for key in needs:
        if key not in doc:
            raise InputError(f"'{key}' is required for {command}", f"/{key}")

    gp = colors = mu = None
    if command != "miura":
        rank = doc["algebra"]["rank"]
        rd = type_a_data(rank)
        z = [_scalar(v, f"/points/{k}") for k, v in enumerate(doc["points"])]
        if len(doc["weights"]) != len(z):
            raise InputError("need one weight per point", "/weights")
        weights = []
        for k, w in enumerate(doc["weights"]):
            if len(w) != rank or any(c < 0 for c in w):
                raise InputError(f"expected {rank} non-negative integers", f"/weights/{k}")
            weights.append(Weight(w))
        lam_inf = None
        if "weight_at_infinity" in doc:
            w = doc["weight_at_infinity"]
            if len(w) != rank or any(c < 0 for c in w):
                raise InputError(f"expected {rank} non-negative integers", "/weight_at_infinity")
            lam_inf = Weight(w)
        if any(isinstance(x, complex) for x in z):
            z = [complex(x) for x in z]
        try:
            gp = GaudinProblem(rd, tuple(z), tuple(weights), lam_inf)
        except (ValueError, GaudinError) as exc:
            raise InputError(str(exc), "/points") from None
        if "colors" in doc:
            colors = tuple(sorted(doc["colors"]))
            if any(c > rank for c in colors):
                raise InputError(f"colours must lie in 1..{rank}", "/colors")
        if "mu" in doc:
            if len(doc["mu"]) != rank:
                raise InputError(f"expected {rank} integers", "/mu")
            mu = Weight(doc["mu"])

    cfg = SolverConfig(**doc.get("solver", {}))
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    perturb = doc.get("options", {}).get("perturb")
    return Problem(doc, gp, colors, mu, cfg, perturb)


# -- shared pieces -------------------------------------------------------------


class _Tensor:
    """Lazily built tensor product of irreducibles (``None`` above the cap)."""

    def __init__(self, gp: GaudinProblem):
        self.gp = gp
        self._T = None
        self._built = False

    def get(self):
        if not self._built:
            self._built = True
            rd = self.gp.rd
            dim = 1
            for lam in self.gp.weights:
                dim *= rd.weyl_dimension(lam)
            if dim <= TENSOR_DIM_CAP:
                self._T = tensor_rep([irreducible_rep(rd, lam) for lam in self.gp.weights])
        return self._T


def _color_runs(pr: Problem) -> list[tuple[int, ...]]:
    if pr.colors is not None:
        return [pr.colors]
    return [colors_from_counts(n) for n in admissible_color_counts(pr.gp)]


def _classification(gp: GaudinProblem, mu: Weight) -> dict:
    if not mu.is_integral():
        return {"lam_inf": None, "w": None}
    cls = classify_weight_at_infinity(gp.rd, mu)
    if cls is None:
        return {"lam_inf": None, "w": None}
    lam_inf, w = cls
    return {"lam_inf": enc(lam_inf), "w": list(w.word)}


def _solution_record(gp: GaudinProblem, s: BetheSolution) -> dict:
    pred = predicted_eigenvalues(gp, s)
    return {
        "w": enc(list(s.w)),
        "colors": list(s.colors),
        "residual": _float(s.residual),
        "jacobian_cond": _float(s.jacobian_cond),
        "degenerate": s.degenerate,
        "predicted": enc(list(pred.residues)),
        "closed_form": enc(list(pred.closed_form)),
        "closed_form_delta": _float(max((abs(complex(a) - complex(b)) for a, b in zip(pred.residues, pred.closed_form)), default=0.0)),
    }


def _collision_record(s: BetheSolution) -> dict:
    return {"w": enc(list(s.w)), "colors": list(s.colors), "residual": _float(s.residual)}


def _singular_dim(T, mu: Weight) -> int | None:
    if T is None or not mu.is_dominant_integral():
        return None if T is None else 0
    return len(singular_space(T, mu))


# -- commands --------------------------------------------------------------------


def cmd_solve(pr: Problem) -> tuple[dict, bool]:
    gp = pr.gp
    pc = gp.to_complex()
    tensor = _Tensor(gp)
    runs = []
    total = 0
    for colors in _color_runs(pr):
        mu = solution_weight(gp, colors)
        res = solve_bae(pc, colors, pr.solver)
        dim = _singular_dim(tensor.get(), mu)
        total += len(res)
        runs.append(
            {
                "colors": list(colors),
                "weight": enc(mu),
                "classification": _classification(gp, mu),
                "singular_dim": dim,
                "count": len(res),
                "count_exceeds_dim": dim is not None and len(res) > dim,
                "starts_converged": res.converged_starts,
                "starts_total": res.total_starts,
                "solutions": [_solution_record(pc, s) for s in res],
                "collisions": [_collision_record(s) for s in res.collisions],
            }
        )
    ok = not any(r["count_exceeds_dim"] for r in runs)
    return {"command": "solve", "runs": runs, "summary": {"solutions": total, "ok": ok}}, ok


def _best_oracle_delta(pred: tuple, spectrum) -> tuple[float, list | None]:
    best, match = math.inf, None
    for ev in spectrum.eigenvalues:
        scale = max(1.0, max(abs(complex(v)) for v in ev.values))
        d = max(abs(complex(a) - complex(b)) for a, b in zip(pred, ev.values)) / scale
        if d < best:
            best, match = d, list(ev.values)
    return best, match


def _verify_solution(gp: GaudinProblem, s: BetheSolution, T, spectrum) -> dict:
    checks: dict[str, dict] = {}

    def check(name, value, limit):
        checks[name] = {"value": _float(value), "tol": limit, "pass": bool(value < limit)}

    if s.m:
        check("bae_residual", max(abs(complex(r)) for r in bae_residual(gp, s)), TOL_BAE)
    o = miura_oper(gp, s)
    pred = predicted_eigenvalues(gp, s)
    check("residue_sum", abs(sum(complex(r) for r in pred.residues)), TOL_RESIDUE_SUM)
    if s.m:
        check("regularity", max(regularity_check(o, w).max_singular for w in s.w), TOL_REGULAR)
    if gp.rd.rank == 1:
        worst = 0.0
        for zi, lam in zip(gp.z, gp.weights):
            ob = frobenius_obstruction(o, zi, int(lam[0]))
            worst = max(worst, max(abs(complex(v)) for v in ob))
        check("monodromy_obstruction", worst, TOL_OBSTRUCTION)
    inf_ok = infinity_consistency(gp, s, o)[0]
    checks["infinity"] = {"pass": bool(inf_ok)}
    record = {"w": enc(list(s.w)), "colors": list(s.colors), "predicted": enc(list(pred.residues))}
    if T is not None and s.m <= BETHE_VECTOR_CAP:
        phi = bethe_vector(gp, s, T)
        check("invariance", highest_weight_defect(T, phi), TOL_INVARIANCE)
        norm = np.linalg.norm(phi)
        worst = 0.0
        for i in range(gp.N):
            xi = apply_gaudin_hamiltonian(gp, T, i, phi)
            worst = max(worst, float(np.linalg.norm(xi - complex(pred.residues[i]) * phi) / norm))
        check("eigenvector", worst, TOL_EIGEN)
    if spectrum is not None:
        delta, match = _best_oracle_delta(pred.residues, spectrum)
        record["oracle"] = enc(match) if match is not None else None
        check("oracle_delta", delta, TOL_EIGEN)
    record["checks"] = checks
    record["pass"] = all(c["pass"] for c in checks.values())
    return record


def cmd_verify(pr: Problem) -> tuple[dict, bool]:
    gp = pr.gp
    pc = gp.to_complex()
    tensor = _Tensor(gp)
    runs = []
    all_ok = True
    for colors in _color_runs(pr):
        mu = solution_weight(gp, colors)
        res = solve_bae(pc, colors, pr.solver)
        T = tensor.get()
        spectrum = joint_spectrum(gp, T, mu) if T is not None and mu.is_dominant_integral() else None
        records = []
        for s in res:
            if pr.perturb and s.m:
                s = s.perturbed(0, pr.perturb)
            records.append(_verify_solution(pc, s, T, spectrum))
        dim = spectrum.dimension if spectrum is not None else None
        count_ok = dim is None or len(res) <= dim
        ok = count_ok and all(r["pass"] for r in records)
        all_ok &= ok
        runs.append(
            {
                "colors": list(colors),
                "weight": enc(mu),
                "classification": _classification(gp, mu),
                "singular_dim": dim,
                "count": len(res),
                "count_ok": count_ok,
                "solutions": records,
                "collisions": [_collision_record(s) for s in res.collisions],
                "pass": ok,
            }
        )
    return {"command": "verify", "perturb": pr.perturb, "runs": runs, "summary": {"ok": all_ok}}, all_ok


def cmd_spectrum(pr: Problem) -> tuple[dict, bool]:
    gp = pr.gp
    T = _Tensor(gp).get()
    if T is None:
        raise ResourceCapError(f"tensor product exceeds dimension cap {TENSOR_DIM_CAP}")
    if pr.mu is not None:
        weights = [pr.mu]
    elif pr.colors is not None:
        weights = [solution_weight(gp, pr.colors)]
    else:
        weights = [solution_weight(gp, colors_from_counts(n)) for n in admissible_color_counts(gp)]
    blocks = []
    for mu in weights:
        rec = joint_spectrum(gp, T, mu, seed=pr.solver.seed)
        blocks.append(
            {
                "weight": enc(mu),
                "dimension": rec.dimension,
                "eigenvalues": [
                    {
                        "values": enc(list(e.values)),
                        "multiplicity": e.multiplicity,
                        "residuals": [_float(r) for r in e.residuals],
                        "jordan": e.jordan,
                    }
                    for e in rec.eigenvalues
                ],
            }
        )
    return {"command": "spectrum", "blocks": blocks}, True


def _as_lambda(c) -> int | None:
    """``lam >= 0`` with ``lam (lam + 2)/4 = c`` if it is an integer."""
    cc = complex(c)
    if abs(cc.imag) > 1e-12:
        return None
    root = -1 + math.sqrt(max(0.0, 1 + 4 * cc.real))
    lam = round(root)
    if lam >= 0 and abs(lam * (lam + 2) / 4 - cc.real) < 1e-9:
        return lam
    return None


def cmd_miura(pr: Problem) -> tuple[dict, bool]:
    conn = pr.raw["connection"]
    try:
        if "u" in conn:
            o = miura_sl2(_ratfun(conn["u"], "/connection/u"))
        else:
            o = miura_sln([_ratfun(u, f"/connection/eps/{k}") for k, u in enumerate(conn["eps"])])
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc), "/connection") from None
    points = []
    locs = sorted({x for vk in o.v for x in vk.locations}, key=lambda x: (complex(x).real, complex(x).imag))
    for x in locs + [INFINITY]:
        rec = oper_residues(o, x)
        entry = {
            "point": "infinity" if x is INFINITY else enc(x),
            "laurent": [{str(k): enc(c) for k, c in sorted(d.items())} for d in rec.laurent],
            "exponents": enc(list(rec.exponents)),
        }
        if o.rank == 2:
            entry["c"] = enc(rec.c)
            entry["mu"] = enc(rec.mu)
            lam = _as_lambda(rec.c) if x is not INFINITY else None
            if lam is not None:
                entry["lam"] = lam
                entry["obstruction"] = enc(frobenius_obstruction(o, x, lam))
        points.append(entry)
    report = {"command": "miura", "rank": o.rank, "v": [enc(vk) for vk in o.v]}
    if o.rank == 2:
        report["projective"] = enc(o.projective)
    report["points"] = points
    return report, True


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "spectrum": cmd_spectrum, "miura": cmd_miura}


# -- entry point -----------------------------------------------------------------


def _pretty(report: dict) -> str:
    lines = [f"# {report['command']}"]
    for run in report.get("runs", []):
        lines.append(
            f"colors={run['colors']} mu={run['weight']} found={run['count']} dim={run['singular_dim']}"
            + (f" pass={run['pass']}" if "pass" in run else "")
        )
        for s in run["solutions"]:
            w = ", ".join(f"{re:+.6g}{im:+.6g}i" for re, im in s["w"])
            lines.append(f"  w=[{w}]  theta={s['predicted']}")
    for b in report.get("blocks", []):
        lines.append(f"mu={b['weight']} dim={b['dimension']}")
        for e in b["eigenvalues"]:
            lines.append(f"  {e['values']} x{e['multiplicity']}")
    for pt in report.get("points", []):
        lines.append(f"{pt['point']}: {pt.get('c', '')} {pt.get('mu', '')} exps={pt['exponents']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaudin-oper", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("file", help="problem file (JSON); '-' reads stdin")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol", type=float, help="solver convergence tolerance")
    ap.add_argument("--starts", type=int)
    ap.add_argument("--perturb", type=float, help="shift the first Bethe root before verifying")
    ap.add_argument("--pretty", action="store_true", help="also print a table to stderr")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _emit(doc: dict, out: str | None):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.file == "-":
            doc = json.load(sys.stdin)
        else:
            with open(args.file, encoding="utf-8") as fh:
                doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"schema": 1, "error": {"pointer": "", "message": str(exc)}}, args.out)
        return EXIT_INPUT
    try:
        pr = load_problem(doc, args.command, {"seed": args.seed, "tol": args.tol, "starts": args.starts})
        if args.perturb is not None:
            pr.perturb = args.perturb
        report, ok = COMMANDS[args.command](pr)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"schema": 1, "error": {"pointer": exc.pointer, "message": str(exc)}}, args.out)
        return EXIT_INPUT
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        _emit({"schema": 1, "error": {"pointer": "", "message": str(exc)}}, args.out)
        return EXIT_CAP
    report = {"schema": 1, **report}
    _emit(report, args.out)
    if args.pretty:
        print(_pretty(report), file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
