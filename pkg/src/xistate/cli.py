"""Command-line entry point.

Every command prints one JSON document (or CSV table) carrying ``"schema"``.
Exit status: 0 success, 1 validation failure, 2 structural or IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .category import CategoryError, PointedXiFusion, builtin_category, pushforward
from .cocycle import CrossedCocycle3, builtin_cocycle, check_cocycle, derive_group_cocycle
from .groups import StructuralError
from .labeling import (
    LabelingError,
    XiLabeling,
    enumerate_labelings,
    orbits,
    pointed_orbits_and_stabilizers,
    validate_labeling,
)
from .scalar import Scalar
from .skeleton import (
    BUILTIN_TRIANGULATIONS,
    CombSkeleton,
    SkeletonError,
    Triangulation,
    builtin_triangulation,
    homology_h1,
    lens_skeleton,
    s1xs2_skeleton,
    skeleton_from_triangulation,
    validate_triangulation,
)
from .statesum import StateSumError, dw_oracle, lens_invariant, lens_labeling, pushforward_check, state_sum
from .xmod import CrossedModule, XModMorphism, builtin_morphism, builtin_xmod, validate_crossed_module

SCHEMA_VERSION = "1.0"


def report_schema_version() -> str:
    return SCHEMA_VERSION


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int = 2) -> None:
        super().__init__(message)
        self.code, self.message, self.status = code, message, status


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "json"
    jobs: int = 1
    cyclotomic_order: int = 1

    def __post_init__(self) -> None:
        if self.cyclotomic_order < 1:
            raise CliError("config", "cyclotomic order must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise CliError("config", f"unknown format {self.fmt!r}")


@dataclass
class Result:
    status: int
    doc: dict
    rows: list[dict] = field(default_factory=list)


# loaders -------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError("io", f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError("schema", f"{path}: not JSON ({exc.msg} at line {exc.lineno})") from exc


def _schema(path: str, fn: Callable[[], object]):
    try:
        return fn()
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise CliError("schema", f"{path}: missing or malformed field ({exc})") from exc


def load_xmod(sel: Optional[str]) -> CrossedModule:
    if sel is None:
        raise CliError("usage", "--xmod is required")
    if Path(sel).suffix == ".json" or Path(sel).exists():
        doc = _read_json(sel)
        return _schema(sel, lambda: CrossedModule.from_json(doc))
    try:
        return builtin_xmod(sel)
    except KeyError as exc:
        raise CliError("unknown-xmod", str(exc.args[0])) from exc


def load_morphism(sel: str) -> XModMorphism:
    if Path(sel).suffix == ".json" or Path(sel).exists():
        doc = _read_json(sel)
        return _schema(sel, lambda: XModMorphism.from_json(doc))
    try:
        return builtin_morphism(sel)
    except KeyError as exc:
        raise CliError("unknown-morphism", str(exc.args[0])) from exc


def load_cocycle(sel: Optional[str], cm: CrossedModule) -> Optional[CrossedCocycle3]:
    if sel is None:
        return None
    if Path(sel).suffix == ".json" or Path(sel).exists():
        doc = _read_json(sel)
        return _schema(sel, lambda: CrossedCocycle3.from_json(cm, doc))
    try:
        return builtin_cocycle(sel, cm)
    except KeyError as exc:
        raise CliError("unknown-cocycle", str(exc.args[0])) from exc


def load_triangulation(sel: str) -> Triangulation:
    name = sel[4:] if sel.startswith("tri:") else sel
    if name in BUILTIN_TRIANGULATIONS:
        return builtin_triangulation(name)
    doc = _read_json(sel)
    return _schema(sel, lambda: Triangulation.from_json(doc))


def load_skeleton(sel: Optional[str]) -> CombSkeleton:
    """``lens:p,q``, ``s1xs2``, a triangulation name (optionally ``tri:``), or a JSON file."""
    if sel is None:
        raise CliError("usage", "--skeleton is required")
    if sel.startswith("lens:"):
        try:
            p, q = (int(x) for x in sel[5:].split(","))
        except ValueError as exc:
            raise CliError("usage", f"bad lens selector {sel!r}; expected lens:p,q") from exc
        return lens_skeleton(p, q)
    if sel == "s1xs2":
        return s1xs2_skeleton()
    name = sel[4:] if sel.startswith("tri:") else sel
    if name in BUILTIN_TRIANGULATIONS:
        return skeleton_from_triangulation(builtin_triangulation(name))
    doc = _read_json(sel)
    if "tets" in doc:
        return skeleton_from_triangulation(_schema(sel, lambda: Triangulation.from_json(doc)))
    return _schema(sel, lambda: CombSkeleton.from_json(doc))


def load_category(spec: str, cm: Optional[CrossedModule], cocycle: Optional[str]) -> PointedXiFusion:
    """``kG``, ``EH-vect``, ``xi-vect`` or ``pushforward:<morphism>[:<kind>]``."""
    if spec.startswith("pushforward:"):
        rest = spec[len("pushforward:"):]
        mname, _, kind = rest.partition(":") if not Path(rest).exists() else (rest, "", "")
        m = load_morphism(mname)
        base = builtin_category(kind or "kG", m.source, load_cocycle(cocycle, m.source))
        return pushforward(m, base)
    if cm is None:
        raise CliError("usage", "--xmod is required for this category")
    return builtin_category(spec, cm, load_cocycle(cocycle, cm))


def _labeling_cm(args: dict) -> CrossedModule:
    """The crossed module labels live over: the category's when one is given."""
    spec = args.get("category")
    if spec and spec.startswith("pushforward:"):
        rest = spec[len("pushforward:"):]
        mname = rest if Path(rest).exists() else rest.partition(":")[0]
        target = load_morphism(mname).target
        if args.get("xmod") and load_xmod(args["xmod"]).to_json() != target.to_json():
            raise CliError("xmod-mismatch", "--xmod differs from the target of the push-forward morphism")
        return target
    return load_xmod(args.get("xmod"))


def _select_orbits(P: CombSkeleton, cm: CrossedModule, args: dict):
    if args.get("labeling"):
        doc = _read_json(args["labeling"])
        L = _schema(args["labeling"], lambda: XiLabeling.from_json(doc))
        bad = validate_labeling(P, cm, L)
        if bad:
            raise CliError(bad[0].axiom, bad[0].message, 1)
        return [(None, L)]
    labelings = enumerate_labelings(P, cm)
    obs = pointed_orbits_and_stabilizers(P, cm, labelings) if args.get("pointed") else orbits(P, cm, labelings)
    k = args.get("labeling_orbit")
    if k is not None:
        if not 0 <= k < len(obs):
            raise CliError("usage", f"orbit index {k} out of range (0..{len(obs) - 1})")
        return [(k, obs[k].representative)]
    return [(i, o.representative) for i, o in enumerate(obs)]


def _in_order(s: Scalar, n: int) -> Scalar:
    """Re-express ``s`` in Q(zeta_n); n must be a multiple of the scalar's order."""
    if n == 1 or n == s.order:
        return s
    if n % s.order:
        raise CliError("cyclotomic-order", f"value lives in Q(zeta_{s.order}), not in Q(zeta_{n})")
    return s.lift(n)


def _scalar_cell(s: Scalar) -> str:
    return str(s.to_fraction()) if s.is_rational() else json.dumps(s.to_json()["coeffs"])


# commands --------------------------------------------------------------------


def cmd_validate_xmod(a: dict) -> Result:
    cm = load_xmod(a.get("file") or a.get("xmod"))
    bad = validate_crossed_module(cm)
    doc = {"valid": not bad, "violations": [v.to_json() for v in bad], "E_order": cm.E.order, "H_order": cm.H.order}
    return Result(1 if bad else 0, doc, [{"valid": not bad, "violations": len(bad)}])


def cmd_validate_cocycle(a: dict) -> Result:
    cm = load_xmod(a.get("xmod"))
    if not a.get("cocycle"):
        raise CliError("usage", "--cocycle is required")
    w = load_cocycle(a["cocycle"], cm)
    bad = check_cocycle(w)
    doc = {"valid": not bad, "order": w.order, "violations": [v.to_json() for v in bad]}
    return Result(1 if bad else 0, doc, [{"valid": not bad, "violations": len(bad)}])


def cmd_labelings(a: dict) -> Result:
    P, cm = load_skeleton(a.get("skeleton")), load_xmod(a.get("xmod"))
    Ls = enumerate_labelings(P, cm)
    doc = {"skeleton": P.name, "count": len(Ls), "labelings": [L.to_json() for L in Ls]}
    rows = [{"index": i, "alpha": json.dumps(L.alpha), "beta": json.dumps(L.beta)} for i, L in enumerate(Ls)]
    return Result(0, doc, rows)


def cmd_orbits(a: dict) -> Result:
    P, cm = load_skeleton(a.get("skeleton")), load_xmod(a.get("xmod"))
    Ls = enumerate_labelings(P, cm)
    obs = pointed_orbits_and_stabilizers(P, cm, Ls) if a.get("pointed") else orbits(P, cm, Ls)
    doc = {"skeleton": P.name, "pointed": bool(a.get("pointed")), "labelings": len(Ls), "orbits": [o.to_json(Ls) for o in obs]}
    rows = [
        {"orbit": i, "size": len(o.members), "stabilizer_order": o.stabilizer if o.stabilizer is not None else "", "alpha": json.dumps(o.representative.alpha)}
        for i, o in enumerate(obs)
    ]
    return Result(0, doc, rows)


def _invariant_job(job: tuple) -> dict:
    a, L_doc = job
    P = load_skeleton(a.get("skeleton"))
    C = load_category(a["category"], None if a["category"].startswith("pushforward:") else load_xmod(a.get("xmod")), a.get("cocycle"))
    rep = state_sum(P, XiLabeling.from_json(L_doc), C, trace=bool(a.get("trace")))
    return rep.to_json()


def cmd_invariant(a: dict, jobs: int = 1) -> Result:
    if not a.get("category"):
        raise CliError("usage", "--category is required")
    P = load_skeleton(a.get("skeleton"))
    cm = _labeling_cm(a)
    C = load_category(a["category"], cm, a.get("cocycle"))
    sel = _select_orbits(P, cm, a)
    work = [(a, L.to_json()) for _, L in sel]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_invariant_job, work))
    else:
        reports = [state_sum(P, L, C, trace=bool(a.get("trace"))).to_json() for _, L in sel]
    results = []
    rows = []
    for (k, L), rep in zip(sel, reports):
        value = _in_order(Scalar.from_json(rep["normalized"]), a.get("cyclotomic_order", 1))
        rep["normalized"] = value.to_json()
        results.append({"orbit": k, "labeling": L.to_json(), "value": str(value), **rep})
        rows.append({"orbit": "" if k is None else k, "value": _scalar_cell(value)})
    doc = {"skeleton": P.name, "category": C.name, "results": results}
    return Result(0, doc, rows)


def cmd_lens(a: dict) -> Result:
    p, q = a.get("p"), a.get("q")
    if p is None or q is None:
        raise CliError("usage", "--p and --q are required")
    cm = _labeling_cm(a)
    C = load_category(a.get("category") or "kG", cm, a.get("cocycle"))
    P = lens_skeleton(p, q)
    if a.get("h") is not None:
        pairs = [(a["h"], a.get("e") or 0)]
    else:
        pairs = [(L.alpha[0], L.beta[0][0]) for L in enumerate_labelings(P, cm)]
    results, rows, status = [], [], 0
    for h, e in pairs:
        L = lens_labeling(cm, p, h, e)
        if validate_labeling(P, cm, L):
            raise CliError("invalid-labeling", f"(h, e) = ({h}, {e}) is not a lens-space labeling", 1)
        fast = _in_order(lens_invariant(p, q, h, e, C), a.get("cyclotomic_order", 1))
        full = state_sum(P, L, C).normalized
        status = status or int(fast != full)
        results.append({"h": h, "e": e, "trace_formula": fast.to_json(), "state_sum": full.to_json(), "equal": fast == full, "value": str(fast)})
        rows.append({"h": h, "e": e, "value": _scalar_cell(fast), "equal": fast == full})
    return Result(status, {"p": p, "q": q, "category": C.name, "results": results}, rows)


def cmd_pushforward_check(a: dict) -> Result:
    if not a.get("morphism"):
        raise CliError("usage", "--morphism is required")
    m = load_morphism(a["morphism"])
    P = load_skeleton(a.get("skeleton"))
    C = builtin_category(a.get("category") or "kG", m.source)
    obs = pointed_orbits_and_stabilizers(P, m.target)
    k = a.get("labeling_orbit")
    chosen = [k] if k is not None else range(len(obs))
    results, rows, status = [], [], 0
    for i in chosen:
        if not 0 <= i < len(obs):
            raise CliError("usage", f"orbit index {i} out of range")
        r = pushforward_check(P, m, C, obs[i].representative)
        status = status or int(not r.equal)
        results.append({"orbit": i, **r.to_json()})
        rows.append({"orbit": i, "lhs": _scalar_cell(r.lhs), "rhs": _scalar_cell(r.rhs), "equal": r.equal})
    return Result(status, {"skeleton": P.name, "morphism": a["morphism"], "results": results}, rows)


def cmd_dw_check(a: dict) -> Result:
    t = load_triangulation(a.get("triangulation") or a.get("skeleton") or "")
    cm = load_xmod(a.get("xmod"))
    if cm.E.order != 1:
        raise CliError("dw-needs-trivial-E", "the E = 1 oracle needs a crossed module with trivial E")
    w = load_cocycle(a.get("cocycle"), cm)
    C = builtin_category("kG", cm, w)
    if w is None:
        import numpy as np

        tilde, order = np.zeros((cm.H.order,) * 3, dtype=np.int64), 1
    else:
        tilde, order = derive_group_cocycle(w), w.order
    P = skeleton_from_triangulation(t)
    results, rows, status = [], [], 0
    for i, o in enumerate(orbits(P, cm)):
        L = o.representative
        ss = state_sum(P, L, C).normalized
        dw = dw_oracle(t, cm.H, tilde, order, L.alpha)
        eq = ss == dw.value
        # the oracle's simplex ordering may describe the mirror manifold
        mirror = ss == dw.value.conjugate()
        status = status or int(not (eq or mirror))
        results.append(
            {"orbit": i, "alpha": list(L.alpha), "state_sum": ss.to_json(), "oracle": dw.to_json(), "equal": eq, "equal_mirror": mirror}
        )
        rows.append({"orbit": i, "state_sum": _scalar_cell(ss), "oracle": _scalar_cell(dw.value), "equal": eq, "equal_mirror": mirror})
    return Result(status, {"triangulation": t.name, "results": results}, rows)


def cmd_homology(a: dict) -> Result:
    sel = a.get("builtin") or a.get("file") or a.get("skeleton")
    if not sel:
        raise CliError("usage", "--builtin or --file is required")
    t = load_triangulation(sel)
    rep = validate_triangulation(t)
    if not rep.valid:
        return Result(1, {"valid": False, "violations": [v.to_json() for v in rep.violations]})
    h1 = homology_h1(t)
    return Result(0, {"triangulation": t.name, "valid": True, "h1": h1.to_json(), "h1_text": str(h1)}, [{"rank": h1.rank, "torsion": json.dumps(list(h1.torsion))}])


COMMANDS: dict[str, Callable[..., Result]] = {
    "validate-xmod": cmd_validate_xmod,
    "validate-cocycle": cmd_validate_cocycle,
    "labelings": cmd_labelings,
    "orbits": cmd_orbits,
    "invariant": cmd_invariant,
    "lens": cmd_lens,
    "pushforward-check": cmd_pushforward_check,
    "dw-check": cmd_dw_check,
    "homology": cmd_homology,
}


def run(config: RunConfig) -> tuple[int, dict, list[dict]]:
    if config.command not in COMMANDS:
        raise CliError("unknown-command", f"unknown command {config.command!r}")
    fn = COMMANDS[config.command]
    res = fn(config.options, config.jobs) if config.command == "invariant" else fn(config.options)
    doc = {"schema": SCHEMA_VERSION, "command": config.command, **res.doc}
    return res.status, doc, res.rows


def render(doc: dict, rows: Sequence[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema: {doc['schema']}\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    elif "error" in doc:
        buf.write("code,message\n")
        csv.writer(buf, lineterminator="\n").writerow([doc["error"]["code"], doc["error"]["message"]])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xistate", description="State sums for 3-manifolds with maps to crossed-module classifying spaces.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--xmod")
        sp.add_argument("--cocycle")
        sp.add_argument("--category")
        sp.add_argument("--skeleton")
        sp.add_argument("--triangulation")
        sp.add_argument("--morphism")
        sp.add_argument("--labeling")
        sp.add_argument("--labeling-orbit", type=int, dest="labeling_orbit")
        sp.add_argument("--pointed", action="store_true")
        sp.add_argument("--trace", action="store_true")
        sp.add_argument("--file")
        sp.add_argument("--builtin")
        sp.add_argument("--p", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--h", type=int)
        sp.add_argument("--e", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--cyclotomic-order", type=int, default=1, dest="cyclotomic_order")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "format", "jobs")}
    fmt = ns.format
    try:
        config = RunConfig(ns.command, opts, ns.out, fmt, ns.jobs, ns.cyclotomic_order)
        status, doc, rows = run(config)
    except CliError as exc:
        status, rows = exc.status, []
        doc = {"schema": SCHEMA_VERSION, "command": ns.command, "error": {"code": exc.code, "message": exc.message}}
    except (StructuralError, SkeletonError, LabelingError, StateSumError, CategoryError) as exc:
        status, rows = 2, []
        doc = {"schema": SCHEMA_VERSION, "command": ns.command, "error": {"code": type(exc).__name__, "message": str(exc)}}
    text = render(doc, rows, fmt)
    if ns.out:
        try:
            Path(ns.out).write_text(text)
        except OSError as exc:
            sys.stderr.write(f"cannot write {ns.out}: {exc}\n")
            return 2
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
