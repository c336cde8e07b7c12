"""File formats: site JSON, scenario YAML, query YAML, and check dispatch.

Sites serialize as ``{"events": [[id, t, x], ...], "covers": [[a, b], ...],
"cone_slope": s}`` with nulls for coordinate-free events.  Scenario files
are YAML documents naming a lattice, a tensor layout, regions, measurement
assignments (via named-operator expressions or dense row-major complex
pairs), dynamics, an initial state, a seed and a list of checks.  All
references are resolved and validated before any computation runs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import oplib
from .errors import SchemaError
from .foliation import two_foliation_report
from .harness import (
    Assignment,
    Scenario,
    check_sorkin_dichotomy,
    detect_signalling,
    run_sorkin,
    sorkin_phase_sweep,
    verify_no_signalling,
    verify_povm_commutation,
    verify_spacelike_commutation,
)
from .quantum import DensityOperator, MeasurementFamily, PureState
from .reports import VerificationReport
from .site import (
    CausalSite,
    Region,
    build_diamond_lattice,
    causal_future,
    causal_past,
    chronological_future,
    chronological_past,
    domain_of_dependence,
    future_boundary,
    is_acausal,
    is_cauchy_slice,
    is_spacelike_separated,
    past_boundary,
    spatial_reflection,
    strict_causal_future,
    strict_causal_past,
    verify_boundary_covariance,
    verify_boundary_properties,
)


# ----------------------------------------------------------------------
# Site files


def site_to_dict(site: CausalSite) -> dict:
    events = []
    for i in range(site.n):
        c = site.coords_of(i)
        events.append([i, None, None] if c is None else [i, c[0], c[1]])
    return {
        "events": events,
        "covers": [list(p) for p in site.cover_pairs],
        "cone_slope": site.cone_slope,
    }


def site_from_dict(doc: dict) -> CausalSite:
    try:
        events = doc["events"]
        covers = doc["covers"]
        slope = doc.get("cone_slope")
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"site document missing field: {exc}")
    ids = [e[0] for e in events]
    if sorted(ids) != list(range(len(ids))):
        raise SchemaError("event ids must be the contiguous range 0..n-1")
    coords = [None] * len(events)
    for i, t, x in events:
        coords[i] = None if t is None else (t, x)
    if all(c is None for c in coords):
        coords = None
    return CausalSite.from_covers(
        len(events), [(a, b) for a, b in covers], coords, slope
    )


def save_site(site: CausalSite, path) -> None:
    Path(path).write_text(json.dumps(site_to_dict(site), sort_keys=True) + "\n")


def load_site(path) -> CausalSite:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno)
    return site_from_dict(doc)


# ----------------------------------------------------------------------
# Operator and state expressions


_CALL_RE = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*(?:\((.*)\))?\s*$", re.I)


def _split_args(argstr: str) -> list[str]:
    args, depth, cur = [], 0, ""
    for ch in argstr:
        if ch == "," and depth == 0:
            args.append(cur.strip())
            cur = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur += ch
    if cur.strip():
        args.append(cur.strip())
    return args


def parse_operator_expr(expr) -> np.ndarray:
    """Resolve a named-operator expression or a dense row-major matrix."""
    if isinstance(expr, dict) and "matrix" in expr:
        return _parse_matrix(expr["matrix"])
    if not isinstance(expr, str):
        raise SchemaError(f"operator expression must be a string or dense matrix, got {expr!r}")
    m = _CALL_RE.match(expr)
    if not m:
        raise SchemaError(f"cannot parse operator expression {expr!r}")
    name, argstr = m.group(1), m.group(2)
    args = _split_args(argstr) if argstr else []
    try:
        if name == "pauli_x":
            return oplib.pauli_x()
        if name == "pauli_y":
            return oplib.pauli_y()
        if name == "pauli_z":
            return oplib.pauli_z()
        if name == "hadamard":
            return oplib.hadamard()
        if name == "identity":
            return oplib.identity(int(args[0]) if args else 2)
        if name == "clock":
            return oplib.clock(int(args[0]))
        if name == "shift":
            return oplib.shift(int(args[0]))
        if name == "cnot":
            return oplib.cnot()
        if name == "controlled_phase":
            return oplib.controlled_phase(float(args[0]))
        if name == "projector":
            return oplib.projector(args[0], int(args[1]))
    except (IndexError, ValueError, KeyError) as exc:
        raise SchemaError(f"bad arguments in operator expression {expr!r}: {exc}")
    raise SchemaError(f"unknown operator {name!r}")


def parse_family_expr(expr) -> MeasurementFamily:
    """A measurement family: named expression or dense Kraus list."""
    if isinstance(expr, dict) and "kraus" in expr:
        return MeasurementFamily(tuple(_parse_matrix(k) for k in expr["kraus"]))
    if not isinstance(expr, str):
        raise SchemaError(f"family expression must be a string or dense kraus list")
    m = _CALL_RE.match(expr)
    if not m:
        raise SchemaError(f"cannot parse family expression {expr!r}")
    name, argstr = m.group(1), m.group(2)
    args = _split_args(argstr) if argstr else []
    try:
        if name == "projective":
            return oplib.projective_family(args[0] if args else "z")
        if name == "weak":
            axis = args[1] if len(args) > 1 else "z"
            return oplib.weak_family(float(args[0]), axis)
        if name == "unitary":
            return oplib.unitary_family(parse_operator_expr(args[0]))
    except (IndexError, ValueError, KeyError) as exc:
        raise SchemaError(f"bad arguments in family expression {expr!r}: {exc}")
    raise SchemaError(f"unknown family {name!r}")


def _parse_matrix(rows) -> np.ndarray:
    """Row-major complex pairs: [[[re, im], ...], ...]."""
    try:
        arr = np.array(
            [[complex(c[0], c[1]) for c in row] for row in rows], dtype=complex
        )
    except (TypeError, IndexError) as exc:
        raise SchemaError(f"dense matrices must be rows of [re, im] pairs: {exc}")
    return arr


def _parse_vector(entries) -> np.ndarray:
    try:
        return np.array([complex(c[0], c[1]) for c in entries], dtype=complex)
    except (TypeError, IndexError) as exc:
        raise SchemaError(f"dense vectors must be lists of [re, im] pairs: {exc}")


def parse_state(spec, dim: int):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError("initial_state needs a 'kind' of pure or density")
    kind = spec["kind"]
    if kind == "pure":
        if "name" in spec:
            return _named_state(spec["name"], dim)
        if "data" in spec:
            v = _parse_vector(spec["data"])
            return PureState(v / np.linalg.norm(v))
        raise SchemaError("pure state needs 'name' or 'data'")
    if kind == "density":
        if "data" in spec:
            return DensityOperator(_parse_matrix(spec["data"]))
        raise SchemaError("density state needs 'data'")
    raise SchemaError(f"unknown state kind {kind!r}")


def _named_state(name: str, dim: int) -> PureState:
    m = _CALL_RE.match(name)
    if not m:
        raise SchemaError(f"cannot parse state name {name!r}")
    base, argstr = m.group(1), m.group(2)
    args = _split_args(argstr) if argstr else []
    if base == "bell_phi_plus":
        if dim != 4:
            raise SchemaError("bell_phi_plus needs total dimension 4")
        return oplib.bell_phi_plus()
    if base == "basis":
        k = int(args[0]) if args else 0
        if not 0 <= k < dim:
            raise SchemaError(f"basis({k}) outside dimension {dim}")
        return oplib.basis_state(k, dim)
    if base == "plus_n":
        n = int(args[0]) if args else 1
        if 2 ** n != dim:
            raise SchemaError(f"plus_n({n}) needs total dimension {2 ** n}, got {dim}")
        return oplib.uniform_superposition(dim)
    if base == "uniform":
        return oplib.uniform_superposition(dim)
    raise SchemaError(f"unknown state {name!r}")


# ----------------------------------------------------------------------
# Scenario files


@dataclass
class LoadedScenario:
    name: str
    seed: int
    scenario: Scenario
    regions: dict[str, Region]
    checks: list[dict]
    doc: dict = None  # the validated document: the canonical serialized form


def load_scenario(path) -> LoadedScenario:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise SchemaError(f"invalid YAML: {exc.problem}", line=line)
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a mapping")
    return scenario_from_dict(doc)


def save_scenario(loaded: LoadedScenario, path) -> None:
    """Write the validated document back out; load(save(x)) == x."""
    Path(path).write_text(yaml.safe_dump(loaded.doc, sort_keys=True))


def _resolve_region(site: CausalSite, spec, name: str) -> Region:
    if isinstance(spec, dict) and "rect" in spec:
        rect = spec["rect"]
        try:
            t0, t1 = rect["t"]
            x0, x1 = rect["x"]
        except (KeyError, TypeError, ValueError):
            raise SchemaError(f"region {name!r}: rect needs t: [a,b] and x: [c,d]")
        pts = [(t, x) for t in range(t0, t1 + 1) for x in range(x0, x1 + 1)]
        return Region.from_coords(site, pts)
    if isinstance(spec, dict) and "ids" in spec:
        return Region(site, frozenset(int(i) for i in spec["ids"]))
    if isinstance(spec, dict) and "events" in spec:
        try:
            return Region.from_coords(site, [(t, x) for t, x in spec["events"]])
        except KeyError as exc:
            raise SchemaError(f"region {name!r}: {exc}")
    raise SchemaError(f"region {name!r} needs 'events', 'ids' or 'rect'")


def _parse_mode(spec) -> tuple[str, Optional[int]]:
    if isinstance(spec, str):
        m = _CALL_RE.match(spec)
        if m and m.group(1) == "selective" and m.group(2) is not None:
            return "selective", int(m.group(2))
        if spec in ("nonselective", "probe"):
            return spec, None
        raise SchemaError(f"unknown assignment mode {spec!r}")
    if isinstance(spec, dict) and "selective" in spec:
        return "selective", int(spec["selective"])
    raise SchemaError(f"unknown assignment mode {spec!r}")


def scenario_from_dict(doc: dict) -> LoadedScenario:
    name = doc.get("name", "scenario")
    if "seed" not in doc:
        raise SchemaError("scenario must carry a seed (0 is allowed)")
    seed = int(doc["seed"])

    lat = doc.get("lattice")
    if not isinstance(lat, dict):
        raise SchemaError("scenario needs a lattice: {T, L, cone_slope}")
    try:
        site = build_diamond_lattice(
            int(lat["T"]), int(lat["L"]), int(lat.get("cone_slope", 2))
        )
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"bad lattice spec: {exc}")

    factors = tuple(int(d) for d in doc.get("factors", [2]))
    dim = int(np.prod(factors))

    regions: dict[str, Region] = {}
    factors_of: dict[str, Optional[int]] = {}
    for rspec in doc.get("regions", []):
        rname = rspec.get("name")
        if not rname:
            raise SchemaError("every region needs a name")
        regions[rname] = _resolve_region(site, rspec, rname)
        f = rspec.get("factor")
        if f is not None and not (0 <= int(f) < len(factors)):
            raise SchemaError(f"region {rname!r}: factor {f} outside layout")
        factors_of[rname] = None if f is None else int(f)

    assignments = []
    for aspec in doc.get("assignments", []):
        rname = aspec.get("region")
        if rname not in regions:
            raise SchemaError(f"assignment references unknown region {rname!r}")
        family = parse_family_expr(aspec.get("family"))
        mode, outcome = _parse_mode(aspec.get("mode", "nonselective"))
        assignments.append(
            Assignment(
                regions[rname], family, mode, outcome, factors_of[rname], rname
            )
        )

    dynamics: dict[int, np.ndarray] = {}
    for dspec in doc.get("dynamics", []):
        k = int(dspec["from_level"])
        if int(dspec.get("to_level", k + 1)) != k + 1:
            raise SchemaError("dynamics entries must map level k to k+1")
        op = parse_operator_expr(dspec["unitary"])
        f = dspec.get("factor")
        if f is not None:
            from .quantum import embed

            op = embed(op, int(f), factors)
        if op.shape != (dim, dim):
            raise SchemaError(f"dynamics at step {k}: operator is not full-dimension")
        dynamics[k] = op

    initial = parse_state(doc.get("initial_state"), dim)

    scenario = Scenario(
        site=site,
        factor_dims=factors,
        assignments=tuple(assignments),
        dynamics=dynamics,
        initial=initial,
        name=name,
    )

    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise SchemaError("checks must be a list")
    for c in checks:
        _validate_check(c, scenario, regions)
    return LoadedScenario(name, seed, scenario, regions, checks, doc)


_CHECKS = (
    "two_foliations",
    "spacelike_commutation",
    "povm_bosonic",
    "no_signalling",
    "detect_signalling",
    "sorkin",
    "sorkin_sweep",
    "sorkin_dichotomy",
    "boundary_properties",
    "boundary_covariance",
)


def _validate_check(c: dict, scenario: Scenario, regions: dict[str, Region]) -> None:
    if not isinstance(c, dict) or "check" not in c:
        raise SchemaError(f"each check needs a 'check' name: {c!r}")
    kind = c["check"]
    if kind not in _CHECKS:
        raise SchemaError(f"unknown check {kind!r}")
    assigned = {a.name for a in scenario.assignments}
    def need_region(key):
        if c.get(key) not in regions:
            raise SchemaError(f"check {kind!r}: unresolved region {c.get(key)!r}")
    def need_assignment(key):
        if c.get(key) not in assigned:
            raise SchemaError(f"check {kind!r}: unresolved assignment {c.get(key)!r}")
    if kind == "two_foliations":
        need_region("u"), need_region("v")
    elif kind in ("spacelike_commutation", "povm_bosonic"):
        need_assignment("u"), need_assignment("v")
    elif kind in ("no_signalling", "detect_signalling"):
        need_assignment("sender"), need_assignment("probe")
    elif kind in ("sorkin", "sorkin_sweep"):
        need_assignment("sender"), need_assignment("mediator"), need_assignment("probe")
    elif kind == "sorkin_dichotomy":
        for key in ("m1", "m2", "m3"):
            parse_operator_expr(c.get(key))
    expected = c.get("expect", "pass")
    if expected not in ("pass", "fail", "signalling"):
        raise SchemaError(f"check {kind!r}: unknown expectation {expected!r}")


def run_checks(
    loaded: LoadedScenario, tol_scale: float = 1.0
) -> list[VerificationReport]:
    """Execute every requested check, deterministically in the given seed."""
    import time

    rng = np.random.default_rng(loaded.seed)
    scn = loaded.scenario
    out: list[VerificationReport] = []
    for c in loaded.checks:
        t0 = time.perf_counter()
        kind = c["check"]
        if kind == "two_foliations":
            rep = two_foliation_report(
                scn.site, loaded.regions[c["u"]], loaded.regions[c["v"]]
            )
        elif kind == "spacelike_commutation":
            rep = verify_spacelike_commutation(
                scn, c["u"], c["v"], int(c.get("m", 0)), int(c.get("n", 0)),
                tol_scale=tol_scale, rng=rng,
            )
        elif kind == "povm_bosonic":
            rep = verify_povm_commutation(
                scn, c["u"], c["v"], int(c.get("m", 0)), int(c.get("n", 0)),
                tol_scale=tol_scale,
            )
        elif kind == "no_signalling":
            rep = verify_no_signalling(
                scn, c["sender"], c["probe"], tol_scale=tol_scale
            )
        elif kind == "detect_signalling":
            tv, p, q = detect_signalling(scn, c["sender"], c["probe"])
            expect_tv = c.get("expect_tv")
            tol = 1e-10 * tol_scale
            ok = abs(tv - float(expect_tv)) <= tol if expect_tv is not None else tv < tol
            rep = VerificationReport(
                check="detect_signalling",
                passed=ok,
                scenario=scn.name,
                evidence={"tv_distance": tv, "probe_with": p.tolist(),
                          "probe_without": q.tolist()},
                tolerances={"tv": tol},
            )
        elif kind == "sorkin":
            rep = run_sorkin(scn, c["sender"], c["mediator"], c["probe"])
        elif kind == "sorkin_sweep":
            thetas = [float(t) for t in c.get("thetas", [0, np.pi / 4, np.pi / 2, np.pi])]
            rep = sorkin_phase_sweep(
                scn, c["sender"], c["mediator"], c["probe"], thetas
            )
        elif kind == "sorkin_dichotomy":
            rep = check_sorkin_dichotomy(
                parse_operator_expr(c["m1"]),
                parse_operator_expr(c["m2"]),
                parse_operator_expr(c["m3"]),
            )
            rep.scenario = scn.name
            want = c.get("expect_verdict")
            if want is not None:
                rep.passed = rep.passed and rep.evidence.get("verdict") == want
                rep.evidence["expected_verdict"] = want
        elif kind == "boundary_properties":
            rep = _random_region_battery(scn.site, rng, int(c.get("num_regions", 100)),
                                         covariance=False)
        elif kind == "boundary_covariance":
            rep = _random_region_battery(scn.site, rng, int(c.get("num_regions", 100)),
                                         covariance=True)
        else:  # pragma: no cover - guarded by _validate_check
            raise SchemaError(f"unknown check {kind!r}")
        rep.scenario = scn.name
        rep.check = kind  # records carry the requested check name
        rep.runtime_ms = int((time.perf_counter() - t0) * 1000)
        out.append(rep)
    return out


def _random_region_battery(
    site: CausalSite, rng: np.random.Generator, num: int, covariance: bool
) -> VerificationReport:
    iso = spatial_reflection(site) if covariance else None
    failures = 0
    for _ in range(num):
        size = int(rng.integers(1, max(2, site.n // 3)))
        members = frozenset(int(i) for i in rng.choice(site.n, size, replace=False))
        region = Region(site, members)
        if covariance:
            rep = verify_boundary_covariance(site, iso, region)
        else:
            rep = verify_boundary_properties(site, region)
        failures += 0 if rep.passed else 1
    return VerificationReport(
        check="boundary_covariance" if covariance else "boundary_properties",
        passed=failures == 0,
        evidence={"num_regions": num, "failures": failures},
        tolerances={},
    )


def bundled_scenarios() -> dict[str, Path]:
    """Name -> path of the scenario corpus shipped with the package."""
    root = Path(__file__).parent / "scenarios"
    return {p.stem: p for p in sorted(root.glob("*.yaml"))}


# ----------------------------------------------------------------------
# Causal query files


_QUERY_OPS = (
    "causal_future", "causal_past", "strict_causal_future", "strict_causal_past",
    "chronological_future", "chronological_past", "domain_of_dependence",
    "future_boundary", "past_boundary", "spacelike", "acausal", "cauchy",
)


def load_queries(path) -> list[dict]:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise SchemaError(f"invalid YAML: {exc.problem}", line=line)
    if doc is None:
        return []
    if not isinstance(doc, dict) or not isinstance(doc.get("queries", []), list):
        raise SchemaError("query document must carry a 'queries' list")
    return doc.get("queries", [])


def _query_region(site: CausalSite, spec, label: str) -> Region:
    if spec is None:
        raise SchemaError(f"query is missing the {label!r} region")
    try:
        if isinstance(spec, list):
            if spec and isinstance(spec[0], list):
                return Region.from_coords(site, [(t, x) for t, x in spec])
            return Region(site, frozenset(int(i) for i in spec))
        return _resolve_region(site, spec, label)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad region in query ({label}): {exc}")


def run_query(site: CausalSite, q: dict) -> VerificationReport:
    op = q.get("op")
    if op not in _QUERY_OPS:
        raise SchemaError(f"unknown causal query op {op!r}")
    if op in ("spacelike",):
        u = _query_region(site, q.get("u"), "u")
        v = _query_region(site, q.get("v"), "v")
        got: Any = is_spacelike_separated(site, u, v)
    elif op in ("acausal", "cauchy"):
        r = _query_region(site, q.get("region"), "region")
        if op == "acausal":
            got = is_acausal(site, r)
        else:
            try:
                got = is_cauchy_slice(site, r)
            except ValueError as exc:
                raise SchemaError(f"cauchy query needs an acausal region: {exc}")
    else:
        r = _query_region(site, q.get("region"), "region")
        fn = {
            "causal_future": causal_future,
            "causal_past": causal_past,
            "strict_causal_future": strict_causal_future,
            "strict_causal_past": strict_causal_past,
            "chronological_future": chronological_future,
            "chronological_past": chronological_past,
            "future_boundary": future_boundary,
            "past_boundary": past_boundary,
        }.get(op)
        if fn is not None:
            got = sorted(fn(site, r).members)
        else:
            direction = q.get("direction", "both")
            got = sorted(domain_of_dependence(site, r, direction).members)

    evidence = {"op": op, "result": got}
    passed = True
    if "expect" in q:
        want = q["expect"]
        if isinstance(got, bool):
            passed = got == bool(want)
        else:
            want_region = _query_region(site, want, "expect")
            passed = set(got) == want_region.members
            evidence["expected"] = sorted(want_region.members)
    return VerificationReport(check=f"query_{op}", passed=passed, evidence=evidence)


def run_queries(site: CausalSite, queries: list[dict]) -> list[VerificationReport]:
    return [run_query(site, q) for q in queries]
