"""Fixture ingestion, experiment orchestration and report emission."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .asymptotic import (FIT, STABLE, WINDOW_TOO_SMALL, Experiment, PrimeIdeal, ass_scan,
                         cx_stability_scan, monomial_prime_candidates, socle_series_check)
from .cohomology import ExtComplex, WindowError, naturality_check, operators_commute
from .field_poly import NotHomogeneousError, PolyRing, PolynomialSyntaxError, is_prime
from .graded_ring import ModulePresentation, RingPresentation, quotient_mod_power
from .groebner import ideal_basis, normal_form, spair_residues
from .resolution import default_length, eventual_period_start, verify_complex

log = logging.getLogger(__name__)

PASS, FAIL = "pass", "fail"
COMMANDS = ("gb", "resolve", "ops", "ext", "ass-scan", "cx-scan", "verify")
DEFAULT_WINDOW = {"imax": 6, "nmax": 4, "jmax": 4}
ENV_WINDOW = {"imax": "CIEXT_IMAX", "nmax": "CIEXT_NMAX", "jmax": "CIEXT_JMAX"}


class FixtureError(ValueError):
    """Malformed fixture; ``line``/``column`` point into the JSON text when known."""

    def __init__(self, message: str, source: str = "", line: int | None = None,
                 column: int | None = None):
        where = source
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}" if where else message)
        self.source = source
        self.line = line
        self.column = column


class ValidationError(FixtureError):
    """A fixture parsed but violates a named invariant."""

    def __init__(self, invariant: str, message: str, source: str = ""):
        super().__init__(f"{invariant}: {message}", source)
        self.invariant = invariant


@dataclass
class Fixture:
    name: str
    ring: RingPresentation
    M: ModulePresentation
    N: ModulePresentation
    I: list
    candidates: list
    window: dict
    length: int
    naturality: dict | None = None
    oracle: dict = field(default_factory=dict)
    source: str = ""

    def experiment(self) -> Experiment:
        return Experiment(self.ring, self.M, self.N, self.I, self.candidates, self.length, self.name)


def shipped_fixtures() -> list[str]:
    """Names of the positive fixtures bundled with the package, sorted."""
    root = resources.files("ciext") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _resolve_path(spec: str) -> tuple[str, str]:
    path = Path(spec)
    if path.is_file():
        return str(path), path.read_text()
    name = spec[:-5] if spec.endswith(".json") else spec
    root = resources.files("ciext") / "fixtures"
    for candidate in (root / f"{name}.json", root / "negative" / f"{name}.json"):
        if candidate.is_file():
            return f"{name}.json", candidate.read_text()
    raise FixtureError(f"no such fixture file or shipped fixture: {spec}")


def _locate(text: str, needle: str) -> tuple[int | None, int | None]:
    at = text.find(json.dumps(needle))
    if at < 0:
        return None, None
    line = text.count("\n", 0, at) + 1
    return line, at - (text.rfind("\n", 0, at) + 1) + 2


class _Reader:
    def __init__(self, data: dict, text: str, source: str):
        self.data = data
        self.text = text
        self.source = source

    def require(self, key: str):
        if key not in self.data:
            raise ValidationError("schema", f"missing field {key!r}", self.source)
        return self.data[key]

    def poly(self, Q: PolyRing, s):
        if isinstance(s, int):
            return Q.constant(s)
        if not isinstance(s, str):
            raise ValidationError("schema", f"expected a polynomial string, got {s!r}", self.source)
        try:
            return Q.parse(s)
        except PolynomialSyntaxError as err:
            line, col = _locate(self.text, s)
            if col is not None:
                col += err.column - 1
            raise FixtureError(str(err), self.source, line, col) from err

    def module(self, ring: RingPresentation, spec, what: str) -> ModulePresentation:
        Q = ring.Q
        if spec == "residue_field":
            return ring.residue_field()
        if spec == "free":
            return ring.free()
        if not isinstance(spec, dict):
            raise ValidationError("schema", f"{what}: expected 'residue_field', 'free' or an object",
                                  self.source)
        try:
            if "quotient" in spec:
                return ring.quotient([self.poly(Q, s) for s in spec["quotient"]])
            shifts = [int(s) for s in spec.get("shifts", [0])]
            rels = [[self.poly(Q, s) for s in col] for col in spec.get("relations", [])]
            for col in rels:
                if len(col) != len(shifts):
                    raise ValidationError("schema", f"{what}: relation column of length {len(col)} "
                                          f"for {len(shifts)} generators", self.source)
            return ring.module(shifts, rels)
        except NotHomogeneousError as err:
            raise ValidationError("homogeneous", f"{what}: {err}", self.source) from err


def parse_fixture(text: str, source: str = "<fixture>", overrides: dict | None = None) -> Fixture:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise FixtureError(err.msg, source, err.lineno, err.colno) from err
    if not isinstance(data, dict):
        raise ValidationError("schema", "top level must be an object", source)
    rd = _Reader(data, text, source)
    name = str(data.get("name", Path(source).stem))
    p = int(data.get("prime", 32003))
    if not is_prime(p):
        raise ValidationError("prime", f"{p} is not prime", source)
    names = rd.require("variables")
    degrees = data.get("degrees")
    try:
        Q = PolyRing(names, p, degrees)
    except ValueError as err:
        raise ValidationError("schema", str(err), source) from err
    f = [rd.poly(Q, s) for s in data.get("f", [])]
    try:
        ring = RingPresentation(Q, f)
    except NotHomogeneousError as err:
        raise ValidationError("homogeneous", str(err), source) from err
    except ValueError as err:
        raise ValidationError("regular-sequence", str(err), source) from err
    M = rd.module(ring, rd.require("M"), "M")
    N = rd.module(ring, rd.require("N"), "N")
    I = [rd.poly(Q, s) for s in data.get("I", [])]
    for g in I:
        if not g.is_homogeneous():
            raise ValidationError("homogeneous", f"ideal generator {g} is not homogeneous", source)
    cands = data.get("candidates", "monomial")
    if cands == "monomial":
        candidates = monomial_prime_candidates(ring)
    else:
        candidates = []
        for c in cands:
            try:
                candidates.append(PrimeIdeal(tuple(rd.poly(Q, s) for s in c["generators"]),
                                             c["label"], c.get("certificate", "fixture")))
            except (KeyError, TypeError) as err:
                raise ValidationError("schema", f"bad candidate {c!r}", source) from err
    window = dict(DEFAULT_WINDOW)
    for key, var in ENV_WINDOW.items():
        if os.environ.get(var):
            window[key] = int(os.environ[var])
    window.update({k: int(v) for k, v in data.get("window", {}).items()})
    window.update({k: int(v) for k, v in (overrides or {}).items() if v is not None})
    length = int(data.get("length", default_length(ring.c)))
    if window["imax"] > length - 1:
        raise ValidationError("window", f"imax = {window['imax']} needs a resolution of length "
                              f"{window['imax'] + 1}, fixture truncates at {length}", source)
    if min(window.values()) < 0:
        raise ValidationError("window", "window bounds must be non-negative", source)
    nat = data.get("naturality")
    return Fixture(name, ring, M, N, I, candidates, window, length, nat,
                   data.get("oracle", {}), source)


def load_fixture(path: str, overrides: dict | None = None) -> Fixture:
    source, text = _resolve_path(str(path))
    return parse_fixture(text, source, overrides)


# -- reports -----------------------------------------------------------------------

@dataclass
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class Report:
    fixture: str
    command: str
    window: dict
    sections: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, name: str, status: str, detail: str = "") -> None:
        self.checks.append(Check(name, status, detail))

    @property
    def exit_code(self) -> int:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return 1
        if WINDOW_TOO_SMALL in statuses:
            return 3
        return 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        return cls(d["fixture"], d["command"], dict(d["window"]), d.get("sections", {}),
                   [Check(**c) for c in d.get("checks", [])])


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def _expand_ass_oracle(rules: list, imax: int, nmax: int) -> dict:
    def span(v, top):
        if v == "*" or v is None:
            return range(top + 1)
        if isinstance(v, int):
            return range(v, v + 1)
        lo, hi = v
        return range(lo, (top if hi is None else min(hi, top)) + 1)

    grid = {(i, n): [] for i in range(imax + 1) for n in range(nmax + 1)}
    for rule in rules:
        for i in span(rule.get("i"), imax):
            for n in span(rule.get("n"), nmax):
                grid[(i, n)] = sorted(rule["primes"])
    return grid


def _gb_section(fx: Fixture, report: Report, seed: int) -> None:
    Q = fx.ring.Q
    Gf = ideal_basis(list(fx.ring.f), Q) if fx.ring.f else None
    GI = fx.ring.ideal(fx.I) if fx.I or fx.ring.f else None
    report.sections["gb"] = {
        "f": [str(g) for g in Gf.polynomials()] if Gf else [],
        "I": [str(g) for g in GI.polynomials()] if GI else [],
    }
    bases = [G for G in (Gf, GI) if G is not None]
    report.add("gb-spair-residues", _verdict(all(not any(spair_residues(G)) for G in bases)))
    rng = random.Random(seed)
    ok = True
    for G, gens in ((Gf, list(fx.ring.f)), (GI, list(fx.I) + list(fx.ring.f))):
        if G is None or not gens:
            continue
        top = max(g.degree() for g in gens) + 2
        for _ in range(8):
            total = Q.zero()
            for g in gens:
                for mono in Q.monomials(top - g.degree()):
                    c = rng.randrange(Q.p)
                    if c:
                        total = total + g * Q.monomial(mono, c)
            ok &= not normal_form(total, G)
    report.add("gb-random-membership", _verdict(ok), f"seed {seed}")


def _resolve_section(fx: Fixture, exp: Experiment, report: Report) -> None:
    R = exp.resolution
    report.sections["resolution"] = R.to_json()
    cert = verify_complex(R)
    report.add("resolution-certificate", _verdict(cert.ok),
               "; ".join(f"{v.kind}@{v.spot}" for v in cert.violations))
    if fx.ring.c == 1 and not fx.M.is_zero():
        start = eventual_period_start(R.ranks)
        report.add("resolution-periodic", PASS if start is not None else WINDOW_TOO_SMALL,
                   f"2-periodic from {start}" if start is not None else "")
    if "betti" in fx.oracle:
        want = list(fx.oracle["betti"])
        got = list(R.ranks[:len(want)])
        report.add("oracle-betti", _verdict(got == want), f"got {got}")


def _ops_section(fx: Fixture, exp: Experiment, report: Report) -> None:
    ops = exp.operators
    L = exp.resolution.length
    identity = [ops.identity_holds(i) for i in range(L - 1)] if ops.c else []
    report.sections["operators"] = {"t": ops.to_json(), "identity": identity}
    report.add("eisenbud-identity", _verdict(all(identity)))
    if ops.c >= 2:
        ok = True
        coeffs = [fx.N, fx.ring.residue_field()]
        for D in coeffs:
            X = ExtComplex(exp.resolution, D, ops)
            for i in range(0, L - 4):
                for j in range(1, ops.c + 1):
                    for l in range(j + 1, ops.c + 1):
                        ok &= operators_commute(X, i, j, l)
        report.add("operators-commute", _verdict(ok))


def _ext_section(fx: Fixture, exp: Experiment, report: Report) -> None:
    X = ExtComplex(exp.resolution, fx.N, exp.operators)
    rows = []
    for i in range(fx.window["imax"] + 1):
        E = X.ext(i)
        rows.append({"i": i, "mu": E.mu, "socle_dim": E.socle_dim,
                     "presentation": E.presentation.to_json()})
    report.sections["ext"] = rows


def _ass_section(fx: Fixture, exp: Experiment, report: Report, threads: int) -> None:
    imax, nmax = fx.window["imax"], fx.window["nmax"]
    scan = ass_scan(exp, imax, nmax, threads)
    report.sections["ass"] = scan.to_dict()
    stab = scan.stabilization
    report.add("stabilization", PASS if stab.status == STABLE else WINDOW_TOO_SMALL,
               f"(i0, n0) = ({stab.i0}, {stab.n0})" if stab.status == STABLE else "")
    series = socle_series_check(scan, fx.ring.c, exp.r)
    report.sections["series"] = series.to_dict()
    report.add("socle-series", PASS if series.status == FIT else WINDOW_TOO_SMALL)
    union_ok = set(scan.union) <= {p.label for p in exp.candidates}
    report.add("ass-union-finite", _verdict(union_ok), f"{len(scan.union)} primes")
    orc = fx.oracle
    if "ass" in orc:
        want = _expand_ass_oracle(orc["ass"], imax, nmax)
        bad = [k for k, c in scan.cells.items() if list(c.ass) != want[k]]
        report.add("oracle-ass", _verdict(not bad),
                   "mismatch at " + " ".join(f"{i},{n}" for i, n in sorted(bad)[:8]) if bad else "")
    if "union" in orc:
        report.add("oracle-union", _verdict(list(scan.union) == sorted(orc["union"])))
    if "stabilization" in orc:
        want = orc["stabilization"]
        if stab.status != STABLE:
            report.add("oracle-stabilization", WINDOW_TOO_SMALL)
        else:
            ok = ((stab.i0, stab.n0) == (want["i0"], want["n0"])
                  and list(stab.even) == sorted(want.get("even", []))
                  and list(stab.odd) == sorted(want.get("odd", [])))
            report.add("oracle-stabilization", _verdict(ok), f"got ({stab.i0}, {stab.n0})")
    if "series" in orc:
        if series.status == WINDOW_TOO_SMALL and orc["series"] == FIT:
            report.add("oracle-series", WINDOW_TOO_SMALL)
        else:
            report.add("oracle-series", _verdict(series.status == orc["series"]), series.status)


def _cx_section(fx: Fixture, exp: Experiment, report: Report, threads: int) -> None:
    scan = cx_stability_scan(exp, fx.window["jmax"], fx.window["imax"], threads)
    report.sections["cx"] = scan.to_dict()
    report.add("cx-scan", PASS if scan.status == STABLE else WINDOW_TOO_SMALL,
               f"j* = {scan.jstar}" if scan.jstar is not None else "")
    orc = fx.oracle
    if "cx" in orc and scan.status == WINDOW_TOO_SMALL and any(v is None for _, v in scan.values):
        report.add("oracle-cx", WINDOW_TOO_SMALL)
    elif "cx" in orc:
        # the oracle may list more j than the window covers
        want = [list(v) for v in orc["cx"] if v[0] <= fx.window["jmax"]]
        got = [[j, cx] for j, cx in scan.values][:len(want)]
        report.add("oracle-cx", _verdict(got == want), f"got {[cx for _, cx in scan.values]}")
    if "jstar" in orc:
        if scan.status != STABLE:
            report.add("oracle-jstar", WINDOW_TOO_SMALL)
        else:
            report.add("oracle-jstar", _verdict(scan.jstar == orc["jstar"]), f"got {scan.jstar}")


def _naturality_section(fx: Fixture, exp: Experiment, report: Report) -> None:
    """t_j commutes with Ext(M, u) for u : D1 -> D2.

    Default: u = first generator of I (in I^s, s = 1) from N/I^n N to N/I^(n+s) N
    with n = 1; fixtures may give "u" with levels "n", "s" or explicit "D1", "D2".
    """
    ring, Q = fx.ring, fx.ring.Q
    spec = fx.naturality or {}
    rd = _Reader({}, "", fx.source)
    default_u = str(fx.I[0]) if fx.I else "1"
    u = rd.poly(Q, spec.get("u", default_u))
    n, s = int(spec.get("n", 1)), int(spec.get("s", 1 if fx.I else 0))
    D1 = (rd.module(ring, spec["D1"], "D1") if "D1" in spec
          else quotient_mod_power(fx.N, exp.powers, n, trim=False))
    D2 = (rd.module(ring, spec["D2"], "D2") if "D2" in spec
          else quotient_mod_power(fx.N, exp.powers, n + s, trim=False))
    ops = exp.operators
    if not ops.c:
        return
    results = []
    for i in range(0, min(fx.window["imax"], exp.resolution.length - 3) + 1):
        nat = naturality_check(ops, u, D1, D2, i)
        results.append(nat.ok)
    report.sections["naturality"] = results
    report.add("naturality", _verdict(all(results)))


SECTIONS = {
    "gb": ("gb",),
    "resolve": ("resolve",),
    "ops": ("ops",),
    "ext": ("ext",),
    "ass-scan": ("ass",),
    "cx-scan": ("cx",),
    "verify": ("gb", "resolve", "ops", "naturality", "ass", "cx"),
}


def run_experiment(fx: Fixture, command: str, threads: int = 1, seed: int = 0) -> Report:
    if command not in SECTIONS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    exp = fx.experiment()
    report = Report(fx.name, command, dict(fx.window))
    for part in SECTIONS[command]:
        start = time.perf_counter()
        try:
            if part == "gb":
                _gb_section(fx, report, seed)
            elif part == "resolve":
                _resolve_section(fx, exp, report)
            elif part == "ops":
                _ops_section(fx, exp, report)
            elif part == "ext":
                _ext_section(fx, exp, report)
            elif part == "naturality":
                _naturality_section(fx, exp, report)
            elif part == "ass":
                _ass_section(fx, exp, report, threads)
            elif part == "cx":
                _cx_section(fx, exp, report, threads)
        except WindowError as err:
            report.add(part, WINDOW_TOO_SMALL, str(err))
        # timing goes to the log only, so reports stay byte-identical
        log.info("%s %s: %.3fs", fx.name, part, time.perf_counter() - start)
    return report


# -- emission ----------------------------------------------------------------------

CSV_HEADER = ["fixture", "i", "n", "mu", "socle_dim", "ass_primes"]


def _csv_rows(report: Report):
    for cell in report.sections.get("ass", {}).get("cells", []):
        yield [report.fixture, cell["i"], cell["n"], cell["mu"], cell["socle_dim"],
               ";".join(sorted(cell["ass"]))]


def _markdown(report: Report) -> str:
    out = [f"## {report.fixture} ({report.command})", ""]
    w = report.window
    out.append(f"window: i <= {w.get('imax')}, n <= {w.get('nmax')}, j <= {w.get('jmax')}")
    out.append("")
    out += ["| check | status | detail |", "|---|---|---|"]
    out += [f"| {c.name} | {c.status} | {c.detail} |" for c in report.checks]
    ass = report.sections.get("ass")
    if ass:
        stab = ass["stabilization"]
        i0, n0 = stab.get("i0"), stab.get("n0")
        cells = {(c["i"], c["n"]): c for c in ass["cells"]}
        imax, nmax = ass["window"]["imax"], ass["window"]["nmax"]
        out += ["", "Ass(Ext^i(M, N/I^n N)); bold cells lie in the stable region", ""]
        out.append("| i \\ n | " + " | ".join(str(n) for n in range(nmax + 1)) + " |")
        out.append("|---" * (nmax + 2) + "|")
        for i in range(imax + 1):
            row = []
            for n in range(nmax + 1):
                text = ", ".join(cells[(i, n)]["ass"]) or "-"
                if stab["status"] == STABLE and i >= 2 * i0 and n >= n0:
                    text = f"**{text}**"
                row.append(text)
            out.append(f"| {i} | " + " | ".join(row) + " |")
        out += ["", f"union: {', '.join(ass['union']) or '-'}; stabilization: {stab['status']}"
                + (f" at (i0, n0) = ({i0}, {n0})" if stab["status"] == STABLE else "")]
    cx = report.sections.get("cx")
    if cx:
        out += ["", "cx by j: " + ", ".join(f"{j}:{v}" for j, v in cx["values"])
                + f"; j* = {cx['jstar']} ({cx['status']})"]
    return "\n".join(out) + "\n"


def emit_reports(reports: list[Report], fmt: str) -> bytes:
    if fmt == "json":
        payload: Any = [r.to_dict() for r in reports]
        if len(reports) == 1:
            payload = payload[0]
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerows(_csv_rows(r))
        return buf.getvalue().encode()
    if fmt == "markdown":
        return "\n".join(_markdown(r) for r in reports).encode()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: Report, fmt: str) -> bytes:
    return emit_reports([report], fmt)


def overall_exit(reports: list[Report]) -> int:
    codes = {r.exit_code for r in reports}
    for code in (1, 3):
        if code in codes:
            return code
    return 0
