"""TOML fixture files: surfaces, cylinders, curves, annuli and experiment roles.

See README.md for the grammar.  Numbers are exact: integers or strings
"p/q".  Loading validates everything and raises ValidationFailure listing
every failed check by element name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .bounds import Annulus, annulus_geometry
from .curves import CurveClass, curve_paths, develop_curve
from .errors import FlatteichError, ParseError, ValidationFailure
from .exact import Vec, cross, to_number, vadd, vsub
from .surface import Check, Cylinder, Diagnostics, FlatSurface, Pairing, validate

ROLES = ("beta1", "beta2", "gamma1", "gamma2", "A1", "A2")


@dataclass(frozen=True)
class Fixture:
    name: str
    surface: FlatSurface
    diagnostics: Diagnostics
    curves: Dict[str, CurveClass] = field(default_factory=dict)
    annuli: Dict[str, Annulus] = field(default_factory=dict)
    roles: Dict[str, str] = field(default_factory=dict)
    path: Optional[str] = None


@dataclass
class FixtureReport:
    fixture: Optional[Fixture]
    checks: List[Check]

    @property
    def ok(self) -> bool:
        return self.fixture is not None and all(c.ok for c in self.checks)

    @property
    def problems(self) -> List[str]:
        return [f"{c.name}: {c.detail}" if c.detail else c.name for c in self.checks if not c.ok]


def builtin_path(name: str) -> Path:
    """Path of a fixture shipped with the package (``torus``, ``genus2_slit``, ...)."""
    fname = name if name.endswith(".toml") else name + ".toml"
    return Path(str(resources.files("flatteich") / "data" / fname))


def resolve(path_or_name: Union[str, Path]) -> Path:
    p = Path(path_or_name)
    if p.exists():
        return p
    b = builtin_path(str(path_or_name))
    if b.exists():
        return b
    raise FileNotFoundError(f"no fixture file or built-in fixture named {path_or_name!r}")


# -- parsing helpers --------------------------------------------------------

def _num(x, where: str):
    try:
        return to_number(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: {x!r} is not a number (use an integer or a 'p/q' string)") from None


def _vec(x, where: str) -> Vec:
    if not isinstance(x, list) or len(x) != 2:
        raise ParseError(f"{where}: expected a 2-vector, got {x!r}")
    return (_num(x[0], where), _num(x[1], where))


def _edge(x, where: str) -> Tuple[int, int]:
    if not isinstance(x, list) or len(x) != 2 or not all(isinstance(i, int) for i in x):
        raise ParseError(f"{where}: expected [polygon, edge], got {x!r}")
    return (x[0], x[1])


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ParseError(f"{where}: missing '{key}'")
    return d[key]


def _place(d, where: str) -> Tuple[int, Vec]:
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected {{ polygon = i, point = [x, y] }}")
    poly = _need(d, "polygon", where)
    if not isinstance(poly, int):
        raise ParseError(f"{where}: polygon index must be an integer")
    return poly, _vec(_need(d, "point", where), where)


def parse_text(text: str, source: str = "<string>") -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        line = getattr(exc, "lineno", None) or (m.group(1) if m else None)
        if line is None:
            # errors at end of input carry no position; the last line is the culprit
            line = len(text.rstrip("\n").splitlines()) or 1
        raise ParseError(f"{source}: line {line}: {exc}") from None


# -- building ------------------------------------------------------------------

def _surface(doc: dict, name: str) -> FlatSurface:
    polys = []
    for i, p in enumerate(doc.get("polygon", [])):
        edges = _need(p, "edges", f"polygon {i}")
        polys.append(tuple(_vec(e, f"polygon {i} edge {j}") for j, e in enumerate(edges)))
    if not polys:
        raise ParseError(f"{name}: no [[polygon]] entries")
    pairs = []
    for i, p in enumerate(doc.get("pairing", [])):
        w = f"pairing {i}"
        sgn = p.get("sign", 1)
        if sgn not in (1, -1):
            raise ParseError(f"{w}: sign must be 1 (translation) or -1 (half-turn)")
        pairs.append(Pairing(_edge(_need(p, "a", w), w), _edge(_need(p, "b", w), w), sgn))
    cyls = []
    for i, c in enumerate(doc.get("cylinder", [])):
        w = f"cylinder {c.get('id', i)}"
        anchor = _place(c["core_anchor"], w + " core_anchor") if "core_anchor" in c else None
        cyls.append(Cylinder(
            id=str(_need(c, "id", w)),
            core_holonomy=(_num(_need(c, "circumference", w), w), _num(0, w)),
            height=_num(_need(c, "height", w), w),
            polygons=tuple(int(x) for x in c.get("polygons", [])),
            core_anchor=anchor,
            crossing_edges=tuple(_edge(e, w) for e in c.get("crossing_edges", [])),
        ))
    return FlatSurface(tuple(polys), tuple(pairs), tuple(cyls), name=name)


def _inside_quads(path_pieces, quads) -> bool:
    """Every curve piece lies in one strip piece (endpoints may touch its boundary)."""
    from .bounds import _strictly_inside

    def closed_inside(q, x):
        n = len(q)
        sides = [cross(vsub(q[(i + 1) % n], q[i]), vsub(x, q[i])) for i in range(n)]
        return all(v >= 0 for v in sides) or all(v <= 0 for v in sides)

    for pc in path_pieces:
        mid = ((pc.start[0] + pc.end[0]) / 2, (pc.start[1] + pc.end[1]) / 2)
        if not any(poly == pc.polygon and _strictly_inside(q, mid) and closed_inside(q, pc.start)
                   and closed_inside(q, pc.end) for poly, q in quads):
            return False
    return True


def build(doc: dict, name: str, path: Optional[str] = None) -> FixtureReport:
    """Construct and validate a fixture from a parsed TOML document."""
    checks: List[Check] = []
    s = _surface(doc, name)
    diag = validate(s)
    checks.extend(diag.checks)
    if not diag.ok:
        return FixtureReport(None, checks)
    try:
        s = s.with_cores()
    except FlatteichError as exc:
        checks.append(Check("cylinder cores develop", False, str(exc)))
        return FixtureReport(None, checks)

    curves: Dict[str, CurveClass] = {}
    raw_curves = {}
    for i, c in enumerate(doc.get("curve", [])):
        w = f"curve {c.get('name', i)}"
        cname = str(_need(c, "name", w))
        poly, pt = _place(_need(c, "start", w), w + " start")
        segs = [_vec(v, f"{w} segment {j}") for j, v in enumerate(_need(c, "segments", w))]
        try:
            g = develop_curve(s, cname, poly, pt, segs, bool(c.get("taut", False)), c.get("core_of"))
        except FlatteichError as exc:
            checks.append(Check(f"{w}: closes on the surface", False, str(exc)))
            continue
        checks.append(Check(f"{w}: closes on the surface", True))
        curves[cname] = g
        raw_curves[cname] = (poly, pt, segs)
        if "crossings" in c:
            want = {k: int(v) for k, v in c["crossings"].items()}
            got = {k: v for k, v in g.crossings.items() if v}
            checks.append(Check(f"{w}: declared crossings", {k: v for k, v in want.items() if v} == got,
                                f"computed {got}"))
        if g.taut:
            from .curves import _monotone
            checks.append(Check(f"{w}: taut chain is crossing-monotone", _monotone(g.holonomies())))
        if g.core_of is not None:
            try:
                cyl = s.cylinder(g.core_of)
                net = (0, 0)
                for v in g.holonomies():
                    net = vadd(net, v)
                ok = net == cyl.core_holonomy and not g.crossings.get(g.core_of, 0)
                checks.append(Check(f"{w}: is the core of {g.core_of}", ok, f"holonomy {net}"))
            except FlatteichError as exc:
                checks.append(Check(f"{w}: is the core of {g.core_of}", False, str(exc)))

    annuli: Dict[str, Annulus] = {}
    for i, a in enumerate(doc.get("annulus", [])):
        w = f"annulus {a.get('name', i)}"
        aname = str(_need(a, "name", w))
        cname = str(_need(a, "curve", w))
        poly, pt = _place(_need(a, "start", w), w + " start")
        ann = Annulus(aname, cname, poly, pt, _vec(_need(a, "vector", w), w), _num(_need(a, "width", w), w),
                      tuple(str(x) for x in a.get("avoids", [])))
        try:
            ann = annulus_geometry(s, ann)
        except FlatteichError as exc:
            checks.append(Check(f"{w}: embedded", False, str(exc)))
            continue
        checks.append(Check(f"{w}: embedded and misses {list(ann.avoids)}", True))
        if cname not in raw_curves:
            checks.append(Check(f"{w}: surrounds curve {cname}", False, "unknown curve"))
            continue
        cp, cpt, csegs = raw_curves[cname]
        g = curves[cname]
        net = (0, 0)
        for v in g.holonomies():
            net = vadd(net, v)
        inside = _inside_quads([pc for p in curve_paths(s, cp, cpt, csegs, cname) for pc in p.pieces], ann.quads)
        checks.append(Check(f"{w}: surrounds curve {cname}", inside and net == ann.vector,
                            f"inside={inside}, holonomy {net} vs {ann.vector}"))
        annuli[aname] = ann

    roles = {}
    exp = doc.get("experiment")
    if exp is not None:
        for r in ROLES:
            if r not in exp:
                checks.append(Check(f"experiment role {r}", False, "missing"))
                continue
            roles[r] = str(exp[r])
            pool = annuli if r.startswith("A") else curves
            checks.append(Check(f"experiment role {r} -> {roles[r]}", roles[r] in pool))
        if all(r in roles for r in ROLES) and all(roles[r] in curves for r in ROLES[:4]):
            b1, b2, g1, g2 = (curves[roles[r]] for r in ROLES[:4])
            c1, c2 = b1.core_of, b2.core_of
            checks.append(Check("beta1, beta2 are disjoint cores", c1 is not None and c2 is not None and c1 != c2
                                and not b1.crossings.get(c2, 0) and not b2.crossings.get(c1, 0)))
            if c1 and c2:
                checks.append(Check("gamma1 crosses beta1 only", bool(g1.crossings.get(c1)) and not g1.crossings.get(c2)))
                checks.append(Check("gamma2 crosses beta2 only", bool(g2.crossings.get(c2)) and not g2.crossings.get(c1)))
                checks.append(Check("Q cylinders have equal moduli", s.cylinder(c1).modulus == s.cylinder(c2).modulus))
    fx = Fixture(name, s, diag, curves, annuli, roles, path)
    return FixtureReport(fx, checks)


def validate_fixture(path_or_name) -> FixtureReport:
    p = resolve(path_or_name)
    doc = parse_text(p.read_text(), str(p))
    name = str(doc.get("name", p.stem))
    try:
        return build(doc, name, str(p))
    except ParseError:
        raise
    except FlatteichError as exc:
        return FixtureReport(None, [Check(type(exc).__name__, False, str(exc))])


def load_fixture(path_or_name) -> Fixture:
    rep = validate_fixture(path_or_name)
    if not rep.ok:
        raise ValidationFailure(rep.problems or ["fixture could not be built"])
    return rep.fixture


def loads_fixture(text: str, name: str = "inline") -> Fixture:
    doc = parse_text(text, name)
    rep = build(doc, str(doc.get("name", name)))
    if not rep.ok:
        raise ValidationFailure(rep.problems or ["fixture could not be built"])
    return rep.fixture
