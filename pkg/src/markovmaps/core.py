"""Exact geometry of piecewise-affine Markov multi-maps on [0, 1].

Every coordinate is a :class:`fractions.Fraction`; nothing in this module
touches floating point.  A multi-map is described by a partition of the unit
interval and a list of branch symbols of three kinds:

* ``A0`` ("interval"): an affine homeomorphism from one partition cell onto
  a range ``[u, v]`` with endpoints in the partition,
* ``A1`` ("vertical"): a vertical segment ``{p} x [u, v]``,
* ``A2`` ("point"): a single graph point ``(p, q)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

A0, A1, A2 = "A0", "A1", "A2"
CLASSES = (A0, A1, A2)
INCREASING, DECREASING = "increasing", "decreasing"

# file-format class tags
CLASS_TAGS = {"interval": A0, "vertical": A1, "point": A2}
TAG_OF_CLASS = {v: k for k, v in CLASS_TAGS.items()}

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")

Point = tuple  # (x, y) pair of Fractions


class SpecError(ValueError):
    """A spec document could not be parsed; ``location`` says where."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


class ParametrizationError(ValueError):
    pass


def rational(value, location: str = "value") -> Fraction:
    """Parse ``"p/q"``, an integer string, an int or a Fraction."""
    if isinstance(value, bool):
        raise SpecError(location, f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL_RE.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise SpecError(location, f"zero denominator in {value!r}") from None
    raise SpecError(location, f"not a rational: {value!r}")


def fmt(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True, order=True)
class ExactInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, p) -> "ExactInterval":
        return cls(Fraction(p), Fraction(p))

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_open(self, x) -> bool:
        """Membership in the interior; a degenerate interval is its own interior."""
        if self.degenerate:
            return x == self.lo
        return self.lo < x < self.hi

    def issubset(self, other: "ExactInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __str__(self):
        if self.degenerate:
            return "{%s}" % self.lo
        return f"[{self.lo}, {self.hi}]"


def merge_intervals(intervals: Iterable[ExactInterval]) -> tuple:
    """Union of closed intervals as a sorted tuple of disjoint closed intervals."""
    out: list[ExactInterval] = []
    for iv in sorted(intervals):
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = ExactInterval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return tuple(out)


def in_union(x, intervals: Iterable[ExactInterval]) -> bool:
    return any(x in iv for iv in intervals)


@dataclass(frozen=True)
class AffineBranch:
    """``x -> slope * x + intercept`` restricted to ``domain``."""

    slope: Fraction
    intercept: Fraction
    domain: ExactInterval

    def __call__(self, x) -> Fraction:
        if x not in self.domain:
            raise ValueError(f"{x} outside domain {self.domain}")
        return self.slope * x + self.intercept

    def image(self, iv: Optional[ExactInterval] = None) -> ExactInterval:
        iv = self.domain if iv is None else iv
        a, b = self(iv.lo), self(iv.hi)
        return ExactInterval(min(a, b), max(a, b))

    def after(self, inner: "AffineBranch") -> "AffineBranch":
        """The composite ``self o inner`` on ``inner.domain``."""
        if not inner.image().issubset(self.domain):
            raise ValueError("composition leaves the outer domain")
        return AffineBranch(
            self.slope * inner.slope,
            self.slope * inner.intercept + self.intercept,
            inner.domain,
        )

    def fixed_point(self) -> Optional[Fraction]:
        """Exact fixed point, or None when there is none or it is not unique."""
        if self.slope == 1:
            return None
        p = self.intercept / (1 - self.slope)
        return p if p in self.domain else None


def affine_onto(domain: ExactInterval, target: ExactInterval, increasing: bool) -> AffineBranch:
    """The unique affine map of ``domain`` onto ``target`` with the given orientation."""
    if domain.degenerate:
        return AffineBranch(Fraction(0), target.lo, domain)
    slope = target.length / domain.length
    if increasing:
        return AffineBranch(slope, target.lo - slope * domain.lo, domain)
    return AffineBranch(-slope, target.hi + slope * domain.lo, domain)


@dataclass(frozen=True)
class BranchSymbol:
    name: str
    cls: str
    domain: ExactInterval
    range: ExactInterval
    orientation: Optional[str] = None

    @property
    def branch(self) -> AffineBranch:
        """Forward branch ``f_a``; only meaningful for A0 symbols."""
        if self.cls != A0:
            raise ValueError(f"{self.name} is not an interval branch")
        return affine_onto(self.domain, self.range, self.orientation == INCREASING)

    @property
    def inverse(self) -> AffineBranch:
        """Inverse branch ``g_a`` on ``R(a)``; constant for A1 and A2 symbols."""
        if self.cls == A0:
            return affine_onto(self.range, self.domain, self.orientation == INCREASING)
        return AffineBranch(Fraction(0), self.domain.lo, self.range)

    def open_domain_contains(self, x) -> bool:
        return self.domain.contains_open(x)

    def open_range_contains(self, y) -> bool:
        return self.range.contains_open(y)

    def closed_graph_contains(self, x, y) -> bool:
        if x not in self.domain:
            return False
        if self.cls == A0:
            return self.branch(x) == y
        return y in self.range

    def open_graph_contains(self, x, y) -> bool:
        if self.cls == A0:
            return self.domain.contains_open(x) and self.branch(x) == y
        if self.cls == A1:
            return x == self.domain.lo and self.range.contains_open(y)
        return x == self.domain.lo and y == self.range.lo

    def arc_endpoints(self) -> list:
        """Endpoints of the arc ``G(a)``; empty for point symbols."""
        if self.cls == A0:
            f = self.branch
            lo, hi = self.domain.lo, self.domain.hi
            return [(lo, f(lo)), (hi, f(hi))]
        if self.cls == A1:
            p = self.domain.lo
            return [(p, self.range.lo), (p, self.range.hi)]
        return []


@dataclass(frozen=True)
class MarkovMultiMap:
    partition: tuple
    symbols: tuple
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "partition", tuple(Fraction(p) for p in self.partition))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")
        object.__setattr__(self, "_by_name", {s.name: s for s in self.symbols})

    def __getitem__(self, name: str) -> BranchSymbol:
        return self._by_name[name]

    @property
    def alphabet(self) -> tuple:
        return tuple(s.name for s in self.symbols)

    def of_class(self, *classes: str) -> tuple:
        return tuple(s.name for s in self.symbols if s.cls in classes)

    @property
    def cells(self) -> list:
        p = self.partition
        return [ExactInterval(p[i], p[i + 1]) for i in range(len(p) - 1)]

    def without(self, *names: str) -> "MarkovMultiMap":
        return replace(self, symbols=tuple(s for s in self.symbols if s.name not in names))

    def with_symbols(self, symbols: Sequence[BranchSymbol]) -> "MarkovMultiMap":
        return replace(self, symbols=tuple(symbols))


# --------------------------------------------------------------------------
# documents

def _interval_field(value, location: str) -> ExactInterval:
    if isinstance(value, (list, tuple)):
        if len(value) == 1:
            q = rational(value[0], location)
            return ExactInterval(q, q)
        if len(value) != 2:
            raise SpecError(location, "expected a rational or a pair of rationals")
        lo, hi = rational(value[0], f"{location}[0]"), rational(value[1], f"{location}[1]")
        if lo > hi:
            raise SpecError(location, f"interval endpoints out of order: {lo} > {hi}")
        return ExactInterval(lo, hi)
    q = rational(value, location)
    return ExactInterval(q, q)


def parse_spec(document) -> MarkovMultiMap:
    """Build a multi-map from a parsed JSON document.

    Only the document structure is checked here; the Markov axioms are left
    to :func:`validate_definition`.
    """
    if not isinstance(document, dict):
        raise SpecError("$", "document must be an object")
    if "partition" not in document:
        raise SpecError("$", "missing 'partition'")
    raw_partition = document["partition"]
    if not isinstance(raw_partition, list):
        raise SpecError("$.partition", "must be a list")
    partition = tuple(rational(v, f"$.partition[{i}]") for i, v in enumerate(raw_partition))
    raw_symbols = document.get("symbols", [])
    if not isinstance(raw_symbols, list):
        raise SpecError("$.symbols", "must be a list")
    symbols = []
    seen = set()
    for i, raw in enumerate(raw_symbols):
        loc = f"$.symbols[{i}]"
        if not isinstance(raw, dict):
            raise SpecError(loc, "symbol must be an object")
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise SpecError(f"{loc}.name", "missing or empty name")
        if name in seen:
            raise SpecError(f"{loc}.name", f"duplicate symbol name {name!r}")
        seen.add(name)
        tag = raw.get("class")
        if tag not in CLASS_TAGS:
            raise SpecError(f"{loc}.class", f"unknown class tag {tag!r}")
        for key in ("domain", "range"):
            if key not in raw:
                raise SpecError(loc, f"missing {key!r}")
        domain = _interval_field(raw["domain"], f"{loc}.domain")
        rng = _interval_field(raw["range"], f"{loc}.range")
        orientation = raw.get("orientation")
        if orientation is not None and orientation not in (INCREASING, DECREASING):
            raise SpecError(f"{loc}.orientation", f"unknown orientation {orientation!r}")
        symbols.append(BranchSymbol(name, CLASS_TAGS[tag], domain, rng, orientation))
    notes = document.get("notes", ())
    if isinstance(notes, str):
        notes = (notes,)
    return MarkovMultiMap(partition, tuple(symbols), tuple(notes))


def _interval_doc(iv: ExactInterval, degenerate_as_scalar: bool):
    if iv.degenerate and degenerate_as_scalar:
        return fmt(iv.lo)
    return [fmt(iv.lo), fmt(iv.hi)]


def to_document(mm: MarkovMultiMap) -> dict:
    """Canonical JSON-ready document; inverse of :func:`parse_spec`."""
    symbols = []
    for s in mm.symbols:
        doc = {"name": s.name, "class": TAG_OF_CLASS[s.cls]}
        doc["domain"] = _interval_doc(s.domain, s.cls != A0)
        doc["range"] = _interval_doc(s.range, s.cls == A2)
        if s.orientation is not None:
            doc["orientation"] = s.orientation
        symbols.append(doc)
    doc = {"partition": [fmt(p) for p in mm.partition], "symbols": symbols}
    if mm.notes:
        doc["notes"] = list(mm.notes)
    return doc


# --------------------------------------------------------------------------
# axioms

@dataclass(frozen=True)
class Violation:
    condition: int
    symbol: Optional[str]
    message: str

    def __str__(self):
        who = f" {self.symbol}" if self.symbol else ""
        return f"condition ({self.condition}){who}: {self.message}"


def validate_definition(mm: MarkovMultiMap) -> list:
    """Check the six defining conditions of a Markov multi-map.

    Returns the list of violations, sorted by condition then symbol name so
    the result does not depend on symbol order.
    """
    out: list[Violation] = []
    P = mm.partition
    partition_ok = (
        len(P) >= 2 and P[0] == 0 and P[-1] == 1 and all(a < b for a, b in zip(P, P[1:]))
    )
    if not partition_ok:
        out.append(Violation(1, None, "partition must be strictly increasing from 0 to 1"))
    Pset = set(P)
    cells = {(P[i], P[i + 1]) for i in range(len(P) - 1)} if partition_ok else set()

    for s in mm.symbols:
        d, r = s.domain, s.range
        if s.cls == A0:
            if (d.lo, d.hi) not in cells:
                out.append(Violation(3, s.name, f"domain {d} is not a partition cell"))
        elif not (d.degenerate and d.lo in Pset):
            out.append(Violation(3, s.name, f"domain {d} is not a partition point"))

        if r.lo not in Pset or r.hi not in Pset:
            out.append(Violation(4, s.name, f"range {r} has an endpoint outside the partition"))
        if s.cls == A0 and r.degenerate:
            out.append(Violation(4, s.name, "interval branch needs a nondegenerate range"))
        elif s.cls == A1:
            if r.degenerate:
                out.append(Violation(4, s.name, "vertical symbol needs a nondegenerate range"))
            inner = sorted(p for p in P if r.lo < p < r.hi)
            if inner:
                out.append(Violation(
                    4, s.name, f"range {r} contains interior partition point {inner[0]}"))
        elif s.cls == A2 and not r.degenerate:
            out.append(Violation(4, s.name, "point symbol needs a degenerate range"))

        if s.cls == A0 and s.orientation not in (INCREASING, DECREASING):
            out.append(Violation(5, s.name, "interval branch needs an orientation"))

    covered = {(s.domain.lo, s.domain.hi) for s in mm.symbols if s.cls == A0}
    for lo, hi in sorted(cells - covered):
        out.append(Violation(6, None, f"cell [{lo}, {hi}] is not covered by any domain"))
    if not mm.symbols:
        out.append(Violation(6, None, "empty alphabet covers nothing"))
    return sorted(out, key=lambda v: (v.condition, v.symbol or "", v.message))


# --------------------------------------------------------------------------
# graph pieces

SEGMENT, VERTICAL, POINT = "segment", "vertical", "point"
_KIND = {A0: SEGMENT, A1: VERTICAL, A2: POINT}


@dataclass(frozen=True)
class Graphlet:
    """Closed graph piece of one symbol.

    The open part drops both endpoints of a segment; a point piece is its own
    open part (``endpoints_open`` is False).
    """

    owner: str
    kind: str
    start: Point
    end: Point
    endpoints_open: bool

    def closed_contains(self, x, y) -> bool:
        (x0, y0), (x1, y1) = self.start, self.end
        if self.kind == POINT:
            return (x, y) == (x0, y0)
        if self.kind == VERTICAL:
            return x == x0 and min(y0, y1) <= y <= max(y0, y1)
        if not x0 <= x <= x1:
            return False
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0) == y


def graph_pieces(mm: MarkovMultiMap) -> list:
    pieces = []
    for s in mm.symbols:
        if s.cls == A2:
            pt = (s.domain.lo, s.range.lo)
            pieces.append(Graphlet(s.name, POINT, pt, pt, False))
        else:
            a, b = s.arc_endpoints()
            pieces.append(Graphlet(s.name, _KIND[s.cls], a, b, True))
    return pieces


# --------------------------------------------------------------------------
# proper parametrization

@dataclass(frozen=True)
class ParametrizationReport:
    holds: bool
    overlap: Optional[tuple] = None      # (name, name, witness point)
    uncovered: Optional[Point] = None    # arc endpoint in no open part

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "properly parametrized"
        if self.overlap is not None:
            a, b, (x, y) = self.overlap
            return f"overlap({a},{b}) at ({x}, {y})"
        x, y = self.uncovered
        return f"uncovered({x}, {y})"


def _open_overlap(a: BranchSymbol, b: BranchSymbol) -> Optional[Point]:
    """A witness point in ``G0(a) & G0(b)``, or None when they are disjoint."""
    if a.cls == A0 and b.cls == A0:
        if a.domain != b.domain:
            return None
        fa, fb = a.branch, b.branch
        lo, hi = a.domain.lo, a.domain.hi
        if fa.slope == fb.slope:
            if fa.intercept != fb.intercept:
                return None
            mid = (lo + hi) / 2
            return (mid, fa(mid))
        x = (fb.intercept - fa.intercept) / (fa.slope - fb.slope)
        return (x, fa(x)) if lo < x < hi else None
    if A0 in (a.cls, b.cls):
        # open cells never meet the partition-point column of A1/A2 pieces
        return None
    if a.domain.lo != b.domain.lo:
        return None
    p = a.domain.lo
    if a.cls == A1 and b.cls == A1:
        lo, hi = max(a.range.lo, b.range.lo), min(a.range.hi, b.range.hi)
        return (p, (lo + hi) / 2) if lo < hi else None
    if a.cls == A2 and b.cls == A2:
        return (p, a.range.lo) if a.range == b.range else None
    vert, pt = (a, b) if a.cls == A1 else (b, a)
    q = pt.range.lo
    return (p, q) if vert.range.contains_open(q) else None


def _overlaps(mm: MarkovMultiMap) -> list:
    syms = sorted(mm.symbols, key=lambda s: s.name)
    found = []
    for i, a in enumerate(syms):
        for b in syms[i + 1:]:
            w = _open_overlap(a, b)
            if w is not None:
                found.append((w, a.name, b.name))
    return sorted(found)


def _uncovered(mm: MarkovMultiMap) -> list:
    ends = {pt for s in mm.symbols for pt in s.arc_endpoints()}
    return sorted(pt for pt in ends if not any(s.open_graph_contains(*pt) for s in mm.symbols))


def check_proper_parametrization(mm: MarkovMultiMap) -> ParametrizationReport:
    """Do the open graph pieces partition ``G(F)``?

    Evidence is the lexicographically smallest offending point, so the answer
    is independent of symbol order.
    """
    overlaps = _overlaps(mm)
    if overlaps:
        w, a, b = overlaps[0]
        return ParametrizationReport(False, overlap=(a, b, w))
    uncovered = _uncovered(mm)
    if uncovered:
        return ParametrizationReport(False, uncovered=uncovered[0])
    return ParametrizationReport(True)


def _fresh_names(taken: set, count: int, stem: str = "e"):
    i = 1
    while count:
        name = f"{stem}{i}"
        i += 1
        if name not in taken:
            taken.add(name)
            count -= 1
            yield name


def complete_parametrization(mm: MarkovMultiMap) -> MarkovMultiMap:
    """Return a properly parametrized multi-map with the same closed graph.

    Redundant point symbols (lying on another open piece or repeating an
    earlier point) are dropped and every arc endpoint not yet covered gets a
    new point symbol.  Overlapping arcs cannot be repaired this way and raise
    :class:`ParametrizationError`.
    """
    if check_proper_parametrization(mm):
        return mm
    kept: list[BranchSymbol] = []
    seen_points = set()
    for s in mm.symbols:
        if s.cls == A2:
            pt = (s.domain.lo, s.range.lo)
            on_arc = any(o.cls != A2 and o.open_graph_contains(*pt) for o in mm.symbols)
            if on_arc or pt in seen_points:
                continue
            seen_points.add(pt)
        kept.append(s)
    reduced = mm.with_symbols(kept)
    overlaps = _overlaps(reduced)
    if overlaps:
        w, a, b = overlaps[0]
        raise ParametrizationError(
            f"open pieces of {a} and {b} meet at ({w[0]}, {w[1]}); no symbol assignment repairs this")
    missing = _uncovered(reduced)
    names = _fresh_names({s.name for s in reduced.symbols}, len(missing))
    added = [
        BranchSymbol(n, A2, ExactInterval.point(x), ExactInterval.point(y))
        for n, (x, y) in zip(names, missing)
    ]
    out = reduced.with_symbols(list(reduced.symbols) + added)
    assert check_proper_parametrization(out)
    return out


# --------------------------------------------------------------------------
# evaluation

def evaluate(mm: MarkovMultiMap, x) -> tuple:
    """``F(x)`` as a sorted tuple of disjoint closed intervals."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")
    parts = []
    for s in mm.symbols:
        if x not in s.domain:
            continue
        if s.cls == A0:
            parts.append(ExactInterval.point(s.branch(x)))
        else:
            parts.append(s.range)
    return merge_intervals(parts)


def steps_to(mm: MarkovMultiMap, x, y) -> bool:
    """Is ``(x, y)`` on the graph of ``F``?"""
    return in_union(y, evaluate(mm, x))


def is_trajectory(mm: MarkovMultiMap, points: Sequence) -> bool:
    if not points:
        return False
    if any(not 0 <= p <= 1 for p in points):
        return False
    return all(steps_to(mm, a, b) for a, b in zip(points, points[1:]))


def follows(a: BranchSymbol, b: BranchSymbol) -> bool:
    """Transition rule: the open domain of ``b`` sits inside the open range of ``a``."""
    if b.cls == A0:
        if a.cls == A2:
            return False
        return a.range.lo <= b.domain.lo and b.domain.hi <= a.range.hi
    p = b.domain.lo
    if a.cls == A2:
        return a.range.lo == p
    return a.range.lo < p < a.range.hi
