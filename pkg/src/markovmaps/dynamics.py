"""Trajectories, constructive witnesses, the eventual range and the classifier.

Witnesses are built by backward evaluation through inverse composites, so
every coordinate is an exact rational and every self-check is an exact
comparison.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .coding import (
    CodingVerdict,
    EquicontinuityModulus,
    InverseComposite,
    _distances_to,
    check_CC,
    compose_inverse,
    equicontinuity_modulus,
)
from .core import (
    A0,
    A1,
    A2,
    BranchSymbol,
    ExactInterval,
    MarkovMultiMap,
    ParametrizationError,
    check_proper_parametrization,
    complete_parametrization,
    is_trajectory,
    validate_definition,
)
from .sft import (
    ComponentDecomposition,
    EssentialReport,
    TransitionMatrix,
    build_transition_matrix,
    check_conditions,
    components,
    essential_alphabet,
    path_of_length,
    primitive_exponent,
    shortest_path,
)
from .verdict import FAILS, HOLDS, UNKNOWN, Verdict

PROPERTIES = ("transitive", "dense-periodic", "devaney", "mixing", "specification")


class AnalysisError(ValueError):
    """The input is not a valid, properly parametrized multi-map."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class PreconditionError(ValueError):
    """A witness was requested without the verdicts its construction needs."""


# --------------------------------------------------------------------------
# trajectories

def as_points(values) -> tuple:
    return tuple(Fraction(v) for v in values)


def metric_d(x: Sequence, y: Sequence) -> Fraction:
    """``max_k |x_k - y_k| / (k + 1)`` over a common finite horizon."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    return max((abs(Fraction(a) - Fraction(b)) / (k + 1) for k, (a, b) in enumerate(zip(x, y))),
               default=Fraction(0))


@dataclass(frozen=True)
class LabeledTrajectory:
    points: tuple
    word: tuple

    def __post_init__(self):
        if len(self.word) != len(self.points) - 1:
            raise ValueError("a trajectory of length n carries a word of length n - 1")

    def labeled_in(self, mm: MarkovMultiMap) -> bool:
        return all(mm[a].closed_graph_contains(x, y)
                   for a, x, y in zip(self.word, self.points, self.points[1:]))

    def special_in(self, mm: MarkovMultiMap) -> bool:
        return all(mm[a].open_graph_contains(x, y)
                   for a, x, y in zip(self.word, self.points, self.points[1:]))


def _backward(mm: MarkovMultiMap, word, last) -> tuple:
    """Coordinates ``z_0 .. z_n`` with ``z_n = last`` and ``z_k = g_{word_k}(z_{k+1})``."""
    pts = [Fraction(last)]
    for a in reversed(word):
        pts.append(mm[a].inverse(pts[-1]))
    return tuple(reversed(pts))


def _labelling(mm: MarkovMultiMap, M: TransitionMatrix, points, allowed) -> Optional[tuple]:
    """Lexicographically least admissible labelling of ``points`` using ``allowed`` symbols."""
    steps = list(zip(points, points[1:]))
    labels = [[a for a in M.alphabet if a in allowed and mm[a].closed_graph_contains(x, y)]
              for x, y in steps]
    feasible = [set() for _ in steps]
    for k in range(len(steps) - 1, -1, -1):
        for a in labels[k]:
            if k == len(steps) - 1 or any(M(a, b) for b in feasible[k + 1]):
                feasible[k].add(a)
    if steps and not feasible[0]:
        return None
    word = []
    for k in range(len(steps)):
        nxt = [a for a in labels[k] if a in feasible[k] and (not word or M(word[-1], a))]
        word.append(nxt[0])
    return tuple(word)


def _open_labels(mm: MarkovMultiMap, points) -> Optional[tuple]:
    word = []
    for x, y in zip(points, points[1:]):
        hits = [s.name for s in mm.symbols if s.open_graph_contains(x, y)]
        if len(hits) != 1:
            return None
        word.append(hits[0])
    return tuple(word)


def special_approximation(mm: MarkovMultiMap, M: TransitionMatrix, essential, x, eps) -> LabeledTrajectory:
    """A special labelled trajectory by essential symbols, coordinatewise within ``eps`` of ``x``."""
    x = as_points(x)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if not is_trajectory(mm, x):
        raise ValueError("not a trajectory of the multi-map")
    if len(x) == 1:
        return LabeledTrajectory(x, ())
    essential = set(essential)
    word = _open_labels(mm, x)
    if word is None or not set(word) <= essential or not M.is_word(word):
        word = _labelling(mm, M, x, essential)
        if word is None:
            raise ValueError("no labelling by essential symbols")
    rng = mm[word[-1]].range
    last = x[-1]
    if rng.contains_open(last):
        y = _backward(mm, word, last)
        if all(abs(a - b) < eps for a, b in zip(x, y)):
            return LabeledTrajectory(y, word)
    eta = min(eps, rng.length / 2)
    while True:
        if rng.degenerate:
            target = rng.lo
        elif last <= rng.lo:
            target = rng.lo + eta
        elif last >= rng.hi:
            target = rng.hi - eta
        else:
            target = last
        y = _backward(mm, word, target)
        if all(abs(a - b) < eps for a, b in zip(x, y)):
            out = LabeledTrajectory(y, word)
            assert out.special_in(mm) and out.labeled_in(mm)
            return out
        eta /= 2
        if target == last:
            raise AssertionError("interior endpoint yet bounds fail")


def sample_forward(mm: MarkovMultiMap, x0, n: int, seed: int) -> tuple:
    """A seeded random trajectory of ``n`` points starting at ``x0``.

    Vertical and point symbols contribute the midpoint of a random dyadic
    sub-interval of their range, so every coordinate stays rational.
    """
    x0 = Fraction(x0)
    if not 0 <= x0 <= 1:
        raise ValueError(f"{x0} is outside [0, 1]")
    if n < 1:
        raise ValueError("trajectory length must be positive")
    rnd = random.Random(seed)
    pts = [x0]
    while len(pts) < n:
        x = pts[-1]
        options = [s for s in mm.symbols if x in s.domain]
        s = rnd.choice(options)
        if s.cls == A0:
            pts.append(s.branch(x))
        else:
            depth = rnd.randint(0, 5)
            k = rnd.randrange(2 ** depth)
            pts.append(s.range.lo + s.range.length * Fraction(2 * k + 1, 2 ** (depth + 1)))
    return tuple(pts)


# --------------------------------------------------------------------------
# eventual range

@dataclass(frozen=True)
class EventualRange:
    cells: tuple          # partition cells contained in W
    points: tuple         # isolated points of W outside those cells
    iterations: int
    invariant: bool       # F(W) == W, checked exactly

    @property
    def intervals(self) -> tuple:
        from .core import merge_intervals
        return merge_intervals(list(self.cells) + [ExactInterval.point(p) for p in self.points])

    @property
    def full(self) -> bool:
        return self.intervals == (ExactInterval(Fraction(0), Fraction(1)),)

    def aligned_interval(self) -> Optional[ExactInterval]:
        """W itself when it is a single nondegenerate union of cells."""
        iv = self.intervals
        if len(iv) == 1 and not iv[0].degenerate and not self.points:
            return iv[0]
        return None


def _normalize(mm: MarkovMultiMap, cells, points):
    cells = frozenset(cells)
    pts = frozenset(p for p in points if not any(p in c for c in cells))
    return cells, pts


def _image(mm: MarkovMultiMap, cells, points):
    cell_list = mm.cells
    inside = set(points) | {p for c in cells for p in (c.lo, c.hi)}
    out_cells, out_pts = set(), set()

    def add_range(r):
        for c in cell_list:
            if c.issubset(r):
                out_cells.add(c)

    for s in mm.symbols:
        if s.cls == A0:
            if s.domain in cells:
                add_range(s.range)
            else:
                for p in (s.domain.lo, s.domain.hi):
                    if p in inside:
                        out_pts.add(s.branch(p))
        elif s.domain.lo in inside:
            if s.cls == A1:
                add_range(s.range)
            else:
                out_pts.add(s.range.lo)
    return _normalize(mm, out_cells, out_pts)


def eventual_range(mm: MarkovMultiMap) -> EventualRange:
    """``W``, the intersection of the iterated images of [0, 1]."""
    state = _normalize(mm, mm.cells, mm.partition)
    iterations = 0
    while True:
        nxt = _image(mm, *state)
        iterations += 1
        if nxt == state:
            break
        state = nxt
    cells = tuple(sorted(state[0]))
    points = tuple(sorted(state[1]))
    return EventualRange(cells, points, iterations, _image(mm, *state) == state)


def restrict_to(mm: MarkovMultiMap, W: ExactInterval) -> MarkovMultiMap:
    """``F`` restricted to ``W x W`` and rescaled affinely onto [0, 1]."""
    lo, span = W.lo, W.length

    def scale(iv):
        return ExactInterval((iv.lo - lo) / span, (iv.hi - lo) / span)

    kept = []
    for s in mm.symbols:
        if s.domain.issubset(W) and s.range.issubset(W):
            kept.append(BranchSymbol(s.name, s.cls, scale(s.domain), scale(s.range), s.orientation))
        elif s.cls == A0:
            # a cell outside W touching it at an endpoint leaves one graph point behind
            for p in (s.domain.lo, s.domain.hi):
                if p in W and s.branch(p) in W:
                    pt = ExactInterval.point(p)
                    kept.append(BranchSymbol(f"{s.name}@{p}", A2, scale(pt),
                                             scale(ExactInterval.point(s.branch(p)))))
    partition = tuple((p - lo) / span for p in mm.partition if p in W)
    restricted = MarkovMultiMap(partition, tuple(kept))
    return complete_parametrization(restricted)


# --------------------------------------------------------------------------
# analysis report

@dataclass
class AnalysisReport:
    mm: MarkovMultiMap
    matrix: TransitionMatrix
    decomposition: ComponentDecomposition
    essential: EssentialReport
    conditions: dict
    coding: CodingVerdict
    modulus: EquicontinuityModulus
    eventual: EventualRange
    forward: dict
    inverse: dict
    caveats: list = field(default_factory=list)
    N2: Optional[int] = None

    @property
    def component(self) -> Optional[tuple]:
        return self.coding.component

    def consistent(self) -> bool:
        """specification => mixing => transitive, and devaney => transitive, in both systems."""
        for side in (self.forward, self.inverse):
            chain = [side["specification"], side["mixing"], side["transitive"]]
            for a, b in zip(chain, chain[1:]):
                if a.status == HOLDS and b.status != HOLDS:
                    return False
            if side["devaney"].status == HOLDS and side["transitive"].status != HOLDS:
                return False
        if self.conditions["MC"].status == FAILS and self.forward["mixing"].status != FAILS:
            return False
        return True


B_TRANS = "transitivity theorem: CC and IC give transitivity and dense periodic points"
B_TRANS_NEC = "transitivity theorem, necessity: a transitive system forces IC"
B_MIX = "mixing theorem: CC and MC give mixing"
B_MIX_NEC = "mixing theorem, necessity: a mixing system forces MC"
B_SPEC = "specification theorem: CC, MC and equicontinuous inverse branches give specification"
B_SPEC_NEC = "specification implies mixing of the SFT, so MC is necessary"
B_SURJ = "eventual range W != [0,1]: F is not surjective, which rules out transitivity"
B_SURJ_PER = "eventual range W != [0,1]: periodic trajectories stay in W, missing the open set outside it"
B_EQUI = "affine branches: every inverse composite is Lipschitz with constant max l(D(a))/l(R(b))"
B_INV_EQ = "forward/inverse equivalence with W = [0,1]"
B_INV_FWD = "forward property lifts to the inverse limit"
B_INV_RES = "forward/inverse equivalence through the restriction of F to W"


def _forward_verdicts(cond: dict, cc: CodingVerdict, surjective: bool, caveat) -> dict:
    ic, mc, eq = cond["IC"].holds, cond["MC"].holds, cond["equicontinuity"].holds
    cc_ok = cc.status == HOLDS
    comp = list(cc.component) if cc.component else None
    out = {}

    def decide(name, sufficient, suff_basis, necessary_ok, nec_basis, nec_applies=True):
        if sufficient:
            out[name] = Verdict(HOLDS, suff_basis, comp, caveat)
        elif nec_applies and not necessary_ok:
            out[name] = Verdict(FAILS, nec_basis, None, caveat)
        elif not surjective:
            basis = B_SURJ_PER if name == "dense-periodic" else B_SURJ
            out[name] = Verdict(FAILS, basis)
        else:
            why = "CC %s, so no sufficient condition applies" % cc.status
            out[name] = Verdict(UNKNOWN, "", None, why)

    decide("transitive", cc_ok and ic, B_TRANS, ic, B_TRANS_NEC)
    decide("dense-periodic", cc_ok and ic, B_TRANS, True, "", nec_applies=False)
    decide("devaney", cc_ok and ic, B_TRANS, ic, B_TRANS_NEC)
    decide("mixing", cc_ok and mc, B_MIX, mc, B_MIX_NEC)
    decide("specification", cc_ok and mc and eq, B_SPEC, mc, B_SPEC_NEC)
    return out


def _lift(v: Verdict, basis: str, caveat=None) -> Verdict:
    if v.status == UNKNOWN:
        return Verdict(UNKNOWN, "", None, v.caveat if caveat is None else caveat)
    return Verdict(v.status, basis, v.witness, v.caveat if caveat is None else caveat)


def _inverse_verdicts(mm, forward: dict, W: EventualRange, bound, depth: int, caveats: list) -> dict:
    out = {}
    if W.full:
        for name in ("transitive", "devaney", "mixing", "specification"):
            out[name] = _lift(forward[name], B_INV_EQ)
    else:
        restricted_forward = None
        iv = W.aligned_interval()
        if iv is not None and depth == 0:
            try:
                sub = restrict_to(mm, iv)
                restricted_forward = classify(sub, bound, _depth=1).forward
            except (AnalysisError, ParametrizationError, ValueError):
                restricted_forward = None
        if restricted_forward is not None:
            caveats.append(f"inverse verdicts read off F restricted to W = {iv}")
        for name in ("transitive", "devaney", "mixing", "specification"):
            if forward[name].status == HOLDS:
                out[name] = _lift(forward[name], B_INV_FWD)
            elif restricted_forward is not None:
                out[name] = _lift(restricted_forward[name], B_INV_RES)
            else:
                out[name] = Verdict(UNKNOWN, "", None,
                                    "W is not a single union of partition cells; restriction not modelled")
    dev = out["devaney"]
    if dev.status == HOLDS:
        out["dense-periodic"] = Verdict(HOLDS, "Devaney chaos includes dense periodic points", dev.witness)
    else:
        out["dense-periodic"] = Verdict(UNKNOWN, "", None, "no inverse-limit criterion for dense periodic points alone")
    return {name: out[name] for name in PROPERTIES}


def classify(mm: MarkovMultiMap, bound: Optional[int] = None, _depth: int = 0) -> AnalysisReport:
    """Run the full pipeline and fill in every verdict."""
    violations = validate_definition(mm)
    if violations:
        raise AnalysisError("invalid Markov multi-map", violations)
    param = check_proper_parametrization(mm)
    if not param:
        raise AnalysisError(f"not properly parametrized: {param.describe()}")
    M = build_transition_matrix(mm)
    decomp = components(M)
    ess = essential_alphabet(mm, M, bound)
    cond = dict(check_conditions(M, ess, decomp))
    cc = check_CC(mm, M, decomp)
    modulus = equicontinuity_modulus(mm)
    cond["CC"] = Verdict(cc.status, cc.basis if cc.status != UNKNOWN else "",
                         cc.witness(), None if cc.status != UNKNOWN else cc.basis)
    cond["equicontinuity"] = Verdict(HOLDS, B_EQUI, {"constant": str(modulus.constant)})

    caveats = []
    ess_caveat = None
    if ess.undecided:
        ess_caveat = "essentiality search bound %d reached; assumed inessential: %s" % (
            ess.bound, ", ".join(ess.undecided))
    elif ess.beyond_bound:
        ess_caveat = "essential symbols found only beyond search bound %d: %s" % (
            ess.bound, ", ".join(ess.beyond_bound))
    if ess_caveat:
        caveats.append(ess_caveat)
    if cc.status == UNKNOWN:
        caveats.append("coding condition undecided: " + cc.basis)

    W = eventual_range(mm)
    forward = _forward_verdicts(cond, cc, W.full, ess_caveat)
    if forward["transitive"].status == UNKNOWN and cond["MC"].holds:
        caveats.append("SFT is mixing but CC does not hold; the theorems leave forward transitivity open")
    inverse = _inverse_verdicts(mm, forward, W, bound, _depth, caveats)

    N2 = None
    if cond["MC"].holds and cc.component is not None:
        e = primitive_exponent(M, cc.component)
        N2 = max(1, e - 1)
    report = AnalysisReport(mm, M, decomp, ess, cond, cc, modulus, W, forward, inverse, caveats, N2)
    assert report.consistent()
    return report


# --------------------------------------------------------------------------
# witnesses

def _require(report: AnalysisReport, *names: str):
    for name in names:
        if name in report.conditions:
            v = report.conditions[name]
        else:
            v = report.forward[name]
        if v.status != HOLDS:
            raise PreconditionError(f"{name}: {v.status}")


class _Builder:
    """Shared machinery for the three witness constructions."""

    def __init__(self, report: AnalysisReport):
        self.report = report
        self.mm = report.mm
        self.M = report.matrix
        self.C0 = tuple(report.coding.component)
        self.Cset = set(self.C0)
        self.dist = _distances_to(self.M, report.coding.D_set, self.Cset)
        self.A0 = set(self.mm.of_class(A0))
        self.essential = report.essential.essential

    def approximate(self, x, eps):
        return special_approximation(self.mm, self.M, self.essential, x, eps / 2)

    def _pick(self, options):
        return min(options, key=lambda b: (self.dist.get(b, len(self.C0)), self.M.index(b)))

    def depth_cap(self, delta) -> int:
        gamma = self.report.coding.gamma
        k, length = 0, Fraction(1)
        while length >= delta:
            length *= gamma
            k += 1
        return (k + 1) * (self.report.coding.window + 1) + 1

    def descend(self, prev: Optional[str], target, delta, min_len: int = 0) -> tuple:
        """Walk the ``I_u`` tree toward ``target`` until ``l(I_w) < delta``.

        The walk prefers the child nearest the spanning symbols, so the
        resulting word stays in the window language and contraction kicks in
        at least once every window.
        """
        mm, M = self.mm, self.M
        first = [b for b in self.C0 if b in self.A0 and target in mm[b].domain
                 and (prev is None or M(prev, b))]
        if not first:
            raise AssertionError(f"no interval symbol covers {target}")
        b = self._pick(first)
        comp = compose_inverse(mm, (b,))
        t = mm[b].branch(target)
        cap = max(self.depth_cap(delta), min_len)
        while comp.interval.length >= delta or len(comp.word) < min_len:
            if len(comp.word) > cap:
                raise AssertionError("descent exceeded its contraction bound")
            kids = [c for c in M.successors(comp.word[-1], self.Cset) if c in self.A0 and t in mm[c].domain]
            c = self._pick(kids)
            comp = comp.extend(mm, c)
            t = mm[c].branch(t)
        assert target in comp.interval
        return comp.word

    def walk(self, start: str, steps: int) -> tuple:
        out = []
        cur = start
        for _ in range(steps):
            cur = self.M.successors(cur, self.Cset)[0]
            out.append(cur)
        return tuple(out)

    def head_word(self, head: LabeledTrajectory, delta, min_len: int = 0) -> tuple:
        """The word ``w`` pinning the last head point into a short interval."""
        if head.word and self.mm[head.word[-1]].cls == A2:
            return self.walk(head.word[-1], min_len)
        prev = head.word[-1] if head.word else None
        return self.descend(prev, head.points[-1], delta, min_len)

    def bridge(self, a: str, b: str) -> tuple:
        """Shortest interior symbols ``v`` with ``a v b`` admissible inside ``C0``."""
        best = None
        for s in self.M.successors(a, self.Cset):
            p = shortest_path(self.M, s, {b}, self.Cset)
            if p is not None and (best is None or len(p) < len(best)):
                best = p
        if best is None:
            raise AssertionError(f"{b} unreachable from {a} inside the component")
        return tuple(best[:-1])


def _within(xs, zs, eps) -> bool:
    return all(abs(a - b) < eps for a, b in zip(xs, zs))


@dataclass(frozen=True)
class ConnectWitness:
    z: tuple
    offset: int
    word: tuple
    x: tuple
    y: tuple
    eps: Fraction

    def self_check(self, mm: MarkovMultiMap) -> dict:
        tail = self.z[self.offset:self.offset + len(self.y)]
        return {
            "valid": is_trajectory(mm, self.z),
            "head": len(self.z) >= len(self.x) and _within(self.x, self.z, self.eps),
            "tail": len(tail) == len(self.y) and _within(self.y, tail, self.eps),
        }


@dataclass(frozen=True)
class PeriodicWitness:
    z: tuple
    word: tuple
    x: tuple
    eps: Fraction

    def self_check(self, mm: MarkovMultiMap) -> dict:
        return {
            "valid": is_trajectory(mm, self.z),
            "head": len(self.z) >= len(self.x) and _within(self.x, self.z, self.eps),
            "periodic": self.z[0] == self.z[-1],
        }


@dataclass(frozen=True)
class SpecificationWitness:
    z: tuple
    word: tuple
    segments: tuple
    gaps: tuple
    offsets: tuple
    eps: Fraction
    N2: int

    def self_check(self, mm: MarkovMultiMap) -> dict:
        shadow = all(
            s + len(x) <= len(self.z) and _within(x, self.z[s:s + len(x)], self.eps)
            for x, s in zip(self.segments, self.offsets))
        return {
            "valid": is_trajectory(mm, self.z),
            "shadowing": shadow,
            "periodic": self.z[0] == self.z[-1],
            "gaps": all(j >= self.N2 for j in self.gaps),
        }


def connect_witness(report: AnalysisReport, x, y, eps) -> ConnectWitness:
    """A trajectory starting near ``x`` that later passes near ``y``."""
    _require(report, "CC", "IC")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    x, y = as_points(x), as_points(y)
    bld = _Builder(report)
    mm = bld.mm
    head = bld.approximate(x, eps)
    tail = bld.approximate(y, eps)
    delta = report.modulus.delta(eps / 2)
    w = bld.head_word(head, delta)
    lead = head.word + w
    if tail.word:
        word = lead + bld.bridge(lead[-1], tail.word[0]) + tail.word
        last = tail.points[-1]
    else:
        # the final step must land on y_0, so it is labelled by a symbol whose range holds y_0
        target = tail.points[0]
        ends = [c for c in bld.C0 if target in mm[c].range]
        if not ends:
            raise AssertionError(f"{target} is in no range of the component")
        if lead[-1] in ends:
            word = lead
        else:
            c = min(ends, key=lambda c: (len(bld.bridge(lead[-1], c)), bld.M.index(c)))
            word = lead + bld.bridge(lead[-1], c) + (c,)
        last = target
    z = _backward(mm, word, last)
    offset = len(word) - len(tail.word)
    out = ConnectWitness(z, offset, word, x, y, eps)
    assert all(out.self_check(mm).values()), out.self_check(mm)
    return out


def _cycle_point(mm: MarkovMultiMap, word, fallback) -> Fraction:
    g = compose_inverse(mm, word).map
    p = g.fixed_point()
    if p is None:
        if g.slope == 1 and g.intercept == 0:
            p = Fraction(fallback)
        else:
            raise AssertionError("composite loop has no unique fixed point")
    return p


def periodic_witness(report: AnalysisReport, x, eps) -> PeriodicWitness:
    """A periodic trajectory (``z_0 = z_J``) whose first coordinates shadow ``x``."""
    _require(report, "CC", "IC")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    x = as_points(x)
    bld = _Builder(report)
    mm = bld.mm
    head = bld.approximate(x, eps)
    w = bld.head_word(head, report.modulus.delta(eps / 2))
    lead = head.word + w
    word = lead + bld.bridge(lead[-1], lead[0])
    p = _cycle_point(mm, word, head.points[0])
    z = _backward(mm, word, p)
    out = PeriodicWitness(z, word, x, eps)
    assert all(out.self_check(mm).values()), out.self_check(mm)
    return out


def specification_offsets(lengths, gaps, N1: int) -> tuple:
    """Start index of each segment: ``s_k = sum_{i<k} (n_i + N1 + j_i)``, ``n_i`` = steps in segment ``i``."""
    out, s = [], 0
    for n, j in zip(lengths, gaps):
        out.append(s)
        s += (n - 1) + N1 + j
    return tuple(out)


def specification_witness(report: AnalysisReport, segments, gaps, eps) -> SpecificationWitness:
    """One periodic orbit shadowing every segment, separated by the given gaps.

    Segment ``k`` is followed by a pinning word of the common length ``N1``
    and then by exactly ``gaps[k]`` connecting symbols.
    """
    _require(report, "specification")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    segments = [as_points(s) for s in segments]
    gaps = [int(j) for j in gaps]
    if not segments or len(segments) != len(gaps):
        raise ValueError("need one gap per segment")
    N2 = report.N2
    short = [j for j in gaps if j < N2]
    if short:
        raise PreconditionError(f"gap {short[0]} is below N2 = {N2}")
    bld = _Builder(report)
    mm = bld.mm
    delta = report.modulus.delta(eps / 2)
    heads = [bld.approximate(x, eps) for x in segments]
    N1 = max(len(bld.head_word(h, delta)) for h in heads)
    N1 = max(N1, 1)
    blocks = [h.word + bld.head_word(h, delta, N1) for h in heads]
    word = ()
    r = len(blocks)
    for k in range(r):
        nxt = blocks[(k + 1) % r][0]
        path = path_of_length(bld.M, blocks[k][-1], nxt, gaps[k] + 1, bld.Cset)
        if path is None:
            raise AssertionError("mixing component lacks a path of the requested length")
        word += blocks[k] + tuple(path[1:-1])
    p = _cycle_point(mm, word, heads[0].points[0])
    z = _backward(mm, word, p)
    offsets = specification_offsets([len(x) for x in segments], gaps, N1)
    out = SpecificationWitness(z, word, tuple(segments), tuple(gaps), offsets, eps, N2)
    assert all(out.self_check(mm).values()), out.self_check(mm)
    return out
