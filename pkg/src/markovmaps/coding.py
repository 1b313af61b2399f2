"""Inverse-branch composites and the checkable coding conditions.

For an admissible word ``u = u0 .. un`` the composite ``g_u = g_u0 o .. o g_un``
maps ``R(un)`` onto the interval ``I_u`` of starting points consistent with
``u``.  With affine branches the one-step shrink ratio of ``I_u`` depends
only on the last two symbols, which is what makes the coding condition and
the equicontinuity bound decidable here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .core import A0, AffineBranch, ExactInterval, MarkovMultiMap, follows
from .sft import ComponentDecomposition, TransitionMatrix
from .verdict import FAILS, HOLDS, UNKNOWN


def inverse_branch(mm: MarkovMultiMap, a: str) -> AffineBranch:
    return mm[a].inverse


@dataclass(frozen=True)
class InverseComposite:
    word: tuple
    map: AffineBranch
    interval: ExactInterval

    def extend(self, mm: MarkovMultiMap, b: str) -> "InverseComposite":
        if not follows(mm[self.word[-1]], mm[b]):
            raise ValueError(f"{self.word[-1]}{b} is not an admissible pair")
        g = self.map.after(mm[b].inverse)
        return InverseComposite(self.word + (b,), g, g.image())


def compose_inverse(mm: MarkovMultiMap, word) -> InverseComposite:
    """``g_u`` and ``I_u`` for an admissible word, exactly."""
    word = tuple(word)
    if not word:
        raise ValueError("empty word")
    for a, b in zip(word, word[1:]):
        if not follows(mm[a], mm[b]):
            raise ValueError(f"{a}{b} is not an admissible pair; {''.join(word)} is not in the language")
    g = mm[word[-1]].inverse
    for a in reversed(word[:-1]):
        g = mm[a].inverse.after(g)
    return InverseComposite(word, g, g.image())


def slope_bound(mm: MarkovMultiMap, word) -> Optional[Fraction]:
    """``l(D(u0)) / l(R(un))``, the a priori bound on the slope of ``g_u``."""
    r = mm[word[-1]].range.length
    if r == 0:
        return None
    return mm[word[0]].domain.length / r


# --------------------------------------------------------------------------
# contraction

@dataclass(frozen=True)
class ContractionRate:
    D_set: tuple
    gamma: Fraction


def spanning_symbols(mm: MarkovMultiMap) -> tuple:
    """Interval symbols whose open range contains a partition point."""
    P = mm.partition
    return tuple(
        s.name for s in mm.symbols
        if s.cls == A0 and any(s.range.contains_open(p) for p in P)
    )


def contraction_rate(mm: MarkovMultiMap, M: TransitionMatrix) -> ContractionRate:
    """Worst one-step shrink ratio ``l(D(b)) / l(R(a))`` over spanning ``a``.

    ``gamma = 1`` is the sentinel for "no spanning symbol".
    """
    D = spanning_symbols(mm)
    if not D:
        return ContractionRate((), Fraction(1))
    ratios = [
        mm[b].domain.length / mm[a].range.length
        for a in D for b in M.successors(a) if mm[b].cls == A0
    ]
    return ContractionRate(D, max(ratios))


# --------------------------------------------------------------------------
# the window subshift Z

def _distances_to(M: TransitionMatrix, targets, within) -> dict:
    """Steps from each symbol of ``within`` to the nearest target."""
    dist = {a: 0 for a in targets if a in within}
    queue = deque(dist)
    while queue:
        b = queue.popleft()
        for a in within:
            if a not in dist and M(a, b):
                dist[a] = dist[b] + 1
                queue.append(a)
    return dist


class WindowShift:
    """Sequences over ``C0`` seeing a symbol of ``D`` in every ``N + 1`` consecutive places.

    States are (symbol, length of the current run outside ``D``).
    """

    def __init__(self, M: TransitionMatrix, component, D, N: int):
        self.M = M
        self.C = tuple(a for a in M.alphabet if a in set(component))
        self.D = frozenset(D)
        self.N = N
        states = {(a, c) for a in self.C for c in range(N + 1) if (c == 0) == (a in self.D)}
        live = set(states)
        changed = True
        while changed:
            changed = False
            for s in list(live):
                if not any(t in live for t in self._next(s)):
                    live.discard(s)
                    changed = True
        starts = {(a, 0 if a in self.D else 1) for a in self.C} & live
        seen = set(starts)
        queue = deque(starts)
        while queue:
            s = queue.popleft()
            for t in self._next(s):
                if t in live and t not in seen:
                    seen.add(t)
                    queue.append(t)
        self.states = seen

    def _next(self, state):
        a, c = state
        for b in self.M.successors(a, self.C):
            k = 0 if b in self.D else c + 1
            if k <= self.N:
                yield (b, k)

    def successors(self, state):
        return [t for t in self._next(state) if t in self.states]

    @property
    def symbols(self) -> set:
        return {a for a, _ in self.states}

    def transitive_on_symbols(self) -> bool:
        reach = {}
        for s in self.states:
            seen = {s}
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for t in self.successors(u):
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)
            reach[s] = {a for a, _ in seen}
        syms = self.symbols
        for a in syms:
            from_a = set().union(*(reach[s] for s in self.states if s[0] == a))
            if not syms <= from_a:
                return False
        return True

    def iter_words(self, n: int) -> Iterator[tuple]:
        """Length-``n`` words of the window shift, lexicographically."""
        order = {a: i for i, a in enumerate(self.C)}
        first: dict = {}
        for s in self.states:
            first.setdefault(s[0], set()).add(s)
        stack = [((a,), frozenset(first[a])) for a in sorted(first, key=order.get, reverse=True)]
        while stack:
            w, here = stack.pop()
            if len(w) == n:
                yield w
                continue
            nxt: dict = {}
            for s in here:
                for t in self.successors(s):
                    nxt.setdefault(t[0], set()).add(t)
            for b in sorted(nxt, key=order.get, reverse=True):
                stack.append((w + (b,), frozenset(nxt[b])))


def coding_window(M: TransitionMatrix, component, D) -> int:
    """Least window ``N`` making the window shift transitive on symbols and
    covering the whole component."""
    C = set(component)
    dist = _distances_to(M, D, C)
    lo = max(1, max(dist.values()))
    hi = lo + len(C) + 1
    for N in range(lo, hi + 1):
        Z = WindowShift(M, C, D, N)
        if Z.symbols == C and Z.transitive_on_symbols():
            return N
    raise AssertionError("no window makes the coding subshift transitive")


def iter_window_intervals(mm: MarkovMultiMap, Z: WindowShift, n: int) -> Iterator[InverseComposite]:
    """``(u, g_u, I_u)`` for every length-``n`` word of ``Z``, built incrementally."""
    order = {a: i for i, a in enumerate(Z.C)}
    first: dict = {}
    for s in Z.states:
        first.setdefault(s[0], set()).add(s)
    stack = []
    for a in sorted(first, key=order.get, reverse=True):
        g = mm[a].inverse
        stack.append((InverseComposite((a,), g, g.image()), frozenset(first[a])))
    while stack:
        comp, here = stack.pop()
        if len(comp.word) == n:
            yield comp
            continue
        nxt: dict = {}
        for s in here:
            for t in Z.successors(s):
                nxt.setdefault(t[0], set()).add(t)
        for b in sorted(nxt, key=order.get, reverse=True):
            stack.append((comp.extend(mm, b), frozenset(nxt[b])))


# --------------------------------------------------------------------------
# coding condition

CC_HOLDS_BASIS = "coding-condition corollary for affine branches (spanning symbol + irreducible component containing A0)"
CC_FAILS_BASIS = "no spanning symbol: every interval word keeps I_u = I_u0, a full cell"
CC_UNKNOWN_BASIS = "sufficient condition inapplicable: no irreducible component contains A0"


@dataclass(frozen=True)
class CodingVerdict:
    status: str
    basis: str
    D_set: tuple
    gamma: Fraction
    component: Optional[tuple] = None
    window: Optional[int] = None
    min_cell: Optional[Fraction] = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def obstruction(self) -> Optional[str]:
        if self.status != FAILS:
            return None
        return f"I_u = I_u0 for every word; interval lengths stay >= {self.min_cell}"

    def witness(self) -> dict:
        if self.status == HOLDS:
            return {"D_set": list(self.D_set), "gamma": str(self.gamma),
                    "component": list(self.component), "window": self.window}
        if self.status == FAILS:
            return {"D_set": [], "obstruction": self.obstruction, "min_cell": str(self.min_cell)}
        return {"D_set": list(self.D_set), "gamma": str(self.gamma)}

    def window_shift(self, M: TransitionMatrix) -> WindowShift:
        if self.status != HOLDS:
            raise ValueError("the coding subshift exists only when the coding condition holds")
        return WindowShift(M, self.component, self.D_set, self.window)


def check_CC(mm: MarkovMultiMap, M: TransitionMatrix, decomp: ComponentDecomposition) -> CodingVerdict:
    rate = contraction_rate(mm, M)
    if not rate.D_set:
        cell = min(c.length for c in mm.cells)
        return CodingVerdict(FAILS, CC_FAILS_BASIS, (), rate.gamma, min_cell=cell)
    comp = decomp.containing(mm.of_class(A0))
    if comp is None:
        return CodingVerdict(UNKNOWN, CC_UNKNOWN_BASIS, rate.D_set, rate.gamma)
    assert rate.gamma < 1
    N = coding_window(M, comp.symbols, rate.D_set)
    return CodingVerdict(HOLDS, CC_HOLDS_BASIS, rate.D_set, rate.gamma, comp.symbols, N)


# --------------------------------------------------------------------------
# equicontinuity

@dataclass(frozen=True)
class EquicontinuityModulus:
    """Uniform Lipschitz constant for every inverse composite."""

    constant: Fraction

    def delta(self, eps) -> Fraction:
        return Fraction(eps) / self.constant


def equicontinuity_modulus(mm: MarkovMultiMap) -> EquicontinuityModulus:
    branches = [mm[a] for a in mm.of_class(A0)]
    constant = max(a.domain.length / b.range.length for a in branches for b in branches)
    return EquicontinuityModulus(constant)
