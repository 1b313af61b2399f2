"""The shift of finite type attached to a multi-map.

Builds the transition matrix, enumerates the language, splits the digraph
into irreducible and mixing components, and decides which symbols are
essential.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator, Optional

import networkx as nx
import numpy as np

from .core import A0, A1, A2, MarkovMultiMap, follows
from .verdict import FAILS, HOLDS, Verdict


@dataclass(frozen=True)
class TransitionMatrix:
    alphabet: tuple
    entries: np.ndarray = field(compare=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=bool)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(self.alphabet)})

    def index(self, a: str) -> int:
        return self._index[a]

    def __call__(self, a: str, b: str) -> bool:
        return bool(self.entries[self._index[a], self._index[b]])

    def successors(self, a: str, within=None) -> list:
        row = self.entries[self._index[a]]
        out = [self.alphabet[j] for j in np.flatnonzero(row)]
        if within is not None:
            out = [b for b in out if b in within]
        return out

    def is_word(self, word) -> bool:
        return all(self(a, b) for a, b in zip(word, word[1:]))

    def sort_key(self, word) -> tuple:
        return tuple(self._index[a] for a in word)

    def restricted(self, symbols) -> "TransitionMatrix":
        keep = [a for a in self.alphabet if a in set(symbols)]
        idx = [self._index[a] for a in keep]
        return TransitionMatrix(tuple(keep), self.entries[np.ix_(idx, idx)])


def build_transition_matrix(mm: MarkovMultiMap) -> TransitionMatrix:
    syms = mm.symbols
    n = len(syms)
    entries = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(syms):
        for j, b in enumerate(syms):
            entries[i, j] = follows(a, b)
    return TransitionMatrix(mm.alphabet, entries)


def live_symbols(M: TransitionMatrix, within=None) -> set:
    """Symbols that start an infinite admissible path inside ``within``."""
    live = set(M.alphabet if within is None else within)
    changed = True
    while changed:
        changed = False
        for a in list(live):
            if not any(b in live for b in M.successors(a)):
                live.discard(a)
                changed = True
    return live


def iter_language(M: TransitionMatrix, n: int, restrict=None) -> Iterator[tuple]:
    """Length-``n`` words of the subshift on ``restrict``, lexicographically.

    A word belongs to the language when it occurs in some infinite admissible
    sequence over the restricted alphabet, so every symbol must be live there.
    """
    if n < 1:
        raise ValueError("word length must be positive")
    live = live_symbols(M, restrict)
    start = [a for a in M.alphabet if a in live]
    stack = [(a,) for a in reversed(start)]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
            continue
        for b in reversed(M.successors(w[-1], live)):
            stack.append(w + (b,))


def language(M: TransitionMatrix, n: int, restrict=None) -> list:
    return list(iter_language(M, n, restrict))


# --------------------------------------------------------------------------
# components

@dataclass(frozen=True)
class Component:
    symbols: tuple
    period: Optional[int]
    irreducible: bool
    mixing: bool


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple

    def containing(self, symbols) -> Optional[Component]:
        want = set(symbols)
        for c in self.components:
            if want <= set(c.symbols):
                return c
        return None

    def of(self, a: str) -> Component:
        for c in self.components:
            if a in c.symbols:
                return c
        raise KeyError(a)


def _period(M: TransitionMatrix, members: set) -> Optional[int]:
    # gcd of level(u) + 1 - level(v) over internal edges of a BFS layering
    root = min(members, key=M.index)
    level = {root: 0}
    queue = deque([root])
    g = 0
    while queue:
        u = queue.popleft()
        for v in M.successors(u, members):
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = gcd(g, level[u] + 1 - level[v])
    return abs(g) or None


def components(M: TransitionMatrix) -> ComponentDecomposition:
    """Strongly connected components with their periods.

    A singleton without a self-loop still counts as an irreducible component
    (the one-letter word starts and ends with it) but never as a mixing one.
    """
    G = nx.DiGraph()
    G.add_nodes_from(M.alphabet)
    rows, cols = np.nonzero(M.entries)
    G.add_edges_from((M.alphabet[i], M.alphabet[j]) for i, j in zip(rows, cols))
    comps = []
    for scc in nx.strongly_connected_components(G):
        members = tuple(sorted(scc, key=M.index))
        period = _period(M, set(members))
        comps.append(Component(members, period, True, period == 1))
    comps.sort(key=lambda c: M.index(c.symbols[0]))
    return ComponentDecomposition(tuple(comps))


def is_irreducible_set(M: TransitionMatrix, symbols) -> bool:
    """Is every ordered pair joined by a word using only ``symbols``?"""
    symbols = list(symbols)
    if not symbols:
        return False
    sub = M.restricted(symbols)
    return len(components(sub).components) == 1


def is_mixing_set(M: TransitionMatrix, symbols) -> bool:
    symbols = list(symbols)
    if not symbols:
        return False
    comps = components(M.restricted(symbols)).components
    return len(comps) == 1 and comps[0].mixing


def shortest_path(M: TransitionMatrix, start: str, targets, within) -> Optional[list]:
    """BFS path ``start .. t`` inside ``within`` ending in ``targets``.

    Successors are visited in alphabet order, so ties resolve to the
    lexicographically smallest path.  A path of length one means ``start``
    is itself a target.
    """
    targets = set(targets)
    if start in targets:
        return [start]
    parent = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in M.successors(u, within):
            if v in parent:
                continue
            parent[v] = u
            if v in targets:
                path = [v]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(v)
    return None


def path_of_length(M: TransitionMatrix, a: str, b: str, steps: int, within) -> Optional[list]:
    """Lexicographically least path from ``a`` to ``b`` with exactly ``steps`` edges."""
    within = set(within)
    # reach[t] = symbols reaching b in exactly t steps
    reach = [{b}]
    for _ in range(steps):
        prev = reach[-1]
        reach.append({u for u in within if any(v in prev for v in M.successors(u, within))})
    if a not in reach[steps]:
        return None
    path = [a]
    for t in range(steps - 1, -1, -1):
        nxt = next(v for v in M.successors(path[-1], within) if v in reach[t])
        path.append(nxt)
    return path


def primitive_exponent(M: TransitionMatrix, symbols) -> Optional[int]:
    """Least ``k`` with the restricted matrix power ``k`` entrywise positive."""
    sub = M.restricted(symbols).entries.astype(np.int64)
    n = sub.shape[0]
    bound = n * n - 2 * n + 2
    power = sub.copy()
    for k in range(1, max(bound, 1) + 1):
        if power.all():
            return k
        power = np.minimum(power @ sub, 1)
    return None


# --------------------------------------------------------------------------
# essential symbols

BY_CLASS = "essential-by-class"
BY_REACHABILITY = "essential-by-reachability"
BY_ISOLATION = "essential-by-isolation"
UP_TO_BOUND = "inessential-up-to-bound"
CERTIFIED_INESSENTIAL = "inessential"


@dataclass(frozen=True)
class SymbolStatus:
    kind: str
    word: Optional[tuple] = None

    @property
    def essential(self) -> bool:
        return self.kind.startswith("essential")


@dataclass(frozen=True)
class EssentialReport:
    essential: frozenset
    status: dict
    bound: int
    beyond_bound: tuple = ()     # symbols whose witness word is longer than the bound

    @property
    def undecided(self) -> tuple:
        return tuple(a for a, s in self.status.items() if s.kind == UP_TO_BOUND)

    @property
    def caveat(self) -> bool:
        return bool(self.undecided or self.beyond_bound)


def _point_of(mm: MarkovMultiMap, a: str):
    s = mm[a]
    return (s.domain.lo, s.range.lo)


def _graph_labels(mm: MarkovMultiMap, x, y) -> frozenset:
    return frozenset(s.name for s in mm.symbols if s.closed_graph_contains(x, y))


def _arc_labels_step(mm, M, prev: Optional[frozenset], x, y) -> frozenset:
    labels = _graph_labels(mm, x, y)
    if prev is None:
        return labels
    return frozenset(b for b in labels if any(M(a, b) for a in prev))


def word_trajectory(mm: MarkovMultiMap, word) -> tuple:
    """The unique trajectory of a word made of point symbols."""
    pts = [_point_of(mm, word[0])[0]]
    for a in word:
        x, y = _point_of(mm, a)
        if x != pts[-1]:
            raise ValueError(f"word {word} is not a chain of graph points")
        pts.append(y)
    return tuple(pts)


def is_isolated(mm: MarkovMultiMap, M: TransitionMatrix, points) -> bool:
    """No labelling of ``points`` by an admissible word ends in an arc symbol.

    That is exactly when the trajectory is an isolated point of the space of
    finite trajectories of its length.
    """
    arcs = set(mm.of_class(A0, A1))
    labels = None
    for x, y in zip(points, points[1:]):
        labels = _arc_labels_step(mm, M, labels, x, y)
        if not labels:
            return True
    return not (labels & arcs)


def _reaches(M: TransitionMatrix, start: str, targets: set) -> bool:
    return shortest_path(M, start, targets, set(M.alphabet)) is not None


def _isolating_search(mm, M, symbols, live):
    """Exhaustive search over point-symbol words through a finite automaton.

    A state is (last symbol, set of admissible arc labellings so far).  The
    labelling set evolves deterministically, so the reachable state space is
    finite and a word through ``a`` ending in an isolated trajectory exists
    iff a reachable state on ``a`` leads to an accepting state.  Returns one
    witness word (BFS prefix plus BFS suffix) for every symbol that has one.
    """
    arcs = set(mm.of_class(A0, A1))
    pts = set(symbols)

    def step(state, b):
        _, labels = state
        x, y = _point_of(mm, b)
        return (b, _arc_labels_step(mm, M, labels, x, y))

    starts = []
    for a in M.alphabet:
        if a in pts:
            x, y = _point_of(mm, a)
            starts.append((a, _graph_labels(mm, x, y)))
    parent = {s: None for s in starts}
    order = list(starts)
    queue = deque(starts)
    while queue:
        s = queue.popleft()
        for b in M.successors(s[0], pts):
            t = step(s, b)
            if t not in parent:
                parent[t] = s
                order.append(t)
                queue.append(t)

    def accepting(s):
        return s[0] in live and not (s[1] & arcs)

    children = {s: [] for s in order}
    for s in order:
        for b in M.successors(s[0], pts):
            children[s].append(step(s, b))
    # BFS distance to an accepting state on the reversed graph
    rev = {s: [] for s in order}
    for s in order:
        for t in children[s]:
            rev[t].append(s)
    to_accept = {s: None for s in order if accepting(s)}
    queue = deque(s for s in order if accepting(s))
    while queue:
        t = queue.popleft()
        for s in rev[t]:
            if s not in to_accept:
                to_accept[s] = t
                queue.append(s)

    def prefix(s):
        out = []
        while s is not None:
            out.append(s[0])
            s = parent[s]
        return out[::-1]

    witnesses = {}
    for s in order:  # BFS order: shortest prefixes first
        if s in to_accept and s[0] not in witnesses:
            word = prefix(s)
            t = s
            while to_accept[t] is not None:
                t = to_accept[t]
                word.append(t[0])
            witnesses[s[0]] = tuple(word)
    return witnesses


def essential_alphabet(mm: MarkovMultiMap, M: TransitionMatrix, bound: Optional[int] = None,
                       certify: bool = True) -> EssentialReport:
    """Classify every symbol as essential or not.

    Interval and vertical symbols are essential outright.  A point symbol is
    essential when it can reach an arc symbol, or when some word through it
    ending in point symbols has an isolated trajectory.  Only the trailing
    run of point symbols matters for isolation, so the bounded search runs
    over point-symbol words of length at most ``bound``.  With ``certify`` the
    remaining symbols are settled by an exhaustive automaton search.
    """
    if bound is None:
        bound = len(M.alphabet) + 1
    if bound < 1:
        raise ValueError("bound must be positive")
    arcs = set(mm.of_class(A0, A1))
    status: dict = {}
    for a in M.alphabet:
        if a in arcs:
            status[a] = SymbolStatus(BY_CLASS)
        elif _reaches(M, a, arcs):
            status[a] = SymbolStatus(BY_REACHABILITY)
    pending = [a for a in M.alphabet if a not in status]
    points = set(mm.of_class(A2))
    live = live_symbols(M)

    if pending:
        # bounded search, shortest words first, lexicographic within a length
        frontier = [(a,) for a in M.alphabet if a in points]
        for length in range(1, bound + 1):
            for w in frontier:
                if w[-1] not in live or not any(a in pending for a in w):
                    continue
                if not any(a not in status for a in w):
                    continue
                if is_isolated(mm, M, word_trajectory(mm, w)):
                    for a in w:
                        if a not in status:
                            status[a] = SymbolStatus(BY_ISOLATION, w)
            if all(a in status for a in pending) or length == bound:
                break
            frontier = [w + (b,) for w in frontier for b in M.successors(w[-1], points)]

    beyond = []
    rest = [a for a in pending if a not in status]
    if rest and certify:
        found = _isolating_search(mm, M, points, live)
        for a in rest:
            if a in found:
                status[a] = SymbolStatus(BY_ISOLATION, found[a])
                beyond.append(a)
            else:
                status[a] = SymbolStatus(CERTIFIED_INESSENTIAL)
    for a in rest:
        status.setdefault(a, SymbolStatus(UP_TO_BOUND))
    ordered = {a: status[a] for a in M.alphabet}
    essential = frozenset(a for a, s in ordered.items() if s.essential)
    return EssentialReport(essential, ordered, bound, tuple(beyond))


# --------------------------------------------------------------------------
# IC / MC

IC_BASIS = "irreducibility condition: one irreducible component holds every essential symbol"
MC_BASIS = "mixing condition: one mixing component holds every essential symbol"


def check_conditions(M: TransitionMatrix, essential: EssentialReport,
                     decomp: ComponentDecomposition) -> dict:
    ess = essential.essential
    note = ("assumes the symbols %s are inessential" % ", ".join(essential.undecided)
            if essential.undecided else None)
    comp = decomp.containing(ess)
    if comp is not None:
        ic = Verdict(HOLDS, IC_BASIS, list(comp.symbols), caveat=note)
    else:
        homes = sorted({decomp.of(a).symbols for a in ess}, key=lambda c: M.index(c[0]))
        ic = Verdict(FAILS, IC_BASIS, [list(c) for c in homes], caveat=note)
    if comp is not None and comp.mixing:
        mc = Verdict(HOLDS, MC_BASIS, list(comp.symbols), caveat=note)
    else:
        mc = Verdict(FAILS, MC_BASIS, list(comp.symbols) if comp else None, caveat=note)
    return {"IC": ic, "MC": mc}
