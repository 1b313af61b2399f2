"""Acceptance criteria 1-8, each recorded as one PASS/FAIL summary line."""

import random
import time
from fractions import Fraction as F

from markovmaps.coding import compose_inverse, iter_window_intervals
from markovmaps.core import A0, A2, BranchSymbol, ExactInterval, check_proper_parametrization
from markovmaps.dynamics import (
    classify, connect_witness, eventual_range, periodic_witness, sample_forward, specification_witness,
)
from markovmaps.fixtures import load_fixture
from markovmaps.sft import TransitionMatrix, build_transition_matrix, language

from .test_coding import cc_of
from .test_sft import oracle_disagreements, random_matrix


def test_criterion_1_mixing_fixture_end_to_end(criterion):
    start = time.perf_counter()
    mm = load_fixture("example-7-1")
    r = classify(mm)
    elapsed = time.perf_counter() - start
    comp = r.decomposition.containing(mm.of_class(A0))
    ok = (
        r.essential.essential == {"a1", "a2", "a3"}
        and comp.symbols == ("a1", "a2", "a3") and comp.mixing
        and r.conditions["MC"].holds
        and r.coding.status == "holds" and r.coding.gamma == F(1, 2)
        and r.modulus.constant == 1
        and r.forward["specification"].holds and r.inverse["specification"].holds
        and elapsed < 1.0
    )
    criterion(1, "example-7-1 end-to-end", ok, f"{elapsed:.3f}s")
    assert ok


def test_criterion_2_language(criterion):
    mm = load_fixture("example-7-1")
    got = {"".join(w) for w in language(build_transition_matrix(mm), 2, mm.of_class(A0))}
    ok = got == {"a1a1", "a1a2", "a1a3", "a2a2", "a2a3", "a3a1"}
    criterion(2, "example-7-1 two-letter language", ok)
    assert ok


def test_criterion_3_four_value_fixture(criterion):
    start = time.perf_counter()
    mm = load_fixture("example-7-2")
    r = classify(mm)
    verdicts = (
        r.conditions["MC"].holds
        and r.coding.status == "fails" and r.coding.D_set == ()
        and r.forward["transitive"].status == "unknown" and bool(r.forward["transitive"].caveat)
    )
    rnd = random.Random(3)
    law = True
    for seed in range(100):
        z = sample_forward(mm, F(rnd.randrange(0, 1001), 1000), 50, seed)
        y = min(z)
        law &= len(set(z)) <= 4 and set(z) <= {y, F(1, 2) - y, F(1, 2) + y, 1 - y}
    elapsed = time.perf_counter() - start
    ok = verdicts and law and elapsed < 2.0
    criterion(3, "example-7-2 verdicts and four-value law", ok, f"{elapsed:.3f}s")
    assert ok


def test_criterion_4_component_oracle(criterion):
    bad = 0
    for name in ("example-7-1", "example-7-2"):
        bad += oracle_disagreements(build_transition_matrix(load_fixture(name)))
    rnd = random.Random(4)
    for _ in range(200):
        n = rnd.randint(1, 8)
        bad += oracle_disagreements(TransitionMatrix(tuple(f"s{i}" for i in range(n)), random_matrix(rnd, n)))
    criterion(4, "component oracle agreement", bad == 0, f"{bad} disagreements")
    assert bad == 0


def test_criterion_5_witness_suite(criterion):
    r = classify(load_fixture("example-7-1"))
    mm = r.mm
    rnd = random.Random(5)

    def traj():
        return sample_forward(mm, F(rnd.randrange(0, 1025), 1024), rnd.randint(1, 5), rnd.randrange(2 ** 32))

    failures = 0
    for _ in range(50):
        w = connect_witness(r, traj(), traj(), rnd.choice([F(1, 10), F(1, 100)]))
        failures += not all(w.self_check(mm).values())
    for _ in range(20):
        w = periodic_witness(r, traj(), rnd.choice([F(1, 10), F(1, 100)]))
        failures += not all(w.self_check(mm).values())
    for _ in range(10):
        k = rnd.randint(1, 4)
        gaps = [r.N2 + rnd.randint(0, 3) for _ in range(k)]
        w = specification_witness(r, [traj() for _ in range(k)], gaps, rnd.choice([F(1, 10), F(1, 100)]))
        failures += not all(w.self_check(mm).values())
    criterion(5, "witness self-checks (50 connect, 20 periodic, 10 specification)", failures == 0,
              f"{failures} failures")
    assert failures == 0


def test_criterion_6_contraction_and_nesting(criterion):
    mm = load_fixture("example-7-1")
    M, cc = cc_of(mm)
    Z = cc.window_shift(M)
    contraction = all(
        max(c.interval.length for c in iter_window_intervals(mm, Z, n)) <= cc.gamma ** (n // (cc.window + 1))
        for n in range(1, 13))
    nesting = True
    for name in ("example-7-1", "example-7-2"):
        fx = load_fixture(name)
        Mx = build_transition_matrix(fx)
        for n in range(1, 8):
            for w in language(Mx, n):
                c = compose_inverse(fx, w)
                for b in Mx.successors(w[-1]):
                    nesting &= c.extend(fx, b).interval.issubset(c.interval)
    ok = contraction and nesting
    criterion(6, "contraction bound (n <= 12) and nesting (length <= 8)", ok)
    assert ok


def test_criterion_7_eventual_range(criterion):
    full = (ExactInterval(F(0), F(1)),)
    ok = all(eventual_range(load_fixture(n)).intervals == full for n in ("example-7-1", "example-7-2"))
    mm = load_fixture("half-tent")
    W = eventual_range(mm)
    ok = ok and not W.full and W.invariant and W.iterations <= len(mm.partition) * len(mm.symbols)
    criterion(7, "eventual range", ok, f"non-surjective fixture stabilized in {W.iterations} iterations")
    assert ok


def test_criterion_8_validator_sensitivity(criterion):
    mm = load_fixture("example-7-1")
    ok = True
    for a in mm.of_class(A2):
        s = mm[a]
        rep = check_proper_parametrization(mm.without(a))
        ok &= not rep and rep.uncovered == (s.domain.lo, s.range.lo)
    for a in mm.of_class(A0):
        s = mm[a]
        dup = BranchSymbol(a + "_dup", A0, s.domain, s.range, s.orientation)
        rep = check_proper_parametrization(mm.with_symbols(mm.symbols + (dup,)))
        if rep or rep.overlap is None:
            ok = False
            continue
        p, q, (x, y) = rep.overlap
        ok &= {p, q} == {a, dup.name} and s.open_graph_contains(x, y) and dup.open_graph_contains(x, y)
    criterion(8, "validator sensitivity to deleted points and duplicated segments", ok)
    assert ok
