import random
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from markovmaps.core import A0, ExactInterval, evaluate, is_trajectory, merge_intervals
from markovmaps.dynamics import (
    AnalysisError, PreconditionError, classify, connect_witness, eventual_range, metric_d,
    periodic_witness, restrict_to, sample_forward, special_approximation, specification_offsets,
    specification_witness,
)
from markovmaps.fixtures import NAMES, load_fixture
from markovmaps.verdict import FAILS, HOLDS, UNKNOWN


@pytest.fixture(scope="module")
def r71():
    return classify(load_fixture("example-7-1"))


@pytest.fixture(scope="module")
def r72():
    return classify(load_fixture("example-7-2"))


def approx(report, x, eps):
    return special_approximation(report.mm, report.matrix, report.essential.essential, x, eps)


def test_metric():
    assert metric_d((F(1, 3), F(1, 5)), (F(1, 3), F(1, 5))) == 0
    assert metric_d((0, 0), (1, 0)) == 1
    assert metric_d((0, 1), (0, 0)) == F(1, 2)
    with pytest.raises(ValueError):
        metric_d((0,), (0, 0))


def test_special_approximation_examples(r71):
    mm = r71.mm
    lt = approx(r71, (F(1, 4), F(1, 2), 1), F(1, 10))
    assert lt.word == ("a1", "a1") and lt.special_in(mm)
    assert all(abs(a - b) < F(1, 10) for a, b in zip(lt.points, (F(1, 4), F(1, 2), 1)))
    assert lt.points[0] != F(1, 4)
    lt = approx(r71, (F(1, 8), F(1, 4)), F(1, 10))
    assert lt.points == (F(1, 8), F(1, 4))
    lt = approx(r71, (0, 0), F(1, 100))
    assert lt.word == ("a1",) and lt.special_in(mm) and 0 < lt.points[0] < F(1, 100)
    assert lt.points[1] == 2 * lt.points[0]


def test_special_approximation_rejects_non_trajectories(r71):
    with pytest.raises(ValueError):
        approx(r71, (F(1, 4), F(1, 3)), F(1, 10))


def test_sample_forward(ex71, ex72):
    z = sample_forward(ex71, F(1, 3), 5, seed=3)
    assert z[1] == F(2, 3) and is_trajectory(ex71, z) and len(z) == 5
    assert sample_forward(ex71, F(1, 3), 1, seed=3) == (F(1, 3),)
    assert sample_forward(ex71, F(1, 2), 20, 9) == sample_forward(ex71, F(1, 2), 20, 9)
    z = sample_forward(ex72, F(1, 5), 50, seed=1)
    assert len(set(z)) <= 4


def four_value_law(z) -> bool:
    y = min(z)
    return len(set(z)) <= 4 and set(z) <= {y, F(1, 2) - y, F(1, 2) + y, 1 - y}


def test_four_value_law(ex72):
    rnd = random.Random(72)
    for seed in range(100):
        x0 = F(rnd.randrange(0, 1001), 1000)
        assert four_value_law(sample_forward(ex72, x0, 50, seed))


def test_eventual_range_examples(ex71, ex72):
    full = (ExactInterval(F(0), F(1)),)
    assert eventual_range(ex71).intervals == full
    assert eventual_range(ex72).intervals == full
    W = eventual_range(load_fixture("half-tent"))
    assert W.intervals == (ExactInterval(F(0), F(1, 2)),) and W.invariant and not W.full


@pytest.mark.parametrize("name", NAMES)
def test_eventual_range_invariant(name):
    mm = load_fixture(name)
    W = eventual_range(mm)
    assert W.invariant
    image = merge_intervals(
        iv for x in set(W.points) | {p for c in W.cells for p in (c.lo, c.hi)} for iv in evaluate(mm, x))
    for iv in image:
        assert any(iv.issubset(w) for w in W.intervals)


def test_restriction_of_half_tent():
    mm = load_fixture("half-tent")
    sub = restrict_to(mm, ExactInterval(F(0), F(1, 2)))
    assert sub.partition == (0, F(1, 2), 1)
    assert {s.name for s in sub.symbols if s.cls == A0} == {"a", "b"}
    assert eventual_range(sub).full


def test_classify_mixing_fixture(r71):
    assert r71.essential.essential == {"a1", "a2", "a3"}
    for side in (r71.forward, r71.inverse):
        assert all(v.status == HOLDS for v in side.values())
    assert r71.N2 == 1 and not r71.caveats


def test_classify_four_value_fixture(r72):
    assert r72.conditions["MC"].holds and r72.conditions["CC"].fails
    t = r72.forward["transitive"]
    assert t.status == UNKNOWN and t.caveat
    assert r72.caveats


def test_classify_split_components():
    r = classify(load_fixture("split-components"))
    for name in ("transitive", "devaney", "mixing", "specification"):
        assert r.forward[name].status == FAILS


def test_classify_half_tent():
    r = classify(load_fixture("half-tent"))
    assert all(v.status == FAILS for v in r.forward.values())
    assert r.inverse["specification"].status == HOLDS
    assert any("restricted" in c for c in r.caveats)


def test_classify_rejects_invalid(ex71):
    with pytest.raises(AnalysisError) as exc:
        classify(ex71.without("a2", "a3"))
    assert exc.value.violations
    with pytest.raises(AnalysisError):
        classify(ex71.without("a4"))


@pytest.mark.parametrize("name", [n for n in NAMES if n != "identity"])
def test_reports_consistent(name):
    r = classify(load_fixture(name))
    assert r.consistent()
    for side in (r.conditions, r.forward, r.inverse):
        for v in side.values():
            assert v.status in (HOLDS, FAILS, UNKNOWN)
            if v.status != UNKNOWN:
                assert v.basis


def test_connect_examples(r71):
    mm = r71.mm
    w = connect_witness(r71, (F(1, 4), F(1, 2)), (F(3, 4), F(3, 4)), F(1, 10))
    assert all(w.self_check(mm).values())
    x = (F(1, 3), F(2, 3))
    assert all(connect_witness(r71, x, x, F(1, 7)).self_check(mm).values())
    assert all(connect_witness(r71, x, (F(1, 5),), 2).self_check(mm).values())


def test_periodic_examples(r71):
    mm = r71.mm
    p = periodic_witness(r71, (F(1, 2), 1), F(1, 10))
    assert p.z[0] == p.z[-1] and all(p.self_check(mm).values())
    p = periodic_witness(r71, (0,), F(1, 4))
    assert abs(p.z[0]) < F(1, 4) and all(p.self_check(mm).values())


def test_periodic_dense_evidence(r71):
    rnd = random.Random(16)
    for _ in range(20):
        x = sample_forward(r71.mm, F(rnd.randrange(0, 257), 256), rnd.randint(1, 5), rnd.randrange(10 ** 6))
        assert all(periodic_witness(r71, x, F(1, 16)).self_check(r71.mm).values())


def test_specification_examples(r71):
    mm = r71.mm
    segs = [(F(1, 4), F(1, 2)), (F(3, 4), F(3, 4))]
    s = specification_witness(r71, segs, [r71.N2, r71.N2], F(1, 10))
    assert all(s.self_check(mm).values())
    s = specification_witness(r71, segs[:1], [3], F(1, 10))
    assert all(s.self_check(mm).values()) and s.offsets == (0,)
    s = specification_witness(r71, [segs[0], segs[0]], [2, 2], F(1, 20))
    assert all(s.self_check(mm).values())


def test_specification_schedule():
    assert specification_offsets([3, 1, 2], [2, 4, 1], 5) == (0, 9, 18)


def test_witness_preconditions(r71, r72):
    with pytest.raises(PreconditionError, match="CC: fails"):
        periodic_witness(r72, (0,), 1)
    with pytest.raises(PreconditionError, match="CC: fails"):
        connect_witness(r72, (0,), (0,), 1)
    with pytest.raises(PreconditionError, match="specification: unknown"):
        specification_witness(r72, [(0,)], [5], 1)
    with pytest.raises(PreconditionError, match="N2 = 1"):
        specification_witness(r71, [(0,)], [0], 1)


traj_params = st.tuples(st.integers(0, 512), st.integers(1, 5), st.integers(0, 10 ** 6))


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(traj_params, traj_params, st.sampled_from([F(1, 2), F(1, 10), F(1, 100), F(1, 1000)]))
def test_witness_properties(r71, a, b, eps):
    mm = r71.mm
    x = sample_forward(mm, F(a[0], 512), a[1], a[2])
    y = sample_forward(mm, F(b[0], 512), b[1], b[2])
    assert all(connect_witness(r71, x, y, eps).self_check(mm).values())
    assert all(periodic_witness(r71, x, eps).self_check(mm).values())
    s = specification_witness(r71, [x, y], [r71.N2, r71.N2 + b[1]], eps)
    assert all(s.self_check(mm).values())


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(traj_params, st.sampled_from([F(1, 3), F(1, 50)]))
def test_special_approximation_property(r71, a, eps):
    x = sample_forward(r71.mm, F(a[0], 512), a[1], a[2])
    lt = approx(r71, x, eps)
    assert lt.special_in(r71.mm) and lt.labeled_in(r71.mm)
    assert set(lt.word) <= r71.essential.essential
    assert all(abs(p - q) < eps for p, q in zip(lt.points, x))
