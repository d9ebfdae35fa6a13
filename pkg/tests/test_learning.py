from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoslab import dynamics, learning as ln
from chaoslab import tm
from chaoslab.errors import ClassifierError, ConfigError, FunctionalError, UsageError

F = Fraction

TRAINING = [(F(1, 8), 1), (F(7, 8), 0), (F(3, 16), 1), (F(3, 8), 1),
            (F(5, 8), 0), (F(1, 16), 1), (F(3, 4), 0), (F(1, 4), 1)]


def grid_mask(depth, lo_num, hi_num, lo_den, hi_den):
    """Bitmap of k/2**depth in [lo, hi], by integer cross-multiplication."""
    size = 2**depth
    return tuple(int(lo_num * size <= k * lo_den and k * hi_den <= hi_num * size) for k in range(size + 1))


def test_grid():
    g = ln.ProbeGrid.dyadic(3)
    assert len(g) == 9 and g.points[4] == F(1, 2)
    assert len(ln.ProbeGrid.dyadic()) == 1025
    with pytest.raises(UsageError):
        ln.ProbeGrid((F(1, 2), F(1, 4)))


def test_accept_set_examples():
    g = ln.ProbeGrid.dyadic(3)
    assert ln.accept_set(ln.interval_classifier(0, F(1, 2)), g) == (1, 1, 1, 1, 1, 0, 0, 0, 0)
    assert ln.accept_set(ln.Classifier(lambda x: 0), g) == (0,) * 9


def test_accept_set_cantor_depth2():
    from chaoslab import fractal
    cover = fractal.ifs_cover(fractal.FunctionSystem.cantor(), 2)
    g = ln.ProbeGrid.dyadic(4)
    # brute force: k/16 against the four closed ninths-intervals
    ivs = [(0, 1), (2, 3), (6, 7), (8, 9)]
    expected = tuple(int(any(a * 16 <= 9 * k <= b * 16 for a, b in ivs)) for k in range(17))
    assert ln.accept_set(ln.Classifier(cover.__contains__), g) == expected


def test_classifier_error_index():
    g = ln.ProbeGrid.dyadic(2)
    bad = ln.Classifier(lambda x: 1 / (x - F(1, 2)) > 0)
    with pytest.raises(ClassifierError) as err:
        ln.accept_set(bad, g)
    assert err.value.index == 2


def test_parallel_accept_set_matches():
    g = ln.ProbeGrid.dyadic(10)
    c = ln.Classifier(lambda x: (x * 7) % 1 < F(1, 3))
    assert ln.accept_set(c, g, workers=4) == ln.accept_set(c, g)


def test_interval_model_round_trip():
    e = ln.encode_interval_model(F(1, 4), F(3, 4))
    assert e.length == 22 and e.base == 2
    from chaoslab.encoding import BINARY, GodelMap, derationalize
    assert ln.read_interval_model(derationalize(e, GodelMap(BINARY))) == (F(1, 4), F(3, 4))
    with pytest.raises(ConfigError):
        ln.encode_interval_model(F(1, 3), 1)


def test_constant_functional_fixed_point():
    L = ln.builtin_functional("constant", {"lo": "1/4", "hi": "3/4"})
    seq = ln.iterate_learner(L, L.seed, 6)
    assert seq[0] == L.seed
    assert len(set(seq[1:])) == 1 and L(seq[1]) == seq[1]


def test_oscillator_period_two():
    L = ln.builtin_functional("oscillator")
    seq = ln.iterate_learner(L, L.seed, 7)
    o = dynamics.Orbit(tuple(e.value for e in seq))
    assert dynamics.detect_period(o) == (0, 2)
    g = ln.ProbeGrid.dyadic(3)
    assert ln.accept_set(L.decode_model(seq[0]), g) == grid_mask(3, 0, 1, 1, 2)
    assert ln.accept_set(L.decode_model(seq[1]), g) == grid_mask(3, 1, 3, 4, 4)


def oracle_stump_thresholds(data, n, k=10):
    """Threshold numerators over 2**k, left stump, first-mistake update."""
    t = 0
    out = [0]
    for _ in range(n):
        for x, y in data:
            xn = int(x * 2**k)
            if (xn <= t) != bool(y):
                t = xn if y else max(xn - 1, 0)
                break
        out.append(t)
    return out


def test_stump_learner_matches_oracle():
    expected = oracle_stump_thresholds(TRAINING, 12)
    # seed is the training set with an empty model; thresholds then settle at 3/8
    assert expected == [0, 128, 192, 384, 384, 384, 384, 384, 384, 384, 384, 384, 384]
    L = ln.builtin_functional("stump_learner", {"training_set": [[str(x), y] for x, y in TRAINING]})
    seq = ln.iterate_learner(L, L.seed, 12)
    from chaoslab.encoding import BINARY, GodelMap, derationalize
    g = GodelMap(BINARY)
    got = [int(ln.read_interval_model(derationalize(e, g))[1] * 1024) for e in seq]
    assert got == expected
    stable = next(k for k in range(len(seq)) if all(e == seq[k] for e in seq[k:]))
    assert stable == 3 and stable <= 32
    final = L.decode_model(seq[-1])
    assert all(final(x) == y for x, y in TRAINING)
    assert ln.read_training_set(derationalize(seq[-1], g)) == TRAINING


def test_stump_right_polarity():
    data = [(F(1, 4), 0), (F(3, 4), 1), (F(1, 2), 1), (F(1, 8), 0)]
    L = ln.stump_learner_functional(data, "right")
    seq = ln.iterate_learner(L, L.seed, 10)
    final = L.decode_model(seq[-1])
    assert all(final(x) == y for x, y in data)
    assert seq[-1] == seq[-2]


def test_tm_functional_counts():
    L = ln.builtin_functional("tm_functional", {"machine": tm.load_machine("builtin:incrementer"), "resolution": 2})
    seq = ln.iterate_learner(L, L.seed, 5)
    from chaoslab.encoding import derationalize
    g = tm.load_machine("builtin:incrementer").godel_map()
    assert ["".join(derationalize(e, g)) for e in seq] == [
        "000000", "000001", "000010", "000011", "000100", "000101"]
    assert ln.read_interval_model(derationalize(seq[5], g), 2) == (0, F(5, 4))


def test_functional_errors():
    with pytest.raises(ConfigError):
        ln.builtin_functional("gradient_descent")
    with pytest.raises(ConfigError):
        ln.builtin_functional("stump_learner", {})
    with pytest.raises(ConfigError):
        ln.builtin_functional("constant", {"lo": "0", "bogus": 1})
    with pytest.raises(ConfigError):
        ln.builtin_functional("constant", {"lo": "one"})
    broken = ln.Functional(lambda e: None, "broken", lambda e: None)
    with pytest.raises(FunctionalError) as err:
        ln.iterate_learner(broken, ln.encode_interval_model(0, 0), 3)
    assert err.value.index == 1


def test_limit_sets_constant_trace():
    g = ln.ProbeGrid.dyadic(2)
    bits = (1, 0, 1, 1, 0)
    r = ln.limit_sets(ln.AcceptSetTrace(g, (bits,) * 6))
    assert r.limsup == r.liminf == bits and r.converged and r.first_stable_index == 0
    assert r.churn_series == (0,) * 5


def test_limit_sets_oscillator_trace():
    g = ln.ProbeGrid.dyadic(3)
    a, b = grid_mask(3, 0, 1, 1, 2), grid_mask(3, 1, 3, 4, 4)
    r = ln.limit_sets(ln.AcceptSetTrace(g, (a, b) * 5))
    assert r.liminf == tuple(x & y for x, y in zip(a, b)) == grid_mask(3, 1, 1, 4, 2)
    assert r.limsup == tuple(x | y for x, y in zip(a, b)) == grid_mask(3, 0, 3, 1, 4)
    assert not r.converged and r.first_stable_index is None


def test_limit_sets_nested_shrinking():
    g = ln.ProbeGrid.dyadic(2)
    rows = [(1, 1, 1, 1, 1), (1, 1, 1, 1, 0), (0, 1, 1, 1, 0), (0, 1, 1, 0, 0),
            (0, 1, 1, 0, 0), (0, 1, 1, 0, 0), (0, 1, 1, 0, 0), (0, 1, 1, 0, 0)]
    r = ln.limit_sets(ln.AcceptSetTrace(g, rows))
    assert r.limsup == r.liminf == rows[-1] and r.converged and r.first_stable_index == 3


def test_limit_sets_window_errors():
    g = ln.ProbeGrid.dyadic(1)
    t = ln.AcceptSetTrace(g, ((1, 0, 1),) * 3)
    for w in [(2, 2), (0, 4), (-1, 2)]:
        with pytest.raises(UsageError):
            ln.limit_sets(t, w)


def test_symmetric_difference_examples():
    g = ln.ProbeGrid.dyadic(4)
    a = grid_mask(4, 0, 1, 1, 2)
    r = ln.symmetric_difference_density(a, a, g, F(1, 16))
    assert r.delta_size == 0 and r.density_fraction == 0 and r.intersection_size == 9
    comp = tuple(1 - x for x in a)
    r = ln.symmetric_difference_density(a, comp, g, F(1, 16))
    assert r.delta_size == 17 and r.density_fraction == 1
    b = grid_mask(4, 1, 3, 4, 4)
    r = ln.symmetric_difference_density(a, b, g, F(1, 16))
    # [0, 1/4) and (1/2, 3/4] on sixteenths: k = 0..3 and 9..12
    assert r.delta_size == 8 and r.intersection_size == 5
    with pytest.raises(UsageError):
        ln.symmetric_difference_density(a, a[:-1], g, F(1, 16))


def test_intervals_of():
    g = ln.ProbeGrid.dyadic(2)
    assert ln.intervals_of((1, 1, 0, 0, 1), g) == [(0, F(1, 4)), (1, 1)]


# -- properties ------------------------------------------------------------

bitmaps5 = st.tuples(*[st.integers(0, 1)] * 5)


@given(st.lists(bitmaps5, min_size=1, max_size=12), st.data())
def test_limit_set_invariants(rows, data):
    g = ln.ProbeGrid.dyadic(2)
    start = data.draw(st.integers(0, len(rows) - 1))
    end = data.draw(st.integers(start + 1, len(rows)))
    r = ln.limit_sets(ln.AcceptSetTrace(g, rows), (start, end))
    assert all(i <= s for i, s in zip(r.liminf, r.limsup))
    assert r.converged == (r.limsup == r.liminf)
    if r.converged:
        tail = r.churn_series[r.tail_start - start:]
        assert all(c == 0 for c in tail)
        assert all(row == rows[end - 1] for row in rows[r.first_stable_index:end])


@given(st.lists(bitmaps5, min_size=1, max_size=6), st.integers(0, 6))
def test_monotone_traces_converge_once_settled(chain, settle):
    # S_{n+1} subset of S_n, held long enough that the tail sees only the limit
    rows = []
    current = (1,) * 5
    for b in chain:
        current = tuple(x & y for x, y in zip(current, b))
        rows.append(current)
    rows += [current] * (len(rows) + settle)
    r = ln.limit_sets(ln.AcceptSetTrace(ln.ProbeGrid.dyadic(2), rows))
    assert r.converged and r.limsup == r.liminf == current


@given(st.lists(bitmaps5, min_size=2, max_size=10))
def test_monotone_window_reports_chain_ends(chain):
    rows = []
    current = (1,) * 5
    for b in chain:
        current = tuple(x & y for x, y in zip(current, b))
        rows.append(current)
    r = ln.limit_sets(ln.AcceptSetTrace(ln.ProbeGrid.dyadic(2), rows))
    assert r.limsup == rows[r.tail_start] and r.liminf == rows[-1]


@pytest.mark.parametrize("name, params", [
    ("constant", {}),
    ("oscillator", {}),
    ("stump_learner", {"training_set": [[str(x), y] for x, y in TRAINING]}),
    ("tm_functional", {"machine": tm.load_machine("builtin:incrementer"), "resolution": 3}),
])
def test_composition_law_and_unit_interval(name, params):
    L = ln.builtin_functional(name, params)
    g = ln.ProbeGrid.dyadic(6)
    n = 10
    encodings, trace = ln.trace_accept_sets(L, L.seed, n, g, workers=3)
    direct = ln.accept_set(L.decode_model(ln.iterate_learner(L, L.seed, n)[n]), g)
    assert direct == trace.memberships[n]
    values = tuple(e.value for e in encodings)
    v = dynamics.chaos_verdict(dynamics.Orbit(values), (0, 1))
    assert v.within_interval
