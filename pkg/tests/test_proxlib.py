import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from varsmooth import proxlib
from varsmooth.spaces import BlockVector, ParameterError, Shape, norm2

coord = st.floats(-20, 20, allow_nan=False).map(lambda v: 0.0 if abs(v) < 1e-100 else v)
step = st.floats(1e-3, 1e2)


def v(*vals):
    return BlockVector(np.array(vals, dtype=float))


def brute_prox_1d(fun, x, gamma, lo=-10, hi=10, num=2_000_001):
    """Grid minimizer of fun(p) + (p - x)^2 / (2 gamma)."""
    p = np.linspace(lo, hi, num)
    return p[np.argmin(fun(p) + (p - x) ** 2 / (2 * gamma))]


def test_l1_prox_examples_against_grid():
    g = proxlib.l1_norm(1.0)
    grid = brute_prox_1d(np.abs, 2.0, 0.5)
    assert grid == pytest.approx(1.5, abs=1e-5)
    assert g.prox(v(2.0), 0.5).blocks[0][0] == 1.5
    assert brute_prox_1d(np.abs, 0.3, 0.5) == pytest.approx(0.0, abs=1e-5)
    assert g.prox(v(0.3), 0.5).blocks[0][0] == 0.0
    assert g.prox(v(0.0), 3.0).blocks[0][0] == 0.0


def test_l1_eval_and_lipschitz():
    g = proxlib.l1_norm(2.0)
    assert g.eval(v(1.0, -3.0)) == 8.0
    assert g.lipschitz_on((Shape((4, 4)),)) == pytest.approx(2.0 * 4.0)
    with pytest.raises(ParameterError):
        proxlib.l1_norm(-1.0)


def test_l2_dist_examples():
    g = proxlib.l2_dist(1.0, v(0.0, 0.0))
    np.testing.assert_allclose(g.prox(v(3.0, 4.0), 1.0).blocks[0], [2.4, 3.2], rtol=1e-15)
    assert g.prox(v(3.0, 4.0), 10.0).array_equal(v(0.0, 0.0))
    b = v(1.0, -2.0)
    assert proxlib.l2_dist(3.0, b).prox(b, 0.7).array_equal(b)
    assert proxlib.l2_dist(2.5, b).eval(v(4.0, 2.0)) == 2.5 * 5.0
    assert proxlib.l2_dist(2.5, b).lipschitz == 2.5
    with pytest.raises(ParameterError):
        proxlib.l2_dist(0.0, b)


def test_l2_prox_against_2d_grid():
    b = v(0.5, -0.25)
    g = proxlib.l2_dist(1.3, b)
    x, gamma = v(1.7, 0.9), 0.6
    t = np.linspace(-2, 3, 1001)
    P = np.stack(np.meshgrid(t, t, indexing="ij"), -1)
    obj = 1.3 * np.linalg.norm(P - b.blocks[0], axis=-1) + np.sum((P - x.blocks[0]) ** 2, -1) / (2 * gamma)
    best = P.reshape(-1, 2)[np.argmin(obj)]
    np.testing.assert_allclose(g.prox(x, gamma).blocks[0], best, atol=5e-3)


def test_zero_function():
    g = proxlib.zero_function()
    x = v(1.0, -2.0)
    assert g.prox(x, 1.0).array_equal(x)
    assert g.prox(x, 1e9).array_equal(x)
    assert g.eval(x) == 0.0
    assert g.lipschitz == 0.0
    assert norm2(proxlib.conj_prox(g, x, 0.3)) == 0.0


def test_conj_prox_l1_is_box_projection():
    g = proxlib.l1_norm(1.0)
    assert proxlib.conj_prox(g, v(2.0, -0.5), 1.0).array_equal(v(1.0, -0.5))


def test_zero_step_rejected():
    for g in (proxlib.l1_norm(), proxlib.l2_dist(1.0, v(0.0)), proxlib.zero_function()):
        with pytest.raises(ParameterError):
            g.prox(v(1.0), 0.0)
        with pytest.raises(ParameterError):
            proxlib.conj_prox(g, v(1.0), 0.0)


def test_prox_works_blockwise_over_multiple_blocks():
    g = proxlib.l1_norm(1.0)
    x = BlockVector(np.array([[3.0, -0.5]]), np.array([-2.0]))
    out = g.prox(x, 1.0)
    assert out.blocks[0].tolist() == [[2.0, 0.0]]
    assert out.blocks[1].tolist() == [-1.0]


def functions(d):
    return st.one_of(
        st.floats(0.0, 5.0).map(proxlib.l1_norm),
        st.tuples(st.floats(0.1, 5.0), arrays(float, d, elements=coord)).map(
            lambda ab: proxlib.l2_dist(ab[0], BlockVector(ab[1]))),
        st.just(proxlib.zero_function()),
    )


@settings(max_examples=300, deadline=None)
@given(functions(4), arrays(float, 4, elements=coord), arrays(float, 4, elements=coord), step)
def test_prox_nonexpansive(g, a, b, gamma):
    x, y = BlockVector(a), BlockVector(b)
    assert norm2(g.prox(x, gamma) - g.prox(y, gamma)) <= norm2(x - y) * (1 + 1e-12) + 1e-12


@settings(max_examples=300, deadline=None)
@given(functions(3), arrays(float, 3, elements=coord), step)
def test_moreau_decomposition(g, a, gamma):
    x = BlockVector(a)
    split = g.prox(x, gamma) + gamma * proxlib.conj_prox(g, x / gamma, 1.0 / gamma)
    assert norm2(x - split) <= 1e-12 * (1 + norm2(x))


@settings(max_examples=300, deadline=None)
@given(functions(3), arrays(float, 3, elements=coord), step)
def test_closed_form_conj_prox_matches_decomposition(g, a, gamma):
    x = BlockVector(a)
    closed = proxlib.conj_prox(g, x, gamma)
    route = proxlib.conj_prox_decomposition(g, x, gamma)
    assert norm2(closed - route) <= 1e-12 * (1 + norm2(route) + gamma * norm2(x))


@settings(max_examples=300, deadline=None)
@given(functions(5), arrays(float, 5, elements=coord), step)
def test_envelope_gradient_stays_in_lipschitz_ball(g, a, gamma):
    x = BlockVector(a)
    L = g.lipschitz_on((Shape((5,)),))
    assert norm2((x - g.prox(x, gamma)) / gamma) <= L * (1 + 1e-12) + 1e-12


@settings(max_examples=200, deadline=None)
@given(functions(2), arrays(float, 2, elements=coord), arrays(float, 2, elements=coord))
def test_lipschitz_constant_bounds_differences(g, a, b):
    x, y = BlockVector(a), BlockVector(b)
    L = g.lipschitz_on((Shape((2,)),))
    assert abs(g.eval(x) - g.eval(y)) <= L * norm2(x - y) * (1 + 1e-12) + 1e-12


@settings(max_examples=60, deadline=None)
@given(functions(1), coord, step)
def test_prox_beats_1d_grid(g, x0, gamma):
    x = v(x0)
    p = g.prox(x, gamma)

    def objective(q):
        return g.eval(v(q)) + (q - x0) ** 2 / (2 * gamma)

    best = objective(p.blocks[0][0])
    centre = p.blocks[0][0]
    width = 2 * abs(x0 - centre) + gamma + 1
    for q in np.linspace(centre - width, centre + width, 801):
        assert objective(q) - best >= -1e-9
