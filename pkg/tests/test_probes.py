import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hitchin_flows.errors import IndexOutOfRange, NoCrossings, SharedAxis
from hitchin_flows.flows import FlowSpec, flow
from hitchin_flows.groups import ball_images, reduce_word, standard_splitting
from hitchin_flows.hyp_plane import axis, _normalizer
from hitchin_flows.lie_core import eigen_k, hilbert_length, jordan_projection, sym_embed
from hitchin_flows.probes import (
    Crossing,
    algebraic_intersection,
    angle_decay,
    angle_formula,
    angle_summand,
    bulge_shape_sum,
    burnside_dim,
    density_probe,
    enumerate_crossings,
    fd_derivative,
    invariant_bilinear,
    product_formula_rhs,
    recompute_crossings,
    relation_monitor,
    splitting_for,
    wolpert_sum,
)

ELL, LAM2 = hilbert_length(3), eigen_k(3, 2)
SYM2_FORM = np.array([[0, 0, 1], [0, -0.5, 0], [1, 0, 0]])


def brute_force_crossings(rep2, x, y, max_len=6):
    """Oracle: every reduced word g up to max_len, Euclidean geometry in the chart where axis(x) = (0, inf).

    Returns sorted |cos| of the crossing angles, one per distinct point on the closed geodesic of x.
    """
    X, Y = rep2(x), rep2(y)
    lx = 2 * np.arccosh(abs(np.trace(X)) / 2)
    T, _ = _normalizer(axis(X))
    ay = axis(Y)
    _, mats, _ = ball_images(rep2, max_len, min_len=0) if False else (None, *ball_images(rep2, max_len)[1:])
    mats = np.concatenate([np.eye(2)[None], mats])
    P = np.einsum("ij,kjl->kil", T, mats)
    p, q = P @ ay.start, P @ ay.end
    with np.errstate(divide="ignore"):
        pr, qr = p[:, 0] / p[:, 1], q[:, 0] / q[:, 1]
    hit = np.isfinite(pr) & np.isfinite(qr) & (pr * qr < 0)
    pts = {}
    for a, b in zip(pr[hit], qr[hit]):
        h = np.sqrt(-a * b)
        centre, radius = (a + b) / 2, abs(b - a) / 2
        s = (np.log(h) / lx) % 1.0
        key = (round(np.cos(2 * np.pi * s), 5), round(np.sin(2 * np.pi * s), 5))
        pts[key] = abs(centre) / radius
    return sorted(pts.values())


def words(pres, *texts):
    return [pres.word(t) for t in texts]


# -- crossings ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "x, y, count",
    [("a1", "a2", 0), ("a1", "b1", 1), ("b1", "a1", 1), ("a1 b1", "a1", 1),
     ("b1 a2", "a1 b1 A1 B1", 2), ("b1 a2 b1", "a1", 2)],
)
def test_crossing_counts_against_brute_force(octagon, pres, x, y, count):
    xs, ys = pres.word(x), pres.word(y)
    got = enumerate_crossings(octagon, xs, ys, L=8)
    assert len(got) == count
    oracle = brute_force_crossings(octagon, xs, ys)
    assert len(oracle) == count
    np.testing.assert_allclose(sorted(abs(np.cos(c.angle)) for c in got), oracle, atol=1e-8)


def test_crossing_count_stable_across_radius(octagon, pres):
    for x, y in (("a1", "a2"), ("a1", "b1"), ("b1 a2", "a1 b1 A1 B1")):
        counts = {len(enumerate_crossings(octagon, pres.word(x), pres.word(y), L=L)) for L in (6, 8, 10)}
        assert len(counts) == 1


def test_shared_axis(octagon, pres):
    with pytest.raises(SharedAxis):
        enumerate_crossings(octagon, pres.word("a1"), pres.word("a1"))


def test_crossing_geometry_consistent(octagon, pres):
    (c,) = enumerate_crossings(octagon, pres.word("b1"), pres.word("a1"))
    X, Yp = c.matrices(octagon)
    from hitchin_flows.hyp_plane import cross

    g = cross(axis(X), axis(Yp))
    assert g.angle == pytest.approx(c.angle) and g.sign == c.sign
    assert 0 < c.angle < np.pi
    assert abs(algebraic_intersection([c])) == 1


def test_reversing_y(octagon, pres):
    x, y = pres.word("b1 a2 b1"), pres.word("a1")
    fwd = enumerate_crossings(octagon, x, y)
    rev = enumerate_crossings(octagon, x, tuple(-a for a in reversed(y)))
    assert sorted((round(c.angle, 8), -c.sign) for c in fwd) == sorted((round(c.angle, 8), c.sign) for c in rev)
    assert algebraic_intersection(rev) == -algebraic_intersection(fwd)
    for c in fwd:
        r = c.reversed_y()
        assert (r.sign, r.angle) == (-c.sign, c.angle)


def test_orientation_covariance_of_product_formula(octagon, pres):
    x, y = pres.word("b1"), pres.word("a1")
    cr = enumerate_crossings(octagon, x, y)
    rev = [c.reversed_y() for c in cr]
    fwd_val = product_formula_rhs(cr, ELL, ELL, octagon, embed_n=3)
    # the flow of ell along y and along y^-1 is the same Hamiltonian flow
    assert product_formula_rhs(rev, ELL, ELL, octagon, embed_n=3) == pytest.approx(fwd_val, abs=1e-10)
    # negating the Hamiltonian negates the derivative
    assert product_formula_rhs(cr, ELL, -ELL, octagon, embed_n=3) == pytest.approx(-fwd_val, abs=1e-12)


# -- closed forms --------------------------------------------------------------------


def test_angle_summand_examples():
    assert angle_summand(np.pi / 2, 1, ELL, ELL) == pytest.approx(0.0, abs=1e-15)
    assert angle_summand(0.0, 1, ELL, ELL) == pytest.approx(2.0)
    assert angle_summand(np.pi / 3, 1, LAM2, LAM2) == pytest.approx(-1 / 12)


def test_angle_summand_direct_matrices():
    phi = 0.77
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    a, b, cc, d = c, s, -s, c
    R = np.array([[a * a, a * b, b * b], [2 * a * cc, a * d + b * cc, 2 * b * d], [cc * cc, cc * d, d * d]])
    val = np.trace(LAM2.alpha_vee @ R @ LAM2.alpha_vee @ np.linalg.inv(R))
    assert angle_summand(phi, 1, LAM2, LAM2) == pytest.approx(val)


@given(st.floats(0.01, np.pi - 0.01), st.sampled_from([1, -1]))
def test_closed_form_identities(phi, sign):
    assert angle_summand(phi, sign, ELL, ELL) == pytest.approx(2 * np.cos(phi), abs=1e-12)
    assert angle_summand(phi, sign, LAM2, LAM2) == pytest.approx(sign * (1 + 3 * np.cos(2 * phi)) / 6, abs=1e-12)
    assert angle_summand(phi, sign, ELL, LAM2) == pytest.approx(0.0, abs=1e-12)
    assert angle_summand(phi, sign, LAM2, ELL) == pytest.approx(0.0, abs=1e-12)


def test_sums_on_synthetic_crossings():
    cs = [Crossing((1,), (2,), (), 1, np.pi / 3), Crossing((1,), (2,), (3,), -1, np.pi / 4)]
    assert wolpert_sum(cs) == pytest.approx(2 * np.cos(np.pi / 3) + 2 * np.cos(np.pi / 4))
    assert bulge_shape_sum(cs) == pytest.approx((1 + 3 * np.cos(2 * np.pi / 3)) - 1)
    assert angle_formula(cs, ELL, ELL) == pytest.approx(wolpert_sum(cs))


@pytest.mark.parametrize("x, y", [("b1", "a1"), ("a1 b1", "a1"), ("b1 a2", "a1 b1 A1 B1"), ("b1 a2 b1", "a1")])
def test_matrix_route_equals_angle_route(octagon, pres, x, y):
    cr = enumerate_crossings(octagon, pres.word(x), pres.word(y))
    for f in (ELL, LAM2):
        for g in (ELL, LAM2):
            assert product_formula_rhs(cr, f, g, octagon, embed_n=3) == pytest.approx(angle_formula(cr, f, g), abs=1e-9)


# -- finite differences ---------------------------------------------------------------


def test_fd_self_curve_zero(octagon3, pres):
    split = standard_splitting(pres, "a1")
    r = fd_derivative(octagon3, FlowSpec(split, ELL), (split.curve, ELL))
    assert abs(r.central) < 1e-9 and abs(r.richardson) < 1e-9


def test_fd_twist_matches_product_formula(octagon, octagon3, pres):
    split = standard_splitting(pres, "a1")
    cr = enumerate_crossings(octagon, pres.word("b1"), split.curve)
    rhs = product_formula_rhs(cr, ELL, ELL, octagon3)
    fd = fd_derivative(octagon3, FlowSpec(split, ELL), (pres.word("b1"), ELL))
    assert fd.central == pytest.approx(rhs, abs=1e-5)
    assert fd.richardson == pytest.approx(rhs, abs=1e-7)
    assert rhs == pytest.approx(wolpert_sum(cr), abs=1e-9)


def test_fd_bulge_of_length_vanishes(octagon3, pres):
    split = standard_splitting(pres, "a1")
    fd = fd_derivative(octagon3, FlowSpec(split, LAM2), (pres.word("b1"), ELL))
    assert abs(fd.central) <= 1e-6


def _random_word(rng, max_len):
    while True:
        w = reduce_word(rng.choice([1, -1, 2, -2, 3, -3, 4, -4], rng.integers(1, max_len + 1)).tolist())
        # cyclically reduced words are enough for observables
        if w and w[0] != -w[-1]:
            return w


def test_fd_vs_product_formula_random(octagon, octagon3, pres):
    rng = np.random.default_rng(7)
    done = 0
    while done < 20:
        cid = ("a1", "sep")[done % 2]
        split = standard_splitting(pres, cid)
        x = _random_word(rng, 6)
        try:
            cr = enumerate_crossings(octagon, x, split.curve)
        except SharedAxis:
            continue
        f, g = (ELL, LAM2)[rng.integers(2)], (ELL, LAM2)[rng.integers(2)]
        # start from a non-Fuchsian point half the time; crossings are topological
        base = octagon3 if done % 4 < 2 else flow(octagon3, "a2", LAM2, 0.4)
        rhs = product_formula_rhs(cr, f, g, base)
        fd = fd_derivative(base, FlowSpec(split, g), (x, f)).richardson
        assert abs(fd - rhs) <= 1e-5 * max(1.0, abs(rhs)), (pres.format(x), cid, f.label, g.label)
        done += 1


def test_wolpert_at_twisted_points(octagon, pres):
    from hitchin_flows.flows import fuchsian_twist

    split = standard_splitting(pres, "a1")
    base = enumerate_crossings(octagon, pres.word("b1"), split.curve)
    for t in (0.0, 0.4, -0.9, 1.5, 3.0):
        rep2 = fuchsian_twist(octagon, "sep", t) if t < 0 else fuchsian_twist(octagon, "a2", t)
        cr = recompute_crossings(base, rep2)
        rep3 = rep2.map(lambda m: sym_embed(m, 3))
        fd = fd_derivative(rep3, FlowSpec(split, ELL), (pres.word("b1"), ELL)).richardson
        assert fd == pytest.approx(wolpert_sum(cr), abs=1e-5)


def test_bulge_constant(octagon, octagon3, pres):
    split = standard_splitting(pres, "a1")
    ratios = []
    for x in ("b1", "a1 b1", "b1 a2 b1", "b1 b1 a2"):
        cr = enumerate_crossings(octagon, pres.word(x), split.curve)
        shape = bulge_shape_sum(cr)
        fd = fd_derivative(octagon3, FlowSpec(split, LAM2), (pres.word(x), LAM2)).richardson
        if abs(shape) > 1e-3:
            ratios.append(fd / shape)
    assert len(ratios) >= 3
    np.testing.assert_allclose(ratios, 1 / 6, rtol=1e-6)


# -- angle decay -------------------------------------------------------------------------


def test_angle_decay_single_time(octagon, pres):
    d = angle_decay(octagon, pres.word("b1"), "a1", [0])
    assert len(d.max_angles) == 1 and d.monotone


def test_angle_decay_b1_a1(octagon, pres):
    d = angle_decay(octagon, pres.word("b1"), "a1", [0, 1, 2, 4, 8])
    assert d.monotone
    assert all(b < a for a, b in zip(d.max_angles, d.max_angles[1:]))
    assert d.max_angles[-1] < 0.2 * d.max_angles[0]


def test_angle_decay_disjoint(octagon, pres):
    with pytest.raises(NoCrossings):
        angle_decay(octagon, pres.word("a2"), "a1", [0, 1])


def test_splitting_for_word(pres):
    assert splitting_for(pres, pres.word("a1 b1 A1 B1")).kind == "amalgam"


# -- density heuristics --------------------------------------------------------------------


def test_invariant_bilinear_fuchsian_pair(octagon3):
    r = invariant_bilinear(octagon3.images[:2])
    assert r.verdict == "symmetric" and r.symmetric_dim == 1 and not r.degenerate
    assert np.linalg.matrix_rank(r.witness) == 3
    W = r.witness / r.witness[0, 2]
    np.testing.assert_allclose(W, SYM2_FORM, atol=1e-9)


def test_invariant_bilinear_bulged_and_identity(octagon3):
    bulged = flow(octagon3, "a1", LAM2, 0.5)
    assert invariant_bilinear(bulged.images[:2]).verdict == "none"
    r = invariant_bilinear([np.eye(3)])
    assert r.symmetric_dim == 6 and r.antisymmetric_dim == 3 and r.degenerate


def test_burnside_examples(octagon3):
    assert burnside_dim([np.diag([2, 1, 0.5])]) == 3
    assert burnside_dim(octagon3.images[:2]) == 9
    assert burnside_dim([np.eye(3)]) == 1


def test_density_probe_examples(octagon3):
    v = density_probe(octagon3.images[:2])
    assert v.verdict == "not_dense" and v.sym_form == "symmetric"
    v = density_probe(flow(octagon3, "a1", LAM2, 0.5).images[:2])
    assert (v.verdict, v.burnside_dim, v.sym_form) == ("candidate_dense", 9, "none")
    v = density_probe([np.diag([2, 1, 0.5]), np.diag([3, 1 / 3, 1.0])])
    assert v.verdict == "not_dense" and v.burnside_dim == 3


# -- relation monitor ---------------------------------------------------------------------------


def test_relation_monitor_fuchsian(octagon3):
    assert relation_monitor(octagon3, 6, 1).value <= 1e-9


def test_relation_monitor_bulged(octagon3):
    r = relation_monitor(flow(octagon3, "a1", LAM2, 0.5), 6, 1)
    assert r.value > 1e-3
    # the witness word reproduces the value through the Jordan projection
    lam = jordan_projection(*flow(octagon3, "a1", LAM2, 0.5).pair(r.word))
    assert abs(lam[0] + lam[2]) == pytest.approx(r.value, rel=1e-6)


def test_relation_monitor_middle_index(octagon3):
    bulged = flow(octagon3, "a1", LAM2, 0.5)
    ws, _, _ = ball_images(bulged, 3)
    expected = max(2 * abs(jordan_projection(*bulged.pair(w))[1]) for w in ws)
    assert relation_monitor(bulged, ws, 2).value == pytest.approx(expected, abs=1e-9)


def test_relation_monitor_bad_index(octagon3):
    with pytest.raises(IndexOutOfRange):
        relation_monitor(octagon3, [(1,)], 4)
