"""Numerical probes: crossings, variation formulas, angle decay, density heuristics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, NoCrossings, NotLoxodromic, SharedAxis, SharedEndpoint, Unstable, UnsupportedCurve
from .flows import FlowSpec, fuchsian_twist, goldman_flow
from .groups import ball_images, eval_word, inverse, reduce_word, standard_splitting
from .hyp_plane import axis, cross, mobius, rotation_embed, _normalizer
from .lie_core import TOL_EIG, goldman_hat, jordan_projection, longest_weyl, sym_embed, unimodular_spectrum

RANK_TOL = 1e-10


# ---------------------------------------------------------------------------
# crossings


@dataclass
class Crossing:
    """One intersection point of ``axis(x)`` with the translate ``g axis(y)``."""

    x: tuple
    y: tuple
    conjugator: tuple
    sign: int
    angle: float
    point: complex = None

    @property
    def y_word(self):
        """``g y g^-1``."""
        return reduce_word(self.conjugator + self.y + inverse(self.conjugator))

    def matrices(self, rep):
        return eval_word(rep, self.x), eval_word(rep, self.y_word)

    def reversed_y(self):
        """The same point seen with ``y`` reversed; the line angle is unchanged."""
        return Crossing(self.x, inverse(self.y), self.conjugator, -self.sign, self.angle, self.point)


def _hyperbolic_distance(z, w):
    return np.arccosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def _distance_to_geodesic(z, g):
    T, _ = _normalizer(g)
    w = mobius(T, z)
    return np.arcsinh(abs(w.real) / w.imag)


def _sign_normalize(stack):
    """Pick the lift with a positive first nonzero entry (rows are flattened 2x2 matrices)."""
    flat = stack.reshape(len(stack), -1)
    lead = np.where(np.abs(flat[:, 0]) > 1e-9, flat[:, 0], flat[:, 1])
    return flat * np.sign(lead)[:, None]


def _ball(rep2, max_len, radius):
    """Elements with word length <= max_len and ``d(i, g i) <= radius``, deduplicated up to sign.

    The search expands words whose displacement stays within ``radius`` plus
    the largest generator displacement; for side pairings of a polygon
    around ``i`` that covers every tile path to the ball.
    """
    letters = [s * (i + 1) for i in range(rep2.presentation.n_gens) for s in (1, -1)]
    L = np.stack([rep2.letter(x) for x in letters])
    # cosh d(i, M i) = |M|_F^2 / 2 for unimodular M
    slack = max(np.arccosh(max(1.0, np.sum(m * m) / 2)) for m in L)
    cbound = np.cosh(radius + slack)
    cradius = np.cosh(radius)
    seen = {_sign_normalize(np.eye(2)[None]).round(6).tobytes()}
    words, mats = [()], np.eye(2)[None]
    out_w, out_m = [()], [np.eye(2)[None]]
    for _ in range(max_len):
        cand = mats[None] @ L[:, None]
        nw, keep = [], []
        for li, x in enumerate(letters):
            for k, w in enumerate(words):
                if w and w[-1] == -x:
                    continue
                nw.append(w + (x,))
                keep.append((li, k))
        if not keep:
            break
        idx = np.array(keep)
        M = cand[idx[:, 0], idx[:, 1]]
        ch = np.sum(M * M, axis=(1, 2)) / 2
        ok = np.flatnonzero(ch <= cbound)
        if not ok.size:
            break
        keys = _sign_normalize(M[ok]).round(6)
        words, sel = [], []
        for j, kb in zip(ok, keys):
            b = kb.tobytes()
            if b in seen:
                continue
            seen.add(b)
            words.append(nw[j])
            sel.append(j)
        if not sel:
            break
        mats = M[sel]
        inside = np.flatnonzero(np.sum(mats * mats, axis=(1, 2)) / 2 <= cradius)
        out_w.extend(words[i] for i in inside)
        out_m.append(mats[inside])
    return out_w, np.concatenate(out_m)


def _crossings_in_ball(rep2, x, y, max_len):
    X, Y = eval_word(rep2, x), eval_word(rep2, y)
    ax, ay = axis(X), axis(Y)
    lx = 2 * np.arccosh(abs(np.trace(X)) / 2)
    ly = 2 * np.arccosh(abs(np.trace(Y)) / 2)
    o = 1j
    # some x^j g y^k realizes each crossing within half a period of both feet of o
    radius = _distance_to_geodesic(o, ax) + lx / 2 + _distance_to_geodesic(o, ay) + ly / 2 + 1e-6
    T, _ = _normalizer(ax)
    words, mats = _ball(rep2, max_len, radius)
    P = np.einsum("ij,kjl->kil", T, mats)
    p = P @ ay.start
    q = P @ ay.end
    pn = p / np.linalg.norm(p, axis=1, keepdims=True)
    qn = q / np.linalg.norm(q, axis=1, keepdims=True)
    at0 = lambda v: np.abs(v[:, 0]) < 1e-8
    atinf = lambda v: np.abs(v[:, 1]) < 1e-8
    if np.any((at0(pn) & atinf(qn)) | (atinf(pn) & at0(qn))):
        raise SharedAxis(f"a translate of axis({y}) is axis({x})")
    # endpoints of g axis(y) on opposite sides of 0 in the chart where axis(x) = (0, inf)
    hits = np.flatnonzero((p[:, 0] * p[:, 1]) * (q[:, 0] * q[:, 1]) < 0)
    found = {}
    for k in hits:
        g, G = words[k], mats[k]
        gy = ay.image(G)
        try:
            c = cross(ax, gy)
        except SharedEndpoint as exc:
            raise SharedAxis(str(exc)) from exc
        if c is None:
            continue
        z = mobius(T, c.point)
        s = (np.log(z.imag) / lx) % 1.0
        key = (round(np.cos(2 * np.pi * s), 6), round(np.sin(2 * np.pi * s), 6), round(c.angle, 6))
        if key not in found or len(g) < len(found[key].conjugator):
            found[key] = Crossing(tuple(x), tuple(y), g, c.sign, c.angle, c.point)
    return sorted(found.values(), key=lambda c: (len(c.conjugator), c.conjugator))


def enumerate_crossings(rep2, x, y, L=10, check_stability=True):
    """Transverse intersection points of the closed geodesics of ``x`` and ``y``.

    Group elements are searched up to word length ``L`` inside the
    hyperbolic ball that must contain a conjugator of every intersection
    orbit; the count is confirmed at ``L + 2``.  ``y`` must be primitive.
    """
    x, y = reduce_word(x), reduce_word(y)
    out = _crossings_in_ball(rep2, x, y, L)
    if check_stability:
        again = _crossings_in_ball(rep2, x, y, L + 2)
        if len(again) != len(out):
            raise Unstable(f"{len(out)} crossings at L={L} but {len(again)} at L={L + 2}")
    return out


def recompute_crossings(crossings, rep2):
    """Angles and signs of the same crossings at another Fuchsian representation."""
    out = []
    for c in crossings:
        X, Yp = c.matrices(rep2)
        g = cross(axis(X), axis(Yp))
        if g is None:
            raise SharedAxis("crossing disappeared; the representation is not isotopic")
        out.append(Crossing(c.x, c.y, c.conjugator, g.sign, g.angle, g.point))
    return out


def algebraic_intersection(crossings):
    return sum(c.sign for c in crossings)


# ---------------------------------------------------------------------------
# variation formulas


def product_formula_rhs(crossings, f, g, rep, embed_n=None):
    """Sum over crossings of ``sign * Tr(f^(x_p) g^(y_p))`` from the matrices of ``rep``.

    With ``embed_n`` the (PSL_2) representation is first pushed through the
    principal embedding.
    """
    if embed_n is not None:
        rep = rep.map(lambda m: sym_embed(m, embed_n))
    total = 0.0
    for c in crossings:
        X, Xi = rep.pair(c.x)
        Y, Yi = rep.pair(c.y)
        C, Ci = rep.pair(c.conjugator)
        # equivariance: only y itself is diagonalized, never the (badly conditioned) conjugate
        Fx, Gy = goldman_hat(X, f, inverse=Xi), C @ goldman_hat(Y, g, inverse=Yi) @ Ci
        total += c.sign * np.trace(Fx @ Gy)
    return float(total)


def angle_summand(phi, sign, f, g):
    """Closed form of ``sign * B(f^(x_p), g^(y_p))`` at a Fuchsian crossing."""
    R = rotation_embed(phi, f.n)
    # R preserves the binomial form, not the standard one, so R^T != R^-1
    Ri = np.linalg.inv(R)
    beta = g.alpha_vee if sign > 0 else longest_weyl(g.alpha_vee)
    val = np.trace(f.alpha_vee @ R @ beta @ Ri)
    return float(val if sign > 0 else -val)


def angle_formula(crossings, f, g):
    return float(sum(angle_summand(c.angle, c.sign, f, g) for c in crossings))


def wolpert_sum(crossings):
    return float(sum(2 * np.cos(c.angle) for c in crossings))


def bulge_shape_sum(crossings):
    return float(sum(c.sign * (1 + 3 * np.cos(2 * c.angle)) for c in crossings))


@dataclass
class FDResult:
    central: float
    richardson: float


def fd_derivative(rep, spec, observable, h=1e-4):
    """Finite-difference derivative of ``f(rho_t(word))`` at ``t = 0`` along ``spec``."""
    word, f = observable

    def value(t):
        r = goldman_flow(rep, FlowSpec(spec.splitting, spec.functional, t))
        M, Mi = r.pair(word)
        return f(jordan_projection(M, Mi))

    d1 = (value(h) - value(-h)) / (2 * h)
    d2 = (value(h / 2) - value(-h / 2)) / h
    return FDResult(d1, (4 * d2 - d1) / 3)


def splitting_for(pres, curve):
    """Built-in splitting whose curve is ``curve`` (a word or a curve id)."""
    if isinstance(curve, str):
        return standard_splitting(pres, curve)
    curve = reduce_word(curve)
    for cid in ("a1", "a2", "sep"):
        s = standard_splitting(pres, cid)
        if s.curve == curve:
            return s
    raise UnsupportedCurve(f"no built-in splitting along {pres.format(curve)}")


@dataclass
class AngleDecay:
    times: list
    max_angles: list
    monotone: bool


def angle_decay(rep2, x, y, times, L=10):
    """Largest crossing angle of ``x`` with ``y`` along the twist path along ``y``."""
    split = splitting_for(rep2.presentation, y)
    base = enumerate_crossings(rep2, x, split.curve, L)
    if not base:
        raise NoCrossings("the curves do not cross")
    curve_id = next(c for c in ("a1", "a2", "sep") if standard_splitting(rep2.presentation, c).curve == split.curve)
    series = []
    for t in times:
        r = fuchsian_twist(rep2, curve_id, t)
        series.append(max(c.angle for c in recompute_crossings(base, r)))
    monotone = all(b < a - 1e-9 for a, b in zip(series, series[1:]))
    return AngleDecay(list(times), series, monotone)


# ---------------------------------------------------------------------------
# density heuristics


def _sym_basis(n, antisym):
    basis = []
    for i in range(n):
        for j in range(i, n):
            if antisym and i == j:
                continue
            E = np.zeros((n, n))
            E[i, j] = 1.0
            E[j, i] = -1.0 if antisym else 1.0
            basis.append(E)
    return basis


def _null_space(A, tol=RANK_TOL):
    _, s, vt = np.linalg.svd(A)
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(top, 1.0)))
    return vt[rank:].T


@dataclass
class FormSolution:
    kind: str
    dimension: int
    witness: np.ndarray = None


@dataclass
class BilinearReport:
    symmetric_dim: int
    antisymmetric_dim: int
    verdict: str
    witness: np.ndarray = None
    degenerate: bool = False


def invariant_bilinear(mats, tol=RANK_TOL):
    """Bilinear forms ``Q`` with ``g^T Q g = Q`` for every ``g`` in ``mats``."""
    mats = [np.asarray(m, dtype=float) for m in mats]
    n = mats[0].shape[0]
    out = {}
    for kind, anti in (("symmetric", False), ("antisymmetric", True)):
        basis = _sym_basis(n, anti)
        A = np.vstack(
            [np.column_stack([(g.T @ E @ g - E).ravel() for E in basis]) for g in mats]
        )
        N = _null_space(A, tol)
        witness = None
        if N.shape[1]:
            Q = sum(c * E for c, E in zip(N[:, 0], basis))
            witness = Q / np.linalg.norm(Q)
        out[kind] = FormSolution(kind, N.shape[1], witness)
    sym, anti = out["symmetric"], out["antisymmetric"]
    verdict = "symmetric" if sym.dimension else ("antisymmetric" if anti.dimension else "none")
    witness = sym.witness if sym.dimension else anti.witness
    degenerate = sym.dimension + anti.dimension > 1
    return BilinearReport(sym.dimension, anti.dimension, verdict, witness, degenerate)


def burnside_dim(mats, tol=RANK_TOL):
    """Dimension of the associative algebra generated by ``mats`` (with the identity)."""
    mats = [np.asarray(m, dtype=float) for m in mats]
    n = mats[0].shape[0]
    mats = [m / np.linalg.norm(m) for m in mats]
    basis = np.eye(n).ravel()[None]
    dim = 1
    while True:
        cands = [basis]
        for b in basis:
            B = b.reshape(n, n)
            cands.extend((B @ m).ravel()[None] for m in mats)
        _, s, vt = np.linalg.svd(np.vstack(cands), full_matrices=False)
        rank = int(np.sum(s > tol * s[0]))
        basis = vt[:rank]
        if rank == dim:
            return rank
        dim = rank


@dataclass
class DensityVerdict:
    burnside_dim: int
    sym_form: str
    witness: np.ndarray
    verdict: str


def density_probe(mats):
    mats = [np.asarray(m, dtype=float) for m in mats]
    n = mats[0].shape[0]
    b = burnside_dim(mats)
    form = invariant_bilinear(mats)
    dense = b == n * n and form.verdict == "none"
    return DensityVerdict(b, form.verdict, form.witness, "candidate_dense" if dense else "not_dense")


# ---------------------------------------------------------------------------
# eigenvalue relation monitor


def _sorted_logmod(stack, tol=TOL_EIG, inverse_stack=None):
    if stack.shape[1] == 3 and inverse_stack is not None:
        ev = unimodular_spectrum(np.trace(stack, axis1=1, axis2=2), np.trace(inverse_stack, axis1=1, axis2=2))
    elif stack.shape[1] == 2:
        ev = unimodular_spectrum(np.trace(stack, axis1=1, axis2=2))
    else:
        ev = np.linalg.eigvals(stack)
    mod = -np.sort(-np.abs(ev), axis=1)
    if np.any(np.abs(ev.imag) > 1e-12 * np.abs(ev)):
        raise NotLoxodromic("non-real spectrum in batch")
    gaps = (mod[:, :-1] - mod[:, 1:]) / mod[:, :-1]
    if np.any(gaps < tol):
        raise NotLoxodromic("eigenvalue moduli not separated in batch")
    return np.log(mod)


@dataclass
class RelationReport:
    value: float
    word: tuple
    count: int


def relation_monitor(rep, words, i, chunk=20000):
    """``max |lambda_i + lambda_(n-i+1)|`` over ``words`` (or over all words of length <= ``words`` if an int).

    Images are assumed unimodular, which holds for every representation built here.
    """
    n = rep.n
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"index {i} out of range for n={n}")
    if isinstance(words, int):
        ws, M, Mi = ball_images(rep, words)
    else:
        ws = [reduce_word(w) for w in words]
        M = np.stack([eval_word(rep, w) for w in ws])
        Mi = np.stack([eval_word(rep, inverse(w)) for w in ws])
    best, arg = 0.0, None
    for start in range(0, len(ws), chunk):
        a = _sorted_logmod(M[start:start + chunk], inverse_stack=Mi[start:start + chunk])
        b = _sorted_logmod(Mi[start:start + chunk], inverse_stack=M[start:start + chunk])
        # lambda_(n-i+1)(M) = -lambda_i(M^-1): only the well-conditioned top of each spectrum is used
        vals = np.abs(a[:, i - 1] - b[:, i - 1])
        k = int(np.argmax(vals))
        if vals[k] > best or arg is None:
            best, arg = float(vals[k]), ws[start + k]
    return RelationReport(best, arg, len(ws))
