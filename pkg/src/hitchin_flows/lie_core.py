"""Linear-algebraic Lie theory for sl_n / SL_n.

Jordan projections, Goldman functions of invariant functionals, the principal
(symmetric power) embedding of PSL_2 and a few Weyl-group facts.  Matrices are
plain ``numpy`` arrays throughout; the invariant form is the trace pairing
``B(X, Y) = Tr(XY)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import BadDeterminant, NotLoxodromic, UnknownType

TOL_EIG = 1e-8
DET_TOL = 1e-10

__all__ = [
    "TOL_EIG",
    "CartanData",
    "InvariantFunctional",
    "ExpansionReport",
    "alpha_vee",
    "hilbert_length",
    "eigen_k",
    "functional_by_label",
    "jordan_projection",
    "unimodular_spectrum",
    "is_purely_loxodromic",
    "goldman_hat",
    "sym_embed",
    "w0_act",
    "longest_weyl",
    "weyl_minus_one",
    "lambda_expansion_check",
    "expm",
]


def _sorted_eigen(M, tol=TOL_EIG, vectors=False):
    """Eigen-data sorted by decreasing modulus; raises unless moduli are distinct and real."""
    if vectors:
        ev, V = np.linalg.eig(M)
    else:
        ev, V = np.linalg.eigvals(M), None
    order = np.argsort(-np.abs(ev), kind="stable")
    ev = ev[order]
    if np.any(np.abs(ev.imag) > 1e-12 * np.abs(ev)):
        raise NotLoxodromic(f"non-real spectrum {ev}")
    ev = ev.real
    mod = np.abs(ev)
    if np.any(mod == 0.0):
        raise NotLoxodromic("singular matrix")
    gaps = (mod[:-1] - mod[1:]) / mod[:-1]
    if np.any(gaps < tol):
        raise NotLoxodromic(f"eigenvalue moduli {mod} not separated (tol={tol:g})")
    if vectors:
        return ev, V[:, order].real
    return ev


def unimodular_spectrum(traces, inverse_traces=None):
    """Eigenvalues of unimodular 2x2 or 3x3 matrices from their traces (batched).

    For ``n = 3`` the characteristic polynomial is
    ``z^3 - tr(M) z^2 + tr(M^-1) z - 1``; traces of long products stay
    accurate when the products are far from normal, whereas a general
    eigensolver loses digits in proportion to the eigenvector conditioning.
    Roots are polished by two Newton steps.  Returns complex roots, unsorted.
    """
    T = np.atleast_1d(np.asarray(traces, dtype=float))
    if inverse_traces is None:
        disc = np.sqrt((T * T - 4).astype(complex))
        return np.stack([(T + disc) / 2, (T - disc) / 2], axis=1)
    S = np.atleast_1d(np.asarray(inverse_traces, dtype=float))
    C = np.zeros((len(T), 3, 3))
    C[:, 0, 0], C[:, 0, 1], C[:, 0, 2] = T, -S, 1.0
    C[:, 1, 0] = C[:, 2, 1] = 1.0
    z = np.linalg.eigvals(C)
    for _ in range(2):
        p = ((z - T[:, None]) * z + S[:, None]) * z - 1
        dp = (3 * z - 2 * T[:, None]) * z + S[:, None]
        ok = dp != 0
        z = np.where(ok, z - np.where(ok, p / np.where(ok, dp, 1), 0), z)
    return z


def _spectrum(M, inverse, tol):
    n = M.shape[0]
    if n == 2:
        ev = unimodular_spectrum([np.trace(M)])[0]
    elif n == 3 and inverse is not None:
        ev = unimodular_spectrum([np.trace(M)], [np.trace(inverse)])[0]
    else:
        return _sorted_eigen(M, tol)
    return _check_spectrum(ev, tol)


def _check_spectrum(ev, tol):
    ev = ev[np.argsort(-np.abs(ev), kind="stable")]
    if np.any(np.abs(ev.imag) > 1e-12 * np.abs(ev)):
        raise NotLoxodromic(f"non-real spectrum {ev}")
    ev = ev.real
    mod = np.abs(ev)
    if np.any(mod == 0.0):
        raise NotLoxodromic("singular matrix")
    if np.any((mod[:-1] - mod[1:]) / mod[:-1] < tol):
        raise NotLoxodromic(f"eigenvalue moduli {mod} not separated (tol={tol:g})")
    return ev


def _unimodular(M):
    # determinant error of long products scales with the Hadamard bound
    bound = np.prod(np.linalg.norm(M, axis=0))
    return abs(np.linalg.det(M) - 1) <= 1e-10 * max(1.0, bound)


def jordan_projection(M, inverse=None, tol=TOL_EIG):
    """Sorted log-moduli of the eigenvalues of ``M`` (zero sum).

    If the exact inverse of ``M`` is supplied, the lower half of the vector is
    read off from the top of the inverse's spectrum.  This keeps the small
    eigenvalues accurate when ``M`` has a large spectral spread (long words).
    Unimodular matrices with ``n <= 3`` go through :func:`unimodular_spectrum`.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if inverse is not None:
        inverse = np.asarray(inverse, dtype=float)
    if not _unimodular(M):
        sign, logdet = np.linalg.slogdet(M)
        if sign == 0:
            raise NotLoxodromic("singular matrix")
        d = logdet / n
        M = M * np.exp(-d)
        if inverse is not None:
            inverse = inverse * np.exp(d)
    if n <= 3 and (n == 2 or inverse is not None):
        # unimodular and small: trace-based spectrum, exact zero sum by construction
        logs = np.log(np.abs(_spectrum(M, inverse, tol)))
        if n == 2:
            return np.array([logs[0], -logs[0]])
        inv_logs = np.log(np.abs(_spectrum(inverse, M, tol)))
        return np.array([logs[0], -logs[0] + inv_logs[0], -inv_logs[0]])
    logs = np.log(np.abs(_sorted_eigen(M, tol)))
    if inverse is None:
        return logs - logs.mean()
    inv_logs = np.log(np.abs(_sorted_eigen(inverse, tol)))
    k = n // 2
    out = logs.copy()
    out[n - k:] = -inv_logs[:k][::-1]
    if n % 2:
        out[k] = 0.0
        out[k] = -out.sum()
    return out


def is_purely_loxodromic(M, tol=TOL_EIG):
    """True iff some lift of ``M`` has positive, pairwise distinct real eigenvalues."""
    M = np.asarray(M, dtype=float)
    try:
        ev = _sorted_eigen(M, tol)
    except NotLoxodromic:
        return False
    if np.all(ev > 0):
        return True
    return M.shape[0] % 2 == 0 and bool(np.all(ev < 0))


@dataclass(frozen=True)
class InvariantFunctional:
    """A linear functional on the diagonal Cartan, stored as its trace dual."""

    alpha_vee: np.ndarray = field(repr=False)
    label: str = ""

    @property
    def n(self):
        return self.alpha_vee.shape[0]

    @property
    def coeffs(self):
        return np.diag(self.alpha_vee).copy()

    def __call__(self, jordan_vector):
        return float(np.dot(self.coeffs, jordan_vector))

    def of(self, M, inverse=None):
        return self(jordan_projection(M, inverse))

    def __neg__(self):
        return InvariantFunctional(-self.alpha_vee, f"-{self.label}")


def alpha_vee(coeffs, label=""):
    """Trace dual of ``Y -> sum c_i Y_ii`` restricted to traceless diagonals."""
    c = np.asarray(coeffs, dtype=float)
    return InvariantFunctional(np.diag(c - c.mean()), label)


def hilbert_length(n):
    """``lambda_1 - lambda_n``."""
    c = np.zeros(n)
    c[0], c[-1] = 1.0, -1.0
    return alpha_vee(c, "ell")


def eigen_k(n, k):
    """``lambda_k`` (1-based)."""
    c = np.zeros(n)
    c[k - 1] = 1.0
    return alpha_vee(c, f"lambda{k}")


def functional_by_label(label, n):
    """Parse ``ell`` or ``lambda<k>``."""
    if label == "ell":
        return hilbert_length(n)
    m = re.fullmatch(r"lambda(\d+)", label)
    if m and 1 <= int(m.group(1)) <= n:
        return eigen_k(n, int(m.group(1)))
    raise ValueError(f"unknown functional {label!r} for n={n}")


def _top_projectors(M, count):
    """Spectral projectors of the ``count`` largest-modulus eigenvalues of ``M``."""
    ev, V = np.linalg.eig(M)
    evl, W = np.linalg.eig(M.T)
    V = V[:, np.argsort(-np.abs(ev), kind="stable")].real
    W = W[:, np.argsort(-np.abs(evl), kind="stable")].real
    return [np.outer(V[:, k], W[:, k]) / (W[:, k] @ V[:, k]) for k in range(count)]


def goldman_hat(M, f, inverse=None, tol=TOL_EIG):
    """Goldman function of ``f`` at ``M``: the eigenbasis conjugate of ``f.alpha_vee``.

    Written as ``sum_k c_k P_k`` over the spectral projectors of ``M``
    (ordered by decreasing modulus), which equals ``V diag(c) V^-1`` for
    any eigenvector matrix ``V``.  The upper half of the projectors is read
    off the top of the spectrum of ``M``, the lower half off the top of the
    spectrum of its inverse, and for odd ``n`` the middle one is the
    complement; eigenvectors of dominant eigenvalues stay accurate for long
    words where those of small eigenvalues do not.  Pass the exact inverse
    when ``M`` is a long product.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    inverse = np.linalg.inv(M) if inverse is None else np.asarray(inverse, dtype=float)
    jordan_projection(M, inverse, tol)  # loxodromy check
    h = n // 2
    P = [None] * n
    P[:h] = _top_projectors(M, h)
    P[n - h:] = _top_projectors(inverse, h)[::-1]
    if n % 2:
        P[h] = np.eye(n) - sum(P[:h]) - sum(P[n - h:])
    c = np.diag(f.alpha_vee)
    return sum(ck * Pk for ck, Pk in zip(c, P))


def sym_embed(M2, n):
    """Action of a unimodular 2x2 matrix on degree ``n-1`` binary forms.

    Basis ``x^(n-1-k) y^k`` with ``x -> a x + c y`` and ``y -> b x + d y``; for
    ``n = 3`` this is the familiar ``[[a^2, ab, b^2], [2ac, ad+bc, 2bd], ...]``.
    """
    M2 = np.asarray(M2, dtype=float)
    if abs(np.linalg.det(M2) - 1.0) > DET_TOL:
        raise BadDeterminant(f"det = {np.linalg.det(M2)!r}")
    (a, b), (c, d) = M2
    out = np.empty((n, n))
    for k in range(n):
        poly = np.ones(1)
        for _ in range(n - 1 - k):
            poly = np.convolve(poly, [a, c])
        for _ in range(k):
            poly = np.convolve(poly, [b, d])
        out[:, k] = poly
    return out


def w0_act(v):
    """Reverse and negate a diagonal (vector or diagonal matrix).

    This is the opposition involution ``-w0`` of type A; the plain longest
    Weyl element is :func:`longest_weyl`.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return -v[::-1]
    return np.diag(-np.diag(v)[::-1])


def longest_weyl(v):
    """Longest Weyl element of type A: reverse the diagonal."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return v[::-1].copy()
    return np.diag(np.diag(v)[::-1])


_WEYL_LABEL = re.compile(r"^\s*([A-Ga-g])[_\s]?(\d+)\s*$")


def weyl_minus_one(type_label):
    """Whether the Weyl group of the given root system contains ``-1``."""
    m = _WEYL_LABEL.match(str(type_label))
    if not m:
        raise UnknownType(type_label)
    fam, k = m.group(1).upper(), int(m.group(2))
    if k < 1:
        raise UnknownType(type_label)
    if fam == "A":
        return k == 1
    if fam in "BC":
        return True
    if fam == "D":
        if k < 3:
            raise UnknownType(type_label)
        return k % 2 == 0
    exceptional = {("E", 6): False, ("E", 7): True, ("E", 8): True, ("F", 4): True, ("G", 2): True}
    if (fam, k) not in exceptional:
        raise UnknownType(type_label)
    return exceptional[fam, k]


@dataclass(frozen=True)
class CartanData:
    """Cartan data of sl_n with the trace form."""

    n: int

    def form(self, X, Y):
        return float(np.trace(X @ Y))

    def theta(self, X):
        return -np.asarray(X).T

    def form_theta(self, X, Y):
        return -self.form(X, self.theta(Y))

    def simple_roots(self, Y):
        d = np.diag(Y)
        return d[:-1] - d[1:]

    def w0_action(self, v):
        return w0_act(v)

    def root_vector(self, i, j):
        E = np.zeros((self.n, self.n))
        E[i, j] = 1.0
        return E


def diag0(Y):
    """Traceless diagonal part of ``Y``."""
    d = np.diag(np.asarray(Y, dtype=float))
    return d - d.mean()


@dataclass
class ExpansionReport:
    t: np.ndarray
    residuals: np.ndarray
    slope: float | None


def lambda_expansion_check(X, Y, t_grid):
    """Residual of ``lambda(exp X exp tY) - (X + t diag0(Y))`` over ``t_grid``.

    ``slope`` is the least-squares log-log slope; ``None`` when every residual
    is at rounding level (exactly commuting or triangular cases).
    """
    x = np.diag(X) if np.ndim(X) == 2 else np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    eX = np.diag(np.exp(x))
    y0 = diag0(Y)
    res = np.array(
        [np.max(np.abs(jordan_projection(eX @ expm(s * Y)) - (x + s * y0))) for s in t]
    )
    if np.max(res) < 1e-12:
        return ExpansionReport(t, res, None)
    slope = float(np.polyfit(np.log(t), np.log(res), 1)[0])
    return ExpansionReport(t, res, slope)
