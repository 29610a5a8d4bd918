"""Finitely presented surface and orbifold groups.

Words are tuples of signed 1-based letters: generator ``i`` (0-based) is the
letter ``i + 1`` and its inverse ``-(i + 1)``.  Words are kept freely reduced.
The JSON form of a word is a list of ``[generator_index, exponent]`` pairs
with exponents in ``{1, -1}``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from collections import deque

import numpy as np

from .errors import (
    HomNotWellDefined,
    IndexOutOfRange,
    NotHyperbolic,
    UnsupportedCurve,
    WordNotInSubgroup,
)

# ---------------------------------------------------------------------------
# words


def reduce_word(w):
    out = []
    for letter in w:
        if letter == 0:
            raise ValueError("letter 0 is not allowed")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def inverse(w):
    return tuple(-x for x in reversed(w))


def concat(*ws):
    return reduce_word(itertools.chain.from_iterable(ws))


def power(w, k):
    if k < 0:
        w, k = inverse(w), -k
    return reduce_word(w * k)


def commutator(u, v):
    return concat(u, v, inverse(u), inverse(v))


def conjugate(g, w):
    """``g w g^-1``."""
    return concat(g, w, inverse(g))


def cyclic_reduce(w):
    w = reduce_word(w)
    while len(w) > 1 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def word_to_json(w):
    return [[abs(x) - 1, 1 if x > 0 else -1] for x in w]


def word_from_json(data):
    out = []
    for gen, exp in data:
        if exp not in (1, -1) or int(gen) < 0:
            raise ValueError(f"bad letter {[gen, exp]!r}")
        out.append((int(gen) + 1) * exp)
    return reduce_word(out)


def reduced_words(n_gens, max_len, min_len=1):
    """All freely reduced words with ``min_len <= length <= max_len``, shortlex order."""
    letters = [s * (i + 1) for i in range(n_gens) for s in (1, -1)]
    level = [()]
    if min_len == 0:
        yield ()
    for length in range(1, max_len + 1):
        level = [w + (x,) for w in level for x in letters if not w or w[-1] != -x]
        if length >= min_len:
            yield from level


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    names: tuple
    relators: tuple
    genus: int = 0
    cone_orders: tuple = ()

    @property
    def n_gens(self):
        return len(self.names)

    @property
    def kind(self):
        return "orbifold" if self.cone_orders else "surface"

    @property
    def euler_characteristic(self):
        return 2 - 2 * self.genus - sum(1 - 1 / p for p in self.cone_orders)

    def word(self, text):
        """Parse e.g. ``"a1 b1 a1^-1"``; ``A1`` is shorthand for ``a1^-1``."""
        out = []
        for tok in text.replace("*", " ").split():
            m = re.fullmatch(r"(\w+?)(?:\^(-?\d+))?", tok)
            if not m:
                raise ValueError(f"cannot parse {tok!r}")
            name, exp = m.group(1), int(m.group(2) or 1)
            if name not in self.names and name[:1].isupper() and name.lower() in self.names:
                name, exp = name.lower(), -exp
            if name not in self.names:
                raise ValueError(f"unknown generator {name!r}")
            letter = self.names.index(name) + 1
            out.extend([letter if exp > 0 else -letter] * abs(exp))
        return reduce_word(out)

    def gen(self, name):
        return (self.names.index(name) + 1,)

    def format(self, w):
        if not w:
            return "1"
        return " ".join(self.names[abs(x) - 1] + ("" if x > 0 else "^-1") for x in w)

    def to_json(self):
        return {
            "names": list(self.names),
            "relators": [word_to_json(r) for r in self.relators],
            "genus": self.genus,
            "cone_orders": list(self.cone_orders),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            tuple(data["names"]),
            tuple(word_from_json(r) for r in data["relators"]),
            int(data.get("genus", 0)),
            tuple(int(p) for p in data.get("cone_orders", ())),
        )


def surface_presentation(genus=2):
    names = tuple(f"{c}{i}" for i in range(1, genus + 1) for c in "ab")
    rel = ()
    for i in range(genus):
        rel = concat(rel, commutator((2 * i + 1,), (2 * i + 2,)))
    return Presentation(names, (rel,), genus)


def orbifold_presentation(genus, cone_orders):
    """``<x_j, y_j, s_i | s_i^p_i, prod [x_j, y_j] prod s_i>``."""
    names = tuple(f"{c}{i}" for i in range(1, genus + 1) for c in "ab")
    names += tuple(f"s{i}" for i in range(1, len(cone_orders) + 1))
    rel = ()
    for i in range(genus):
        rel = concat(rel, commutator((2 * i + 1,), (2 * i + 2,)))
    torsion = []
    for k, p in enumerate(cone_orders):
        s = (2 * genus + k + 1,)
        torsion.append(power(s, p))
        rel = concat(rel, s)
    return Presentation(names, tuple(torsion) + (rel,), genus, tuple(cone_orders))


def abelianization_rank(pres):
    """Free rank of the abelianization."""
    if not pres.relators:
        return pres.n_gens
    A = np.zeros((len(pres.relators), pres.n_gens))
    for i, r in enumerate(pres.relators):
        for x in r:
            A[i, abs(x) - 1] += np.sign(x)
    return pres.n_gens - np.linalg.matrix_rank(A)


# ---------------------------------------------------------------------------
# representations


def _pm_identity_residual(M):
    eye = np.eye(M.shape[0])
    return min(np.abs(M - eye).max(), np.abs(M + eye).max())


@dataclass
class Representation:
    """Generator images (and their exact inverses) for a presentation."""

    presentation: Presentation
    images: list
    inverses: list = None

    def __post_init__(self):
        self.images = [np.asarray(m, dtype=float) for m in self.images]
        if len(self.images) != self.presentation.n_gens:
            raise ValueError("one image per generator required")
        if self.inverses is None:
            self.inverses = [_exact_inverse(m) for m in self.images]
        else:
            self.inverses = [np.asarray(m, dtype=float) for m in self.inverses]

    @property
    def n(self):
        return self.images[0].shape[0]

    def letter(self, x):
        if x == 0 or abs(x) > len(self.images):
            raise IndexOutOfRange(f"letter {x} with {len(self.images)} generators")
        return self.images[x - 1] if x > 0 else self.inverses[-x - 1]

    def __call__(self, w):
        return eval_word(self, w)

    def pair(self, w):
        """``(rho(w), rho(w)^-1)`` both as exact products."""
        return eval_word(self, w), eval_word(self, inverse(w))

    @property
    def relator_residual(self):
        if not self.presentation.relators:
            return 0.0
        return max(_pm_identity_residual(self(r)) for r in self.presentation.relators)

    def with_images(self, images, inverses=None):
        return Representation(self.presentation, images, inverses)

    def map(self, fn):
        """Apply a homomorphism of matrix groups generator-wise (e.g. an embedding)."""
        return Representation(
            self.presentation, [fn(m) for m in self.images], [fn(m) for m in self.inverses]
        )

    def conjugated(self, g):
        gi = np.linalg.inv(g)
        return Representation(
            self.presentation,
            [g @ m @ gi for m in self.images],
            [g @ m @ gi for m in self.inverses],
        )


def _exact_inverse(m):
    if m.shape == (2, 2):
        (a, b), (c, d) = m
        det = a * d - b * c
        return np.array([[d, -b], [-c, a]]) / det
    return np.linalg.inv(m)


def eval_word(rep, w):
    out = np.eye(rep.n)
    for x in w:
        out = out @ rep.letter(x)
    return out


def ball_images(rep, max_len, min_len=1):
    """Batched images of all reduced words of length in ``[min_len, max_len]``.

    Returns ``(words, mats, invs)`` with ``mats[k] = rho(words[k])`` and
    ``invs[k] = rho(words[k])^-1``, both built as exact products.
    """
    n = rep.n
    letters = [s * (i + 1) for i in range(rep.presentation.n_gens) for s in (1, -1)]
    words, mats, invs = [()], np.eye(n)[None], np.eye(n)[None]
    out_w, out_m, out_i = [], [], []
    for length in range(1, max_len + 1):
        nw, nm, ni = [], [], []
        for x in letters:
            keep = [k for k, w in enumerate(words) if not w or w[-1] != -x]
            if not keep:
                continue
            nw.extend(words[k] + (x,) for k in keep)
            nm.append(mats[keep] @ rep.letter(x))
            ni.append(rep.letter(-x) @ invs[keep])
        words, mats, invs = nw, np.concatenate(nm), np.concatenate(ni)
        if length >= min_len:
            out_w.extend(words)
            out_m.append(mats)
            out_i.append(invs)
    if not out_m:
        return [], np.empty((0, n, n)), np.empty((0, n, n))
    return out_w, np.concatenate(out_m), np.concatenate(out_i)


# ---------------------------------------------------------------------------
# finite abelian covers


@dataclass
class CoverData:
    """Kernel of a homomorphism onto a finite abelian group, via Reidemeister-Schreier."""

    ambient: Presentation
    moduli: tuple
    hom: tuple
    transversal: dict
    generators: list
    generator_keys: list
    presentation: Presentation
    _index_of: dict = field(repr=False)

    @property
    def index(self):
        return len(self.transversal)

    def image(self, w):
        v = np.zeros(len(self.moduli), dtype=int)
        for x in w:
            v += np.sign(x) * np.asarray(self.hom[abs(x) - 1])
        return tuple(int(a) % m for a, m in zip(v, self.moduli))

    def _step(self, coset, x):
        h = np.asarray(self.hom[abs(x) - 1]) * np.sign(x)
        return tuple(int(a + b) % m for a, b, m in zip(coset, h, self.moduli))

    def rewrite(self, w):
        """Express an ambient word lying in the subgroup in Schreier generators."""
        zero = tuple(0 for _ in self.moduli)
        coset, out = zero, []
        for x in w:
            if x > 0:
                key = (coset, x)
                if key in self._index_of:
                    out.append(self._index_of[key] + 1)
                coset = self._step(coset, x)
            else:
                prev = self._step(coset, x)
                key = (prev, -x)
                if key in self._index_of:
                    out.append(-(self._index_of[key] + 1))
                coset = prev
        if coset != zero:
            raise WordNotInSubgroup(f"word ends in coset {coset}")
        return reduce_word(out)

    def project(self, w):
        """Subgroup word -> ambient word."""
        out = []
        for x in w:
            g = self.generators[abs(x) - 1]
            out.extend(g if x > 0 else inverse(g))
        return reduce_word(out)

    def restrict(self, rep):
        """``rho`` restricted to the subgroup, on the Schreier generators."""
        return Representation(
            self.presentation,
            [eval_word(rep, g) for g in self.generators],
            [eval_word(rep, inverse(g)) for g in self.generators],
        )


def reidemeister_schreier(pres, moduli, hom):
    """Cover for ``hom``: generator ``i`` maps to the vector ``hom[i]`` in ``prod Z/moduli``."""
    moduli = tuple(int(m) for m in moduli)
    hom = tuple(tuple(int(a) % m for a, m in zip(h, moduli)) for h in hom)
    if len(hom) != pres.n_gens:
        raise ValueError("one image per generator required")
    zero = tuple(0 for _ in moduli)

    def step(coset, x):
        h = np.asarray(hom[abs(x) - 1]) * np.sign(x)
        return tuple(int(a + b) % m for a, b, m in zip(coset, h, moduli))

    for r in pres.relators:
        c = zero
        for x in r:
            c = step(c, x)
        if c != zero:
            raise HomNotWellDefined(f"relator {pres.format(r)} maps to {c}")

    # Schreier transversal by BFS over positive letters first (prefix closed)
    transversal = {zero: ()}
    queue = deque([zero])
    letters = [i + 1 for i in range(pres.n_gens)] + [-(i + 1) for i in range(pres.n_gens)]
    while queue:
        c = queue.popleft()
        for x in letters:
            d = step(c, x)
            if d not in transversal:
                transversal[d] = reduce_word(transversal[c] + (x,))
                queue.append(d)

    gens, keys, index_of = [], [], {}
    for c in sorted(transversal):
        u = transversal[c]
        for i in range(pres.n_gens):
            x = i + 1
            w = concat(u, (x,), inverse(transversal[step(c, x)]))
            if w:
                index_of[(c, x)] = len(gens)
                gens.append(w)
                keys.append((c, x))

    names = tuple(f"y{k}" for k in range(len(gens)))
    cover = CoverData(pres, moduli, hom, transversal, gens, keys, None, index_of)
    rels = []
    for c in sorted(transversal):
        u = transversal[c]
        for r in pres.relators:
            rr = cover.rewrite(conjugate(u, r))
            if rr:
                rels.append(rr)
    genus = 0
    if pres.kind == "surface":
        chi = len(transversal) * pres.euler_characteristic
        genus = int(round(1 - chi / 2))
    cover.presentation = Presentation(names, tuple(rels), genus)
    return cover


@dataclass
class LiftedCurve:
    """Components of the preimage of a curve in a cover.

    ``components[j]`` is the subgroup word of ``u_j x^m u_j^-1``.  When the
    downstairs HNN stable letter is known, ``crossing_generators[j]`` lists the
    Schreier generators that cross component ``j`` (they are the stable letters
    of the cover's graph of groups for that component) and
    ``crossing_curves[k]`` is the conjugate of ``x^m`` at the head of crossing
    generator ``k``.
    """

    curve: tuple
    m: int
    d: int
    conjugators: list
    components: list
    crossing_generators: list = None
    crossing_curves: dict = None


def lift_curve(cover, curve, stable_letter=None):
    curve = reduce_word(curve)
    if not curve:
        raise ValueError("curve must be nontrivial")
    h = np.array(cover.image(curve))
    mod = np.array(cover.moduli)
    m = 1
    while any((m * h) % mod):
        m += 1
    d = cover.index // m
    # cosets of the cyclic subgroup generated by h(curve)
    orbit = {tuple((k * h) % mod) for k in range(m)}
    seen, reps = set(), []
    for c in sorted(cover.transversal):
        if c in seen:
            continue
        reps.append(c)
        seen.update(tuple((np.array(c) + np.array(o)) % mod) for o in orbit)
    conjugators = [cover.transversal[c] for c in reps]
    components = [cover.rewrite(conjugate(u, power(curve, m))) for u in conjugators]
    crossing = curves = None
    if stable_letter is not None:
        (b,) = stable_letter
        if b < 0:
            raise ValueError("stable letter must be a positive generator")
        if any(abs(x) == b for u in cover.transversal.values() for x in u):
            raise UnsupportedCurve("transversal uses the stable letter")
        if any(abs(x) == b for x in curve):
            raise UnsupportedCurve("curve uses the stable letter")
        crossing = [[] for _ in reps]
        rep_of = {}
        for j, c in enumerate(reps):
            for o in orbit:
                rep_of[tuple((np.array(c) + np.array(o)) % mod)] = j
        curves = {}
        for k, (c, x) in enumerate(cover.generator_keys):
            if x == b:
                head = cover._step(c, x)
                crossing[rep_of[head]].append(k)
                curves[k] = cover.rewrite(conjugate(cover.transversal[head], power(curve, m)))
    return LiftedCurve(curve, m, d, conjugators, components, crossing, curves)


# ---------------------------------------------------------------------------
# splittings of the genus-2 group


@dataclass
class Splitting:
    """Graph-of-groups data for one simple closed curve.

    ``vertex_generators[v]`` are ambient words generating vertex group ``v``
    (vertex 0 carries the basepoint).  ``reassembly[i]`` writes ambient
    generator ``i`` over the symbols ``("v", vertex, k)`` and ``("s",)``.
    """

    curve: tuple
    kind: str
    vertex_generators: list
    stable_letter: tuple = None
    reassembly: list = None

    @property
    def near_vertex(self):
        return 0

    def symbol_word(self, symbol):
        if symbol[0] == "s":
            return self.stable_letter
        return self.vertex_generators[symbol[1]][symbol[2]]

    def check_reassembly(self, pres):
        for i, expr in enumerate(self.reassembly):
            w = concat(*[self.symbol_word(s) if e > 0 else inverse(self.symbol_word(s)) for s, e in expr])
            if w != (i + 1,):
                return False
        return True


def standard_splitting(pres, curve_id):
    """Built-in splittings of the genus-2 group: HNN along ``a1``/``a2``, amalgam along ``[a1, b1]``."""
    if pres.kind != "surface" or pres.genus != 2:
        raise UnsupportedCurve("built-in splittings exist for the genus-2 surface group only")
    a1, b1, a2, b2 = (pres.gen(n) for n in ("a1", "b1", "a2", "b2"))
    if curve_id == "a1":
        return Splitting(
            a1, "hnn", [[a1, a2, b2]], b1,
            [[(("v", 0, 0), 1)], [(("s",), 1)], [(("v", 0, 1), 1)], [(("v", 0, 2), 1)]],
        )
    if curve_id == "a2":
        return Splitting(
            a2, "hnn", [[a1, b1, a2]], b2,
            [[(("v", 0, 0), 1)], [(("v", 0, 1), 1)], [(("v", 0, 2), 1)], [(("s",), 1)]],
        )
    if curve_id == "sep":
        return Splitting(
            commutator(a1, b1), "amalgam", [[a1, b1], [a2, b2]], None,
            [[(("v", 0, 0), 1)], [(("v", 0, 1), 1)], [(("v", 1, 0), 1)], [(("v", 1, 1), 1)]],
        )
    raise UnsupportedCurve(curve_id)


# ---------------------------------------------------------------------------
# regularity


@dataclass
class RegularityVerdict:
    regular: bool
    radius: int
    witness: tuple = None

    @property
    def label(self):
        return "regular_up_to_radius" if self.regular else "involution_found"


def regularity_probe(rep2, x, radius, tol=1e-7):
    """Search for ``s`` with ``rho(s)^2 = +-I`` and ``rho(s) rho(x) rho(s)^-1 = +-rho(x)^-1``."""
    X, Xi = rep2.pair(x)
    if abs(np.trace(X)) <= 2 + 1e-9:
        raise NotHyperbolic(f"|tr| = {abs(np.trace(X))}")
    words, S, Si = ball_images(rep2, radius)
    if not words:
        return RegularityVerdict(True, radius)
    eye = np.eye(2)
    sq = S @ S
    inv_ok = np.minimum(np.abs(sq - eye).max(axis=(1, 2)), np.abs(sq + eye).max(axis=(1, 2))) < tol
    conj = S @ X @ Si
    flip_ok = np.minimum(np.abs(conj - Xi).max(axis=(1, 2)), np.abs(conj + Xi).max(axis=(1, 2))) < tol
    hits = np.flatnonzero(inv_ok & flip_ok)
    if hits.size:
        return RegularityVerdict(False, radius, words[hits[0]])
    return RegularityVerdict(True, radius)
