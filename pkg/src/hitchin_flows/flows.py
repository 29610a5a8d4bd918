"""Goldman flows along simple closed curves.

A flow cuts the group along a curve (one of the splittings in ``groups``)
and deforms the pieces by ``E = exp(-t F)`` where ``F`` is the Goldman
function of the curve's image:

* HNN: the stable letter ``s`` is sent to ``rho(s) E``;
* amalgam: the vertex not holding the basepoint is conjugated by ``E``.

Since ``F`` commutes with the curve's image, relators survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RelatorBroken, NotLoxodromic
from .groups import Splitting, eval_word, inverse, standard_splitting
from .lie_core import InvariantFunctional, alpha_vee, expm, goldman_hat, jordan_projection

RELATOR_TOL = 1e-8
_WIDE = np.longdouble


@dataclass
class FlowSpec:
    splitting: Splitting
    functional: InvariantFunctional
    time: float = 0.0


def flow_generator(rep, splitting, functional):
    """Goldman function of the splitting curve, ``F``."""
    C, Ci = rep.pair(splitting.curve)
    return goldman_hat(C, functional, inverse=Ci)


def _symbol_images(rep, splitting, E, Ei):
    # conjugations run in extended precision so that the stored images are
    # close to correctly rounded; at |t| ~ 2 the relator residual of the
    # flowed images sits near 1e-8 otherwise
    E, Ei = E.astype(_WIDE), Ei.astype(_WIDE)

    def image(symbol, sign):
        w = splitting.symbol_word(symbol)
        if sign < 0:
            w = inverse(w)
        M = eval_word(rep, w).astype(_WIDE)
        if symbol[0] == "s":
            return M @ E if sign > 0 else Ei @ M
        if symbol[1] != splitting.near_vertex:
            return E @ M @ Ei
        return M

    return image


def _assemble(rep, splitting, image):
    out, outi = [], []
    for expr in splitting.reassembly:
        M = np.eye(rep.n, dtype=_WIDE)
        Mi = np.eye(rep.n, dtype=_WIDE)
        for symbol, e in expr:
            M = M @ image(symbol, e)
            Mi = image(symbol, -e) @ Mi
        out.append(M.astype(float))
        outi.append(Mi.astype(float))
    return out, outi


def goldman_flow(rep, spec, check=True):
    """Time-``spec.time`` Goldman flow of ``rep`` along ``spec.splitting``."""
    t = float(spec.time)
    if t == 0.0:
        return rep.with_images(list(rep.images), list(rep.inverses))
    F = flow_generator(rep, spec.splitting, spec.functional)
    E, Ei = expm(-t * F), expm(t * F)
    images, invs = _assemble(rep, spec.splitting, _symbol_images(rep, spec.splitting, E, Ei))
    out = rep.with_images(images, invs)
    if check:
        res = out.relator_residual
        if not res <= RELATOR_TOL * max(1.0, np.abs(E).max() * np.abs(Ei).max()):
            raise RelatorBroken(f"relator residual {res:.3g} at t={t}")
    return out


def flow(rep, curve_id, functional, t):
    """Shorthand with a built-in splitting (``"a1"``, ``"a2"``, ``"sep"``)."""
    split = standard_splitting(rep.presentation, curve_id)
    return goldman_flow(rep, FlowSpec(split, functional, t))


def psl2_length_functional():
    """Functional on PSL_2 whose principal image in sl_3 is the Hilbert length's dual.

    Twisting a PSL_2 representation with it and then embedding agrees with
    twisting the embedded (n = 3) representation by the Hilbert length.
    """
    return alpha_vee([0.5, -0.5], "ell/2")


def fuchsian_twist(rep2, curve_id, t):
    """Twist flow on a PSL_2 representation, compatible with the n = 3 embedding."""
    return flow(rep2, curve_id, psl2_length_functional(), t)


# ---------------------------------------------------------------------------
# flows on a finite cover


def lifted_flow_apply(cover_rep, lifted, functional, t, order=None):
    """Compose the flows along every component of a lifted curve.

    ``lifted`` must come from ``groups.lift_curve`` with a stable letter, so
    each component knows the Schreier generators crossing it.  ``order``
    permutes the components (the result does not depend on it).
    """
    if lifted.crossing_generators is None:
        raise ValueError("lift_curve needs the downstairs stable letter")
    images = list(cover_rep.images)
    invs = list(cover_rep.inverses)
    comps = range(len(lifted.crossing_generators)) if order is None else order
    for j in comps:
        for k in lifted.crossing_generators[j]:
            # the curve words avoid crossing generators, so F is the same before and after
            C, Ci = cover_rep.pair(lifted.crossing_curves[k])
            F = goldman_hat(C, functional, inverse=Ci)
            images[k] = images[k] @ expm(-t * F)
            invs[k] = expm(t * F) @ invs[k]
    return cover_rep.with_images(images, invs)


def _invariants(rep, words):
    traces, jordans = [], []
    for w in words:
        M, Mi = rep.pair(w)
        traces.append(np.trace(M))
        try:
            jordans.append(jordan_projection(M, Mi))
        except NotLoxodromic:
            jordans.append(None)
    return traces, jordans


def flow_lift_compare(rep, splitting, functional, t, cover, probe_words, lifted=None):
    """Largest discrepancy between flowing downstairs and flowing the lifted multicurve.

    Both sides are compared through traces and Jordan projections of
    ``probe_words``, ambient words that must lie in the cover's subgroup.
    Trace differences are scaled by ``max(1, |trace|)``.
    """
    from .groups import lift_curve

    probe_words = [cover.rewrite(w) for w in probe_words]
    if lifted is None:
        lifted = lift_curve(cover, splitting.curve, splitting.stable_letter)
    down = cover.restrict(goldman_flow(rep, FlowSpec(splitting, functional, t)))
    up = lifted_flow_apply(cover.restrict(rep), lifted, functional, t)
    ta, ja = _invariants(down, probe_words)
    tb, jb = _invariants(up, probe_words)
    dev = 0.0
    for x, y in zip(ta, tb):
        dev = max(dev, abs(x - y) / max(1.0, abs(x)))
    for x, y in zip(ja, jb):
        if x is not None and y is not None:
            dev = max(dev, float(np.abs(x - y).max()))
        elif (x is None) != (y is None):
            dev = np.inf
    return dev
