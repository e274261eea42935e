"""Samples ``(g, phi(g) h)`` for learning-homomorphisms-with-noise experiments."""

from __future__ import annotations

from engelkit.catalog import GroupHom, defining_generators
from engelkit.pc import PcPresentation, growth_ball, random_element


def _sampler(p: PcPresentation, spec):
    """Return a function ``rng -> element`` for a distribution spec.

    ``"uniform"``, ``"identity"`` (point mass), or ``("ball", radius)`` for the
    uniform distribution on the ball around 1 w.r.t. the defining generators.
    """
    if spec == "uniform":
        return lambda rng: random_element(p, rng)
    if spec == "identity":
        one = p.identity()
        return lambda rng: one
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "ball":
        gens = [p.gen(i) for i in defining_generators(p)]
        _, ball = growth_ball(p, gens, int(spec[1]), keep=True)
        return lambda rng: random_element(p, rng, ball=ball)
    raise ValueError(f"unsupported distribution spec {spec!r}")


def lhn_sample(phi: GroupHom, alpha="uniform", beta=("ball", 1), count: int = 1, rng=None) -> list:
    if rng is None:
        raise ValueError("an rng is required")
    draw_g = _sampler(phi.source, alpha)
    draw_h = _sampler(phi.target, beta)
    out = []
    for _ in range(count):
        g = draw_g(rng)
        out.append((g, phi(g) * draw_h(rng)))
    return out
