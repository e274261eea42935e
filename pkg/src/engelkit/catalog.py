"""Builders for the concrete groups and homomorphisms used across the package.

Every builder returns a :class:`~engelkit.pc.PcPresentation` that has passed a
randomised associativity test.  Builders also record ``definitions``: how each
non-defining pc generator is obtained from earlier ones (a commutator or a
power), which is what lets a homomorphism be specified on the defining
generators alone.

Catalog names (as used by the CLI):

    burnside3:<m>          B(m,3), m <= 4
    freenil:<m>:<c>        free nilpotent of rank m and class c <= 3
    expquot:<m>:<c>:<q>    free nilpotent modulo q-th powers, q = p or p^2, p > c
    heisenberg             alias for freenil:2:2
    S3 Q8 D8 D16 D32 D<2^k> C3wrC3 C<k>
"""

from __future__ import annotations

import functools
import itertools
import math
import os
from collections.abc import Sequence
from dataclasses import dataclass, field

from sympy import Matrix, factorint, isprime

from engelkit.errors import InfiniteGroupError, PresentationError, PresentationMismatch
from engelkit.hallpoly import HallArithmetic
from engelkit.magnus import MagnusElement, group_commutator, solve_integer_combination
from engelkit.pc import GroupElement, PcPresentation, collect, enumerate_elements

BUILD_TRIPLES = 10_000


def _attach(p: PcPresentation, definitions: dict | None = None, relatively_free: bool = False,
            variety: str = "") -> PcPresentation:
    p.definitions = dict(definitions or {})
    p.relatively_free = relatively_free
    p.variety = variety
    return p


def definitions_of(p: PcPresentation) -> dict:
    return getattr(p, "definitions", {})


def defining_generators(p: PcPresentation) -> list:
    defs = definitions_of(p)
    return [i for i in range(p.ngens) if i not in defs]


# ---------------------------------------------------------------------------
# free nilpotent groups via the Magnus embedding


def hall_basis(m: int, c: int) -> list:
    """Basic commutators of weight <= c (c <= 3) as nested index tuples.

    Weight 1: ``i``; weight 2: ``(i, j)`` = [a_i, a_j] with i < j; weight 3:
    ``((i, j), k)`` = [[a_i, a_j], a_k] with i < j and k >= i.
    """
    if not 1 <= c <= 3:
        raise ValueError("free nilpotent builders support class 1, 2 or 3 only")
    basis = list(range(m))
    if c >= 2:
        basis += [(i, j) for i in range(m) for j in range(i + 1, m)]
    if c >= 3:
        basis += [((i, j), k) for i in range(m) for j in range(i + 1, m) for k in range(i, m)]
    return basis


def _weight(b) -> int:
    if isinstance(b, int):
        return 1
    return sum(_weight(x) for x in b)


def _magnus_value(b, degree):
    if isinstance(b, int):
        return MagnusElement.generator(b, degree)
    return group_commutator(_magnus_value(b[0], degree), _magnus_value(b[1], degree))


@dataclass
class MagnusModel:
    """The pc basis of a free nilpotent group realised inside the Magnus algebra."""

    m: int
    c: int
    basis: list = field(init=False)
    values: list = field(init=False)
    weights: list = field(init=False)

    def __post_init__(self):
        self.basis = hall_basis(self.m, self.c)
        self.values = [_magnus_value(b, self.c) for b in self.basis]
        self.weights = [_weight(b) for b in self.basis]
        self._leads = [v.homogeneous(w) for v, w in zip(self.values, self.weights)]

    def evaluate(self, exps: Sequence[int]) -> MagnusElement:
        out = MagnusElement.one(self.c)
        for v, e in zip(self.values, exps):
            if e:
                out = out * v ** e
        return out

    def normal_form(self, u: MagnusElement) -> tuple:
        """Exponent vector of a group element given by its Magnus image."""
        exps = [0] * len(self.basis)
        cur = u
        for w in range(1, self.c + 1):
            idx = [k for k, wk in enumerate(self.weights) if wk == w]
            coeffs = solve_integer_combination([self._leads[k] for k in idx], cur.homogeneous(w))
            layer = MagnusElement.one(self.c)
            for k, e in zip(idx, coeffs):
                exps[k] = e
                if e:
                    layer = layer * self.values[k] ** e
            cur = ~layer * cur
        if cur != MagnusElement.one(self.c):
            raise PresentationError("Magnus element is not in the span of the basis")
        return tuple(exps)


def _free_nilpotent_data(m: int, c: int):
    model = MagnusModel(m, c)
    n = len(model.basis)
    conjugates = {}
    for i in range(n):
        for j in range(i + 1, n):
            u = ~model.values[i] * model.values[j] * model.values[i]
            img = model.normal_form(u)
            conjugates[j, i] = img
    index = {b: k for k, b in enumerate(model.basis)}
    definitions = {}
    for k, b in enumerate(model.basis):
        if not isinstance(b, int):
            definitions[k] = ("comm", index[b[0]], index[b[1]])
    return model, conjugates, definitions


CROSS_CHECK_SAMPLES = 200


@functools.lru_cache(maxsize=None)
def _hall_arithmetic(m: int, c: int) -> HallArithmetic:
    return HallArithmetic(MagnusModel(m, c))


def _install_hall_arithmetic(p: PcPresentation, m: int, c: int, modulus: int | None,
                             verify_triples: int, seed: int = 0) -> None:
    """Check the closed-form product against collection, switch it on, then run the triple test."""
    import random

    fast = _hall_arithmetic(m, c)
    if modulus is not None:
        fast = fast.reduced(modulus)
    rng = random.Random(seed)
    for _ in range(CROSS_CHECK_SAMPLES if verify_triples else 0):
        x, y = p._sample(rng, 40), p._sample(rng, 40)
        steps = p.steps()
        if p._mul(x, y, steps) != fast.mul(x, y) or p._inv(x, steps) != fast.inv(x):
            raise PresentationError(f"{p.label}: closed-form arithmetic disagrees with collection")
    p.attach_arithmetic(fast)
    if verify_triples:
        p.check_consistency(verify_triples, seed=seed)


@functools.lru_cache(maxsize=None)
def build_free_nilpotent(m: int, c: int, verify_triples: int = BUILD_TRIPLES) -> PcPresentation:
    if m < 1:
        raise ValueError("rank must be positive")
    if c > 3:
        raise ValueError("class > 3 is not supported")
    model, conjugates, definitions = _free_nilpotent_data(m, c)
    p = PcPresentation(
        [None] * len(model.basis),
        conjugates=conjugates,
        label=f"freenil:{m}:{c}",
        weights=model.weights,
        check_triples=0,
    )
    _install_hall_arithmetic(p, m, c, None, verify_triples)
    return _attach(p, definitions, relatively_free=True, variety=f"nilpotent class {c}")


def _prime_power(q: int):
    f = factorint(q)
    if len(f) != 1:
        raise ValueError(f"modulus {q} is not a prime power")
    (prime, k), = f.items()
    return prime, k


@functools.lru_cache(maxsize=None)
def build_exponent_quotient(m: int, c: int, q: int, verify_triples: int = BUILD_TRIPLES) -> PcPresentation:
    """``F_m / F_m^q gamma_{c+1}(F_m)`` for ``q = p`` or ``p^2`` with ``p > c``.

    With ``p > c`` every power relation of the free nilpotent basis is trivial
    modulo ``q``, so the presentation is the free nilpotent one with all
    relative orders set to ``q``.
    """
    if not 1 <= c <= 3:
        raise ValueError("class must be 1, 2 or 3")
    prime, k = _prime_power(q)
    if k > 2:
        raise ValueError("modulus must be p or p^2")
    if prime <= c:
        raise ValueError(f"prime {prime} must exceed the class {c}")
    model, conjugates, definitions = _free_nilpotent_data(m, c)
    conj = {key: tuple(e % q for e in img) for key, img in conjugates.items()}
    p = PcPresentation(
        [q] * len(model.basis),
        conjugates=conj,
        label=f"expquot:{m}:{c}:{q}",
        weights=model.weights,
        check_triples=0,
    )
    _install_hall_arithmetic(p, m, c, q, verify_triples)
    return _attach(p, definitions, relatively_free=True,
                   variety=f"nilpotent class {c}, exponent {q}")


# ---------------------------------------------------------------------------
# Burnside groups of exponent 3


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


@functools.lru_cache(maxsize=None)
def build_burnside3(m: int, verify_triples: int = BUILD_TRIPLES) -> PcPresentation:
    """B(m,3) on the basis a_i, [a_i,a_j] (i<j), [a_i,a_j,a_k] (i<j<k).

    Exponent 3 forces the weight-three commutator map to be alternating and
    trilinear, and [a_j,a_i] = [a_i,a_j]^-1; those two facts are all the
    conjugate relations.  All relative orders are 3 and the order is
    3^(m + C(m,2) + C(m,3)).
    """
    if m < 1:
        raise ValueError("rank must be positive")
    if m > 4:
        raise ValueError("B(m,3) is only built for m <= 4")
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    triples = list(itertools.combinations(range(m), 3))
    n = m + len(pairs) + len(triples)
    pidx = {pr: m + k for k, pr in enumerate(pairs)}
    tidx = {t: m + len(pairs) + k for k, t in enumerate(triples)}

    def unit(*entries):
        v = [0] * n
        for k, e in entries:
            v[k] = e % 3
        return tuple(v)

    conjugates = {}
    for i, j in pairs:
        conjugates[j, i] = unit((j, 1), (pidx[i, j], -1))
    for (i, j), b in pidx.items():
        for k in range(m):
            if k in (i, j):
                continue
            key = tuple(sorted((i, j, k)))
            conjugates[b, k] = unit((b, 1), (tidx[key], _perm_sign((i, j, k))))
    definitions = {pidx[pr]: ("comm", pr[0], pr[1]) for pr in pairs}
    definitions.update({tidx[t]: ("comm", pidx[t[0], t[1]], t[2]) for t in triples})
    weights = [1] * m + [2] * len(pairs) + [3] * len(triples)
    p = PcPresentation([3] * n, conjugates=conjugates, label=f"burnside3:{m}",
                       weights=weights, check_triples=verify_triples)
    return _attach(p, definitions, relatively_free=True, variety="exponent 3")


# ---------------------------------------------------------------------------
# small classical groups


def _dihedral(order: int, verify_triples: int) -> PcPresentation:
    k = order.bit_length() - 1
    if order != 2 ** k or k < 2:
        raise ValueError("dihedral builder needs order 2^k with k >= 2")
    # g1 = s, g2 = r, g_{t+2} = r^(2^t)
    n = k
    rot = list(range(1, n))  # pc indices of r^(2^t), t = 0..k-2

    def rot_power(e):
        e %= 2 ** (k - 1)
        v = [0] * n
        for t, idx in enumerate(rot):
            v[idx] = (e >> t) & 1
        return tuple(v)

    powers = {rot[t]: rot_power(2 ** (t + 1)) for t in range(len(rot))}
    conjugates = {(rot[t], 0): rot_power(-(2 ** t)) for t in range(len(rot))}
    defs = {rot[t]: ("pow", rot[t - 1], 2) for t in range(1, len(rot))}
    p = PcPresentation([2] * n, powers=powers, conjugates=conjugates,
                       label=f"D{order}", check_triples=verify_triples)
    return _attach(p, defs, variety="2-group")


def _quaternion(verify_triples: int) -> PcPresentation:
    p = PcPresentation([2, 2, 2], powers={0: (0, 0, 1), 1: (0, 0, 1)},
                       conjugates={(1, 0): (0, 1, 1)}, label="Q8", check_triples=verify_triples)
    return _attach(p, {2: ("pow", 1, 2)}, variety="2-group")


def _s3(verify_triples: int) -> PcPresentation:
    p = PcPresentation([2, 3], conjugates={(1, 0): (0, 2)}, label="S3", check_triples=verify_triples)
    return _attach(p, {})


def _c3_wr_c3(verify_triples: int) -> PcPresentation:
    # top t = g1; base F_3[y]/(y^3) with y = x - 1, basis 1, y, y^2 = g2, g3, g4
    p = PcPresentation(
        [3, 3, 3, 3],
        conjugates={(1, 0): (0, 1, 1, 0), (2, 0): (0, 0, 1, 1)},
        label="C3wrC3",
        weights=[1, 1, 2, 3],
        check_triples=verify_triples,
    )
    return _attach(p, {2: ("comm", 1, 0), 3: ("comm", 2, 0)}, variety="3-group")


def _cyclic(k: int, verify_triples: int) -> PcPresentation:
    if k < 2:
        raise ValueError("cyclic group order must be >= 2")
    p = PcPresentation([k], label=f"C{k}", weights=[1], check_triples=verify_triples)
    return _attach(p, {})


@functools.lru_cache(maxsize=None)
def build_classic(name: str, verify_triples: int = BUILD_TRIPLES) -> PcPresentation:
    if name == "S3":
        return _s3(verify_triples)
    if name == "Q8":
        return _quaternion(verify_triples)
    if name == "C3wrC3":
        return _c3_wr_c3(verify_triples)
    if name.startswith("D") and name[1:].isdigit():
        return _dihedral(int(name[1:]), verify_triples)
    if name.startswith("C") and name[1:].isdigit():
        return _cyclic(int(name[1:]), verify_triples)
    raise KeyError(f"unknown classic group {name!r}")


def build(name: str, verify_triples: int = BUILD_TRIPLES) -> PcPresentation:
    """Build a catalog group from its name string."""
    parts = name.strip().split(":")
    head = parts[0].lower()
    try:
        args = [int(a) for a in parts[1:]]
    except ValueError:
        raise KeyError(f"bad catalog name {name!r}") from None
    if head == "burnside3" and len(args) == 1:
        return build_burnside3(args[0], verify_triples)
    if head == "freenil" and len(args) == 2:
        return build_free_nilpotent(args[0], args[1], verify_triples)
    if head == "expquot" and len(args) == 3:
        return build_exponent_quotient(args[0], args[1], args[2], verify_triples)
    if head == "heisenberg" and not args:
        return build_free_nilpotent(2, 2, verify_triples)
    if head == "cyclic" and len(args) == 1:
        return build_classic(f"C{args[0]}", verify_triples)
    if not args:
        return build_classic(parts[0], verify_triples)
    raise KeyError(f"unknown catalog name {name!r}")


CATALOG_NAMES = (
    "burnside3:1", "burnside3:2", "burnside3:3", "freenil:2:2", "freenil:2:3",
    "expquot:2:2:25", "expquot:2:3:25", "S3", "Q8", "D8", "D16", "D32", "C3wrC3", "C5",
)


# ---------------------------------------------------------------------------
# homomorphisms


class GroupHom:
    """A homomorphism given by the images of all source pc generators."""

    def __init__(self, source: PcPresentation, target: PcPresentation, images: Sequence[GroupElement],
                 relatively_free: bool = False):
        if len(images) != source.ngens:
            raise ValueError("need one image per source pc generator")
        for img in images:
            if img.pres != target:
                raise PresentationMismatch("image outside the target presentation")
        self.source = source
        self.target = target
        self.images = tuple(images)
        self.relatively_free = relatively_free
        self._powers = {1: self}

    def __call__(self, x: GroupElement) -> GroupElement:
        return hom_apply(self, x)

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def __hash__(self):
        return hash(tuple(i.exps for i in self.images))

    def compose(self, inner: GroupHom) -> GroupHom:
        """``self o inner`` (apply ``inner`` first)."""
        if inner.target != self.source:
            raise PresentationMismatch("cannot compose: target/source differ")
        return GroupHom(inner.source, self.target, [self(img) for img in inner.images])

    def power(self, k: int) -> GroupHom:
        """``self^k`` for an endomorphism, ``k >= 0``, by repeated squaring."""
        if self.source != self.target:
            raise ValueError("only endomorphisms have powers")
        if k < 0:
            raise ValueError("negative powers need hom_is_invertible")
        result = identity_hom(self.source)
        step = 1
        base = self
        while k:
            if k & 1:
                result = base.compose(result)
            k >>= 1
            if k:
                step *= 2
                nxt = self._powers.get(step)
                if nxt is None:
                    nxt = base.compose(base)
                    self._powers[step] = nxt
                base = nxt
        return result


def identity_hom(p: PcPresentation) -> GroupHom:
    return GroupHom(p, p, p.gens(), relatively_free=getattr(p, "relatively_free", False))


def hom_apply(phi: GroupHom, x: GroupElement) -> GroupElement:
    if x.pres != phi.source:
        raise PresentationMismatch("element is not in the homomorphism's source")
    t = phi.target
    steps = t.steps()
    out = t._zero
    for img, e in zip(phi.images, x.exps):
        if e:
            out = t._mul(out, t._pow(img.exps, e, steps), steps)
    return GroupElement(t, out)


def extend_images(source: PcPresentation, target: PcPresentation, generator_images: Sequence[GroupElement]) -> list:
    """Images of all pc generators from images of the defining ones."""
    from engelkit.pc import commutator

    gens = defining_generators(source)
    if len(generator_images) != len(gens):
        raise ValueError(f"expected {len(gens)} generator images, got {len(generator_images)}")
    images: list = [None] * source.ngens
    for k, img in zip(gens, generator_images):
        if img.pres != target:
            raise PresentationMismatch("generator image outside target")
        images[k] = img
    for k in range(source.ngens):
        if images[k] is not None:
            continue
        kind, a, b = definitions_of(source)[k]
        if kind == "comm":
            images[k] = commutator([images[a], images[b]])
        else:
            images[k] = images[a] ** b
    return images


def build_hom(source: PcPresentation, target: PcPresentation,
              generator_images: Sequence[GroupElement]) -> GroupHom:
    """Homomorphism from images of the defining generators.

    Raises ``ValueError`` when some pc relator of the source does not map to
    the identity, i.e. the images do not define a homomorphism.
    """
    images = extend_images(source, target, generator_images)
    phi = GroupHom(source, target, images, relatively_free=getattr(source, "relatively_free", False))
    for rel in source.relators():
        if not _evaluate(phi, rel).is_identity():
            raise ValueError(f"relator {rel} is not mapped to the identity")
    return phi


def _evaluate(phi: GroupHom, word) -> GroupElement:
    t = phi.target
    steps = t.steps()
    out = t._zero
    for i, e in word.letters:
        out = t._mul(out, t._pow(phi.images[i].exps, e, steps), steps)
    return GroupElement(t, out)


def _layers(p: PcPresentation):
    if p.weights is None:
        return None
    layers: dict = {}
    for k, w in enumerate(p.weights):
        layers.setdefault(w, []).append(k)
    ws = sorted(layers)
    if ws != list(range(1, len(ws) + 1)):
        return None
    if list(itertools.chain.from_iterable(layers[w] for w in ws)) != list(range(p.ngens)):
        return None
    for w in ws:
        if len({p.relative_orders[k] for k in layers[w]}) != 1:
            return None
    return [layers[w] for w in ws]


def _layer_matrix(phi: GroupHom, layer: list):
    return Matrix([[phi.images[k].exps[j] for k in layer] for j in layer])


def abelianization_determinant(phi: GroupHom) -> int:
    layers = _layers(phi.source)
    if layers is None:
        raise ValueError("no weight-graded basis to read the abelianization from")
    return int(_layer_matrix(phi, layers[0]).det())


def hom_is_invertible(phi: GroupHom, exhaustive_limit: int = 200_000):
    """Decide bijectivity; returns ``(True, inverse)`` or ``(False, None)``.

    Weight-graded platforms whose layers each have a single relative order
    are decided from the layer-one matrix (its determinant a unit modulo the
    relative order, or +-1 for torsion-free layers) and inverted layer by
    layer.  Other finite groups are decided by an exhaustive image scan.
    """
    p = phi.source
    if phi.target != p:
        raise ValueError("invertibility is decided for endomorphisms only")
    layers = _layers(p)
    if layers is not None:
        q = p.relative_orders[layers[0][0]]
        det = abelianization_determinant(phi)
        if q is None:
            ok = det in (1, -1)
        else:
            ok = math.gcd(det, q) == 1
        if not ok:
            return False, None
        inv = _layered_inverse(phi, layers)
        if inv is None:
            return False, None
        return True, inv
    if not p.is_finite:
        raise InfiniteGroupError("no invertibility criterion for this infinite group")
    if p.order() > exhaustive_limit:
        raise ValueError("group too large for the exhaustive invertibility check")
    seen = {}
    for x in enumerate_elements(p):
        y = phi(x)
        if y in seen:
            return False, None
        seen[y] = x
    return True, GroupHom(p, p, [seen[g] for g in p.gens()], phi.relatively_free)


def _layered_inverse(phi: GroupHom, layers):
    p = phi.source
    mats = []
    for layer in layers:
        M = _layer_matrix(phi, layer)
        q = p.relative_orders[layer[0]]
        try:
            mats.append(M.inv_mod(q) if q is not None else M.inv())
        except ValueError:
            return None
        if q is None and any(x.q != 1 for x in mats[-1]):
            return None

    def preimage(g: GroupElement) -> GroupElement:
        x = p.identity()
        rest = g
        for layer, Minv in zip(layers, mats):
            q = p.relative_orders[layer[0]]
            vec = Matrix([rest.exps[k] for k in layer])
            sol = Minv * vec
            exps = [0] * p.ngens
            for k, v in zip(layer, sol):
                v = int(v)
                exps[k] = v % q if q is not None else v
            piece = p.element(exps)
            x = x * piece
            rest = ~phi(piece) * rest
        if not rest.is_identity():
            raise ValueError("layered preimage failed")
        return x

    try:
        images = [preimage(g) for g in p.gens()]
    except ValueError:
        return None
    inv = GroupHom(p, p, images, phi.relatively_free)
    if any(phi(inv(g)) != g for g in p.gens()):
        return None
    return inv


# ---------------------------------------------------------------------------
# holomorph


@dataclass(frozen=True)
class HolomorphElement:
    """``(g, phi^r)`` in the semidirect product of a group with ``<phi>``."""

    g: GroupElement
    r: int
    phi: GroupHom

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("automorphism exponent must be nonnegative")
        if self.g.pres != self.phi.source:
            raise PresentationMismatch("group element and automorphism act on different groups")


# ---------------------------------------------------------------------------
# lookup by name, with an optional directory of presentation files

CATALOG_ENV = "ENGELKIT_CATALOG_DIR"


def resolve(name: str, catalog_dir: str | None = None) -> PcPresentation:
    """A presentation file ``<dir>/<name>.json`` wins over the built-in catalog.

    ``catalog_dir`` defaults to the ``ENGELKIT_CATALOG_DIR`` environment variable.
    """

    directory = catalog_dir if catalog_dir is not None else os.environ.get(CATALOG_ENV)
    if directory:
        path = os.path.join(directory, f"{name.replace(':', '_')}.json")
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                return _cached_file(path, fh.read())
    return build(name)


@functools.lru_cache(maxsize=64)
def _cached_file(path: str, text: str) -> PcPresentation:
    from engelkit.wire import parse_presentation

    return parse_presentation(text)


def random_automorphism(p: PcPresentation, rng, max_tries: int = 100) -> GroupHom:
    """Random images of the defining generators, resampled until invertible."""
    from engelkit.pc import random_element

    gens = defining_generators(p)
    for _ in range(max_tries):
        images = [random_element(p, rng) for _ in gens]
        try:
            phi = build_hom(p, p, images)
        except ValueError:
            continue
        ok, _ = hom_is_invertible(phi)
        if ok:
            return phi
    raise ValueError(f"no automorphism found in {max_tries} tries")
