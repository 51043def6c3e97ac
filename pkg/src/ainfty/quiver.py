"""Quivers, doubled quivers, preprojective presentations and their dg version.

Paths are stored target-to-source: the tuple (a, b) is the composite a o b,
defined when src(a) == tgt(b).  A path's source is the source of its last
entry, its target the target of its first.  Relations and differentials are
linear combinations [(coeff, path), ...] with integer or Fraction coeffs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from fractions import Fraction


@dataclass(frozen=True)
class Arrow:
    name: str
    src: str
    tgt: str
    degree: int = 0


@dataclass(frozen=True)
class Quiver:
    """Finite quiver; vertex order and arrow order are part of the data."""

    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        seen = set()
        for a in self.arrows:
            if a.name in seen:
                raise ValueError("duplicate arrow name %r" % (a.name,))
            seen.add(a.name)
            if a.src not in self.vertices or a.tgt not in self.vertices:
                raise ValueError("arrow %r has endpoint outside vertex set" % (a.name,))

    @classmethod
    def make(cls, vertices, arrows) -> "Quiver":
        """arrows: iterable of (name, src, tgt) or (name, src, tgt, degree)."""
        arrs = []
        for spec in arrows:
            if len(spec) == 3:
                name, s, t = spec
                arrs.append(Arrow(name, s, t))
            else:
                name, s, t, d = spec
                arrs.append(Arrow(name, s, t, d))
        return cls(tuple(vertices), tuple(arrs))

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def is_graded(self) -> bool:
        return any(a.degree != 0 for a in self.arrows)

    def arrows_from(self, v: str):
        return [a for a in self.arrows if a.src == v]

    def arrows_into(self, v: str):
        return [a for a in self.arrows if a.tgt == v]


def jordan_quiver() -> Quiver:
    return Quiver.make(("1",), [("a", "1", "1")])


def a2_quiver() -> Quiver:
    return Quiver.make(("1", "2"), [("a", "1", "2")])


def two_loop_quiver() -> Quiver:
    return Quiver.make(("1",), [("a", "1", "1"), ("b", "1", "1")])


def random_quiver(seed: int, max_vertices: int = 3, max_arrows: int = 3) -> Quiver:
    """Small random quiver, deterministic in the seed."""
    import random as _random
    rng = _random.Random(seed)
    nv = rng.randint(1, max_vertices)
    vertices = tuple(str(i + 1) for i in range(nv))
    na = rng.randint(1, max_arrows)
    arrows = []
    for k in range(na):
        s = rng.choice(vertices)
        t = rng.choice(vertices)
        arrows.append(("abcdefgh"[k], s, t))
    return Quiver.make(vertices, arrows)


def star_name(name: str) -> str:
    """Name of the reversed arrow; the involution pairs a with a*."""
    return name[:-1] if name.endswith("*") else name + "*"


def double(q: Quiver) -> Quiver:
    """Doubled quiver: one reversed arrow a* per arrow a, (a*)* = a."""
    if q.is_graded:
        raise ValueError("doubling is defined for degree-0 quivers")
    arrs = list(q.arrows)
    for a in q.arrows:
        if a.name.endswith("*"):
            raise ValueError("arrow name %r collides with the star convention" % (a.name,))
        arrs.append(Arrow(star_name(a.name), a.tgt, a.src))
    return Quiver(q.vertices, tuple(arrs))


def euler_form(q: Quiver, d, e) -> int:
    """Euler pairing: sum_i d_i e_i - sum_{a} d_src(a) e_tgt(a)."""
    d = dimension_vector(q, d)
    e = dimension_vector(q, e)
    total = sum(d[v] * e[v] for v in q.vertices)
    for a in q.arrows:
        total -= d[a.src] * e[a.tgt]
    return total


def symmetrized_euler_form(q: Quiver, d, e) -> int:
    return euler_form(q, d, e) + euler_form(q, e, d)


def dimension_vector(q: Quiver, d) -> dict:
    """Normalize a dimension vector given as dict or sequence (vertex order)."""
    if isinstance(d, dict):
        out = {v: int(d.get(v, 0)) for v in q.vertices}
    else:
        vals = list(d)
        if len(vals) != len(q.vertices):
            raise ValueError("dimension vector length mismatch")
        out = {v: int(x) for v, x in zip(q.vertices, vals)}
    for v, x in out.items():
        if x < 0:
            raise ValueError("negative dimension at vertex %r" % (v,))
    return out


@dataclass(frozen=True)
class PresentedAlgebra:
    """Path algebra of a quiver modulo relations (split by vertex)."""

    quiver: Quiver
    relations: tuple  # tuple of (vertex, ((coeff, path), ...))


def preprojective(q: Quiver) -> PresentedAlgebra:
    """Preprojective algebra: doubled quiver modulo the vertex components
    of sum_a [a, a*]."""
    dq = double(q)
    rels = []
    for v in q.vertices:
        terms = []
        for a in q.arrows:
            st = star_name(a.name)
            if a.tgt == v:
                terms.append((Fraction(1), (a.name, st)))
            if a.src == v:
                terms.append((Fraction(-1), (st, a.name)))
        if terms:
            rels.append((v, tuple(terms)))
    return PresentedAlgebra(dq, tuple(rels))


@dataclass(frozen=True)
class DGQuiverAlgebra:
    """Free path algebra of a graded quiver with a differential on generators.

    differential maps arrow name -> ((coeff, path), ...); it extends to all
    paths by the graded Leibniz rule and has degree +1.  weights, when
    present, assign each arrow a positive integer such that both the product
    and the differential are weight-homogeneous; weight then grades the
    algebra with finite-dimensional pieces.
    """

    quiver: Quiver
    differential: tuple  # tuple of (arrow_name, ((coeff, path), ...))
    weights: tuple = ()  # tuple of (arrow_name, weight)

    def d_of(self, name: str):
        for k, v in self.differential:
            if k == name:
                return v
        return ()

    def weight_of(self, name: str) -> int:
        for k, w in self.weights:
            if k == name:
                return w
        return 1


def derived_preprojective(q: Quiver) -> DGQuiverAlgebra:
    """Degreewise-free dg algebra on the doubled quiver plus a degree -1
    loop u_v at each vertex, with d(u_v) the vertex component of
    sum_a [a, a*].  H^0 recovers the preprojective algebra."""
    dq = double(q)
    arrs = list(dq.arrows)
    diff = []
    weights = [(a.name, 1) for a in dq.arrows]
    for v in q.vertices:
        uname = "u_" + v
        arrs.append(Arrow(uname, v, v, -1))
        weights.append((uname, 2))
        terms = []
        for a in q.arrows:
            st = star_name(a.name)
            if a.tgt == v:
                terms.append((Fraction(1), (a.name, st)))
            if a.src == v:
                terms.append((Fraction(-1), (st, a.name)))
        diff.append((uname, tuple(terms)))
    gq = Quiver(q.vertices, tuple(arrs))
    return DGQuiverAlgebra(gq, tuple(diff), tuple(weights))


def path_src(q: Quiver, path) -> str:
    return q.arrow(path[-1]).src


def path_tgt(q: Quiver, path) -> str:
    return q.arrow(path[0]).tgt


def path_degree(q: Quiver, path) -> int:
    return sum(q.arrow(n).degree for n in path)


def path_composable(q: Quiver, path) -> bool:
    return all(q.arrow(path[k]).src == q.arrow(path[k + 1]).tgt
               for k in range(len(path) - 1))


def path_weight(alg: DGQuiverAlgebra, path) -> int:
    return sum(alg.weight_of(n) for n in path)


def d_path(alg: DGQuiverAlgebra, path):
    """Differential of a path by the graded Leibniz rule.

    Sign: replacing the arrow in slot k costs (-1)^(sum of degrees of the
    slots left of k).  Returns a dict path -> Fraction.
    """
    q = alg.quiver
    out = {}
    for k, name in enumerate(path):
        terms = alg.d_of(name)
        if not terms:
            continue
        sgn = 1
        for j in range(k):
            if q.arrow(path[j]).degree % 2:
                sgn = -sgn
        for coeff, rep in terms:
            new = path[:k] + tuple(rep) + path[k + 1:]
            c = Fraction(coeff) * sgn
            acc = out.get(new, Fraction(0)) + c
            if acc == 0:
                out.pop(new, None)
            else:
                out[new] = acc
    return out


def check_dg(alg: DGQuiverAlgebra):
    """Verify the differential: endpoints preserved, degree +1, d*d = 0 on
    generators (Leibniz then gives d*d = 0 everywhere), and weight
    homogeneity when weights are declared.  Returns (ok, failures)."""
    q = alg.quiver
    failures = []
    for name, terms in alg.differential:
        a = q.arrow(name)
        for coeff, path in terms:
            if not path_composable(q, tuple(path)):
                failures.append(("not composable", name, tuple(path)))
                continue
            if path_src(q, path) != a.src or path_tgt(q, path) != a.tgt:
                failures.append(("endpoint mismatch", name, tuple(path)))
            if path_degree(q, path) != a.degree + 1:
                failures.append(("degree mismatch", name, tuple(path)))
            if alg.weights and path_weight(alg, path) != alg.weight_of(name):
                failures.append(("weight mismatch", name, tuple(path)))
        dd = {}
        for coeff, path in terms:
            for p2, c2 in d_path(alg, tuple(path)).items():
                acc = dd.get(p2, Fraction(0)) + Fraction(coeff) * c2
                if acc == 0:
                    dd.pop(p2, None)
                else:
                    dd[p2] = acc
        if dd:
            failures.append(("d*d nonzero", name, tuple(sorted(dd))))
    return (not failures), failures


def normalized_relations(rels):
    """Canonical form for comparing presentations: each relation is sorted
    by path, scaled to leading coefficient 1; the set is sorted."""
    out = []
    for v, terms in rels:
        terms = [(Fraction(c), tuple(p)) for c, p in terms if Fraction(c) != 0]
        terms.sort(key=lambda t: t[1])
        if not terms:
            continue
        lead = terms[0][0]
        terms = tuple((c / lead, p) for c, p in terms)
        out.append((v, terms))
    out.sort()
    return tuple(out)


def degree_zero_truncation(alg: DGQuiverAlgebra) -> PresentedAlgebra:
    """H^0-presentation of a non-positively graded dg quiver algebra:
    degree-0 arrows modulo the images of the degree -1 arrows."""
    q = alg.quiver
    if any(a.degree > 0 for a in q.arrows):
        raise ValueError("truncation needs a non-positively graded quiver")
    gens = tuple(a for a in q.arrows if a.degree == 0)
    sub = Quiver(q.vertices, gens)
    rels = []
    for a in q.arrows:
        if a.degree == -1:
            terms = tuple((Fraction(c), tuple(p)) for c, p in alg.d_of(a.name))
            if terms and all(all(q.arrow(n).degree == 0 for n in p) for _, p in terms):
                if a.src != a.tgt:
                    raise ValueError("relation %r not split by a vertex" % (a.name,))
                rels.append((a.src, terms))
    return PresentedAlgebra(sub, tuple(rels))
