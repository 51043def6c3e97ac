"""Cyclic words in dual generators, with sign-tracked canonicalization.

Functions and differential forms on the formal neighbourhood live in the
tensor category generated by letters xi_y (one per basis morphism y, degree
1 - |y|) and their marked variants d(xi_y) (degree 2 - |y|).  A term is a
configuration: a tuple of (label, mark) pairs, mark 1 meaning the letter
carries a d.  Cyclic classes are stored via a canonical representative, the
lexicographically minimal rotation, with the Koszul sign of the rotation
multiplied into the coefficient.  Configurations fixed by a rotation of
sign -1 are zero and are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field import FieldCtx, QQ


class NCError(Exception):
    pass


@dataclass(frozen=True)
class Letter:
    label: str
    src: str          # source object of the underlying morphism y
    tgt: str
    primal_degree: int
    is_unit: bool = False

    @property
    def degree(self) -> int:
        # xi_y is dual to the shift of y
        return 1 - self.primal_degree


@dataclass
class NCContext:
    """Letter alphabet extracted from a category's hom bases."""

    field: FieldCtx = QQ
    letters: dict = dc_field(default_factory=dict)   # label -> Letter

    @classmethod
    def from_category(cls, cat) -> "NCContext":
        unit_labels = set(cat.units.values())
        letters = {}
        for (i, j), basis in sorted(cat.hom.items()):
            for lab, deg in basis:
                if lab in letters:
                    raise NCError("duplicate letter label %r" % (lab,))
                letters[lab] = Letter(lab, i, j, deg, lab in unit_labels)
        return cls(field=cat.field, letters=letters)

    def letter(self, lab: str) -> Letter:
        try:
            return self.letters[lab]
        except KeyError:
            raise NCError("unknown letter %r" % (lab,))

    def degree(self, lab: str) -> int:
        return self.letter(lab).degree

    def eff_degree(self, slot) -> int:
        lab, mark = slot
        return self.letter(lab).degree + mark

    def cfg_degree(self, cfg) -> int:
        return sum(self.eff_degree(s) for s in cfg)

    def unit_labels(self):
        return {lab for lab, l in self.letters.items() if l.is_unit}

    # xi_y runs against the morphism direction
    def xi_src(self, lab: str) -> str:
        return self.letter(lab).tgt

    def xi_tgt(self, lab: str) -> str:
        return self.letter(lab).src


def word_composable(ctx: NCContext, labels, closed: bool) -> bool:
    """Operator-order composability: src of each letter = tgt of the next."""
    if not labels:
        return True
    for k in range(len(labels) - 1):
        if ctx.xi_src(labels[k]) != ctx.xi_tgt(labels[k + 1]):
            return False
    if closed:
        return ctx.xi_src(labels[-1]) == ctx.xi_tgt(labels[0])
    return True


def cfg_composable(ctx: NCContext, cfg, closed: bool = True) -> bool:
    return word_composable(ctx, tuple(lab for lab, _ in cfg), closed)


def canonical_cyclic(ctx: NCContext, cfg):
    """Canonical representative of a cyclic configuration.

    Returns (canonical_cfg, sign) with cfg == sign * canonical_cfg in the
    cyclic quotient, or None when the class is zero (some rotation fixes
    the configuration with sign -1).
    """
    cfg = tuple(cfg)
    m = len(cfg)
    if m == 0:
        raise NCError("empty configuration")
    effs = [ctx.eff_degree(s) for s in cfg]
    total = sum(effs)
    rotations = {}
    cur, sign = cfg, 1
    for _ in range(m):
        prev = rotations.get(cur)
        if prev is None:
            rotations[cur] = sign
        elif prev != sign:
            return None
        last = cur[-1]
        step = ctx.eff_degree(last) * (total - ctx.eff_degree(last))
        sign *= -1 if step % 2 else 1
        cur = (last,) + cur[:-1]
    best = min(rotations)
    # sign relating the input representative to the canonical one:
    # cfg = rotations[best] * best, so coefficient transport multiplies
    # by rotations[best] when re-keying onto best.
    return best, rotations[best]


def add_cyclic_term(ctx: NCContext, field: FieldCtx, acc: dict, cfg, coeff) -> None:
    """Accumulate coeff * [cfg] into acc keyed by canonical representatives."""
    if field.is_zero(coeff):
        return
    canon = canonical_cyclic(ctx, cfg)
    if canon is None:
        return
    key, sign = canon
    c = field.mul(coeff, field.of_int(sign))
    new = field.add(acc.get(key, field.of_int(0)), c)
    if field.is_zero(new):
        acc.pop(key, None)
    else:
        acc[key] = new


def add_open_term(field: FieldCtx, acc: dict, cfg, coeff) -> None:
    if field.is_zero(coeff):
        return
    new = field.add(acc.get(cfg, field.of_int(0)), coeff)
    if field.is_zero(new):
        acc.pop(cfg, None)
    else:
        acc[cfg] = new


def apply_letterwise(ctx: NCContext, cfg, action, parity: int):
    """Generic graded derivation step on one configuration.

    action(slot) returns a list of (coeff, replacement_cfg) pairs; the
    replacement splices into the slot position.  parity is the degree
    parity of the derivation, used in the Koszul prefix sign.  Returns a
    list of (coeff, new_cfg); the caller canonicalizes.
    """
    out = []
    prefix = 0
    for k, slot in enumerate(cfg):
        for coeff, repl in action(slot):
            s = -1 if (parity * prefix) % 2 else 1
            out.append((coeff if s == 1 else -coeff, cfg[:k] + tuple(repl) + cfg[k + 1:]))
        prefix += ctx.eff_degree(slot)
    return out


def rotate_mark_last(ctx: NCContext, cfg):
    """Rotate a 1-mark configuration so the marked slot is last.

    Returns (labels_prefix_cfg, sign) where the marked slot sits at the
    end.  Raises unless exactly one slot is marked.
    """
    marked = [k for k, (_, m) in enumerate(cfg) if m]
    if len(marked) != 1:
        raise NCError("expected exactly one marked slot")
    j = marked[0]
    m = len(cfg)
    if j == m - 1:
        return cfg, 1
    # rotate left by j+1: the block cfg[:j+1] moves behind cfg[j+1:]
    head, tail = cfg[: j + 1], cfg[j + 1:]
    dh = sum(ctx.eff_degree(s) for s in head)
    dt = sum(ctx.eff_degree(s) for s in tail)
    sign = -1 if (dh * dt) % 2 else 1
    return tail + head, sign


def enumerate_cyclic_words(ctx: NCContext, order: int, degree=None, avoid=()):
    """Canonical cyclic configurations (no marks) of a given length.

    Optional filters: total letter degree, and a set of excluded labels.
    Output sorted; used for linear solves over word spaces.
    """
    labels = sorted(set(ctx.letters) - set(avoid))
    found = set()

    def extend(word):
        if len(word) == order:
            if ctx.xi_src(word[-1]) != ctx.xi_tgt(word[0]):
                return
            cfg = tuple((lab, 0) for lab in word)
            if degree is not None and ctx.cfg_degree(cfg) != degree:
                return
            canon = canonical_cyclic(ctx, cfg)
            if canon is not None:
                found.add(canon[0])
            return
        for lab in labels:
            if word and ctx.xi_src(word[-1]) != ctx.xi_tgt(lab):
                continue
            extend(word + (lab,))

    extend(())
    return sorted(found)


def enumerate_forms(ctx: NCContext, order: int, form_degree: int):
    """Canonical configurations with the given letter count and mark count."""
    labels = sorted(ctx.letters)
    found = set()

    def extend(cfg, marks_left):
        if len(cfg) == order:
            if marks_left:
                return
            if ctx.xi_src(cfg[-1][0]) != ctx.xi_tgt(cfg[0][0]):
                return
            canon = canonical_cyclic(ctx, cfg)
            if canon is not None:
                found.add(canon[0])
            return
        for lab in labels:
            if cfg and ctx.xi_src(cfg[-1][0]) != ctx.xi_tgt(lab):
                continue
            for mark in (0, 1):
                if mark and not marks_left:
                    continue
                extend(cfg + ((lab, mark),), marks_left - mark)

    extend((), form_degree)
    return sorted(found)
