"""Koszul sign bookkeeping for permutations of graded elements."""

from __future__ import annotations


def koszul_sign(degrees, perm) -> int:
    """Sign of rearranging graded elements x_0,...,x_{n-1} into the order
    x_perm[0], x_perm[1], ...

    The sign is the product of (-1)^(d_i * d_j) over every pair transposed
    past each other, i.e. every inversion of perm.  degrees[i] is the degree
    of x_i; only parity matters.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation: %r" % (perm,))
    if len(degrees) != n:
        raise ValueError("degree/permutation length mismatch")
    sign = 1
    for a in range(n):
        for b in range(a + 1, n):
            if perm[a] > perm[b]:
                if (degrees[perm[a]] % 2) and (degrees[perm[b]] % 2):
                    sign = -sign
    return sign


def rotation_sign(degrees) -> int:
    """Sign of the rotation moving the last of the graded elements to the
    front: x_0...x_{n-1} -> x_{n-1} x_0...x_{n-2}."""
    n = len(degrees)
    if n <= 1:
        return 1
    last = degrees[-1] % 2
    if not last:
        return 1
    crossed = sum(1 for d in degrees[:-1] if d % 2)
    return -1 if crossed % 2 else 1


def prefix_sign(degrees, upto: int) -> int:
    """(-1)^(d_0 + ... + d_{upto-1}): sign of moving an odd operator past
    the first upto elements."""
    crossed = sum(1 for d in degrees[:upto] if d % 2)
    return -1 if crossed % 2 else 1
