"""Small finite fields and the permutation actions built from them.

Field arithmetic comes from ``galois``. Elements of GF(p^k) are the integers
0..q-1 of its integer representation, so a permutation of the field is a
permutation of range(q). Actions are returned as 0-based Permutations on field
elements, projective points or vectors.
"""

from __future__ import annotations

import itertools
from functools import cache

import galois
import numpy as np

from relkit.models.permutation import Permutation

Matrix = tuple[tuple[int, ...], ...]


def _ints(values: np.ndarray) -> np.ndarray:
    return values.view(np.ndarray).astype(np.int64)


class GaloisField:
    """Integer-indexed wrapper with addition and multiplication tables."""

    def __init__(self, order: int) -> None:
        self.gf: type[galois.FieldArray] = galois.GF(order)
        self.p = int(self.gf.characteristic)
        self.k = int(self.gf.degree)
        self.q = int(self.gf.order)
        elements = self.gf.elements
        self._add = _ints(elements[:, None] + elements[None, :])
        self._mul = _ints(elements[:, None] * elements[None, :])
        self._neg = _ints(-elements)

    def add(self, a: int, b: int) -> int:
        return int(self._add[a, b])

    def neg(self, a: int) -> int:
        return int(self._neg[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return int(self._mul[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.gf(1) / self.gf(a))

    def power(self, a: int, e: int) -> int:
        return int(self.gf(a) ** e)

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.power(a, self.p**times) if times else a

    def primitive_element(self) -> int:
        return int(self.gf.primitive_element)

    def is_square(self, a: int) -> bool:
        return bool(self.gf(a).is_square())

    def __repr__(self) -> str:
        return f"GF({self.q})"


@cache
def field(q: int) -> GaloisField:
    if q < 2 or not galois.is_prime_power(q):
        raise ValueError(f"No field of order {q}")
    return GaloisField(q)


def affine_map(f: GaloisField, a: int, b: int, frobenius: int = 0) -> Permutation:
    """x -> a * x^sigma + b on GF(q)."""
    return Permutation(tuple(f.add(f.mul(a, f.frobenius(x, frobenius)), b) for x in range(f.q)))


def mobius_map(
    f: GaloisField, a: int, b: int, c: int, d: int, frobenius: int = 0
) -> Permutation:
    """x -> (a x^sigma + b) / (c x^sigma + d) on the projective line, infinity = q."""
    inf = f.q
    images = []
    for x in range(f.q + 1):
        if x == inf:
            num, den = a, c
        else:
            y = f.frobenius(x, frobenius)
            num, den = f.add(f.mul(a, y), b), f.add(f.mul(c, y), d)
        images.append(inf if den == 0 else f.mul(num, f.inv(den)))
    return Permutation(tuple(images))


def vectors(p: int, m: int) -> np.ndarray:
    """GF(p)^m as rows, with vector v at index sum(v_i * p^i)."""
    idx = np.arange(p**m)
    return np.stack([(idx // p**i) % p for i in range(m)], axis=1)


def _index(rows: np.ndarray, p: int) -> np.ndarray:
    weights = p ** np.arange(rows.shape[1])
    return _ints(rows) @ weights


def linear_map(p: int, matrix: Matrix) -> Permutation:
    gf = field(p).gf
    m = len(matrix)
    images = gf(vectors(p, m)) @ gf(np.array(matrix)).T
    return Permutation(tuple(int(i) for i in _index(images, p)))


def translation(p: int, shift: tuple[int, ...]) -> Permutation:
    gf = field(p).gf
    images = gf(vectors(p, len(shift))) + gf(np.array(shift))
    return Permutation(tuple(int(i) for i in _index(images, p)))


def transvections(p: int, m: int) -> list[Matrix]:
    """The elementary matrices I + E_ij, which generate SL(m, p)."""
    out = []
    for i, j in itertools.permutations(range(m), 2):
        rows = [[int(r == c) for c in range(m)] for r in range(m)]
        rows[i][j] = 1
        out.append(tuple(tuple(row) for row in rows))
    return out


def projective_points(p: int, m: int) -> list[tuple[int, ...]]:
    """Points of PG(m-1, p): nonzero vectors whose first nonzero coordinate is 1."""
    out = []
    for v in itertools.product(range(p), repeat=m):
        nonzero = [x for x in v if x]
        if nonzero and nonzero[0] == 1:
            out.append(v)
    return out


def projective_map(p: int, matrix: Matrix) -> Permutation:
    gf = field(p).gf
    points = projective_points(p, len(matrix))
    index = {v: i for i, v in enumerate(points)}
    images = gf(np.array(points)) @ gf(np.array(matrix)).T
    out = []
    for row in images:
        lead = next(x for x in row if x)
        normal = row / lead
        out.append(index[tuple(int(x) for x in normal)])
    return Permutation(tuple(out))
