"""Exact Peter-Weyl basis blocks.

The coordinate algebra decomposes under the commuting left/right weight
gradings into finite-dimensional blocks: the (2i, 2j) block is spanned by
the matrix coefficients t^l_{ij} for 2l = max(|2i|, |2j|), max+2, ...  Inside
one block the monomials with those weights form a ladder

    base, base*(bc), base*(bc)^2, ...

ordered by total degree, and Gram-Schmidt against the Haar inner product
produces the matrix coefficients up to normalization.  We keep the vectors
in monic form (unit coefficient on the newly entering monomial) together
with their exact squared norms; the conventional normalization, with
squared norm q^(-2i) [2l+1]^-1, differs from the monic one by a scalar
whose square is exact even when the scalar itself leaves the coefficient
field.  Whenever that square root does exist in the field (for example all
spin-1/2 vectors, the highest/lowest monomial vectors, and the central
column), the exactly normalized vector is stored as well.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .algebra import AlgebraElement, Monomial
from .functionals import gns_inner, gns_norm_sq
from .scalars import Scalar, q_number, scalar_sqrt

__all__ = [
    "PWVector",
    "PWBasisBlock",
    "target_norm_sq",
    "block_monomials",
    "pw_orthobasis",
    "bracket_difference",
]


def target_norm_sq(l2: int, i2: int) -> Scalar:
    """The conventional squared norm q^(-2i) [2l+1]^-1 (doubled indices)."""
    return Scalar.q_pow(-i2) * q_number(2 * l2 + 2).inverse()


def bracket_difference(twice_x: int, twice_y: int) -> Scalar:
    """[x]^2 - [y]^2 as the product [x+y][x-y] (doubled arguments)."""
    return q_number(twice_x + twice_y) * q_number(twice_x - twice_y)


class PWVector:
    """One orthogonal vector of a weight block.

    ``monic`` carries unit coefficient on its top monomial; ``norm_sq`` is
    its exact squared norm; ``rescale_sq`` is the exact square of the
    scalar bringing it to the conventional normalization, and
    ``normalized`` is the conventionally normalized vector whenever that
    scalar exists in the coefficient field (None otherwise).
    """

    __slots__ = ("l2", "i2", "j2", "monic", "norm_sq", "rescale_sq",
                 "normalized")

    def __init__(self, l2: int, i2: int, j2: int, monic: AlgebraElement,
                 norm_sq: Scalar):
        self.l2 = l2
        self.i2 = i2
        self.j2 = j2
        self.monic = monic
        self.norm_sq = norm_sq
        self.rescale_sq = target_norm_sq(l2, i2) / norm_sq
        root = scalar_sqrt(self.rescale_sq)
        self.normalized: Optional[AlgebraElement] = (
            monic.scale(root) if root is not None else None)

    @property
    def target_norm_sq(self) -> Scalar:
        return target_norm_sq(self.l2, self.i2)

    def __repr__(self) -> str:
        return (f"PWVector(l2={self.l2}, i2={self.i2}, j2={self.j2}, "
                f"monic={self.monic})")


class PWBasisBlock:
    """All basis vectors of one (2i, 2j) weight block up to the cutoff."""

    __slots__ = ("i2", "j2", "vectors")

    def __init__(self, i2: int, j2: int, vectors: List[PWVector]):
        self.i2 = i2
        self.j2 = j2
        self.vectors = vectors

    @property
    def l2_min(self) -> int:
        return max(abs(self.i2), abs(self.j2))

    def vector(self, l2: int) -> PWVector:
        k, rem = divmod(l2 - self.l2_min, 2)
        if rem or k < 0 or k >= len(self.vectors):
            raise KeyError(f"no vector with doubled spin {l2} in block "
                           f"({self.i2}, {self.j2})")
        return self.vectors[k]

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)


def block_monomials(i2: int, j2: int, count: int) -> List[Monomial]:
    """The degree-ordered monomial ladder spanning the (i2, j2) block."""
    if (i2 + j2) % 2:
        raise ValueError("weight pair must have equal parity")
    ipj = (i2 + j2) // 2
    jmi = (j2 - i2) // 2
    n, s = (-ipj, 0) if ipj < 0 else (0, ipj)
    m0, r0 = (jmi, 0) if jmi >= 0 else (0, -jmi)
    return [Monomial(n, m0 + t, r0 + t, s) for t in range(count)]


def _gram_schmidt(i2: int, j2: int, count: int) -> List[PWVector]:
    l2_min = max(abs(i2), abs(j2))
    done: List[PWVector] = []
    for t, mono in enumerate(block_monomials(i2, j2, count)):
        v = AlgebraElement.from_mono(mono)
        for prev in done:
            coeff = gns_inner(prev.monic, v) / prev.norm_sq
            v = v - prev.monic.scale(coeff)
        norm_sq = gns_norm_sq(v)
        if norm_sq.is_zero():
            raise ArithmeticError(
                f"degenerate Gram matrix in block ({i2}, {j2}) at step {t}")
        done.append(PWVector(l2_min + 2 * t, i2, j2, v, norm_sq))
    return done


def pw_orthobasis(l2max: int) -> Dict[Tuple[int, int], PWBasisBlock]:
    """Exact orthogonal bases for every weight block with 2l <= l2max.

    Cost grows quickly with the cutoff; the exact mode is limited to
    l2max <= 8.
    """
    if l2max < 1:
        raise ValueError("cutoff must be at least 1")
    if l2max > 8:
        raise ValueError("exact mode is limited to doubled spin <= 8")
    blocks: Dict[Tuple[int, int], PWBasisBlock] = {}
    for i2 in range(-l2max, l2max + 1):
        for j2 in range(-l2max, l2max + 1):
            if (i2 + j2) % 2:
                continue
            l2_min = max(abs(i2), abs(j2))
            count = (l2max - l2_min) // 2 + 1
            if count <= 0:
                continue
            blocks[(i2, j2)] = PWBasisBlock(
                i2, j2, _gram_schmidt(i2, j2, count))
    return blocks
