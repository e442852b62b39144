"""Twisted Hochschild cochains and the residue-type 3-cocycles.

A degree-n cochain is a multilinear functional on n+1 algebra arguments
with values in Q(v).  The differential is twisted by the inverse modular
automorphism:

    (b f)(a0, ..., a_{n+1}) =
        sum_i (-1)^i f(..., a_i a_{i+1}, ...)
        + (-1)^{n+1} f(theta^-1(a_{n+1}) a0, a1, ..., a_n)

The six cup-product 3-cocycles phi_* all share the same skeleton: the
unit-coefficient integral of a product of one undifferentiated argument,
one Cartan derivative and one each of the e/f ladder derivatives, with
k-power twists that record how much of the modular weight sits to the
left of each slot.  Two explicit 2-cochains psi_* realize the
cohomologies between phi and its transposition partners.

``VOLUME_CHAIN`` is the 13-term cyclic 3-chain playing the role of the
volume form; pairing any of the cocycles against it is the package's
master consistency check.
"""

from __future__ import annotations

from typing import Callable, List, Sequence, Tuple

from .actions import act_e, act_f, act_h, act_k, theta_inv
from .algebra import AlgebraElement, Monomial, gens, normalize_word
from .functionals import int_one
from .scalars import ONE, ZERO, Scalar, as_scalar


class Cochain:
    """A multilinear functional on ``degree + 1`` algebra arguments."""

    __slots__ = ("degree", "_fn", "name")

    def __init__(self, degree: int,
                 fn: Callable[..., Scalar], name: str = "cochain"):
        self.degree = degree
        self._fn = fn
        self.name = name

    def __call__(self, *args: AlgebraElement) -> Scalar:
        if len(args) != self.degree + 1:
            raise TypeError(f"{self.name} takes {self.degree + 1} arguments, "
                            f"got {len(args)}")
        return self._fn(*args)

    def __add__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain) or other.degree != self.degree:
            return NotImplemented
        return Cochain(self.degree,
                       lambda *a: self(*a) + other(*a),
                       f"({self.name} + {other.name})")

    def __sub__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain) or other.degree != self.degree:
            return NotImplemented
        return Cochain(self.degree,
                       lambda *a: self(*a) - other(*a),
                       f"({self.name} - {other.name})")

    def __neg__(self) -> "Cochain":
        return Cochain(self.degree, lambda *a: -self(*a), f"-{self.name}")

    def scale(self, coeff) -> "Cochain":
        c = as_scalar(coeff)
        return Cochain(self.degree, lambda *a: c * self(*a),
                       f"({coeff})*{self.name}")

    __rmul__ = scale
    __mul__ = scale

    def pair_chain(self, chain: "Chain") -> Scalar:
        """Evaluate against a formal sum of elementary tensors."""
        out = ZERO
        for coeff, factors in chain:
            if len(factors) != self.degree + 1:
                raise ValueError(
                    f"chain term has {len(factors)} factors, but {self.name} "
                    f"pairs with {self.degree + 1}")
            out = out + coeff * self(*factors)
        return out


#: A chain: list of (coefficient, tuple of elements).
Chain = List[Tuple[Scalar, Tuple[AlgebraElement, ...]]]


def boundary(f: Cochain) -> Cochain:
    """The twisted Hochschild coboundary of ``f``."""
    n = f.degree

    def bf(*args: AlgebraElement) -> Scalar:
        out = ZERO
        sign = 1
        for i in range(n + 1):
            inner = args[:i] + (args[i] * args[i + 1],) + args[i + 2:]
            term = f(*inner)
            out = (out + term) if sign > 0 else (out - term)
            sign = -sign
        wrap = f(theta_inv(args[n + 1]) * args[0], *args[1:n + 1])
        return (out + wrap) if sign > 0 else (out - wrap)

    return Cochain(n + 1, bf, f"b({f.name})")


# ---------------------------------------------------------------------------
# The six cup-product 3-cocycles.

def _kw(x: AlgebraElement, h: int) -> AlgebraElement:
    return act_k(x, h)


def _phi_123(a0, a1, a2, a3):
    return int_one(_kw(a0 * act_h(a1), -4)
                   * _kw(act_e(a2), -3)
                   * _kw(act_f(a3), -1))


def _phi_132(a0, a1, a2, a3):
    return -Scalar.q_pow(-2) * int_one(_kw(a0 * act_h(a1), -4)
                                       * _kw(act_f(a2), -3)
                                       * _kw(act_e(a3), -1))


def _phi_213(a0, a1, a2, a3):
    return -int_one(_kw(a0, -4) * _kw(act_e(a1), -3)
                    * _kw(act_h(a2), -2) * _kw(act_f(a3), -1))


def _phi_312(a0, a1, a2, a3):
    return Scalar.q_pow(-2) * int_one(_kw(a0, -4) * _kw(act_f(a1), -3)
                                      * _kw(act_h(a2), -2) * _kw(act_e(a3), -1))


def _phi_231(a0, a1, a2, a3):
    return int_one(_kw(a0, -4) * _kw(act_e(a1), -3)
                   * _kw(act_f(a2), -1) * act_h(a3))


def _phi_321(a0, a1, a2, a3):
    return -Scalar.q_pow(-2) * int_one(_kw(a0, -4) * _kw(act_f(a1), -3)
                                       * _kw(act_e(a2), -1) * act_h(a3))


PHI = Cochain(3, _phi_123, "phi")
PHI_132 = Cochain(3, _phi_132, "phi_132")
PHI_213 = Cochain(3, _phi_213, "phi_213")
PHI_312 = Cochain(3, _phi_312, "phi_312")
PHI_231 = Cochain(3, _phi_231, "phi_231")
PHI_321 = Cochain(3, _phi_321, "phi_321")

COCYCLES = {"phi": PHI, "phi_132": PHI_132, "phi_213": PHI_213,
            "phi_312": PHI_312, "phi_231": PHI_231, "phi_321": PHI_321}


# ---------------------------------------------------------------------------
# Transposition 2-cochains.

def _psi_132(a0, a1, a2):
    return int_one(_kw(a0, -4) * _kw(act_h(a1), -4)
                   * _kw(act_e(_kw(act_f(a2), 1)), -3))


def _psi_213(a0, a1, a2):
    return -int_one(_kw(a0, -4)
                    * _kw(act_h(_kw(act_e(a1), 1)), -4)
                    * _kw(act_f(a2), -1))


PSI_132 = Cochain(2, _psi_132, "psi_132")
PSI_213 = Cochain(2, _psi_213, "psi_213")


# ---------------------------------------------------------------------------
# The volume chain.

def _volume_chain() -> Chain:
    q = Scalar.q_pow(1)
    qi = Scalar.q_pow(-1)
    qq = Scalar.q_pow(2)
    terms = [
        (ONE, "dabc"), (-ONE, "dacb"), (q, "dcab"), (-qq, "dcba"),
        (qq, "dbca"), (-q, "dbac"),
        (ONE, "cbad"), (-ONE, "cbda"), (q, "cdba"), (-ONE, "cdab"),
        (ONE, "cadb"), (-qi, "cabd"),
        (qi - q, "cbcb"),
    ]
    out: Chain = []
    for coeff, word in terms:
        factors = tuple(normalize_word(ch) for ch in word)
        out.append((coeff, factors))
    return out


VOLUME_CHAIN: Chain = _volume_chain()
