"""
Exact supercharacter values in the q-th cyclotomic field.

Values live in Q(zeta) with zeta = exp(2 pi i / q), written in the basis
1, zeta, ..., zeta^{q-2}.  theta(x) = zeta^x is the fixed nontrivial
character of F_q^+.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from combinatorics import (
    ArcMultiset,
    FieldElement,
    NodeSet,
    PrimeModulus,
    enumerate_set_partitions,
    is_set_partition,
)
from errors import PreconditionError

logger = logging.getLogger(__name__)


class CyclotomicRational:
    """An element of Q(zeta_q) with exact rational coordinates."""

    __slots__ = ("q", "coeffs")

    def __init__(self, coeffs, q):
        q = PrimeModulus(q).q
        values = [Fraction(c) for c in coeffs]
        if len(values) > q:
            raise PreconditionError(f"too many coordinates for Q(zeta_{q})")
        values += [Fraction(0)] * (q - len(values))
        top = values[q - 1]
        # zeta^{q-1} = -(1 + zeta + ... + zeta^{q-2})
        self.q = q
        self.coeffs = tuple(v - top for v in values[: q - 1])

    @classmethod
    def rational(cls, value, q):
        return cls([value], q)

    @classmethod
    def zeta_power(cls, exponent, q):
        full = [0] * q
        full[exponent % q] = 1
        return cls(full, q)

    def _full(self):
        return list(self.coeffs) + [Fraction(0)]

    def _coerce(self, other):
        if isinstance(other, CyclotomicRational):
            if other.q != self.q:
                raise PreconditionError(f"cannot mix Q(zeta_{self.q}) and Q(zeta_{other.q})")
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicRational.rational(other, self.q)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CyclotomicRational([a + b for a, b in zip(self.coeffs, other.coeffs)], self.q)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicRational([-a for a in self.coeffs], self.q)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicRational([a * other for a in self.coeffs], self.q)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        q = self.q
        product = [Fraction(0)] * q
        for x, a in enumerate(self._full()):
            if a:
                for y, b in enumerate(other._full()):
                    if b:
                        product[(x + y) % q] += a * b
        return CyclotomicRational(product, q)

    __rmul__ = __mul__

    def galois(self, t):
        """The automorphism zeta -> zeta^t (t prime to q)."""
        if t % self.q == 0:
            raise PreconditionError("galois exponent must be prime to q")
        image = [Fraction(0)] * self.q
        for e, a in enumerate(self._full()):
            image[(e * t) % self.q] += a
        return CyclotomicRational(image, self.q)

    def conjugate(self):
        return self.galois(-1)

    def norm(self):
        """Product of all Galois conjugates, a rational number."""
        total = self
        for t in range(2, self.q):
            total = total * self.galois(t)
        return total.to_rational()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(zeta)")
            return CyclotomicRational([a / other for a in self.coeffs], self.q)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        cofactor = CyclotomicRational.rational(1, self.q)
        for t in range(2, self.q):
            cofactor = cofactor * other.galois(t)
        denominator = (other * cofactor).to_rational()
        if denominator == 0:
            raise ZeroDivisionError("division by zero in Q(zeta)")
        return (self * cofactor) / denominator

    def is_rational(self):
        return all(a == 0 for a in self.coeffs[1:])

    def to_rational(self):
        if not self.is_rational():
            raise PreconditionError(f"{self.to_text()} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def is_zero(self):
        return not any(self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def to_text(self):
        return "(" + ", ".join(str(a) for a in self.coeffs) + ")"

    def to_list(self):
        return [str(a) for a in self.coeffs]

    def __repr__(self):
        return f"CyclotomicRational{self.to_text()}_q{self.q}"


def theta(x, q=None):
    """zeta^x for x in F_q."""
    if isinstance(x, FieldElement):
        return CyclotomicRational.zeta_power(x.value, x.q)
    if q is None:
        raise PreconditionError("theta of a plain integer needs q")
    return CyclotomicRational.zeta_power(int(x), q)


def arc_value(arc, superclass, S):
    """chi^{i-a-l} on the superclass labeled by ``superclass`` inside U_S(q)."""
    S = NodeSet(S)
    q = superclass.q
    if arc.left not in S or arc.right not in S:
        raise PreconditionError(f"arc {arc.to_text()} has an endpoint outside S")
    if not superclass.nodes().issubset(S):
        raise PreconditionError("superclass label is not supported on S")

    nested = 0
    weight = 0
    for other in superclass.arcs:
        if other.left == arc.left and other.right < arc.right:
            return CyclotomicRational.rational(0, q)
        if other.left > arc.left and other.right == arc.right:
            return CyclotomicRational.rational(0, q)
        if arc.nests(other):
            nested += 1
        elif other.left == arc.left and other.right == arc.right:
            weight += other.label
    scale = Fraction(q ** S.count_between(arc.left, arc.right), q ** nested)
    return theta(FieldElement(arc.label * weight, q)) * scale


def char_value(character, superclass, S):
    """chi^lambda on a superclass; lambda may be any arc multiset (product of arc characters)."""
    if not is_set_partition(superclass):
        raise PreconditionError(f"superclass label {{{superclass.to_text()}}} is not a q-set partition")
    value = CyclotomicRational.rational(1, superclass.q)
    for arc in character.arcs:
        value = value * arc_value(arc, superclass, S)
        if value.is_zero():
            break
    return value


def superclass_values(character, S, guard=None):
    """Value of chi^lambda on every superclass of U_S(q), in canonical order."""
    S = NodeSet(S)
    return [(nu, char_value(character, nu, S)) for nu in enumerate_set_partitions(S, character.q, guard=guard)]


@dataclass(frozen=True)
class Restriction:
    """Res^{U_L}_{U_K} chi^lambda as the left-hand side of a check."""
    partition: ArcMultiset
    L: NodeSet

    def value(self, superclass, K):
        return char_value(self.partition, superclass, self.L)


@dataclass(frozen=True)
class TensorProduct:
    first: ArcMultiset
    second: ArcMultiset

    def value(self, superclass, K):
        return char_value(self.first, superclass, K) * char_value(self.second, superclass, K)


@dataclass(frozen=True)
class MultisetCharacter:
    multiset: ArcMultiset

    def value(self, superclass, K):
        return char_value(self.multiset, superclass, K)


def verify_pointwise(lhs, comb, guard=None):
    """Compare both sides on every superclass of U_K(q), K = comb.ambient."""
    K = comb.ambient
    terms = list(comb.items())
    for nu in enumerate_set_partitions(K, comb.q, guard=guard):
        expected = lhs.value(nu, K)
        found = CyclotomicRational.rational(0, comb.q)
        for sigma, coeff in terms:
            found = found + char_value(sigma, nu, K) * coeff
        if expected != found:
            logger.info("pointwise mismatch on superclass {%s}: %s != %s",
                        nu.to_text(), expected.to_text(), found.to_text())
            return False
    return True
