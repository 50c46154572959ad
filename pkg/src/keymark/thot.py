"""Decomposition of non-negative vectors into weighted T-hot indicator vectors.

A vector is T-hot representable exactly when T times its largest entry is at
most its total (boundary equality included).  The greedy decomposition picks
the T largest residual entries each round and removes the largest weight that
keeps the residual non-negative and representable; each round zeroes an entry
or drives another to the boundary, so at most L rounds run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvariantError, ParameterError

__all__ = ["THotTerm", "THotDecomposition", "is_t_hot_representable", "decompose_t_hot"]


@dataclass(frozen=True)
class THotTerm:
    omega: tuple[int, ...]
    weight: Fraction


@dataclass(frozen=True)
class THotDecomposition:
    terms: tuple[THotTerm, ...]

    def reconstruct(self, length: int) -> tuple[Fraction, ...]:
        total = [Fraction(0)] * length
        for term in self.terms:
            for i, bit in enumerate(term.omega):
                if bit:
                    total[i] += term.weight
        return tuple(total)


def _check_inputs(a: Sequence[Fraction], t: int) -> None:
    if not a:
        raise ParameterError("empty vector")
    if not 1 <= t <= len(a):
        raise ParameterError(f"t={t} outside [1:{len(a)}]")
    if any(v < 0 for v in a):
        raise ParameterError("negative entry in vector")


def is_t_hot_representable(a: Sequence[Fraction], t: int) -> bool:
    """True iff t * max(a) <= sum(a)."""
    _check_inputs(a, t)
    return t * max(a) <= sum(a)


def decompose_t_hot(a: Sequence[Fraction], t: int) -> THotDecomposition:
    """Greedy decomposition of a representable vector into T-hot terms.

    Each round targets the T largest residual entries (ties to the lowest
    index) and uses the largest weight under which the residual stays
    non-negative and representable:

        weight = (1/T) * min( min_{j in supp} T*v(j),
                              min_{j not in supp} (sum(v) - T*v(j)) )

    For a representable nonzero residual the weight is provably positive, and
    the set {i : v(i)=0 or T*v(i)=sum(v)} gains a member every round, so the
    loop runs at most L times.
    """
    _check_inputs(a, t)
    residual = [Fraction(v) for v in a]
    length = len(residual)
    if t * max(residual) > sum(residual):
        raise ParameterError(f"vector is not {t}-hot representable")

    def saturated(v: list[Fraction]) -> frozenset[int]:
        s = sum(v)
        return frozenset(i for i in range(length) if v[i] == 0 or t * v[i] == s)

    terms: list[THotTerm] = []
    frozen = saturated(residual)
    for _ in range(length + 1):
        total = sum(residual)
        if total == 0:
            break
        support = sorted(range(length), key=lambda i: (-residual[i], i))[:t]
        in_support = set(support)
        inner = min(t * residual[j] for j in support)
        outer = min(
            (total - t * residual[j] for j in range(length) if j not in in_support),
            default=inner,
        )
        weight = Fraction(min(inner, outer), t)
        if weight <= 0:
            raise InvariantError("greedy step produced a non-positive weight")
        omega = tuple(1 if i in in_support else 0 for i in range(length))
        terms.append(THotTerm(omega, weight))
        for j in support:
            residual[j] -= weight
        if any(v < 0 for v in residual):
            raise InvariantError("residual went negative")
        if t * max(residual) > sum(residual):
            raise InvariantError("residual lost representability")
        grown = saturated(residual)
        if sum(residual) != 0 and not (frozen < grown):
            raise InvariantError("saturated index set failed to grow")
        frozen = grown
    else:
        raise InvariantError(f"decomposition did not terminate in {length} rounds")
    return THotDecomposition(tuple(terms))
