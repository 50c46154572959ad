"""Domain types and the key-pattern decoder.

A key is a length-L vector over [0:T].  The decoder reads the entry at the
drawn token's position: decode(x, zeta) = zeta[x-1].  The reduced key set
holds every placement of the values 1..T into L positions plus the all-zero
key, so its size is L!/(L-T)! + 1.  Key sets are never materialized; they are
index<->key bijections in lexicographic order on the entry tuples, which puts
the all-zero key at index 0.

>>> ks = enumerate_reduced_keyset(3, 2)
>>> len(ks)
7
>>> ks.key(0)
(0, 0, 0)
>>> ks.index((0, 1, 2))
1
>>> decode(2, (0, 1, 2))
1
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapacityError, ParameterError, ValidationError

__all__ = [
    "KeyVector",
    "TokenDistribution",
    "KeySet",
    "ReducedKeySet",
    "ExplicitKeySet",
    "JointTable",
    "WatermarkScheme",
    "ErrorReport",
    "decode",
    "enumerate_reduced_keyset",
    "preimage_slice",
    "is_reduced_member",
    "DEFAULT_ENUMERATION_CAP",
    "ENUMERATION_CAP_ENV",
]

KeyVector = tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 10**6
ENUMERATION_CAP_ENV = "KEYMARK_KEYSET_CAP"


def resolve_enumeration_cap(cap: int | None) -> int:
    """Explicit argument wins, then the environment override, then the default."""
    if cap is not None:
        return cap
    env = os.environ.get(ENUMERATION_CAP_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ParameterError(f"{ENUMERATION_CAP_ENV}={env!r} is not an integer") from exc
    return DEFAULT_ENUMERATION_CAP


def decode(x: int, zeta: Sequence[int]) -> int:
    """Decoded message for token x under key zeta: the x-th entry (1-based x)."""
    if not 1 <= x <= len(zeta):
        raise IndexError(f"token index {x} outside [1:{len(zeta)}]")
    return zeta[x - 1]


def is_reduced_member(entries: Sequence[int], t: int) -> bool:
    """All-zero, or the nonzero entries are exactly {1, ..., t} each once."""
    nonzero = [v for v in entries if v != 0]
    if not nonzero:
        return all(v == 0 for v in entries)
    return len(nonzero) == t and sorted(nonzero) == list(range(1, t + 1))


@dataclass(frozen=True)
class TokenDistribution:
    """Exact probability vector over tokens, with its sorting permutation.

    probs is in the caller's original token order.  sort_perm[i] is the
    0-based original index of the i-th smallest probability (stable, so ties
    keep their original relative order); probs[sort_perm[i]] is non-decreasing
    in i.
    """

    probs: tuple[Fraction, ...]
    sort_perm: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValidationError("empty distribution")
        if any(p < 0 for p in self.probs):
            raise ValidationError("negative probability entry")
        if sum(self.probs) != 1:
            raise ValidationError(f"probabilities sum to {sum(self.probs)}, not 1")
        n = len(self.probs)
        if sorted(self.sort_perm) != list(range(n)):
            raise ValidationError("sort_perm is not a permutation of the token indices")
        view = [self.probs[i] for i in self.sort_perm]
        if any(view[i] > view[i + 1] for i in range(n - 1)):
            raise ValidationError("sort_perm does not sort the probabilities")

    @classmethod
    def from_fractions(cls, probs: Iterable[Fraction]) -> "TokenDistribution":
        values = tuple(Fraction(p) for p in probs)
        perm = tuple(sorted(range(len(values)), key=lambda i: values[i]))
        return cls(values, perm)

    @classmethod
    def from_strings(cls, texts: Iterable[str]) -> "TokenDistribution":
        from .rationals import parse_mass

        return cls.from_fractions(parse_mass(t) for t in texts)

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def sorted_probs(self) -> tuple[Fraction, ...]:
        return tuple(self.probs[i] for i in self.sort_perm)

    @property
    def is_sorted(self) -> bool:
        return self.sort_perm == tuple(range(self.n))


def _placements(slots: int, values: int) -> int:
    """Ways to place `values` distinct labels into `slots` ordered positions."""
    if values < 0 or values > slots:
        return 0
    return math.perm(slots, values)


class KeySet:
    """Common interface: an ordered, indexable family of key vectors."""

    kind: str
    length: int
    t: int

    def __len__(self) -> int:
        raise NotImplementedError

    def key(self, index: int) -> KeyVector:
        raise NotImplementedError

    def index(self, key: Sequence[int]) -> int:
        raise NotImplementedError

    def __iter__(self) -> Iterator[KeyVector]:
        return (self.key(i) for i in range(len(self)))

    def __contains__(self, key: Sequence[int]) -> bool:
        try:
            self.index(key)
        except (KeyError, ParameterError):
            return False
        return True

    @property
    def zero_index(self) -> int:
        """Index of the all-zero key."""
        return self.index((0,) * self.length)


class ReducedKeySet(KeySet):
    """Lazy bijection onto all placements of 1..T plus the all-zero key.

    Order is lexicographic on entry tuples.  The all-zero key is index 0; a
    placement key's index is 1 plus its lexicographic rank among placements.
    rank and unrank walk the positions left to right, counting completions of
    each candidate prefix, so no key ever needs to be materialized.
    """

    kind = "reduced"

    def __init__(self, length: int, t: int, cap: int | None = None) -> None:
        if t < 1:
            raise ParameterError(f"t must be at least 1, got {t}")
        if t > length:
            raise ParameterError(f"t={t} exceeds key length {length}")
        placements = _placements(length, t)
        limit = resolve_enumeration_cap(cap)
        if placements > limit:
            raise CapacityError(
                f"reduced key set for length={length}, t={t} has {placements} "
                f"placement keys, above the enumeration cap {limit}"
            )
        self.length = length
        self.t = t
        self._size = placements + 1

    def __len__(self) -> int:
        return self._size

    def __repr__(self) -> str:
        return f"ReducedKeySet(length={self.length}, t={self.t})"

    @property
    def zero_index(self) -> int:
        return 0

    def key(self, index: int) -> KeyVector:
        if not 0 <= index < self._size:
            raise ParameterError(f"key index {index} outside [0:{self._size - 1}]")
        if index == 0:
            return (0,) * self.length
        rank = index - 1
        entries: list[int] = []
        unused = list(range(1, self.t + 1))
        for pos in range(self.length):
            remaining = self.length - pos - 1
            block = _placements(remaining, len(unused))
            if rank < block:
                entries.append(0)
                continue
            rank -= block
            block = _placements(remaining, len(unused) - 1)
            chosen = rank // block
            rank -= chosen * block
            entries.append(unused.pop(chosen))
        return tuple(entries)

    def index(self, key: Sequence[int]) -> int:
        key = tuple(key)
        if len(key) != self.length:
            raise ParameterError(f"key length {len(key)} != {self.length}")
        if all(v == 0 for v in key):
            return 0
        if not is_reduced_member(key, self.t):
            raise KeyError(f"{key} is not a member of {self!r}")
        rank = 0
        unused = list(range(1, self.t + 1))
        for pos, value in enumerate(key):
            remaining = self.length - pos - 1
            if value == 0:
                continue
            rank += _placements(remaining, len(unused))
            per_value = _placements(remaining, len(unused) - 1)
            spot = unused.index(value)
            rank += spot * per_value
            unused.pop(spot)
        return rank + 1


class ExplicitKeySet(KeySet):
    """A stored list of key vectors in a fixed order."""

    def __init__(self, keys: Iterable[Sequence[int]], t: int, kind: str = "explicit-list") -> None:
        stored = [tuple(int(v) for v in k) for k in keys]
        if not stored:
            raise ParameterError("explicit key set must contain at least one key")
        length = len(stored[0])
        if t < 1 or t > length:
            raise ParameterError(f"t={t} invalid for key length {length}")
        for k in stored:
            if len(k) != length:
                raise ValidationError("keys of differing lengths in explicit key set")
            if any(not 0 <= v <= t for v in k):
                raise ValidationError(f"key {k} has entries outside [0:{t}]")
        if len(set(stored)) != len(stored):
            raise ValidationError("duplicate keys in explicit key set")
        self.kind = kind
        self.length = length
        self.t = t
        self._keys = stored
        self._index = {k: i for i, k in enumerate(stored)}

    def __len__(self) -> int:
        return len(self._keys)

    def __repr__(self) -> str:
        return f"ExplicitKeySet({len(self._keys)} keys, length={self.length}, t={self.t})"

    def key(self, index: int) -> KeyVector:
        if not 0 <= index < len(self._keys):
            raise ParameterError(f"key index {index} outside [0:{len(self._keys) - 1}]")
        return self._keys[index]

    def index(self, key: Sequence[int]) -> int:
        return self._index[tuple(key)]


def enumerate_reduced_keyset(length: int, t: int, cap: int | None = None) -> ReducedKeySet:
    """The reduced key set over `length` positions: placements of 1..t plus 0."""
    return ReducedKeySet(length, t, cap=cap)


def _placement_keys_with(length: int, t: int, fixed: dict[int, int]) -> Iterator[KeyVector]:
    """All placement keys agreeing with `fixed` (0-based position -> value)."""
    import itertools

    free_positions = [p for p in range(length) if p not in fixed]
    free_values = [v for v in range(1, t + 1) if v not in fixed.values()]
    for positions in itertools.permutations(free_positions, len(free_values)):
        entries = [0] * length
        for p, v in fixed.items():
            entries[p] = v
        for p, v in zip(positions, free_values):
            entries[p] = v
        yield tuple(entries)


def _placement_keys_avoiding(length: int, t: int, skip: int) -> Iterator[KeyVector]:
    """All placement keys whose entry at 0-based position `skip` is zero."""
    import itertools

    positions = [p for p in range(length) if p != skip]
    for chosen in itertools.permutations(positions, t):
        entries = [0] * length
        for v, p in enumerate(chosen, start=1):
            entries[p] = v
        yield tuple(entries)


def preimage_slice(keyset: KeySet, x: int, m: int) -> set[int]:
    """Indices of keys decoding token x to message m: { zeta : zeta[x-1] = m }."""
    if not 1 <= x <= keyset.length:
        raise ParameterError(f"token index {x} outside [1:{keyset.length}]")
    if not 0 <= m <= keyset.t:
        raise ParameterError(f"message {m} outside [0:{keyset.t}]")
    if isinstance(keyset, ReducedKeySet):
        # Generate matching keys directly instead of filtering the whole set.
        if m == 0:
            found = {0}
            if keyset.t <= keyset.length - 1:
                for key in _placement_keys_avoiding(keyset.length, keyset.t, x - 1):
                    found.add(keyset.index(key))
            return found
        return {
            keyset.index(key)
            for key in _placement_keys_with(keyset.length, keyset.t, {x - 1: m})
        }
    return {i for i in range(len(keyset)) if keyset.key(i)[x - 1] == m}


@dataclass(frozen=True)
class JointTable:
    """Sparse joint distribution over (token, key) pairs for one message.

    rows maps key index -> {token (1-based) -> mass}.  Zero masses are never
    stored; builders drop cells that cancel to zero.
    """

    m: int
    rows: Mapping[int, Mapping[int, Fraction]]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValidationError(f"message index {self.m} must be >= 1")
        for key_index, row in self.rows.items():
            for token, mass in row.items():
                if mass == 0:
                    raise ValidationError(
                        f"explicit zero mass at key {key_index}, token {token}"
                    )

    def cell(self, key_index: int, token: int) -> Fraction:
        return self.rows.get(key_index, {}).get(token, Fraction(0))

    def cells(self) -> Iterator[tuple[int, int, Fraction]]:
        """(key_index, token, mass) triples in deterministic order."""
        for key_index in sorted(self.rows):
            row = self.rows[key_index]
            for token in sorted(row):
                yield key_index, token, row[token]

    def row_sum(self, key_index: int) -> Fraction:
        return sum(self.rows.get(key_index, {}).values(), Fraction(0))

    def column_sum(self, token: int) -> Fraction:
        return sum(
            (row[token] for row in self.rows.values() if token in row), Fraction(0)
        )

    def total_mass(self) -> Fraction:
        return sum((m for _, _, m in self.cells()), Fraction(0))

    def key_support(self) -> set[int]:
        return set(self.rows)


def add_mass(rows: dict[int, dict[int, Fraction]], key_index: int, token: int, mass: Fraction) -> None:
    """Accumulate into a mutable row map, dropping cells that cancel to zero."""
    if mass == 0:
        return
    row = rows.setdefault(key_index, {})
    updated = row.get(token, Fraction(0)) + mass
    if updated == 0:
        del row[token]
        if not row:
            del rows[key_index]
    else:
        row[token] = updated


def merge_tables(m: int, *parts: JointTable) -> JointTable:
    """Cellwise sum of partial tables for the same message."""
    rows: dict[int, dict[int, Fraction]] = {}
    for part in parts:
        if part.m != m:
            raise ParameterError(f"cannot merge table for m={part.m} into m={m}")
        for key_index, token, mass in part.cells():
            add_mass(rows, key_index, token, mass)
    return JointTable(m, rows)


@dataclass(frozen=True)
class WatermarkScheme:
    """A complete scheme: key set, one joint table per message, key marginal.

    Keys may be longer than the token count (pseudo-token constructions use
    length n + extension), but table cells only ever reference real tokens
    1..n.  pz is defined as the row sums of the m=1 table.
    """

    n: int
    t: int
    alpha: Fraction
    px: TokenDistribution
    keyset: KeySet
    tables: tuple[JointTable, ...]
    pz: Mapping[int, Fraction]
    provenance: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n != self.px.n:
            raise ValidationError(f"n={self.n} but px has {self.px.n} entries")
        if not 0 <= self.alpha < 1:
            raise ValidationError(f"alpha={self.alpha} outside [0,1)")
        if len(self.tables) != self.t:
            raise ValidationError(f"expected {self.t} tables, got {len(self.tables)}")
        for m, table in enumerate(self.tables, start=1):
            if table.m != m:
                raise ValidationError(f"table at slot {m} is labeled m={table.m}")
        if sum(self.pz.values(), Fraction(0)) != 1:
            raise ValidationError("key marginal does not sum to 1")

    @classmethod
    def assemble(
        cls,
        alpha: Fraction,
        px: TokenDistribution,
        keyset: KeySet,
        tables: Sequence[JointTable],
        provenance: Mapping[str, object] | None = None,
    ) -> "WatermarkScheme":
        """Build a scheme, deriving pz from the m=1 table's row sums."""
        tables = tuple(tables)
        if not tables:
            raise ParameterError("at least one message table required")
        pz = {k: tables[0].row_sum(k) for k in tables[0].key_support()}
        return cls(
            n=px.n,
            t=len(tables),
            alpha=Fraction(alpha),
            px=px,
            keyset=keyset,
            tables=tables,
            pz=pz,
            provenance=dict(provenance or {}),
        )

    def table(self, m: int) -> JointTable:
        if not 1 <= m <= self.t:
            raise ParameterError(f"message {m} outside [1:{self.t}]")
        return self.tables[m - 1]

    def key_support(self) -> set[int]:
        support: set[int] = set()
        for table in self.tables:
            support |= table.key_support()
        return support


@dataclass(frozen=True)
class ErrorReport:
    """Exact detection-error summary for one scheme."""

    beta: tuple[Fraction, ...]
    worst_false_alarm: Fraction
    optimal_value: Fraction
    gap: Fraction

    def __post_init__(self) -> None:
        for value in (*self.beta, self.worst_false_alarm, self.optimal_value):
            if not 0 <= value <= 1:
                raise ValidationError(f"error quantity {value} outside [0,1]")
