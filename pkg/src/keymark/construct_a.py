"""Direct construction of the per-message joint tables on the reduced key set.

Three additive parts mirror the split of px:

  part 1 spreads each T-hot term's weight uniformly over the keys whose
         support equals the term's support (weight / (T-1)! per cell);
  part 2 layers the step increments of px2 over the anchored keys (last K
         coordinates nonzero), leaving a known row-sum imbalance;
  part 3 spends px3 to cancel that imbalance layer by layer and parks the
         remainder on the all-zero key.

The combined tables have column sums equal to px, identical row sums across
messages, and decode-to-m column sums exactly min(alpha/T, px(x)).
All arithmetic is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    JointTable,
    KeySet,
    KeyVector,
    ReducedKeySet,
    TokenDistribution,
    WatermarkScheme,
    add_mass,
    merge_tables,
)
from .errors import InvariantError, ParameterError
from .split import PxSplit, split_px
from .thot import THotDecomposition, decompose_t_hot

__all__ = [
    "StepDecomposition",
    "ImbalanceLedger",
    "structural_keys",
    "anchored_keys",
    "step_decomposition",
    "build_pm1",
    "build_pm2",
    "build_pm3",
    "construct_a",
    "restore_token_order",
]


@dataclass(frozen=True)
class StepDecomposition:
    """px2 as a sum of suffix indicators: increments[(j, delta)] means
    delta * (0,...,0, 1_j).  j runs 1..K; deltas may be zero."""

    increments: tuple[tuple[int, Fraction], ...]

    @property
    def k(self) -> int:
        return len(self.increments)

    def reconstruct(self, length: int) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * length
        for j, delta in self.increments:
            for pos in range(length - j, length):
                out[pos] += delta
        return tuple(out)


@dataclass(frozen=True)
class ImbalanceLedger:
    """Row-sum imbalance of the part-2 tables.

    per_key[key_index][m-1] is the gap between that key's largest row sum
    over messages and its row sum under m.  The total gap is the same for
    every message; total stores that common value.
    """

    per_key: dict[int, tuple[Fraction, ...]]
    total: Fraction


def structural_keys(keyset: KeySet, omega: Sequence[int]) -> set[int]:
    """Indices of keys whose nonzero positions equal the support of omega."""
    return {idx for idx, _ in _structural_pairs(keyset, omega)}


def _structural_pairs(keyset: KeySet, omega: Sequence[int]) -> list[tuple[int, KeyVector]]:
    if len(omega) != keyset.length:
        raise ParameterError(f"omega length {len(omega)} != key length {keyset.length}")
    support = [i for i, bit in enumerate(omega) if bit]
    if len(support) != keyset.t:
        raise ParameterError(f"omega must have exactly {keyset.t} ones")
    pairs: list[tuple[int, KeyVector]] = []
    for values in itertools.permutations(range(1, keyset.t + 1)):
        entries = [0] * keyset.length
        for pos, value in zip(support, values):
            entries[pos] = value
        key = tuple(entries)
        try:
            pairs.append((keyset.index(key), key))
        except KeyError:
            continue
    return pairs


def anchored_keys(keyset: KeySet, k: int) -> set[int]:
    """Indices of keys whose last k coordinates are all nonzero."""
    return {idx for idx, _ in _anchored_pairs(keyset, k)}


def _anchored_pairs(keyset: KeySet, k: int) -> list[tuple[int, KeyVector]]:
    t, length = keyset.t, keyset.length
    if not 1 <= k <= t - 1:
        raise ParameterError(f"anchor width {k} outside [1:{t - 1}]")
    if not isinstance(keyset, ReducedKeySet):
        return [
            (i, keyset.key(i))
            for i in range(len(keyset))
            if all(keyset.key(i)[p] != 0 for p in range(length - k, length))
        ]
    pairs: list[tuple[int, KeyVector]] = []
    head = length - k
    for tail_values in itertools.permutations(range(1, t + 1), k):
        rest = [v for v in range(1, t + 1) if v not in tail_values]
        for head_positions in itertools.permutations(range(head), len(rest)):
            entries = [0] * length
            for pos, value in zip(head_positions, rest):
                entries[pos] = value
            entries[head:] = tail_values
            key = tuple(entries)
            pairs.append((keyset.index(key), key))
    return pairs


def anchored_cell_count(n: int, t: int, k: int) -> int:
    """Anchored keys hitting a fixed (token, message) pair in the last k slots.

    Fixing one tail coordinate to a given message leaves k-1 tail slots for
    the remaining values and t-k values for the head, so the count is
    perm(t-1, k-1) * perm(n-k, t-k), independent of which pair was fixed.
    """
    return math.perm(t - 1, k - 1) * math.perm(n - k, t - k)


def step_decomposition(px2: Sequence[Fraction], t: int) -> StepDecomposition:
    """Decompose a non-decreasing tail vector into suffix-indicator steps."""
    length = len(px2)
    positive = [i for i, v in enumerate(px2) if v > 0]
    if any(v < 0 for v in px2):
        raise ParameterError("px2 has a negative entry")
    k = len(positive)
    if k == 0:
        return StepDecomposition(())
    if k > t - 1:
        raise ParameterError(f"px2 has {k} positive entries, more than t-1={t - 1}")
    if positive != list(range(length - k, length)):
        raise ParameterError("px2's positive entries must sit at the tail")
    if any(px2[i] > px2[i + 1] for i in range(length - k, length - 1)):
        raise ParameterError("px2 must be non-decreasing on its tail")
    increments = []
    for j in range(1, k + 1):
        below = px2[length - j - 1] if j < k else Fraction(0)
        increments.append((j, px2[length - j] - below))
    decomposition = StepDecomposition(tuple(increments))
    if decomposition.reconstruct(length) != tuple(px2):
        raise InvariantError("step decomposition failed to reconstruct px2")
    return decomposition


def build_pm1(decomp: THotDecomposition, keyset: KeySet) -> list[JointTable]:
    """Spread each term's weight over its structural keys, weight/(T-1)! per cell.

    Every key with the term's support assigns each message to exactly one
    token, so each key contributes one cell per message and column sums
    reconstruct the decomposed vector.
    """
    if not isinstance(keyset, ReducedKeySet):
        raise ParameterError("part-1 allocation requires the reduced key set")
    t = keyset.t
    share_denominator = math.factorial(t - 1)
    rows_per_m: list[dict[int, dict[int, Fraction]]] = [{} for _ in range(t)]
    for term in decomp.terms:
        share = Fraction(term.weight, share_denominator)
        for idx, key in _structural_pairs(keyset, term.omega):
            for m in range(1, t + 1):
                token = key.index(m) + 1
                add_mass(rows_per_m[m - 1], idx, token, share)
    return [JointTable(m, rows) for m, rows in enumerate(rows_per_m, start=1)]


def build_pm2(
    px2: Sequence[Fraction], keyset: KeySet
) -> tuple[list[JointTable], ImbalanceLedger]:
    """Layer the step increments of px2 over the anchored keys.

    Layer j covers the last j tokens; each covered (token, message) pair
    receives delta_j / anchored_cell_count at every anchored key decoding it.
    Row sums now differ across messages; the returned ledger records the
    per-key gaps and their total (equal for every message).
    """
    t, length = keyset.t, keyset.length
    steps = step_decomposition(px2, t)
    empty_ledger = ImbalanceLedger({}, Fraction(0))
    if steps.k == 0:
        return [JointTable(m, {}) for m in range(1, t + 1)], empty_ledger
    k = steps.k
    anchored = _anchored_pairs(keyset, k)
    cell_count = anchored_cell_count(length, t, k)
    rows_per_m: list[dict[int, dict[int, Fraction]]] = [{} for _ in range(t)]
    for j, delta in steps.increments:
        if delta == 0:
            continue
        share = Fraction(delta, cell_count)
        for token in range(length - j + 1, length + 1):
            for m in range(1, t + 1):
                hits = 0
                for idx, key in anchored:
                    if key[token - 1] == m:
                        add_mass(rows_per_m[m - 1], idx, token, share)
                        hits += 1
                if hits != cell_count:
                    raise InvariantError(
                        f"anchored slice size {hits} != expected {cell_count}"
                    )
    tables = [JointTable(m, rows) for m, rows in enumerate(rows_per_m, start=1)]

    per_key: dict[int, tuple[Fraction, ...]] = {}
    totals = [Fraction(0)] * t
    for idx, _ in anchored:
        sums = [tables[m - 1].row_sum(idx) for m in range(1, t + 1)]
        peak = max(sums)
        gaps = tuple(peak - s for s in sums)
        if any(gaps):
            per_key[idx] = gaps
        for m_i, gap in enumerate(gaps):
            totals[m_i] += gap
    if len(set(totals)) != 1:
        raise InvariantError(f"imbalance totals differ across messages: {totals}")
    expected_total = sum(
        (delta * (t - j) for j, delta in steps.increments), Fraction(0)
    )
    if totals[0] != expected_total:
        raise InvariantError(
            f"measured imbalance {totals[0]} != closed form {expected_total}"
        )
    return tables, ImbalanceLedger(per_key, totals[0])


def build_pm3(
    px3: Sequence[Fraction],
    steps: StepDecomposition,
    ledger: ImbalanceLedger,
    keyset: KeySet,
) -> list[JointTable]:
    """Cancel the part-2 imbalance with px3 mass and park the rest on key 0.

    For layer j, the eligible keys are the anchored keys whose last j
    coordinates all avoid the message; they receive px3(x)/R shares of
    delta_j*(T-j).  Every token with leftover cap then puts
    px3(x)*(1 - U/R) on the all-zero key.
    """
    t, length = keyset.t, keyset.length
    total_overshoot = sum(px3, Fraction(0))
    tables: list[dict[int, dict[int, Fraction]]] = [{} for _ in range(t)]
    support = [x for x in range(1, length + 1) if x <= len(px3) and px3[x - 1] > 0]
    if total_overshoot == 0:
        if ledger.total != 0:
            raise InvariantError("imbalance positive but no mass left to cancel it")
        return [JointTable(m, rows) for m, rows in enumerate(tables, start=1)]
    if ledger.total > total_overshoot:
        raise InvariantError(
            f"imbalance {ledger.total} exceeds remaining mass {total_overshoot}"
        )
    zero_index = keyset.zero_index
    if steps.k > 0:
        anchored = _anchored_pairs(keyset, steps.k)
        cell_count = anchored_cell_count(length, t, steps.k)
        for j, delta in steps.increments:
            if delta == 0:
                continue
            for m in range(1, t + 1):
                eligible = [
                    idx
                    for idx, key in anchored
                    if all(key[pos] != m for pos in range(length - j, length))
                ]
                if len(eligible) != cell_count * (t - j):
                    raise InvariantError(
                        f"eligible key count {len(eligible)} != "
                        f"{cell_count} * (t - {j})"
                    )
                layer_mass = delta * (t - j)
                for x in support:
                    share = px3[x - 1] / total_overshoot * layer_mass / len(eligible)
                    for idx in eligible:
                        add_mass(tables[m - 1], idx, x, share)
    leftover = 1 - Fraction(ledger.total, total_overshoot)
    for m in range(1, t + 1):
        for x in support:
            add_mass(tables[m - 1], zero_index, x, px3[x - 1] * leftover)
    return [JointTable(m, rows) for m, rows in enumerate(tables, start=1)]


def restore_token_order(
    px: TokenDistribution, keyset: ReducedKeySet, tables: Sequence[JointTable]
) -> list[JointTable]:
    """Map tables built on the sorted token view back to px's own order.

    Sorted token i corresponds to original token sort_perm[i-1]+1, and key
    coordinate i-1 moves to coordinate sort_perm[i-1]; coordinates beyond the
    token count (extension slots) stay in place.  The reduced key set is
    closed under coordinate permutation, so only indices change.
    """
    if px.is_sorted:
        return list(tables)
    if not isinstance(keyset, ReducedKeySet):
        raise ParameterError("token reordering requires the reduced key set")
    n = px.n
    perm = px.sort_perm
    index_map: dict[int, int] = {}

    def remap(idx: int) -> int:
        cached = index_map.get(idx)
        if cached is None:
            key = keyset.key(idx)
            entries = list(key)
            for i in range(n):
                entries[perm[i]] = key[i]
            cached = index_map[idx] = keyset.index(tuple(entries))
        return cached

    out: list[JointTable] = []
    for table in tables:
        rows: dict[int, dict[int, Fraction]] = {}
        for idx, token, mass in table.cells():
            add_mass(rows, remap(idx), perm[token - 1] + 1, mass)
        out.append(JointTable(table.m, rows))
    return out


def _sorted_view(px: TokenDistribution) -> TokenDistribution:
    return TokenDistribution(px.sorted_probs, tuple(range(px.n)))


def construct_a(
    px: TokenDistribution, alpha: Fraction, t: int, cap: int | None = None
) -> WatermarkScheme:
    """Full scheme on the reduced key set over the real tokens only."""
    alpha = Fraction(alpha)
    view = _sorted_view(px)
    split = split_px(view, alpha, t)
    keyset = ReducedKeySet(px.n, t, cap=cap)
    decomp = decompose_t_hot(split.px1, t)
    steps = step_decomposition(split.px2, t)
    pm1 = build_pm1(decomp, keyset)
    pm2, ledger = build_pm2(split.px2, keyset)
    pm3 = build_pm3(split.px3, steps, ledger, keyset)
    tables = [
        merge_tables(m, pm1[m - 1], pm2[m - 1], pm3[m - 1]) for m in range(1, t + 1)
    ]
    for table in tables:
        if table.total_mass() != 1:
            raise InvariantError(f"table m={table.m} has mass {table.total_mass()}")
    tables = restore_token_order(px, keyset, tables)
    provenance = _split_provenance("direct", split, ledger)
    return WatermarkScheme.assemble(alpha, px, keyset, tables, provenance=provenance)


def _split_provenance(method: str, split: PxSplit, ledger: ImbalanceLedger) -> dict:
    from .rationals import mass_to_string

    return {
        "method": method,
        "K": split.K,
        "K_tilde": split.K_tilde,
        "y": None if split.y is None else mass_to_string(split.y),
        "imbalance": mass_to_string(ledger.total),
        "overshoot": mass_to_string(sum(split.px3, Fraction(0))),
    }
