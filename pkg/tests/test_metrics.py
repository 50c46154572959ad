import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keymark.construct_a import construct_a
from keymark.construct_b import construct_b
from keymark.core import TokenDistribution, WatermarkScheme
from keymark.errors import ParameterError
from keymark.metrics import (
    PROPERTY_NAMES,
    check_scheme,
    error_report,
    miss_detection,
    optimal_value,
    worst_false_alarm,
)

PX_A = TokenDistribution.from_strings(["0.05", "0.1", "0.25", "0.6"])
ALPHA_A = F(9, 10)


def golden_scheme() -> WatermarkScheme:
    return construct_a(PX_A, ALPHA_A, 3)


def mutate(scheme: WatermarkScheme, changes: dict[int, list[tuple[tuple[int, ...], int, F]]]) -> WatermarkScheme:
    """Apply per-message (key vector, token, delta) adjustments and reassemble."""
    from keymark.core import JointTable, add_mass

    tables = []
    for table in scheme.tables:
        rows: dict[int, dict[int, F]] = {}
        for idx, token, mass in table.cells():
            add_mass(rows, idx, token, mass)
        for key, token, delta in changes.get(table.m, []):
            add_mass(rows, scheme.keyset.index(key), token, delta)
        tables.append(JointTable(table.m, rows))
    return WatermarkScheme.assemble(
        scheme.alpha, scheme.px, scheme.keyset, tables, provenance=scheme.provenance
    )


def failed_names(report) -> set[str]:
    return {c.name for c in report.failures()}


def test_property_names_order() -> None:
    report = check_scheme(golden_scheme())
    assert tuple(c.name for c in report.checks) == PROPERTY_NAMES


def test_golden_scheme_passes_all_checks() -> None:
    report = check_scheme(golden_scheme())
    assert report.ok
    assert report.failures() == []
    assert "ok" in report.describe()


def test_constructed_schemes_pass_checks() -> None:
    px = TokenDistribution.from_strings(["0.1", "0.3", "0.6"])
    assert check_scheme(construct_b(px, F(4, 5), 2, force_pseudo=True)).ok
    assert check_scheme(construct_b(px, F(4, 5), 2)).ok


def test_column_sum_violation_detected() -> None:
    zero = (0, 0, 0, 0)
    bad = mutate(
        golden_scheme(),
        {1: [(zero, 4, F(-1, 10)), (zero, 3, F(1, 10))]},
    )
    report = check_scheme(bad)
    names = failed_names(report)
    assert "column-sum" in names
    assert "row-sum" not in names
    assert "alpha-bounded-total" not in names
    assert "mass" not in names
    failure = next(c for c in report.failures() if c.name == "column-sum")
    assert failure.location == "m=1, x=3"
    assert failure.expected == F(1, 4)
    assert failure.actual == F(1, 4) + F(1, 10)


def test_row_sum_violation_detected() -> None:
    # Shift mass between keys inside one column of the m=2 table only.
    bad = mutate(
        golden_scheme(),
        {2: [((0, 1, 2, 3), 4, F(-1, 80)), ((0, 0, 0, 0), 4, F(1, 80))]},
    )
    report = check_scheme(bad)
    names = failed_names(report)
    assert "row-sum" in names
    assert "column-sum" not in names
    assert "capped-column-sum" not in names
    assert "mass" not in names
    failure = next(c for c in report.failures() if c.name == "row-sum")
    assert failure.location == "key=0, m=2"


def test_capped_column_sum_violation_detected() -> None:
    # A column-and-row preserving swap that moves decode-to-1 mass off x=3.
    changes = [
        ((0, 2, 1, 3), 3, F(-1, 80)),
        ((0, 2, 1, 3), 4, F(1, 80)),
        ((0, 0, 0, 0), 3, F(1, 80)),
        ((0, 0, 0, 0), 4, F(-1, 80)),
    ]
    bad = mutate(golden_scheme(), {1: changes})
    report = check_scheme(bad)
    assert failed_names(report) == {"capped-column-sum"}
    failure = report.failures()[0]
    assert failure.location == "m=1, x=3"
    assert failure.expected == F(1, 4)
    assert failure.actual == F(1, 4) - F(1, 80)


def test_alpha_bound_violation_detected() -> None:
    # Move the unwatermarked reserve onto a marked key in every table.
    changes = [((0, 0, 0, 0), 4, F(-1, 10)), ((0, 2, 3, 1), 4, F(1, 10))]
    bad = mutate(golden_scheme(), {1: changes, 2: changes, 3: changes})
    report = check_scheme(bad)
    assert failed_names(report) == {"alpha-bounded-total"}
    failure = report.failures()[0]
    assert failure.location == "x=3"
    assert failure.expected == F(9, 10)
    assert failure.actual == F(1)


def test_negative_mass_detected() -> None:
    # The compensating move keeps the table total at 1 so assembly succeeds.
    changes = [((0, 0, 0, 0), 4, F(-2, 10)), ((0, 0, 0, 0), 3, F(2, 10))]
    bad = mutate(golden_scheme(), {1: changes})
    report = check_scheme(bad)
    names = failed_names(report)
    assert "mass" in names
    assert "column-sum" in names
    assert "row-sum" not in names
    failure = next(c for c in report.failures() if c.name == "mass")
    assert failure.location == "m=1, key=0, x=4"
    assert failure.actual == F(-1, 10)


def test_total_mass_violation_detected() -> None:
    # Inflate a non-reference table; the key marginal from m=1 stays valid.
    changes = [((0, 0, 0, 0), 4, F(1, 80))]
    bad = mutate(golden_scheme(), {2: changes})
    report = check_scheme(bad)
    names = failed_names(report)
    assert "mass" in names
    assert "capped-column-sum" not in names
    assert "alpha-bounded-total" not in names
    failure = next(c for c in report.failures() if c.name == "mass")
    assert failure.location == "m=2 total"
    assert failure.actual == 1 + F(1, 80)


def test_miss_detection_golden() -> None:
    scheme = golden_scheme()
    for m in (1, 2, 3):
        assert miss_detection(scheme, m) == F(3, 10)


def test_miss_detection_instance_b() -> None:
    px = TokenDistribution.from_strings(["0.1", "0.3", "0.6"])
    scheme = construct_b(px, F(4, 5), 2, force_pseudo=True)
    assert miss_detection(scheme, 1) == F(1, 5)
    assert miss_detection(scheme, 2) == F(1, 5)


def test_miss_detection_alpha_zero_is_one() -> None:
    px = TokenDistribution.from_strings(["0.25", "0.75"])
    scheme = construct_a(px, F(0), 2)
    assert miss_detection(scheme, 1) == 1


def test_miss_detection_rejects_bad_message() -> None:
    scheme = golden_scheme()
    with pytest.raises(ParameterError, match="worst_false_alarm"):
        miss_detection(scheme, 0)
    with pytest.raises(ParameterError):
        miss_detection(scheme, 4)


def test_worst_false_alarm_golden() -> None:
    assert worst_false_alarm(golden_scheme()) == F(9, 10)


def test_worst_false_alarm_instance_b() -> None:
    px = TokenDistribution.from_strings(["0.1", "0.3", "0.6"])
    scheme = construct_b(px, F(4, 5), 2, force_pseudo=True)
    assert worst_false_alarm(scheme) == F(4, 5)


def test_worst_false_alarm_is_attained_at_a_token() -> None:
    # The false alarm under any token distribution is a convex combination of
    # per-token alarms, so the reported worst case dominates random mixtures.
    scheme = golden_scheme()
    wfa = worst_false_alarm(scheme)
    per_token = []
    for x in range(1, scheme.n + 1):
        alarm = sum(
            (
                mass
                for idx, mass in scheme.pz.items()
                if scheme.keyset.key(idx)[x - 1] != 0
            ),
            F(0),
        )
        per_token.append(alarm)
    assert wfa == max(per_token)
    rng = random.Random(3)
    for _ in range(25):
        weights = [rng.randint(0, 5) for _ in per_token]
        if sum(weights) == 0:
            weights[0] = 1
        mixture = sum(w * a for w, a in zip(weights, per_token)) / sum(weights)
        assert mixture <= wfa


def test_optimal_value_examples() -> None:
    assert optimal_value(PX_A, ALPHA_A, 3) == F(3, 10)
    assert optimal_value(PX_A, F(0), 3) == 1
    skewed = TokenDistribution.from_strings(["0.01", "0.04", "0.95"])
    assert optimal_value(skewed, F(99, 100), 2) == F(91, 200)
    px = TokenDistribution.from_strings(["0.1", "0.3", "0.6"])
    assert optimal_value(px, F(4, 5), 2) == F(1, 5)


def test_optimal_value_validation() -> None:
    with pytest.raises(ParameterError):
        optimal_value(PX_A, F(1), 3)
    with pytest.raises(ParameterError):
        optimal_value(PX_A, F(1, 2), 5)


@settings(max_examples=200)
@given(
    st.lists(st.integers(min_value=0, max_value=30), min_size=1, max_size=7).filter(sum),
    st.integers(min_value=0, max_value=98),
    st.integers(min_value=1, max_value=7),
)
def test_optimal_value_monotonic(weights: list[int], alpha_pct: int, t: int) -> None:
    t = min(t, len(weights))
    total = sum(weights)
    px = TokenDistribution.from_fractions(F(w, total) for w in weights)
    lo = optimal_value(px, F(alpha_pct, 100), t)
    hi = optimal_value(px, F(alpha_pct + 1, 100), t)
    assert 0 <= hi <= lo <= 1
    if t < px.n:
        assert optimal_value(px, F(alpha_pct, 100), t + 1) >= lo


def test_error_report_golden() -> None:
    report = error_report(golden_scheme())
    assert report.beta == (F(3, 10), F(3, 10), F(3, 10))
    assert report.worst_false_alarm == F(9, 10)
    assert report.optimal_value == F(3, 10)
    assert report.gap == 0


def test_error_report_instance_b() -> None:
    px = TokenDistribution.from_strings(["0.1", "0.3", "0.6"])
    report = error_report(construct_b(px, F(4, 5), 2, force_pseudo=True))
    assert report.beta == (F(1, 5), F(1, 5))
    assert report.gap == 0
    assert report.worst_false_alarm <= F(4, 5)
