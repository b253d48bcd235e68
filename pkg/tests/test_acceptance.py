"""Acceptance criteria, each run at its stated tolerance and budget.

Every test prints one ``PASS``/``FAIL`` line (outside pytest's capture) and
then asserts, so ``pytest -v`` shows both the line and the verdict.
"""

import pytest

from conebessel.verify import run_suite

CRITERIA = [
    (1, "jack-normalization", {}),
    (2, "rank-one", {}),
    (3, "product-formula", {"samples": 1_000_000}),
    (4, "orbit-equivalence", {"p": 4, "q": 2, "samples": 100_000}),
    (5, "bochner", {"samples": 1_000_000}),
    (6, "haar-invariance", {}),
    (7, "limit-case", {"samples": 100_000}),
    (8, "character-chain", {}),
    (9, "chamber-multiplicativity", {}),
    (10, "haar-pushforward", {}),
    (11, "hankel", {}),
    (12, "properties", {}),
]


@pytest.mark.slow
@pytest.mark.parametrize("number,suite,options", CRITERIA,
                         ids=[f"criterion_{n:02d}_{s}" for n, s, _ in CRITERIA])
def test_criterion(number, suite, options, capsys):
    res = run_suite(suite, **options)
    worst = res.worst
    verdict = "PASS" if res.passed else "FAIL"
    with capsys.disabled():
        print(f"\n{verdict} criterion {number} ({suite}): {len(res.checks)} checks, "
              f"worst {worst.name!r} residual {worst.residual:.3g} vs bound {worst.bound:.3g}, "
              f"{res.seconds:.1f} s")
    failed = [c.name for c in res.checks if not c.passed]
    assert res.passed, f"criterion {number} failed checks: {failed}"
