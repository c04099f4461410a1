"""Shared helpers plus the acceptance verdict summary.

Each test in ``test_acceptance.py`` covers one numbered criterion; after
the run a one-line PASS/FAIL verdict per criterion is printed so the
acceptance status can be read off without scanning the full log.
"""

from __future__ import annotations

import numpy as np
import pytest

ACCEPTANCE_FILE = "test_acceptance.py"

ACCEPTANCE_CRITERIA = {
    "test_criterion_01_classicality_equivalence": "three classicality routes agree over the desk-scale family",
    "test_criterion_02_superposition_obstruction": "superposition projection breaks distributivity in pair_groupoid(2)",
    "test_criterion_03_meet_matches_oracle": "iterated meet agrees with the range-intersection oracle",
    "test_criterion_04_product_dimensions": "span and double-commutant dimensions multiply over products",
    "test_criterion_05_grade_two_interference": "pair interference is exact: I3 vanishes, an I2 witness exceeds 0.1",
    "test_criterion_06_sum_over_histories": "character states satisfy the sum-over-histories identity",
    "test_criterion_07_separability_preserved": "classical-by-quantum dynamics preserves separability",
    "test_criterion_08_entanglement_generic": "quantum-by-quantum dynamics entangles most random trials",
    "test_criterion_09_character_diagonalization": "character unitary diagonalizes abelian transition algebras",
    "test_criterion_10_theorem_determinism": "theorem report bytes are identical across runs and job counts",
}

_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if f"{ACCEPTANCE_FILE}::" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name not in ACCEPTANCE_CRITERIA:
        return
    if report.when == "call":
        _acceptance_outcomes[name] = report.outcome
    elif report.outcome != "passed" and name not in _acceptance_outcomes:
        _acceptance_outcomes[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, (name, title) in enumerate(ACCEPTANCE_CRITERIA.items(), start=1):
        outcome = _acceptance_outcomes.get(name, "not run")
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {number:2d}: {verdict:4s}  {title}")


# -- shared numeric helpers ------------------------------------------------


def random_projection(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    """A rank-``rank`` orthogonal projection with Haar-random range."""
    z = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    q, _ = np.linalg.qr(z)
    return q @ q.conj().T


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """A full-support random density matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
