"""Acceptance suite: ten numbered capability checks.

Every test here corresponds to one entry of ``ACCEPTANCE_CRITERIA`` in
``conftest.py``; after the run the conftest hook prints one PASS/FAIL
line per criterion.  Tolerances are part of the contract and must not
be loosened.
"""

import json
import subprocess
import sys
import time

import numpy as np
from conftest import random_density, random_projection
from numpy.testing import assert_allclose

from groupoidqm import (
    AlgebraElement,
    algebra_basis,
    amplitude,
    certify_proposition,
    character_diagonalization,
    classicality_verdict,
    cyclic_group,
    direct_product,
    discrete_groupoid,
    disjoint_union,
    double_commutant_dimension,
    entanglement_counterexample,
    interference,
    is_factorizable,
    isotropy_character_table,
    join,
    meet,
    operator_norm,
    pair_groupoid,
    product_transition,
    pure_state,
    range_intersection_projection,
    representation_matrix,
    separability_theorem_check,
    span_dimension,
    state_from_density,
    state_from_transition_phases,
    symmetric_group,
    transition_proposition,
    unit_proposition,
)
from groupoidqm.formats import fixture_path

GRID = (0.0, 10.0, 101)


def classicality_family():
    singles = [
        pair_groupoid(2),
        pair_groupoid(3),
        pair_groupoid(4),
        cyclic_group(2),
        cyclic_group(3),
        cyclic_group(4),
        cyclic_group(5),
        symmetric_group(3),
    ]
    unions = [
        disjoint_union([cyclic_group(2), cyclic_group(3)]),
        disjoint_union([cyclic_group(2), cyclic_group(2)]),
        disjoint_union([pair_groupoid(2), cyclic_group(2)]),
    ]
    products = [
        direct_product(cyclic_group(2), cyclic_group(3)),
        direct_product(cyclic_group(2), pair_groupoid(2)),
        direct_product(pair_groupoid(2), pair_groupoid(2)),
    ]
    return singles + unions + products


def test_criterion_01_classicality_equivalence():
    start = time.monotonic()
    for g in classicality_family():
        verdict = classicality_verdict(g)
        assert verdict.consistent, verdict.describe()
        routes = {
            verdict.boolean_lattice,
            verdict.totally_disconnected and verdict.abelian_isotropy,
            verdict.abelian_algebra,
        }
        assert len(routes) == 1, verdict.describe()
    assert time.monotonic() - start < 30.0


def test_criterion_02_superposition_obstruction():
    g = pair_groupoid(2)
    one_x = unit_proposition(g, 0)
    one_y = unit_proposition(g, 1)
    p_alpha = transition_proposition(g, 1)

    assert operator_norm(meet(one_x, p_alpha).matrix) <= 1e-10
    both = join(one_x, one_y)
    assert np.array_equal(both.matrix, one_x.matrix + one_y.matrix)

    lhs = meet(p_alpha, both)
    rhs = join(meet(p_alpha, one_x), meet(p_alpha, one_y))
    gap = operator_norm(lhs.matrix - rhs.matrix)
    assert gap >= 0.9
    assert abs(gap - 1.0) <= 1e-9


def test_criterion_03_meet_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        dim = int(rng.integers(2, 17))
        p = certify_proposition(random_projection(rng, dim, int(rng.integers(1, dim))))
        q = certify_proposition(random_projection(rng, dim, int(rng.integers(1, dim))))
        computed = meet(p, q, max_iter=500).matrix
        oracle = range_intersection_projection(p, q)
        assert operator_norm(computed - oracle) <= 1e-8


def test_criterion_04_product_dimensions():
    pairs = [
        (cyclic_group(2), cyclic_group(3)),
        (pair_groupoid(2), cyclic_group(2)),
        (pair_groupoid(2), pair_groupoid(2)),
        (cyclic_group(4), cyclic_group(2)),
        (symmetric_group(3), cyclic_group(2)),
    ]
    for ga, gb in pairs:
        product = direct_product(ga, gb)
        dim_a = span_dimension([op.matrix for op in algebra_basis(ga)])
        dim_b = span_dimension([op.matrix for op in algebra_basis(gb)])
        dim_product = span_dimension([op.matrix for op in algebra_basis(product)])
        assert dim_product == dim_a * dim_b
        assert double_commutant_dimension(product) == dim_product


def test_criterion_05_grade_two_interference():
    pool = [
        pair_groupoid(2),
        cyclic_group(4),
        symmetric_group(3),
        disjoint_union([cyclic_group(2), cyclic_group(3)]),
        direct_product(pair_groupoid(2), cyclic_group(2)),
    ]
    rng = np.random.default_rng(5)
    worst = 0.0
    for trial in range(200):
        g = pool[trial % len(pool)]
        state = state_from_density(random_density(rng, g.n_transitions), g)
        ids = rng.permutation(g.n_transitions)
        first = 1 + int(rng.integers(0, g.n_transitions - 2))
        second = first + 1 + int(rng.integers(0, g.n_transitions - first - 1))
        triple = (ids[:first], ids[first:second], ids[second:])
        worst = max(worst, abs(interference(state, *triple)))
    assert worst <= 1e-11

    cat = pair_groupoid(2)
    vec = np.zeros(cat.n_transitions, dtype=complex)
    vec[0] = vec[1] = 1 / np.sqrt(2)
    superposed = pure_state(vec, cat)
    witness = interference(superposed, {0}, {2})
    assert abs(witness) > 0.1
    assert_allclose(witness, 1.0, atol=1e-9)


def test_criterion_06_sum_over_histories():
    g = cyclic_group(4)
    table = isotropy_character_table(g, 0)
    loops = g.transitions_between(0, 0)
    for k in range(len(table.loop_ids)):
        phases = np.empty(g.n_transitions, dtype=complex)
        for i, t in enumerate(table.loop_ids):
            phases[t] = table.values[k, i]
        state = state_from_transition_phases(g, phases)
        factorizable, _ = is_factorizable(state)
        assert factorizable
        lhs = abs(amplitude(state, 0, 0)) ** 2
        rhs = sum(state.phi[g.compose(g.inverse(a), b)] for a in loops for b in loops)
        assert abs(rhs.imag) <= 1e-10
        assert abs(lhs - rhs.real) <= 1e-10

    base, fibre = pair_groupoid(2), cyclic_group(2)
    product = direct_product(base, fibre)
    for character in ((1.0, 1.0), (1.0, -1.0)):
        weights = np.empty(product.n_transitions, dtype=complex)
        for i in range(base.n_transitions):
            for j in range(fibre.n_transitions):
                weights[product_transition(base, fibre, i, j)] = character[j]
        # the multiplicative weights satisfy the composition law exactly,
        # so the double-path sum reproduces the squared total amplitude
        for x in range(product.n_objects):
            for y in range(product.n_objects):
                paths = product.transitions_between(x, y)
                lhs = abs(sum(weights[t] for t in paths)) ** 2
                rhs = sum(
                    weights[product.compose(product.inverse(a), b)]
                    for a in paths
                    for b in paths
                )
                assert abs(lhs - rhs) <= 1e-10
                if character[1] == 1.0 and x != y:
                    assert lhs == 4.0  # a genuinely nonzero instance

    # the normalized pure state built from the sign character inherits the
    # identity between distinct outcomes (both sides vanish)
    signs = np.empty(product.n_transitions, dtype=complex)
    for i in range(base.n_transitions):
        for j in range(fibre.n_transitions):
            signs[product_transition(base, fibre, i, j)] = 1.0 if j == 0 else -1.0
    state = state_from_transition_phases(product, signs)
    paths = product.transitions_between(0, 1)
    lhs = abs(amplitude(state, 0, 1)) ** 2
    rhs = sum(state.phi[product.compose(product.inverse(a), b)] for a in paths for b in paths)
    assert abs(lhs) <= 1e-10
    assert abs(lhs - rhs.real) <= 1e-10


def test_criterion_07_separability_preserved():
    start = time.monotonic()
    classical = discrete_groupoid(["alive", "dead"])
    report = separability_theorem_check(classical, pair_groupoid(2), trials=50, grid=GRID, seed=42)
    assert report.mode == "separability"
    assert report.passed
    assert report.worst_ratio <= 1e-9
    assert report.worst_offblock <= 1e-10

    pseudo = disjoint_union([symmetric_group(3), symmetric_group(3)])
    report = separability_theorem_check(pseudo, pair_groupoid(2), trials=50, grid=GRID, seed=42)
    assert report.passed
    assert report.worst_ratio <= 1e-9
    assert report.worst_offblock <= 1e-10
    assert time.monotonic() - start < 60.0


def test_criterion_08_entanglement_generic():
    report = entanglement_counterexample(
        pair_groupoid(2), pair_groupoid(2), trials=50, grid=GRID, seed=42
    )
    assert report.mode == "entanglement"
    assert report.passed
    assert report.fraction_entangled >= 0.9
    assert report.max_entropy > 0.1


def test_criterion_09_character_diagonalization():
    family = [cyclic_group(n) for n in range(2, 9)]
    family.append(disjoint_union([cyclic_group(2), cyclic_group(3), cyclic_group(4)]))
    family.append(disjoint_union([cyclic_group(2), cyclic_group(2)]))
    rng = np.random.default_rng(9)
    for g in family:
        unitary, labels = character_diagonalization(g)
        assert len(labels) == g.n_transitions
        assert operator_norm(unitary @ unitary.conj().T - np.eye(g.n_transitions)) <= 1e-12
        for _ in range(20):
            coeffs = {
                t: complex(rng.standard_normal(), rng.standard_normal())
                for t in range(g.n_transitions)
            }
            m = representation_matrix(AlgebraElement(coeffs), g).matrix
            rotated = unitary.conj().T @ m @ unitary
            off = rotated - np.diag(np.diag(rotated))
            assert operator_norm(off) <= 1e-12


def test_criterion_10_theorem_determinism():
    path = fixture_path("quantum_cat.groupoid")
    base = [
        sys.executable, "-m", "groupoidqm", "theorem", path, path,
        "--trials", "6", "--grid", "0:2:9", "--seed", "42", "--format", "structured",
    ]
    outputs = []
    for jobs in ("1", "1", "4"):
        proc = subprocess.run(base + ["--jobs", jobs], capture_output=True, timeout=120)
        assert proc.returncode == 0, proc.stderr.decode()
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]  # identical bytes across repeated runs
    assert outputs[0] == outputs[2]  # identical bytes across --jobs settings
    payload = json.loads(outputs[0].decode())
    assert len(payload["trials"]) == 6
