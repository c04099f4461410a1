"""Unitary dynamics in the outcome representation and bipartite structure.

Hamiltonians are self-adjoint algebra elements (or matrices certified
to lie in the represented algebra).  Evolution goes through one
eigendecomposition; unitarity, normalization and energy conservation
are tracked as residuals rather than assumed.

For a direct product whose first factor is totally disconnected, the
outcome space splits into blocks, one per first-factor outcome, and
every represented Hamiltonian is block diagonal.  Consequently product
states never entangle: pure ones keep Schmidt rank one and mixtures
keep all mass on the diagonal blocks.  When the first factor is
connected the same machinery produces entanglement generically, and
`entanglement_counterexample` measures how often.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    FUNDAMENTAL,
    AlgebraElement,
    Operator,
    algebra_basis,
    involution,
    operator_norm,
    representation_matrix,
)
from .groupoid import Groupoid, direct_product, is_totally_disconnected, orbit_decomposition
from .states import StateFn

__all__ = [
    "BlockStructure",
    "block_structure",
    "Hamiltonian",
    "hamiltonian_from_element",
    "hamiltonian_from_matrix",
    "heisenberg",
    "EvolutionTrace",
    "evolve",
    "SchmidtDiagnostics",
    "schmidt_diagnostics",
    "TrialRecord",
    "TheoremReport",
    "separability_theorem_check",
    "entanglement_counterexample",
]

DEFAULT_GRID = (0.0, 10.0, 101)


# -- block structure of product outcome spaces ----------------------------


@dataclass(frozen=True)
class BlockStructure:
    """Partition of a product groupoid's outcome basis into dynamical blocks."""

    blocks: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def block_structure(product: Groupoid) -> BlockStructure:
    """Blocks of the outcome space of a recorded direct product.

    Product outcomes sharing a first-factor orbit form one block.  When
    the first factor is totally disconnected this is one block per
    first-factor outcome; a connected first factor collapses everything
    into a single block.  Every represented transition must stay inside
    its block; a violation would be an internal error, not bad input.
    """
    if product.factors is None:
        raise ValueError("block structure needs a groupoid built by direct_product")
    ga, gb = product.factors
    orbits = orbit_decomposition(ga).orbits
    orbit_of = {}
    for k, orb in enumerate(orbits):
        for x in orb:
            orbit_of[x] = k
    nb = gb.n_objects
    blocks: list[list[int]] = [[] for _ in orbits]
    for x in range(product.n_objects):
        blocks[orbit_of[x // nb]].append(x)
    labels = tuple("+".join(ga.label(x) for x in orb) for orb in orbits)
    for t in range(product.n_transitions):
        if orbit_of[product.source[t] // nb] != orbit_of[product.target[t] // nb]:
            raise RuntimeError(f"transition {t} escapes its block; product tables are corrupted")
    return BlockStructure(tuple(tuple(b) for b in blocks), labels)


# -- Hamiltonians ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """A self-adjoint generator together with its algebra provenance."""

    matrix: np.ndarray
    rep: str
    groupoid: Groupoid
    element: AlgebraElement | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def hamiltonian_from_element(elem: AlgebraElement, g: Groupoid, rep: str = FUNDAMENTAL) -> Hamiltonian:
    if not involution(elem, g).isclose(elem, 1e-12):
        raise ValueError("Hamiltonian element must be self-adjoint under the involution")
    m = representation_matrix(elem, g, rep).matrix
    assert operator_norm(m - m.conj().T) <= 1e-12
    return Hamiltonian((m + m.conj().T) / 2.0, rep, g, elem)


def hamiltonian_from_matrix(
    m: np.ndarray,
    g: Groupoid,
    rep: str = FUNDAMENTAL,
    span_tol: float = 1e-8,
) -> Hamiltonian:
    """Accept a matrix only if it is self-adjoint and lies in the algebra.

    The membership test solves least squares against the represented
    basis; a residual beyond ``span_tol`` (relative to the matrix norm)
    means the matrix is not a represented algebra element.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("Hamiltonian matrix must be square")
    scale = max(1.0, float(np.linalg.norm(m)))
    if operator_norm(m - m.conj().T) > 1e-10 * scale:
        raise ValueError("Hamiltonian matrix is not self-adjoint")
    images = [op.matrix.ravel() for op in algebra_basis(g, rep)]
    stack = np.stack(images, axis=1)
    coeffs, _, _, _ = np.linalg.lstsq(stack, m.ravel(), rcond=None)
    residual = float(np.linalg.norm(stack @ coeffs - m.ravel()))
    if residual > span_tol * scale:
        raise ValueError(
            f"matrix is not in the represented transition algebra (residual {residual:.3e})"
        )
    elem = AlgebraElement({i: complex(c) for i, c in enumerate(coeffs) if abs(c) > 1e-14})
    return Hamiltonian((m + m.conj().T) / 2.0, rep, g, elem)


def _eig_unitary(w: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    return (v * np.exp(1j * w * t)) @ v.conj().T


def heisenberg(h: Hamiltonian, op: Operator | AlgebraElement, t: float) -> Operator:
    """Conjugate an observable by the time-t unitary."""
    if isinstance(op, AlgebraElement):
        op = representation_matrix(op, h.groupoid, h.rep)
    if op.rep != h.rep:
        raise ValueError("observable and Hamiltonian live in different representations")
    w, v = np.linalg.eigh(h.matrix)
    u = _eig_unitary(w, v, t)
    return Operator(h.rep, u @ op.matrix @ u.conj().T)


# -- Schmidt diagnostics ---------------------------------------------------


@dataclass(frozen=True)
class SchmidtDiagnostics:
    """Singular structure of a bipartite pure state."""

    coefficients: np.ndarray
    rank: int
    entropy: float
    ratio: float

    @property
    def is_product(self) -> bool:
        return self.rank == 1


def schmidt_diagnostics(vec: np.ndarray, dims: tuple[int, int], tol: float = 1e-9) -> SchmidtDiagnostics:
    """Schmidt coefficients, rank, entanglement entropy and second/first ratio.

    The vector is reshaped row-major to dims (first factor major), so it
    matches the outcome ordering of `direct_product`.
    """
    da, db = dims
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.shape != (da * db,):
        raise ValueError(f"vector of length {vec.size} does not match bipartition {dims}")
    nrm = float(np.linalg.norm(vec))
    if nrm == 0.0:
        raise ValueError("zero vector has no Schmidt structure")
    sv = np.linalg.svd(vec.reshape(da, db), compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0]))
    p = (sv / np.linalg.norm(sv)) ** 2
    p = p[p > 1e-18]
    entropy = float(-np.sum(p * np.log(p)))
    if entropy <= 0.0:  # clamp -0.0 and negative rounding noise
        entropy = 0.0
    ratio = float(sv[1] / sv[0]) if sv.size > 1 else 0.0
    return SchmidtDiagnostics(sv, rank, entropy, ratio)


# -- evolution -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """Time series of an evolved state with conservation residuals."""

    times: np.ndarray
    rep: str
    vectors: np.ndarray | None
    densities: np.ndarray | None
    norm_residuals: np.ndarray
    unitarity_residuals: np.ndarray
    energy_residuals: np.ndarray
    schmidt: tuple[SchmidtDiagnostics, ...] | None


def parse_grid(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("time grid needs at least one point")
    return np.linspace(float(start), float(stop), int(steps))


def evolve(
    h: Hamiltonian,
    state: StateFn,
    times: np.ndarray | None = None,
    bipartition: tuple[int, int] | None = None,
    tol: float = 1e-10,
) -> EvolutionTrace:
    """Evolve a state along a time grid with one eigendecomposition.

    Unitarity of every step and conservation of norm (or trace) are
    recorded; drifts beyond ``tol`` raise, since they can only come from
    a numerical breakdown.
    """
    if times is None:
        times = parse_grid(*DEFAULT_GRID)
    times = np.asarray(times, dtype=float)
    if state.rep != h.rep:
        raise ValueError("state and Hamiltonian live in different representations")
    dim = h.dim
    w, v = np.linalg.eigh(h.matrix)
    unitarity = np.empty(times.size)
    eye = np.eye(dim)
    for i, t in enumerate(times):
        u = _eig_unitary(w, v, float(t))
        unitarity[i] = float(np.linalg.norm(u @ u.conj().T - eye))
    if unitarity.max() > tol:
        raise RuntimeError(f"evolution lost unitarity: residual {unitarity.max():.3e}")

    vectors = densities = None
    schmidt: list[SchmidtDiagnostics] | None = None
    norm_res = np.empty(times.size)
    energy_res = np.empty(times.size)
    if bipartition is not None and state.vector is None:
        raise ValueError("Schmidt diagnostics need a pure state given by a vector")
    if state.vector is not None:
        psi0 = np.asarray(state.vector, dtype=complex).ravel()
        if psi0.size != dim:
            raise ValueError("state dimension does not match the Hamiltonian")
        coef = v.conj().T @ psi0
        e0 = float(np.real(np.vdot(psi0, h.matrix @ psi0)))
        vectors = np.empty((times.size, dim), dtype=complex)
        schmidt = [] if bipartition is not None else None
        for i, t in enumerate(times):
            psi = v @ (np.exp(-1j * w * float(t)) * coef)
            vectors[i] = psi
            norm_res[i] = abs(float(np.linalg.norm(psi)) - 1.0)
            energy_res[i] = abs(float(np.real(np.vdot(psi, h.matrix @ psi))) - e0)
            if schmidt is not None:
                schmidt.append(schmidt_diagnostics(psi, bipartition))
    else:
        if state.density is None:
            raise ValueError("state carries neither a vector nor a density matrix")
        rho0 = np.asarray(state.density, dtype=complex)
        if rho0.shape != (dim, dim):
            raise ValueError("state dimension does not match the Hamiltonian")
        r = v.conj().T @ rho0 @ v
        e0 = float(np.real(np.trace(rho0 @ h.matrix)))
        densities = np.empty((times.size, dim, dim), dtype=complex)
        for i, t in enumerate(times):
            ph = np.exp(-1j * w * float(t))
            rho = v @ ((ph[:, None] * r) * ph.conj()[None, :]) @ v.conj().T
            densities[i] = rho
            norm_res[i] = abs(complex(np.trace(rho)).real - 1.0)
            energy_res[i] = abs(float(np.real(np.trace(rho @ h.matrix))) - e0)
    if norm_res.max() > tol:
        raise RuntimeError(f"evolution lost normalization: residual {norm_res.max():.3e}")
    return EvolutionTrace(
        times=times,
        rep=h.rep,
        vectors=vectors,
        densities=densities,
        norm_residuals=norm_res,
        unitarity_residuals=unitarity,
        energy_residuals=energy_res,
        schmidt=tuple(schmidt) if schmidt is not None else None,
    )


# -- theorem-scale checks --------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    index: int
    support_size: int
    max_ratio: float | None = None
    max_offblock: float | None = None
    max_entropy: float | None = None
    onset_time: float | None = None
    ok: bool = True

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "support_size": self.support_size,
            "max_ratio": self.max_ratio,
            "max_offblock": self.max_offblock,
            "max_entropy": self.max_entropy,
            "onset_time": self.onset_time,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class TheoremReport:
    """Aggregated trial outcomes for the separability or entanglement mode."""

    mode: str
    factor_a: str
    factor_b: str
    n_trials: int
    seed: int
    grid: tuple[float, float, int]
    ratio_tol: float
    offblock_tol: float
    entropy_threshold: float
    min_fraction: float
    trials: tuple[TrialRecord, ...]

    @property
    def worst_ratio(self) -> float:
        return max((t.max_ratio for t in self.trials if t.max_ratio is not None), default=0.0)

    @property
    def worst_offblock(self) -> float:
        return max((t.max_offblock for t in self.trials if t.max_offblock is not None), default=0.0)

    @property
    def max_entropy(self) -> float:
        return max((t.max_entropy for t in self.trials if t.max_entropy is not None), default=0.0)

    @property
    def fraction_entangled(self) -> float:
        if not self.trials:
            return 0.0
        hits = sum(1 for t in self.trials if (t.max_entropy or 0.0) > self.entropy_threshold)
        return hits / len(self.trials)

    @property
    def passed(self) -> bool:
        if not self.trials:
            return True
        if self.mode == "separability":
            return all(t.ok for t in self.trials)
        return self.fraction_entangled >= self.min_fraction

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "factor_a": self.factor_a,
            "factor_b": self.factor_b,
            "n_trials": self.n_trials,
            "seed": self.seed,
            "grid": {"start": self.grid[0], "stop": self.grid[1], "steps": self.grid[2]},
            "ratio_tol": self.ratio_tol,
            "offblock_tol": self.offblock_tol,
            "entropy_threshold": self.entropy_threshold,
            "min_fraction": self.min_fraction,
            "passed": self.passed,
            "worst_ratio": self.worst_ratio,
            "worst_offblock": self.worst_offblock,
            "max_entropy": self.max_entropy,
            "fraction_entangled": self.fraction_entangled,
            "trials": [t.to_dict() for t in self.trials],
        }


def _describe(g: Groupoid) -> str:
    return f"{g.n_objects} objects, {g.n_transitions} transitions"


def _sample_hamiltonian(rng: np.random.Generator, g: Groupoid, rep: str) -> tuple[np.ndarray, int]:
    n = g.n_transitions
    k = int(rng.integers(1, n + 1))
    ids = np.sort(rng.choice(n, size=k, replace=False))
    re = rng.standard_normal(k)
    im = rng.standard_normal(k)
    elem = AlgebraElement({int(i): complex(re[j], im[j]) for j, i in enumerate(ids)})
    sym = 0.5 * (elem + involution(elem, g))
    m = representation_matrix(sym, g, rep).matrix
    return (m + m.conj().T) / 2.0, k


def _random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return vec / np.linalg.norm(vec)


def _run_trials(n_trials: int, jobs: int, worker) -> list[TrialRecord]:
    if jobs <= 1:
        return [worker(i) for i in range(n_trials)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, range(n_trials)))


def separability_theorem_check(
    ga: Groupoid,
    gb: Groupoid,
    trials: int = 50,
    grid: tuple[float, float, int] = DEFAULT_GRID,
    seed: int = 42,
    jobs: int = 1,
    ratio_tol: float = 1e-9,
    offblock_tol: float = 1e-10,
) -> TheoremReport:
    """Verify that product states over a disconnected first factor stay separable.

    Each trial draws a random self-adjoint algebra element of the
    product as Hamiltonian, then evolves one pure product state and one
    block-diagonal mixture over the grid.  The pure state must keep
    Schmidt ratio at rank one and the mixture must keep all mass on the
    diagonal blocks.
    """
    if not is_totally_disconnected(ga):
        raise ValueError(
            "the separability statement needs a totally disconnected first factor; "
            "use entanglement_counterexample for connected ones"
        )
    product = direct_product(ga, gb)
    da, db = ga.n_objects, gb.n_objects
    times = parse_grid(*grid)
    block_slices = [slice(x * db, (x + 1) * db) for x in range(da)]
    offdiag_mask = np.ones((da * db, da * db), dtype=bool)
    for s in block_slices:
        offdiag_mask[s, s] = False

    def worker(i: int) -> TrialRecord:
        rng = np.random.default_rng([seed, i])
        h, support = _sample_hamiltonian(rng, product, FUNDAMENTAL)
        w, v = np.linalg.eigh(h)

        xa = int(rng.integers(da))
        psi0 = np.zeros(da * db, dtype=complex)
        psi0[block_slices[xa]] = _random_unit(rng, db)
        coef = v.conj().T @ psi0
        max_ratio = 0.0
        for t in times:
            psi = v @ (np.exp(-1j * w * float(t)) * coef)
            sv = np.linalg.svd(psi.reshape(da, db), compute_uv=False)
            if sv.size > 1 and sv[0] > 0:
                max_ratio = max(max_ratio, float(sv[1] / sv[0]))

        weights = rng.random(da) + 0.1
        weights /= weights.sum()
        rho0 = np.zeros((da * db, da * db), dtype=complex)
        for x in range(da):
            vec = np.zeros(da * db, dtype=complex)
            vec[block_slices[x]] = _random_unit(rng, db)
            rho0 += weights[x] * np.outer(vec, vec.conj())
        r = v.conj().T @ rho0 @ v
        max_off = 0.0
        for t in times:
            ph = np.exp(-1j * w * float(t))
            rho = v @ ((ph[:, None] * r) * ph.conj()[None, :]) @ v.conj().T
            max_off = max(max_off, float(np.linalg.norm(rho[offdiag_mask])))

        ok = max_ratio <= ratio_tol and max_off <= offblock_tol
        return TrialRecord(i, support_size=support, max_ratio=max_ratio, max_offblock=max_off, ok=ok)

    records = _run_trials(trials, jobs, worker)
    return TheoremReport(
        mode="separability",
        factor_a=_describe(ga),
        factor_b=_describe(gb),
        n_trials=trials,
        seed=seed,
        grid=(float(grid[0]), float(grid[1]), int(grid[2])),
        ratio_tol=ratio_tol,
        offblock_tol=offblock_tol,
        entropy_threshold=0.0,
        min_fraction=0.0,
        trials=tuple(records),
    )


def entanglement_counterexample(
    ga: Groupoid,
    gb: Groupoid,
    trials: int = 50,
    grid: tuple[float, float, int] = DEFAULT_GRID,
    seed: int = 42,
    jobs: int = 1,
    entropy_threshold: float = 0.1,
    min_fraction: float = 0.9,
) -> TheoremReport:
    """Show that a connected first factor generically entangles product states.

    Same sampling as the separability check, but the tracked quantity is
    the entanglement entropy over the grid and the time at which it
    first crosses the threshold.
    """
    product = direct_product(ga, gb)
    da, db = ga.n_objects, gb.n_objects
    times = parse_grid(*grid)

    def worker(i: int) -> TrialRecord:
        rng = np.random.default_rng([seed, i])
        h, support = _sample_hamiltonian(rng, product, FUNDAMENTAL)
        w, v = np.linalg.eigh(h)
        xa = int(rng.integers(da))
        psi0 = np.zeros(da * db, dtype=complex)
        psi0[xa * db:(xa + 1) * db] = _random_unit(rng, db)
        coef = v.conj().T @ psi0
        max_entropy = 0.0
        onset: float | None = None
        for t in times:
            psi = v @ (np.exp(-1j * w * float(t)) * coef)
            diag = schmidt_diagnostics(psi, (da, db))
            if diag.entropy > max_entropy:
                max_entropy = diag.entropy
            if onset is None and diag.entropy > entropy_threshold:
                onset = float(t)
        return TrialRecord(
            i,
            support_size=support,
            max_entropy=max_entropy,
            onset_time=onset,
            ok=max_entropy > entropy_threshold,
        )

    records = _run_trials(trials, jobs, worker)
    return TheoremReport(
        mode="entanglement",
        factor_a=_describe(ga),
        factor_b=_describe(gb),
        n_trials=trials,
        seed=seed,
        grid=(float(grid[0]), float(grid[1]), int(grid[2])),
        ratio_tol=0.0,
        offblock_tol=0.0,
        entropy_threshold=entropy_threshold,
        min_fraction=min_fraction,
        trials=tuple(records),
    )
