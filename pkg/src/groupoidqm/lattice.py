"""Propositions (orthogonal projections) and their lattice.

A proposition is a self-adjoint idempotent in a represented transition
algebra.  The meet of two propositions is computed as the strong limit
of alternating products, realized by repeated squaring of the
symmetrized seed P Q P; the join is obtained from meets and
complements.  Whether the resulting lattice is Boolean is exactly the
classicality question, and `classicality_verdict` answers it three
independent ways.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    LEFT_REGULAR,
    AlgebraElement,
    Operator,
    algebra_basis,
    operator_norm,
    representation_matrix,
)
from .groupoid import Groupoid, has_abelian_isotropy, is_totally_disconnected

__all__ = [
    "Proposition",
    "CertificationError",
    "ConvergenceError",
    "certify_proposition",
    "is_proposition",
    "unit_proposition",
    "transition_proposition",
    "leq",
    "complement",
    "meet",
    "join",
    "meet_unsymmetrized",
    "range_intersection_projection",
    "spectral_projections",
    "canonical_propositions",
    "LawViolation",
    "LatticeReport",
    "check_boolean",
    "ClassicalityVerdict",
    "classicality_verdict",
]

DEFAULT_TOL = 1e-9
MEET_TOL = 1e-12
MEET_MAX_ITER = 500
MEET_PIN_TOL = 1e-12


class CertificationError(ValueError):
    """The matrix is not a projection within tolerance."""

    def __init__(self, residual_adjoint: float, residual_idempotent: float):
        self.residual_adjoint = residual_adjoint
        self.residual_idempotent = residual_idempotent
        super().__init__(
            f"not a proposition: self-adjointness residual {residual_adjoint:.3e}, "
            f"idempotency residual {residual_idempotent:.3e}"
        )


class ConvergenceError(RuntimeError):
    """The meet iteration did not settle within the iteration budget."""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"meet iteration stalled at residual {residual:.3e} after {iterations} squarings")


@dataclass(frozen=True, eq=False)
class Proposition:
    """A certified projection, tagged with its representation."""

    matrix: np.ndarray
    rep: str
    residual_adjoint: float
    residual_idempotent: float
    label: str | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(float(np.real(np.trace(self.matrix)))))


def certify_proposition(
    op: Operator | np.ndarray,
    tol: float = DEFAULT_TOL,
    rep: str = LEFT_REGULAR,
    label: str | None = None,
) -> Proposition:
    """Certify self-adjointness and idempotency in operator norm."""
    if isinstance(op, Operator):
        m, rep = op.matrix, op.rep
    else:
        m = np.asarray(op, dtype=complex)
    ra = operator_norm(m - m.conj().T)
    ri = operator_norm(m @ m - m)
    if ra > tol or ri > tol:
        raise CertificationError(ra, ri)
    return Proposition(m, rep, ra, ri, label)


def is_proposition(op: Operator | np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    try:
        certify_proposition(op, tol)
    except CertificationError:
        return False
    return True


def unit_proposition(g: Groupoid, x: int, rep: str = LEFT_REGULAR) -> Proposition:
    """The projection recording "the outcome is x"."""
    op = representation_matrix(AlgebraElement.from_transition(g.unit(x)), g, rep)
    return certify_proposition(op, label=f"unit[{g.label(x)}]")


def transition_proposition(g: Groupoid, t: int, rep: str = LEFT_REGULAR) -> Proposition:
    """The even superposition projection attached to a connecting transition.

    For a transition t running x -> y with x != y this is half the sum
    of the two endpoint units, t itself and its inverse.  It is always a
    projection, and it is the standard witness that connecting
    transitions break distributivity.
    """
    if g.source[t] == g.target[t]:
        raise ValueError("the superposition projection needs a transition between distinct objects")
    elem = AlgebraElement(
        {
            g.unit(g.source[t]): 0.5,
            g.unit(g.target[t]): 0.5,
            t: 0.5,
            g.inverse(t): 0.5,
        }
    )
    op = representation_matrix(elem, g, rep)
    return certify_proposition(op, label=f"superpose[{t}]")


# -- order and operations -------------------------------------------------


def _leq_m(p: np.ndarray, q: np.ndarray, tol: float) -> bool:
    return operator_norm(p @ q - p) <= tol


def leq(p: Proposition, q: Proposition, tol: float = DEFAULT_TOL) -> bool:
    """Order by range inclusion: P below Q when P Q = P."""
    below = _leq_m(p.matrix, q.matrix, tol)
    if below:
        # the reversed product must then agree as well
        assert operator_norm(q.matrix @ p.matrix - p.matrix) <= 2 * tol
    return below


def complement(p: Proposition) -> Proposition:
    m = np.eye(p.dim) - p.matrix
    return Proposition(m, p.rep, p.residual_adjoint, p.residual_idempotent,
                       None if p.label is None else f"not({p.label})")


def _meet_m(p: np.ndarray, q: np.ndarray, tol: float = MEET_TOL, max_iter: int = MEET_MAX_ITER) -> np.ndarray:
    """Repeated squaring of P Q P until the iterates stop moving.

    Directions in both ranges carry eigenvalue 1 only up to rounding, and
    repeated squaring amplifies any such deviation without bound (upward
    deviations overflow, downward ones annihilate the intersection), so
    after each squaring the spectral cluster within ``MEET_PIN_TOL`` of 1
    is re-pinned to exactly 1.
    """
    x = p @ q @ p
    moved = float("inf")
    for _ in range(max_iter):
        x2 = x @ x
        w, v = np.linalg.eigh((x2 + x2.conj().T) / 2)
        w[w < 0.0] = 0.0
        w[w >= 1.0 - MEET_PIN_TOL] = 1.0
        x2 = (v * w) @ v.conj().T
        moved = float(np.linalg.norm(x2 - x))
        if moved <= tol:
            return x2
        x = x2
    raise ConvergenceError(moved, max_iter)


def meet(p: Proposition, q: Proposition, tol: float = MEET_TOL, max_iter: int = MEET_MAX_ITER) -> Proposition:
    """Largest proposition below both arguments."""
    if p.dim != q.dim:
        raise ValueError("propositions live in different spaces")
    m = _meet_m(p.matrix, q.matrix, tol, max_iter)
    return certify_proposition(m, rep=p.rep, label=_binary_label("and", p, q))


def join(p: Proposition, q: Proposition, tol: float = MEET_TOL, max_iter: int = MEET_MAX_ITER) -> Proposition:
    """Smallest proposition above both arguments, via complements of meets."""
    m = _join_m(p.matrix, q.matrix, tol, max_iter)
    return certify_proposition(m, rep=p.rep, label=_binary_label("or", p, q))


def _join_m(p: np.ndarray, q: np.ndarray, tol: float = MEET_TOL, max_iter: int = MEET_MAX_ITER) -> np.ndarray:
    eye = np.eye(p.shape[0])
    return eye - _meet_m(eye - p, eye - q, tol, max_iter)


def _binary_label(opname: str, p: Proposition, q: Proposition) -> str | None:
    if p.label is None or q.label is None:
        return None
    return f"{opname}({p.label},{q.label})"


def meet_unsymmetrized(p: Proposition, q: Proposition, tol: float = MEET_TOL, max_iter: int = MEET_MAX_ITER) -> np.ndarray:
    """Limit of powers of the plain product P Q; cross-check for `meet`.

    The iterates are not self-adjoint along the way, but the limit must
    agree with the symmetrized route for genuine projections.
    """
    x = p.matrix @ q.matrix
    moved = float("inf")
    for _ in range(max_iter):
        x2 = x @ x
        top = operator_norm(x2)
        if top > 1.0:
            x2 /= top
        moved = float(np.linalg.norm(x2 - x))
        if moved <= tol:
            return x2
        x = x2
    raise ConvergenceError(moved, max_iter)


def range_intersection_projection(p: Proposition | np.ndarray, q: Proposition | np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Independent oracle for the meet: project onto ran(P) ∩ ran(Q).

    The intersection is the joint null space of I - P and I - Q, found
    by one singular value decomposition of the stacked constraints.
    """
    pm = p.matrix if isinstance(p, Proposition) else np.asarray(p, dtype=complex)
    qm = q.matrix if isinstance(q, Proposition) else np.asarray(q, dtype=complex)
    d = pm.shape[0]
    eye = np.eye(d)
    stacked = np.vstack([eye - pm, eye - qm])
    _, sv, vh = np.linalg.svd(stacked)
    if sv.size == 0 or sv[0] <= rtol:
        return np.eye(d, dtype=complex)
    rank = int(np.sum(sv > rtol * sv[0]))
    basis = vh[rank:].conj().T
    return basis @ basis.conj().T


def spectral_projections(op: Operator | np.ndarray, cluster_tol: float = 1e-8, rep: str = LEFT_REGULAR) -> list[Proposition]:
    """Eigenprojections of a self-adjoint operator, one per eigenvalue cluster.

    Eigenvalues closer than ``cluster_tol`` merge into one cluster, so
    near-degenerate spectra produce well-conditioned projections.
    """
    if isinstance(op, Operator):
        m, rep = op.matrix, op.rep
    else:
        m = np.asarray(op, dtype=complex)
    herm_residual = operator_norm(m - m.conj().T)
    if herm_residual > 1e-8:
        raise ValueError(f"operator is not self-adjoint (residual {herm_residual:.3e})")
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    out: list[Proposition] = []
    start = 0
    for i in range(1, w.size + 1):
        if i == w.size or w[i] - w[i - 1] > cluster_tol:
            block = v[:, start:i]
            proj = block @ block.conj().T
            mean = float(np.mean(w[start:i]))
            out.append(certify_proposition(proj, rep=rep, label=f"eig[{mean:.4g}]"))
            start = i
    return out


# -- canonical proposition families and lattice laws ----------------------


def canonical_propositions(
    g: Groupoid,
    samples: int = 5,
    seed: int = 42,
    rep: str = LEFT_REGULAR,
) -> list[Proposition]:
    """The proposition family used for lattice verdicts.

    All unit projections, the superposition projection of every
    connecting transition (one per inverse pair), and ``samples`` random
    eigenprojections of random self-adjoint algebra elements.
    """
    props = [unit_proposition(g, x, rep) for x in range(g.n_objects)]
    for t in range(g.n_transitions):
        if g.source[t] != g.target[t] and t <= g.inverse(t):
            props.append(transition_proposition(g, t, rep))
    rng = np.random.default_rng(seed)
    n = g.n_transitions
    for _ in range(samples):
        re = rng.standard_normal(n)
        im = rng.standard_normal(n)
        elem = AlgebraElement({i: complex(re[i], im[i]) for i in range(n)})
        from .algebra import involution  # local import to avoid cycle at module load

        sym = 0.5 * (elem + involution(elem, g))
        mat = representation_matrix(sym, g, rep)
        clusters = spectral_projections(mat, rep=rep)
        pick = int(rng.integers(len(clusters)))
        props.append(clusters[pick])
    return props


@dataclass(frozen=True)
class LawViolation:
    law: str
    operands: tuple[int, ...]
    residual: float

    def describe(self, props: Sequence[Proposition] | None = None) -> str:
        names = ", ".join(
            props[i].label or f"#{i}" if props else f"#{i}" for i in self.operands
        )
        return f"{self.law} fails on ({names}): residual {self.residual:.3e}"


@dataclass(frozen=True)
class LatticeReport:
    n_propositions: int
    pairs_tested: int
    triples_tested: int
    violations: tuple[LawViolation, ...]
    note: str = ""

    @property
    def is_boolean(self) -> bool:
        return not self.violations

    @property
    def max_residual(self) -> float:
        return max((v.residual for v in self.violations), default=0.0)

    def by_law(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.violations:
            out[v.law] = out.get(v.law, 0) + 1
        return out

    def summary(self) -> str:
        head = (
            f"{self.n_propositions} propositions, {self.pairs_tested} pairs, "
            f"{self.triples_tested} triples: "
        )
        if self.is_boolean:
            return head + "Boolean"
        counts = ", ".join(f"{law} x{k}" for law, k in sorted(self.by_law().items()))
        return head + f"not Boolean ({counts}; worst residual {self.max_residual:.3e})"


def check_boolean(
    props: Sequence[Proposition],
    tol: float = DEFAULT_TOL,
    fail_fast: bool = False,
    note: str = "",
) -> LatticeReport:
    """Test order laws, orthomodularity and distributivity on a family.

    Pair laws (antisymmetry, orthomodularity) run over ordered pairs,
    distributivity over all triples with the symmetric pair ordered.
    Residuals are operator norms of the difference of the two sides.
    """
    mats = [p.matrix for p in props]
    n = len(mats)
    violations: list[LawViolation] = []

    def done() -> bool:
        return fail_fast and bool(violations)

    below = [[_leq_m(mats[i], mats[j], tol) for j in range(n)] for i in range(n)]

    pairs = 0
    meets: dict[tuple[int, int], np.ndarray] = {}
    joins: dict[tuple[int, int], np.ndarray] = {}
    for i in range(n):
        for j in range(i, n):
            meets[(i, j)] = meets[(j, i)] = _meet_m(mats[i], mats[j])
            joins[(i, j)] = joins[(j, i)] = _join_m(mats[i], mats[j])
            pairs += 1

    for i in range(n):
        if done():
            break
        for j in range(n):
            if i == j or done():
                continue
            if below[i][j] and below[j][i]:
                res = operator_norm(mats[i] - mats[j])
                if res > tol:
                    violations.append(LawViolation("antisymmetry", (i, j), res))
                    continue
            if below[i][j]:
                # orthomodularity: Q recovers as P or (Q and not P)
                rhs = _join_m(mats[i], _meet_m(mats[j], np.eye(mats[j].shape[0]) - mats[i]))
                res = operator_norm(mats[j] - rhs)
                if res > tol:
                    violations.append(LawViolation("orthomodularity", (i, j), res))

    for i, j, k in itertools.permutations(range(n), 3):
        if done():
            break
        if below[i][j] and below[j][k] and not below[i][k]:
            res = operator_norm(mats[i] @ mats[k] - mats[i])
            violations.append(LawViolation("transitivity", (i, j, k), res))

    triples = 0
    for i in range(n):
        if done():
            break
        for j in range(n):
            if done():
                break
            for k in range(j, n):
                triples += 1
                lhs = _meet_m(mats[i], joins[(j, k)])
                rhs = _join_m(meets[(i, j)], meets[(i, k)])
                res = operator_norm(lhs - rhs)
                if res > tol:
                    violations.append(LawViolation("distributivity-meet-over-join", (i, j, k), res))
                    if done():
                        break
                lhs = _join_m(mats[i], meets[(j, k)])
                rhs = _meet_m(joins[(i, j)], joins[(i, k)])
                res = operator_norm(lhs - rhs)
                if res > tol:
                    violations.append(LawViolation("distributivity-join-over-meet", (i, j, k), res))
                    if done():
                        break
    return LatticeReport(n, pairs, triples, tuple(violations), note)


# -- the classicality theorem, three ways ---------------------------------


@dataclass(frozen=True)
class ClassicalityVerdict:
    """Classicality decided by lattice, structure and algebra routes.

    The three routes are logically equivalent; `consistent` records that
    they actually agreed on this instance.
    """

    boolean_lattice: bool
    totally_disconnected: bool
    abelian_isotropy: bool
    abelian_algebra: bool
    report: LatticeReport
    witness: LawViolation | None
    propositions: tuple[Proposition, ...] = field(repr=False, default=())

    @property
    def structural(self) -> bool:
        return self.totally_disconnected and self.abelian_isotropy

    @property
    def consistent(self) -> bool:
        return self.boolean_lattice == self.structural == self.abelian_algebra

    @property
    def is_classical(self) -> bool:
        return self.boolean_lattice

    @property
    def pseudo_classical(self) -> bool:
        """Sharp outcomes but a non-commutative layer underneath."""
        return self.totally_disconnected and not self.abelian_isotropy

    def describe(self) -> str:
        lines = [
            f"boolean lattice:       {self.boolean_lattice}",
            f"totally disconnected:  {self.totally_disconnected}",
            f"abelian isotropy:      {self.abelian_isotropy}",
            f"abelian algebra:       {self.abelian_algebra}",
            f"routes consistent:     {self.consistent}",
            f"verdict:               {'classical' if self.is_classical else 'non-classical'}",
        ]
        if self.pseudo_classical:
            lines.append("note: pseudo-classical candidate (disconnected outcomes, non-abelian isotropy)")
        if self.witness is not None:
            lines.append("witness: " + self.witness.describe(self.propositions))
        lines.append("lattice: " + self.report.summary())
        return "\n".join(lines)


def classicality_verdict(
    g: Groupoid,
    samples: int = 5,
    seed: int = 42,
    rep: str = LEFT_REGULAR,
    tol: float = DEFAULT_TOL,
    fail_fast: bool = False,
) -> ClassicalityVerdict:
    """Decide classicality three independent ways and cross-check.

    Route one tests Boolean laws on the canonical proposition family;
    route two inspects connectivity and isotropy commutativity; route
    three measures commutators of the represented basis directly.
    """
    props = canonical_propositions(g, samples=samples, seed=seed, rep=rep)
    note = (
        f"canonical family: {g.n_objects} unit projections, "
        f"superposition projections for connecting transitions, {samples} random eigenprojections"
    )
    report = check_boolean(props, tol=tol, fail_fast=fail_fast, note=note)

    td = is_totally_disconnected(g)
    ab_iso = has_abelian_isotropy(g)

    images = [op.matrix for op in algebra_basis(g, rep)]
    comm_residual = 0.0
    for a, b in itertools.combinations(images, 2):
        comm_residual = max(comm_residual, operator_norm(a @ b - b @ a))
        if comm_residual > 1e-10:
            break
    abelian_alg = comm_residual <= 1e-10

    witness = report.violations[0] if report.violations else None
    return ClassicalityVerdict(
        boolean_lattice=report.is_boolean,
        totally_disconnected=td,
        abelian_isotropy=ab_iso,
        abelian_algebra=abelian_alg,
        report=report,
        witness=witness,
        propositions=tuple(props),
    )
