"""Finite groupoids with explicit composition tables.

A groupoid here is a finite set of objects (outcomes) together with a
finite set of transitions between them.  Objects and transitions are
indexed by dense integers; every structural map (source, target, unit,
inverse, composition) is stored as an explicit table, so validation can
point at the exact tuple that breaks an axiom.

The composition convention is the function-like one: ``compose(a, b)``
means "b first, then a" and is defined exactly when ``source(a) ==
target(b)``.  The composite runs ``source(b) -> target(a)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Transition",
    "Violation",
    "ValidationReport",
    "Groupoid",
    "OrbitDecomposition",
    "validate",
    "orbit_decomposition",
    "is_totally_disconnected",
    "has_abelian_isotropy",
    "pair_groupoid",
    "group_groupoid",
    "cyclic_group",
    "symmetric_group",
    "discrete_groupoid",
    "disjoint_union",
    "direct_product",
]


@dataclass(frozen=True)
class Transition:
    """An arrow between two objects, identified by a dense integer id."""

    id: int
    source: int
    target: int

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class Violation:
    """One broken axiom, naming the offending objects or transitions."""

    kind: str
    subject: tuple
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self) -> str:
        if self.is_valid:
            return "valid groupoid"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


class Groupoid:
    """A finite groupoid backed by explicit tables.

    Instances are immutable by convention: no method mutates the tables
    after construction, so a groupoid may be shared freely across
    threads.  The constructor only checks that indices are in range;
    whether the tables actually satisfy the groupoid axioms is the job
    of :func:`validate`, which reports violations instead of raising.

    Structural equality compares the full tables (labels included).
    """

    def __init__(
        self,
        object_labels: Sequence[str],
        source: Sequence[int],
        target: Sequence[int],
        unit_of: Mapping[int, int] | Sequence[int],
        inverse: Sequence[int],
        composition: Mapping[tuple[int, int], int],
        factors: tuple["Groupoid", "Groupoid"] | None = None,
    ):
        self.object_labels = tuple(str(x) for x in object_labels)
        self.source = tuple(int(s) for s in source)
        self.target = tuple(int(t) for t in target)
        if len(self.source) != len(self.target):
            raise ValueError("source and target tables differ in length")
        n_obj = len(self.object_labels)
        n_tr = len(self.source)
        for s, t in zip(self.source, self.target):
            if not (0 <= s < n_obj and 0 <= t < n_obj):
                raise ValueError(f"transition endpoint out of range: ({s}, {t})")
        if isinstance(unit_of, Mapping):
            self.unit_of = {int(k): int(v) for k, v in unit_of.items()}
        else:
            self.unit_of = {x: int(u) for x, u in enumerate(unit_of)}
        for x, u in self.unit_of.items():
            if not (0 <= x < n_obj and 0 <= u < n_tr):
                raise ValueError(f"unit table entry out of range: {x} -> {u}")
        self.inverse_table = tuple(int(i) for i in inverse)
        if len(self.inverse_table) != n_tr:
            raise ValueError("inverse table length does not match transition count")
        for a, b in enumerate(self.inverse_table):
            if not 0 <= b < n_tr:
                raise ValueError(f"inverse of {a} out of range: {b}")
        self.composition = {}
        for (a, b), c in composition.items():
            a, b, c = int(a), int(b), int(c)
            if not (0 <= a < n_tr and 0 <= b < n_tr and 0 <= c < n_tr):
                raise ValueError(f"composition entry out of range: ({a}, {b}) -> {c}")
            self.composition[(a, b)] = c
        # provenance for direct products; lets block analyses recover the factors
        self.factors = factors

        into: list[list[int]] = [[] for _ in range(n_obj)]
        out_of: list[list[int]] = [[] for _ in range(n_obj)]
        for i in range(n_tr):
            into[self.target[i]].append(i)
            out_of[self.source[i]].append(i)
        self._into = tuple(tuple(v) for v in into)
        self._out_of = tuple(tuple(v) for v in out_of)

    # -- basic accessors ------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.object_labels)

    @property
    def n_transitions(self) -> int:
        return len(self.source)

    def label(self, x: int) -> str:
        return self.object_labels[x]

    def transition(self, i: int) -> Transition:
        return Transition(i, self.source[i], self.target[i])

    def transitions(self) -> Iterator[Transition]:
        for i in range(self.n_transitions):
            yield self.transition(i)

    def unit(self, x: int) -> int:
        return self.unit_of[x]

    def is_unit(self, i: int) -> bool:
        return self.unit_of.get(self.source[i]) == i and self.source[i] == self.target[i]

    def inverse(self, i: int) -> int:
        return self.inverse_table[i]

    def composable(self, first: int, second: int) -> bool:
        """True when ``first`` can run after ``second``."""
        return self.source[first] == self.target[second]

    def compose(self, first: int, second: int) -> int:
        """Composite of ``second`` followed by ``first``."""
        if not self.composable(first, second):
            raise ValueError(
                f"transitions not composable: source({first})={self.source[first]} "
                f"!= target({second})={self.target[second]}"
            )
        try:
            return self.composition[(first, second)]
        except KeyError:
            raise ValueError(f"composition table has no entry for ({first}, {second})") from None

    def _check_object(self, x: int) -> int:
        if not 0 <= x < self.n_objects:
            raise ValueError(f"object index {x} out of range")
        return x

    def transitions_into(self, y: int) -> tuple[int, ...]:
        return self._into[self._check_object(y)]

    def transitions_out_of(self, x: int) -> tuple[int, ...]:
        return self._out_of[self._check_object(x)]

    def loops_at(self, x: int) -> tuple[int, ...]:
        return tuple(i for i in self.transitions_out_of(x) if self.target[i] == x)

    def transitions_between(self, x: int, y: int) -> tuple[int, ...]:
        self._check_object(y)
        return tuple(i for i in self.transitions_out_of(x) if self.target[i] == y)

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (
            self.object_labels == other.object_labels
            and self.source == other.source
            and self.target == other.target
            and self.unit_of == other.unit_of
            and self.inverse_table == other.inverse_table
            and self.composition == other.composition
        )

    def __repr__(self) -> str:
        return f"Groupoid(objects={self.n_objects}, transitions={self.n_transitions})"


# -- validation ---------------------------------------------------------


def validate(g: Groupoid) -> ValidationReport:
    """Check every groupoid axiom, returning all violations found.

    Distinct failure modes get distinct violation kinds so callers (and
    the command line front end) can report precisely what is broken.
    """
    out: list[Violation] = []

    if g.n_objects == 0:
        out.append(Violation("empty-groupoid", (), "a groupoid needs at least one object"))
        return ValidationReport(tuple(out))

    for x in range(g.n_objects):
        u = g.unit_of.get(x)
        if u is None:
            out.append(Violation("missing-unit", (x,), f"object {g.label(x)} has no unit"))
        elif g.source[u] != x or g.target[u] != x:
            out.append(
                Violation(
                    "bad-unit",
                    (x, u),
                    f"declared unit {u} runs {g.source[u]} -> {g.target[u]}, not a loop at {x}",
                )
            )
    seen_units: dict[int, int] = {}
    for x in sorted(g.unit_of):
        u = g.unit_of[x]
        if u in seen_units:
            out.append(
                Violation("duplicate-unit", (seen_units[u], x, u), f"transition {u} is the unit of two objects")
            )
        seen_units[u] = x

    if len(set(g.inverse_table)) != g.n_transitions:
        counts: dict[int, list[int]] = {}
        for a, b in enumerate(g.inverse_table):
            counts.setdefault(b, []).append(a)
        for b, pre in counts.items():
            if len(pre) > 1:
                out.append(
                    Violation("non-bijective-inverse", tuple(pre), f"transitions {pre} share the inverse {b}")
                )
    for a in range(g.n_transitions):
        b = g.inverse_table[a]
        if g.source[b] != g.target[a] or g.target[b] != g.source[a]:
            out.append(
                Violation(
                    "bad-inverse-endpoints",
                    (a, b),
                    f"inverse of {g.source[a]}->{g.target[a]} must run {g.target[a]}->{g.source[a]}",
                )
            )

    composable_pairs = [
        (a, b)
        for a in range(g.n_transitions)
        for b in g.transitions_into(g.source[a])
    ]
    for a, b in composable_pairs:
        if (a, b) not in g.composition:
            out.append(Violation("missing-composition", (a, b), "composable pair has no table entry"))
    for (a, b), c in sorted(g.composition.items()):
        if g.source[a] != g.target[b]:
            out.append(
                Violation(
                    "spurious-composition",
                    (a, b),
                    f"pair is not composable: source({a})={g.source[a]} != target({b})={g.target[b]}",
                )
            )
        elif g.source[c] != g.source[b] or g.target[c] != g.target[a]:
            out.append(
                Violation(
                    "bad-composite-endpoints",
                    (a, b, c),
                    f"composite must run {g.source[b]} -> {g.target[a]}, got {g.source[c]} -> {g.target[c]}",
                )
            )

    def comp(a: int, b: int) -> int | None:
        return g.composition.get((a, b))

    for a in range(g.n_transitions):
        ut = g.unit_of.get(g.target[a])
        us = g.unit_of.get(g.source[a])
        if ut is not None and comp(ut, a) not in (None, a):
            out.append(Violation("unit-law", (ut, a), f"unit at target absorbs {a} incorrectly"))
        if us is not None and comp(a, us) not in (None, a):
            out.append(Violation("unit-law", (a, us), f"unit at source absorbs {a} incorrectly"))

    for a in range(g.n_transitions):
        b = g.inverse_table[a]
        us = g.unit_of.get(g.source[a])
        ut = g.unit_of.get(g.target[a])
        if g.source[b] == g.target[a]:  # endpoints already reported otherwise
            if us is not None and comp(b, a) not in (None, us):
                out.append(Violation("inverse-law", (a,), f"inverse({a}) after {a} is not the unit at source"))
            if ut is not None and comp(a, b) not in (None, ut):
                out.append(Violation("inverse-law", (a,), f"{a} after inverse({a}) is not the unit at target"))

    for b in range(g.n_transitions):
        firsts = g.transitions_out_of(g.target[b])
        seconds = g.transitions_into(g.source[b])
        for a in firsts:
            ab = comp(a, b)
            if ab is None:
                continue
            for c in seconds:
                bc = comp(b, c)
                ab_c = comp(ab, c)
                a_bc = comp(a, bc) if bc is not None else None
                if ab_c is None or a_bc is None:
                    continue
                if ab_c != a_bc:
                    out.append(
                        Violation(
                            "associativity",
                            (a, b, c),
                            f"(({a};{b});{c})={ab_c} but ({a};({b};{c}))={a_bc}",
                        )
                    )
    return ValidationReport(tuple(out))


# -- connectivity and isotropy -----------------------------------------


@dataclass(frozen=True)
class OrbitDecomposition:
    """Partition of the objects into orbits, plus per-object loop groups."""

    orbits: tuple[tuple[int, ...], ...]
    isotropy: tuple[tuple[int, ...], ...]

    @property
    def n_orbits(self) -> int:
        return len(self.orbits)


def orbit_decomposition(g: Groupoid) -> OrbitDecomposition:
    parent = list(range(g.n_objects))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(g.n_transitions):
        a, b = find(g.source[i]), find(g.target[i])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(g.n_objects):
        groups.setdefault(find(x), []).append(x)
    orbits = tuple(tuple(groups[r]) for r in sorted(groups))
    isotropy = tuple(g.loops_at(x) for x in range(g.n_objects))
    return OrbitDecomposition(orbits, isotropy)


def is_totally_disconnected(g: Groupoid) -> bool:
    """True when every transition is a loop (all orbits are singletons)."""
    return all(g.source[i] == g.target[i] for i in range(g.n_transitions))


def has_abelian_isotropy(g: Groupoid) -> bool:
    """True when every object's loop group is commutative."""
    for x in range(g.n_objects):
        loops = g.loops_at(x)
        for a, b in itertools.combinations(loops, 2):
            if g.compose(a, b) != g.compose(b, a):
                return False
    return True


# -- generators ---------------------------------------------------------


def pair_groupoid(n: int, labels: Sequence[str] | None = None) -> Groupoid:
    """The groupoid with exactly one transition between any two of n objects."""
    if n < 1:
        raise ValueError("pair groupoid needs at least one object")
    if labels is None:
        labels = [str(x) for x in range(n)]
    elif len(labels) != n:
        raise ValueError("label count does not match object count")

    def tid(x: int, y: int) -> int:
        return x * n + y

    source = [x for x in range(n) for _ in range(n)]
    target = [y for _ in range(n) for y in range(n)]
    unit_of = [tid(x, x) for x in range(n)]
    inverse = [0] * (n * n)
    comp: dict[tuple[int, int], int] = {}
    for x in range(n):
        for y in range(n):
            inverse[tid(x, y)] = tid(y, x)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                comp[(tid(y, z), tid(x, y))] = tid(x, z)
    return Groupoid(labels, source, target, unit_of, inverse, comp)


def _check_group_table(table: Sequence[Sequence[int]]) -> tuple[int, list[int]]:
    """Return (identity index, inverse list) or raise on a non-group table."""
    n = len(table)
    if n == 0:
        raise ValueError("empty multiplication table")
    for row in table:
        if len(row) != n or sorted(row) != list(range(n)):
            raise ValueError("multiplication table rows must be permutations of 0..n-1")
    for j in range(n):
        if sorted(table[i][j] for i in range(n)) != list(range(n)):
            raise ValueError("multiplication table columns must be permutations of 0..n-1")
    identity = None
    for e in range(n):
        if all(table[e][j] == j and table[j][e] == j for j in range(n)):
            identity = e
            break
    if identity is None:
        raise ValueError("multiplication table has no identity element")
    inv = [-1] * n
    for a in range(n):
        for b in range(n):
            if table[a][b] == identity and table[b][a] == identity:
                inv[a] = b
                break
        if inv[a] < 0:
            raise ValueError(f"element {a} has no two-sided inverse")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise ValueError(f"multiplication table is not associative at ({a}, {b}, {c})")
    return identity, inv


def group_groupoid(table: Sequence[Sequence[int]], object_label: str = "*") -> Groupoid:
    """A one-object groupoid whose loops multiply by the given group table.

    ``table[i][j]`` is the index of the product "j first, then i", which
    matches the composition convention used everywhere else.
    """
    identity, inv = _check_group_table(table)
    n = len(table)
    comp = {(i, j): table[i][j] for i in range(n) for j in range(n)}
    return Groupoid([object_label], [0] * n, [0] * n, [identity], inv, comp)


def cyclic_group(n: int, object_label: str = "*") -> Groupoid:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return group_groupoid(table, object_label)


def symmetric_group(n: int, object_label: str = "*") -> Groupoid:
    """All permutations of n points as a one-object groupoid (n small)."""
    if not 1 <= n <= 6:
        raise ValueError("symmetric group generator supports 1 <= n <= 6")
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(p[q[k]] for k in range(n))] for q in perms]
        for p in perms
    ]
    return group_groupoid(table, object_label)


def discrete_groupoid(objects: int | Sequence[str]) -> Groupoid:
    """Totally disconnected groupoid with trivial isotropy (units only)."""
    labels = [str(x) for x in range(objects)] if isinstance(objects, int) else list(objects)
    if not labels:
        raise ValueError("discrete groupoid needs at least one object")
    n = len(labels)
    comp = {(x, x): x for x in range(n)}
    return Groupoid(labels, list(range(n)), list(range(n)), list(range(n)), list(range(n)), comp)


def disjoint_union(parts: Iterable[Groupoid]) -> Groupoid:
    """Side-by-side union; no transitions connect different parts."""
    parts = list(parts)
    if not parts:
        raise ValueError("disjoint union needs at least one part")
    all_labels = [lab for p in parts for lab in p.object_labels]
    dedupe = len(set(all_labels)) < len(all_labels)
    labels: list[str] = []
    source: list[int] = []
    target: list[int] = []
    unit_of: list[int] = []
    inverse: list[int] = []
    comp: dict[tuple[int, int], int] = {}
    for k, p in enumerate(parts):
        obj_off, tr_off = len(labels), len(source)
        labels += [f"{k}:{lab}" if dedupe else lab for lab in p.object_labels]
        source += [s + obj_off for s in p.source]
        target += [t + obj_off for t in p.target]
        unit_of += [p.unit_of[x] + tr_off for x in range(p.n_objects)]
        inverse += [b + tr_off for b in p.inverse_table]
        for (a, b), c in p.composition.items():
            comp[(a + tr_off, b + tr_off)] = c + tr_off
    return Groupoid(labels, source, target, unit_of, inverse, comp)


def direct_product(a: Groupoid, b: Groupoid) -> Groupoid:
    """Componentwise product groupoid; records its factors for later block analyses."""
    nb_obj, nb_tr = b.n_objects, b.n_transitions

    def oid(x: int, y: int) -> int:
        return x * nb_obj + y

    def tid(s: int, t: int) -> int:
        return s * nb_tr + t

    labels = [
        f"({la},{lb})" for la in a.object_labels for lb in b.object_labels
    ]
    source = [oid(a.source[i], b.source[j]) for i in range(a.n_transitions) for j in range(nb_tr)]
    target = [oid(a.target[i], b.target[j]) for i in range(a.n_transitions) for j in range(nb_tr)]
    unit_of = [tid(a.unit_of[x], b.unit_of[y]) for x in range(a.n_objects) for y in range(nb_obj)]
    inverse = [tid(a.inverse_table[i], b.inverse_table[j]) for i in range(a.n_transitions) for j in range(nb_tr)]
    comp: dict[tuple[int, int], int] = {}
    for (i1, i2), i3 in a.composition.items():
        for (j1, j2), j3 in b.composition.items():
            comp[(tid(i1, j1), tid(i2, j2))] = tid(i3, j3)
    return Groupoid(labels, source, target, unit_of, inverse, comp, factors=(a, b))
