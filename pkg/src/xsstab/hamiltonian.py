"""Commuting parent Hamiltonians whose ground space is the stabilized code.

Terms stay symbolic: a gauge term is I - P_Z for one commutator or square,
a generator term is I - (prod of guard projectors) P_g.  In the global
variant every generator term is guarded by the full commutator/square set;
the local variant guards each generator only with its own square and the
commutators against overlapping neighbours, which keeps term supports
inside a neighbourhood while preserving commutation and the ground space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle, xsgroup
from .xsgroup import GeneratingSet, XSOperator, ZTypeOperator


@dataclass(frozen=True)
class ProjectorTerm:
    """Either I - P_Z (gauge) or I - (prod_k P_{Z_k}) P_g (generator)."""

    gauge: ZTypeOperator | None
    generator: XSOperator | None
    guard: tuple  # ZTypeOperator guard list, generator terms only

    @classmethod
    def gauge_term(cls, z: ZTypeOperator) -> "ProjectorTerm":
        return cls(z, None, ())

    @classmethod
    def generator_term(cls, g: XSOperator, guard) -> "ProjectorTerm":
        return cls(None, g, tuple(guard))

    @property
    def is_gauge(self) -> bool:
        return self.gauge is not None

    def support(self) -> int:
        if self.is_gauge:
            return self.gauge.zmask
        mask = self.generator.support()
        for z in self.guard:
            mask |= z.zmask
        return mask

    def dense(self) -> np.ndarray:
        """Expansion as a matrix; oracle-scale sizes only."""
        if self.is_gauge:
            op = self.gauge.to_operator()
            n = op.n
            eye = np.eye(1 << n)
            return eye - 0.5 * (eye + oracle.matrix(op))
        n = self.generator.n
        eye = np.eye(1 << n)
        proj = 0.5 * (eye + oracle.matrix(self.generator))
        for z in self.guard:
            proj = 0.5 * (eye + oracle.matrix(z.to_operator())) @ proj
        return eye - proj


@dataclass(frozen=True)
class HamiltonianSpec:
    n: int
    terms: tuple
    local: bool

    def dense(self) -> np.ndarray:
        total = np.zeros((1 << self.n, 1 << self.n), dtype=complex)
        for term in self.terms:
            total += term.dense()
        return total


def _gauge_elements(S: GeneratingSet) -> list:
    ok, cond = xsgroup.is_admissible(S)
    if not ok:
        raise ValueError(f"generating set violates admissibility condition {cond}")
    elems = xsgroup.commutator_set(S) + xsgroup.square_set(S)
    out = []
    seen = set()
    for e in xsgroup._distinct_nontrivial(elems):
        z = ZTypeOperator.from_operator(e)
        key = (z.sign, z.zmask)
        if key not in seen:
            seen.add(key)
            out.append(z)
    return out


def build(S: GeneratingSet) -> HamiltonianSpec:
    """Global variant: every generator guarded by all commutators and squares."""
    gauge = _gauge_elements(S)
    terms = [ProjectorTerm.gauge_term(z) for z in gauge]
    for g in S.gens:
        terms.append(ProjectorTerm.generator_term(g, gauge))
    return HamiltonianSpec(S.n, tuple(terms), local=False)


def build_local(S: GeneratingSet, supports=None) -> HamiltonianSpec:
    """Locality-preserving variant.

    supports[j] defaults to the qubits touched by g_j.  Generator j is
    guarded by its own square and by the commutators with every neighbour
    (support overlap, j included); gauge terms are kept for the full
    commutator/square set so the ground space is unchanged.
    """
    ok, cond = xsgroup.is_admissible(S)
    if not ok:
        raise ValueError(f"generating set violates admissibility condition {cond}")
    if supports is None:
        masks = [g.support() for g in S.gens]
    else:
        masks = []
        for spec in supports:
            masks.append(sum(1 << q for q in spec))
        if len(masks) != len(S.gens):
            raise ValueError("one support per generator required")
    gauge = _gauge_elements(S)
    terms = [ProjectorTerm.gauge_term(z) for z in gauge]
    for j, g in enumerate(S.gens):
        guard = {}
        sq = xsgroup.square(g)
        if not sq.is_identity:
            z = ZTypeOperator.from_operator(sq)
            guard[(z.sign, z.zmask)] = z
        for k, h in enumerate(S.gens):
            if k == j or not (masks[j] & masks[k]):
                continue
            c = xsgroup.commutator(g, h)
            if not c.is_identity:
                z = ZTypeOperator.from_operator(c)
                guard[(z.sign, z.zmask)] = z
        terms.append(ProjectorTerm.generator_term(g, tuple(guard.values())))
    return HamiltonianSpec(S.n, tuple(terms), local=True)


def format_terms(spec: HamiltonianSpec) -> str:
    """One line per term: `GAUGE sign zmask` or `GEN <gen> GUARD <z lines>`."""
    lines = []
    for term in spec.terms:
        if term.is_gauge:
            z = term.gauge
            zbits = "".join(str((z.zmask >> j) & 1) for j in range(z.n))
            lines.append(f"GAUGE {'-' if z.sign else '+'} {zbits}")
        else:
            parts = [f"GEN {term.generator} GUARD {len(term.guard)}"]
            for z in term.guard:
                zbits = "".join(str((z.zmask >> j) & 1) for j in range(z.n))
                parts.append(f"  {'-' if z.sign else '+'} {zbits}")
            lines.extend(parts)
    return "\n".join(lines) + "\n"
