"""Concrete generating sets: the 6-qubit state, twisted double lattice
models, the 15-qubit Reed-Muller pair and 1-in-3-SAT encodings.

Lattice conventions (documented here once, used for every cocycle):

Vertices sit on a square grid with one diagonal per cell, giving the
triangular lattice: edges h(i,j): (i,j)-(i+1,j), v(i,j): (i,j)-(i,j+1),
d(i,j): (i,j)-(i+1,j+1).  Up triangles {h(i,j), v(i+1,j), d(i,j)} and down
triangles {v(i,j), h(i,j+1), d(i,j)} tile the plane.

Around a vertex s=(i,j) the twelve positions of the vertex term are

    1: h(i,j)    2: d(i,j)      3: v(i,j)     4: h(i-1,j)
    5: d(i-1,j-1) 6: v(i,j-1)   7: v(i+1,j)   8: h(i,j+1)
    9: d(i-1,j)  10: v(i-1,j-1) 11: h(i-1,j-1) 12: d(i,j-1)

so the six triangles touching s carry position pairs {1,2,7}, {2,3,8},
{3,4,9}, {4,5,10}, {5,6,11}, {6,1,12}.  Couplings between layers a and b
live on one ancilla per triangle holding x_first(a) + x_second(b), where
(first, second) is (v-edge, h-edge) on up triangles and (h-edge, v-edge)
on down triangles; this makes the three vertices of a triangle agree on
the ancilla's meaning.

A quadratic phase (-1)^{x_a x_b} becomes S^3_a S^3_b S_c with c the third
edge of the shared triangle (same layer, flat connection) or S^3_a S^3_b
S~ on the ancilla (different layers).  Vertex terms also flip any ancilla
whose defining pair they flip an odd number of times; the published
operator expressions omit these X factors, but without them the coupling
constraints are violated and the group contains -I.

Open boundaries keep the bulk operators only where their full twelve-edge
neighbourhood exists and pin everything else with Z-type stabilizers from
the orthogonal complement of the vertex masks (the completion used for
unique states).  Naive qubit-wise truncation of the published vertex
operators is provably inadmissible: the commutator supports of adjacent
truncated stars cannot all close into even cycles, so some double
commutator equals -I.  The pinned boundary keeps the vertex masks linearly
independent, which is exactly the mechanism that makes the boundary group
regular with a unique ground state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import xsgroup
from .xsgroup import GeneratingSet, XSOperator


def _operator(n: int, s: int = 0, xqubits=(), sexp: dict | None = None) -> XSOperator:
    a = 0
    for q in xqubits:
        a |= 1 << q
    b = [0] * n
    for q, e in (sexp or {}).items():
        b[q] = e % 4
    return XSOperator(n, s % 8, a, tuple(b))


def six_qubit() -> GeneratingSet:
    """The paper's 6-qubit state, with qubits 4-6 ordered to match the
    displayed ket (x1+x2, x2+x3, x3+x1); the displayed generator list uses
    the other ordering, so the last three tensor factors are permuted."""
    g1 = _operator(6, 0, [0, 3, 5], {1: 3, 2: 3, 4: 1})
    g2 = _operator(6, 0, [1, 3, 4], {0: 3, 2: 3, 5: 1})
    g3 = _operator(6, 0, [2, 4, 5], {0: 3, 1: 3, 3: 1})
    return GeneratingSet.make(6, [g1, g2, g3])


def sat_encode(clauses, nvars: int | None = None) -> GeneratingSet:
    """Positive 1-in-3-SAT instance as diagonal generators i^3 S S S.

    decide_existence on the result says YES exactly when some assignment
    satisfies one variable per clause.  Variables are 1-based.
    """
    clauses = [tuple(c) for c in clauses]
    maxvar = max((max(c) for c in clauses), default=1)
    n = maxvar if nvars is None else nvars
    if n < maxvar:
        raise ValueError("clause variable exceeds declared count")
    gens = []
    for c in clauses:
        if len(c) != 3 or len(set(c)) != 3 or min(c) < 1:
            raise ValueError(f"clause must have three distinct 1-based variables: {c}")
        gens.append(_operator(n, 6, [], {w - 1: 1 for w in c}))
    return GeneratingSet.make(n, gens)


# --- 15-qubit Reed-Muller code ---------------------------------------------

def _rm_evaluation_rows():
    """Evaluation vectors of x_i and x_i x_j on the nonzero points of Z2^4."""
    points = list(range(1, 16))
    deg1 = []
    for i in range(4):
        deg1.append([(p >> i) & 1 for p in points])
    deg2 = []
    for i, j in itertools.combinations(range(4), 2):
        deg2.append([((p >> i) & 1) & ((p >> j) & 1) for p in points])
    return deg1, deg2


def reed_muller_15() -> tuple:
    """(XS variant, Pauli variant) of the 15-qubit punctured RM code.

    Z generators come from the degree <= 2 monomial evaluations, X rows
    from the degree-1 evaluations; the XS variant dresses each X row with
    S on its support.  The weight-8 rows square to +I, so the phase that
    restores an eigenvalue 1 is alpha^0 for every generator.
    """
    deg1, deg2 = _rm_evaluation_rows()
    n = 15
    zgens = []
    for row in deg1 + deg2:
        zgens.append(_operator(n, 0, [], {q: 2 for q, v in enumerate(row) if v}))
    xs_gens = []
    x_gens = []
    for row in deg1:
        support = [q for q, v in enumerate(row) if v]
        phase = _minimal_plus_one_phase(n, support)
        xs_gens.append(_operator(n, phase, support, {q: 1 for q in support}))
        x_gens.append(_operator(n, 0, support, {}))
    return (
        GeneratingSet.make(n, xs_gens + zgens),
        GeneratingSet.make(n, x_gens + zgens),
    )


def _minimal_plus_one_phase(n: int, support) -> int:
    for s in range(8):
        if xsgroup.has_plus_one_eigenvalue(
            _operator(n, s, support, {q: 1 for q in support})
        ):
            return s
    raise AssertionError("no phase gives an eigenvalue 1")


# --- twisted quantum double lattices ----------------------------------------

@dataclass(frozen=True)
class Cocycle:
    """One generator of H^3(Z2^k): layers (i,), (i,j) or (i,j,k), 1-based."""

    layers: tuple

    def __post_init__(self) -> None:
        if not 1 <= len(self.layers) <= 3 or len(set(self.layers)) != len(self.layers):
            raise ValueError("cocycle takes 1-3 distinct layer indices")


@dataclass(frozen=True)
class LatticeSpec:
    lx: int
    ly: int
    torus: bool = True
    layers: int = 1
    cocycles: tuple = (Cocycle((1,)),)

    def __post_init__(self) -> None:
        if self.lx < 2 or self.ly < 2:
            raise ValueError("lattice needs at least 2x2 cells")
        for c in self.cocycles:
            if max(c.layers) > self.layers:
                raise ValueError("cocycle layer exceeds layer count")


class _Lattice:
    """Edge/triangle bookkeeping plus the qubit index map."""

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        lx, ly = spec.lx, spec.ly
        self.edges: list = []
        if spec.torus:
            for kind in "hvd":
                for j in range(ly):
                    for i in range(lx):
                        self.edges.append((kind, i, j))
        else:
            for j in range(ly + 1):
                for i in range(lx):
                    self.edges.append(("h", i, j))
            for j in range(ly):
                for i in range(lx + 1):
                    self.edges.append(("v", i, j))
            for j in range(ly):
                for i in range(lx):
                    self.edges.append(("d", i, j))
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.vertices = [
            (i, j)
            for j in range(ly if spec.torus else ly + 1)
            for i in range(lx if spec.torus else lx + 1)
        ]
        self.triangles: list = []
        for j in range(ly):
            for i in range(lx):
                up = ("u", i, j)
                down = ("d", i, j)
                if self._tri_edges(up) is not None:
                    self.triangles.append(up)
                if self._tri_edges(down) is not None:
                    self.triangles.append(down)

    def _wrap(self, edge):
        kind, i, j = edge
        if self.spec.torus:
            return (kind, i % self.spec.lx, j % self.spec.ly)
        return edge

    def edge_id(self, edge):
        return self.edge_index.get(self._wrap(edge))

    def _tri_edges(self, tri):
        """(h-edge, v-edge, d-edge) of a triangle, None if incomplete."""
        kind, i, j = tri
        if kind == "u":
            trio = (("h", i, j), ("v", i + 1, j), ("d", i, j))
        else:
            trio = (("h", i, j + 1), ("v", i, j), ("d", i, j))
        ids = tuple(self.edge_id(e) for e in trio)
        return None if any(x is None for x in ids) else trio

    def vertex_positions(self, v):
        """Position -> edge descriptor map (1..12) around a vertex."""
        i, j = v
        return {
            1: ("h", i, j), 2: ("d", i, j), 3: ("v", i, j), 4: ("h", i - 1, j),
            5: ("d", i - 1, j - 1), 6: ("v", i, j - 1), 7: ("v", i + 1, j),
            8: ("h", i, j + 1), 9: ("d", i - 1, j), 10: ("v", i - 1, j - 1),
            11: ("h", i - 1, j - 1), 12: ("d", i, j - 1),
        }

    # triangles touching a vertex, keyed by their position pair
    VERTEX_TRIANGLES = {
        (1, 2, 7): "u+0+0", (2, 3, 8): "d+0+0", (3, 4, 9): "u-1+0",
        (4, 5, 10): "d-1-1", (5, 6, 11): "u-1-1", (6, 1, 12): "d+0-1",
    }

    def triangle_at(self, v, positions):
        i, j = v
        code = self.VERTEX_TRIANGLES[positions]
        kind = code[0]
        di = int(code[1:3])
        dj = int(code[3:5])
        tri = (kind, i + di, j + dj)
        kind_, ti, tj = tri
        if self.spec.torus:
            tri = (kind_, ti % self.spec.lx, tj % self.spec.ly)
        return tri if self._tri_edges(tri) is not None else None

    def triangle_for_pair(self, v, pa, pb):
        for positions in self.VERTEX_TRIANGLES:
            if pa in positions and pb in positions:
                return self.triangle_at(v, positions), positions
        raise ValueError(f"positions {pa},{pb} share no triangle")


class _ModelBuilder:
    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        self.lat = _Lattice(spec)
        self.k = spec.layers
        self.nedges = len(self.lat.edges)
        # ancilla layer pairs needed by the cocycle list
        pairs = []
        for c in spec.cocycles:
            L = c.layers
            if len(L) == 2:
                pairs.append((L[0], L[1]))
            elif len(L) == 3:
                pairs.append((L[0], L[1]))
                pairs.append((L[0], L[2]))
                pairs.append((L[1], L[2]))
        self.ancilla_pairs = sorted(set(pairs))
        complete = [t for t in self.lat.triangles if self.lat._tri_edges(t) is not None]
        self.ancillas = {}
        base = self.k * self.nedges
        for t in complete:
            for pr in self.ancilla_pairs:
                self.ancillas[(t, pr)] = base + len(self.ancillas)
        self.n = base + len(self.ancillas)

    def edge_qubit(self, edge, layer: int):
        eid = self.lat.edge_id(edge)
        if eid is None:
            return None
        return (layer - 1) * self.nedges + eid

    def ancilla_pair_edges(self, tri):
        """(first, second) edges of a triangle's ancilla definition."""
        trio = self.lat._tri_edges(tri)
        h_edge, v_edge, _ = trio
        return (v_edge, h_edge) if tri[0] == "u" else (h_edge, v_edge)

    def coupler_gens(self):
        """Z-type stabilizers: flat triangles per layer + ancilla couplings."""
        gens = []
        for t in self.lat.triangles:
            trio = self.lat._tri_edges(t)
            for layer in range(1, self.k + 1):
                qs = [self.edge_qubit(e, layer) for e in trio]
                gens.append(_operator(self.n, 0, [], {q: 2 for q in qs}))
        for (t, (la, lb)), anc in sorted(self.ancillas.items(), key=lambda kv: kv[1]):
            first, second = self.ancilla_pair_edges(t)
            qa = self.edge_qubit(first, la)
            qb = self.edge_qubit(second, lb)
            gens.append(_operator(self.n, 0, [], {anc: 2, qa: 2, qb: 2}))
        return gens

    def has_full_neighbourhood(self, v) -> bool:
        pos = self.lat.vertex_positions(v)
        if any(self.lat.edge_id(pos[p]) is None for p in range(1, 13)):
            return False
        return all(
            self.lat.triangle_at(v, positions) is not None
            for positions in self.lat.VERTEX_TRIANGLES
        )

    def vertex_gen(self, v, layer: int):
        """The vertex term flipping `layer`, dressed by every cocycle."""
        pos = self.lat.vertex_positions(v)
        flip_edges = []
        for p in (1, 2, 3, 4, 5, 6):
            q = self.edge_qubit(pos[p], layer)
            if q is not None:
                flip_edges.append(q)
        if not flip_edges:
            return None
        op = _operator(self.n, 0, flip_edges, {})
        # ancilla consistency: flip any ancilla whose pair flips oddly
        for (t, (la, lb)), anc in self.ancillas.items():
            first, second = self.ancilla_pair_edges(t)
            flips = 0
            if la == layer and self.edge_qubit(first, la) in flip_edges:
                flips ^= 1
            if lb == layer and self.edge_qubit(second, lb) in flip_edges:
                flips ^= 1
            if flips:
                op = xsgroup.multiply(op, _operator(self.n, 0, [anc], {}))
        for c in self.spec.cocycles:
            dressing = self._cocycle_dressing(v, pos, layer, c)
            if dressing is not None:
                op = xsgroup.multiply(op, dressing)
        return op

    def _cocycle_dressing(self, v, pos, layer: int, c: Cocycle):
        L = c.layers
        if len(L) == 1:
            if layer != L[0]:
                return None
            return self._semion_dressing(pos, L[0])
        if len(L) == 2:
            i, j = L
            if layer == i:
                return self._pair_product(v, pos, [((4, j), (10, j)), ((6, j), (11, j))])
            if layer == j:
                gadgets = [((1, i), (6, j)), ((3, i), (4, j)), ((7, i), (1, j)), ((8, i), (3, j))]
                zpart = self._linear_z(pos, [(7, i), (8, i)])
                prod = self._pair_product(v, pos, gadgets)
                return prod if zpart is None else xsgroup.multiply(prod, zpart)
            return None
        i, j, k = L
        if layer == i:
            return self._pair_product(v, pos, [((4, j), (10, k)), ((6, j), (11, k))])
        if layer == j:
            return self._pair_product(v, pos, [((1, i), (6, k)), ((3, i), (4, k))])
        if layer == k:
            return self._pair_product(v, pos, [((7, i), (1, j)), ((8, i), (3, j))])
        return None

    def _semion_dressing(self, pos, layer: int):
        """Z on incident, S on surrounding edges: the symmetric form."""
        sexp = {}
        for p in (1, 2, 3, 4, 5, 6):
            q = self.edge_qubit(pos[p], layer)
            if q is not None:
                sexp[q] = 2
        for p in (7, 8, 9, 10, 11, 12):
            q = self.edge_qubit(pos[p], layer)
            if q is not None:
                sexp[q] = sexp.get(q, 0) + 1
        return _operator(self.n, 0, [], sexp)

    def _pair_product(self, v, pos, gadget_list):
        op = _operator(self.n, 0, [], {})
        for (pa, la), (pb, lb) in gadget_list:
            g = self._pair_gadget(v, pos, pa, la, pb, lb)
            if g is not None:
                op = xsgroup.multiply(op, g)
        return op

    def _pair_gadget(self, v, pos, pa, la, pb, lb):
        """(-1)^{x_(pa,la) x_(pb,lb)} on the constrained subspace."""
        tri, _ = self.lat.triangle_for_pair(v, pa, pb)
        if tri is None:
            return None  # incomplete triangle: gadget dropped at the boundary
        qa = self.edge_qubit(pos[pa], la)
        qb = self.edge_qubit(pos[pb], lb)
        sexp = {qa: 3, qb: 3}
        if la == lb:
            trio = self.lat._tri_edges(tri)
            third = next(e for e in trio if self._wrapped(e) not in
                         (self._wrapped(pos[pa]), self._wrapped(pos[pb])))
            qc = self.edge_qubit(third, la)
            sexp[qc] = sexp.get(qc, 0) + 1
        else:
            first, second = self.ancilla_pair_edges(tri)
            assert self._wrapped(first) == self._wrapped(pos[pa])
            assert self._wrapped(second) == self._wrapped(pos[pb])
            anc = self.ancillas[(tri, (la, lb))]
            sexp[anc] = 1
        return _operator(self.n, 0, [], sexp)

    def _linear_z(self, pos, targets):
        sexp = {}
        for p, layer in targets:
            q = self.edge_qubit(pos[p], layer)
            if q is not None:
                sexp[q] = sexp.get(q, 0) + 2
        return _operator(self.n, 0, [], sexp) if sexp else None

    def _wrapped(self, edge):
        return self.lat._wrap(edge)

    def build(self) -> GeneratingSet:
        gens = []
        for v in self.lat.vertices:
            if not self.spec.torus and not self.has_full_neighbourhood(v):
                continue
            for layer in range(1, self.k + 1):
                g = self.vertex_gen(v, layer)
                if g is not None and not g.is_identity:
                    gens.append(g)
        gens.extend(self.coupler_gens())
        return GeneratingSet.make(self.n, gens)


def tqd(spec: LatticeSpec) -> GeneratingSet:
    """Twisted quantum double model for Z2^layers with the given cocycles.

    On a torus the generating set is the published bulk family.  With open
    boundary the interior operators are completed by boundary-pinning
    Z-type stabilizers (see the module docstring), which leaves a regular
    group with a unique stabilized state.
    """
    builder = _ModelBuilder(spec)
    S = builder.build()
    if spec.torus:
        return S
    from . import codespace

    return codespace.complete_to_state(S)


def doubled_semion(lx: int, ly: int, torus: bool = True) -> GeneratingSet:
    return tqd(LatticeSpec(lx, ly, torus=torus, layers=1, cocycles=(Cocycle((1,)),)))


def vertex_generators(spec: LatticeSpec) -> list:
    """Vertex terms only (for product-relation checks)."""
    b = _ModelBuilder(spec)
    out = []
    for v in b.lat.vertices:
        for layer in range(1, b.k + 1):
            g = b.vertex_gen(v, layer)
            if g is not None and not g.is_identity:
                out.append((v, layer, g))
    return out
