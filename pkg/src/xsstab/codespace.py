"""Structure of the stabilized space: degeneracy, basis states, completion,
the amplitude characterization and regularization of state groups.

All structural data lives in the normal-form qubit frame; CodeStructure
keeps the permutation so callers can translate back to the input labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2, oracle, xsgroup
from .gf2 import AffineSpace, BitMatrix, BitVector
from .phasepoly import PhasePolynomial
from .xsgroup import GeneratingSet, NormalForm, XSOperator, ZTypeOperator


class NoStabilizedState(ValueError):
    """Raised when a group stabilizes nothing; carries the NO certificate."""


_ORBIT_ENUM_LIMIT = 22


def inverse_permutation(perm) -> tuple:
    inv = [0] * len(perm)
    for i, q in enumerate(perm):
        inv[q] = i
    return tuple(inv)


@dataclass(frozen=True)
class CodeStructure:
    """Everything analyze() derives from a generating set.

    t, W, mu_list, lambda_list and the spaces V, V_D refer to the permuted
    frame of `nf`; `nf.perm[i]` is the input qubit sitting at position i.
    V_D is None exactly when the group is not regular (the fixed strings
    then form a union of cosets, found by orbit enumeration instead).
    """

    source: GeneratingSet
    nf: NormalForm
    regular: bool
    V: AffineSpace
    V_D: AffineSpace | None
    lambda_list: tuple  # coset representatives, permuted frame bit masks
    mu_list: tuple  # n-t bit masks, one per basis state

    @property
    def t(self) -> int:
        return self.nf.t

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def W(self) -> BitMatrix:
        return self.nf.W

    @property
    def d(self) -> int:
        return len(self.lambda_list)

    def w_apply(self, x: int) -> int:
        """(n-t)-bit image W x of a t-bit mask."""
        out = 0
        for r, row in enumerate(self.W.rows):
            if gf2.dot(row, x):
                out |= 1 << r
        return out

    def support_index(self, x: int, mu: int) -> int:
        """Permuted-frame basis index of |x, Wx + mu>."""
        return x | ((self.w_apply(x) ^ mu) << self.t)


def _diag_constraint_rows(diag_gens, n):
    rows, rhs = [], []
    for d in diag_gens:
        if d.is_identity:
            continue
        if any(v % 2 for v in d.b) or d.s % 4:
            raise ValueError("constraint rows exist only for Z-type generators")
        rows.append(sum(1 << j for j, v in enumerate(d.b) if v == 2))
        rhs.append((d.s // 4) % 2)
    return rows, rhs


def _enumerate_orbit_representatives(nf: NormalForm, V: AffineSpace, n: int) -> list:
    """Canonical coset representatives of the fixed strings, non-regular path."""
    if n > _ORBIT_ENUM_LIMIT:
        raise ValueError(f"orbit enumeration refused at n={n}")
    constraints = [(d.s, d.b) for d in nf.diagonal_gens if not d.is_identity]
    idx = np.arange(1 << n, dtype=np.int64)
    good = np.ones(1 << n, dtype=bool)
    for s, b in constraints:
        exp = np.full(1 << n, s, dtype=np.int64)
        for q, bq in enumerate(b):
            if bq:
                exp += 2 * bq * ((idx >> q) & 1)
        good &= (exp % 8) == 0
    reps = set()
    for z in np.nonzero(good)[0]:
        x = int(z)
        for bvec in V.basis:
            if x & (bvec & -bvec):
                x ^= bvec
        reps.add(x)
    return sorted(reps)


def analyze(S: GeneratingSet) -> CodeStructure:
    """Normal form, degeneracy and the coset data of the stabilized space."""
    witness = xsgroup.decide_existence(S)
    if witness is None:
        ok, cond = xsgroup.is_admissible(S)
        why = (
            f"admissibility condition {cond} violated"
            if not ok
            else "diagonal subgroup fixes no basis state"
        )
        raise NoStabilizedState(f"no stabilized state: {why}")
    nf = xsgroup.normal_form(S)
    n, t = S.n, nf.t
    V = AffineSpace.make(n, [g.a for g in nf.leading_gens])
    regular = all(all(v % 2 == 0 for v in d.b) for d in nf.diagonal_gens)
    if regular:
        rows, rhs = _diag_constraint_rows(nf.diagonal_gens, n)
        if rows:
            V_D = gf2.solve_affine(BitMatrix(tuple(rows), n), BitVector.from_bits(rhs))
        else:
            V_D = AffineSpace.make(n, [1 << j for j in range(n)])
        assert V_D is not None  # decide_existence said YES
        lambdas = [v.bits for v in gf2.coset_representatives(V, V_D)]
    else:
        V_D = None
        lambdas = _enumerate_orbit_representatives(nf, V, n)
    lambdas.sort(key=lambda v: tuple((v >> j) & 1 for j in range(n)))
    mus = []
    tmask = (1 << t) - 1
    structure = CodeStructure(S, nf, regular, V, V_D, tuple(lambdas), ())
    for lam in lambdas:
        lam1, lam2 = lam & tmask, lam >> t
        mus.append(lam2 ^ structure.w_apply(lam1))
    return CodeStructure(S, nf, regular, V, V_D, tuple(lambdas), tuple(mus))


def extract_phase(structure: CodeStructure, mu: int) -> PhasePolynomial:
    """Amplitude polynomial of the basis state with shift mu."""
    if mu not in structure.mu_list:
        raise ValueError("mu is not one of the basis shifts of this code")
    return _phase_walk(structure, mu)


def _phase_walk(structure: CodeStructure, mu: int) -> PhasePolynomial:
    """Phase of g_t^{x_t} ... g_1^{x_1} |0, mu> for an arbitrary shift mu.

    Each qubit carries an affine form in x, an S gate on a parity expands
    into linear plus quadratic terms, and conditioning on x_k raises the
    degree by one.  The result never exceeds degree 3 and is normalized to
    f(0) = 1.
    """
    t, n = structure.t, structure.n
    masks = [0] * n  # x-dependence of each qubit value
    consts = [0] * n
    for r in range(n - t):
        consts[t + r] = (mu >> r) & 1
    coeffs: dict = {}

    def add(mono, c) -> None:
        mono = tuple(sorted(mono))
        coeffs[mono] = (coeffs.get(mono, 0) + c) % 8

    for k, g in enumerate(structure.nf.leading_gens):
        if g.s:
            add((k,), g.s)
        for q in range(n):
            bq = g.b[q]
            if not bq:
                continue
            mask, c0 = masks[q], consts[q]
            assert not (mask >> k) & 1, "S hit a value already depending on x_k"
            if c0:
                add((k,), 2 * bq)
            beff = (-bq if c0 else bq) % 4
            vs = [j for j in range(k) if (mask >> j) & 1]
            for j in vs:
                add((j, k), 2 * beff)
            for j1, j2 in itertools.combinations(vs, 2):
                add((j1, j2, k), 4 * beff)
        for q in range(n):
            if (g.a >> q) & 1:
                masks[q] ^= 1 << k

    for j in range(t):  # the walk must end exactly on |x, Wx + mu>
        assert masks[j] == 1 << j and consts[j] == 0
    for r in range(n - t):
        assert masks[t + r] == structure.W.rows[r]
    assert coeffs.get((), 0) % 8 == 0
    return PhasePolynomial(t, {m: c for m, c in coeffs.items() if m})


@dataclass(frozen=True)
class BasisState:
    """2^{-t/2} sum_x f(x) |x, Wx + mu>, in the structure's permuted frame."""

    structure: CodeStructure
    mu: int
    f: PhasePolynomial

    @property
    def n(self) -> int:
        return self.structure.n

    def dense(self) -> np.ndarray:
        """State vector in the original qubit frame."""
        st = self.structure
        n, t = st.n, st.t
        v = np.zeros(1 << n, dtype=complex)
        perm = st.nf.perm
        for x in range(1 << t):
            pbits = st.support_index(x, self.mu)
            obits = 0
            for i in range(n):
                if (pbits >> i) & 1:
                    obits |= 1 << perm[i]
            v[obits] = oracle.ALPHA_POWERS[self.f.exponent(x)]
        return v / np.sqrt(1 << t)


def basis_state(structure: CodeStructure, mu: int) -> BasisState:
    return BasisState(structure, mu, extract_phase(structure, mu))


def basis_states(structure: CodeStructure) -> list:
    return [basis_state(structure, mu) for mu in structure.mu_list]


def complete_stabilizers(S: GeneratingSet, structure: CodeStructure, mu: int) -> GeneratingSet:
    """Supplement S with Z-type operators pinning the support coset.

    The added D_j are (-1)^{z_j . lambda} Z(z_j) over a basis z_j of the
    orthogonal complement of V; the result stabilizes the mu basis state
    uniquely (degeneracy 1 after re-analysis).
    """
    if mu not in structure.mu_list:
        raise ValueError("mu is not one of the basis shifts of this code")
    n, t = structure.n, structure.t
    lam = mu << t
    inv = inverse_permutation(structure.nf.perm)
    extra = []
    for z in gf2.orthogonal_complement(structure.V.basis_vectors(), n):
        sign = z.dot(BitVector(n, lam))
        op = ZTypeOperator(n, sign, z.bits).to_operator().permuted(inv)
        extra.append(op)
    return GeneratingSet.make(n, tuple(S.gens) + tuple(extra))


def complete_to_state(S: GeneratingSet) -> GeneratingSet:
    """Pin S to one stabilized basis coset without enumerating the code.

    Like complete_stabilizers but driven by a single existence witness, so
    it stays polynomial even when the input code is highly degenerate.
    """
    witness = xsgroup.decide_existence(S)
    if witness is None:
        raise NoStabilizedState("no stabilized state to complete towards")
    nf = xsgroup.normal_form(S)
    n = S.n
    inv = inverse_permutation(nf.perm)
    lam = sum(((witness.bits >> nf.perm[i]) & 1) << i for i in range(n))
    vbasis = [BitVector(n, g.a) for g in nf.leading_gens]
    extra = []
    for z in gf2.orthogonal_complement(vbasis, n):
        sign = z.dot(BitVector(n, lam))
        extra.append(ZTypeOperator(n, sign, z.bits).to_operator().permuted(inv))
    return GeneratingSet.make(n, tuple(S.gens) + tuple(extra))


# --- amplitude characterization (F_h maps and the Gamma span) --------------

def _pair_index(t: int) -> dict:
    return {pair: i for i, pair in enumerate(itertools.combinations(range(t), 2))}


def fh_map(h: int, f: PhasePolynomial) -> frozenset:
    """Formal derivative of the nontrivial part of f along variable h.

    Only the i-quadratic and (-1)-cubic parts of f participate; the result
    is a set of pairs encoding a (-1)-quadratic form.
    """
    out: set = set()
    for j, k in f.i_quadratic_part():
        if h in (j, k):
            out ^= {(j, k)}
    for j, k, l in f.cubic_part():
        if h == j:
            out ^= {(k, l)}
        elif h == k:
            out ^= {(j, l)}
        elif h == l:
            out ^= {(j, k)}
    return frozenset(out)


def gamma_basis(W: BitMatrix) -> list:
    """Quadratic forms gamma_j built from the rows of W."""
    t = W.cols
    out = []
    for row in W.rows:
        pairs = set()
        on = [k for k in range(t) if (row >> k) & 1]
        for k, l in itertools.combinations(on, 2):
            pairs.add((k, l))
        out.append(frozenset(pairs))
    return out


def _pairs_to_bits(pairs, index: dict) -> int:
    bits = 0
    for p in pairs:
        bits |= 1 << index[tuple(sorted(p))]
    return bits


def check_amplitude(f: PhasePolynomial, W: BitMatrix) -> bool:
    """Whether F_h(f) lies in span{gamma_j} for every variable h."""
    t = W.cols
    if f.nvars != t:
        raise ValueError("f must have one variable per W column")
    index = _pair_index(t)
    ncols = len(index)
    gam = [_pairs_to_bits(g, index) for g in gamma_basis(W)]
    if not ncols:
        return True
    gmat = BitMatrix(tuple(gam), ncols)
    for h in range(t):
        target = BitVector(ncols, _pairs_to_bits(fh_map(h, f), index))
        if gf2.solve_affine(gmat.transpose(), target) is None:
            return False
    return True


def stabilizers_from_amplitude(f: PhasePolynomial, W: BitMatrix) -> GeneratingSet:
    """Generating set that uniquely stabilizes sum_x f(x)|x, Wx>.

    For each leading qubit j the S string b_j is solved from the condition
    that S(b_j) reproduces f(x+e_j)/f(x) on the support, writing its pair
    part in the gamma basis; Z-type generators over the orthogonal
    complement of the support space pin the coset.
    """
    t = W.cols
    n = t + W.nrows
    if not check_amplitude(f, W):
        raise ValueError("amplitude fails the F_h membership condition")
    index = _pair_index(t)
    ncols = max(len(index), 1)
    gam_bits = [_pairs_to_bits(g, index) for g in gamma_basis(W)]
    gmat = BitMatrix(tuple(gam_bits), ncols)
    gens = []
    for j in range(t):
        delta = f.xor_difference(j)  # exponents of f(x+e_j)/f(x)
        R = delta.conjugate()  # need s_j + 2 B(y) + delta(y) = 0
        # pair part of R in the gamma span -> S exponents on dependent qubits
        pair_bits = 0
        for m, c in R.coeffs.items():
            if len(m) == 2 and c == 4:
                pair_bits |= 1 << index[m]
            elif len(m) == 2 and c not in (0, 4):
                raise AssertionError("pair part of the difference must be a sign")
        sol = gf2.solve_affine(gmat.transpose(), BitVector(ncols, pair_bits))
        assert sol is not None  # guaranteed by check_amplitude
        eps = sol.offset  # one bit per W row
        # linear contribution of the chosen dependent-qubit S gates
        dep_linear = [0] * t
        dep_const = 0
        for r in range(W.nrows):
            if not (eps >> r) & 1:
                continue
            c0 = W.entry(r, j)
            dep_const += 2 * c0
            sign = -1 if c0 else 1
            for k in range(t):
                if W.entry(r, k):
                    dep_linear[k] += 2 * sign
        b = [0] * n
        for r in range(W.nrows):
            b[t + r] = (eps >> r) & 1
        for q in range(t):
            target = (R.coefficient((q,)) - dep_linear[q]) % 8
            assert target % 2 == 0
            if q == j:
                b[q] = (-(target // 2)) % 4
            else:
                b[q] = (target // 2) % 4
        s = (R.coefficient(()) - 2 * b[j] - dep_const) % 8
        amask = (1 << j) | (W.column_bits(j) << t)
        gens.append(XSOperator(n, s, amask, tuple(b)))
    vbasis = [(1 << j) | (W.column_bits(j) << t) for j in range(t)]
    for z in gf2.orthogonal_complement(vbasis, n):
        gens.append(ZTypeOperator(n, 0, z.bits).to_operator())
    return GeneratingSet.make(n, gens)


def regularize(S: GeneratingSet) -> GeneratingSet:
    """Replace the stabilizer group of a unique state by a regular one.

    Keeps the independent-mask generators and swaps every diagonal
    generator for Z-type operators cutting out the support coset.  Only
    applies to states (degeneracy 1); codes cannot always be regularized.
    """
    structure = analyze(S)
    if structure.d != 1:
        raise ValueError(f"regularize needs a unique state, got degeneracy {structure.d}")
    n = S.n
    inv = inverse_permutation(structure.nf.perm)
    lam = BitVector(n, structure.lambda_list[0])
    gens = [g.permuted(inv) for g in structure.nf.leading_gens]
    for z in gf2.orthogonal_complement(structure.V.basis_vectors(), n):
        sign = z.dot(lam)
        gens.append(ZTypeOperator(n, sign, z.bits).to_operator().permuted(inv))
    return GeneratingSet.make(n, gens)
