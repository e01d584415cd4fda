"""Bipartite entanglement of basis states via reduction to a Pauli state.

For any bipartition the basis state equals D_A (x) D_B |phi> for a Pauli
stabilizer state phi and diagonal local operators D_A, D_B.  The reduction
changes variables so that Alice's qubits depend on a prefix u of the
variables, then splits off the variables w = Tu that Bob can also read;
every non-Pauli phase factor then lands on one of the two sides.  Entropy
comes from the Pauli tableau by counting stabilizer elements supported
inside one party.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2, oracle
from .codespace import BasisState, inverse_permutation
from .gf2 import BitMatrix, BitVector
from .phasepoly import PhasePolynomial


@dataclass(frozen=True)
class Bipartition:
    """Qubit split (A, complement); indices are 0-based original labels."""

    n: int
    A: frozenset

    @classmethod
    def make(cls, n: int, qubits) -> "Bipartition":
        A = frozenset(qubits)
        if not A or len(A) >= n or any(not 0 <= q < n for q in A):
            raise ValueError("bipartition needs a nonempty proper qubit subset")
        return cls(n, A)

    @property
    def B(self) -> frozenset:
        return frozenset(range(self.n)) - self.A


@dataclass(frozen=True)
class PauliTableau:
    """Stabilizer-state tableau: n rows (xmask, zmask, sign)."""

    n: int
    rows: tuple  # (xmask, zmask, sign) triples

    def __post_init__(self) -> None:
        for a, z, s in self.rows:
            if gf2.dot(a, z):
                raise ValueError("row is not Hermitian with a +/- sign")
            if s not in (0, 1):
                raise ValueError("sign must be 0 or 1")

    def dense_state(self) -> np.ndarray:
        """Unique stabilized state (the tableau must have n independent rows)."""
        N = 1 << self.n
        v = np.ones(N, dtype=complex) / np.sqrt(N)
        for a, z, s in self.rows:
            idx = np.arange(N)
            signs = (-1.0) ** (s + _bitcount_array(idx & z))
            w = signs * v
            g_v = w[idx ^ a] if a else w
            v = 0.5 * (v + g_v)
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise ValueError("tableau stabilizes nothing")
        return v / nrm

    def region_entropy(self, region) -> int:
        """|region| - dim of the subgroup supported inside region, in bits."""
        region = set(region)
        outside = [q for q in range(self.n) if q not in region]
        cols = []
        for a, z, _ in self.rows:
            bits = 0
            for i, q in enumerate(outside):
                if (a >> q) & 1:
                    bits |= 1 << (2 * i)
                if (z >> q) & 1:
                    bits |= 1 << (2 * i + 1)
            cols.append(bits)
        mat = BitMatrix(tuple(cols), 2 * len(outside)).transpose()
        inside_dim = len(self.rows) - gf2.rank(mat)
        return len(region) - inside_dim


def _bitcount_array(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    work = arr.copy()
    while work.any():
        out += work & 1
        work >>= 1
    return out


@dataclass(frozen=True)
class LocalDiagonal:
    """Diagonal unitary on one party: alpha^{poly(vars)} with each variable
    read as a parity of that party's qubits (plus a constant bit)."""

    side_qubits: frozenset
    poly: PhasePolynomial
    readers: tuple  # (qubit_mask, const_bit) per variable

    def __post_init__(self) -> None:
        side = 0
        for q in self.side_qubits:
            side |= 1 << q
        for mask, _ in self.readers:
            if mask & ~side:
                raise ValueError("reader leaves its party")

    def phases(self, n: int) -> np.ndarray:
        idx = np.arange(1 << n)
        exps = np.zeros(1 << n, dtype=np.int64)
        var_bits = []
        for mask, const in self.readers:
            var_bits.append((_bitcount_array(idx & mask) + const) & 1)
        for mono, c in self.poly.coeffs.items():
            term = np.ones(1 << n, dtype=np.int64)
            for v in mono:
                term = term * var_bits[v]
            exps += c * term
        return oracle.ALPHA_POWERS[exps % 8]


@dataclass(frozen=True)
class ReductionCertificate:
    """psi = D_A (x) D_B |phi>, all in the structure's permuted frame."""

    state: BasisState
    cut: Bipartition
    pauli_state: PauliTableau
    d_a: LocalDiagonal
    d_b: LocalDiagonal

    def entropy(self) -> int:
        perm_A = _permuted_region(self.state, self.cut)
        return self.pauli_state.region_entropy(perm_A)

    def dense_reconstruction(self) -> np.ndarray:
        """D_A D_B |phi> mapped back to the original qubit frame."""
        n = self.state.n
        phi = self.pauli_state.dense_state()
        v = self.d_a.phases(n) * self.d_b.phases(n) * phi
        perm = self.state.structure.nf.perm
        out = np.zeros_like(v)
        idx = np.arange(1 << n)
        obits = np.zeros_like(idx)
        for i in range(n):
            obits |= ((idx >> i) & 1) << perm[i]
        out[obits] = v
        return out


def _permuted_region(psi: BasisState, cut: Bipartition) -> list:
    inv = inverse_permutation(psi.structure.nf.perm)
    return [inv[q] for q in cut.A]


def bipartite_reduce(psi: BasisState, cut: Bipartition) -> ReductionCertificate:
    """Run the full reduction pipeline for one bipartition."""
    st = psi.structure
    n, t = st.n, st.t
    if cut.n != n:
        raise ValueError("bipartition size mismatch")
    perm_A = set(_permuted_region(psi, cut))

    # rows of [I_t; W]: the x-dependence of each permuted qubit
    rows = [1 << j for j in range(t)] + list(st.W.rows)
    offset = psi.mu << t  # (0, mu)
    a_qubits = sorted(perm_A)
    b_qubits = [q for q in range(n) if q not in perm_A]

    # basis rows: k independent A rows, completed by B rows
    chosen_a: list = []
    chosen_a_qubits: list = []
    for q in a_qubits:
        cand = chosen_a + [rows[q]]
        if gf2.rank(BitMatrix(tuple(cand), t)) > len(chosen_a):
            chosen_a.append(rows[q])
            chosen_a_qubits.append(q)
    k = len(chosen_a)
    chosen_b: list = []
    chosen_b_qubits: list = []
    for q in b_qubits:
        cand = chosen_a + chosen_b + [rows[q]]
        if gf2.rank(BitMatrix(tuple(cand), t)) > k + len(chosen_b):
            chosen_b.append(rows[q])
            chosen_b_qubits.append(q)
    assert k + len(chosen_b) == t, "support rows must span the variable space"

    R = BitMatrix(tuple(chosen_a + chosen_b), t)
    Rinv = gf2.invert(R)

    # u-dependence of Bob's remaining rows decides which w's Bob can read
    other_b = [q for q in b_qubits if q not in set(chosen_b_qubits)]
    kmask = (1 << k) - 1
    c1_rows = []
    for q in other_b:
        row_bits = _row_in_new_frame(rows[q], Rinv)
        c1_rows.append(row_bits & kmask)
    C1 = BitMatrix(tuple(c1_rows), k)
    ker = gf2.kernel(C1)
    r = k - len(ker)
    completion: list = []
    base = [kv.bits for kv in ker]
    for j in range(k):
        cand = base + completion + [1 << j]
        if gf2.rank(BitMatrix(tuple(cand), k)) > len(base) + len(completion):
            completion.append(1 << j)
    Tinv_cols = completion + base  # T^-1 = [E | K] by columns
    Tinv = BitMatrix(tuple(Tinv_cols), k).transpose()
    T = gf2.invert(Tinv)

    # full change of variables x'' = Q x with Q = blockdiag(T, I) R
    TI = BitMatrix(
        tuple(
            (Tinv.rows[i] if i < k else 1 << i)
            for i in range(t)
        ),
        t,
    )
    Qinv = Rinv.mat_mul(TI)  # x = R^-1 (T^-1, I) x''
    f2 = psi.f.compose(Qinv)

    # split the phase into Pauli-allowed, Alice-removable and Bob-removable
    pauli_coeffs: dict = {}
    a_coeffs: dict = {}
    b_coeffs: dict = {}
    for mono, c in f2.coeffs.items():
        wpart = [v for v in mono if v < k]
        vpart = [v for v in mono if v >= k]
        if len(mono) == 1:
            (a_coeffs if wpart else b_coeffs)[mono] = c
        elif len(mono) == 2:
            ipart = c % 4
            if ipart:
                if not vpart:
                    a_coeffs[mono] = ipart
                else:
                    assert all(v < r for v in wpart), "i-pair escapes Bob's readable set"
                    b_coeffs[mono] = ipart
            if c - ipart:
                pauli_coeffs[mono] = c - ipart
        else:
            if not vpart:
                a_coeffs[mono] = c
            else:
                assert all(v < r for v in wpart), "cubic escapes Bob's readable set"
                b_coeffs[mono] = c

    tableau = _support_tableau(n, rows, Rinv, TI, offset, pauli_coeffs, t)
    d_a = _alice_diagonal(a_coeffs, chosen_a_qubits, T, k, t, offset)
    d_b = _bob_diagonal(
        b_coeffs, chosen_b_qubits, other_b, rows, Rinv, TI, offset, k, r, t, n
    )
    return ReductionCertificate(psi, cut, tableau, d_a, d_b)


def _row_in_new_frame(row_bits: int, minv: BitMatrix) -> int:
    """Row covector transported through x = Minv x''."""
    out = 0
    for j in range(minv.cols):
        if gf2.dot(row_bits, minv.column_bits(j)):
            out |= 1 << j
    return out


def _support_tableau(n, rows, Rinv, TI, offset, pauli_coeffs, t) -> PauliTableau:
    minv = Rinv.mat_mul(TI)
    new_rows = [_row_in_new_frame(rows[q], minv) for q in range(n)]
    rowmat = BitMatrix(tuple(new_rows), t)
    out = []
    for z in gf2.kernel(rowmat.transpose()):
        out.append((0, z.bits, gf2.dot(z.bits, offset)))
    # a left inverse of the support map reads x'' back off the qubits
    E = _left_inverse(rowmat)
    q_exp = PhasePolynomial(t, pauli_coeffs)
    for i in range(t):
        delta = q_exp.xor_difference(i)
        kappa = (delta.coefficient(()) // 4) % 2
        lam = 0
        for m, c in delta.coeffs.items():
            if len(m) == 1 and c == 4:
                lam |= 1 << m[0]
            elif m and c not in (0, 4):
                raise AssertionError("pauli part must shift by a sign")
        zmask = _reader_mask(E, lam, n)
        sign = (kappa + gf2.dot(zmask, offset)) % 2
        xmask = rowmat.column_bits(i)
        out.append((xmask, zmask, sign))
    return PauliTableau(n, tuple(out))


def _left_inverse(rowmat: BitMatrix) -> BitMatrix:
    """E with E * rowmat = identity (rowmat has full column rank)."""
    t = rowmat.cols
    red, rk, _, trans = gf2.rref(rowmat)
    assert rk == t and red.rows[:t] == tuple(1 << j for j in range(t))
    return BitMatrix(trans.rows[:t], rowmat.nrows)


def _reader_mask(E: BitMatrix, lam: int, n: int) -> int:
    mask = 0
    j = 0
    while lam >> j:
        if (lam >> j) & 1:
            mask ^= E.rows[j]
        j += 1
    return mask


def _alice_diagonal(a_coeffs, chosen_a_qubits, T, k, t, offset) -> LocalDiagonal:
    """Variables w_0..w_{k-1} read from Alice's pinned qubits through T."""
    readers = []
    for j in range(k):
        mask = 0
        const = 0
        for i in range(k):
            if T.entry(j, i):
                q = chosen_a_qubits[i]
                mask |= 1 << q
                const ^= (offset >> q) & 1
        readers.append((mask, const))
    poly = PhasePolynomial(k, {m: c for m, c in a_coeffs.items()})
    side = frozenset(chosen_a_qubits)
    return LocalDiagonal(side, poly, tuple(readers))


def _bob_diagonal(
    b_coeffs, chosen_b_qubits, other_b, rows, Rinv, TI, offset, k, r, t, n
) -> LocalDiagonal:
    """Variables w_0..w_{r-1} and v_0..v_{t-k-1}, all read from Bob's side."""
    minv = Rinv.mat_mul(TI)
    nvars = r + (t - k)
    # remap monomial indices: w_j (j < r) -> j, v_i (index k+i) -> r + i
    def remap(v: int) -> int:
        return v if v < r else r + (v - k)

    coeffs = {}
    for mono, c in b_coeffs.items():
        coeffs[tuple(sorted(remap(v) for v in mono))] = c

    readers: list = [None] * nvars
    for i, q in enumerate(chosen_b_qubits):
        readers[r + i] = (1 << q, (offset >> q) & 1)
    if r:
        # D1: dependence of Bob's remaining rows on w_{<r}; the choice of T
        # guarantees those rows see no w_j with j >= r
        d1_rows = []
        for q in other_b:
            row = _row_in_new_frame(rows[q], minv)
            assert row & (((1 << k) - 1) ^ ((1 << r) - 1)) == 0
            d1_rows.append(row & ((1 << r) - 1))
        D1 = BitMatrix(tuple(d1_rows), r)
        E1 = _left_inverse(D1)
        for j in range(r):
            mask = 0
            const = 0
            for i, q in enumerate(other_b):
                if (E1.rows[j] >> i) & 1:
                    mask ^= 1 << q
                    const ^= (offset >> q) & 1
                    row = _row_in_new_frame(rows[q], minv)
                    # subtract the v-content of that qubit through v readers
                    for vi in range(t - k):
                        if (row >> (k + vi)) & 1:
                            vmask, vconst = readers[r + vi]
                            mask ^= vmask
                            const ^= vconst
            readers[j] = (mask, const)
    side = frozenset(q for q in range(n) if q in set(chosen_b_qubits) | set(other_b))
    poly = PhasePolynomial(nvars, coeffs)
    return LocalDiagonal(side, poly, tuple(readers))


def entropy(psi: BasisState, cut: Bipartition) -> int:
    """log2 of the Schmidt rank across the cut."""
    return bipartite_reduce(psi, cut).entropy()


def schmidt_profile(psi: BasisState, max_subset_size: int) -> dict:
    """Entropy for every qubit subset A with 1 <= |A| <= max_subset_size."""
    n = psi.n
    out = {}
    for size in range(1, min(max_subset_size, n - 1) + 1):
        for A in itertools.combinations(range(n), size):
            cut = Bipartition.make(n, A)
            out[frozenset(A)] = entropy(psi, cut)
    return out
