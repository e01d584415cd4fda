"""Preparation circuits, logical operators and Pauli expectation values.

Circuits follow the three-stage shape: a Clifford prefix (H, X, CNOT)
building the support, a Clifford diagonal layer (S, Z, CZ) and a
non-Clifford diagonal suffix (T, CS, CCZ) for the remaining phases.  Gates
are emitted on the original qubit labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2, oracle
from .codespace import BasisState, CodeStructure, inverse_permutation
from .gf2 import AffineSpace
from .phasepoly import PhasePolynomial
from .xsgroup import ZTypeOperator

GATE_ARITY = {
    "H": 1, "X": 1, "Z": 1, "S": 1, "T": 1,
    "CNOT": 2, "CZ": 2, "CS": 2, "CCZ": 3,
}
NON_CLIFFORD = {"T", "CS", "CCZ"}


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple  # (name, qubits) with 0-based qubit tuples

    def __post_init__(self) -> None:
        seen_non_clifford = False
        for name, qubits in self.gates:
            if GATE_ARITY[name] != len(qubits):
                raise ValueError(f"{name} takes {GATE_ARITY[name]} qubits")
            if any(not 0 <= q < self.n for q in qubits):
                raise ValueError("qubit index out of range")
            if name in NON_CLIFFORD:
                seen_non_clifford = True
            elif seen_non_clifford:
                raise ValueError("non-Clifford gates must form a suffix")

    def __len__(self) -> int:
        return len(self.gates)

    def format(self) -> str:
        """One gate per line, 1-based qubit indices."""
        return "\n".join(
            " ".join([name] + [str(q + 1) for q in qubits])
            for name, qubits in self.gates
        ) + ("\n" if self.gates else "")


def parse_circuit(text: str, n: int) -> Circuit:
    gates = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        gates.append((parts[0], tuple(int(p) - 1 for p in parts[1:])))
    return Circuit(n, tuple(gates))


def simulate(circuit: Circuit) -> np.ndarray:
    """Dense state |C|0...0>; oracle-scale sizes only."""
    n = circuit.n
    v = np.zeros(1 << n, dtype=complex)
    v[0] = 1.0
    idx = np.arange(1 << n)
    for name, qubits in circuit.gates:
        if name == "H":
            (q,) = qubits
            bit = (idx >> q) & 1
            flip = idx ^ (1 << q)
            v = (v * (1 - bit) + v[flip] * (1 - bit) + (v[flip] - v) * bit) / np.sqrt(2)
        elif name == "X":
            (q,) = qubits
            v = v[idx ^ (1 << q)]
        elif name == "CNOT":
            c, tq = qubits
            src = np.where((idx >> c) & 1, idx ^ (1 << tq), idx)
            v = v[src]
        else:
            exp = {"Z": 4, "S": 2, "T": 1, "CZ": 4, "CS": 2, "CCZ": 4}[name]
            sel = np.ones_like(idx)
            for q in qubits:
                sel = sel & ((idx >> q) & 1)
            v = v * oracle.ALPHA_POWERS[(exp * sel) % 8]
    return v


def synthesize(psi: BasisState) -> Circuit:
    """Preparation circuit for a basis state, on the original qubit labels."""
    st = psi.structure
    n, t = st.n, st.t
    perm = st.nf.perm
    gates = []
    for j in range(t):
        gates.append(("H", (perm[j],)))
    for r in range(n - t):
        if (psi.mu >> r) & 1:
            gates.append(("X", (perm[t + r],)))
    for r in range(n - t):
        row = st.W.rows[r]
        for k in range(t):
            if (row >> k) & 1:
                gates.append(("CNOT", (perm[k], perm[t + r])))
    clifford, beyond = _diagonal_stages(psi.f, [perm[j] for j in range(t)])
    return Circuit(n, tuple(gates + clifford + beyond))


def _diagonal_stages(f: PhasePolynomial, qubit_of_var) -> tuple:
    """Split a phase polynomial into (S/Z/CZ gates, T/CS/CCZ gates)."""
    clifford: list = []
    beyond: list = []
    for mono in sorted(f.coeffs, key=lambda m: (len(m), m)):
        c = f.coeffs[mono]
        qs = tuple(qubit_of_var[v] for v in mono)
        if len(mono) == 1:
            if c & 1:
                beyond.append(("T", qs))
            if (c >> 1) & 1:
                clifford.append(("S", qs))
            if (c >> 2) & 1:
                clifford.append(("Z", qs))
        elif len(mono) == 2:
            q = c >> 1  # even coefficient: i^{q x y}
            if q & 1:
                beyond.append(("CS", qs))
            if q & 2:
                clifford.append(("CZ", qs))
        else:
            beyond.append(("CCZ", qs))
    return clifford, beyond


# --- logical operators ------------------------------------------------------

@dataclass(frozen=True)
class LogicalPair:
    """Zbar picks up (-1)^{y_k}; Xbar maps the y basis state to y + e_k.

    Xbar is an X mask together with a diagonal Clifford correction given as
    a gate list (S powers, Z, CZ); everything on original qubit labels.
    """

    zbar: ZTypeOperator
    xbar_mask: int
    xbar_gates: tuple

    def apply_dense(self, v: np.ndarray, n: int) -> np.ndarray:
        phases = np.ones(1 << n, dtype=complex)
        idx = np.arange(1 << n)
        for name, qubits in self.xbar_gates:
            exp = {"S": 2, "Z": 4, "CZ": 4}[name]
            sel = np.ones_like(idx)
            for q in qubits:
                sel = sel & ((idx >> q) & 1)
            phases = phases * oracle.ALPHA_POWERS[(exp * sel) % 8]
        w = phases * v
        return w[idx ^ self.xbar_mask] if self.xbar_mask else w


@dataclass(frozen=True)
class LogicalOperatorSet:
    structure: CodeStructure
    pairs: tuple


def _mu_coordinates(structure: CodeStructure) -> tuple:
    """Affine coordinates on the set of basis shifts mu."""
    mus = structure.mu_list
    space = AffineSpace.make(structure.n - structure.t, [m ^ mus[0] for m in mus], mus[0])
    if 1 << space.dim != len(mus):
        raise ValueError("basis shifts do not form an affine space")
    pivots = [row & -row for row in space.basis]
    return space, [p.bit_length() - 1 for p in pivots]


def _phase_increments(structure: CodeStructure) -> list:
    """C_r(x): how the basis phase shifts when bit r of mu flips.

    The walk phase is exactly linear in the bits of mu, so the increments
    are read off two walks per dependent qubit and reused for every step.
    """
    from .codespace import _phase_walk

    base = _phase_walk(structure, 0).conjugate()
    return [
        _phase_walk(structure, 1 << r).times(base)
        for r in range(structure.n - structure.t)
    ]


def logical_operators(structure: CodeStructure) -> LogicalOperatorSet:
    """One (Zbar, Xbar) pair per logical qubit of a regular code."""
    if not structure.regular:
        raise ValueError("logical operators are built for regular codes only")
    n, t = structure.n, structure.t
    perm = structure.nf.perm
    if structure.d == 1:
        return LogicalOperatorSet(structure, ())
    space, pivots = _mu_coordinates(structure)
    incs = _phase_increments(structure)
    pairs = []
    for k, basis_row in enumerate(space.basis):
        p = pivots[k]
        # Zbar: (-1)^{mu_p} from the dependent qubit p and the W row parity
        zmask_perm = 1 << (t + p)
        for j in range(t):
            if (structure.W.rows[p] >> j) & 1:
                zmask_perm |= 1 << j
        zmask = _unpermute_mask(zmask_perm, perm)
        sign = (space.offset >> p) & 1
        zbar = ZTypeOperator(n, sign, zmask)

        # Xbar: flip the dependent qubits of the mu step, then fix phases
        xmask = _unpermute_mask(basis_row << t, perm)
        gates = _xbar_correction(structure, basis_row, incs)
        pairs.append(LogicalPair(zbar, xmask, tuple(gates)))
    return LogicalOperatorSet(structure, tuple(pairs))


def _unpermute_mask(mask_perm: int, perm) -> int:
    out = 0
    for i, q in enumerate(perm):
        if (mask_perm >> i) & 1:
            out |= 1 << q
    return out


def _xbar_correction(structure: CodeStructure, delta: int, incs) -> list:
    """Diagonal gates giving f_{mu+delta}/f_mu on every basis state at once.

    The mu-independent part Sum_r delta_r C_r(x) maps to S powers and CZ on
    the leading qubits; the residual (-1)^{l_r(x) mu_r} reads mu_r off the
    dependent qubit r and expands through the W row.
    """
    n, t = structure.n, structure.t
    perm = structure.nf.perm
    counts: dict = {}

    def add(qubits, exp) -> None:
        key = tuple(sorted(set(qubits)))
        counts[key] = (counts.get(key, 0) + exp) % 8

    for r in range(n - t):
        if not (delta >> r) & 1:
            continue
        C = incs[r]
        for mono, c in C.coeffs.items():
            if len(mono) == 1:
                add((mono[0],), c)
            else:
                assert len(mono) == 2 and c in (0, 4)
                add(mono, c)
        # y-dependent residual: (-1)^{l_r(x) mu_r} with mu_r read from
        # qubit t+r xor the W-row parity
        for mono, c in C.coeffs.items():
            if len(mono) != 1 or (c // 2) % 2 == 0:
                continue
            j = mono[0]
            add((j, t + r), 4)
            for kk in range(t):
                if (structure.W.rows[r] >> kk) & 1:
                    add((j, kk) if kk != j else (j,), 4)
    gates = []
    for key in sorted(counts):
        c = counts[key]
        if not c:
            continue
        qs = tuple(perm[i] for i in key)
        if len(key) == 1:
            assert c % 2 == 0
            for name, bit in (("S", 1), ("Z", 2)):
                if (c >> 1) & bit:
                    gates.append((name, qs))
        else:
            assert c == 4, f"pair correction must be a CZ, got {c}"
            gates.append(("CZ", qs))
    return gates


# --- expectation values -----------------------------------------------------

@dataclass(frozen=True)
class Pauli:
    """i^s X(x) Z(z) on n qubits, original frame."""

    n: int
    s: int
    xmask: int
    zmask: int

    @classmethod
    def parse(cls, text: str, n: int) -> "Pauli":
        fields = dict(part.split("=", 1) for part in text.split())
        x = fields.get("x", "0" * n)
        z = fields.get("z", "0" * n)
        if len(x) != n or len(z) != n:
            raise ValueError("pauli masks must have length n")
        return cls(
            n,
            int(fields.get("s", "0")) % 4,
            sum(1 << j for j, c in enumerate(x) if c == "1"),
            sum(1 << j for j, c in enumerate(z) if c == "1"),
        )

    def dense(self) -> np.ndarray:
        N = 1 << self.n
        idx = np.arange(N)
        phases = oracle.ALPHA_POWERS[(2 * self.s + 4 * _parity(idx & self.zmask)) % 8]
        m = np.zeros((N, N), dtype=complex)
        m[idx ^ self.xmask, idx] = phases
        return m


def _parity(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    work = arr.copy()
    while work.any():
        out ^= work & 1
        work >>= 1
    return out


def expectation(psi: BasisState, p: Pauli) -> complex:
    """<psi|P|psi> by exact 2^t enumeration of unit phases."""
    st = psi.structure
    n, t = st.n, st.t
    inv = inverse_permutation(st.nf.perm)
    ax = sum(((p.xmask >> st.nf.perm[i]) & 1) << i for i in range(n))
    az = sum(((p.zmask >> st.nf.perm[i]) & 1) << i for i in range(n))
    a1, a2 = ax & ((1 << t) - 1), ax >> t
    if st.w_apply(a1) != a2:
        return 0.0 + 0.0j
    # exponent polynomial of conj(f(x+a1)) f(x) i^s (-1)^{z.(x, Wx+mu)}
    g = psi.f.shift(a1).conjugate().times(psi.f)
    extra: dict = {(): 2 * p.s}
    z1, z2 = az & ((1 << t) - 1), az >> t
    zline = z1
    const = 0
    for r in range(n - t):
        if (z2 >> r) & 1:
            zline ^= st.W.rows[r]
            const ^= (psi.mu >> r) & 1
    extra[()] = (extra[()] + 4 * const) % 8
    for j in range(t):
        if (zline >> j) & 1:
            extra[(j,)] = 4
    g = g.times(PhasePolynomial(t, extra))
    counts = [0] * 8
    for x in range(1 << t):
        counts[g.exponent(x)] += 1
    re = counts[0] - counts[4] + (counts[1] - counts[3] - counts[5] + counts[7]) / np.sqrt(2)
    im = counts[2] - counts[6] + (counts[1] + counts[3] - counts[5] - counts[7]) / np.sqrt(2)
    return complex(re / (1 << t), im / (1 << t))
