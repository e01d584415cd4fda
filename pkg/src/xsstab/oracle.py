"""Dense brute-force ground truth for small qubit counts.

State vectors are numpy complex arrays of length 2^n indexed so that bit q
of the index is the value of qubit q (qubit 0 is the least significant
bit).  Operator phases are accumulated in exact Z8 arithmetic and converted
to complex doubles once, so long products cannot drift.
"""

from __future__ import annotations

import numpy as np

from .xsgroup import GeneratingSet, XSOperator

DENSE_LIMIT = 15

ALPHA_POWERS = np.exp(1j * np.pi * np.arange(8) / 4.0)


def _check_size(n: int, limit: int | None = None) -> None:
    cap = DENSE_LIMIT if limit is None else limit
    if n > cap:
        raise ValueError(f"dense computation refused at n={n} (limit {cap})")


def phase_exponents(g: XSOperator) -> np.ndarray:
    """Z8 exponent of the diagonal part of g on every basis state."""
    idx = np.arange(1 << g.n, dtype=np.int64)
    exp = np.full(1 << g.n, g.s, dtype=np.int64)
    for q, bq in enumerate(g.b):
        if bq:
            exp += 2 * bq * ((idx >> q) & 1)
    return exp % 8


def apply(g: XSOperator, v: np.ndarray) -> np.ndarray:
    """Monomial action: permute by the X mask, multiply diagonal phases."""
    if v.shape[0] != (1 << g.n):
        raise ValueError("state dimension mismatch")
    phased = ALPHA_POWERS[phase_exponents(g)]
    if v.ndim > 1:
        phased = phased[:, None]
    w = phased * v
    if g.a == 0:
        return w
    src = np.arange(1 << g.n) ^ g.a
    return w[src]


def matrix(g: XSOperator, limit: int | None = None) -> np.ndarray:
    _check_size(g.n, 12 if limit is None else limit)
    N = 1 << g.n
    idx = np.arange(N)
    m = np.zeros((N, N), dtype=complex)
    m[idx ^ g.a, idx] = ALPHA_POWERS[phase_exponents(g)]
    return m


def basis_vector(n: int, bits: int) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    v[bits] = 1.0
    return v


def normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def states_equal(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    """Equality up to global phase: |<u|v>| = 1 within tol."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu < tol or nv < tol:
        return False
    return abs(abs(np.vdot(u, v)) / (nu * nv) - 1.0) < tol


def fixed_space(
    S: GeneratingSet,
    limit: int | None = None,
    batch: int = 4,
    seed: int = 7,
    max_cycles: int = 20000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Orthonormal basis of the common +1 eigenspace of all generators.

    Cycles the projectors (I + g)/2 over a random batch of vectors until the
    batch is numerically fixed by every generator (alternating projections
    converge to the intersection).  The batch doubles whenever it comes back
    full rank, so the returned dimension is trustworthy.
    """
    _check_size(S.n, limit)
    if not S.gens:
        raise ValueError("need at least one generator")
    N = 1 << S.n
    rng = np.random.default_rng(seed)
    k = batch
    while True:
        V = rng.normal(size=(N, k)) + 1j * rng.normal(size=(N, k))
        V, _ = np.linalg.qr(V)
        basis = None
        for cycle in range(max_cycles):
            # contraction: off the +1 eigenspace each factor shrinks norms,
            # so the batch decays onto the intersection without renormalizing
            for g in S.gens:
                V = 0.5 * (V + apply(g, V))
            if cycle % 16 == 15:
                u, sv, _ = np.linalg.svd(V, full_matrices=False)
                if sv[0] < 1e-12:
                    return np.zeros((N, 0), dtype=complex)
                cand = u[:, sv > 1e-7 * sv[0]]
                resid = max(np.abs(apply(g, cand) - cand).max() for g in S.gens)
                if resid < tol:
                    basis = cand
                    break
        if basis is None:
            raise RuntimeError("fixed-space iteration did not converge")
        if basis.shape[1] < k:
            return basis
        k *= 2  # batch came back full; dimension might exceed it


def fixed_space_dimension(S: GeneratingSet, limit: int | None = None) -> int:
    return fixed_space(S, limit=limit).shape[1]


def reduced_spectrum(v: np.ndarray, cut_qubits, n: int) -> np.ndarray:
    """Schmidt coefficients squared (eigenvalues of the reduced state)."""
    A = sorted(cut_qubits)
    B = [q for q in range(n) if q not in set(A)]
    if not A or not B:
        raise ValueError("bipartition must be nontrivial")
    t = v.reshape([2] * n)
    # axis i of the reshaped tensor is qubit n-1-i
    perm = [n - 1 - q for q in A] + [n - 1 - q for q in B]
    t = np.transpose(t, perm).reshape(1 << len(A), 1 << len(B))
    sv = np.linalg.svd(t, compute_uv=False)
    p = sv**2
    return p[p > 1e-14]


def entropy_dense(v: np.ndarray, cut_qubits, n: int) -> float:
    """Von Neumann entropy in bits across (cut_qubits, rest)."""
    p = reduced_spectrum(normalize(v), cut_qubits, n)
    return float(-(p * np.log2(p)).sum())


def renyi2_dense(v: np.ndarray, cut_qubits, n: int) -> float:
    p = reduced_spectrum(normalize(v), cut_qubits, n)
    return float(-np.log2((p**2).sum()))
