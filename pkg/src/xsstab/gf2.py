"""Exact linear algebra over Z2 with bit-packed rows.

Vectors and matrix rows are stored as Python ints (bit j = coordinate j),
which gives word-parallel XOR at any width.  All values are immutable and
all operations are pure functions, so everything here is safe to share
between threads.

Pivoting is deterministic: leftmost column, topmost row.  Normal forms are
therefore reproducible, and :class:`AffineSpace` stores a canonical (RREF)
basis so equal spaces compare equal structurally.
"""

from __future__ import annotations

from dataclasses import dataclass


def popcount(x: int) -> int:
    return bin(x).count("1")


def dot(a: int, b: int) -> int:
    """Z2 inner product of two bit-packed vectors."""
    return popcount(a & b) & 1


@dataclass(frozen=True)
class BitVector:
    """Fixed-length vector over Z2; XOR is the group operation."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits out of range for length {self.n}")

    @classmethod
    def from_bits(cls, seq) -> "BitVector":
        bits = 0
        seq = list(seq)
        for j, v in enumerate(seq):
            if v & 1:
                bits |= 1 << j
        return cls(len(seq), bits)

    def __getitem__(self, j: int) -> int:
        return (self.bits >> j) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVector(self.n, self.bits ^ other.bits)

    def dot(self, other: "BitVector") -> int:
        if self.n != other.n:
            raise ValueError("length mismatch")
        return dot(self.bits, other.bits)

    def to_tuple(self) -> tuple:
        return tuple((self.bits >> j) & 1 for j in range(self.n))

    def is_zero(self) -> bool:
        return self.bits == 0

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_tuple())


@dataclass(frozen=True)
class BitMatrix:
    """r x c matrix over Z2; rows bit-packed as ints."""

    rows: tuple
    cols: int

    def __post_init__(self) -> None:
        for r in self.rows:
            if r < 0 or r >> self.cols:
                raise ValueError("row exceeds column count")

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "BitMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        packed = []
        for r in rows:
            bits = 0
            for j, v in enumerate(r):
                if v & 1:
                    bits |= 1 << j
            packed.append(bits)
        return cls(tuple(packed), cols)

    @classmethod
    def from_bitvectors(cls, vecs) -> "BitMatrix":
        vecs = list(vecs)
        if not vecs:
            raise ValueError("need at least one vector to fix the width")
        n = vecs[0].n
        if any(v.n != n for v in vecs):
            raise ValueError("mixed vector lengths")
        return cls(tuple(v.bits for v in vecs), n)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << j for j in range(n)), n)

    @classmethod
    def zero(cls, r: int, c: int) -> "BitMatrix":
        return cls((0,) * r, c)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.rows[i])

    def column_bits(self, j: int) -> int:
        bits = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                bits |= 1 << i
        return bits

    def transpose(self) -> "BitMatrix":
        return BitMatrix(tuple(self.column_bits(j) for j in range(self.cols)), self.nrows)

    def mat_vec(self, v: BitVector) -> BitVector:
        if v.n != self.cols:
            raise ValueError("dimension mismatch")
        out = 0
        for i, r in enumerate(self.rows):
            if dot(r, v.bits):
                out |= 1 << i
        return BitVector(self.nrows, out)

    def mat_mul(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.nrows:
            raise ValueError("dimension mismatch")
        # row i of product = XOR of other's rows selected by our row i
        out = []
        for r in self.rows:
            acc = 0
            k = 0
            while r:
                if r & 1:
                    acc ^= other.rows[k]
                r >>= 1
                k += 1
            out.append(acc)
        return BitMatrix(tuple(out), other.cols)

    def to_lists(self) -> list:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.rows]


def rref(m: BitMatrix) -> tuple:
    """Reduced row-echelon form over Z2.

    Returns (result, rank, pivot_cols, transform) where transform is the
    invertible row-operation matrix with transform * m == result.
    """
    work = list(m.rows)
    nr = len(work)
    trans = [1 << i for i in range(nr)]  # identity, tracks row ops
    pivots = []
    row = 0
    for col in range(m.cols):
        sel = None
        for i in range(row, nr):
            if (work[i] >> col) & 1:
                sel = i
                break
        if sel is None:
            continue
        work[row], work[sel] = work[sel], work[row]
        trans[row], trans[sel] = trans[sel], trans[row]
        for i in range(nr):
            if i != row and ((work[i] >> col) & 1):
                work[i] ^= work[row]
                trans[i] ^= trans[row]
        pivots.append(col)
        row += 1
        if row == nr:
            break
    result = BitMatrix(tuple(work), m.cols)
    transform = BitMatrix(tuple(trans), nr)
    return result, len(pivots), pivots, transform


def rank(m: BitMatrix) -> int:
    return rref(m)[1]


def kernel(m: BitMatrix) -> list:
    """Basis of {x : m*x = 0}; length equals cols - rank."""
    red, _, pivots, _ = rref(m)
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    basis = []
    for f in free:
        vec = 1 << f
        # each pivot row determines the pivot variable from the free ones
        for i, p in enumerate(pivots):
            if (red.rows[i] >> f) & 1:
                vec |= 1 << p
        basis.append(BitVector(m.cols, vec))
    return basis


def invert(m: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible matrix over Z2."""
    if m.nrows != m.cols:
        raise ValueError("not square")
    _, rk, _, trans = rref(m)
    if rk != m.cols:
        raise ValueError("matrix is singular")
    return trans


@dataclass(frozen=True)
class AffineSpace:
    """offset + span(basis); basis is canonical (RREF, offset reduced)."""

    n: int
    basis: tuple  # tuple of ints, RREF rows, no zero rows
    offset: int

    @classmethod
    def make(cls, n: int, basis_vectors, offset: BitVector | int = 0) -> "AffineSpace":
        off = offset.bits if isinstance(offset, BitVector) else offset
        vecs = [v.bits if isinstance(v, BitVector) else v for v in basis_vectors]
        mat = BitMatrix(tuple(vecs), n)
        red, rk, pivots, _ = rref(mat)
        rows = red.rows[:rk]
        # reduce the offset against the pivots for a canonical coset rep
        for i, p in enumerate(pivots):
            if (off >> p) & 1:
                off ^= rows[i]
        return cls(n, rows, off)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def size(self) -> int:
        return 1 << self.dim

    def basis_vectors(self) -> list:
        return [BitVector(self.n, b) for b in self.basis]

    def offset_vector(self) -> BitVector:
        return BitVector(self.n, self.offset)

    def contains(self, v: BitVector | int) -> bool:
        x = (v.bits if isinstance(v, BitVector) else v) ^ self.offset
        for b in self.basis:
            low = b & -b
            if x & low:
                x ^= b
        return x == 0

    def contains_space(self, other: "AffineSpace") -> bool:
        if not self.contains(other.offset):
            return False
        return all(self.contains(other.offset ^ b) for b in other.basis)

    def elements(self):
        """Iterate all members (exponential; small spaces only)."""
        for mask in range(1 << self.dim):
            v = self.offset
            m = mask
            i = 0
            while m:
                if m & 1:
                    v ^= self.basis[i]
                m >>= 1
                i += 1
            yield BitVector(self.n, v)


def solve_affine(m: BitMatrix, rhs: BitVector) -> AffineSpace | None:
    """Solution set of m*x = rhs as an AffineSpace, or None if inconsistent."""
    if rhs.n != m.nrows:
        raise ValueError("rhs length must match row count")
    red, rk, pivots, trans = rref(m)
    new_rhs = trans.mat_vec(rhs)
    # rows past the rank are zero; their rhs must vanish
    for i in range(rk, m.nrows):
        if new_rhs[i]:
            return None
    particular = 0
    for i, p in enumerate(pivots):
        if new_rhs[i]:
            particular |= 1 << p
    return AffineSpace.make(m.cols, kernel(m), particular)


def orthogonal_complement(basis, n: int | None = None) -> list:
    """Basis of {z : z . v = 0 for every v in basis}."""
    vecs = list(basis)
    if n is None:
        if not vecs:
            raise ValueError("need explicit n for an empty basis")
        n = vecs[0].n if isinstance(vecs[0], BitVector) else None
        if n is None:
            raise ValueError("pass BitVectors or an explicit n")
    if not vecs:
        return [BitVector(n, 1 << j) for j in range(n)]
    mat = BitMatrix(tuple(v.bits if isinstance(v, BitVector) else v for v in vecs), n)
    return kernel(mat)


def span_contains(basis, v: BitVector) -> bool:
    return AffineSpace.make(v.n, basis).contains(v)


def solve_mod2k(rows: list, rhs: list, k: int = 3) -> list | None:
    """Solve A*x = rhs over Z/2^k; returns one solution or None.

    Elimination pivots on the entry of smallest 2-adic valuation in the
    untouched submatrix, which keeps every remaining coefficient of a pivot
    row divisible by the pivot.  Back-substitution then decides solvability
    row by row.  Used for membership tests in the (phase, S-exponent)
    lattice of diagonal operators, where k = 3.
    """
    mod = 1 << k
    m = len(rows)
    if m == 0:
        return []
    ncols = len(rows[0])
    aug = [[rows[i][j] % mod for j in range(ncols)] + [rhs[i] % mod] for i in range(m)]

    def val(x: int) -> int:
        return k if x == 0 else (x & -x).bit_length() - 1

    pivots = []
    free_rows = set(range(m))
    free_cols = set(range(ncols))
    while True:
        best = None
        for i in sorted(free_rows):
            for j in sorted(free_cols):
                if aug[i][j]:
                    v = val(aug[i][j])
                    if best is None or (v, j, i) < best:
                        best = (v, j, i)
        if best is None:
            break
        v, j, i = best
        inv = pow(aug[i][j] >> v, -1, mod)
        aug[i] = [(e * inv) % mod for e in aug[i]]
        for r in free_rows:
            if r != i and aug[r][j]:
                q = aug[r][j] >> v
                aug[r] = [(a - q * b) % mod for a, b in zip(aug[r], aug[i])]
        pivots.append((i, j, v))
        free_rows.discard(i)
        free_cols.discard(j)

    for r in free_rows:
        if aug[r][ncols] % mod:
            return None

    x = [0] * ncols
    for i, j, v in reversed(pivots):
        resid = aug[i][ncols]
        for c in range(ncols):
            if c != j and aug[i][c]:
                resid -= aug[i][c] * x[c]
        resid %= mod
        if resid % (1 << v):
            return None
        x[j] = resid >> v
    return x


def coset_representatives(sub: AffineSpace, super_: AffineSpace) -> list:
    """Representatives of the cosets of `sub` (a linear space) inside `super_`.

    Every coset v + sub with v in super_ must lie inside super_; this holds
    exactly when sub is contained in super_'s direction space.  Raises
    ValueError otherwise (the caller is dealing with a non-regular group and
    must fall back to orbit enumeration).

    Returned representatives are sorted by bit pattern, offset reduced to the
    canonical member of each coset.
    """
    if sub.offset != 0:
        raise ValueError("sub must be a linear space")
    direction = AffineSpace.make(super_.n, super_.basis)
    for b in sub.basis:
        if not direction.contains(b):
            raise ValueError("sub is not contained in the direction space of super_")
    # extend sub's basis to the full direction space; the added vectors
    # enumerate the quotient
    ext = []
    current = list(sub.basis)
    base_rank = len(current)
    for b in super_.basis:
        if rank(BitMatrix(tuple(current + [b]), super_.n)) > len(current):
            current.append(b)
            ext.append(b)
    assert len(current) == direction.dim
    reps = []
    quotient = AffineSpace.make(super_.n, sub.basis)
    for mask in range(1 << len(ext)):
        v = super_.offset
        for i in range(len(ext)):
            if (mask >> i) & 1:
                v ^= ext[i]
        # canonical member of v + sub
        x = v
        for b, p in zip(quotient.basis, [q & -q for q in quotient.basis]):
            if x & p:
                x ^= b
        reps.append(x)
    reps = sorted(set(reps))
    assert len(reps) == super_.size() // sub.size()
    return [BitVector(super_.n, r) for r in reps]
