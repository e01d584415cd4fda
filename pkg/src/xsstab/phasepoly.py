"""Exponent polynomials for amplitudes alpha^l(x) i^q(x) (-1)^c(x).

A phase polynomial stores one coefficient mod 8 per monomial (a sorted
tuple of variable indices, size 0 to 3).  The amplitude class is closed
under multiplication, XOR shifts of the argument and composition with Z2
linear maps; the coefficient moduli (pairs even, triples 0 or 4) are
enforced at construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .gf2 import BitMatrix


def _validated(coeffs: dict) -> dict:
    out = {}
    for mono, c in coeffs.items():
        mono = tuple(sorted(mono))
        if len(set(mono)) != len(mono):
            raise ValueError(f"monomial with repeated variable: {mono}")
        if len(mono) > 3:
            raise ValueError("degree above 3 is not representable")
        c %= 8
        if c == 0:
            continue
        if len(mono) == 2 and c % 2:
            raise ValueError(f"pair coefficient must be even, got {c} at {mono}")
        if len(mono) == 3 and c not in (0, 4):
            raise ValueError(f"triple coefficient must be 0 or 4, got {c} at {mono}")
        out[mono] = c
    return out


@dataclass(frozen=True)
class PhasePolynomial:
    """f(x) = alpha^{sum coeff * monomial(x)} over t Boolean variables."""

    nvars: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _validated(self.coeffs))
        for mono in self.coeffs:
            if any(not 0 <= v < self.nvars for v in mono):
                raise ValueError("variable index out of range")

    @classmethod
    def one(cls, nvars: int) -> "PhasePolynomial":
        return cls(nvars, {})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PhasePolynomial)
            and self.nvars == other.nvars
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.coeffs.items()))))

    def coefficient(self, mono) -> int:
        return self.coeffs.get(tuple(sorted(mono)), 0)

    def exponent(self, x: int) -> int:
        """Z8 exponent at the assignment given by bit mask x."""
        total = 0
        for mono, c in self.coeffs.items():
            if all((x >> v) & 1 for v in mono):
                total += c
        return total % 8

    def degree(self) -> int:
        return max((len(m) for m in self.coeffs), default=0)

    def times(self, other: "PhasePolynomial") -> "PhasePolynomial":
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = (out.get(m, 0) + c) % 8
        return PhasePolynomial(self.nvars, out)

    def conjugate(self) -> "PhasePolynomial":
        return PhasePolynomial(self.nvars, {m: (-c) % 8 for m, c in self.coeffs.items()})

    def shift(self, a: int) -> "PhasePolynomial":
        """f(x XOR a) as a phase polynomial."""
        out: dict = {}
        for mono, c in self.coeffs.items():
            flipped = [v for v in mono if (a >> v) & 1]
            kept = [v for v in mono if not (a >> v) & 1]
            # product over flipped vars of (1 - x_v), expanded exactly
            for r in range(len(flipped) + 1):
                for subset in itertools.combinations(flipped, r):
                    m = tuple(sorted(kept + list(subset)))
                    out[m] = (out.get(m, 0) + c * (-1) ** r) % 8
        return PhasePolynomial(self.nvars, out)

    def xor_difference(self, j: int) -> "PhasePolynomial":
        """f(x XOR e_j) / f(x) as exponents; cubic terms always cancel."""
        return self.shift(1 << j).times(self.conjugate())

    def compose(self, m: BitMatrix) -> "PhasePolynomial":
        """f(M y) where x_i = XOR_k M[i,k] y_k; degree stays at most 3.

        Coefficients are recovered by Moebius interpolation on assignments
        of weight up to 3, which is exact because the composed function is
        again in the representable class (covariance of the class under
        linear substitutions).
        """
        if m.nrows != self.nvars:
            raise ValueError("matrix rows must match variable count")
        s = m.cols

        def value(y: int) -> int:
            x = 0
            for i in range(self.nvars):
                if bin(m.rows[i] & y).count("1") & 1:
                    x |= 1 << i
            return self.exponent(x)

        out: dict = {}
        v0 = value(0)
        if v0 % 8:
            out[()] = v0 % 8
        vals1 = [value(1 << k) for k in range(s)]
        for k in range(s):
            c = (vals1[k] - v0) % 8
            if c:
                out[(k,)] = c
        vals2 = {}
        for k, l in itertools.combinations(range(s), 2):
            v = value((1 << k) | (1 << l))
            vals2[(k, l)] = v
            c = (v - vals1[k] - vals1[l] + v0) % 8
            if c:
                out[(k, l)] = c
        for k, l, r in itertools.combinations(range(s), 3):
            v = value((1 << k) | (1 << l) | (1 << r))
            c = (
                v
                - vals2[(k, l)]
                - vals2[(k, r)]
                - vals2[(l, r)]
                + vals1[k]
                + vals1[l]
                + vals1[r]
                - v0
            ) % 8
            if c:
                out[(k, l, r)] = c
        return PhasePolynomial(s, out)

    def without_constant(self) -> "PhasePolynomial":
        return PhasePolynomial(self.nvars, {m: c for m, c in self.coeffs.items() if m})

    def i_quadratic_part(self) -> set:
        """Pairs carrying an i (not just -1) coefficient, as a Z2 pair set."""
        return {m for m, c in self.coeffs.items() if len(m) == 2 and (c >> 1) & 1}

    def cubic_part(self) -> set:
        return {m for m, c in self.coeffs.items() if len(m) == 3 and c == 4}

    def __str__(self) -> str:
        if not self.coeffs:
            return "1"
        parts = []
        for mono in sorted(self.coeffs, key=lambda m: (len(m), m)):
            c = self.coeffs[mono]
            body = " ".join(f"x{v + 1}" for v in mono) if mono else "1"
            if c % 2:
                base = "a" if c == 1 else f"a^{c}"
            elif c % 4:
                base = "i" if c == 2 else "i^3"
            else:
                base = "(-1)"
            parts.append(f"{base}^{{{body}}}")
        return " ".join(parts)
