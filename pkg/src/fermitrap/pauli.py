"""Exact algebra of N-qubit Pauli strings and weighted Pauli sums.

A Pauli string is stored symplectically as two bitmasks over a 1-based qubit
register: bit (q-1) of ``x_bits`` / ``z_bits`` holds the X / Z component of
the letter on qubit q, with (x, z) = (0,0) -> I, (1,0) -> X, (1,1) -> Y,
(0,1) -> Z.  Products XOR the masks and track the i^k phase as an integer
exponent, so the group algebra is exact.

Matrix conventions are little-endian: qubit 1 is the least-significant
tensor factor (the rightmost factor of P_N (x) ... (x) P_2 (x) P_1), so bit
(q-1) of a basis index is the computational state of qubit q.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import PreconditionError

# Coefficients with magnitude at or below this are pruned during
# canonicalization (removes exact-cancellation residue, never physics).
PRUNE_TOL = 1e-12

# Registers larger than this refuse dense 2^N x 2^N representations.
DEFAULT_DENSE_LIMIT = 14

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}


@dataclass(frozen=True, slots=True)
class PauliString:
    """Tensor product of single-qubit Pauli letters, coefficient-free."""

    n_qubits: int
    x_bits: int = 0
    z_bits: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be a positive integer")
        full = (1 << self.n_qubits) - 1
        if not (0 <= self.x_bits <= full and 0 <= self.z_bits <= full):
            raise ValueError("bitmask outside the declared register")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a letterstring written qubit-1-leftmost, e.g. ``"XZX"``."""
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _LETTER_TO_BITS[ch.upper()]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    @classmethod
    def from_letters(cls, n_qubits: int, letters: dict[int, str]) -> "PauliString":
        """Build from a sparse {qubit: letter} map (1-based qubits)."""
        x = z = 0
        for q, ch in letters.items():
            if not 1 <= q <= n_qubits:
                raise ValueError(f"qubit {q} outside register of size {n_qubits}")
            xb, zb = _LETTER_TO_BITS[ch.upper()]
            x |= xb << (q - 1)
            z |= zb << (q - 1)
        return cls(n_qubits, x, z)

    def letter(self, qubit: int) -> str:
        if not 1 <= qubit <= self.n_qubits:
            raise ValueError(f"qubit {qubit} outside register of size {self.n_qubits}")
        b = qubit - 1
        return _BITS_TO_LETTER[((self.x_bits >> b) & 1, (self.z_bits >> b) & 1)]

    def label(self) -> str:
        return "".join(self.letter(q) for q in range(1, self.n_qubits + 1))

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    def support(self) -> tuple[int, ...]:
        mask = self.x_bits | self.z_bits
        return tuple(q for q in range(1, self.n_qubits + 1) if (mask >> (q - 1)) & 1)

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def sort_key(self) -> tuple[int, int]:
        return (self.x_bits, self.z_bits)

    def __str__(self) -> str:
        return self.label()


def multiply_strings(a: PauliString, b: PauliString) -> tuple[int, PauliString]:
    """Return (k, a*b) where the product carries the exact phase i^k.

    Writing each letter as i^{xz} X^x Z^z, the product phase exponent is
    x1.z1 + x2.z2 + 2*(z1.x2) - x3.z3 taken mod 4, with dots counting
    overlapping bits.
    """
    if a.n_qubits != b.n_qubits:
        raise PreconditionError("register-size mismatch between Pauli strings")
    x3 = a.x_bits ^ b.x_bits
    z3 = a.z_bits ^ b.z_bits
    k = (
        (a.x_bits & a.z_bits).bit_count()
        + (b.x_bits & b.z_bits).bit_count()
        + 2 * (a.z_bits & b.x_bits).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    return k, PauliString(a.n_qubits, x3, z3)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the symplectic inner product of the bitmasks is even."""
    if a.n_qubits != b.n_qubits:
        raise PreconditionError("register-size mismatch between Pauli strings")
    crossed = ((a.x_bits & b.z_bits).bit_count() + (a.z_bits & b.x_bits).bit_count()) % 2
    return crossed == 0


@dataclass(frozen=True, slots=True)
class PauliTerm:
    """complex coefficient times a Pauli string."""

    coefficient: complex
    string: PauliString

    @property
    def n_qubits(self) -> int:
        return self.string.n_qubits

    def is_hermitian(self, tol: float = PRUNE_TOL) -> bool:
        return abs(complex(self.coefficient).imag) <= tol

    def __str__(self) -> str:
        return f"({self.coefficient}) {self.string.label()}"


_I_POWERS = (1, 1j, -1, -1j)


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Exact product of two Pauli terms (phase in {1, i, -1, -i})."""
    k, s = multiply_strings(a.string, b.string)
    return PauliTerm(a.coefficient * b.coefficient * _I_POWERS[k], s)


class PauliSum:
    """Canonicalized weighted sum of Pauli strings on a fixed register.

    Terms are merged by string, pruned below ``tol``, and ordered
    lexicographically on (x_bits, z_bits); the canonical form is unique.
    Instances are immutable.
    """

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] = (), tol: float = PRUNE_TOL):
        if n_qubits < 1:
            raise ValueError("n_qubits must be a positive integer")
        merged: dict[tuple[int, int], complex] = {}
        for t in terms:
            if t.n_qubits != n_qubits:
                raise PreconditionError("register-size mismatch inside PauliSum")
            key = (t.string.x_bits, t.string.z_bits)
            merged[key] = merged.get(key, 0.0) + complex(t.coefficient)
        canon = tuple(
            PauliTerm(c, PauliString(n_qubits, x, z))
            for (x, z), c in sorted(merged.items())
            if abs(c) > tol
        )
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("PauliSum is immutable")

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.terms == other.terms

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise PreconditionError("register-size mismatch between Pauli sums")
        return PauliSum(self.n_qubits, (*self.terms, *other.terms))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return PauliSum(
                self.n_qubits,
                (PauliTerm(t.coefficient * other, t.string) for t in self.terms),
            )
        if isinstance(other, PauliTerm):
            return PauliSum(self.n_qubits, (multiply(t, other) for t in self.terms))
        if isinstance(other, PauliSum):
            return PauliSum(
                self.n_qubits,
                (multiply(a, b) for a in self.terms for b in other.terms),
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def identity_coefficient(self) -> complex:
        for t in self.terms:
            if t.string.is_identity():
                return t.coefficient
        return 0.0

    def weight_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for t in self.terms:
            w = t.string.weight
            hist[w] = hist.get(w, 0) + 1
        return hist

    def count_weight_at_least(self, w_min: int) -> int:
        return sum(1 for t in self.terms if t.string.weight >= w_min)

    def max_imag(self) -> float:
        return max((abs(complex(t.coefficient).imag) for t in self.terms), default=0.0)

    def real_coefficients(self) -> "PauliSum":
        return PauliSum(
            self.n_qubits,
            (PauliTerm(complex(t.coefficient).real, t.string) for t in self.terms),
        )

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"


def string_action(s: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Permutation/phase action of a Pauli string on computational basis states.

    Returns (perm, phase) with P|m> = phase[m] |perm[m]>; perm is the
    involution m ^ x_bits and phase[m] = i^{#Y} (-1)^{popcount(m & z_bits)}.
    """
    dim = 1 << s.n_qubits
    idx = np.arange(dim, dtype=np.int64)
    perm = idx ^ s.x_bits
    parity = (np.bitwise_count(idx & s.z_bits) & 1).astype(np.int64)
    phase = _I_POWERS[(s.x_bits & s.z_bits).bit_count() % 4] * np.where(parity, -1.0, 1.0)
    return perm, phase.astype(complex)


def to_matrix(obj: PauliSum | PauliTerm | PauliString, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense matrix of a Pauli object under the little-endian convention."""
    if isinstance(obj, PauliString):
        obj = PauliTerm(1.0, obj)
    if isinstance(obj, PauliTerm):
        obj = PauliSum(obj.n_qubits, (obj,))
    if obj.n_qubits > dense_limit:
        raise PreconditionError(
            f"register of {obj.n_qubits} qubits exceeds the dense limit {dense_limit}"
        )
    dim = 1 << obj.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim, dtype=np.int64)
    for t in obj.terms:
        perm, phase = string_action(t.string)
        mat[perm, idx] += t.coefficient * phase
    return mat


def dump_pauli_sum(ps: PauliSum) -> str:
    """Serialize one term per line as ``coeff_re coeff_im letterstring``."""
    lines = []
    for t in ps.terms:
        c = complex(t.coefficient)
        lines.append(f"{c.real!r} {c.imag!r} {t.string.label()}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_pauli_sum(text: str, n_qubits: int | None = None) -> PauliSum:
    """Parse the text form produced by :func:`dump_pauli_sum`."""
    terms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'coeff_re coeff_im letterstring'")
        re_s, im_s, label = parts
        s = PauliString.from_label(label)
        if n_qubits is None:
            n_qubits = s.n_qubits
        elif s.n_qubits != n_qubits:
            raise ValueError(f"line {lineno}: inconsistent register size")
        terms.append(PauliTerm(complex(float(re_s), float(im_s)), s))
    if n_qubits is None:
        raise ValueError("cannot infer register size from empty input")
    return PauliSum(n_qubits, terms)
