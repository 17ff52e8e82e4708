"""Second-quantized operator terms, Hermitian closure, and file I/O.

Operator products are stored verbatim (leftmost operator applied last);
nothing here reorders fermionic operators, since reordering silently
changes signs.  Impurity spin factors live on an auxiliary register
appended after the fermionic modes and commute with all fermionic
operators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError

COUPLING_TOL = 1e-12

_SPIN_OPS = ("x", "y", "z", "+", "-")
_SPIN_ADJOINT = {"x": "x", "y": "y", "z": "z", "+": "-", "-": "+"}


@dataclass(frozen=True, slots=True)
class FermionOp:
    """Creation (dagger=True) or annihilation operator on a 1-based mode."""

    mode: int
    dagger: bool

    def adjoint(self) -> "FermionOp":
        return FermionOp(self.mode, not self.dagger)

    def __str__(self) -> str:
        return f"b{'+' if self.dagger else ''}_{self.mode}"


@dataclass(frozen=True, slots=True)
class SpinFactor:
    """Pauli or raising/lowering factor on a 1-based impurity qubit."""

    impurity: int
    op: str

    def __post_init__(self) -> None:
        if self.op not in _SPIN_OPS:
            raise ValueError(f"spin op must be one of {_SPIN_OPS}, got {self.op!r}")

    def adjoint(self) -> "SpinFactor":
        return SpinFactor(self.impurity, _SPIN_ADJOINT[self.op])


@dataclass(frozen=True, slots=True)
class FermionTerm:
    """coupling * (ordered product of fermion ops) * (impurity spin factors)."""

    coupling: complex
    ops: tuple[FermionOp, ...]
    spins: tuple[SpinFactor, ...] = ()

    def adjoint(self) -> "FermionTerm":
        return FermionTerm(
            complex(self.coupling).conjugate(),
            tuple(op.adjoint() for op in reversed(self.ops)),
            tuple(sf.adjoint() for sf in reversed(self.spins)),
        )

    def __str__(self) -> str:
        ops = " ".join(str(o) for o in self.ops)
        spins = " ".join(f"s{sf.op}_{sf.impurity}" for sf in self.spins)
        return f"({self.coupling}) {ops}" + (f" {spins}" if spins else "")


@dataclass(frozen=True, slots=True)
class FermionHamiltonian:
    n_modes: int
    n_impurities: int
    terms: tuple[FermionTerm, ...]

    def __post_init__(self) -> None:
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        if self.n_impurities < 0:
            raise ValueError("n_impurities must be non-negative")
        for t in self.terms:
            if len(t.ops) < 2:
                raise ValueError(
                    f"term {t} has fewer than two fermionic operators; "
                    "linear terms are rejected"
                )
            for op in t.ops:
                if not 1 <= op.mode <= self.n_modes:
                    raise ValueError(f"mode {op.mode} outside register of {self.n_modes} modes")
            for sf in t.spins:
                if not 1 <= sf.impurity <= self.n_impurities:
                    raise ValueError(
                        f"impurity {sf.impurity} outside register of {self.n_impurities}"
                    )

    @property
    def n_qubits(self) -> int:
        return self.n_modes + self.n_impurities


def normal_order_check(term: FermionTerm) -> bool:
    """True iff every creation operator precedes every annihilation operator.

    Diagnostic only; terms are never transformed.
    """
    seen_annihilation = False
    for op in term.ops:
        if op.dagger and seen_annihilation:
            return False
        if not op.dagger:
            seen_annihilation = True
    return True


def _signed_sorted_ops(ops: tuple[FermionOp, ...]) -> tuple[int, tuple[FermionOp, ...]]:
    """Stable-sort ops by mode, tracking the cross-mode transposition parity.

    Operators on distinct modes anticommute, so each adjacent swap of
    different-mode operators flips the sign; same-mode operators keep their
    relative order.  Two products are operator-equal up to that sign iff
    their sorted forms coincide.
    """
    items = list(ops)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1].mode > items[j].mode:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def _canonical_key(term: FermionTerm) -> tuple:
    sign, ops = _signed_sorted_ops(term.ops)
    spins = tuple(sorted(term.spins, key=lambda sf: sf.impurity))
    return ops, spins, sign


def _terms_match(a: FermionTerm, b: FermionTerm, tol: float = COUPLING_TOL) -> bool:
    ops_a, spins_a, sign_a = _canonical_key(a)
    ops_b, spins_b, sign_b = _canonical_key(b)
    if ops_a != ops_b or spins_a != spins_b:
        return False
    return abs(sign_a * complex(a.coupling) - sign_b * complex(b.coupling)) <= tol


def hermitian_closure(h: FermionHamiltonian) -> FermionHamiltonian:
    """Append missing adjoint terms so the Hamiltonian is self-adjoint.

    Self-adjoint terms (recognized up to operator reordering on distinct
    modes) are kept single; existing adjoint partners are matched with
    multiplicity.  Idempotent.
    """
    out = list(h.terms)
    consumed = [False] * len(out)
    i = 0
    while i < len(out):
        if consumed[i]:
            i += 1
            continue
        term = out[i]
        adj = term.adjoint()
        consumed[i] = True
        if _terms_match(term, adj):
            i += 1
            continue
        partner = next(
            (j for j in range(len(out)) if j != i and not consumed[j] and _terms_match(out[j], adj)),
            None,
        )
        if partner is None:
            out.append(adj)
            consumed.append(True)
        else:
            consumed[partner] = True
        i += 1
    return replace(h, terms=tuple(out))


def is_hermitian_term_set(h: FermionHamiltonian) -> bool:
    """True iff closure would not add any term."""
    return len(hermitian_closure(h).terms) == len(h.terms)


# ---------------------------------------------------------------------------
# Hamiltonian file format (JSON): {"n_modes": N, "n_impurities": M,
#   "hermitian_closure": bool, "terms": [{"coupling": [re, im],
#   "ops": [[mode, "c"|"a"], ...], "spins": [[impurity, sym], ...]}]}
# ---------------------------------------------------------------------------

def hamiltonian_to_dict(h: FermionHamiltonian, request_closure: bool = False) -> dict:
    return {
        "n_modes": h.n_modes,
        "n_impurities": h.n_impurities,
        "hermitian_closure": request_closure,
        "terms": [
            {
                "coupling": [complex(t.coupling).real, complex(t.coupling).imag],
                "ops": [[op.mode, "c" if op.dagger else "a"] for op in t.ops],
                "spins": [[sf.impurity, sf.op] for sf in t.spins],
            }
            for t in h.terms
        ],
    }


def hamiltonian_from_dict(data: dict) -> FermionHamiltonian:
    try:
        n_modes = int(data["n_modes"])
        n_impurities = int(data.get("n_impurities", 0))
        raw_terms = data["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed Hamiltonian data: {exc}") from exc
    terms = []
    for i, raw in enumerate(raw_terms):
        try:
            re, im = raw["coupling"]
            ops = tuple(
                FermionOp(int(mode), {"c": True, "a": False}[kind]) for mode, kind in raw["ops"]
            )
            spins = tuple(SpinFactor(int(imp), str(sym)) for imp, sym in raw.get("spins", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed term {i}: {exc}") from exc
        terms.append(FermionTerm(complex(float(re), float(im)), ops, spins))
    try:
        h = FermionHamiltonian(n_modes, n_impurities, tuple(terms))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if data.get("hermitian_closure", False):
        h = hermitian_closure(h)
    return h


def load_hamiltonian(path: str | Path) -> FermionHamiltonian:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read Hamiltonian file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Hamiltonian file {path} is not valid JSON: {exc}") from exc
    return hamiltonian_from_dict(data)


def save_hamiltonian(h: FermionHamiltonian, path: str | Path, request_closure: bool = False) -> None:
    Path(path).write_text(json.dumps(hamiltonian_to_dict(h, request_closure), indent=2) + "\n")
