"""Jordan-Wigner transformation from fermionic terms to Pauli sums.

Convention (fixed throughout the package): the creation operator on mode k
maps to (X_k + i Y_k)/2 tensored with Z on every lower mode,

    b+_k  ->  (1/2)(X_k + i Y_k) (x) Z_{k-1} (x) ... (x) Z_1,

and b_k is its adjoint.  Under this mapping the number operator b+_k b_k
becomes (I + Z_k)/2, i.e. an occupied mode is the +1 eigenstate of Z
(computational |0>), and the Fock vacuum is the all-ones basis state.  The
mapping is valid for arbitrary-range couplings in any lattice dimension;
impurity spin factors carry no parity string.
"""

from __future__ import annotations

from .errors import PreconditionError, ToleranceError
from .fermions import FermionHamiltonian, FermionOp, FermionTerm, SpinFactor
from .pauli import PauliString, PauliSum, PauliTerm

HERMITICITY_TOL = 1e-12


def jw_op(op: FermionOp, n_modes: int, n_qubits: int | None = None) -> PauliSum:
    """Two-term Pauli image of a single creation/annihilation operator."""
    if not 1 <= op.mode <= n_modes:
        raise PreconditionError(f"mode {op.mode} outside register of {n_modes} modes")
    n = n_modes if n_qubits is None else n_qubits
    k = op.mode - 1
    parity = (1 << k) - 1  # Z string on modes 1..k-1
    x_term = PauliTerm(0.5, PauliString(n, 1 << k, parity))
    y_sign = 0.5j if op.dagger else -0.5j
    y_term = PauliTerm(y_sign, PauliString(n, 1 << k, parity | (1 << k)))
    return PauliSum(n, (x_term, y_term))


def jw_spin_factor(sf: SpinFactor, n_modes: int, n_impurities: int) -> PauliSum:
    """Pauli image of an impurity spin factor (same raising convention)."""
    if not 1 <= sf.impurity <= n_impurities:
        raise PreconditionError(
            f"impurity {sf.impurity} outside register of {n_impurities} impurities"
        )
    n = n_modes + n_impurities
    qubit = n_modes + sf.impurity
    if sf.op in ("x", "y", "z"):
        return PauliSum(n, (PauliTerm(1.0, PauliString.from_letters(n, {qubit: sf.op})),))
    x_term = PauliTerm(0.5, PauliString.from_letters(n, {qubit: "x"}))
    y_sign = 0.5j if sf.op == "+" else -0.5j
    y_term = PauliTerm(y_sign, PauliString.from_letters(n, {qubit: "y"}))
    return PauliSum(n, (x_term, y_term))


def jw_term(term: FermionTerm, n_modes: int, n_impurities: int = 0) -> PauliSum:
    """Pauli image of a full term, with exact phase tracking.

    Operator-product order is respected: the leftmost operator is the
    leftmost matrix factor.
    """
    n = n_modes + n_impurities
    acc = PauliSum(n, (PauliTerm(term.coupling, PauliString.identity(n)),))
    for op in term.ops:
        acc = acc * jw_op(op, n_modes, n)
    for sf in term.spins:
        acc = acc * jw_spin_factor(sf, n_modes, n_impurities)
    return acc


def jw_hamiltonian(h: FermionHamiltonian, imag_tol: float = HERMITICITY_TOL) -> PauliSum:
    """Pauli image of a Hermitian-closed Hamiltonian, real coefficients.

    Raises ToleranceError when an imaginary residue above ``imag_tol``
    survives canonicalization, which signals a non-Hermitian input.
    """
    acc = PauliSum(h.n_qubits)
    for term in h.terms:
        acc = acc + jw_term(term, h.n_modes, h.n_impurities)
    residue = acc.max_imag()
    if residue > imag_tol:
        raise ToleranceError(
            f"mapped Hamiltonian has imaginary coefficient residue {residue:.3e} "
            f"above {imag_tol:.1e}; input is not Hermitian"
        )
    return acc.real_coefficients()
