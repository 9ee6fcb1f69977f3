"""Fixed-number multimode Fock sectors and sparse q-boson operators."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import comb

import numpy as np
import scipy.sparse as sp

from .qnum import as_parameter, q_factorial, q_number, require_valid

MAX_DIM = 10**6


class BasisMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=True)
class FockBasis:
    """Occupation tuples of ``n_modes`` bosons with fixed total number.

    States are ordered lexicographically descending, so for two modes the
    first state is (N, 0). Equality is by (n_modes, total) only.
    """

    n_modes: int
    total: int

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.total < 0:
            raise ValueError(f"total must be >= 0, got {self.total}")

    @property
    def dim(self) -> int:
        return comb(self.total + self.n_modes - 1, self.n_modes - 1)

    @cached_property
    def states(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_compositions(self.total, self.n_modes))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, n_modes) integer array of occupation numbers."""
        return np.array(self.states, dtype=int).reshape(self.dim, self.n_modes)

    def __len__(self) -> int:
        return self.dim

    def __str__(self) -> str:
        return f"Fock(m={self.n_modes}, N={self.total})"


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class TensorSpace:
    """Carrier for operators on V (x) W, e.g. coproduct representations."""

    left: object
    right: object

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    def __str__(self) -> str:
        return f"{self.left} (x) {self.right}"


@lru_cache(maxsize=256)
def build_basis(n_modes: int, total: int, max_dim: int = MAX_DIM) -> FockBasis:
    basis = FockBasis(n_modes, total)
    if basis.dim > max_dim:
        raise ValueError(f"{basis} has dimension {basis.dim} > cap {max_dim}")
    return basis


class Operator:
    """Sparse complex matrix between two spaces (codomain x domain).

    Arithmetic checks that the spaces line up; ``@`` composes, ``.H`` is the
    adjoint and ``.T`` the plain transpose (the formal adjoint that leaves q
    unconjugated).
    """

    __array_priority__ = 100

    def __init__(self, matrix, domain, codomain=None, drop_tol: float = 0.0):
        codomain = domain if codomain is None else codomain
        m = sp.csr_array(matrix, dtype=complex)
        if m.shape != (codomain.dim, domain.dim):
            raise ValueError(f"matrix shape {m.shape} does not match {codomain} <- {domain}")
        if drop_tol > 0:
            m.data[np.abs(m.data) <= drop_tol] = 0
        m.eliminate_zeros()
        self.matrix = m
        self.domain = domain
        self.codomain = codomain

    # construction helpers
    @classmethod
    def zeros(cls, domain, codomain=None) -> Operator:
        codomain = domain if codomain is None else codomain
        return cls(sp.csr_array((codomain.dim, domain.dim), dtype=complex), domain, codomain)

    @classmethod
    def identity(cls, space) -> Operator:
        return cls(sp.identity(space.dim, dtype=complex, format="csr"), space)

    @classmethod
    def diagonal(cls, values, space) -> Operator:
        return cls(sp.diags_array(np.asarray(values, dtype=complex), format="csr"), space)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_square(self) -> bool:
        return self.domain == self.codomain

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def diag(self) -> np.ndarray:
        return self.matrix.diagonal()

    def is_diagonal(self) -> bool:
        m = self.matrix.tocoo()
        return bool(np.all(m.row == m.col))

    @property
    def H(self) -> Operator:
        return Operator(self.matrix.conj().T, self.codomain, self.domain)

    @property
    def T(self) -> Operator:
        return Operator(self.matrix.T, self.codomain, self.domain)

    adjoint = H

    def norm(self) -> float:
        """Infinity norm (max absolute row sum)."""
        if self.matrix.nnz == 0:
            return 0.0
        return float(abs(self.matrix).sum(axis=1).max())

    def _same_spaces(self, other: Operator):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise BasisMismatch(
                f"{self.codomain}<-{self.domain} vs {other.codomain}<-{other.domain}")

    def __add__(self, other):
        if isinstance(other, Operator):
            self._same_spaces(other)
            return Operator(self.matrix + other.matrix, self.domain, self.codomain)
        if np.isscalar(other) and other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._same_spaces(other)
            return Operator(self.matrix - other.matrix, self.domain, self.codomain)
        return NotImplemented

    def __neg__(self):
        return Operator(-self.matrix, self.domain, self.codomain)

    def __mul__(self, c):
        if np.isscalar(c):
            return Operator(self.matrix * c, self.domain, self.codomain)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if self.domain != other.codomain:
                raise BasisMismatch(f"cannot compose {self.domain} with {other.codomain}")
            return Operator(self.matrix @ other.matrix, other.domain, self.codomain)
        return self.matrix @ np.asarray(other)

    def __pow__(self, n: int) -> Operator:
        if not self.is_square:
            raise BasisMismatch("power of a non-square operator")
        out = Operator.identity(self.domain)
        for _ in range(n):
            out = out @ self
        return out

    def __repr__(self) -> str:
        return f"Operator({self.codomain} <- {self.domain}, nnz={self.matrix.nnz})"


def diag_function(basis: FockBasis, fn) -> Operator:
    """Diagonal operator with entries ``fn(occ)``, occ the (dim, m) occupation array."""
    return Operator.diagonal(fn(basis.occupations), basis)


def number_op(basis: FockBasis, mode: int) -> Operator:
    _check_mode(basis, mode)
    return Operator.diagonal(basis.occupations[:, mode], basis)


def total_number_op(basis: FockBasis) -> Operator:
    return Operator.diagonal(basis.occupations.sum(axis=1), basis)


def q_number_op(basis: FockBasis, mode: int, q) -> Operator:
    """[N_i]_q as a diagonal operator."""
    _check_mode(basis, mode)
    return Operator.diagonal(q_number(basis.occupations[:, mode], q), basis)


def q_power_op(basis: FockBasis, exponent, q) -> Operator:
    """Diagonal q**f(occ) for a linear form given as coefficient vector or callable."""
    q = as_parameter(q)
    occ = basis.occupations
    if callable(exponent):
        x = exponent(occ)
    else:
        x = occ @ np.asarray(exponent, dtype=float)
    return Operator.diagonal(q.pow(x), basis)


def _check_mode(basis: FockBasis, mode: int):
    if not 0 <= mode < basis.n_modes:
        raise IndexError(f"mode {mode} out of range for {basis}")


def _ladder(n, q, classical: bool):
    return np.sqrt(n) if classical else np.sqrt(q_number(n, q))


def creation_op(from_basis: FockBasis, to_basis: FockBasis, mode: int, q=1.0,
                classical: bool = False) -> Operator:
    """b_i^+ from sector N to N+1 with coefficient sqrt([n_i + 1]_q).

    ``classical=True`` gives the undeformed boson (coefficient sqrt(n_i + 1)).
    """
    if from_basis.n_modes != to_basis.n_modes or to_basis.total != from_basis.total + 1:
        raise BasisMismatch(f"creation needs N -> N+1, got {from_basis} -> {to_basis}")
    _check_mode(from_basis, mode)
    q = as_parameter(q)
    if not classical:
        require_valid(q, to_basis.total)
    occ = from_basis.occupations.copy()
    occ[:, mode] += 1
    rows = [to_basis.index[tuple(s)] for s in occ]
    vals = _ladder(occ[:, mode].astype(float), q, classical)
    cols = np.arange(from_basis.dim)
    m = sp.csr_array((vals.astype(complex), (rows, cols)), shape=(to_basis.dim, from_basis.dim))
    return Operator(m, from_basis, to_basis)


def annihilation_op(from_basis: FockBasis, to_basis: FockBasis, mode: int, q=1.0,
                    classical: bool = False) -> Operator:
    """b_i from sector N to N-1; the adjoint of the matching creation operator."""
    return creation_op(to_basis, from_basis, mode, q, classical).H


def bilinear(basis: FockBasis, i: int, j: int, q=1.0, classical: bool = False) -> Operator:
    """Number-conserving b_i^+ b_j on a fixed sector (i == j gives [N_i]_q)."""
    _check_mode(basis, i)
    _check_mode(basis, j)
    q = as_parameter(q)
    if not classical and basis.total > 0:
        require_valid(q, basis.total)
    occ = basis.occupations
    if i == j:
        n = occ[:, i].astype(float)
        return Operator.diagonal(n if classical else q_number(n, q), basis)
    src = np.nonzero(occ[:, j] > 0)[0]
    new = occ[src].copy()
    nj = new[:, j].astype(float)
    new[:, j] -= 1
    new[:, i] += 1
    ni1 = new[:, i].astype(float)
    rows = [basis.index[tuple(s)] for s in new]
    vals = _ladder(ni1, q, classical) * _ladder(nj, q, classical)
    m = sp.csr_array((vals.astype(complex), (rows, src)), shape=(basis.dim, basis.dim))
    return Operator(m, basis)


def one_body(basis: FockBasis, matrix) -> Operator:
    """Lift a single-particle matrix M to sum_ij M_ij b~_i^+ b~_j (undeformed bosons)."""
    matrix = np.asarray(matrix)
    if matrix.shape != (basis.n_modes, basis.n_modes):
        raise ValueError(f"one-body matrix must be {basis.n_modes}x{basis.n_modes}")
    out = Operator.zeros(basis)
    for i, j in zip(*np.nonzero(matrix)):
        out = out + complex(matrix[i, j]) * bilinear(basis, int(i), int(j), classical=True)
    return out


def vacuum(n_modes: int) -> np.ndarray:
    return np.ones(1, dtype=complex)


def normalized_state(basis: FockBasis, occupations, q=1.0) -> np.ndarray:
    """prod_i (b_i^+)^{n_i} / sqrt([n_i]_q!) applied to the vacuum.

    Built by explicit ladder application through the intermediate sectors;
    the result is the occupation basis vector with coefficient 1.
    """
    occupations = tuple(int(n) for n in occupations)
    if len(occupations) != basis.n_modes or sum(occupations) != basis.total:
        raise ValueError(f"occupations {occupations} do not belong to {basis}")
    q = as_parameter(q)
    vec = vacuum(basis.n_modes)
    current = build_basis(basis.n_modes, 0)
    norm = 1.0
    for mode, n in enumerate(occupations):
        for _ in range(n):
            nxt = build_basis(basis.n_modes, current.total + 1)
            vec = creation_op(current, nxt, mode, q) @ vec
            current = nxt
        norm *= q_factorial(n, q)
    return vec / np.sqrt(norm)


def fock_rotation(basis: FockBasis, unitary) -> Operator:
    """Fock-space image of a single-particle unitary W on a fixed sector.

    Column s is prod_a (c_a^+)^{s_a}/sqrt(s_a!) |0>, where c_a^+ = sum_k W_ka b~_k^+.
    """
    w = np.asarray(unitary, dtype=complex)
    m = basis.n_modes
    if w.shape != (m, m):
        raise ValueError(f"unitary must be {m}x{m}")
    ladders = []
    for total in range(basis.total):
        lo, hi = build_basis(m, total), build_basis(m, total + 1)
        ladders.append([creation_op(lo, hi, k, classical=True).matrix for k in range(m)])
    cols = []
    for state in basis.states:
        vec = vacuum(m)
        level = 0
        norm = 1.0
        for a, n in enumerate(state):
            for _ in range(n):
                vec = sum(w[k, a] * (ladders[level][k] @ vec) for k in range(m) if w[k, a] != 0)
                level += 1
            norm *= float(np.prod(np.arange(1, n + 1)))
        cols.append(vec / np.sqrt(norm))
    mat = np.column_stack(cols) if cols else np.zeros((basis.dim, 0))
    return Operator(mat, basis)


def basis_listing(basis: FockBasis) -> list[str]:
    return [f"{i} " + " ".join(str(n) for n in s) for i, s in enumerate(basis.states)]
