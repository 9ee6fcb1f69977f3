"""Deforming maps between classical generators and their q-deformed images.

Three maps live here:

* the Song dressing b^+ = sqrt([N]/N) b~^+, used in reverse to turn
  q-boson bilinears into undeformed ones;
* the Curtright-Zachos map sl(2) -> sl_q(2), realized spectrally: every
  (j, m) -> (j, m+1) block of j+ is rescaled by
  sqrt([j-m][j+m+1] / ((j-m)(j+m+1)));
* maps Sp(4) = SO(5) -> sp_q(4) = so_q(5). ``sp4_cartan_map`` is the
  closed form built from functions of the Cartan generators alone;
  ``sp4_deform`` handles one-body so(5) pairs acting on a 5-mode vector
  multiplet by rotating to the standard d-boson frame and applying the
  q-boson so_q(5) realization there.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .algebra import (
    AlgebraRealization,
    ChevalleyTriple,
    RelationError,
    build_soq5_dboson,
    check_chevalley,
)
from .fock import FockBasis, Operator, bilinear, fock_rotation, one_body
from .qnum import ParameterError, as_parameter, q_number, require_valid

SNAP_TOL = 1e-8


def song_factor(basis: FockBasis, mode: int, q) -> Operator:
    """Diagonal sqrt(n/[n]_q) on one mode; the n = 0 entry is 1."""
    q = require_valid(q, max(basis.total, 1))
    n = basis.occupations[:, mode].astype(float)
    qn = np.atleast_1d(q_number(n, q))
    vals = np.ones_like(n)
    nz = n > 0
    vals[nz] = np.sqrt(n[nz] / qn[nz])
    return Operator.diagonal(vals, basis)


def classical_bilinear(basis: FockBasis, i: int, j: int, q=1.0) -> Operator:
    """sqrt(N_i/[N_i]) b_i^+ b_j sqrt(N_j/[N_j]): the undeformed b~_i^+ b~_j for any q."""
    return song_factor(basis, i, q) @ bilinear(basis, i, j, q) @ song_factor(basis, j, q)


@dataclass
class ClassicalTriple:
    """Undeformed (e+, e-, h) with h = 2 j0 for an sl(2)-type node.

    ``e_plus_1p`` and ``h_1p`` hold the single-particle matrices when the
    generators are one-body operators.
    """

    label: str
    e_plus: Operator
    e_minus: Operator
    h: Operator
    e_plus_1p: np.ndarray | None = None
    h_1p: np.ndarray | None = None

    @property
    def space(self):
        return self.h.domain


def classical_triple(basis: FockBasis, label: str, e_plus_1p, h_1p) -> ClassicalTriple:
    e1 = np.asarray(e_plus_1p, dtype=complex)
    h1 = np.asarray(h_1p, dtype=complex)
    ep = one_body(basis, e1)
    return ClassicalTriple(label, ep, one_body(basis, e1.conj().T), one_body(basis, h1), e1, h1)


def one_body_matrix(op: Operator) -> np.ndarray:
    """Recover the single-particle matrix of an operator given on an N = 1 sector."""
    if op.domain.total != 1:
        raise ValueError("single-particle matrices are read off the N = 1 sector")
    return op.toarray()


def _snap_spin(lam: float) -> float:
    j = (-1 + np.sqrt(1 + 4 * max(lam, 0.0))) / 2
    js = round(2 * j) / 2
    if abs(js * (js + 1) - lam) > SNAP_TOL * max(1.0, abs(lam)):
        raise RelationError(f"Casimir eigenvalue {lam:.10g} is not j(j+1)")
    return js


def spin_decomposition(classical: ClassicalTriple) -> dict[float, np.ndarray]:
    """Orthogonal projectors onto the spin-j eigenspaces of j- j+ + j0 (j0 + 1)."""
    j0 = classical.h.diag().real / 2
    cas = (classical.e_minus @ classical.e_plus).toarray() + np.diag(j0 * (j0 + 1))
    herm = np.abs(cas - cas.conj().T).max(initial=0.0)
    if herm > 1e-10:
        raise RelationError(f"classical Casimir is not Hermitian (defect {herm:.2e})")
    vals, vecs = np.linalg.eigh((cas + cas.conj().T) / 2)
    spins = np.array([_snap_spin(v) for v in vals])
    return {float(j): vecs[:, spins == j] @ vecs[:, spins == j].conj().T
            for j in np.unique(spins)}


def cz_deform(classical: ClassicalTriple, q) -> ChevalleyTriple:
    """Curtright-Zachos deformation of an undeformed sl(2) triple.

    J+ gets the exact sl_q(2) matrix elements sqrt([j-m]_q [j+m+1]_q) on every
    irreducible block, J0 = j0 is untouched.
    """
    q = as_parameter(q)
    report = check_chevalley(AlgebraRealization(
        classical.label,
        [ChevalleyTriple(classical.label, classical.e_plus, classical.e_minus, classical.h)],
        np.array([[2]]), as_parameter(1.0)), tol=1e-10)
    if not report.passed:
        raise RelationError(f"{classical.label} is not an sl(2) triple "
                            f"(residual {report.max_residual:.2e})")
    if q.is_classical:
        return ChevalleyTriple(classical.label, classical.e_plus, classical.e_minus,
                               classical.h, 1, q)
    projectors = spin_decomposition(classical)
    jmax = max(projectors)
    require_valid(q, int(round(2 * jmax)) + 1)
    m = classical.h.diag().real / 2
    ep = classical.e_plus.toarray()
    em = classical.e_minus.toarray()
    plus = np.zeros_like(ep)
    minus = np.zeros_like(em)
    for j, proj in projectors.items():
        a = j - m
        b = j + m + 1
        ok = (a > 0.5) & (b > 0.5)
        f = np.ones_like(m)
        f[ok] = np.sqrt(q_number(a[ok], q) * q_number(b[ok], q) / (a[ok] * b[ok]))
        plus += proj @ ep @ np.diag(f)
        minus += np.diag(f) @ em @ proj
    scale = max(1.0, np.abs(ep).max(initial=0.0))
    space = classical.space
    return ChevalleyTriple(classical.label, Operator(plus, space, drop_tol=1e-13 * scale),
                           Operator(minus, space, drop_tol=1e-13 * scale), classical.h, 1, q)


# --- Sp(4) = SO(5) ---------------------------------------------------------

def _weight(h: np.ndarray, e: np.ndarray) -> float:
    """The a with [h, e] = a e (least squares over the nonzero entries of e)."""
    c = h @ e - e @ h
    den = np.vdot(e, e).real
    return float(np.vdot(e, c).real / den) if den > 0 else 0.0


def pair_cartan_matrix(pair) -> np.ndarray:
    """Cartan data read from the single-particle matrices when present, which
    keeps it defined on sectors (N = 0) where every generator vanishes."""
    if all(getattr(t, "e_plus_1p", None) is not None and getattr(t, "h_1p", None) is not None
           for t in pair):
        mats = [(np.asarray(t.h_1p), np.asarray(t.e_plus_1p)) for t in pair]
    else:
        mats = [(t.h.toarray(), t.e_plus.toarray()) for t in pair]
    a = np.array([[_weight(hi, ej) for _, ej in mats] for hi, _ in mats])
    ai = np.rint(a).astype(int)
    if np.abs(a - ai).max() > 1e-9:
        raise RelationError(f"non-integer weights {a}")
    return ai


def _long_node(a: np.ndarray) -> int:
    if a[1, 0] == -2 and a[0, 1] == -1:
        return 0
    if a[0, 1] == -2 and a[1, 0] == -1:
        return 1
    raise RelationError(f"Cartan matrix {a.tolist()} is not of type B2/C2")


def _ratio(x: np.ndarray, q) -> np.ndarray:
    """[x]_q / x entrywise, with 0/0 read as 1."""
    out = np.ones_like(x, dtype=float)
    nz = np.abs(x) > 1e-12
    out[nz] = np.atleast_1d(q_number(x[nz], q)) / x[nz]
    return out


def sp4_cartan_factors(x1, x2, q):
    """Diagonal dressings of the closed-form Sp(4) map as arrays over the entries
    of the two Cartan arguments, plus the scalar prefactor 2/(q + 1/q)."""
    q = as_parameter(q)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r1 = _ratio(x1 + x2 + 1, q) * _ratio(x2, q)
    r2 = _ratio(x2 + 1, q) * _ratio(-x2 - 2, q)
    bad = np.nonzero((r1 <= 0) | (r2 <= 0))[0]
    if bad.size:
        raise ParameterError(f"negative radicand on diagonal entries {bad.tolist()}")
    return np.sqrt(r1), np.sqrt(r2), complex(2 / (q.q + 1 / q.q))


def sp4_cartan_map(pair, q, arguments=None) -> AlgebraRealization:
    """Closed-form Sp(4) -> sp_q(4) dressing by functions of Cartan labels:

        e1 = E1 sqrt([A1+A2+1]_q [A2]_q / ((A1+A2+1) A2))
        e2 = 2/(q+q^-1) E2 sqrt([A2+1]_q [-A2-2]_q / ((A2+1)(-A2-2)))

    with (A1, A2) the pair's Cartans unless ``arguments`` supplies other
    diagonal operators; h_k = H_k. Factors act on the right of E and on the
    left of E-. The map is exact for the two-boson realization of Sp(4)
    with arguments (N1 - N2, N2); it is not a valid deformation of the
    d-boson so(5) pairs, for which ``sp4_deform`` must be used.
    """
    q = as_parameter(q)
    t1, t2 = pair
    a1, a2 = (t1.h, t2.h) if arguments is None else arguments
    f1, f2, pref = sp4_cartan_factors(a1.diag().real, a2.diag().real, q)
    g1 = Operator.diagonal(f1, t1.space)
    g2 = Operator.diagonal(f2, t2.space)
    a = pair_cartan_matrix(pair)
    d = [1, 1]
    d[_long_node(a)] = 2
    triples = [
        ChevalleyTriple(t1.label, t1.e_plus @ g1, g1 @ t1.e_minus, t1.h, d[0]),
        ChevalleyTriple(t2.label, pref * (t2.e_plus @ g2), pref * (g2 @ t2.e_minus), t2.h, d[1]),
    ]
    return AlgebraRealization("sp_q(4)", triples, a, q)


# single-particle matrices of the standard d-boson so(5) vector multiplet
_STD_E1 = np.zeros((5, 5))
_STD_E1[0, 1] = _STD_E1[3, 4] = 1.0
_STD_E2 = np.zeros((5, 5))
_STD_E2[1, 2] = _STD_E2[2, 3] = np.sqrt(2)
_STD_WEIGHTS = [(1, 0), (-1, 2), (0, 0), (1, -2), (-1, 0)]


def dboson_frame(e1: np.ndarray, e2: np.ndarray, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Unitary whose first five columns carry the so(5) vector multiplet in standard form.

    Node 1 must be the long root. Raises RelationError when the one-body pair
    is not a single vector multiplet plus inert modes.
    """
    n = e1.shape[0]
    stack = np.vstack([e1, e2, h1 - np.eye(n), h2])
    top = sla.null_space(stack, rcond=1e-10)
    if top.shape[1] != 1:
        raise RelationError(f"expected one highest-weight mode, found {top.shape[1]}")
    u = [top[:, 0] / np.linalg.norm(top[:, 0])]
    k = int(np.argmax(np.abs(u[0])))
    u[0] = u[0] * (abs(u[0][k]) / u[0][k])
    f1, f2 = e1.conj().T, e2.conj().T
    for lower in (f1, f2, f2, f1):
        v = lower @ u[-1]
        nv = np.linalg.norm(v)
        if nv < 1e-10:
            raise RelationError("lowering chain terminated early; not a vector multiplet")
        u.append(v / nv)
    frame = np.column_stack(u)
    rest = sla.null_space(frame.conj().T, rcond=1e-10)
    w = np.column_stack([frame, rest])
    for mat, std in ((e1, _STD_E1), (e2, _STD_E2)):
        got = frame.conj().T @ mat @ frame
        if np.abs(got - std).max() > 1e-10:
            raise RelationError("pair does not take the standard d-boson form")
    for (w1, w2), col in zip(_STD_WEIGHTS, u):
        if np.abs(h1 @ col - w1 * col).max() > 1e-10 or np.abs(h2 @ col - w2 * col).max() > 1e-10:
            raise RelationError("weights differ from the standard d-boson labels")
    for mat in (e1, e2, h1, h2):
        if rest.size and np.abs(mat @ rest).max() > 1e-10:
            raise RelationError("complementary modes are not inert")
    return w


def sp4_deform(pair, q) -> AlgebraRealization:
    """Deform a one-body so(5) = sp(4) pair into so_q(5) with h_k = H_k.

    The single-particle frame that puts the pair in standard d-boson form is
    found from its highest-weight mode; the q-boson so_q(5) realization is
    built in that frame and rotated back with the Fock image of the frame.
    """
    q = as_parameter(q)
    t1, t2 = pair
    if t1.e_plus_1p is None or t2.e_plus_1p is None:
        raise ValueError("sp4_deform needs one-body classical triples")
    a = pair_cartan_matrix(pair)
    long_node = _long_node(a)
    order = (0, 1) if long_node == 0 else (1, 0)
    tl, ts = pair[order[0]], pair[order[1]]
    w = dboson_frame(tl.e_plus_1p, ts.e_plus_1p, tl.h_1p, ts.h_1p)
    basis = t1.space
    if q.is_classical:
        deformed = [t.e_plus for t in (tl, ts)]
        deformed_minus = [t.e_minus for t in (tl, ts)]
    else:
        std = build_soq5_dboson(basis, q, modes=(0, 1, 2, 3, 4))
        rot = fock_rotation(basis, w)
        deformed = [rot @ t.e_plus @ rot.H for t in std.triples]
        deformed_minus = [rot @ t.e_minus @ rot.H for t in std.triples]
        deformed = [Operator(e.matrix, basis, drop_tol=1e-13) for e in deformed]
        deformed_minus = [Operator(e.matrix, basis, drop_tol=1e-13) for e in deformed_minus]
    d = {order[0]: 2, order[1]: 1}
    out = {}
    for slot, idx in enumerate(order):
        t = pair[idx]
        out[idx] = ChevalleyTriple(t.label, deformed[slot], deformed_minus[slot], t.h, d[idx], q)
    return AlgebraRealization("so_q(5)", [out[0], out[1]], a, q)


def symmetrizer(a: np.ndarray, dmax: int = 3) -> list[int]:
    """Smallest positive integers d with d_i a_ij = d_j a_ji."""
    r = a.shape[0]
    for d in itertools.product(range(1, dmax + 1), repeat=r):
        da = np.array(d)[:, None] * a
        if np.array_equal(da, da.T):
            return list(d)
    raise RelationError(f"Cartan matrix {a.tolist()} is not symmetrizable")


def check_classical(triples, a=None, tol: float = 1e-12):
    """Chevalley check at q = 1 for a list of ClassicalTriples."""
    a = pair_cartan_matrix(triples) if a is None else np.asarray(a)
    d = symmetrizer(a)
    ts = [ChevalleyTriple(t.label, t.e_plus, t.e_minus, t.h, di) for t, di in zip(triples, d)]
    return check_chevalley(AlgebraRealization("classical", ts, a, as_parameter(1.0)), tol=tol)

