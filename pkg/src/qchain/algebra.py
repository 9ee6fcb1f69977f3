"""Chevalley generators, relation checks and the basic q-boson realizations."""
from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .fock import (
    FockBasis,
    Operator,
    TensorSpace,
    bilinear,
    diag_function,
    number_op,
    q_power_op,
)
from .qnum import (
    DeformationParameter,
    as_parameter,
    q_binomial,
    q_number,
    require_valid,
)

DEFAULT_TOL = 1e-9


class RelationError(ValueError):
    """An input was expected to satisfy algebra relations and does not."""


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def q_commutator(a: Operator, b: Operator, qs) -> Operator:
    """[A, B]_q = AB - q BA for a scalar q."""
    if isinstance(qs, DeformationParameter):
        qs = qs.q
    return a @ b - complex(qs) * (b @ a)


def q_bracket_diag(h: Operator, q) -> Operator:
    """[h]_q for a diagonal h, evaluated entrywise."""
    if not h.is_diagonal():
        raise ValueError("q-bracket of a non-diagonal operator")
    return Operator.diagonal(q_number(h.diag().real, q), h.domain)


def cartan_matrix(kind: str, rank: int) -> np.ndarray:
    """Cartan matrices a_ij = <alpha_i^vee, alpha_j> in the convention [h_i, e_j] = a_ij e_j."""
    a = 2 * np.eye(rank, dtype=int)
    for i in range(rank - 1):
        a[i, i + 1] = a[i + 1, i] = -1
    if kind == "A":
        return a
    if kind == "B2":
        # node 1 long: [h_2, e_1] = -2 e_1
        return np.array([[2, -1], [-2, 2]])
    raise ValueError(f"unsupported Cartan type {kind}")


@dataclass
class ChevalleyTriple:
    """One node (E+, E-, H) of a deformed algebra with q_i = q^d."""

    label: str
    e_plus: Operator
    e_minus: Operator
    h: Operator
    d: int = 1
    q: DeformationParameter | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("length exponent d must be a positive integer")
        if not self.h.is_diagonal():
            raise ValueError(f"{self.label}: H must be diagonal in the occupation basis")
        hd = self.h.diag()
        if np.abs(hd - np.round(hd.real)).max(initial=0.0) > 1e-12:
            raise ValueError(f"{self.label}: H must have integer eigenvalues")
        if self.q is not None and self.q.kind == "real":
            if (self.e_minus - self.e_plus.H).norm() > 1e-12:
                raise ValueError(f"{self.label}: E- is not the adjoint of E+ at real q")

    @property
    def space(self):
        return self.h.domain

    def with_d(self, d: int) -> ChevalleyTriple:
        return ChevalleyTriple(self.label, self.e_plus, self.e_minus, self.h, d, self.q)


def make_triple(label: str, e_plus: Operator, h: Operator, q, d: int = 1) -> ChevalleyTriple:
    """Triple with E- taken as the formal adjoint (transpose) of E+.

    For real q this is the Hermitian adjoint; for a phase q it keeps q
    unconjugated, which is what the defining relations need.
    """
    return ChevalleyTriple(label, e_plus, e_plus.T, h, d, as_parameter(q))


@dataclass
class ExtraCartan:
    """Additional diagonal element with known weights on each E_j^+."""

    label: str
    op: Operator
    weights: Sequence[int]


@dataclass
class AlgebraRealization:
    name: str
    triples: list[ChevalleyTriple]
    cartan_matrix: np.ndarray
    q: DeformationParameter
    extra_cartans: list[ExtraCartan] = field(default_factory=list)

    def __post_init__(self):
        a = np.asarray(self.cartan_matrix, dtype=int)
        r = len(self.triples)
        if a.shape != (r, r):
            raise ValueError(f"{self.name}: Cartan matrix shape {a.shape} for rank {r}")
        if not np.all(np.diag(a) == 2):
            raise ValueError(f"{self.name}: Cartan matrix diagonal must be 2")
        self.cartan_matrix = a
        self.q = as_parameter(self.q)

    @property
    def rank(self) -> int:
        return len(self.triples)

    @property
    def d(self) -> list[int]:
        return [t.d for t in self.triples]

    def symmetrizability_defect(self) -> int:
        d = np.array(self.d)
        da = d[:, None] * self.cartan_matrix
        return int(np.abs(da - da.T).max(initial=0))


@dataclass(frozen=True)
class RelationEntry:
    relation: str
    residual: float
    passed: bool


@dataclass
class RelationReport:
    entries: list[RelationEntry] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    conventions: dict[str, str] = field(default_factory=dict)

    def add(self, relation: str, residual: float, tol: float | None = None):
        tol = self.tol if tol is None else tol
        self.entries.append(RelationEntry(relation, float(residual), bool(residual < tol)))

    def extend(self, other: RelationReport, prefix: str = ""):
        for e in other.entries:
            self.entries.append(RelationEntry(prefix + e.relation, e.residual, e.passed))
        self.conventions.update(other.conventions)

    @property
    def max_residual(self) -> float:
        return max((e.residual for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def select(self, prefix: str) -> RelationReport:
        out = RelationReport(tol=self.tol, conventions=dict(self.conventions))
        out.entries = [e for e in self.entries if e.relation.startswith(prefix)]
        return out

    def to_text(self) -> str:
        lines = [f"{e.relation}\t{e.residual:.3e}\t{'PASS' if e.passed else 'FAIL'}"
                 for e in self.entries]
        for k, v in self.conventions.items():
            lines.append(f"# convention {k}: {v}")
        lines.append(f"# max_residual {self.max_residual:.3e} tol {self.tol:.1e} "
                     f"{'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "entries": [{"relation": e.relation, "residual": e.residual, "passed": e.passed}
                        for e in self.entries],
            "conventions": self.conventions,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# --- relation checks -------------------------------------------------------

def check_chevalley(realization: AlgebraRealization, q=None, tol: float = DEFAULT_TOL
                    ) -> RelationReport:
    q = realization.q if q is None else as_parameter(q)
    rep = RelationReport(tol=tol)
    ts = realization.triples
    a = realization.cartan_matrix
    rep.add("cartan.symmetrizable", realization.symmetrizability_defect())
    for i, ti in enumerate(ts):
        hq = q_bracket_diag(ti.h, q.power(ti.d))
        for j, tj in enumerate(ts):
            r = commutator(ti.e_plus, tj.e_minus)
            if i == j:
                r = r - hq
            rep.add(f"[{ti.label}+,{tj.label}-]", r.norm())
    for i, ti in enumerate(ts):
        for j, tj in enumerate(ts[i + 1:], start=i + 1):
            rep.add(f"[H{ti.label},H{tj.label}]", commutator(ti.h, tj.h).norm())
    for i, ti in enumerate(ts):
        for j, tj in enumerate(ts):
            rep.add(f"[H{ti.label},{tj.label}+]",
                    (commutator(ti.h, tj.e_plus) - a[i, j] * tj.e_plus).norm())
            rep.add(f"[H{ti.label},{tj.label}-]",
                    (commutator(ti.h, tj.e_minus) + a[i, j] * tj.e_minus).norm())
    for x in realization.extra_cartans:
        for t in ts:
            rep.add(f"[H{t.label},{x.label}]", commutator(t.h, x.op).norm())
        for w, t in zip(x.weights, ts):
            rep.add(f"[{x.label},{t.label}+]", (commutator(x.op, t.e_plus) - w * t.e_plus).norm())
            rep.add(f"[{x.label},{t.label}-]", (commutator(x.op, t.e_minus) + w * t.e_minus).norm())
    return rep


def serre_element(ei: Operator, ej: Operator, a_ij: int, qi) -> Operator:
    m = 1 - a_ij
    out = Operator.zeros(ei.domain)
    for n in range(m + 1):
        out = out + ((-1) ** n * q_binomial(m, n, qi)) * ((ei ** (m - n)) @ ej @ (ei ** n))
    return out


def check_serre(realization: AlgebraRealization, q=None, tol: float = DEFAULT_TOL
                ) -> RelationReport:
    q = realization.q if q is None else as_parameter(q)
    rep = RelationReport(tol=tol)
    ts = realization.triples
    a = realization.cartan_matrix
    for sign in "+-":
        for i, ti in enumerate(ts):
            qi = q.power(ti.d)
            for j, tj in enumerate(ts):
                if i == j:
                    continue
                ei = ti.e_plus if sign == "+" else ti.e_minus
                ej = tj.e_plus if sign == "+" else tj.e_minus
                rep.add(f"serre({ti.label},{tj.label}){sign}",
                        serre_element(ei, ej, int(a[i, j]), qi).norm())
    return rep


def check_triple(triple: ChevalleyTriple, q=None, tol: float = DEFAULT_TOL) -> RelationReport:
    q = triple.q if q is None else as_parameter(q)
    alg = AlgebraRealization(triple.label, [triple], np.array([[2]]), q)
    return check_chevalley(alg, q, tol)


# --- gl_q(n) ---------------------------------------------------------------

def build_glq(basis: FockBasis, q, n_modes: int = 6) -> AlgebraRealization:
    """q-boson realization e_i^+ = b_i^+ b_{i+1}, h_i = N_i - N_{i+1}, plus N_k and h0."""
    if basis.n_modes != n_modes:
        raise ValueError(f"gl_q({n_modes}) needs a {n_modes}-mode sector, got {basis}")
    q = require_valid(q, basis.total)
    n = [number_op(basis, k) for k in range(n_modes)]
    triples = [make_triple(f"e{i + 1}", bilinear(basis, i, i + 1, q), n[i] - n[i + 1], q)
               for i in range(n_modes - 1)]
    extras = []
    for k in range(n_modes):
        # [n_k, e_j^+] = (delta_kj - delta_{k-1,j}) e_j^+
        w = [int(k == j) - int(k - 1 == j) for j in range(n_modes - 1)]
        extras.append(ExtraCartan(f"n{k + 1}", n[k], w))
    h0 = sum(n[1:], n[0])
    extras.append(ExtraCartan("h0", h0, [0] * (n_modes - 1)))
    return AlgebraRealization(f"gl_q({n_modes})", triples, cartan_matrix("A", n_modes - 1), q,
                              extras)


def restrict_glq(full: AlgebraRealization, k: int) -> AlgebraRealization:
    """gl_q(k) on the first k modes: drop e_k.., h_k.. and N_{k+1}.."""
    triples = full.triples[:k - 1]
    ns = [x for x in full.extra_cartans if x.label.startswith("n")][:k]
    extras = [ExtraCartan(x.label, x.op, list(x.weights[:k - 1])) for x in ns]
    h0 = sum((x.op for x in ns[1:]), ns[0].op)
    extras.append(ExtraCartan("h0", h0, [0] * (k - 1)))
    return AlgebraRealization(f"gl_q({k})", triples, cartan_matrix("A", k - 1), full.q, extras)


# --- sl_q(2) ---------------------------------------------------------------

def build_slq2_bosonic(basis: FockBasis, q) -> ChevalleyTriple:
    """J+ = b1^+ b2, J- = b2^+ b1, H = 2 J0 = N1 - N2; sector N carries j = N/2."""
    if basis.n_modes != 2:
        raise ValueError(f"sl_q(2) bosonic realization needs 2 modes, got {basis}")
    q = require_valid(q, basis.total)
    h = number_op(basis, 0) - number_op(basis, 1)
    return make_triple("J", bilinear(basis, 0, 1, q), h, q)


def casimir_slq2(triple: ChevalleyTriple, q=None, tol: float = DEFAULT_TOL) -> Operator:
    """C = E- E+ + [J0]_q [J0 + 1]_q with J0 = H/2.

    Its eigenvalue on a spin-j block is [j]_q [j+1]_q.
    """
    q = triple.q if q is None else as_parameter(q)
    report = check_triple(triple, q, tol)
    if not report.passed:
        raise RelationError(f"{triple.label} is not an sl_q(2) triple "
                            f"(residual {report.max_residual:.2e})")
    qi = q.power(triple.d)
    j0 = triple.h.diag().real / 2
    diag = q_number(j0, qi) * q_number(j0 + 1, qi)
    return triple.e_minus @ triple.e_plus + Operator.diagonal(diag, triple.space)


def coproduct_rep(tv: ChevalleyTriple, tw: ChevalleyTriple, q=None) -> ChevalleyTriple:
    """Delta(e) = e (x) q_i^{h/2} + q_i^{-h/2} (x) e and Delta(h) = h (x) 1 + 1 (x) h."""
    if q is None:
        q = tv.q
    q = as_parameter(q)
    for t in (tv, tw):
        if t.q is not None and t.q != q:
            raise ValueError(f"triple {t.label} was built at {t.q}, not {q}")
    if tv.d != tw.d:
        raise ValueError("coproduct of triples with different length exponents")
    qi = q.power(tv.d)
    space = TensorSpace(tv.space, tw.space)

    def k(t, sign):
        return sp.diags_array(qi.pow(sign * t.h.diag().real / 2), format="csr")

    def lift(ev, ew):
        m = sp.kron(ev.matrix, k(tw, +1)) + sp.kron(k(tv, -1), ew.matrix)
        return Operator(m, space)

    iv = sp.identity(tv.space.dim, format="csr")
    iw = sp.identity(tw.space.dim, format="csr")
    h = Operator(sp.kron(tv.h.matrix, iw) + sp.kron(iv, tw.h.matrix), space)
    return ChevalleyTriple(f"D({tv.label},{tw.label})", lift(tv.e_plus, tw.e_plus),
                           lift(tv.e_minus, tw.e_minus), h, tv.d, q)


def check_q_tensor(triple: ChevalleyTriple, components: dict, k: float, q=None,
                   target_triple: ChevalleyTriple | None = None,
                   tol: float = DEFAULT_TOL) -> RelationReport:
    """Residuals of the sl_q(2) q-tensor relations

        [J+-, T_m]_{q^-m} q^{-J0} = sqrt([k -+ m][k +- m + 1]) T_{m+-1},
        [J0, T_m] = m T_m.

    Components may change sectors; ``target_triple`` then supplies the
    generators on the codomain.
    """
    q = triple.q if q is None else as_parameter(q)
    out_t = triple if target_triple is None else target_triple
    ms = [k - i for i in range(int(round(2 * k)) + 1)]
    missing = [m for m in ms if not any(abs(m - key) < 1e-9 for key in components)]
    if missing:
        raise KeyError(f"missing q-tensor components for m in {missing}")
    comp = {m: next(v for key, v in components.items() if abs(m - key) < 1e-9) for m in ms}
    j0_in = triple.h.diag().real / 2
    qj0 = Operator.diagonal(q.pow(-j0_in), triple.space)
    j0_out = Operator.diagonal(out_t.h.diag().real / 2, out_t.space)
    j0_in_op = Operator.diagonal(j0_in, triple.space)
    rep = RelationReport(tol=tol)
    for m in ms:
        t = comp[m]
        for sign, jin, jout in ((+1, triple.e_plus, out_t.e_plus),
                                (-1, triple.e_minus, out_t.e_minus)):
            lhs = (jout @ t - complex(q.pow(-m)) * (t @ jin)) @ qj0
            coeff = np.sqrt(q_number(k - sign * m, q) * q_number(k + sign * m + 1, q)
                            + 0j)
            target = next((v for key, v in comp.items() if abs(key - (m + sign)) < 1e-9), None)
            if target is not None:
                lhs = lhs - complex(coeff) * target
            rep.add(f"T[{m:+g}] J{'+' if sign > 0 else '-'}", lhs.norm())
        rep.add(f"T[{m:+g}] J0", (j0_out @ t - t @ j0_in_op - m * t).norm())
    return rep


# --- so_q(3) and so_q(5) building blocks ------------------------------------

class LadderSet(NamedTuple):
    plus: Operator
    minus: Operator
    zero: Operator


def _dressing(basis: FockBasis, mode: int, q) -> Operator:
    """sqrt(q^N + q^-N) for one mode, real positive inside the validity domain."""
    return diag_function(basis, lambda occ: np.sqrt(
        (q.pow(occ[:, mode]) + q.pow(-occ[:, mode])).real))


def build_soq3_nonstandard(basis: FockBasis, q, modes: Sequence[int] = (0, 1, 2)) -> LadderSet:
    """so_q(3) on three modes ordered (m = +1, 0, -1).

    L+ = q^{N-1} q^{-N0/2} sqrt(q^{N1}+q^{-N1}) b1^+ b0
       + b0^+ b-1 q^{N1} q^{-N0/2} sqrt(q^{N-1}+q^{-N-1}),   L0 = N1 - N-1.
    """
    p, z, m = modes
    if basis.n_modes < 3 or len(set(modes)) != 3:
        raise ValueError("so_q(3) realization needs three distinct modes")
    q = require_valid(q, basis.total, dressing_max=basis.total)

    def qpow(coef):
        return q_power_op(basis, coef, q)

    def lin(**c):
        v = np.zeros(basis.n_modes)
        for key, val in c.items():
            v[{"p": p, "z": z, "m": m}[key]] += val
        return v

    plus = (qpow(lin(m=1, z=-0.5)) @ _dressing(basis, p, q) @ bilinear(basis, p, z, q)
            + bilinear(basis, z, m, q) @ qpow(lin(p=1, z=-0.5)) @ _dressing(basis, m, q))
    zero = number_op(basis, p) - number_op(basis, m)
    return LadderSet(plus, plus.T, zero)


def soq3_closure_residual(ladders: LadderSet, q) -> float:
    """Distance of [L+, L-] from [2 L0]_q (measured; the realization is not required to close)."""
    target = q_bracket_diag(2 * ladders.zero, q)
    return (commutator(ladders.plus, ladders.minus) - target).norm()


def build_soq5_dboson(basis: FockBasis, q, modes: Sequence[int] = (0, 1, 2, 3, 4)
                      ) -> AlgebraRealization:
    """so_q(5) on five boson modes carrying m = 2, 1, 0, -1, -2.

    E1 is the long node (d = 2): two q^2-boson hops joined by coproduct-type
    q-powers. E2 (d = 1) is the so_q(3) ladder on the middle three modes.
    H1 = N1 - N2 + N4 - N5, H2 = 2 (N2 - N4).
    """
    if basis.n_modes < 5 or len(set(modes)) != 5:
        raise ValueError("so_q(5) realization needs five distinct modes")
    q = require_valid(q, basis.total, dressing_max=basis.total)
    m1, m2, m3, m4, m5 = modes
    n = {k: number_op(basis, k) for k in modes}

    def qpow(pairs):
        v = np.zeros(basis.n_modes)
        for k, c in pairs:
            v[k] += c
        return q_power_op(basis, v, q)

    def dr(k):
        return _dressing(basis, k, q)

    qq = complex(q.q + 1 / q.q)
    e1 = (dr(m1) @ bilinear(basis, m1, m2, q) @ dr(m2) @ qpow([(m4, -1), (m5, 1)])
          + dr(m4) @ bilinear(basis, m4, m5, q) @ dr(m5) @ qpow([(m1, 1), (m2, -1)])) / qq
    e2 = build_soq3_nonstandard(basis, q, (m2, m3, m4)).plus
    h1 = n[m1] - n[m2] + n[m4] - n[m5]
    h2 = 2 * (n[m2] - n[m4])
    triples = [make_triple("E1", e1, h1, q, d=2), make_triple("E2", e2, h2, q, d=1)]
    return AlgebraRealization("so_q(5)", triples, cartan_matrix("B2", 2), q)


def check_adjoint_pairs(realization: AlgebraRealization, tol: float = DEFAULT_TOL
                        ) -> RelationReport:
    rep = RelationReport(tol=tol)
    for t in realization.triples:
        rep.add(f"adjoint({t.label})", (t.e_minus - t.e_plus.H).norm())
    return rep

