"""q-analogues of the three U(6) embedding chains on 6-mode q-boson sectors.

Mode conventions (0-based indices into the occupation tuple):

* vibrational: modes 0..4 carry the d boson with m = 2, 1, 0, -1, -2 and
  mode 5 the s boson, so L0 = 2N1 + N2 - N4 - 2N5;
* rotational and gamma-unstable: L0 = 2N1 + N2 - N5 - 2N6, modes 2 and 3
  both carry m = 0.

Every chain keeps its subalgebras as AlgebraRealizations, the so_q(3) set as
a ChevalleyTriple with H = 2 L0, and the Cartan identities linking them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraRealization,
    ChevalleyTriple,
    RelationReport,
    build_glq,
    build_soq3_nonstandard,
    build_soq5_dboson,
    cartan_matrix,
    check_adjoint_pairs,
    check_chevalley,
    check_serre,
    commutator,
    make_triple,
    q_bracket_diag,
    q_commutator,
    restrict_glq,
)
from .fock import FockBasis, Operator, bilinear, build_basis, q_power_op
from .maps import (
    ClassicalTriple,
    cz_deform,
    song_factor,
    sp4_deform,
    spin_decomposition,
)
from .qnum import DeformationParameter, as_parameter, q_number, require_valid

ChainKind = Literal["vibrational", "rotational", "gamma"]
CHAIN_KINDS = ("vibrational", "rotational", "gamma")


@dataclass
class ChainRealization:
    kind: str
    basis: FockBasis
    q: DeformationParameter
    subalgebras: dict[str, AlgebraRealization]
    so3: ChevalleyTriple
    classical_l: ClassicalTriple
    cartan_identities: list[tuple[str, Operator, Operator]]
    terms: dict[str, list[Operator]] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    conventions: dict[str, str] = field(default_factory=dict)

    @property
    def l0(self) -> Operator:
        return self.so3.h / 2

    def generators(self) -> dict[str, Operator]:
        """Raising generators by label, including L+."""
        out = {}
        for name, alg in self.subalgebras.items():
            for t in alg.triples:
                out[f"{name}.{t.label}"] = t.e_plus
        out["so_q(3).L+"] = self.so3.e_plus
        return out


def _require_six(basis: FockBasis):
    if basis.n_modes != 6:
        raise ValueError(f"embedding chains live on 6-mode sectors, got {basis}")


def _validate(q, basis: FockBasis) -> DeformationParameter:
    # ladders need [n] > 0 up to N; the CZ blocks reach [2j+1] with j <= 2N
    return require_valid(q, 4 * basis.total + 1, dressing_max=basis.total)


def _lin(basis: FockBasis, **coeffs) -> np.ndarray:
    """Linear form in the occupations from keywords n1..n6 (1-based)."""
    v = np.zeros(basis.n_modes)
    for key, c in coeffs.items():
        v[int(key[1:]) - 1] += c
    return v


def _n(basis: FockBasis, **coeffs) -> Operator:
    return Operator.diagonal(basis.occupations @ _lin(basis, **coeffs), basis)


def _classical_so3(basis: FockBasis, l_plus: Operator, l0: Operator) -> ClassicalTriple:
    return ClassicalTriple("L", l_plus, l_plus.H, 2 * l0)


def _dressed(basis, q, i, j, e=None):
    """sqrt(N_i/[N_i]) e sqrt(N_j/[N_j]) with e = b_i^+ b_j by default (1-based modes)."""
    if e is None:
        e = bilinear(basis, i - 1, j - 1, q)
    return song_factor(basis, i - 1, q) @ e @ song_factor(basis, j - 1, q)


def _glq_e(glq: AlgebraRealization, i: int) -> Operator:
    return glq.triples[i - 1].e_plus


def _composite(basis, q, glq, a, b, i, j, k):
    """sqrt(N_i/[N_i]) [e_a, e_b]_q sqrt(N_j/[N_j]) q^{N_k}: the undeformed b~_i^+ b~_j."""
    qc = q_commutator(_glq_e(glq, a), _glq_e(glq, b), q)
    return _dressed(basis, q, i, j, qc) @ q_power_op(basis, _lin(basis, **{f"n{k}": 1}), q)


def _one_body_of(basis: FockBasis, op_builder) -> np.ndarray:
    """Single-particle matrix of a one-body operator, read off the N = 1 sector."""
    return op_builder(build_basis(basis.n_modes, 1)).toarray()


def build_vibrational(basis: FockBasis, q) -> ChainRealization:
    """gl_q(6) > gl_q(5) > so_q(5) > so_q(3)."""
    _require_six(basis)
    q = _validate(q, basis)
    glq6 = build_glq(basis, q)
    glq5 = restrict_glq(glq6, 5)
    so5 = build_soq5_dboson(basis, q, modes=(0, 1, 2, 3, 4))
    s6 = np.sqrt(6)
    l_plus = (2 * (_dressed(basis, q, 1, 2, _glq_e(glq6, 1)) + _dressed(basis, q, 4, 5, _glq_e(glq6, 4)))
              + s6 * (_dressed(basis, q, 2, 3, _glq_e(glq6, 2))
                      + _dressed(basis, q, 3, 4, _glq_e(glq6, 3))))
    l0 = _n(basis, n1=2, n2=1, n4=-1, n5=-2)
    classical = _classical_so3(basis, l_plus, l0)
    so3 = cz_deform(classical, q)
    h1, h2 = (t.h for t in so5.triples)
    identities = [("L0 = 2 H1 + 3/2 H2 [so_q(5)]", l0, 2 * h1 + 1.5 * h2)]
    return ChainRealization(
        "vibrational", basis, q,
        {"gl_q(5)": glq5, "so_q(5)": so5},
        so3, classical, identities,
        terms={f"so_q(5).{t.label}": _split_hops(t.e_plus, basis) for t in so5.triples},
        provenance={
            "gl_q(5)": "b_i^+ b_{i+1}, i = 1..4, with N6 dropped",
            "so_q(5)": "q^2-boson hops on (1,2),(4,5) and the so_q(3) ladder on (2,3,4)",
            "so_q(3)": "CZ map of 2(b~1+ b~2 + b~4+ b~5) + sqrt6 (b~2+ b~3 + b~3+ b~4)",
        },
        conventions={"so_q(5) d": "(2, 1): E1 long", "so_q(5) Cartan": "[[2,-1],[-2,2]]"},
    )


def _split_hops(op: Operator, basis: FockBasis) -> list[Operator]:
    """Split a sum of hops into pieces with a single occupation transfer each."""
    m = op.matrix.tocoo()
    occ = basis.occupations
    groups: dict[tuple, list[int]] = {}
    for k, (r, c) in enumerate(zip(m.row, m.col)):
        groups.setdefault(tuple(occ[r] - occ[c]), []).append(k)
    out = []
    for key in sorted(groups):
        idx = groups[key]
        mat = np.zeros(op.shape, dtype=complex)
        mat[m.row[idx], m.col[idx]] = m.data[idx]
        out.append(Operator(mat, basis))
    return out


def rotational_sl3(basis: FockBasis, q) -> AlgebraRealization:
    """sl_q(3) inside gl_q(6) on symmetric sectors.

    Each raising generator is an so_q(3) ladder on three modes joined to a
    single hop by coproduct-type q-powers:
      E1 = L+(1,2,4) q^{-(N3-N5)/2} + b3^+ b5 q^{N1-N4}
      E2 = L+(4,5,6) q^{(N2-N3)/2} + b2^+ b3 q^{-(N4-N6)}
    """
    ladder1 = build_soq3_nonstandard(basis, q, (0, 1, 3)).plus
    ladder2 = build_soq3_nonstandard(basis, q, (3, 4, 5)).plus
    e1 = (ladder1 @ q_power_op(basis, _lin(basis, n3=-0.5, n5=0.5), q)
          + bilinear(basis, 2, 4, q) @ q_power_op(basis, _lin(basis, n1=1, n4=-1), q))
    e2 = (ladder2 @ q_power_op(basis, _lin(basis, n2=0.5, n3=-0.5), q)
          + bilinear(basis, 1, 2, q) @ q_power_op(basis, _lin(basis, n4=-1, n6=1), q))
    h1 = _n(basis, n1=2, n4=-2, n3=1, n5=-1)
    h2 = _n(basis, n2=1, n3=-1, n4=2, n6=-2)
    triples = [make_triple("E1", e1, h1, q), make_triple("E2", e2, h2, q)]
    return AlgebraRealization("sl_q(3)", triples, cartan_matrix("A", 2), q)


def build_rotational(basis: FockBasis, q) -> ChainRealization:
    """gl_q(6) > sl_q(3) > so_q(3)."""
    _require_six(basis)
    q = _validate(q, basis)
    glq6 = build_glq(basis, q)
    sl3 = rotational_sl3(basis, q)
    s2 = np.sqrt(2)
    l_plus = (2 * (_dressed(basis, q, 1, 2, _glq_e(glq6, 1))
                   + _composite(basis, q, glq6, 2, 3, 2, 4, 3))
              + s2 * (_composite(basis, q, glq6, 3, 4, 3, 5, 4)
                      + _dressed(basis, q, 2, 3, _glq_e(glq6, 2)))
              + 2 * (_dressed(basis, q, 4, 5, _glq_e(glq6, 4))
                     + _dressed(basis, q, 5, 6, _glq_e(glq6, 5))))
    l0 = _n(basis, n1=2, n2=1, n5=-1, n6=-2)
    classical = _classical_so3(basis, l_plus, l0)
    so3 = cz_deform(classical, q)
    h1, h2 = (t.h for t in sl3.triples)
    return ChainRealization(
        "rotational", basis, q, {"sl_q(3)": sl3}, so3, classical,
        [("L0 = H1 + H2 [sl_q(3)]", l0, h1 + h2)],
        terms={f"sl_q(3).{t.label}": _split_hops(t.e_plus, basis) for t in sl3.triples},
        provenance={
            "sl_q(3)": "so_q(3) ladders on (1,2,4)/(4,5,6) plus hops b3+b5, b2+b3",
            "so_q(3)": "CZ map of 2(b~1+b~2 + b~2+b~4) + sqrt2(b~3+b~5 + b~2+b~3) "
                       "+ 2(b~4+b~5 + b~5+b~6)",
        },
        conventions={"sl_q(3) E1 dressing": "q^{-(N3-N5)/2} on the ladder term",
                     "sl_q(3) Cartan": "A2, d = (1, 1)"},
    )


def gamma_so6(basis: FockBasis, q) -> AlgebraRealization:
    """so_q(6) inside sl_q(6): three two-hop generators with half-integer q-powers."""
    def gen(i1, j1, p1, i2, j2, p2):
        return (bilinear(basis, i1 - 1, j1 - 1, q) @ q_power_op(basis, _lin(basis, **p1), q)
                + bilinear(basis, i2 - 1, j2 - 1, q) @ q_power_op(basis, _lin(basis, **p2), q))

    e1 = gen(2, 4, dict(n3=0.5, n5=-0.5), 3, 5, dict(n2=-0.5, n4=0.5))
    e2 = gen(1, 2, dict(n5=0.5, n6=-0.5), 5, 6, dict(n1=-0.5, n2=0.5))
    e3 = gen(2, 3, dict(n4=0.5, n5=-0.5), 4, 5, dict(n2=-0.5, n3=0.5))
    h1 = _n(basis, n2=1, n4=-1, n3=1, n5=-1)
    h2 = _n(basis, n1=1, n2=-1, n5=1, n6=-1)
    h3 = _n(basis, n2=1, n3=-1, n4=1, n5=-1)
    triples = [make_triple("E1", e1, h1, q), make_triple("E2", e2, h2, q),
               make_triple("E3", e3, h3, q)]
    # D3 = A3 with E2 as the middle node
    return AlgebraRealization("so_q(6)", triples, cartan_matrix("A", 3), q)


def gamma_classical_so5(basis: FockBasis, q) -> tuple[ClassicalTriple, ClassicalTriple]:
    """The undeformed so(5) pair assembled from dressed gl_q(6) generators."""
    def assemble(b):
        glq = build_glq(b, q)
        e1 = _dressed(b, q, 1, 2, _glq_e(glq, 1)) + _dressed(b, q, 5, 6, _glq_e(glq, 5))
        e2 = (_composite(b, q, glq, 2, 3, 2, 4, 3) + _composite(b, q, glq, 3, 4, 3, 5, 4)
              + _dressed(b, q, 2, 3, _glq_e(glq, 2)) + _dressed(b, q, 4, 5, _glq_e(glq, 4)))
        return e1, e2

    e1, e2 = assemble(basis)
    one = build_basis(basis.n_modes, 1)
    e1_1p, e2_1p = (x.toarray() for x in assemble(one))
    hh1 = _n(basis, n1=1, n5=1, n2=-1, n6=-1)
    hh2 = _n(basis, n2=2, n5=-2)
    h1_1p = np.diag(_lin(basis, n1=1, n5=1, n2=-1, n6=-1))
    h2_1p = np.diag(_lin(basis, n2=2, n5=-2))
    return (ClassicalTriple("E1", e1, e1.H, hh1, e1_1p, h1_1p),
            ClassicalTriple("E2", e2, e2.H, hh2, e2_1p, h2_1p))


def build_gamma(basis: FockBasis, q) -> ChainRealization:
    """gl_q(6) > so_q(6) > so_q(5) > so_q(3)."""
    _require_six(basis)
    q = _validate(q, basis)
    glq6 = build_glq(basis, q)
    so6 = gamma_so6(basis, q)
    pair = gamma_classical_so5(basis, q)
    so5 = sp4_deform(pair, q)
    # normalized so that [l+, l-] = 2 l0
    c_out, c_in = 2.0, np.sqrt(3.0)
    l_plus = (c_out * (_dressed(basis, q, 1, 2, _glq_e(glq6, 1))
                       + _dressed(basis, q, 5, 6, _glq_e(glq6, 5)))
              + c_in * (_composite(basis, q, glq6, 2, 3, 2, 4, 3)
                        + _composite(basis, q, glq6, 3, 4, 3, 5, 4)
                        + _dressed(basis, q, 2, 3, _glq_e(glq6, 2))
                        + _dressed(basis, q, 4, 5, _glq_e(glq6, 4))))
    l0 = _n(basis, n1=2, n2=1, n5=-1, n6=-2)
    classical = _classical_so3(basis, l_plus, l0)
    so3 = cz_deform(classical, q)
    h1, h2, h3 = (t.h for t in so6.triples)
    hh1, hh2 = (t.h for t in so5.triples)
    identities = [
        ("L0 = 3/2 (H1 + H3) + 2 H2 [so_q(6)]", l0, 1.5 * (h1 + h3) + 2 * h2),
        ("Hhat1 = H2", hh1, h2),
        ("Hhat2 = H1 + H3", hh2, h1 + h3),
        ("L0 = 2 Hhat1 + 3/2 Hhat2 [so_q(5)]", l0, 2 * hh1 + 1.5 * hh2),
    ]
    return ChainRealization(
        "gamma", basis, q, {"so_q(6)": so6, "so_q(5)": so5}, so3, classical, identities,
        terms={f"so_q(6).{t.label}": _split_hops(t.e_plus, basis) for t in so6.triples},
        provenance={
            "so_q(6)": "two-hop generators b_i^+ b_j q^{+-(N_k - N_l)/2}",
            "so_q(5)": "sp4_deform of (b~1+b~2 + b~5+b~6, b~2+b~4 + b~3+b~5 + b~2+b~3 + b~4+b~5)",
            "so_q(3)": "CZ map of 2(b~1+b~2 + b~5+b~6) + sqrt3(b~2+b~4 + b~3+b~5 + b~2+b~3 "
                       "+ b~4+b~5)",
        },
        conventions={"so_q(6) Cartan": "A3 ordering (E1, E2, E3), E2 middle, d = (1,1,1)",
                     "so_q(5) d": "(2, 1): Ehat1 long",
                     "so_q(5) map": "d-boson frame of (b3 + b4)/sqrt2"},
    )


BUILDERS = {"vibrational": build_vibrational, "rotational": build_rotational,
            "gamma": build_gamma}


def build_chain(kind: str, basis: FockBasis, q) -> ChainRealization:
    try:
        builder = BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown chain {kind!r}; expected one of {CHAIN_KINDS}") from None
    return builder(basis, q)


def cartan_identity_residual(lhs: Operator, rhs: Operator) -> float:
    return (lhs - rhs).norm()


def check_chain(chain: ChainRealization, q=None, tol: float = DEFAULT_TOL,
                serre: bool = True) -> RelationReport:
    q = chain.q if q is None else as_parameter(q)
    rep = RelationReport(tol=tol, conventions=dict(chain.conventions))
    for name, alg in chain.subalgebras.items():
        rep.extend(check_chevalley(alg, q, tol), prefix=f"{name} ")
        if serre:
            rep.extend(check_serre(alg, q, tol), prefix=f"{name} ")
    l_plus, l_minus, h = chain.so3.e_plus, chain.so3.e_minus, chain.so3.h
    rep.add("so_q(3) [L+,L-]-[2L0]", (commutator(l_plus, l_minus) - q_bracket_diag(h, q)).norm())
    l0 = chain.l0
    rep.add("so_q(3) [L0,L+]-L+", (commutator(l0, l_plus) - l_plus).norm())
    rep.add("so_q(3) [L0,L-]+L-", (commutator(l0, l_minus) + l_minus).norm())
    for label, lhs, rhs in chain.cartan_identities:
        rep.add(f"cartan {label}", cartan_identity_residual(lhs, rhs))
    if q.kind == "real":
        for name, alg in chain.subalgebras.items():
            rep.extend(check_adjoint_pairs(alg, tol), prefix=f"{name} ")
        rep.add("adjoint(L)", (l_minus - l_plus.H).norm())
    return rep


def so3_block_residual(chain: ChainRealization) -> float:
    """Largest deviation of the L+ singular values on each (j, m) -> (j, m+1) block
    from sqrt([j-m][j+m+1])."""
    q = chain.q
    m = chain.l0.diag().real
    lp = chain.so3.e_plus.toarray()
    worst = 0.0
    for j, proj in spin_decomposition(chain.classical_l).items():
        for mm in np.arange(-j, j):
            src = np.abs(m - mm) < 1e-9
            dst = np.abs(m - mm - 1) < 1e-9
            rank = int(round(np.trace(proj[np.ix_(src, src)]).real))
            if rank == 0:
                continue
            block = (proj @ lp @ proj)[np.ix_(dst, src)]
            sv = np.linalg.svd(block, compute_uv=False)[:rank]
            expect = np.sqrt(q_number(j - mm, q) * q_number(j + mm + 1, q))
            worst = max(worst, float(np.abs(sv - expect).max()))
    return worst


def term_weights(chain: ChainRealization) -> list[tuple[str, str, float, float]]:
    """For every single-hop term of every generator and every Cartan H of its
    subalgebra: (term label, Cartan label, fitted weight, residual of
    [H, term] - weight * term). Transcription errors show up as
    non-integer weights or nonzero residuals."""
    rows = []
    for label, pieces in chain.terms.items():
        sub = label.split(".")[0]
        for k, piece in enumerate(pieces):
            x = piece.toarray()
            den = np.vdot(x, x).real
            if den == 0:
                continue
            for t in chain.subalgebras[sub].triples:
                c = commutator(t.h, piece)
                a = float(np.vdot(x, c.toarray()).real / den)
                rows.append((f"{label}[{k}]", f"H{t.label}", a, (c - a * piece).norm()))
    return rows


@dataclass(frozen=True)
class LimitRow:
    generator: str
    eps: float
    distance: float


def classical_limit_check(kind: str, basis: FockBasis, eps_list) -> list[LimitRow]:
    """Infinity-norm distance of each raising generator at q = 1 + eps from its q = 1 value."""
    ref = build_chain(kind, basis, 1.0).generators()
    rows = []
    for eps in eps_list:
        if eps < 0:
            raise ValueError("eps must be nonnegative")
        gens = build_chain(kind, basis, 1.0 + eps).generators()
        for label, op in gens.items():
            rows.append(LimitRow(label, float(eps), (op - ref[label]).norm()))
    return rows


def limit_summary(rows: list[LimitRow]) -> dict[str, list[tuple[float, float]]]:
    """Per-generator (eps, distance) series plus the chain-wide maximum under '*'."""
    series: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        series.setdefault(r.generator, []).append((r.eps, r.distance))
    eps_values = sorted({r.eps for r in rows}, reverse=True)
    series["*"] = [(e, max(r.distance for r in rows if r.eps == e)) for e in eps_values]
    return series


def decade_ratios(points: list[tuple[float, float]]) -> list[float]:
    pts = sorted(points, reverse=True)
    return [d0 / d1 if d1 > 0 else float("inf") for (_, d0), (_, d1) in zip(pts, pts[1:])]
