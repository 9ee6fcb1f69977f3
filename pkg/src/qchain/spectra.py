"""Deformed rotator spectra, Hamiltonians from chain invariants, and (K, tau) fits."""
from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import casimir_slq2, commutator
from .chains import ChainRealization, build_chain
from .fock import Operator, build_basis, one_body
from .qnum import DeformationParameter, as_parameter, q_number, require_valid

HERMITIAN_TOL = 1e-10
CLUSTER_TOL = 1e-8
GRID_STEP = math.pi / 2000


class FitError(ValueError):
    pass


def _check_spin(j: float) -> float:
    j = float(j)
    if j < 0 or abs(2 * j - round(2 * j)) > 1e-12:
        raise ValueError(f"j must be a nonnegative integer or half-integer, got {j}")
    return round(2 * j) / 2


def rotator_spectrum(K: float, q, j_list, check_domain: bool = True
                     ) -> list[tuple[float, float]]:
    """E_j = K [j]_q [j+1]_q.

    ``check_domain=False`` skips the positivity check on [j_max + 1]_q so the
    formula can be evaluated past the physical range.
    """
    q = as_parameter(q)
    js = [_check_spin(j) for j in j_list]
    if not js:
        return []
    if check_domain:
        require_valid(q, int(math.ceil(max(js))) + 1)
    return [(j, float(K * q_number(j, q) * q_number(j + 1, q))) for j in js]


def rotator_sine_form(K: float, tau: float, j) -> float:
    """Closed form K sin(tau j) sin(tau (j+1)) / sin^2(tau) for q = e^{i tau}."""
    return K * math.sin(tau * j) * math.sin(tau * (j + 1)) / math.sin(tau) ** 2


# --- levels and fitting -----------------------------------------------------

@dataclass(frozen=True)
class Level:
    j: float
    energy: float
    weight: float = 1.0


@dataclass
class LevelScheme:
    levels: list[Level]

    def __post_init__(self):
        self.levels = [Level(_check_spin(lv.j), float(lv.energy), float(lv.weight))
                       for lv in self.levels]
        js = [lv.j for lv in self.levels]
        if len(set(js)) != len(js):
            raise ValueError("level j values must be distinct")
        if any(lv.weight <= 0 for lv in self.levels):
            raise ValueError("level weights must be positive")

    @classmethod
    def from_pairs(cls, pairs, weights=None) -> LevelScheme:
        weights = [1.0] * len(pairs) if weights is None else weights
        return cls([Level(j, e, w) for (j, e), w in zip(pairs, weights)])

    @property
    def j(self) -> np.ndarray:
        return np.array([lv.j for lv in self.levels])

    @property
    def energy(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    @property
    def weight(self) -> np.ndarray:
        return np.array([lv.weight for lv in self.levels])


@dataclass
class FitResult:
    K: float
    tau: float
    kind: str
    rms: float
    residuals: list[tuple[float, float, float, float]] = field(default_factory=list)

    @property
    def parameter(self) -> DeformationParameter:
        if self.kind == "phase":
            return DeformationParameter.phase(self.tau)
        return DeformationParameter.real(math.exp(self.tau))

    def to_dict(self) -> dict:
        return {"K": self.K, "tau": self.tau, "kind": self.kind, "rms": self.rms,
                "residuals": [{"j": j, "energy": e, "model": m, "residual": r}
                              for j, e, m, r in self.residuals]}

    def to_text(self) -> str:
        label = "tau" if self.kind == "phase" else "lambda"
        lines = [f"K\t{self.K:.12g}", f"{label}\t{self.tau:.12g}", f"rms\t{self.rms:.6e}",
                 "j\tenergy\tmodel\tresidual"]
        lines += [f"{j:g}\t{e:.12g}\t{m:.12g}\t{r:.6e}" for j, e, m, r in self.residuals]
        return "\n".join(lines) + "\n"


def _profile(x: float, j: np.ndarray, e: np.ndarray, w: np.ndarray, kind: str):
    q = DeformationParameter.phase(x) if kind == "phase" else DeformationParameter.real(math.exp(x))
    f = q_number(j, q) * q_number(j + 1, q)
    denom = float(np.sum(w * f * f))
    k = float(np.sum(w * e * f)) / denom if denom > 0 else 0.0
    return k, float(np.sum(w * (e - k * f) ** 2)), f


def fit_rotator(levels: LevelScheme, kind: str = "phase") -> FitResult:
    """Least-squares (K, tau) with K profiled out and a 1-D search in tau.

    For ``kind="real"`` the search variable is lambda = ln q >= 0 on the same
    grid; [j]_q [j+1]_q depends only on |lambda| or |tau|, so the sign is
    not identifiable and the nonnegative representative is returned.
    """
    if kind not in ("phase", "real"):
        raise ValueError(f"unknown kind {kind!r}")
    if len(levels.levels) < 2:
        raise FitError("underdetermined: at least two levels are needed")
    j, e, w = levels.j, levels.energy, levels.weight
    if np.any(j <= 0):
        raise FitError("fit levels need j > 0")
    if not np.any(e != 0):
        raise FitError("degenerate input: all energies are zero")
    jmax = float(j.max())
    # [jmax + 1]_q must stay positive on the phase branch
    x_max = math.pi / (jmax + 1)
    grid = np.arange(0.0, x_max, GRID_STEP)

    def obj(x):
        return _profile(x, j, e, w, kind)[1]

    values = np.array([obj(x) for x in grid])
    k0 = int(np.argmin(values))
    best_x, best_v = float(grid[k0]), float(values[k0])
    lo = grid[max(k0 - 1, 0)]
    hi = min(grid[min(k0 + 1, len(grid) - 1)], x_max * (1 - 1e-12))
    if hi > lo:
        res = minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13, "maxiter": 500})
        if res.fun <= best_v:
            best_x, best_v = float(res.x), float(res.fun)
    k_hat, _, f = _profile(best_x, j, e, w, kind)
    model = k_hat * f
    resid = e - model
    rms = math.sqrt(float(np.sum(w * resid ** 2) / np.sum(w)))
    rows = [(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(j, e, model, resid)]
    return FitResult(k_hat, best_x, kind, rms, rows)


def read_levels(path) -> LevelScheme:
    """Levels from JSON (a list of records, or {"levels": [...]}) or CSV with a header.

    Field names: ``j``, ``energy`` and optional ``weight``.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith(("[", "{")):
        data = json.loads(text)
        if isinstance(data, dict):
            data = data["levels"]
        records = data
    else:
        records = list(csv.DictReader(io.StringIO(text)))
    try:
        return LevelScheme([Level(float(r["j"]), float(r["energy"]),
                                  float(r.get("weight") or 1.0)) for r in records])
    except KeyError as exc:
        raise ValueError(f"level record is missing field {exc}") from None


def write_levels(levels: LevelScheme, path):
    path = Path(path)
    rows = [{"j": lv.j, "energy": lv.energy, "weight": lv.weight} for lv in levels.levels]
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps({"levels": rows}, indent=2) + "\n")
    else:
        with path.open("w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=["j", "energy", "weight"])
            wr.writeheader()
            wr.writerows(rows)


def spectrum_csv(rows: Sequence[tuple[float, float]]) -> str:
    out = ["j,energy"] + [f"{j:g},{e:.12g}" for j, e in rows]
    return "\n".join(out) + "\n"


# --- Hamiltonians -------------------------------------------------------------

def lie_closure(mats: Sequence[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (trace form) of the real Lie algebra of anti-Hermitian
    matrices generated by i X for the Hermitian parts X of ``mats``."""
    seeds = []
    for m in mats:
        seeds += [(m + m.conj().T) / 2, (m - m.conj().T) / 2j]
    basis: list[np.ndarray] = []

    def add(x):
        v = x.copy()
        for b in basis:
            v = v - np.vdot(b, v).real * b
        n = math.sqrt(max(np.vdot(v, v).real, 0.0))
        if n > tol:
            basis.append(v / n)
            return True
        return False

    for s in seeds:
        add(s)
    k = 0
    while k < len(basis):
        for i in range(k + 1):
            c = (basis[i] @ basis[k] - basis[k] @ basis[i]) / 1j
            add(c)
        k += 1
    return np.array(basis)


def _single_particle(chain: ChainRealization, name: str) -> list[np.ndarray]:
    one = build_chain(chain.kind, build_basis(chain.basis.n_modes, 1), 1.0)
    if name == "so_q(3)":
        ts = [one.so3]
    else:
        ts = one.subalgebras[name].triples
    mats = []
    for t in ts:
        mats += [t.e_plus.toarray(), t.h.toarray()]
    return mats


def classical_casimir(chain: ChainRealization, name: str) -> Operator:
    """Sum of X_a^2 over a trace-orthonormal Hermitian basis of the undeformed subalgebra."""
    gens = lie_closure(_single_particle(chain, name))
    out = Operator.zeros(chain.basis)
    for x in gens:
        lifted = one_body(chain.basis, x)
        out = out + lifted @ lifted
    return out


def invariant_ids(chain: ChainRealization) -> list[str]:
    subs = list(chain.subalgebras) + ["so_q(3)"]
    return ["casimir_soq3"] + [f"casimir_classical:{s}" for s in subs]


def resolve_invariant(chain: ChainRealization, term) -> Operator:
    if isinstance(term, Operator):
        return term
    if term == "casimir_soq3":
        return casimir_slq2(chain.so3, chain.q)
    if isinstance(term, str) and term.startswith("casimir_classical:"):
        name = term.split(":", 1)[1]
        if name != "so_q(3)" and name not in chain.subalgebras:
            raise KeyError(f"unknown subalgebra {name!r}; have {sorted(chain.subalgebras)}")
        return classical_casimir(chain, name)
    raise KeyError(f"unknown invariant {term!r}; available: {invariant_ids(chain)}")


def build_hamiltonian(chain: ChainRealization, terms) -> Operator:
    """Sum of coefficient * invariant; every term must commute with L0."""
    h = Operator.zeros(chain.basis)
    l0 = chain.l0
    for term, coeff in terms:
        op = resolve_invariant(chain, term)
        if op.domain != chain.basis or op.codomain != chain.basis:
            raise ValueError(f"term {term!r} does not act on {chain.basis}")
        scale = max(1.0, op.norm())
        if commutator(l0, op).norm() > 1e-10 * scale:
            raise ValueError(f"term {term!r} does not conserve L0")
        h = h + float(coeff) * op
    return h


def symmetrize(builder: Callable[[DeformationParameter], Operator], q) -> Operator:
    """(H(q) + H(1/q)) / 2 for a phase q; H(q) itself for real q."""
    q = as_parameter(q)
    if q.kind == "real":
        return builder(q)
    a = builder(q)
    b = builder(q.inverse())
    # order-independent sum so that tau and -tau agree bit for bit
    return Operator((a.matrix + b.matrix) / 2, a.domain, a.codomain)


def eigenlevels(h: Operator) -> list[tuple[float, int]]:
    if not h.is_square:
        raise ValueError("eigenlevels needs a square operator")
    m = h.toarray()
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    defect = float(np.abs(m - m.conj().T).max(initial=0.0))
    if defect > HERMITIAN_TOL * scale:
        raise ValueError(f"operator is not Hermitian (defect {defect:.2e})")
    vals = np.linalg.eigvalsh((m + m.conj().T) / 2)
    tol = CLUSTER_TOL * max(1.0, float(np.abs(vals).max(initial=0.0)))
    out: list[tuple[float, int]] = []
    group = [vals[0]] if len(vals) else []
    for v in vals[1:]:
        if v - group[-1] <= tol:
            group.append(v)
        else:
            out.append((float(np.mean(group)), len(group)))
            group = [v]
    if group:
        out.append((float(np.mean(group)), len(group)))
    # exact zeros print as 0 rather than as roundoff
    return [(0.0 if abs(e) <= tol else e, n) for e, n in out]

