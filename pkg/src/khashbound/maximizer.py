"""Maximization of Psi over pairs of probability vectors.

The maximum of Psi is attained at a point of one of seven boundary
families (a)-(g), each with at most two free parameters.  We scan each
family on a grid, polish, and take the best.  `global_check` is an
independent multistart projected-gradient search over the full product of
simplices, used to catch mistakes in the family list.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .psipoly import big_psi, big_psi_grad, psi, psi_grad
from .simplex import ProbVector, make_prob_vector, project_simplex, sample_simplex

FAMILIES = ("a", "b", "c", "d", "e", "f", "g")
N_PARAMS = {"a": 0, "b": 0, "c": 2, "d": 2, "e": 1, "f": 2, "g": 1}
CERTIFIED_K = (5, 6)
TIE_TOL = 1e-12
GRID_2D_MAX = 300
GOLDEN_XTOL = 1e-13


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    GRID_POLISH = "grid_polish"
    MULTISTART = "multistart"


@dataclass(frozen=True)
class CasePoint:
    family: str
    k: int
    params: tuple[float, ...] = ()

    def materialize(self) -> tuple[ProbVector, ProbVector]:
        return case_point(self.family, self.k, self.params)


@dataclass
class MaxResult:
    value: float
    argmax: tuple[ProbVector, ProbVector]
    family: str
    params: tuple[float, ...]
    method: Method
    objective: str = "big_psi"
    certified: bool = True
    candidates: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "family": self.family,
            "params": list(self.params),
            "method": self.method.value,
            "objective": self.objective,
            "certified": self.certified,
            "argmax": [self.argmax[0].tolist(), self.argmax[1].tolist()],
            "candidates": dict(self.candidates),
        }


def family_bounds(family: str, k: int) -> list[tuple[float, float]]:
    """Feasible range of each free parameter (alpha, delta) or (delta,)."""
    _check_family(family, k)
    if family in ("a", "b"):
        return []
    if family == "c":
        return [(0.0, 1.0 / (k - 4))] * 2
    if family == "d":
        return [(0.0, 1.0 / (k - 3))] * 2
    if family == "e":
        return [(0.0, 1.0 / (k - 2))]
    if family == "f":
        return [(0.0, 1.0 / (k - 2))] * 2
    return [(0.0, 1.0 / (k - 1))]


def _check_family(family: str, k: int) -> None:
    if family not in N_PARAMS:
        raise ValueError(f"unknown family {family!r}")
    if k < 5:
        raise ValueError("case families are defined for k >= 5")


def _materialize(family: str, k: int, params) -> tuple[np.ndarray, np.ndarray]:
    """Raw (p, q) arrays; params may be arrays of equal shape (batched)."""
    params = [np.asarray(x, dtype=np.float64) for x in params]
    shape = params[0].shape if params else ()
    p = np.zeros(shape + (k,))
    q = np.zeros(shape + (k,))
    if family == "a":
        p[..., 0] = 1.0
        q[..., 1:] = 1.0 / (k - 1)
    elif family == "b":
        p[...] = 1.0 / k
        q[...] = 1.0 / k
    elif family == "c":
        alpha, delta = params
        p[..., 2 : k - 2] = alpha[..., None]
        p[..., k - 2 :] = ((1.0 - (k - 4) * alpha) / 2)[..., None]
        q[..., :2] = ((1.0 - (k - 4) * delta) / 2)[..., None]
        q[..., 2 : k - 2] = delta[..., None]
    elif family == "d":
        alpha, delta = params
        p[..., 2 : k - 1] = alpha[..., None]
        p[..., k - 1] = 1.0 - (k - 3) * alpha
        q[..., :2] = ((1.0 - (k - 3) * delta) / 2)[..., None]
        q[..., 2 : k - 1] = delta[..., None]
    elif family == "e":
        (delta,) = params
        p[..., 2:] = 1.0 / (k - 2)
        q[..., :2] = ((1.0 - (k - 2) * delta) / 2)[..., None]
        q[..., 2:] = delta[..., None]
    elif family == "f":
        alpha, delta = params
        p[..., 1 : k - 1] = alpha[..., None]
        p[..., k - 1] = 1.0 - (k - 2) * alpha
        q[..., 0] = 1.0 - (k - 2) * delta
        q[..., 1 : k - 1] = delta[..., None]
    else:
        (delta,) = params
        p[..., 1:] = 1.0 / (k - 1)
        q[..., 0] = 1.0 - (k - 1) * delta
        q[..., 1:] = delta[..., None]
    return p, q


def case_point(family: str, k: int, params=()) -> tuple[ProbVector, ProbVector]:
    """The (p, q) pair of a boundary family at the given parameters.

    Two-parameter families take (alpha, delta), one-parameter families take
    (delta,); beta and gamma follow from the normalization constraints.
    """
    _check_family(family, k)
    params = tuple(float(x) for x in params)
    if len(params) != N_PARAMS[family]:
        raise ValueError(
            f"family {family} takes {N_PARAMS[family]} parameters, got {len(params)}"
        )
    p, q = _materialize(family, k, params)
    if min(p.min(), q.min()) < -1e-12:
        raise ValueError(f"infeasible parameters {params} for family {family}, k={k}")
    return make_prob_vector(p, k), make_prob_vector(q, k)


# -- one-dimensional search ------------------------------------------------

_INVPHI = (math.sqrt(5) - 1) / 2


def _golden_max(fun, a: float, b: float, xtol: float = GOLDEN_XTOL) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    return (a + b) / 2


def _polish_1d(fun, deriv, lo: float, hi: float, x0: float, width: float):
    """Golden-section around x0, then sharpen on the derivative root.

    Golden section alone pins the argmax only to ~sqrt(machine eps); a sign
    change of the exact derivative inside the bracket gives a root accurate
    to the last few ulps.
    """
    a, b = max(lo, x0 - width), min(hi, x0 + width)
    if b <= a:
        return x0, fun(x0)
    cands = [x0, a, b, _golden_max(fun, a, b)]
    da, db = deriv(a), deriv(b)
    if da > 0 > db:
        cands.append(brentq(deriv, a, b, xtol=1e-16, maxiter=200))
    vals = [fun(x) for x in cands]
    i = int(np.argmax(vals))
    return float(cands[i]), float(vals[i])


def _directional(objective, grad, family: str, k: int, params, j: int) -> float:
    base = list(params)
    p0, q0 = _materialize(family, k, base)
    bumped = list(base)
    bumped[j] = bumped[j] + 1.0
    p1, q1 = _materialize(family, k, bumped)
    gp, gq = grad(p0, q0)
    return float(np.dot(gp, p1 - p0) + np.dot(gq, q1 - q0))


# -- family maximization ---------------------------------------------------


def maximize_case(
    family: str, k: int, grid_steps: int = 1000, polish_tol: float = 1e-12
) -> MaxResult:
    _check_family(family, k)
    if grid_steps < 100:
        raise ValueError("grid_steps must be at least 100")
    bounds = family_bounds(family, k)
    if not bounds:
        p, q = case_point(family, k)
        return MaxResult(big_psi(p, q), (p, q), family, (), Method.CLOSED_FORM)

    def value(params) -> float:
        p, q = _materialize(family, k, params)
        return float(big_psi(p, q))

    def deriv(params, j) -> float:
        return _directional(big_psi, big_psi_grad, family, k, params, j)

    if len(bounds) == 1:
        lo, hi = bounds[0]
        grid = np.linspace(lo, hi, grid_steps + 1)
        p, q = _materialize(family, k, [grid])
        vals = big_psi(p, q)
        i = int(np.argmax(vals))
        x, _ = _polish_1d(
            lambda t: value([t]),
            lambda t: deriv([t], 0),
            lo, hi, float(grid[i]), grid[1] - grid[0],
        )
        params = (x,)
    else:
        steps = min(grid_steps, GRID_2D_MAX)
        axes = [np.linspace(lo, hi, steps + 1) for lo, hi in bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        p, q = _materialize(family, k, mesh)
        vals = big_psi(p, q)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        params = [float(axes[0][i]), float(axes[1][j])]
        widths = [ax[1] - ax[0] for ax in axes]
        best = value(params)
        for _ in range(500):
            prev = best
            for c in range(2):
                def along(t, c=c):
                    trial = list(params)
                    trial[c] = t
                    return trial

                x, v = _polish_1d(
                    lambda t: value(along(t)),
                    lambda t: deriv(along(t), c),
                    bounds[c][0], bounds[c][1], params[c], widths[c],
                )
                if v >= best:
                    params[c], best = x, v
            if best - prev < polish_tol:
                break
        params = tuple(params)

    p, q = case_point(family, k, params)
    return MaxResult(big_psi(p, q), (p, q), family, tuple(params), Method.GRID_POLISH)


def compute_Mk(k: int, grid_steps: int = 1000, polish_tol: float = 1e-12) -> MaxResult:
    """Best value over the seven families.

    Only k = 5, 6 carry a proof that the family list contains the global
    maximum; for larger k the result has ``certified=False``.
    """
    if k < 5:
        raise ValueError("M_k is computed for k >= 5")
    results = {fam: maximize_case(fam, k, grid_steps, polish_tol) for fam in FAMILIES}
    top = max(r.value for r in results.values())
    best = next(results[f] for f in FAMILIES if results[f].value >= top - TIE_TOL)
    best.certified = k in CERTIFIED_K
    best.candidates = {f: r.value for f, r in results.items()}
    return best


# -- independent multistart search -----------------------------------------


@dataclass
class GlobalCheckReport:
    k: int
    samples: int
    max_found: float
    case_max: float
    exceeded: bool
    argmax: tuple[list[float], list[float]]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "samples": self.samples,
            "max_found": self.max_found,
            "case_max": self.case_max,
            "exceeded": self.exceeded,
            "argmax": [list(self.argmax[0]), list(self.argmax[1])],
        }


def projected_ascent(p: np.ndarray, q: np.ndarray, max_iter: int = 500,
                     step0: float = 0.1, min_step: float = 1e-10):
    """Batched projected-gradient ascent of Psi on a product of simplices.

    Each row backtracks from `step0`, halving until Psi increases; a row
    stops once no step above `min_step` gives ascent.
    """
    p, q = p.copy(), q.copy()
    val = big_psi(p, q)
    active = np.ones(len(p), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        gp, gq = big_psi_grad(p[idx], q[idx])
        step = np.full(idx.size, step0)
        pending = np.ones(idx.size, dtype=bool)
        new_p, new_q = p[idx].copy(), q[idx].copy()
        new_v = val[idx].copy()
        while pending.any():
            sel = np.flatnonzero(pending)
            s = step[sel, None]
            cp = project_simplex(p[idx[sel]] + s * gp[sel])
            cq = project_simplex(q[idx[sel]] + s * gq[sel])
            cv = big_psi(cp, cq)
            up = cv > val[idx[sel]]
            acc = sel[up]
            new_p[acc], new_q[acc], new_v[acc] = cp[up], cq[up], cv[up]
            pending[acc] = False
            step[sel[~up]] /= 2
            dead = sel[~up][step[sel[~up]] < min_step]
            pending[dead] = False
            active[idx[dead]] = False
        p[idx], q[idx], val[idx] = new_p, new_q, new_v
    return p, q, val


def global_check(k: int, samples: int, rng, chunk: int = 20_000,
                 max_iter: int = 500) -> GlobalCheckReport:
    if k not in CERTIFIED_K:
        raise ValueError("global_check is defined for k = 5, 6")
    rng = np.random.default_rng(rng)
    case_max = compute_Mk(k).value
    best_v, best_pq = -np.inf, None
    for start in range(0, samples, chunk):
        m = min(chunk, samples - start)
        p0 = sample_simplex(k, rng, m)
        q0 = sample_simplex(k, rng, m)
        p, q, v = projected_ascent(p0, q0, max_iter=max_iter)
        i = int(np.argmax(v))
        if v[i] > best_v:
            best_v, best_pq = float(v[i]), (p[i].tolist(), q[i].tolist())
    return GlobalCheckReport(
        k=k,
        samples=samples,
        max_found=best_v,
        case_max=case_max,
        exceeded=best_v > case_max + 1e-7,
        argmax=best_pq,
    )


# -- psi with a floor on f ---------------------------------------------------


def _constrained_pair(k: int, gamma: float, beta):
    beta = np.asarray(beta, dtype=np.float64)
    g = np.empty(beta.shape + (k,))
    g[...] = beta[..., None]
    g[..., k - 1] = 1.0 - (k - 1) * beta
    f = np.full(k, gamma)
    f[k - 1] = 1.0 - (k - 1) * gamma
    return g, np.broadcast_to(f, g.shape)


def constrained_psi_max(k: int, gamma: float, grid_steps: int = 1000) -> MaxResult:
    """Max of psi(g, f) subject to f_i >= gamma.

    The optimum has f = (gamma, ..., gamma, 1 - (k-1) gamma) and g of the
    form (beta, ..., beta, 1 - (k-1) beta); only beta is searched.
    """
    if k < 4:
        raise ValueError("psi needs k >= 4")
    if not 0.0 <= gamma <= 1.0 / k:
        raise ValueError(f"gamma must lie in [0, 1/{k}]")
    lo, hi = 0.0, 1.0 / (k - 1)
    grid = np.linspace(lo, hi, grid_steps + 1)
    g, f = _constrained_pair(k, gamma, grid)
    vals = psi(g, f)
    i = int(np.argmax(vals))

    def value(b):
        g, f = _constrained_pair(k, gamma, b)
        return float(psi(g, f))

    def deriv(b):
        g, f = _constrained_pair(k, gamma, b)
        dg, _ = psi_grad(g, f)
        direction = np.ones(k)
        direction[k - 1] = -(k - 1)
        return float(dg @ direction)

    beta, _ = _polish_1d(value, deriv, lo, hi, float(grid[i]), grid[1] - grid[0])
    g, f = _constrained_pair(k, gamma, beta)
    gv, fv = make_prob_vector(g, k), make_prob_vector(f, k)
    return MaxResult(
        float(psi(gv, fv)), (gv, fv), "constrained", (beta,), Method.GRID_POLISH,
        objective="psi",
    )
