"""Matrix-free basis pursuit with noise and an independent small-scale oracle.

The production path is a first-order primal-dual splitting (Chambolle-Pock)
on  min ||a||_1  s.t.  ||A a - y||_2 <= delta,  whose proximal steps are
complex soft-thresholding and projection onto the l2 ball. The test oracle
solves the identical program by an interior-point method: log barrier on the
epigraph formulation with damped Newton steps, certified by a rigorous
duality gap built from the residual direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    CertificationError,
    ConvergenceError,
    DataError,
    DomainError,
    InfeasibleCandidateError,
)
from .sampling import SampleMultiset, SampleSet, draw_sphere_points, draw_subset, rng_from_seed
from .spectral import forward_dft, fourier_ratio, inverse_dft, SpectralVector, TORUS
from . import sphere as sph
from . import torus as tor

ERROR_BUDGET_FACTOR = 11.47

RATIO_MEASURED = "measured"
RATIO_BOUND = "bound"


class MeasurementOperator:
    """Forward/adjoint pair coefficients <-> sampled values with a norm bound."""

    def __init__(
        self,
        forward: Callable[[np.ndarray], np.ndarray],
        adjoint: Callable[[np.ndarray], np.ndarray],
        shape: tuple[int, int],
        norm_bound: float,
        dense: Callable[[], np.ndarray] | None = None,
    ):
        self._forward = forward
        self._adjoint = adjoint
        self.shape = shape  # (n_measurements, n_coefficients)
        self.norm_bound = float(norm_bound)
        self._dense = dense

    def forward(self, a: np.ndarray) -> np.ndarray:
        return self._forward(a)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return self._adjoint(y)

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense()
        cols = [self._forward(e) for e in np.eye(self.shape[1], dtype=np.complex128)]
        return np.stack(cols, axis=1)


def make_torus_operator(sample: SampleSet) -> MeasurementOperator:
    """Restriction of the unitary synthesis map to the sampled grid points.

    Forward: coefficients -> field values on the sample; adjoint embeds the
    sampled values at zero elsewhere and applies the forward DFT. Operator
    norm is exactly 1 (row restriction of a unitary map).
    """
    side, dims = sample.side, sample.dims
    total = side**dims
    shape = (side,) * dims
    scale = side ** (dims / 2.0)
    flat = sample.flat

    def forward(a: np.ndarray) -> np.ndarray:
        fld = np.fft.ifftn(a.reshape(shape)) * scale
        return fld.ravel()[flat]

    def adjoint(y: np.ndarray) -> np.ndarray:
        emb = np.zeros(total, dtype=np.complex128)
        emb[flat] = y
        return (np.fft.fftn(emb.reshape(shape)) / scale).ravel()

    def dense() -> np.ndarray:
        if len(flat) * total > 10_000_000:
            raise MemoryError("dense torus operator requested at too large a size")
        coords = sample.coords  # (k, d)
        freqs = np.stack(
            np.unravel_index(np.arange(total), shape), axis=1
        )  # (total, d)
        phase = (coords @ freqs.T) % side
        return np.exp(2j * np.pi * phase / side) / scale

    return MeasurementOperator(
        forward, adjoint, shape=(len(sample), total), norm_bound=1.0, dense=dense
    )


def power_norm_bound(
    forward: Callable, adjoint: Callable, dim: int, iters: int = 40, seed: int = 0
) -> float:
    """Upper bound on the operator norm via power iteration on A^H A."""
    rng = rng_from_seed(seed)
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        y = adjoint(forward(x))
        lam = float(np.linalg.norm(y))
        if lam == 0.0:
            return 0.0
        x = y / lam
    return math.sqrt(lam) * 1.02  # safety margin over the Rayleigh estimate


def make_sphere_operator(points: SampleMultiset, bandwidth: int) -> MeasurementOperator:
    """Dense evaluation matrix A[j, (l,m)] = Y_l^m(omega_j) with a power-iteration bound."""
    mat = sph.basis_matrix(bandwidth, points.theta, points.phi)
    bound = power_norm_bound(
        lambda a: mat @ a, lambda y: mat.T @ y, dim=mat.shape[1]
    )
    return MeasurementOperator(
        forward=lambda a: mat @ a,
        adjoint=lambda y: mat.T @ y,
        shape=mat.shape,
        norm_bound=max(bound, 1e-12),
        dense=lambda: mat.astype(np.complex128),
    )


@dataclass
class SolverConfig:
    """Feasibility radius and stopping parameters for the primal-dual solver."""

    delta: float
    max_iter: int = 50_000
    tol: float = 1e-8
    check_every: int = 25

    def __post_init__(self):
        if self.delta < 0:
            raise DomainError(f"feasibility radius must be >= 0, got {self.delta}")
        if self.tol <= 0:
            raise DomainError("tolerance must be positive")


@dataclass
class RecoveryReport:
    """Solver output plus pipeline metadata (optional fields filled by the pipelines)."""

    coefficients: np.ndarray
    objective: float
    feasibility_residual: float
    iterations: int
    converged: bool
    kkt_residual: Optional[float] = None
    rel_error: Optional[float] = None
    setting: Optional[str] = None
    size_param: Optional[int] = None
    eps: Optional[float] = None
    c_univ: Optional[float] = None
    seed: Optional[int] = None
    sample_size: Optional[int] = None
    delta: Optional[float] = None
    budget: Optional[float] = None
    imag_ratio: Optional[float] = None
    clamped: Optional[bool] = None
    ratio_used: Optional[float] = None
    norm_provenance: Optional[str] = None


RECOVERY_HEADER = [
    "setting", "N_or_L", "eps", "C_univ", "seed", "sample_size", "objective",
    "feasibility_residual", "rel_error", "budget_11.47eps", "iterations", "converged",
]


def recovery_csv_fields(report: RecoveryReport) -> list[str]:
    fmt = lambda x: "" if x is None else (f"{x:.17g}" if isinstance(x, float) else str(x))
    return [
        report.setting or "",
        fmt(report.size_param),
        fmt(report.eps),
        fmt(report.c_univ),
        fmt(report.seed),
        fmt(report.sample_size),
        f"{report.objective:.17g}",
        f"{report.feasibility_residual:.17g}",
        fmt(report.rel_error),
        fmt(report.budget),
        str(report.iterations),
        str(report.converged).lower(),
    ]


def _soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    mags = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mags > t, 1.0 - t / np.where(mags > 0, mags, 1.0), 0.0)
    return x * scale


def solve_bpdn(op: MeasurementOperator, y: np.ndarray, cfg: SolverConfig) -> RecoveryReport:
    """Chambolle-Pock splitting for min ||a||_1 s.t. ||A a - y|| <= delta.

    Dual prox is the shrink form of the l2-ball projection (Moreau identity);
    primal prox is complex soft-thresholding. Step sizes sigma = tau = 0.99/L
    with L the declared operator-norm bound. Non-convergence is reported, not
    raised.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    n_meas, n_coef = op.shape
    if y.size != n_meas:
        raise DataError(f"expected {n_meas} measurements, got {y.size}")
    delta = cfg.delta
    step = 0.99 / max(op.norm_bound, 1e-12)
    sigma = tau = step

    a = np.zeros(n_coef, dtype=np.complex128)
    z = np.zeros(n_meas, dtype=np.complex128)
    abar = a.copy()
    y_scale = max(1.0, float(np.linalg.norm(y)))
    converged = False
    iterations = cfg.max_iter

    for it in range(1, cfg.max_iter + 1):
        v = z + sigma * (op.forward(abar) - y)
        vnorm = float(np.linalg.norm(v))
        if delta > 0.0 and vnorm > 0.0:
            z_new = v * max(0.0, 1.0 - sigma * delta / vnorm)
        else:
            z_new = v
        a_new = _soft_threshold(a - tau * op.adjoint(z_new), tau)
        abar = 2.0 * a_new - a

        if it % cfg.check_every == 0 or it == cfg.max_iter:
            da, dz = a - a_new, z - z_new
            p_res = float(np.linalg.norm(da / tau - op.adjoint(dz)))
            d_res = float(np.linalg.norm(dz / sigma - op.forward(da)))
            scale = max(1.0, float(np.linalg.norm(a_new)), float(np.linalg.norm(z_new)))
            if (p_res + d_res) / scale <= cfg.tol:
                a, z = a_new, z_new
                converged = True
                iterations = it
                break
        a, z = a_new, z_new

    residual_vec = op.forward(a) - y
    feas = float(np.linalg.norm(residual_vec)) - delta
    if converged and feas > cfg.tol * y_scale:
        converged = False
    return RecoveryReport(
        coefficients=a,
        objective=float(np.sum(np.abs(a))),
        feasibility_residual=feas,
        iterations=iterations,
        converged=converged,
        delta=delta,
    )


@dataclass(frozen=True)
class KktReport:
    """Violation of the l1 subdifferential conditions at a feasible candidate."""

    residual: float
    support_violation: float
    slackness_violation: float
    dual_scale: float
    constraint_active: bool


def check_kkt(
    op: MeasurementOperator,
    y: np.ndarray,
    delta: float,
    a: np.ndarray,
    feas_tol: float = 1e-6,
    support_rtol: float = 1e-5,
) -> KktReport:
    """Build the dual variable from the residual direction and measure violations.

    With nu = lambda * direction and lambda = 1/||A^H d||_inf, dual feasibility
    |(A^H nu)_i| <= 1 holds by construction; reported are the worst deviation of
    (A^H nu)_i from the phase of a_i over the support and the complementary
    slackness defect |  ||rho|| - delta | (when the dual is active). Entries
    below support_rtol * ||a||_inf count as numerical zeros, for which the
    subdifferential condition is the (exact) dual-feasibility bound.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    a = np.asarray(a, dtype=np.complex128).ravel()
    rho = op.forward(a) - y
    r = float(np.linalg.norm(rho))
    y_scale = max(1.0, float(np.linalg.norm(y)))
    if r > delta + feas_tol * y_scale:
        raise InfeasibleCandidateError(
            f"candidate residual {r:.3e} exceeds delta {delta:.3e}"
        )
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    if amax == 0.0:
        # the zero vector is l1-minimal whenever it is feasible
        return KktReport(0.0, 0.0, 0.0, 0.0, constraint_active=r >= delta - feas_tol * y_scale)

    support = np.abs(a) > support_rtol * amax
    inactive = delta > 0.0 and (delta - r) > feas_tol * y_scale
    if inactive:
        # lambda must vanish, so any nonzero coefficient violates stationarity
        return KktReport(1.0, 1.0, 0.0, 0.0, constraint_active=False)

    if r <= 1e-14 * y_scale:
        # delta = 0 with exact fit: find a least-squares dual certificate
        mat = op.to_dense()
        target = np.zeros(a.size, dtype=np.complex128)
        target[support] = a[support] / np.abs(a[support])
        nu, *_ = np.linalg.lstsq(mat.conj().T, target, rcond=None)
        g = mat.conj().T @ nu
    else:
        d = -rho / r
        g = op.adjoint(d)
    ginf = float(np.max(np.abs(g)))
    if ginf == 0.0:
        return KktReport(1.0, 1.0, 1.0, 0.0, constraint_active=True)
    lam = 1.0 / ginf
    phases = a[support] / np.abs(a[support])
    support_viol = float(np.max(np.abs(lam * g[support] - phases)))
    slack_viol = abs(r - delta) / max(1.0, delta) if delta > 0 else 0.0
    return KktReport(
        residual=max(support_viol, slack_viol),
        support_violation=support_viol,
        slackness_violation=slack_viol,
        dual_scale=lam,
        constraint_active=True,
    )


def duality_gap(op: MeasurementOperator, y: np.ndarray, delta: float, a: np.ndarray) -> float:
    """Rigorous gap ||a||_1 - (Re<w, y> - delta ||w||) with w scaled dual-feasible."""
    y = np.asarray(y, dtype=np.complex128).ravel()
    a = np.asarray(a, dtype=np.complex128).ravel()
    rho = op.forward(a) - y
    r = float(np.linalg.norm(rho))
    obj = float(np.sum(np.abs(a)))
    if r <= 1e-15:
        return obj
    d = -rho / r
    g = op.adjoint(d)
    ginf = float(np.max(np.abs(g)))
    if ginf == 0.0:
        return obj
    lam = 1.0 / ginf
    dual_value = lam * (float(np.real(np.vdot(d, y))) - delta)
    return obj - max(dual_value, 0.0)


# ---------------------------------------------------------------------------
# Interior-point oracle on the epigraph formulation (test-scale instances).
# ---------------------------------------------------------------------------

_ORACLE_MAX_DIM = 64


def _real_stack(mat: np.ndarray) -> np.ndarray:
    re, im = mat.real, mat.imag
    return np.block([[re, -im], [im, re]])


def oracle_solve(
    matrix: np.ndarray,
    y: np.ndarray,
    delta: float,
    gap_tol: float = 1e-9,
    return_info: bool = False,
):
    """Solve min ||a||_1 s.t. ||A a - y|| <= delta by a log-barrier Newton method.

    Algorithmically independent of the primal-dual path: the complex program
    is lifted to second-order-cone epigraph form over (Re a, Im a, t), a log
    barrier is centered by damped Newton steps along an increasing barrier
    parameter, and termination is certified by the rigorous duality gap from
    the residual direction. Intended for dimensions <= 64 in tests only.
    """
    mat = np.asarray(matrix, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).ravel()
    n_meas, n_coef = mat.shape
    if n_coef > _ORACLE_MAX_DIM or n_meas > _ORACLE_MAX_DIM:
        raise DomainError(f"oracle limited to {_ORACLE_MAX_DIM} x {_ORACLE_MAX_DIM}")
    if delta < 0:
        raise DomainError("delta must be >= 0")
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0 or delta >= y_norm:
        a = np.zeros(n_coef, dtype=np.complex128)
        return (a, {"gap": 0.0, "eta": 0.0}) if return_info else a

    # work on the normalized instance; the solution scales linearly in y
    yn = y / y_norm
    dn = delta / y_norm
    if dn == 0.0:
        a, info = _oracle_equality(mat, yn, gap_tol)
    else:
        a, info = _oracle_ball(mat, yn, dn, gap_tol)
    a = a * y_norm
    info["gap"] = info["gap"] * y_norm  # back to the caller's scale
    return (a, info) if return_info else a


def _oracle_op(mat: np.ndarray) -> MeasurementOperator:
    return MeasurementOperator(
        forward=lambda a: mat @ a,
        adjoint=lambda v: mat.conj().T @ v,
        shape=mat.shape,
        norm_bound=float(np.linalg.norm(mat, 2)),
        dense=lambda: mat,
    )


def _soc_grad_hess(u, v, t, s):
    """Gradient columns and 3x3 Hessian blocks for -log(t^2 - u^2 - v^2)."""
    inv = 1.0 / s
    inv2 = inv * inv
    gu, gv, gt = 2.0 * u * inv, 2.0 * v * inv, -2.0 * t * inv
    huu = 4.0 * u * u * inv2 + 2.0 * inv
    hvv = 4.0 * v * v * inv2 + 2.0 * inv
    htt = 4.0 * t * t * inv2 - 2.0 * inv
    huv = 4.0 * u * v * inv2
    hut = -4.0 * u * t * inv2
    hvt = -4.0 * v * t * inv2
    return (gu, gv, gt), (huu, hvv, htt, huv, hut, hvt)


def _assemble_soc(n_coef, grad, hess, eta):
    gu, gv, gt = grad
    huu, hvv, htt, huv, hut, hvt = hess
    dim = 3 * n_coef
    g = np.zeros(dim)
    g[:n_coef], g[n_coef : 2 * n_coef], g[2 * n_coef :] = gu, gv, gt + eta
    h = np.zeros((dim, dim))
    idx = np.arange(n_coef)
    h[idx, idx] = huu
    h[n_coef + idx, n_coef + idx] = hvv
    h[2 * n_coef + idx, 2 * n_coef + idx] = htt
    h[idx, n_coef + idx] = h[n_coef + idx, idx] = huv
    h[idx, 2 * n_coef + idx] = h[2 * n_coef + idx, idx] = hut
    h[n_coef + idx, 2 * n_coef + idx] = h[2 * n_coef + idx, n_coef + idx] = hvt
    return g, h


def _oracle_ball(mat, yn, dn, gap_tol):
    n_meas, n_coef = mat.shape
    br = _real_stack(mat)  # (2m, 2D)
    yr = np.concatenate([yn.real, yn.imag])
    op = _oracle_op(mat)

    w, *_ = np.linalg.lstsq(br, yr, rcond=None)
    min_res = float(np.linalg.norm(br @ w - yr))
    if min_res >= dn * (1.0 - 1e-12):
        raise ConvergenceError(
            f"no strictly feasible point: min residual {min_res:.3e} vs delta {dn:.3e}"
        )
    u, v = w[:n_coef], w[n_coef:]
    t = np.sqrt(u * u + v * v) * 1.5 + 0.1 * (np.mean(np.abs(u + 1j * v)) + 1e-3)

    def ball_terms(w_vec):
        rr = br @ w_vec - yr
        b = dn * dn - float(rr @ rr)
        return rr, b

    def merit(u, v, t, eta):
        s = t * t - u * u - v * v
        _, b = ball_terms(np.concatenate([u, v]))
        if np.any(s <= 0) or b <= 0 or np.any(t <= 0):
            return np.inf
        return eta * float(np.sum(t)) - float(np.sum(np.log(s))) - math.log(b)

    eta = 1.0
    gap = np.inf
    a = u + 1j * v
    for _ in range(60):
        for _ in range(80):  # damped Newton centering at this eta
            s = t * t - u * u - v * v
            grad, hess = _soc_grad_hess(u, v, t, s)
            g, h = _assemble_soc(n_coef, grad, hess, eta)
            rr, b = ball_terms(np.concatenate([u, v]))
            gw = 2.0 * (br.T @ rr) / b
            g[: 2 * n_coef] += gw
            brr = br.T @ rr
            h[: 2 * n_coef, : 2 * n_coef] += 2.0 * (br.T @ br) / b + 4.0 * np.outer(
                brr, brr
            ) / (b * b)
            try:
                step = np.linalg.solve(h, -g)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(h, -g, rcond=None)
            decrement = float(-g @ step)
            if not np.isfinite(decrement) or decrement <= 0:
                break
            base = merit(u, v, t, eta)
            alpha = 1.0
            du, dv, dt = step[:n_coef], step[n_coef : 2 * n_coef], step[2 * n_coef :]
            while alpha > 1e-14:
                if merit(u + alpha * du, v + alpha * dv, t + alpha * dt, eta) <= base - 0.01 * alpha * decrement:
                    break
                alpha *= 0.5
            if alpha <= 1e-14:
                break
            u, v, t = u + alpha * du, v + alpha * dv, t + alpha * dt
            if decrement * alpha < 1e-12:
                break
        a = u + 1j * v
        gap = duality_gap(op, yn, dn, a)
        if gap <= gap_tol * max(1.0, float(np.sum(np.abs(a)))):
            break
        eta *= 10.0
        if eta > 1e14:
            break
    info = {"gap": gap, "eta": eta}
    if gap > 1e-6 * max(1.0, float(np.sum(np.abs(a)))):
        raise ConvergenceError(
            f"oracle stalled: duality gap {gap:.3e} at barrier parameter {eta:.1e}"
        )
    return a, info


def _oracle_equality(mat, yn, gap_tol):
    """delta = 0: equality-constrained Newton on the epigraph barrier."""
    n_meas, n_coef = mat.shape
    br = _real_stack(mat)
    yr = np.concatenate([yn.real, yn.imag])
    op = _oracle_op(mat)

    w, *_ = np.linalg.lstsq(br, yr, rcond=None)
    if float(np.linalg.norm(br @ w - yr)) > 1e-10:
        raise DataError("equality-constrained instance is inconsistent")
    u, v = w[:n_coef], w[n_coef:]
    t = np.sqrt(u * u + v * v) * 1.5 + 0.1 * (np.mean(np.abs(u + 1j * v)) + 1e-3)

    n_eq = br.shape[0]
    c_mat = np.zeros((n_eq, 3 * n_coef))
    c_mat[:, : 2 * n_coef] = br

    def merit(u, v, t, eta):
        s = t * t - u * u - v * v
        if np.any(s <= 0) or np.any(t <= 0):
            return np.inf
        return eta * float(np.sum(t)) - float(np.sum(np.log(s)))

    eta = 1.0
    gap = np.inf
    a = u + 1j * v
    mu = np.zeros(n_eq)
    for _ in range(60):
        for _ in range(80):
            s = t * t - u * u - v * v
            grad, hess = _soc_grad_hess(u, v, t, s)
            g, h = _assemble_soc(n_coef, grad, hess, eta)
            kkt = np.zeros((3 * n_coef + n_eq, 3 * n_coef + n_eq))
            kkt[: 3 * n_coef, : 3 * n_coef] = h
            kkt[: 3 * n_coef, 3 * n_coef :] = c_mat.T
            kkt[3 * n_coef :, : 3 * n_coef] = c_mat
            rhs = np.concatenate([-g, np.zeros(n_eq)])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            step, mu = sol[: 3 * n_coef], sol[3 * n_coef :]
            decrement = float(-g @ step)
            if not np.isfinite(decrement) or decrement <= 0:
                break
            base = merit(u, v, t, eta)
            alpha = 1.0
            du, dv, dt = step[:n_coef], step[n_coef : 2 * n_coef], step[2 * n_coef :]
            while alpha > 1e-14:
                if merit(u + alpha * du, v + alpha * dv, t + alpha * dt, eta) <= base - 0.01 * alpha * decrement:
                    break
                alpha *= 0.5
            if alpha <= 1e-14:
                break
            u, v, t = u + alpha * du, v + alpha * dv, t + alpha * dt
            if decrement * alpha < 1e-12:
                break
        a = u + 1j * v
        # dual candidate from the equality multipliers, scaled dual-feasible
        nu = (mu[:n_meas] + 1j * mu[n_meas:]) / eta
        g_dual = mat.conj().T @ nu
        ginf = float(np.max(np.abs(g_dual)))
        obj = float(np.sum(np.abs(a)))
        if ginf > 0:
            w_cand = -nu / max(1.0, ginf)
            gap = obj - float(np.real(np.vdot(w_cand, yn)))
        else:
            gap = obj
        if gap <= gap_tol * max(1.0, obj):
            break
        eta *= 10.0
        if eta > 1e14:
            break
    info = {"gap": gap, "eta": eta}
    if gap > 1e-6 * max(1.0, float(np.sum(np.abs(a)))):
        raise ConvergenceError(
            f"oracle stalled: duality gap {gap:.3e} at barrier parameter {eta:.1e}"
        )
    return a, info


# ---------------------------------------------------------------------------
# End-to-end pipelines: bound -> sample size -> sample -> solve -> report.
# ---------------------------------------------------------------------------

def recover_torus(
    f: tor.SmoothFunctionSpec,
    side: int,
    eps: float,
    seed: int,
    c_univ: float = 1.0,
    ratio_source: str = RATIO_MEASURED,
    norms: tor.NormData | None = None,
    allow_uncertified: bool = False,
    cfg: SolverConfig | None = None,
    delta_override: float | None = None,
    sample_size_override: int | None = None,
) -> RecoveryReport:
    """Recover the discretized field from a random subset of its values.

    ratio_source picks what enters the sample-size formula: the certified
    bound r_N ("bound", faithful but pessimistic enough to clamp to the full
    grid at desk scales) or the measured Fourier ratio ("measured").
    delta_override = 0 requests exact-fit basis pursuit on the observations.
    """
    if norms is None:
        norms = tor.resolve_norms(f, side)
    rn = tor.compute_rn(norms, side)
    if not rn.certified and not allow_uncertified:
        raise CertificationError(
            f"{f.name} at N={side} fails N L2^2 >= 8 C2^2; "
            "pass allow_uncertified=True to override"
        )
    g = tor.discretize(f, side)
    truth = forward_dft(g)
    truth_norm = g.l2
    fr = fourier_ratio(truth)
    if ratio_source == RATIO_BOUND:
        ratio = max(1.0, rn.r)
    elif ratio_source == RATIO_MEASURED:
        ratio = max(1.0, fr)
    else:
        raise DomainError(f"unknown ratio source {ratio_source!r}")

    budget = tor.sample_size_torus(ratio, eps, side, 2, c_univ)
    size = budget.size if sample_size_override is None else sample_size_override
    sample = draw_subset(side, 2, size, seed)
    y = g.values[sample.flat]
    delta = eps * truth_norm if delta_override is None else delta_override
    solver_cfg = cfg if cfg is not None else SolverConfig(delta=delta)
    if cfg is not None:
        solver_cfg.delta = delta
    op = make_torus_operator(sample)
    report = solve_bpdn(op, y, solver_cfg)

    recovered = inverse_dft(
        SpectralVector(mode=TORUS, coeffs=report.coefficients, side=side, dims=2)
    )
    real_part = recovered.values.real
    report.rel_error = float(
        np.linalg.norm(real_part - g.values.real) / truth_norm
    )
    report.imag_ratio = float(np.linalg.norm(recovered.values.imag) / truth_norm)
    report.setting = "torus"
    report.size_param = side
    report.eps = eps
    report.c_univ = c_univ
    report.seed = seed
    report.sample_size = size
    report.clamped = budget.clamped
    report.budget = ERROR_BUDGET_FACTOR * eps
    report.ratio_used = ratio
    report.norm_provenance = norms.provenance
    return report


def recover_sphere(
    signal: sph.SphericalSignal,
    eps: float,
    seed: int,
    c_univ: float = 1.0,
    ratio_source: str = RATIO_MEASURED,
    norms: sph.SphereNormData | None = None,
    q_max: int = 200_000,
    cfg: SolverConfig | None = None,
    delta_override: float | None = None,
    sample_size_override: int | None = None,
) -> RecoveryReport:
    """Recover a bandlimited sphere signal from i.i.d. uniform point samples."""
    bandwidth = signal.bandwidth
    fr = sph.sphere_fourier_ratio(signal)
    if ratio_source == RATIO_BOUND:
        if norms is None:
            norms = sph.estimate_sphere_norms(signal)
        ratio = max(1.0, sph.compute_rl(norms, bandwidth).r)
    elif ratio_source == RATIO_MEASURED:
        ratio = max(1.0, fr)
    else:
        raise DomainError(f"unknown ratio source {ratio_source!r}")

    q = sph.sample_size_sphere(ratio, eps, bandwidth, c_univ)
    if sample_size_override is not None:
        q = sample_size_override
    if q > q_max:
        raise DomainError(f"sample size {q} exceeds configured q_max={q_max}")
    points = draw_sphere_points(q, seed)
    y = sph.synthesize(signal, points.theta, points.phi).astype(np.complex128)
    delta = eps * signal.l2 if delta_override is None else delta_override
    solver_cfg = cfg if cfg is not None else SolverConfig(delta=delta)
    if cfg is not None:
        solver_cfg.delta = delta
    op = make_sphere_operator(points, bandwidth)
    report = solve_bpdn(op, y, solver_cfg)

    recovered = report.coefficients.real
    report.rel_error = float(np.linalg.norm(recovered - signal.coeffs) / signal.l2)
    report.imag_ratio = float(np.linalg.norm(report.coefficients.imag) / signal.l2)
    report.setting = "sphere"
    report.size_param = bandwidth
    report.eps = eps
    report.c_univ = c_univ
    report.seed = seed
    report.sample_size = q
    report.clamped = False
    report.budget = ERROR_BUDGET_FACTOR * eps
    report.ratio_used = ratio
    report.norm_provenance = norms.provenance if norms is not None else None
    return report
