"""Spatially-coupled density evolution: parallel sweep, threshold bisection,
and EXIT-like curve tracing by entropy-anchored fixed-point continuation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .channel import ChannelFamily, dimension_distribution, transfer_poly
from .ensemble import EnsembleParams

DEFAULT_TOL = 1e-10
DEFAULT_STALL_TOL = 1e-15
DEFAULT_MAX_ITER = 2_000_000
DEFAULT_BISECT_TOL = 1e-6
_MONOTONE_SLACK = 1e-12


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before a conclusive outcome."""


@dataclass(frozen=True, eq=False)
class DeState:
    """Per-section erasure probabilities of one DE iterate.

    p holds the punctured-bit-to-check rates and q the transmitted-bit-to-
    check rates for sections -L..L; sections beyond the chain are implicitly
    zero (shortened bits are known).
    """

    L: int
    p: np.ndarray
    q: np.ndarray
    epsilon: float
    iterations: int = 0

    def __post_init__(self) -> None:
        n = 2 * self.L + 1
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=float)
        if p.shape != (n,) or q.shape != (n,):
            raise ValueError(f"p and q must have shape ({n},)")
        if (p < 0).any() or (p > 1).any() or (q < 0).any() or (q > 1).any():
            raise ValueError("erasure probabilities must lie in [0, 1]")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def chi(self) -> float:
        """Entropy-like anchor: mean of p over the chain."""
        return float(self.p.mean())


@dataclass(frozen=True, eq=False)
class DeResult:
    state: DeState
    success: bool
    status: str  # "converged" | "stalled" | "iter-limit"


@dataclass(frozen=True, eq=False)
class CurvePoint:
    """One fixed point on the EXIT-like curve."""

    epsilon: float
    h: float
    chi: float
    state: DeState
    residual: float
    rounds: int


class DensityEvolution:
    """Precomputed update operator for one ensemble and channel kind."""

    def __init__(self, params: EnsembleParams, kind: str, m: int):
        self.params = params
        self.kind = kind
        self.m = m
        n = params.n_sections
        nc = params.n_check_sections
        w = params.w
        # Wb averages bit sections over the window feeding one check section;
        # Wf averages check sections back over one bit section's window.
        Wb = np.zeros((nc, n))
        for c in range(nc):
            lo = max(0, c - w + 1)
            hi = min(n - 1, c)
            Wb[c, lo : hi + 1] = 1.0 / w
        Wf = np.zeros((n, nc))
        for i in range(n):
            Wf[i, i : i + w] = 1.0 / w
        self.Wb = Wb
        self.Wf = Wf

    def fpoly(self, eps: float) -> np.ndarray:
        return transfer_poly(
            dimension_distribution(ChannelFamily(self.kind, self.m, eps))
        )

    def s_profile(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Erasure rates of check-to-transmitted messages per section."""
        dr, dg = self.params.dr, self.params.dg
        Pb = self.Wb @ p
        Qb = self.Wb @ q
        v = 1.0 - (1.0 - Pb) ** dr * (1.0 - Qb) ** (dg - 1)
        return self.Wf @ v

    def sweep(
        self, p: np.ndarray, q: np.ndarray, fcoef: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """One parallel update of every section."""
        dl, dr, dg = self.params.dl, self.params.dr, self.params.dg
        Pb = self.Wb @ p
        Qb = self.Wb @ q
        rp = (1.0 - Pb) ** (dr - 1)
        rq = (1.0 - Qb) ** (dg - 1)
        u = 1.0 - rp * rq * (1.0 - Qb)
        v = 1.0 - rp * (1.0 - Pb) * rq
        p1 = (self.Wf @ u) ** (dl - 1)
        s = self.Wf @ v
        z = s**dg
        q1 = npoly.polyval(z, fcoef) * s ** (dg - 1)
        np.clip(q1, 0.0, 1.0, out=q1)
        return p1, q1

    def staged_round(
        self, p: np.ndarray, q: np.ndarray, fcoef: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Update q first, then p from the fresh q.

        Same fixed points as sweep() (stationarity of both halves), but the
        p-output responds to the channel parameter within a single round,
        which the anchored continuation needs.
        """
        dl, dr, dg = self.params.dl, self.params.dr, self.params.dg
        s = self.s_profile(p, q)
        q1 = npoly.polyval(s**dg, fcoef) * s ** (dg - 1)
        np.clip(q1, 0.0, 1.0, out=q1)
        Pb = self.Wb @ p
        Qb = self.Wb @ q1
        u = 1.0 - (1.0 - Pb) ** (dr - 1) * (1.0 - Qb) ** dg
        p1 = (self.Wf @ u) ** (dl - 1)
        return p1, q1


def de_sweep(state: DeState, params: EnsembleParams, family: ChannelFamily) -> DeState:
    """One parallel DE update of `state` under the given channel."""
    dev = DensityEvolution(params, family.kind, family.m)
    fcoef = transfer_poly(dimension_distribution(family))
    p1, q1 = dev.sweep(state.p, state.q, fcoef)
    return DeState(
        L=params.L, p=p1, q=q1, epsilon=family.parameter, iterations=state.iterations + 1
    )


def run_de(
    params: EnsembleParams,
    family: ChannelFamily,
    *,
    tol: float = DEFAULT_TOL,
    stall_tol: float = DEFAULT_STALL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> DeResult:
    """Iterate the sweep from the all-ones initialization.

    Succeeds when max_i p_i drops below tol; reports a stall when the
    per-sweep sup-norm change falls below stall_tol first; flags iteration
    budget exhaustion separately.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dev = DensityEvolution(params, family.kind, family.m)
    fcoef = transfer_poly(dimension_distribution(family))
    n = params.n_sections
    p = np.ones(n)
    q = np.ones(n)
    it = 0
    status = "iter-limit"
    while it < max_iter:
        p1, q1 = dev.sweep(p, q, fcoef)
        it += 1
        dp = p1 - p
        dq = q1 - q
        if it % 100 == 0 and max(dp.max(), dq.max()) > _MONOTONE_SLACK:
            raise AssertionError(
                "monotone decrease from all-ones violated; update is broken"
            )
        change = max(np.abs(dp).max(), np.abs(dq).max())
        p, q = p1, q1
        if p.max() < tol:
            status = "converged"
            break
        if change < stall_tol:
            status = "stalled"
            break
    state = DeState(L=params.L, p=p, q=q, epsilon=family.parameter, iterations=it)
    return DeResult(state=state, success=status == "converged", status=status)


def trajectory(
    params: EnsembleParams, family: ChannelFamily, n_sweeps: int
) -> tuple[np.ndarray, np.ndarray]:
    """First n_sweeps iterates from all-ones; rows are (sweep, section)."""
    dev = DensityEvolution(params, family.kind, family.m)
    fcoef = transfer_poly(dimension_distribution(family))
    n = params.n_sections
    P = np.ones((n_sweeps + 1, n))
    Q = np.ones((n_sweeps + 1, n))
    for ell in range(n_sweeps):
        P[ell + 1], Q[ell + 1] = dev.sweep(P[ell], Q[ell], fcoef)
    return P, Q


def threshold(
    params: EnsembleParams,
    kind: str,
    m: int,
    *,
    bisect_tol: float = DEFAULT_BISECT_TOL,
    tol: float = DEFAULT_TOL,
    stall_tol: float = DEFAULT_STALL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """Bisect the channel parameter for the largest decodable value.

    Assumes the success predicate is monotone in the parameter. A run that
    exhausts max_iter leaves the bracket inconclusive and raises.
    """
    if kind not in ("cd", "bd"):
        raise ValueError(f"threshold search needs kind 'cd' or 'bd', got {kind!r}")
    if bisect_tol <= 0:
        raise ValueError("bisect_tol must be positive")
    lo, hi = 0.0, 1.0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        res = run_de(
            params,
            ChannelFamily(kind, m, mid),
            tol=tol,
            stall_tol=stall_tol,
            max_iter=max_iter,
        )
        if res.status == "iter-limit":
            raise ConvergenceError(
                f"DE hit the {max_iter}-sweep cap at parameter {mid}; bracket inconclusive"
            )
        if res.success:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def h_ebp(
    state: DeState,
    params: EnsembleParams,
    family: ChannelFamily,
    *,
    alternative: bool = False,
) -> float:
    """EXIT-like value of a fixed point, averaged over the chain sections.

    Default is f(z_i) * z_i**dg with z_i the detector-input erasure rate;
    `alternative` selects f(z_i) * z_i instead.
    """
    return float(np.mean(h_ebp_profile(state, params, family, alternative=alternative)))


def h_ebp_profile(
    state: DeState,
    params: EnsembleParams,
    family: ChannelFamily,
    *,
    alternative: bool = False,
) -> np.ndarray:
    """Per-section EXIT-like values (exported for inspection)."""
    dev = DensityEvolution(params, family.kind, family.m)
    fcoef = transfer_poly(dimension_distribution(family))
    s = dev.s_profile(state.p, state.q)
    z = s**params.dg
    f = np.clip(npoly.polyval(z, fcoef), 0.0, 1.0)
    return f * (z if alternative else z**params.dg)


def ebp_trace(
    params: EnsembleParams,
    kind: str,
    m: int,
    chi_grid,
    *,
    eps_bisect_tol: float = 1e-12,
    state_tol: float = 1e-10,
    eps_change_tol: float = 1e-10,
    max_rounds: int = 200_000,
    residual_tol: float = 1e-9,
) -> list[CurvePoint]:
    """Trace nontrivial DE fixed points at prescribed anchor values.

    For each target chi (strictly descending, in (0, 1]) the tracer repeats
    staged rounds, bisecting the channel parameter inside every round so the
    round output's anchor mean(p) meets the target, warm-starting from the
    previous point. Unreachable or non-converging targets are reported via
    warnings and skipped, never interpolated.
    """
    chis = [float(c) for c in chi_grid]
    if any(not 0.0 < c <= 1.0 for c in chis):
        raise ValueError("chi targets must lie in (0, 1]")
    if any(b >= a for a, b in zip(chis, chis[1:])):
        raise ValueError("chi targets must be strictly descending")
    if kind not in ("cd", "bd"):
        raise ValueError(f"curve tracing needs kind 'cd' or 'bd', got {kind!r}")
    dev = DensityEvolution(params, kind, m)
    n = params.n_sections
    p = np.ones(n)
    q = np.ones(n)
    points: list[CurvePoint] = []
    for chi in chis:
        sol = _anchored_point(
            dev,
            p,
            q,
            chi,
            eps_bisect_tol=eps_bisect_tol,
            state_tol=state_tol,
            eps_change_tol=eps_change_tol,
            max_rounds=max_rounds,
        )
        if sol is None:
            warnings.warn(
                f"no anchored fixed point at chi={chi:.6g}; point skipped",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        p, q, eps, rounds = sol
        fcoef = dev.fpoly(eps)
        p_chk, q_chk = dev.sweep(p, q, fcoef)
        residual = max(np.abs(p_chk - p).max(), np.abs(q_chk - q).max())
        if residual > residual_tol:
            warnings.warn(
                f"fixed-point residual {residual:.2e} above {residual_tol:.0e} "
                f"at chi={chi:.6g}; point skipped",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        state = DeState(L=params.L, p=p, q=q, epsilon=eps, iterations=rounds)
        family = ChannelFamily(kind, m, eps)
        points.append(
            CurvePoint(
                epsilon=eps,
                h=h_ebp(state, params, family),
                chi=chi,
                state=state,
                residual=float(residual),
                rounds=rounds,
            )
        )
    return points


def _anchored_point(
    dev: DensityEvolution,
    p: np.ndarray,
    q: np.ndarray,
    target: float,
    *,
    eps_bisect_tol: float,
    state_tol: float,
    eps_change_tol: float,
    max_rounds: int,
    anchor_tol: float = 1e-8,
    stuck_limit: int = 200,
):
    """Anchored continuation loop; returns (p, q, eps, rounds) or None."""
    eps_prev = None
    stuck = 0
    for r in range(1, max_rounds + 1):
        p_lo, q_lo = dev.staged_round(p, q, dev.fpoly(0.0))
        p_hi, q_hi = dev.staged_round(p, q, dev.fpoly(1.0))
        chi_lo = p_lo.mean()
        chi_hi = p_hi.mean()
        if target <= chi_lo:
            eps, p1, q1 = 0.0, p_lo, q_lo
        elif target >= chi_hi:
            eps, p1, q1 = 1.0, p_hi, q_hi
        else:
            lo, hi = 0.0, 1.0
            while hi - lo > eps_bisect_tol:
                mid = 0.5 * (lo + hi)
                pm, qm = dev.staged_round(p, q, dev.fpoly(mid))
                if pm.mean() < target:
                    lo = mid
                else:
                    hi = mid
            eps = 0.5 * (lo + hi)
            p1, q1 = dev.staged_round(p, q, dev.fpoly(eps))
        d_state = max(np.abs(p1 - p).max(), np.abs(q1 - q).max())
        d_eps = float("inf") if eps_prev is None else abs(eps - eps_prev)
        p, q, eps_prev = p1, q1, eps
        anchored = abs(p.mean() - target) <= anchor_tol
        if eps in (0.0, 1.0) and not anchored:
            stuck += 1
            if stuck > stuck_limit:
                return None
        else:
            stuck = 0
        if d_state < state_tol and d_eps < eps_change_tol and anchored:
            return p, q, eps, r
    return None
