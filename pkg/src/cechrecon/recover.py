"""Homology of an unknown space from the intrinsic Čech filtration of a sample.

Given the reach ``tau`` of X and ``d = d_H(X, A) < tau / 3``, for any
``alpha`` in ``(2d, tau - d)`` and ``eps`` in ``(d, tau - alpha]`` the
persistent homology rank of ``C_A(A, alpha) -> C_A(A, alpha + eps)`` equals
the Betti number of X in every degree.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field

from .complex import filtered_ambient_cech, filtered_cech
from .errors import AlphaOutOfRange, DensityTooLow, EmptySample, EpsilonOutOfRange
from .homology import (
    Barcode,
    PersistentImageQuery,
    betti,
    induced_rank_oracle,
    persistence,
    persistent_image_rank,
)
from .metric import EuclideanCloud, SubsetView, directed_hausdorff

log = logging.getLogger(__name__)

NSW_DENSITY = math.sqrt(3.0 / 20.0)
NSW_RADIUS = math.sqrt(3.0 / 5.0)


@dataclass(frozen=True)
class RecoveryParams:
    tau: float
    d: float
    alpha: float
    epsilon: float
    k_max: int = 2
    p: int = 2
    closed_alpha: bool = False  # alpha == 2d admitted (finite, hence compact, sample)
    d_is_lower_bound: bool = False  # d came from a finite proxy of X


def validate_params(
    tau: float,
    d: float,
    alpha: float,
    epsilon: float,
    k_max: int = 2,
    p: int = 2,
    *,
    closed_alpha: bool = False,
    d_is_lower_bound: bool = False,
) -> RecoveryParams:
    """Check ``d < tau/3``, ``alpha in (2d, tau-d)`` and ``eps in (d, tau-alpha]``.

    ``closed_alpha`` admits ``alpha == 2d``, which is valid for finite samples.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not d >= 0:
        raise ValueError("d must be nonnegative")
    if not (alpha > 0 and epsilon > 0):
        raise ValueError("alpha and epsilon must be positive")
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if not d < tau / 3:
        raise DensityTooLow(f"d={d!r} is not below tau/3={tau / 3!r}")
    low_ok = alpha >= 2 * d if closed_alpha else alpha > 2 * d
    if not (low_ok and alpha < tau - d):
        bracket = "[" if closed_alpha else "("
        raise AlphaOutOfRange(f"alpha={alpha!r} outside {bracket}{2 * d!r}, {tau - d!r})")
    if not (d < epsilon <= tau - alpha):
        raise EpsilonOutOfRange(f"epsilon={epsilon!r} outside ({d!r}, {tau - alpha!r}]")
    return RecoveryParams(tau, d, alpha, epsilon, k_max, p, closed_alpha, d_is_lower_bound)


def default_params(tau: float, d: float, *, finite_sample: bool = True) -> tuple[float, float]:
    """Largest admissible window: ``alpha = 2d`` and ``eps = tau - alpha``.

    ``d == 0`` gives ``alpha = eps = tau/2``. Without a finite sample the closed
    endpoint is not available and alpha is the midpoint of ``(2d, tau - d)``.
    """
    if not tau > 0 or d < 0:
        raise ValueError("need tau > 0 and d >= 0")
    if not d < tau / 3:
        raise DensityTooLow(f"d={d!r} is not below tau/3={tau / 3!r}")
    if d == 0:
        return tau / 2, tau / 2
    alpha = 2 * d if finite_sample else (2 * d + tau - d) / 2
    return alpha, tau - alpha


def estimate_d(proxy: SubsetView, sample: SubsetView) -> float:
    """``d_H(proxy, sample)``: a lower bound for ``d_H(X, sample)``."""
    return directed_hausdorff(proxy, sample)


@dataclass
class RecoveryReport:
    params: RecoveryParams
    betti_claim: list
    barcode: Barcode
    warnings: list = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "params": asdict(self.params),
            "betti_claim": list(self.betti_claim),
            "barcode": self.barcode.to_json_obj(),
            "warnings": list(self.warnings),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)


def _as_view(A) -> SubsetView:
    if isinstance(A, EuclideanCloud):
        return A.metric().full()
    return A


def recover_homology(
    A: SubsetView | EuclideanCloud,
    params: RecoveryParams,
    *,
    margin: float | None = None,
    verify: bool = False,
) -> RecoveryReport:
    """Betti numbers of X claimed from the intrinsic filtration ``C_A(A)``.

    ``betti_claim[k]`` counts bars of degree k born before ``alpha`` and
    alive through ``alpha + eps``. The returned barcode keeps bars born at or
    below ``alpha + eps + margin`` (default margin: ``eps``). With ``verify``
    each rank is recomputed by :func:`induced_rank_oracle`.
    """
    view = _as_view(A)
    if len(view) == 0:
        raise EmptySample("sample A is empty")
    F = filtered_cech(view, view, params.k_max + 1)
    bc = persistence(F, params.p, params.k_max)
    top = params.alpha + params.epsilon
    claim = [
        persistent_image_rank(bc, PersistentImageQuery(k, params.alpha, top))
        for k in range(params.k_max + 1)
    ]
    warnings = []
    if params.d_is_lower_bound:
        warnings.append(
            "d was computed from a finite proxy of X and is only a lower bound; "
            "the hypothesis check is optimistic"
        )
    if verify:
        for k in range(params.k_max + 1):
            r = induced_rank_oracle(F, k, params.alpha, top, params.p)
            if r != claim[k]:
                warnings.append(f"rank oracle disagrees in degree {k}: {r} vs {claim[k]}")
    for w in warnings:
        log.warning(w)
    margin = params.epsilon if margin is None else margin
    return RecoveryReport(params, claim, bc.restricted(top + margin), warnings)


def nsw_reconstruct_check(
    A: EuclideanCloud, tau: float, d: float, alpha: float, k_max: int = 2, p: int = 2
) -> list[int]:
    """Betti numbers of the ambient Čech complex ``C_{R^n}(A, alpha)``.

    Requires ``d < sqrt(3/20) tau`` and ``alpha in (2d, sqrt(3/5) tau)``, under
    which that complex is homotopy equivalent to X.
    """
    if not tau > 0 or d < 0:
        raise ValueError("need tau > 0 and d >= 0")
    if not d < NSW_DENSITY * tau:
        raise DensityTooLow(f"d={d!r} is not below sqrt(3/20)*tau={NSW_DENSITY * tau!r}")
    if not 2 * d < alpha < NSW_RADIUS * tau:
        raise AlphaOutOfRange(f"alpha={alpha!r} outside ({2 * d!r}, {NSW_RADIUS * tau!r})")
    if A.n == 0:
        raise EmptySample("sample A is empty")
    K = filtered_ambient_cech(A, k_max + 1).slice(alpha)
    return [betti(K, k, p) for k in range(k_max + 1)]
