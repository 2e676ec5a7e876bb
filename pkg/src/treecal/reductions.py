"""Calibration-to-swap-regret reduction and the l1-ball/simplex embedding.

Best-responding to calibrated forecasts of the upcoming linear loss turns a
calibration guarantee over a domain into a swap-regret guarantee over any
finite action menu, paying only the menu's dual-norm diameter.  The
embedding maps the unit l1 ball into a simplex of twice-plus-one the
dimension via positive/negative parts with a slack coordinate, with a linear
left inverse, so simplex calibration transfers to l1-ball calibration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import L1Ball, Norm, Simplex, as_vector, dual_norm, norm_value
from .metrics import Forecast, NormDistance, Transcript, calibration_error
from .metrics import swap_regret_finite


def finite_menu(elements) -> np.ndarray:
    """Validate a finite action menu: non-empty, distinct at 12 digits."""
    menu = np.asarray(elements, dtype=float)
    if menu.ndim != 2 or menu.shape[0] == 0:
        raise DomainError("menu must be a non-empty (m, d) stack")
    keys = {tuple(np.round(q, 12).tolist()) for q in menu}
    if len(keys) != menu.shape[0]:
        raise DomainError("menu elements must be distinct")
    menu = menu.copy()
    menu.flags.writeable = False
    return menu


def best_response_index(p, menu) -> int:
    """Index of the menu element minimizing <q, p>; ties take the lowest."""
    scores = np.asarray(menu, dtype=float) @ as_vector(p)
    return int(np.argmin(scores))


def best_response(p, menu) -> np.ndarray:
    return np.asarray(menu, dtype=float)[best_response_index(p, menu)]


def menu_diameter(menu, kind: Norm) -> float:
    menu = np.asarray(menu, dtype=float)
    best = 0.0
    for i in range(menu.shape[0]):
        for j in range(i + 1, menu.shape[0]):
            best = max(best, norm_value(menu[i] - menu[j], kind))
    return best


@dataclass
class ReductionReport:
    """Both sides of the reduction inequality, plus the run artifacts."""

    dists: np.ndarray  # (T, m) swap-player distributions over the menu
    swap_regret: float
    calibration: float  # calibration error of the forecaster's transcript
    menu_diameter_dual: float
    transcript: Transcript

    @property
    def bound(self) -> float:
        return self.menu_diameter_dual * self.calibration

    def satisfied(self, slack: float = 1e-6) -> bool:
        return self.swap_regret <= self.bound + slack


def calibrated_to_swap(
    calibrator,
    menu,
    outcomes,
    kind: Norm = Norm.L1,
) -> ReductionReport:
    """Play best responses to calibrated forecasts of the loss vectors.

    ``calibrator`` follows the forecast/observe protocol over a domain that
    contains the loss vectors ``outcomes``; its forecast mass is pushed
    forward through the best-response map onto the menu.  The realized full
    swap regret of the pushforward is bounded by the menu's dual-norm
    diameter times the calibrator's norm calibration error.
    """
    menu = finite_menu(menu)
    outcomes = np.asarray(outcomes, dtype=float)
    T = outcomes.shape[0]
    dists = np.zeros((T, menu.shape[0]))
    forecasts = []
    for t in range(1, T + 1):
        forecast = calibrator.forecast(t)
        forecasts.append(forecast)
        for i in range(forecast.size):
            dists[t - 1, best_response_index(forecast.points[i], menu)] += float(
                forecast.weights[i]
            )
        calibrator.observe(t, outcomes[t - 1])
    transcript = Transcript(calibrator.domain, tuple(forecasts), outcomes)
    return ReductionReport(
        dists=dists,
        swap_regret=swap_regret_finite(menu, dists, outcomes),
        calibration=calibration_error(transcript, NormDistance(kind)),
        menu_diameter_dual=menu_diameter(menu, dual_norm(kind)),
        transcript=transcript,
    )


# ---------------------------------------------------------------------------
# l1 ball <-> simplex embedding
# ---------------------------------------------------------------------------


def embed_l1ball_to_simplex(y) -> np.ndarray:
    """Map the unit l1 ball into the (2d+1)-simplex.

    Coordinates interleave positive and negative parts of each entry and end
    with the slack 1 - ||y||_1.
    """
    y = as_vector(y)
    total = float(np.sum(np.abs(y)))
    if total > 1.0 + 1e-12:
        raise DomainError(f"||y||_1 = {total} exceeds the unit ball")
    d = y.shape[0]
    out = np.empty(2 * d + 1)
    out[0 : 2 * d : 2] = np.clip(y, 0.0, None)
    out[1 : 2 * d : 2] = np.clip(-y, 0.0, None)
    out[2 * d] = 1.0 - total
    return out


def project_simplex_to_l1ball(z) -> np.ndarray:
    """Left inverse of the embedding: differences of coordinate pairs.

    Linear in z, hence commutes with mixtures; the image always lies in the
    unit l1 ball.
    """
    z = as_vector(z)
    if z.shape[0] % 2 != 1 or z.shape[0] < 3:
        raise DomainError("expected a (2d+1)-dimensional simplex point")
    if not Simplex(z.shape[0]).contains(z):
        raise DomainError("point is not a simplex member")
    return z[0:-1:2] - z[1:-1:2]


def project_transcript_to_l1ball(tr: Transcript) -> Transcript:
    """Push a simplex-side transcript through the projection, atoms and all."""
    big = tr.domain.d
    if big % 2 != 1 or big < 3:
        raise DomainError("transcript domain must be a (2d+1)-simplex")
    small = L1Ball((big - 1) // 2, 1.0)
    forecasts = []
    for forecast in tr.forecasts:
        points = np.stack([project_simplex_to_l1ball(p) for p in forecast.points])
        forecasts.append(Forecast(points, forecast.weights.copy(), forecast.labels))
    outcomes = np.stack([project_simplex_to_l1ball(y) for y in tr.outcomes])
    return Transcript(small, tuple(forecasts), outcomes)
