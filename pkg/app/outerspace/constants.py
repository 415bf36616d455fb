"""
    Closed-form constants of the contraction and progress arguments.

    Every function is a pure calculator. Symmetrization constants s_ε are
    always inputs: they have no closed formula and come either from
    metric.estimate_sym_constant or from the caller.
"""
import math
from typing import Optional

from app.datamanager.exception_classes import DomainError, MissingSymConstantError
from app.schemas.pydantic_models import (
    ConstantRow, ProgressConstants, ThicknessConstants, ThresholdConstants, TransientShortness
)

UPPER_SLOPE = 80.0
UPPER_INTERCEPT = 80.0


def _require(name: str, value: float, ok: bool, requirement: str) -> None:
    if not ok:
        raise DomainError(name, value, requirement)


def _require_sym(name: str, value: Optional[float]) -> float:
    if value is None:
        raise MissingSymConstantError(name)
    _require(name, value, value >= 1, "must be at least 1")
    return value


def transient_epsilon(epsilon: float) -> float:
    """ ε' = ε / (1 + 2/ε). """
    return epsilon / (1 + 2 / epsilon)


def transient_shortness_bound(epsilon: float, d: float, s_eps: Optional[float],
                              s_eps_prime: Optional[float]) -> TransientShortness:
    """
    2·s_ε·(1 + s_ε')·log(1 + 2/ε) + 2D, the bound on how long a short loop stays short.
    :param epsilon: in (0, 1)
    :param d: contraction constant D >= 0
    :param s_eps: symmetrization constant at ε
    :param s_eps_prime: symmetrization constant at ε'
    :return: TransientShortness (bound and ε')
    """
    _require("epsilon", epsilon, 0 < epsilon < 1, "must lie in (0, 1)")
    _require("D", d, d >= 0, "must be nonnegative")
    s_eps = _require_sym("s_eps", s_eps)
    s_eps_prime = _require_sym("s_eps_prime", s_eps_prime)
    bound = 2 * s_eps * (1 + s_eps_prime) * math.log(1 + 2 / epsilon) + 2 * d
    return TransientShortness(bound=bound, epsilon_prime=transient_epsilon(epsilon))


def thickness_chain(d: float, lipschitz_constant: float) -> ThicknessConstants:
    """
    E = D(L + 8DL²) + D, ε₁ = e^-E, ε₀ = e^-2E and ε = (ε₀/2)·e^-4DL.
    """
    _require("D", d, d >= 0, "must be nonnegative")
    _require("L", lipschitz_constant, lipschitz_constant >= 1, "must be at least 1")
    big_l = lipschitz_constant
    e = d * (big_l + 8 * d * big_l ** 2) + d
    epsilon_0 = math.exp(-2 * e)
    return ThicknessConstants(
        d=d,
        lipschitz_constant=big_l,
        e=e,
        epsilon_1=math.exp(-e),
        epsilon_0=epsilon_0,
        epsilon=(epsilon_0 / 2) * math.exp(-4 * d * big_l),
    )


def progress_constant(d: float, d_epsilon: float) -> ProgressConstants:
    """
    Combines |s - t| <= 2D·d + (2D_ε + D) and d <= 80|s - t| + 80 into one K:
    K = max(80 + 80, 2D, 2D_ε + D, 1).
    """
    _require("D", d, d >= 0, "must be nonnegative")
    _require("D_eps", d_epsilon, d_epsilon >= 0, "must be nonnegative")
    lower_slope = 2 * d
    lower_intercept = 2 * d_epsilon + d
    return ProgressConstants(
        d=d,
        d_epsilon=d_epsilon,
        lower_slope=lower_slope,
        lower_intercept=lower_intercept,
        upper_slope=UPPER_SLOPE,
        upper_intercept=UPPER_INTERCEPT,
        k=max(UPPER_SLOPE + UPPER_INTERCEPT, lower_slope, lower_intercept, 1.0),
    )


def nondegeneracy_threshold(d: float, lipschitz_constant: float, epsilon: float,
                            s_eps_prime: Optional[float]) -> ThresholdConstants:
    """
    Thresholds read off D and L: 18DL, ε' = ε·e^-18DL, A = s_ε'·18DL, the
    back-up trigger 8DL and the two sandwich intervals.
    """
    _require("D", d, d >= 0, "must be nonnegative")
    _require("L", lipschitz_constant, lipschitz_constant >= 1, "must be at least 1")
    _require("epsilon", epsilon, 0 < epsilon < 1, "must lie in (0, 1)")
    s_eps_prime = _require_sym("s_eps_prime", s_eps_prime)
    big_l = lipschitz_constant
    nondegeneracy = 18 * d * big_l
    return ThresholdConstants(
        nondegeneracy=nondegeneracy,
        epsilon_prime=epsilon * math.exp(-nondegeneracy),
        length_bound_a=s_eps_prime * nondegeneracy,
        backup_trigger=8 * d * big_l,
        diameter_sandwich=[4 * d * big_l, d * (big_l + 8 * d * big_l ** 2 + 1)],
        length_sandwich=[3 * big_l, big_l + 8 * d * big_l ** 2],
    )


def constants_table(d: float, lipschitz_constant: float, epsilon: Optional[float] = None,
                    s_eps: Optional[float] = None, s_eps_prime: Optional[float] = None,
                    d_epsilon: Optional[float] = None) -> list[ConstantRow]:
    """
    Every constant that the inputs determine, labeled with the argument it comes from.
    A missing s-value raises MissingSymConstantError when ε is given.
    """
    thick = thickness_chain(d, lipschitz_constant)
    rows = [
        ConstantRow(name="E", value=thick.e, provenance="Prop. 6.1, back-up thickness chain: E = D(L+8DL^2)+D"),
        ConstantRow(name="epsilon_1", value=thick.epsilon_1, provenance="Prop. 6.1, back-up thickness chain: e^-E"),
        ConstantRow(name="epsilon_0", value=thick.epsilon_0, provenance="Prop. 6.1, back-up thickness chain: e^-2E"),
        ConstantRow(name="epsilon", value=thick.epsilon, provenance="Lemma 7.3, right-minimization thickness: (eps_0/2)e^-4DL"),
    ]
    threshold_eps = epsilon if epsilon is not None else thick.epsilon
    if 0 < threshold_eps < 1:
        thresholds = nondegeneracy_threshold(d, lipschitz_constant, threshold_eps, s_eps_prime or 1.0)
        rows += [
            ConstantRow(name="18DL", value=thresholds.nondegeneracy, provenance="§3, nondegeneracy threshold: 18DL"),
            ConstantRow(name="epsilon_prime_thresholds", value=thresholds.epsilon_prime,
                        provenance="Lemma 3.4, thick neighbourhood of a nondegenerate geodesic: eps e^-18DL"),
        ]
        if s_eps_prime is not None:
            rows.append(ConstantRow(name="A", value=thresholds.length_bound_a,
                                    provenance="Lemma 3.4, nondegenerate length: s_eps' * 18DL"))
        rows += [
            ConstantRow(name="8DL", value=thresholds.backup_trigger, provenance="Prop. 6.1, back-up trigger: 8DL"),
            ConstantRow(name="diameter_sandwich_low", value=thresholds.diameter_sandwich[0],
                        provenance="Lemma 4.4, two-petal rose sandwich: 4DL"),
            ConstantRow(name="diameter_sandwich_high", value=thresholds.diameter_sandwich[1],
                        provenance="Lemma 4.4, two-petal rose sandwich: D(L+8DL^2+1)"),
            ConstantRow(name="length_sandwich_low", value=thresholds.length_sandwich[0],
                        provenance="Lemma 4.4, two-petal rose sandwich: 3L"),
            ConstantRow(name="length_sandwich_high", value=thresholds.length_sandwich[1],
                        provenance="Lemma 4.4, two-petal rose sandwich: L+8DL^2"),
        ]
    if epsilon is not None:
        transient = transient_shortness_bound(epsilon, d, s_eps, s_eps_prime)
        rows += [
            ConstantRow(name="epsilon_prime_transient", value=transient.epsilon_prime,
                        provenance="Lemma 5.2, transient shortness: eps/(1+2/eps)"),
            ConstantRow(name="D_eps", value=transient.bound,
                        provenance="Lemma 5.2, transient shortness: 2 s_eps (1+s_eps') log(1+2/eps) + 2D"),
        ]
        if d_epsilon is None:
            d_epsilon = transient.bound
    if d_epsilon is not None:
        progress = progress_constant(d, d_epsilon)
        rows += [
            ConstantRow(name="lower_slope", value=progress.lower_slope, provenance="Prop. 5.1, progress lower bound: 2D"),
            ConstantRow(name="lower_intercept", value=progress.lower_intercept,
                        provenance="Prop. 5.1, progress lower bound: 2D_eps + D"),
            ConstantRow(name="upper_slope", value=progress.upper_slope, provenance="Prop. 5.1, coarse 80-Lipschitz projection"),
            ConstantRow(name="upper_intercept", value=progress.upper_intercept,
                        provenance="Prop. 5.1, coarse 80-Lipschitz projection"),
            ConstantRow(name="K", value=progress.k, provenance="Prop. 5.1, quasigeodesic constant: max(160, 2D, 2D_eps + D, 1)"),
        ]
    return rows
