"""Synthesis and verification of ZD alliance strategies.

An alliance of leaders sharing one strategy can pin the outsiders'
expected payoff to a chosen baseline, or more generally enforce a linear
relation between its own expected payoff and the outsiders' one,
regardless of how the outsiders play.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .game import (COOPERATE, DEFECT, GameShape, PayoffVectors,
                   alliance_unison_payoff, outsider_unison_payoff,
                   payoff_vectors)
from .markov import (FollowerStrategy, LeaderStrategy, build_transition_matrix,
                     expected_payoffs, stationary, with_owner)

_F_ZERO = 1e-15


@dataclass(frozen=True)
class ZDParams:
    """Target linear relation: outsiders = slope * alliance + (1 - slope) * baseline."""

    chi: float
    l: float
    shape: GameShape
    phi: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.chi < 1.0:
            raise ValueError("slope chi must lie in [0, 1)")
        if self.phi is not None and self.phi == 0.0:
            raise ValueError("scaling phi must be nonzero")


@dataclass(frozen=True)
class SynthesisResult:
    strategy: LeaderStrategy
    f_unison: dict
    f_vector: np.ndarray
    phi: float
    phi_interval: tuple
    certificate: float
    params: ZDParams


def alliance_admissible(shape: GameShape) -> bool:
    """Alliance-size condition under which the payoff range is controllable.

    For a single outsider this reduces to r > N.
    """
    n, na, r = shape.n_players, shape.n_alliance, shape.r
    return (r - 1) / (2 * r) * n < na and na < (r - 1) / r * n


def feasible_l_range(chi: float, shape: GameShape):
    """Enforceable baseline-payoff interval (l_min, l_max)."""
    if not 0.0 <= chi < 1.0:
        raise ValueError("slope chi must lie in [0, 1)")
    if not alliance_admissible(shape):
        raise InfeasibleError(
            f"alliance of {shape.n_alliance} cannot control {shape.n_players} "
            f"players at r={shape.r}"
        )
    n, na, r = shape.n_players, shape.n_alliance, shape.r
    theta = r * (n - na) * (1 - chi) - n
    denom = n * (n - na) * (1 - chi)
    l_min = max(theta * b / denom + 1.0 for b in range(0, n - na + 1))
    l_max = min((theta * b + n * n) / denom for b in range(na, n + 1))
    if l_min > l_max:
        raise InfeasibleError(
            f"empty baseline range [{l_min}, {l_max}] at chi={chi}"
        )
    return l_min, l_max


def _unison_outcomes(shape):
    """(unison_action, total_cooperators) pairs, cooperation first."""
    n, na = shape.n_players, shape.n_alliance
    for b in range(na, n + 1):
        yield (COOPERATE, b)
    for b in range(0, n - na + 1):
        yield (DEFECT, b)


def _f_value(chi, l, s, b, shape):
    ga = alliance_unison_payoff(s, b, shape)
    go = outsider_unison_payoff(s, b, shape)
    return chi * (ga - l) - (go - l)


def _phi_interval(f_table):
    """Feasible scaling interval on each sign branch.

    Cooperation outcomes need ``phi * f`` in [-1, 0]; defection outcomes
    need it in [0, 1]. Returns ``(pos_hi, neg_lo, violator)`` where a zero
    bound marks an empty branch and ``violator`` names the outcome that
    emptied both.
    """
    pos_hi, neg_lo = math.inf, -math.inf
    violator = None
    for (s, b), fv in f_table.items():
        if abs(fv) < _F_ZERO:
            continue
        lo, hi = (-1.0, 0.0) if s == COOPERATE else (0.0, 1.0)
        a1, a2 = sorted((lo / fv, hi / fv))
        pos_hi = min(pos_hi, a2 if a2 > 0 else 0.0)
        neg_lo = max(neg_lo, a1 if a1 < 0 else 0.0)
        if pos_hi == 0.0 and neg_lo == 0.0 and violator is None:
            violator = (s, b)
    return pos_hi, neg_lo, violator


def synthesize(params: ZDParams, payoffs: PayoffVectors | None = None) -> SynthesisResult:
    """Derive the shared alliance strategy enforcing the requested relation.

    The strategy table covers every leader index; indices reachable only
    when the alliance is split default to 0 (unreachable under coupling).
    """
    shape = params.shape
    chi, l = params.chi, params.l
    l_min, l_max = feasible_l_range(chi, shape)
    if not l_min - 1e-9 <= l <= l_max + 1e-9:
        raise InfeasibleError(
            f"baseline {l} outside enforceable range [{l_min}, {l_max}]"
        )

    f_table = {(s, b): _f_value(chi, l, s, b, shape)
               for s, b in _unison_outcomes(shape)}
    pos_hi, neg_lo, violator = _phi_interval(f_table)
    if pos_hi <= 0.0 and neg_lo >= 0.0:
        where = f"outcome {violator}" if violator else "conflicting outcomes"
        raise InfeasibleError(f"no nonzero scaling satisfies {where}")

    if params.phi is not None:
        phi = params.phi
        ok = (0.0 < phi <= pos_hi) if phi > 0 else (neg_lo <= phi < 0.0)
        if not ok:
            raise InfeasibleError(f"scaling {phi} outside feasible interval")
        interval = (0.0, pos_hi) if phi > 0 else (neg_lo, 0.0)
    else:
        if pos_hi >= -neg_lo:
            interval = (0.0, pos_hi)
        else:
            interval = (neg_lo, 0.0)
        phi = (interval[0] + interval[1]) / 2.0

    strategy = _alliance_strategy(shape, f_table, phi)
    if payoffs is None:
        payoffs = payoff_vectors(shape)
    f_vector = chi * (payoffs.alliance - l) - (payoffs.outsiders - l)

    result = SynthesisResult(strategy, f_table, f_vector, phi, interval,
                             math.nan, params)
    certificate = verify_enforcement(result, _default_outsiders(shape))
    return SynthesisResult(strategy, f_table, f_vector, phi, interval,
                           certificate, params)


def _alliance_strategy(shape, f_table, phi):
    nl, na, n = shape.n_leaders, shape.n_alliance, shape.n_players
    probs = {}
    for s in (1, 0):
        for x in range(nl):
            for y in range(shape.n_followers + 1):
                if s == COOPERATE and x >= na - 1:
                    b = na + (x - (na - 1)) + y
                    p = phi * f_table[(COOPERATE, b)] + 1.0
                elif s == DEFECT and x <= nl - na:
                    b = x + y
                    p = phi * f_table[(DEFECT, b)]
                else:
                    p = 0.0  # only reachable when the alliance splits
                if not -1e-9 <= p <= 1.0 + 1e-9:
                    raise InfeasibleError(
                        f"strategy entry {p} for index ({s}, {x}, {y}) "
                        "escapes [0, 1]"
                    )
                probs[(s, x, y)] = min(max(p, 0.0), 1.0)
    return LeaderStrategy(0, probs)


def _default_outsiders(shape):
    leaders = [LeaderStrategy.constant(i, shape, 0.5)
               for i in range(shape.n_alliance, shape.n_leaders)]
    followers = [FollowerStrategy.constant(j, shape, 0.5)
                 for j in range(shape.n_leaders, shape.n_players)]
    return leaders + followers


def random_outsiders(shape: GameShape, rng):
    """Arbitrary strategies for all non-alliance players."""
    leaders = [LeaderStrategy.random(i, shape, rng)
               for i in range(shape.n_alliance, shape.n_leaders)]
    followers = [FollowerStrategy.random(j, shape, rng)
                 for j in range(shape.n_leaders, shape.n_players)]
    return leaders + followers


def verify_enforcement(result: SynthesisResult, outsider_strategies,
                       chi: float | None = None, l: float | None = None) -> float:
    """Residual of the enforced relation against the stationary oracle.

    ``outsider_strategies`` lists strategies for players n_alliance..N-1
    in order: non-alliance leaders first, then followers.
    """
    shape = result.params.shape
    if chi is None:
        chi = result.params.chi
    if l is None:
        l = result.params.l
    n_out_leaders = shape.n_leaders - shape.n_alliance
    if len(outsider_strategies) != shape.n_players - shape.n_alliance:
        raise ValueError("need one strategy per outsider")
    leaders = [with_owner(result.strategy, i) for i in range(shape.n_alliance)]
    leaders += list(outsider_strategies[:n_out_leaders])
    followers = list(outsider_strategies[n_out_leaders:])

    tm = build_transition_matrix(shape, leaders, followers, coupling=True)
    sv = stationary(tm, tol=1e-12)
    pi_a, pi_out = expected_payoffs(shape, sv, payoff_vectors(shape))
    return abs(pi_out - chi * pi_a - (1 - chi) * l)


def incentive_menu(n_alliance: int, r: float):
    """Enforceable outsider payoffs (reward for cooperating, punishment
    for defecting) in the single-outsider game."""
    n = n_alliance + 1
    if not r > n:
        raise InfeasibleError(
            f"r={r} gives the alliance no control over a {n}-player game"
        )
    return r * n_alliance / n + 1.0, r / n


def dominance_check(shape: GameShape) -> bool:
    """Whether cooperating beats defecting for the alliance against a
    single outsider, whichever action the outsider takes."""
    n, na, r = shape.n_players, shape.n_alliance, shape.r
    if n - na != 1:
        raise ValueError("dominance analysis applies to a single outsider")
    return all(r * (na + a) / n > r * a / n + 1 for a in (0, 1))
