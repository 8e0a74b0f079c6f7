"""Payoff arithmetic for the multi-player social-dilemma game.

Players choose cooperate (1) or defect (0) each round. A full action
profile of ``n`` players is packed into an integer state: bit ``i`` is
the action of player ``i``, so state 0 is all-defect. Players are
ordered alliance members first, then the remaining leaders, then the
followers.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

COOPERATE = 1
DEFECT = 0


@dataclass(frozen=True)
class PayoffScale:
    """Per-game payoff factor ``r(n) = a * n**k + b`` for an n-player game."""

    a: float = 2.0
    k: int = 1
    b: float = 3.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("coefficient a must be nonnegative")
        if self.k not in (1, 2):
            raise ValueError("exponent k must be 1 or 2")

    def __call__(self, n):
        return self.a * n ** self.k + self.b


@dataclass(frozen=True)
class GameShape:
    """Static parameters of one sequential game.

    n_players
        Total player count N.
    n_leaders
        First movers; the remaining players are followers.
    n_alliance
        Alliance size; alliance members are the lowest-indexed leaders.
    r
        Payoff factor of this game.
    """

    n_players: int
    n_leaders: int
    n_alliance: int
    r: float

    def __post_init__(self):
        if self.n_players < 2:
            raise ValueError("need at least two players")
        if not 1 <= self.n_leaders <= self.n_players:
            raise ValueError("leader count out of range")
        if not 1 <= self.n_alliance <= self.n_leaders:
            raise ValueError("alliance must be a nonempty subset of the leaders")
        if self.n_players - self.n_alliance < 1:
            raise ValueError("at least one outsider is required")
        if self.r <= 0:
            raise ValueError("payoff factor must be positive")

    @property
    def n_followers(self):
        return self.n_players - self.n_leaders

    @property
    def n_states(self):
        return 1 << self.n_players

    @property
    def alliance(self):
        return range(self.n_alliance)


def state_actions(state: int, n_players: int) -> tuple[int, ...]:
    """Unpack a state integer into per-player actions (bit i = player i)."""
    return tuple((state >> i) & 1 for i in range(n_players))


def cooperator_count(state: int) -> int:
    return state.bit_count()


def alliance_action(state: int, shape: GameShape):
    """Unison action of the alliance in ``state``: 1, 0, or None if split."""
    mask = (1 << shape.n_alliance) - 1
    part = state & mask
    if part == mask:
        return COOPERATE
    if part == 0:
        return DEFECT
    return None


def utility(action: int, coop_neighbors: int, neighbor_count: int, r: float) -> float:
    """Single-round payoff of one player.

    ``coop_neighbors`` is the number of cooperators among the player's
    ``neighbor_count`` co-players.
    """
    if action not in (0, 1):
        raise ValueError("action must be 0 or 1")
    if neighbor_count < 1:
        raise ValueError("a game needs at least one co-player")
    if not 0 <= coop_neighbors <= neighbor_count:
        raise ValueError("cooperating-neighbor count out of range")
    if r <= 0:
        raise ValueError("payoff factor must be positive")
    return r * (coop_neighbors + action) / (neighbor_count + 1) + (1 - action)


def is_social_dilemma(r: float) -> bool:
    """Whether the game with factor ``r`` is a social dilemma (r > 1)."""
    if r <= 0:
        raise ValueError("payoff factor must be positive")
    return r > 1


def alliance_unison_payoff(unison_action: int, total_cooperators: int,
                           shape: GameShape) -> float:
    """Closed-form average alliance payoff when the alliance acts in unison."""
    b, n = total_cooperators, shape.n_players
    _check_unison_count(unison_action, b, shape)
    if unison_action == COOPERATE:
        return shape.r * b / n
    return shape.r * b / n + 1.0


def outsider_unison_payoff(unison_action: int, total_cooperators: int,
                           shape: GameShape) -> float:
    """Closed-form average outsider payoff when the alliance acts in unison."""
    b, n, na = total_cooperators, shape.n_players, shape.n_alliance
    _check_unison_count(unison_action, b, shape)
    base = shape.r * b / n
    if unison_action == COOPERATE:
        return ((b - na) * base + (n - b) * (base + 1.0)) / (n - na)
    return (b * base + (n - na - b) * (base + 1.0)) / (n - na)


def _check_unison_count(unison_action, b, shape):
    if unison_action == COOPERATE:
        if not shape.n_alliance <= b <= shape.n_players:
            raise ValueError("cooperator count impossible for a cooperating alliance")
    elif unison_action == DEFECT:
        if not 0 <= b <= shape.n_players - shape.n_alliance:
            raise ValueError("cooperator count impossible for a defecting alliance")
    else:
        raise ValueError("unison action must be 0 or 1")


@dataclass(frozen=True)
class PayoffVectors:
    """State-indexed average payoffs of alliance members and outsiders."""

    alliance: np.ndarray
    outsiders: np.ndarray
    shape: GameShape


@functools.lru_cache(maxsize=None)
def payoff_vectors(shape: GameShape) -> PayoffVectors:
    """Average payoffs of the alliance group and the outsider group per state.

    Every state is covered: on alliance-unison states the values reduce to
    the closed forms above; split states use the same per-group averages of
    the individual payoffs.
    """
    n = shape.n_players
    na = shape.n_alliance
    g_all = np.empty(shape.n_states)
    g_out = np.empty(shape.n_states)
    for state in range(shape.n_states):
        acts = state_actions(state, n)
        b = cooperator_count(state)
        pays = [utility(a, b - a, n - 1, shape.r) for a in acts]
        g_all[state] = sum(pays[:na]) / na
        g_out[state] = sum(pays[na:]) / (n - na)
    g_all.flags.writeable = False
    g_out.flags.writeable = False
    return PayoffVectors(g_all, g_out, shape)
