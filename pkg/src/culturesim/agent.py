"""One agent's per-iteration behavior: create-vs-imitate decisions, biased
invention, chain extension, lazy imitation, and the social-regulation
update of the personal creation probability."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .actions import ActionChain, SYMMETRIC_PARTNER, SubAction
from .fitness import TemplateSet
from .network import AutoAssociator

CREATE = "create"
IMITATE = "imitate"

FLIP_PROBABILITY = 1.0 / 6.0
_MAX_DRAW_TRIES = 16

ROLE_CREATOR = "creator"
ROLE_IMITATOR = "imitator"


@dataclass
class Agent:
    id: int
    p_create: float
    chain: ActionChain
    fitness: float
    net: AutoAssociator
    rng: random.Random
    role: Optional[str] = None


def decide(agent: Agent) -> str:
    """One Bernoulli draw from the agent's own stream."""
    return CREATE if agent.rng.random() < agent.p_create else IMITATE


def draw_position(
    current: int, partner: int, movement_bias: float, symmetry_bias: float,
    rng: random.Random,
) -> int:
    """Draw a new position for a flipped component, guaranteed != current.

    Active-vs-neutral is biased by the MOVEMENT activation (uniform over
    the three positions at bias 0.5, never neutral at bias 1).  When the
    symmetric partner limb is active, its direction is copied with
    probability equal to the SYMMETRY activation.
    """
    p_active = (1.0 + 2.0 * movement_bias) / 3.0
    for _ in range(_MAX_DRAW_TRIES):
        if rng.random() >= p_active:
            value = 0
        elif partner != 0:
            value = partner if rng.random() < symmetry_bias else -partner
        else:
            value = 1 if rng.random() < 0.5 else -1
        if value != current:
            return value
    # Biases pinned an impossible draw; fall back to uniform over the rest.
    return rng.choice([v for v in (-1, 0, 1) if v != current])


def mutate_subaction(
    base: SubAction, movement_bias: float, symmetry_bias: float, rng: random.Random
) -> SubAction:
    """Flip each component with probability 1/6 (one change on average)."""
    parts = list(base)
    changed = False
    for j in range(6):
        if rng.random() < FLIP_PROBABILITY:
            partner_idx = SYMMETRIC_PARTNER.get(j)
            partner = base[partner_idx] if partner_idx is not None else 0
            parts[j] = draw_position(base[j], partner, movement_bias, symmetry_bias, rng)
            changed = True
    return tuple(parts) if changed else base


def extend_chain(
    steps: Sequence[SubAction],
    ts: TemplateSet,
    max_chain_length: int,
    movement_bias: float,
    symmetry_bias: float,
    rng: random.Random,
) -> ActionChain:
    """Append novel, acceptable sub-actions until the first failed candidate."""
    steps = list(steps)
    while len(steps) < max_chain_length:
        if not ts.is_successful(steps[-1]):
            break
        candidate = mutate_subaction(steps[-1], movement_bias, symmetry_bias, rng)
        if candidate == steps[-1] or not ts.is_successful(candidate):
            break
        steps.append(candidate)
    return tuple(steps)


def invent(
    agent: Agent,
    ts: Optional[TemplateSet],
    chaining_enabled: bool,
    max_chain_length: int,
) -> ActionChain:
    """Produce a candidate chain by mutating the final step of the current one.

    Earlier steps are immutable; in chaining mode the extension loop may
    append further acceptable steps.
    """
    movement_bias, symmetry_bias = agent.net.invention_bias()
    new_final = mutate_subaction(agent.chain[-1], movement_bias, symmetry_bias, agent.rng)
    steps = agent.chain[:-1] + (new_final,)
    if len(steps) > 1 and steps[-1] == steps[-2]:
        return agent.chain  # mutation collided with the previous step
    if chaining_enabled:
        steps = extend_chain(
            steps, ts, max_chain_length, movement_bias, symmetry_bias, agent.rng
        )
    return steps


_PERMUTATIONS_4 = tuple(itertools.permutations(range(4)))


def imitate(
    agent: Agent, neighbors: Sequence[Tuple[ActionChain, float]]
) -> Optional[Tuple[ActionChain, float]]:
    """Lazy scan: neighbors in random order, first strictly fitter one wins."""
    if len(neighbors) == 4:
        order = _PERMUTATIONS_4[int(agent.rng.random() * 24)]
    else:
        order = agent.rng.sample(range(len(neighbors)), len(neighbors))
    own = agent.fitness
    for idx in order:
        chain, fit = neighbors[idx]
        if fit > own:
            return chain, fit
    return None


def adopt_if_fitter(
    agent: Agent, candidate: ActionChain, evaluate: Callable[[ActionChain], float]
) -> bool:
    """Adopt a strictly fitter candidate and train the network on its final step."""
    fit = evaluate(candidate)
    if fit <= agent.fitness:
        return False
    adopt(agent, candidate, fit)
    return True


def adopt(agent: Agent, chain: ActionChain, fit: float) -> None:
    agent.chain = chain
    agent.fitness = fit
    agent.net.train(chain[-1])


def update_p_create(agent: Agent, mean_fitness_prev: float) -> None:
    """Multiplicative social-regulation update, clamped to [0, 1].

    A zero previous mean (the initial immobile society) carries no signal,
    so the relative fitness is taken as 1.
    """
    if mean_fitness_prev == 0:
        return
    rf = agent.fitness / mean_fitness_prev
    agent.p_create = min(1.0, max(0.0, agent.p_create * rf))
