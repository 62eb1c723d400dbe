"""The artificial world: toroidal lattice, creator placement, synchronous
iteration, and deterministic per-agent RNG streams."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import agent as agent_ops
from .actions import ActionChain, NEUTRAL, SubAction
from .agent import Agent, CREATE
from .analysis import RunSeries, p_create_histogram
from .fitness import TemplateSet, fitness_single
from .network import AutoAssociator

MODE_FIXED_ROLES = "fixed_roles"
MODE_SHARED_P = "shared_p"
REGIME_SINGLE_STEP = "single_step"
REGIME_TEMPLATE = "template"

INITIAL_P_CREATE = 0.5


class ConfigError(ValueError):
    """A world or experiment configuration field is invalid."""


@dataclass(frozen=True)
class WorldConfig:
    lattice_side: int = 32
    iterations: int = 100
    mode: str = MODE_FIXED_ROLES
    creator_fraction: float = 1.0
    creator_creativity: float = 1.0
    sr_enabled: bool = False
    chaining_enabled: bool = False
    fitness_regime: str = REGIME_SINGLE_STEP
    trend_learning: bool = True
    tau: float = 9.0
    max_chain_length: int = 50
    base_seed: int = 0
    template_file: Optional[str] = None

    @property
    def n_agents(self) -> int:
        return self.lattice_side ** 2

    def validate(self) -> "WorldConfig":
        if self.lattice_side < 2:
            raise ConfigError(f"lattice_side must be >= 2, got {self.lattice_side}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.mode not in (MODE_FIXED_ROLES, MODE_SHARED_P):
            raise ConfigError(f"mode must be fixed_roles or shared_p, got {self.mode!r}")
        if self.sr_enabled and self.mode == MODE_FIXED_ROLES:
            raise ConfigError("sr_enabled requires shared_p mode; fixed roles exclude SR")
        if not 0.0 <= self.creator_fraction <= 1.0:
            raise ConfigError(
                f"creator_fraction must be in [0, 1], got {self.creator_fraction}"
            )
        if not 0.0 <= self.creator_creativity <= 1.0:
            raise ConfigError(
                f"creator_creativity must be in [0, 1], got {self.creator_creativity}"
            )
        if self.fitness_regime not in (REGIME_SINGLE_STEP, REGIME_TEMPLATE):
            raise ConfigError(
                f"fitness_regime must be single_step or template, got {self.fitness_regime!r}"
            )
        if self.chaining_enabled and self.fitness_regime != REGIME_TEMPLATE:
            raise ConfigError("chaining_enabled requires the template fitness regime")
        if self.max_chain_length < 1:
            raise ConfigError(f"max_chain_length must be >= 1, got {self.max_chain_length}")
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        return self

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from (base_seed, run_index, agent_id, ...)."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def neighbor_table(side: int) -> List[Tuple[int, int, int, int]]:
    """Von Neumann neighborhoods with toroidal wraparound, row-major cells."""
    table = []
    for r in range(side):
        for c in range(side):
            up = ((r - 1) % side) * side + c
            down = ((r + 1) % side) * side + c
            left = r * side + (c - 1) % side
            right = r * side + (c + 1) % side
            table.append((up, down, left, right))
    return table


class World:
    """One run's mutable state: agents on the lattice plus the frozen
    previous-iteration snapshot that imitation reads."""

    def __init__(self, cfg: WorldConfig, run_index: int):
        cfg.validate()
        self.cfg = cfg
        self.run_index = run_index
        self.iteration = 0

        if cfg.fitness_regime == REGIME_TEMPLATE:
            ts = (
                TemplateSet.from_file(cfg.template_file)
                if cfg.template_file
                else TemplateSet.default()
            )
            self.template_set = ts
            self.evaluate: Callable[[ActionChain], float] = ts.fitness_chain
        else:
            self.template_set = None
            cache: Dict[SubAction, int] = {}

            def evaluate(chain: ActionChain, _cache=cache) -> float:
                total = 0
                for step in chain:
                    f = _cache.get(step)
                    if f is None:
                        f = fitness_single(step)
                        _cache[step] = f
                    total += f
                return total

            self.evaluate = evaluate

        n = cfg.n_agents
        self.neighbors = neighbor_table(cfg.lattice_side)
        placement_rng = random.Random(derive_seed(cfg.base_seed, run_index))
        creator_cells = frozenset(
            placement_rng.sample(range(n), round(cfg.creator_fraction * n))
        ) if cfg.mode == MODE_FIXED_ROLES else frozenset()

        initial_chain: ActionChain = (NEUTRAL,)
        initial_fitness = self.evaluate(initial_chain)
        self.agents: List[Agent] = []
        for i in range(n):
            rng = random.Random(derive_seed(cfg.base_seed, run_index, i))
            net = AutoAssociator(rng, trend_learning=cfg.trend_learning)
            net.train(NEUTRAL)  # defines invention bias at iteration 1
            if cfg.mode == MODE_FIXED_ROLES:
                is_creator = i in creator_cells
                role = agent_ops.ROLE_CREATOR if is_creator else agent_ops.ROLE_IMITATOR
                p_create = cfg.creator_creativity if is_creator else 0.0
            else:
                role = None
                p_create = INITIAL_P_CREATE
            self.agents.append(
                Agent(
                    id=i,
                    p_create=p_create,
                    chain=initial_chain,
                    fitness=initial_fitness,
                    net=net,
                    rng=rng,
                    role=role,
                )
            )

        self.snapshot: List[Tuple[ActionChain, float]] = [
            (a.chain, a.fitness) for a in self.agents
        ]
        self.mean_fitness_prev = initial_fitness
        self.series = RunSeries(
            mean_fitness=[],
            diversity=[],
            p_create_hist=[],
            config_digest=cfg.digest(),
            run_index=run_index,
        )

    def step(self) -> None:
        """One synchronous iteration: every agent acts against the frozen
        t-1 snapshot, then the SR update runs against the t-1 society mean."""
        cfg = self.cfg
        snapshot = self.snapshot
        neighbors = self.neighbors
        for a in self.agents:
            if a.rng.random() < a.p_create:  # inlined decide()
                candidate = agent_ops.invent(
                    a, self.template_set, cfg.chaining_enabled, cfg.max_chain_length
                )
                if candidate is not a.chain:
                    agent_ops.adopt_if_fitter(a, candidate, self.evaluate)
            else:
                up, down, left, right = neighbors[a.id]
                found = agent_ops.imitate(
                    a, (snapshot[up], snapshot[down], snapshot[left], snapshot[right])
                )
                if found is not None:
                    agent_ops.adopt(a, found[0], found[1])

        n = len(self.agents)
        mean_fit = sum(a.fitness for a in self.agents) / n
        if cfg.sr_enabled:
            # Relative fitness compares an agent's implemented action with
            # the society mean of the same actions; both become "the
            # previous iteration" by the time the next decisions are drawn.
            for a in self.agents:
                agent_ops.update_p_create(a, mean_fit)

        self.iteration += 1
        self.series.mean_fitness.append(mean_fit)
        self.series.diversity.append(len({a.chain for a in self.agents}))
        self.series.p_create_hist.append(
            p_create_histogram([a.p_create for a in self.agents])
        )
        self.mean_fitness_prev = mean_fit
        self.snapshot = [(a.chain, a.fitness) for a in self.agents]

    def run(self) -> RunSeries:
        while self.iteration < self.cfg.iterations:
            self.step()
        return self.series


def run_world(cfg: WorldConfig, run_index: int) -> RunSeries:
    """Execute one full run; a pure function of (cfg, run_index)."""
    return World(cfg, run_index).run()
