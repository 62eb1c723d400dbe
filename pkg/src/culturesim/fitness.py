"""Fitness evaluation for actions.

Two regimes are supported:

* single-step: rewards overall movement, a stationary head, and
  symmetric/upward limb movement;
* template-based: a sub-action scores the summed order of every template
  it matches, and chains of acceptable sub-actions accumulate fitness
  step by step, making the output space open-ended.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Tuple

from .actions import (
    ActionChain,
    ActionFormatError,
    BodyPart,
    NUM_PARTS,
    SubAction,
    Template,
    all_subactions,
    parse_template,
)

# The only fully-specified sub-actions allowed to chain.
ACCEPTABLE_SUBACTIONS: Tuple[SubAction, ...] = (
    (0, 1, -1, 1, -1, 1),
    (0, 1, -1, 1, -1, -1),
    (0, -1, 1, -1, 1, 1),
    (0, -1, 1, -1, 1, -1),
)

_HD = BodyPart.HEAD.value
_LA = BodyPart.LEFT_ARM.value
_RA = BodyPart.RIGHT_ARM.value
_LL = BodyPart.LEFT_LEG.value
_RL = BodyPart.RIGHT_LEG.value


def fitness_single(sub: SubAction) -> int:
    """Single-step fitness.

    Immobility convention: the all-neutral action scores 0 even though a
    stationary head would otherwise contribute.
    """
    m = sum(1 for v in sub if v != 0)
    if m == 0:
        return 0
    m_u = sum(1 for v in sub if v == 1)
    m_h = 1 if sub[_HD] == 0 else 0
    s_a = 1 if sub[_LA] != 0 and sub[_LA] == sub[_RA] else 0
    s_l = 1 if sub[_LL] != 0 and sub[_LL] == sub[_RL] else 0
    p_a = 1 if sub[_LA] == 1 and sub[_RA] == 1 else 0
    p_l = 1 if sub[_LL] == 1 and sub[_RL] == 1 else 0
    return m + 2 * m_u + 10 * m_h + 5 * (s_a + s_l) + 2 * (p_a + p_l)


def max_fitness_single() -> int:
    return max(fitness_single(s) for s in all_subactions())


def template_weight(template: Template, sub: SubAction) -> int:
    """1 if every specified template component equals the sub-action's."""
    for t, d in zip(template, sub):
        if t is not None and t != d:
            return 0
    return 1


def template_order(template: Template) -> int:
    """Number of specified (non-wildcard) components."""
    return sum(1 for t in template if t is not None)


class TemplateSet:
    """An ordered collection of templates defining the chained-fitness landscape."""

    def __init__(self, templates: Iterable[Template]):
        self.templates = tuple(templates)
        if not self.templates:
            raise ValueError("template set is empty")
        self.acceptable = ACCEPTABLE_SUBACTIONS
        self._orders = tuple(template_order(t) for t in self.templates)
        self._cache: Dict[SubAction, int] = {}
        self._acceptable_set = frozenset(self.acceptable)

    @classmethod
    def from_file(cls, path) -> "TemplateSet":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
            raise ValueError(f"{path}: expected a JSON array of template strings")
        templates = []
        for i, text in enumerate(raw):
            try:
                templates.append(parse_template(text))
            except ActionFormatError as exc:
                raise ValueError(f"{path}: template {i}: {exc}") from exc
        return cls(templates)

    @classmethod
    def default(cls) -> "TemplateSet":
        with resources.as_file(
            resources.files("culturesim.data") / "default_templates.json"
        ) as path:
            return cls.from_file(path)

    def fitness_subaction(self, sub: SubAction) -> int:
        """Summed order of every matching template."""
        cached = self._cache.get(sub)
        if cached is not None:
            return cached
        total = 0
        for template, order in zip(self.templates, self._orders):
            if template_weight(template, sub):
                total += order
        self._cache[sub] = total
        return total

    def is_successful(self, sub: SubAction) -> bool:
        return sub in self._acceptable_set

    def fitness_chain(self, chain: ActionChain) -> int:
        return sum(self.fitness_subaction(step) for step in chain)


def fitness_subaction(sub: SubAction, ts: TemplateSet) -> int:
    return ts.fitness_subaction(sub)


def is_successful(sub: SubAction, ts: TemplateSet) -> bool:
    return ts.is_successful(sub)


def fitness_chain(chain: ActionChain, ts: TemplateSet) -> int:
    return ts.fitness_chain(chain)
