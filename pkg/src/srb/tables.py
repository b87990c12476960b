"""Loading (or rebuilding) the Clifford group and recipe caches."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .qgroups import CacheError, CliffordGroup, build_clifford_group, load_group, save_group
from .synth import (CliffordRecipe, DEFAULT_SEED, build_recipe_table, load_recipes,
                    phase_reversed_recipe)

log = logging.getLogger(__name__)

GROUP_FILE = "clifford_group.json"
RECIPE_FILE = "recipes.jsonl"


@dataclass(frozen=True, eq=False)
class GateTables:
    group: CliffordGroup
    recipes: tuple[CliffordRecipe, ...]
    reversed_recipes: tuple[CliffordRecipe, ...] = field(repr=False)


def _with_reversed(group: CliffordGroup, recipes) -> GateTables:
    rev = tuple(phase_reversed_recipe(r, group.unitaries[r.clifford]) for r in recipes)
    return GateTables(group, tuple(recipes), rev)


def packaged_cache_dir() -> Path:
    return Path(str(resources.files("srb") / "data"))


def load_or_build(cache_dir: str | Path, master_seed: int = DEFAULT_SEED,
                  workers: int = 1, rebuild: bool = False) -> tuple[GateTables, bool]:
    """Load cached tables from ``cache_dir``, rebuilding whatever is missing or corrupt.

    Returns the tables and whether anything was recomputed.
    """
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    gpath, rpath = cache_dir / GROUP_FILE, cache_dir / RECIPE_FILE
    built = False
    group = None
    if gpath.exists() and not rebuild:
        try:
            group = load_group(gpath)
        except CacheError as exc:
            log.warning("group cache unusable, rebuilding: %s", exc)
    if group is None:
        group = build_clifford_group()
        save_group(group, gpath)
        built = True
    recipes = None
    if rpath.exists() and not rebuild:
        try:
            recipes = load_recipes(rpath, group)
        except CacheError as exc:
            log.warning("recipe cache unusable, rebuilding: %s", exc)
    if recipes is None:
        recipes = build_recipe_table(group, master_seed, workers=workers, cache_path=rpath)
        built = True
    return _with_reversed(group, recipes), built


@lru_cache(maxsize=None)
def _default_tables(path: str) -> GateTables:
    return load_or_build(path)[0]


def default_tables() -> GateTables:
    """Tables from ``$SRB_CACHE_DIR`` or else the copy shipped with the package."""
    path = os.environ.get("SRB_CACHE_DIR") or str(packaged_cache_dir())
    return _default_tables(path)
