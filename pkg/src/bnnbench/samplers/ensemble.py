"""Deep ensembles: independently trained MAP estimates as posterior draws."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..model import DivergenceError
from ..optim import OptConfig, train_map
from .base import SampleSet


class EnsembleError(RuntimeError):
    """Too many ensemble members failed to train."""


def deep_ensemble(posterior, n_members: int, opt_config: OptConfig,
                  seed: int = 0,
                  member_seeds: list[int] | None = None) -> SampleSet:
    """Train n_members MAP estimates from independent prior inits.

    Members whose training diverges are dropped; losing more than 10%
    of them raises EnsembleError. Passing member_seeds overrides the
    derived per-member seeds (repeats give identical members).
    """
    if n_members < 1:
        raise ValueError("n_members must be >= 1")
    if member_seeds is None:
        spawned = np.random.SeedSequence(seed).spawn(n_members)
        member_seeds = [int(ss.generate_state(1)[0]) for ss in spawned]
    elif len(member_seeds) != n_members:
        raise ValueError(f"member_seeds has {len(member_seeds)} entries for "
                         f"{n_members} members")

    members = []
    dropped = []
    for i, member_seed in enumerate(member_seeds):
        cfg = replace(opt_config, seed=int(member_seed))
        try:
            members.append(train_map(posterior, cfg).params)
        except DivergenceError:
            dropped.append(i)

    if len(dropped) > 0.1 * n_members:
        raise EnsembleError(f"{len(dropped)} of {n_members} members diverged "
                            f"during training (more than 10%)")

    return SampleSet(
        samples=np.asarray(members),
        algorithm="ensemble",
        hyperparams={"n_members": n_members,
                     "iterations": opt_config.iterations,
                     "init_step": opt_config.init_step},
        seed=seed,
        info={"dropped": dropped},
    )
