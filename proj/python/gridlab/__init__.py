"""Grid-world laboratory for multi-turn reinforcement learning.

The heavy lifting lives in the compiled extension ``gridlab._core``. This
package re-exports it and adds small conveniences that convert the JSON text
crossing the language boundary into Python dictionaries.
"""

import json as _json

from ._core import (
    AnnealSchedule,
    Environment,
    GridlabError,
    compute_gae,
    eval_seed,
    make_env,
    parse_response,
    ppo_clip_term,
    rescale_reward,
    train_seed,
)
from . import _core

__all__ = [
    "AnnealSchedule",
    "Environment",
    "GridlabError",
    "compute_gae",
    "default_config",
    "eval_seed",
    "evaluate",
    "make_env",
    "parse_response",
    "play_episode",
    "ppo_clip_term",
    "rescale_reward",
    "train",
    "train_seed",
]

__version__ = "0.1.0"


def _as_text(config):
    """Accept either a configuration dict or its JSON text."""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config():
    """The default run configuration as a dict (edit and pass back in)."""
    return _json.loads(_core.default_config())


def play_episode(config, seed, nonce=0):
    """Run one episode; returns the trajectory record as a dict."""
    return _json.loads(_core.play_episode(_as_text(config), seed, nonce))


def evaluate(config, checkpoint_path="", episodes_path=""):
    """Evaluate over the held-out suite; returns the report as a dict.

    ``checkpoint_path`` evaluates a trained policy instead of the configured
    agent; ``episodes_path`` additionally writes one trajectory record per
    line to that file.
    """
    report = _core.evaluate(_as_text(config), checkpoint_path, episodes_path)
    return _json.loads(report)


def train(config, metrics_path="", checkpoint_path=""):
    """Run the trainer; returns the list of per-iteration metric dicts.

    Non-empty paths also write the metrics JSONL stream and the final
    checkpoint to disk.
    """
    text = _core.train(_as_text(config), metrics_path, checkpoint_path)
    return [_json.loads(line) for line in text.splitlines() if line]
