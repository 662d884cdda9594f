"""Python bindings for the findhccs coordination-detection pipeline."""

import json as _json
import os as _os

from ._core import (
    ContractError,
    account_feature_names,
    export_features,
    extract,
    group_feature_names,
    ngram_cosine,
    report,
    set_similarity,
)

__all__ = [
    "ContractError",
    "account_feature_names",
    "export_features",
    "extract",
    "group_feature_names",
    "load_config",
    "ngram_cosine",
    "report",
    "run",
    "set_similarity",
    "synth",
]


def load_config(path):
    """Read a TOML or JSON pipeline config into a dict."""
    from ._core import _load_config

    return _json.loads(_load_config(_os.fspath(path)))


def run(config=None, **overrides):
    """Run parse, evidence, aggregate and extract; returns the run summary.

    ``config`` is a dict or a path to a TOML/JSON file. Keyword arguments
    override individual keys.
    """
    from ._core import _run

    if config is None:
        cfg = {}
    elif isinstance(config, dict):
        cfg = dict(config)
    else:
        cfg = load_config(config)
    cfg.update(overrides)
    return _json.loads(_run(_json.dumps(cfg)))


def synth(out_dir, spec=None, **overrides):
    """Write a synthetic corpus (posts.jsonl, truth.csv) into out_dir."""
    from ._core import _synth

    doc = dict(spec or {})
    doc.update(overrides)
    return _json.loads(_synth(_json.dumps(doc), _os.fspath(out_dir)))
