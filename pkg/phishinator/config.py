"""Run configuration: config file, environment and command-line flags."""

import json
import os
from dataclasses import dataclass, field
from os import PathLike
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from phishinator.errors import ConfigError

DEFAULT_SEED = 42
DEFAULT_K = 10
SEED_ENV = 'PHISH_SEED'
COMMANDS = ('summarize', 'crossval', 'sweep', 'extract', 'fit', 'predict',
            'report', 'correlate')


def load_config_file(path: Union[str, PathLike]) -> Dict[str, Any]:
    """JSON object whose keys are long flag names (dashes or underscores).

    Raises
    ------
    ConfigError
        Unreadable file or not a JSON object.
    """
    try:
        with open(path, encoding='utf-8') as f:
            obj = json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError('Cannot read config file %s: %s' % (
            path, err)) from None
    if not isinstance(obj, dict):
        raise ConfigError('Config file %s must hold a JSON object' % path)
    return {str(k).replace('-', '_'): v for k, v in obj.items()}


def resolve_seed(flag: Optional[int], file_cfg: Mapping[str, Any],
                 environ: Optional[Mapping[str, str]] = None) -> int:
    """Flag, then ``PHISH_SEED``, then the config file, then 42."""
    environ = os.environ if environ is None else environ
    if flag is not None:
        return int(flag)
    if environ.get(SEED_ENV, '').strip():
        try:
            return int(environ[SEED_ENV])
        except ValueError:
            raise ConfigError('%s must be an integer, got %r' % (
                SEED_ENV, environ[SEED_ENV])) from None
    if file_cfg.get('seed') is not None:
        seed = file_cfg['seed']
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError('Config seed must be an integer')
        return seed
    return DEFAULT_SEED


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs, after merging sources.

    Command-line values win over the config file; options neither sets
    get the documented defaults.
    """
    command: str
    seed: int = DEFAULT_SEED
    k: int = DEFAULT_K
    jobs: int = 1
    dataset_path: Optional[str] = None
    specs: Tuple[Tuple[str, Mapping[str, Any]], ...] = ()
    output_path: Optional[str] = None
    fmt: Optional[str] = None
    thresholds_path: Optional[str] = None
    evidence_path: Optional[str] = None
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError('Unknown command %r' % self.command)
        if self.k < 2:
            raise ConfigError('k must be at least 2, got %d' % self.k)
        if self.jobs == 0:
            raise ConfigError('jobs must be non-zero')


def merge(cli_values: Mapping[str, Any],
          file_cfg: Mapping[str, Any]) -> Dict[str, Any]:
    """Config-file values under command-line values that are not None."""
    merged = dict(file_cfg)
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    return merged
