"""Versioned JSON files for trained models."""

import json
import logging
from os import PathLike
from typing import Any, Dict, Optional, Union

from phishinator.classifiers.base import ClassifierSpec
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.knn import KnnModel
from phishinator.classifiers.logistic import LinearModel
from phishinator.classifiers.mlp import MlpModel
from phishinator.classifiers.svm import KernelMachineModel
from phishinator.classifiers.tree import TreeModel
from phishinator.errors import ModelFormatError
from phishinator.schema import FEATURE_NAMES

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

_KINDS = {
    'linear': LinearModel,
    'knn': KnnModel,
    'kernel_machine': KernelMachineModel,
    'tree': TreeModel,
    'ensemble': EnsembleModel,
    'mlp': MlpModel,
}


def model_to_dict(model, spec: Optional[ClassifierSpec] = None
                  ) -> Dict[str, Any]:
    """JSON-ready record of ``model``.

    The record carries the format version, the feature names the model
    was trained on and, when given, the spec that produced it.
    """
    return {'format_version': FORMAT_VERSION,
            'features': list(FEATURE_NAMES),
            'spec': None if spec is None else spec.to_dict(),
            'model': model.to_dict()}


def model_from_dict(obj: Dict[str, Any]):
    """Inverse of ``model_to_dict``.

    Raises
    ------
    ModelFormatError
        Wrong version, different feature schema or a malformed body.
    """
    if not isinstance(obj, dict):
        raise ModelFormatError('Model file must hold a JSON object')
    version = obj.get('format_version')
    if version != FORMAT_VERSION:
        raise ModelFormatError('Unsupported model format version %r '
                               '(expected %d)' % (version, FORMAT_VERSION))
    if obj.get('features') != list(FEATURE_NAMES):
        raise ModelFormatError(
            'Model was trained on a different feature schema')
    body = obj.get('model')
    kind = body.get('kind') if isinstance(body, dict) else None
    if kind not in _KINDS:
        raise ModelFormatError('Unknown model kind %r' % (kind,))
    try:
        return _KINDS[kind].from_dict(body)
    except (KeyError, TypeError, ValueError, AssertionError) as err:
        raise ModelFormatError('Malformed %s model: %s' % (
            kind, err)) from None


def save_model(model, path: Union[str, PathLike],
               spec: Optional[ClassifierSpec] = None) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(model_to_dict(model, spec), f)
    logger.info('Wrote %s model to %s', type(model).__name__, path)


def load_model(path: Union[str, PathLike]):
    """Read a model file.

    Raises
    ------
    ModelFormatError
        Unreadable file or invalid JSON (the message gives line and
        column), or any problem ``model_from_dict`` finds.
    """
    try:
        with open(path, encoding='utf-8') as f:
            obj = json.load(f)
    except json.JSONDecodeError as err:
        raise ModelFormatError('Corrupt model file %s: %s at line %d, '
                               'column %d' % (path, err.msg, err.lineno,
                                              err.colno)) from None
    except OSError as err:
        raise ModelFormatError('Cannot read model file %s: %s' % (
            path, err)) from None
    return model_from_dict(obj)
