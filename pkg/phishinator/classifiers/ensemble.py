"""Weighted collections of trees."""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from phishinator.classifiers.base import freeze, sign_with_tie
from phishinator.classifiers.tree import TreeModel

AGGREGATIONS = ('majority-vote', 'weighted-vote', 'additive-score')


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """Members and how their outputs combine.

    Attributes
    ----------
    members : tuple of TreeModel
    member_weights : array_like
        One finite weight per member; all ones for a forest.
    aggregation : str
        'majority-vote' and 'weighted-vote' sum ``w*sign(member)``;
        'additive-score' sums ``w*member`` on top of ``base_score``.
    base_score : float
        Constant score of additive models (prior log-odds).
    converged : bool
    history : tuple of float
        Per-round training record: weight sums (AdaBoost), training
        loss (gradient boosting) or regularized objective.
    """
    members: Tuple[TreeModel, ...]
    member_weights: np.ndarray
    aggregation: str
    base_score: float = 0.
    converged: bool = True
    history: Tuple[float, ...] = field(default=())
    n_features: int = 30

    def __post_init__(self):
        assert self.aggregation in AGGREGATIONS, (
            'Unknown aggregation %r' % self.aggregation)
        assert len(self.members) == self.member_weights.shape[0], (
            'One weight per member')
        assert np.all(np.isfinite(self.member_weights)), (
            'Member weights must be finite')
        assert np.isfinite(self.base_score), 'Base score must be finite'
        freeze(self.member_weights)

    def __len__(self):
        return len(self.members)

    def decision(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        score = np.full(X.shape[0], self.base_score, dtype=np.float64)
        additive = self.aggregation == 'additive-score'
        for w, m in zip(self.member_weights, self.members):
            out = m.decision(X)
            score += w*(out if additive else sign_with_tie(out))
        return score

    def staged_decision(self, X: np.ndarray):
        """Yield the score after each member is added."""
        X = np.asarray(X)
        score = np.full(X.shape[0], self.base_score, dtype=np.float64)
        additive = self.aggregation == 'additive-score'
        for w, m in zip(self.member_weights, self.members):
            out = m.decision(X)
            score = score + w*(out if additive else sign_with_tie(out))
            yield score

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'ensemble', 'aggregation': self.aggregation,
                'base_score': float(self.base_score),
                'member_weights': self.member_weights.tolist(),
                'members': [m.to_dict() for m in self.members],
                'n_features': self.n_features}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'EnsembleModel':
        return cls(tuple(TreeModel.from_dict(m) for m in obj['members']),
                   np.asarray(obj['member_weights'], dtype=np.float64),
                   obj['aggregation'], float(obj['base_score']),
                   n_features=int(obj['n_features']))
