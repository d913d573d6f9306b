"""Lower-confidence-bound acquisition over an ensemble of surrogates.

The mean prediction comes from the aggregated global model; the uncertainty
is the per-objective sample variance of the local models' predictions
around it. Minimizing ``mean - alpha * std`` favors points where the
clients disagree, which is where new evaluations are most informative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .surrogate import RbfnModel, predict


@dataclass
class FederatedLcb:
    """Acquisition built from one global and several local RBFN models."""

    global_model: RbfnModel
    local_models: list[RbfnModel] = field(default_factory=list)
    alpha: float = 2.0

    def __post_init__(self) -> None:
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        for local in self.local_models:
            if local.dim != self.global_model.dim:
                raise ValueError("local and global models disagree on input size")
            if local.n_obj != self.global_model.n_obj:
                raise ValueError("local and global models disagree on objectives")

    @property
    def dim(self) -> int:
        return self.global_model.dim

    @property
    def n_obj(self) -> int:
        return self.global_model.n_obj

    def mean(self, x: np.ndarray) -> np.ndarray:
        """Global-model prediction at ``x``."""
        return predict(self.global_model, x)

    def variance(self, x: np.ndarray) -> np.ndarray:
        """Per-objective spread of the local predictions around the mean.

        The sum of squared deviations from the global prediction divided by
        ``K - 1`` for ``K`` local models. Needs at least two local models.
        """
        if len(self.local_models) < 2:
            raise ValueError("variance needs at least two local models")
        return self._spread(x)

    def _spread(self, x: np.ndarray) -> np.ndarray:
        center = self.mean(x)
        deviations = np.stack(
            [predict(local, x) - center for local in self.local_models]
        )
        return np.sum(deviations * deviations, axis=0) / (len(self.local_models) - 1)

    def lcb(self, x: np.ndarray) -> np.ndarray:
        """Mean minus ``alpha`` standard deviations, elementwise.

        With fewer than two local models the uncertainty term is zero and
        this reduces to the global prediction.
        """
        center = self.mean(x)
        if len(self.local_models) < 2 or self.alpha == 0.0:
            return center
        return center - self.alpha * np.sqrt(self._spread(x))
