"""Radial basis function network surrogates.

A model is the value tuple (centers, spreads, weights, biases) with a
Gaussian kernel. Centers come from k-means on the inputs and are frozen
afterwards, spreads from the max-distance heuristic; only the linear output
layer is trained, by mini-batch stochastic gradient descent on the squared
error. Keeping the hidden layer fixed makes the kernel matrix of a dataset
computable once per fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

KERNELS = ("squared", "printed")


@dataclass
class Dataset:
    """Paired design points and objective values."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 2 or self.y.ndim != 2:
            raise ValueError("dataset arrays must be 2-d")
        if len(self.x) != len(self.y):
            raise ValueError(
                f"row mismatch: {len(self.x)} inputs vs {len(self.y)} outputs"
            )

    def __len__(self) -> int:
        return len(self.x)


@dataclass
class RbfnModel:
    """Gaussian RBF network with ``q`` centers mapping R^d -> R^M.

    ``kernel`` selects the exponent form: ``"squared"`` uses
    ``exp(-||x - c||^2 / (2 s^2))``, ``"printed"`` the variant with an
    unsquared distance in the numerator. Both are supported; ``"squared"``
    is the default used throughout.
    """

    centers: np.ndarray
    spreads: np.ndarray
    weights: np.ndarray
    biases: np.ndarray
    kernel: str = "squared"

    def __post_init__(self) -> None:
        self.centers = np.asarray(self.centers, dtype=float)
        self.spreads = np.asarray(self.spreads, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        self.biases = np.asarray(self.biases, dtype=float)
        q = len(self.centers)
        if self.centers.ndim != 2:
            raise ValueError("centers must be a (q, d) array")
        if self.spreads.shape != (q,):
            raise ValueError(f"expected {q} spreads, got shape {self.spreads.shape}")
        if np.any(self.spreads <= 0.0):
            raise ValueError("spreads must be positive")
        if self.weights.shape[:1] != (q,) or self.weights.ndim != 2:
            raise ValueError("weights must be a (q, n_obj) array")
        if self.biases.shape != (self.weights.shape[1],):
            raise ValueError("biases must have one entry per objective")
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")

    @property
    def n_centers(self) -> int:
        return len(self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def n_obj(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "RbfnModel":
        return RbfnModel(
            self.centers.copy(),
            self.spreads.copy(),
            self.weights.copy(),
            self.biases.copy(),
            self.kernel,
        )


def kernel_matrix(model: RbfnModel, x: np.ndarray) -> np.ndarray:
    """Activations of every center at every row of ``x``, shape ``(n, q)``."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[1] != model.dim:
        raise ValueError(f"expected {model.dim} variables, got {pts.shape[1]}")
    denom = 2.0 * model.spreads**2
    if model.kernel == "squared":
        num = cdist(pts, model.centers, "sqeuclidean")
    else:
        num = cdist(pts, model.centers)
    return np.exp(-num / denom)


def predict(model: RbfnModel, x: np.ndarray) -> np.ndarray:
    """Surrogate outputs at ``x``, shaped like ``evaluate`` results."""
    arr = np.asarray(x, dtype=float)
    phi = kernel_matrix(model, arr)
    out = phi @ model.weights + model.biases
    return out[0] if arr.ndim == 1 else out


def kmeans_centers(x: np.ndarray, q: int, rng: np.random.Generator, max_iter: int = 100) -> np.ndarray:
    """Lloyd's k-means on the rows of ``x``, returning ``q`` centers.

    Initialization picks ``q`` distinct rows at random. An empty cluster is
    reseeded to the point farthest from its assigned center. Iteration stops
    when assignments no longer change or after ``max_iter`` sweeps.
    """
    pts = np.asarray(x, dtype=float)
    n = len(pts)
    if q < 1:
        raise ValueError(f"need at least one cluster, got q={q}")
    if n < q:
        raise ValueError(f"need at least q={q} points, got {n}")
    centers = pts[rng.choice(n, size=q, replace=False)].copy()
    assign = np.full(n, -1)
    for _ in range(max_iter):
        dist = cdist(pts, centers)
        new_assign = np.argmin(dist, axis=1)
        closest = dist[np.arange(n), new_assign]
        for c in range(q):
            if not np.any(new_assign == c):
                far = int(np.argmax(closest))
                centers[c] = pts[far]
                new_assign[far] = c
                closest[far] = 0.0
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(q):
            members = pts[assign == c]
            if len(members):
                centers[c] = members.mean(axis=0)
    return centers


def spread_heuristic(centers: np.ndarray) -> np.ndarray:
    """Shared spread ``d_max / sqrt(2 q)`` from the largest center distance.

    Every unit gets the same width so the kernel matrix stays well scaled
    relative to the span of the centers. Falls back to 1 when there is a
    single center or all centers coincide.
    """
    q = len(centers)
    if q == 1:
        return np.ones(1)
    d_max = float(pdist(centers).max())
    if d_max == 0.0:
        return np.ones(q)
    return np.full(q, d_max / np.sqrt(2.0 * q))


def sgd_train(
    model: RbfnModel,
    data: Dataset,
    epochs: int,
    learning_rate: float,
    batch_size: int = 1,
    rng: np.random.Generator | None = None,
) -> RbfnModel:
    """Train the output layer on ``data`` and return the updated model.

    Centers and spreads stay frozen, so the kernel matrix is computed once.
    Each epoch visits a fresh shuffle of the rows in mini-batches; a batch
    update subtracts ``lr / B`` times the accumulated gradient of the squared
    error from the weights and biases.
    """
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if learning_rate < 0.0:
        raise ValueError(f"learning rate must be nonnegative, got {learning_rate}")
    if batch_size < 1:
        raise ValueError(f"batch size must be at least 1, got {batch_size}")
    if epochs < 0:
        raise ValueError(f"epochs must be nonnegative, got {epochs}")
    if rng is None:
        rng = np.random.default_rng()
    phi = kernel_matrix(model, data.x)
    y = data.y
    if y.shape[1] != model.n_obj:
        raise ValueError(f"model predicts {model.n_obj} objectives, data has {y.shape[1]}")
    w = model.weights.copy()
    b = model.biases.copy()
    n = len(data)
    for _ in range(epochs):
        order = rng.permutation(n)
        if batch_size == 1:
            for j in order:
                row = phi[j]
                resid = learning_rate * (row @ w + b - y[j])
                w -= row[:, None] * resid
                b -= resid
        else:
            for start in range(0, n, batch_size):
                idx = order[start : start + batch_size]
                block = phi[idx]
                resid = block @ w + b - y[idx]
                scale = learning_rate / len(idx)
                w -= scale * (block.T @ resid)
                b -= scale * resid.sum(axis=0)
    return RbfnModel(model.centers.copy(), model.spreads.copy(), w, b, model.kernel)


def training_loss(model: RbfnModel, data: Dataset) -> float:
    """Mean over rows of the half squared error, the quantity SGD descends."""
    if len(data) == 0:
        raise ValueError("loss of an empty dataset is undefined")
    resid = predict(model, data.x) - data.y
    return float(0.5 * np.sum(resid * resid) / len(data))


def center_cap(n_obj: int, n_var: int) -> int:
    """Default center count ``floor(sqrt(M + d)) + 3``."""
    return int(np.floor(np.sqrt(n_obj + n_var))) + 3


def fit_local(
    data: Dataset,
    q: int,
    epochs: int,
    learning_rate: float,
    batch_size: int = 1,
    rng: np.random.Generator | None = None,
    kernel: str = "squared",
) -> RbfnModel:
    """Fit a fresh RBFN to ``data``: cluster, set spreads, init, train.

    ``q`` is capped at the dataset size. Output weights start uniform in
    ``[-0.1, 0.1]`` and biases at the per-objective mean of the targets.
    """
    if len(data) == 0:
        raise ValueError("cannot fit a model to an empty dataset")
    if rng is None:
        rng = np.random.default_rng()
    q_eff = min(q, len(data))
    centers = kmeans_centers(data.x, q_eff, rng)
    spreads = spread_heuristic(centers)
    weights = rng.uniform(-0.1, 0.1, size=(q_eff, data.y.shape[1]))
    biases = data.y.mean(axis=0)
    model = RbfnModel(centers, spreads, weights, biases, kernel)
    return sgd_train(model, data, epochs, learning_rate, batch_size, rng)


def model_to_dict(model: RbfnModel) -> dict:
    """JSON-ready representation of a model."""
    return {
        "centers": model.centers.tolist(),
        "spreads": model.spreads.tolist(),
        "weights": model.weights.tolist(),
        "biases": model.biases.tolist(),
        "kernel": model.kernel,
    }


def model_from_dict(payload: dict) -> RbfnModel:
    """Inverse of ``model_to_dict``."""
    return RbfnModel(
        np.asarray(payload["centers"], dtype=float),
        np.asarray(payload["spreads"], dtype=float),
        np.asarray(payload["weights"], dtype=float),
        np.asarray(payload["biases"], dtype=float),
        payload.get("kernel", "squared"),
    )
