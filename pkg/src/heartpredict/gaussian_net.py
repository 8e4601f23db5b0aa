"""Dense feedforward classifier with Gaussian hidden activations.

Hidden nodes squash their pre-activation through exp(-x^2); the single
output node applies a logistic squash, so the network emits a score in
(0, 1). Weights live in per-layer (matrix, bias) pairs but flatten to one
vector so a population-based optimizer can treat the whole network as a
continuous search point. Training is plain per-record backpropagation on
squared error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import numpy as np


def gaussian(x):
    """exp(-x^2), elementwise; range (0, 1], symmetric, maximal at 0."""
    return np.exp(-np.square(x))


def gaussian_deriv(x):
    return -2.0 * x * np.exp(-np.square(x))


def logistic(x):
    # numerically stable on both tails
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def logistic_deriv(x):
    s = logistic(x)
    return s * (1.0 - s)


@dataclass(frozen=True)
class NetworkSpec:
    """Layer widths: (input, hidden..., 1). At least one hidden layer; the
    output layer is always a single logistic unit."""

    layer_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.layer_sizes) < 3:
            raise ValueError("need input, at least one hidden, and output layer")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("all layer sizes must be >= 1")
        if self.layer_sizes[-1] != 1:
            raise ValueError("output layer must have exactly one unit")

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def param_count(self) -> int:
        sizes = self.layer_sizes
        return sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))


@dataclass(frozen=True)
class NetworkWeights:
    """Per-layer (fan_in x fan_out weight matrix, fan_out bias vector) pairs
    plus the backprop step size."""

    layers: tuple[tuple[np.ndarray, np.ndarray], ...]
    alpha_lr: float = 0.05

    def copy(self) -> "NetworkWeights":
        return NetworkWeights(
            tuple((w.copy(), b.copy()) for w, b in self.layers), self.alpha_lr
        )


def init_weights(
    spec: NetworkSpec, seed: int, scale: float = 0.5, alpha_lr: float = 0.05
) -> NetworkWeights:
    """Uniform initialization in [-scale, scale]."""
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:]):
        w = rng.uniform(-scale, scale, size=(fan_in, fan_out))
        b = rng.uniform(-scale, scale, size=fan_out)
        layers.append((w, b))
    return NetworkWeights(tuple(layers), alpha_lr)


@dataclass(frozen=True)
class ForwardTrace:
    """Every intermediate of one forward pass: per-layer pre-activation sums
    and activations, then the final score in (0, 1)."""

    pre_activations: tuple[np.ndarray, ...]
    activations: tuple[np.ndarray, ...]
    output: float


def _check_input(spec: NetworkSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.input_size,):
        raise ValueError(
            f"input shape {x.shape} does not match input layer ({spec.input_size},)"
        )
    return x


def forward(spec: NetworkSpec, weights: NetworkWeights, x) -> ForwardTrace:
    """Forward pass for one record: Gaussian hidden layers, logistic output."""
    a = _check_input(spec, x)
    pres: list[np.ndarray] = []
    acts: list[np.ndarray] = []
    n_layers = len(weights.layers)
    for l, (w, b) in enumerate(weights.layers):
        pre = b + a @ w
        pres.append(pre)
        a = np.atleast_1d(gaussian(pre) if l < n_layers - 1 else logistic(pre))
        acts.append(a)
    return ForwardTrace(tuple(pres), tuple(acts), float(acts[-1][0]))


def forward_batch(spec: NetworkSpec, weights: NetworkWeights, X: np.ndarray) -> np.ndarray:
    """Scores for a whole matrix of records at once. Used inside training
    objectives; record-level scoring paths use :func:`forward` so batch and
    stream scoring stay bit-identical."""
    a = np.asarray(X, dtype=float)
    n_layers = len(weights.layers)
    for l, (w, b) in enumerate(weights.layers):
        pre = a @ w + b
        a = gaussian(pre) if l < n_layers - 1 else logistic(pre)
    return a[:, 0]


def error_signal(target: float, output: float) -> float:
    """Difference between desired and produced output."""
    return float(target) - float(output)


def backprop_step(
    spec: NetworkSpec,
    weights: NetworkWeights,
    x,
    target: float,
    mode: str = "derivative",
) -> NetworkWeights:
    """One backpropagation update on a single record; returns new weights.

    The output delta is err * f'(pre-activation) in "derivative" mode (the
    gradient-descent step on half squared error) or err * f(output) in
    "literal" mode. Hidden deltas propagate through the Gaussian derivative
    in both modes. Raises on non-finite updates.
    """
    if mode not in ("derivative", "literal"):
        raise ValueError(f"mode must be 'derivative' or 'literal', got {mode!r}")
    x = _check_input(spec, x)
    trace = forward(spec, weights, x)
    err = error_signal(target, trace.output)

    new_layers = _delta_update(
        [(w, b) for w, b in weights.layers],
        weights.alpha_lr,
        x,
        err,
        trace.pre_activations,
        trace.activations,
        mode,
    )
    for l, (w_new, b_new) in enumerate(new_layers):
        if not (np.all(np.isfinite(w_new)) and np.all(np.isfinite(b_new))):
            raise ValueError(f"non-finite weight update in layer {l}")
    return NetworkWeights(tuple(new_layers), weights.alpha_lr)


def _delta_update(layers, alpha, x, err, pres, acts, mode):
    """Shared delta/update arithmetic for the public single-step op and the
    training loop; g'(pre) is taken as -2 * pre * g(pre) so the forward
    activations are reused."""
    if mode == "derivative":
        delta = np.atleast_1d(err * logistic_deriv(pres[-1]))
    else:
        delta = np.atleast_1d(err * logistic(float(acts[-1][0])))
    deltas = [delta]
    for l in range(len(layers) - 1, 0, -1):
        w, _ = layers[l]
        deltas.insert(0, (w @ deltas[0]) * (-2.0 * pres[l - 1] * acts[l - 1]))
    out = []
    for l, (w, b) in enumerate(layers):
        inputs = x if l == 0 else acts[l - 1]
        out.append((w + alpha * np.outer(inputs, deltas[l]), b + alpha * deltas[l]))
    return out


def mse(spec: NetworkSpec, weights: NetworkWeights, X: np.ndarray, y: np.ndarray) -> float:
    scores = forward_batch(spec, weights, X)
    return float(np.mean((np.asarray(y, dtype=float) - scores) ** 2))


def train_epochs(
    spec: NetworkSpec,
    weights: NetworkWeights,
    data: tuple[np.ndarray, np.ndarray],
    epochs: int,
    alpha_lr: float | None = None,
    seed: int = 0,
    mode: str = "derivative",
) -> tuple[NetworkWeights, list[float]]:
    """Per-record backprop over seeded shuffles; returns the final weights
    and the end-of-epoch mean-squared-error history.

    Records are put into a canonical (sorted) order before the seeded
    shuffles, so the visit sequence depends only on the record values and
    the seed, not on the order the caller supplied them in.
    """
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    X, y = data
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(X) == 0:
        raise ValueError("training data must be non-empty")
    if alpha_lr is not None:
        weights = replace(weights, alpha_lr=float(alpha_lr))

    canon = np.lexsort(np.vstack([X.T, y]))
    Xc, yc = X[canon], y[canon]
    rng = np.random.default_rng(seed)
    history: list[float] = []
    # loop body is backprop_step with the trace kept in local lists; the
    # float operations are identical, only the per-step object churn is gone
    layers = [(w.copy(), b.copy()) for w, b in weights.layers]
    alpha = weights.alpha_lr
    n_layers = len(layers)
    for _ in range(epochs):
        order = rng.permutation(len(Xc))
        for i in order:
            x = Xc[i]
            a = x
            pres, acts = [], []
            for l, (w, b) in enumerate(layers):
                pre = b + a @ w
                pres.append(pre)
                a = np.atleast_1d(gaussian(pre) if l < n_layers - 1 else logistic(pre))
                acts.append(a)
            err = yc[i] - float(acts[-1][0])
            layers = _delta_update(layers, alpha, x, err, pres, acts, mode)
        weights = NetworkWeights(tuple(layers), alpha)
        for l, (w, b) in enumerate(layers):
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"non-finite weight update in layer {l}")
        history.append(mse(spec, weights, X, y))
    return NetworkWeights(tuple(layers), alpha), history


def classify(
    spec: NetworkSpec, weights: NetworkWeights, x, threshold: float = 0.5
) -> int:
    """Abnormal (1) iff the network score reaches the threshold."""
    return 1 if forward(spec, weights, x).output >= threshold else 0


def flatten(weights: NetworkWeights) -> np.ndarray:
    """Layer-major vector: each layer's weight matrix (row-major) then its
    bias vector."""
    parts = []
    for w, b in weights.layers:
        parts.append(w.ravel())
        parts.append(b.ravel())
    return np.concatenate(parts)


def unflatten(
    spec: NetworkSpec, vector: np.ndarray, alpha_lr: float = 0.05
) -> NetworkWeights:
    """Inverse of :func:`flatten`; exact round-trip for the right length."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (spec.param_count,):
        raise ValueError(
            f"vector length {vector.shape} does not match parameter count "
            f"({spec.param_count},)"
        )
    layers = []
    pos = 0
    for fan_in, fan_out in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:]):
        w = vector[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out).copy()
        pos += fan_in * fan_out
        b = vector[pos : pos + fan_out].copy()
        pos += fan_out
        layers.append((w, b))
    return NetworkWeights(tuple(layers), alpha_lr)
