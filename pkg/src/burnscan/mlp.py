"""One-hidden-layer relu network trained with minibatch Adam, numpy only.

The classifier is deliberately plain: dense 3780 -> 100 -> 2, softmax
cross-entropy, scaled-uniform init, and fixed optimizer constants so a
seed fully determines the trained weights. No ML library is involved;
the analytic gradients are checked against finite differences in the
test suite.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

HIDDEN_UNITS = 100
N_CLASSES = 2
CLASS_NAMES = ("burn", "regular")
BURN, REGULAR = 0, 1

LEARNING_RATE = 0.001
BATCH_SIZE = 200
MAX_EPOCHS = 200
LOSS_TOL = 1e-4
PATIENCE = 10  # consecutive low-improvement epochs before stopping
_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8

_PREDICT_CHUNK = 4096  # bounds the float64 widening buffer


class DegenerateTrainingSet(ValueError):
    pass


class TooFewSamples(ValueError):
    pass


class WidthMismatch(ValueError):
    pass


@dataclass
class MlpModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    seed: int
    epochs_run: int = 0
    final_loss: float = math.nan
    fingerprint: str = ""
    converged: bool = True

    @property
    def input_width(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden_units(self) -> int:
        return self.w1.shape[1]

    @property
    def params(self):
        return (self.w1, self.b1, self.w2, self.b2)

    def check_finite(self) -> bool:
        return all(np.isfinite(p).all() for p in self.params)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    precision_defined: bool = True
    recall_defined: bool = True


def precision_recall(tp: int, fp: int, fn: int) -> Metrics:
    """Precision and recall from confusion counts; zero denominators yield
    0.0 with the corresponding defined-flag cleared."""
    if min(tp, fp, fn) < 0:
        raise ValueError("confusion counts must be non-negative")
    p_den = tp + fp
    r_den = tp + fn
    return Metrics(
        precision=tp / p_den if p_den else 0.0,
        recall=tp / r_den if r_den else 0.0,
        precision_defined=p_den > 0,
        recall_defined=r_den > 0,
    )


def _forward(params, X):
    w1, b1, w2, b2 = params
    h = np.maximum(X @ w1 + b1, 0.0)
    logits = h @ w2 + b2
    logits = logits - logits.max(axis=1, keepdims=True)
    ez = np.exp(logits)
    probs = ez / ez.sum(axis=1, keepdims=True)
    return h, probs


def loss_and_grads(params, X, y):
    """Mean cross-entropy over one batch and its analytic gradients.

    Dimension-agnostic on purpose: the finite-difference check runs it on a
    tiny network. The log is clamped so a saturated softmax cannot poison
    the loss average; gradients flow from the probabilities directly and
    are unaffected by the clamp.
    """
    w1, b1, w2, b2 = params
    n = X.shape[0]
    h, probs = _forward(params, X)
    picked = probs[np.arange(n), y]
    loss = float(-np.log(np.clip(picked, 1e-12, None)).mean())

    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    gw2 = h.T @ dlogits
    gb2 = dlogits.sum(axis=0)
    dh = dlogits @ w2.T
    dh[h <= 0.0] = 0.0
    gw1 = X.T @ dh
    gb1 = dh.sum(axis=0)
    return loss, (gw1, gb1, gw2, gb2)


def init_params(rng, input_width: int, hidden_units: int, n_classes: int = N_CLASSES):
    """Scaled-uniform init: bound sqrt(6 / (fan_in + fan_out)) per layer,
    applied to weights and biases alike."""

    def layer(fan_in, fan_out):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        b = rng.uniform(-bound, bound, size=fan_out)
        return w, b

    w1, b1 = layer(input_width, hidden_units)
    w2, b2 = layer(hidden_units, n_classes)
    return w1, b1, w2, b2


def _fingerprint(X: np.ndarray, y: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(repr((X.shape, str(X.dtype), y.shape, str(y.dtype))).encode())
    digest.update(np.ascontiguousarray(X).tobytes())
    digest.update(np.ascontiguousarray(y).tobytes())
    return digest.hexdigest()


def train(
    X,
    y,
    seed: int,
    *,
    learning_rate: float = LEARNING_RATE,
    batch_size: int = BATCH_SIZE,
    max_epochs: int = MAX_EPOCHS,
    tol: float = LOSS_TOL,
    patience: int = PATIENCE,
    hidden_units: int = HIDDEN_UNITS,
) -> MlpModel:
    """Train on integer feature rows X and class indices y.

    Deterministic for a fixed seed and input order. Stops once the epoch
    loss has improved by less than tol for patience consecutive epochs;
    hitting max_epochs without that counts as non-convergence, flagged on
    the returned model but otherwise usable.
    """
    X = np.asarray(X)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: X {X.shape} vs y {y.shape}")
    counts = np.bincount(y, minlength=N_CLASSES)
    if len(counts) > N_CLASSES:
        raise ValueError(f"class indices must be < {N_CLASSES}")
    if counts.min() < 2:
        raise DegenerateTrainingSet(
            f"need at least 2 samples per class, got {counts.tolist()}"
        )

    n = X.shape[0]
    batch_size = min(batch_size, n)
    rng = np.random.default_rng(seed)
    params = [p for p in init_params(rng, X.shape[1], hidden_units)]
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    scratch = [np.empty_like(p) for p in params]
    t = 0

    best = math.inf
    streak = 0
    epoch_loss = math.nan
    converged = False
    epochs_run = 0

    for epoch in range(max_epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            Xb = X[idx].astype(np.float64, copy=False)
            loss, grads = loss_and_grads(params, Xb, y[idx])
            total += loss * len(idx)
            t += 1
            # bias correction folded into two scalars; algebraically the
            # standard m_hat / (sqrt(v_hat) + eps) update, but the big
            # per-parameter temporaries become in-place ops
            correction = math.sqrt(1 - _ADAM_BETA2**t)
            step = learning_rate * correction / (1 - _ADAM_BETA1**t)
            eps_t = _ADAM_EPS * correction
            for k, g in enumerate(grads):
                np.multiply(m_state[k], _ADAM_BETA1, out=m_state[k])
                m_state[k] += (1 - _ADAM_BETA1) * g
                np.multiply(v_state[k], _ADAM_BETA2, out=v_state[k])
                np.multiply(g, g, out=g)
                v_state[k] += (1 - _ADAM_BETA2) * g
                np.sqrt(v_state[k], out=scratch[k])
                scratch[k] += eps_t
                np.divide(m_state[k], scratch[k], out=scratch[k])
                scratch[k] *= step
                params[k] -= scratch[k]
        epoch_loss = total / n
        epochs_run = epoch + 1
        if epoch_loss > best - tol:
            streak += 1
            if streak >= patience:
                converged = True
                break
        else:
            streak = 0
        best = min(best, epoch_loss)

    if not converged:
        logger.warning(
            "loss still improving after %d epochs (last %.6f); model flagged",
            epochs_run,
            epoch_loss,
        )

    model = MlpModel(
        w1=params[0],
        b1=params[1],
        w2=params[2],
        b2=params[3],
        seed=int(seed),
        epochs_run=epochs_run,
        final_loss=epoch_loss,
        fingerprint=_fingerprint(X, y),
        converged=converged,
    )
    assert model.check_finite(), "non-finite weights after training"
    return model


def predict(model: MlpModel, features):
    """argmax class index and its softmax probability for each row.

    Accepts one vector or a matrix; integer features are widened chunk by
    chunk to keep the float64 buffer small during pool sweeps.
    """
    X = np.asarray(features)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != model.input_width:
        raise WidthMismatch(f"feature width {X.shape[1]}, model wants {model.input_width}")
    classes = np.empty(X.shape[0], np.int64)
    scores = np.empty(X.shape[0], np.float64)
    for start in range(0, X.shape[0], _PREDICT_CHUNK):
        chunk = X[start : start + _PREDICT_CHUNK].astype(np.float64, copy=False)
        _, probs = _forward(model.params, chunk)
        cls = probs.argmax(axis=1)
        classes[start : start + len(cls)] = cls
        scores[start : start + len(cls)] = probs[np.arange(len(cls)), cls]
    if single:
        return int(classes[0]), float(scores[0])
    return classes, scores


def predict_proba(model: MlpModel, features) -> np.ndarray:
    """Full softmax rows, chunked like predict."""
    X = np.atleast_2d(np.asarray(features))
    if X.shape[1] != model.input_width:
        raise WidthMismatch(f"feature width {X.shape[1]}, model wants {model.input_width}")
    out = np.empty((X.shape[0], model.w2.shape[1]), np.float64)
    for start in range(0, X.shape[0], _PREDICT_CHUNK):
        chunk = X[start : start + _PREDICT_CHUNK].astype(np.float64, copy=False)
        _, probs = _forward(model.params, chunk)
        out[start : start + len(probs)] = probs
    return out


def stratified_folds(y, folds: int, seed: int) -> np.ndarray:
    """Fold index per sample; each class is shuffled then dealt round-robin,
    so per-fold class counts differ from exact proportion by at most 1."""
    y = np.asarray(y, dtype=np.int64)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    counts = np.bincount(y, minlength=N_CLASSES)
    if counts.min() < folds:
        raise TooFewSamples(
            f"every class needs >= {folds} samples, got {counts.tolist()}"
        )
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), np.int64)
    for cls in range(len(counts)):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        assignment[idx] = np.arange(len(idx)) % folds
    return assignment


@dataclass(frozen=True)
class CvReport:
    """Per-fold precision and recall for each class, plus mean and stddev.

    Arrays are (folds, n_classes); column order follows CLASS_NAMES.
    """

    fold_precision: np.ndarray
    fold_recall: np.ndarray
    seed: int
    class_names: tuple = CLASS_NAMES

    @property
    def folds(self) -> int:
        return self.fold_precision.shape[0]

    def mean_precision(self) -> np.ndarray:
        return self.fold_precision.mean(axis=0)

    def std_precision(self) -> np.ndarray:
        return self.fold_precision.std(axis=0)

    def mean_recall(self) -> np.ndarray:
        return self.fold_recall.mean(axis=0)

    def std_recall(self) -> np.ndarray:
        return self.fold_recall.std(axis=0)

    def format_table(self) -> str:
        """Aligned text: mean over folds with stddev in parentheses."""
        header = f"{'':<12}" + "".join(f"{name:<22}" for name in self.class_names)
        rows = [header.rstrip()]
        for label, mean, std in (
            ("precision", self.mean_precision(), self.std_precision()),
            ("recall", self.mean_recall(), self.std_recall()),
        ):
            cells = "".join(
                f"{mean[c]:.5f} ({std[c]:.5f})   " for c in range(len(self.class_names))
            )
            rows.append(f"{label:<12}{cells}".rstrip())
        return "\n".join(rows)

    def to_dict(self) -> dict:
        return {
            "folds": self.folds,
            "seed": self.seed,
            "classes": list(self.class_names),
            "per_fold": {
                "precision": self.fold_precision.tolist(),
                "recall": self.fold_recall.tolist(),
            },
            "mean": {
                "precision": self.mean_precision().tolist(),
                "recall": self.mean_recall().tolist(),
            },
            "std": {
                "precision": self.std_precision().tolist(),
                "recall": self.std_recall().tolist(),
            },
        }


def stratified_cv(X, y, folds: int = 10, seed: int = 0, **train_kwargs) -> CvReport:
    """Stratified k-fold cross-validation with per-class precision/recall."""
    X = np.asarray(X)
    y = np.asarray(y, dtype=np.int64)
    assignment = stratified_folds(y, folds, seed)
    fold_precision = np.zeros((folds, N_CLASSES))
    fold_recall = np.zeros((folds, N_CLASSES))
    for f in range(folds):
        holdout = assignment == f
        # every fold trains from the same seed, the way cloned estimators
        # sharing one random_state would; fold variance then reflects the
        # data split alone
        model = train(X[~holdout], y[~holdout], seed=seed, **train_kwargs)
        pred, _ = predict(model, X[holdout])
        truth = y[holdout]
        for cls in range(N_CLASSES):
            tp = int(np.sum((pred == cls) & (truth == cls)))
            fp = int(np.sum((pred == cls) & (truth != cls)))
            fn = int(np.sum((pred != cls) & (truth == cls)))
            m = precision_recall(tp, fp, fn)
            fold_precision[f, cls] = m.precision
            fold_recall[f, cls] = m.recall
        logger.debug(
            "fold %d: burn p=%.5f r=%.5f",
            f,
            fold_precision[f, BURN],
            fold_recall[f, BURN],
        )
    return CvReport(fold_precision=fold_precision, fold_recall=fold_recall, seed=int(seed))


def save_model(model: MlpModel, path) -> None:
    """Self-describing container: one JSON header line, then the four weight
    arrays as little-endian float64 in a fixed order."""
    header = {
        "format": "burnscan-mlp",
        "version": 1,
        "input_width": model.input_width,
        "hidden_units": model.hidden_units,
        "n_classes": int(model.w2.shape[1]),
        "seed": model.seed,
        "epochs_run": model.epochs_run,
        "final_loss": model.final_loss,
        "fingerprint": model.fingerprint,
        "converged": model.converged,
        "dtype": "<f8",
        "order": ["w1", "b1", "w2", "b2"],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for p in model.params:
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_model(path) -> MlpModel:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    header = json.loads(header_line)
    if header.get("format") != "burnscan-mlp":
        raise ValueError("not a model file")
    iw = int(header["input_width"])
    hu = int(header["hidden_units"])
    nc = int(header["n_classes"])
    shapes = [(iw, hu), (hu,), (hu, nc), (nc,)]
    expected = sum(int(np.prod(s)) for s in shapes) * 8
    if len(blob) != expected:
        raise WidthMismatch(
            f"weight payload is {len(blob)} bytes, header dimensions need {expected}"
        )
    arrays = []
    offset = 0
    for shape in shapes:
        size = int(np.prod(shape)) * 8
        arrays.append(
            np.frombuffer(blob[offset : offset + size], dtype="<f8").reshape(shape).copy()
        )
        offset += size
    return MlpModel(
        w1=arrays[0],
        b1=arrays[1],
        w2=arrays[2],
        b2=arrays[3],
        seed=int(header["seed"]),
        epochs_run=int(header["epochs_run"]),
        final_loss=float(header["final_loss"]),
        fingerprint=header.get("fingerprint", ""),
        converged=bool(header.get("converged", True)),
    )
