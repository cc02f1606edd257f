"""Finite probability measures, empirical measures, losses, and Bayes decisions.

Conventions used throughout the package:

* every information quantity is in nats (natural logarithm);
* ``0 * ln 0 = 0``: sums restrict to the support of the left argument;
* alphabets are ordered and finite, so every claim is exactly enumerable;
* argmin/argmax ties break to the lowest index, with tolerance 1e-12.

All types are immutable after construction (weight vectors are read-only
numpy arrays), so they are safe to share across concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    AlphabetMismatch,
    EmptySample,
    IndexOutOfRange,
)

# Constructors renormalize inputs this close to unit mass and reject worse.
RENORMALIZE_TOLERANCE = 1e-9
# Post-construction normalization invariant.
NORM_TOLERANCE = 1e-12
# Equality tolerance for argmin/argmax tie-breaking.
TIE_TOLERANCE = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of distinct opaque symbols, indexed 0..k-1."""

    symbols: tuple

    def __init__(self, symbols: Sequence):
        symbols = tuple(symbols)
        if len(symbols) < 1:
            raise ValueError("alphabet needs at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be distinct")
        object.__setattr__(self, "symbols", symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol) -> int:
        return self.symbols.index(symbol)

    @classmethod
    def of_size(cls, k: int) -> "Alphabet":
        return cls(tuple(range(k)))


def _check_same_alphabet(a: Alphabet, b: Alphabet, what: str) -> None:
    if a.symbols != b.symbols:
        raise AlphabetMismatch(f"{what}: alphabets differ ({a.symbols} vs {b.symbols})")


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability vector over a finite alphabet.

    Weights are validated non-negative and renormalized when their sum is
    within 1e-9 of one; anything further off is rejected as a bug rather
    than silently scaled.
    """

    alphabet: Alphabet
    weights: np.ndarray
    tau_norm: float = NORM_TOLERANCE

    def __init__(self, alphabet: Alphabet, weights, tau_norm: float = NORM_TOLERANCE):
        w = np.asarray(weights, dtype=float)
        if w.shape != (alphabet.size,):
            raise ValueError(f"weights must have length {alphabet.size}, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
            raise ValueError(f"weights sum to {total!r}, further than {RENORMALIZE_TOLERANCE} from 1")
        if total == 0.0:
            raise ValueError("distribution must have non-empty support")
        # renormalize only outside tau_norm, so construction is idempotent and
        # copies stay bit-identical
        if abs(total - 1.0) > tau_norm:
            w = w / total
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "tau_norm", tau_norm)

    @property
    def size(self) -> int:
        return self.alphabet.size

    @property
    def support(self) -> np.ndarray:
        """Indices with strictly positive weight."""
        return np.flatnonzero(self.weights > 0.0)

    def __getitem__(self, i: int) -> float:
        return float(self.weights[i])

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "FiniteDistribution":
        return cls(alphabet, np.full(alphabet.size, 1.0 / alphabet.size))

    @classmethod
    def point_mass(cls, alphabet: Alphabet, index: int) -> "FiniteDistribution":
        w = np.zeros(alphabet.size)
        w[index] = 1.0
        return cls(alphabet, w)

    @classmethod
    def from_weights(cls, weights) -> "FiniteDistribution":
        """Distribution over the integer alphabet 0..k-1."""
        w = np.asarray(weights, dtype=float)
        return cls(Alphabet.of_size(w.shape[0]), w)

    def to_dict(self) -> dict:
        return {"alphabet": list(self.alphabet.symbols), "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_dict(cls, d: dict) -> "FiniteDistribution":
        return cls(Alphabet(d["alphabet"]), d["weights"])


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """A type vector: integer counts of n independent observations."""

    alphabet: Alphabet
    counts: np.ndarray
    n: int

    def __init__(self, alphabet: Alphabet, counts):
        c = np.asarray(counts)
        if c.shape != (alphabet.size,):
            raise ValueError(f"counts must have length {alphabet.size}")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(c == np.floor(c)):
                raise ValueError("counts must be integers")
            c = c.astype(np.int64)
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        n = int(c.sum())
        if n <= 0:
            raise EmptySample("empirical measure needs at least one observation")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "counts", _readonly(c.astype(np.int64)))
        object.__setattr__(self, "n", n)

    def frequencies(self) -> FiniteDistribution:
        return FiniteDistribution(self.alphabet, self.counts / self.n)


@dataclass(frozen=True, eq=False)
class LossMatrix:
    """Loss values L(z, y) over prediction rows and label columns."""

    prediction_alphabet: Alphabet
    label_alphabet: Alphabet
    entries: np.ndarray

    def __init__(self, prediction_alphabet: Alphabet, label_alphabet: Alphabet, entries):
        e = np.asarray(entries, dtype=float)
        if e.shape != (prediction_alphabet.size, label_alphabet.size):
            raise ValueError(
                f"entries must be {prediction_alphabet.size}x{label_alphabet.size}, got {e.shape}"
            )
        if not np.all(np.isfinite(e)):
            raise ValueError("loss entries must be finite")
        if np.any(e < 0):
            raise ValueError("loss entries must be non-negative")
        object.__setattr__(self, "prediction_alphabet", prediction_alphabet)
        object.__setattr__(self, "label_alphabet", label_alphabet)
        object.__setattr__(self, "entries", _readonly(e))

    @classmethod
    def single_row(cls, potential, label_alphabet: Alphabet | None = None) -> "LossMatrix":
        """A 1xk matrix; the row doubles as a potential vector V."""
        v = np.asarray(potential, dtype=float)
        if label_alphabet is None:
            label_alphabet = Alphabet.of_size(v.shape[0])
        return cls(Alphabet(("V",)), label_alphabet, v.reshape(1, -1))

    def row(self, i: int) -> np.ndarray:
        return self.entries[i]

    def to_dict(self) -> dict:
        return {
            "prediction_alphabet": list(self.prediction_alphabet.symbols),
            "label_alphabet": list(self.label_alphabet.symbols),
            "entries": [[float(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LossMatrix":
        return cls(Alphabet(d["prediction_alphabet"]), Alphabet(d["label_alphabet"]), d["entries"])


@dataclass(frozen=True)
class BayesDecision:
    """Risk-minimizing row index and its attained expected loss."""

    decision_index: int
    expected_loss: float


def as_potential(potential, alphabet: Alphabet) -> np.ndarray:
    """Coerce a loss row (single-row LossMatrix, full row, or array) to a vector."""
    if isinstance(potential, LossMatrix):
        if potential.entries.shape[0] != 1:
            raise ValueError("a potential must be a single-row loss matrix")
        _check_same_alphabet(potential.label_alphabet, alphabet, "potential")
        return np.asarray(potential.entries[0], dtype=float)
    v = np.asarray(potential, dtype=float)
    if v.shape != (alphabet.size,):
        raise AlphabetMismatch(f"potential length {v.shape} does not match alphabet size {alphabet.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("potential values must be finite")
    return v


# ---------------------------------------------------------------------------
# Information functionals
# ---------------------------------------------------------------------------
def kl_divergence(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """Relative entropy sum_i p_i ln(p_i / q_i) in nats.

    Requires absolute continuity: support(p) must be contained in support(q).
    """
    _check_same_alphabet(p.alphabet, q.alphabet, "kl_divergence")
    pw, qw = p.weights, q.weights
    sup = pw > 0.0
    if np.any(qw[sup] == 0.0):
        bad = int(np.flatnonzero(sup & (qw == 0.0))[0])
        raise AbsoluteContinuityViolation(
            f"p has mass {pw[bad]!r} at index {bad} where q has none"
        )
    val = float(np.sum(pw[sup] * np.log(pw[sup] / qw[sup])))
    # Gibbs' inequality: clamp the tiny negative round-off of D(p||p).
    return max(val, 0.0)


def shannon_entropy(p: FiniteDistribution) -> float:
    """-sum p ln p in nats, in [0, ln k]."""
    w = p.weights[p.weights > 0.0]
    return max(float(-np.sum(w * np.log(w))), 0.0)


def total_variation(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """Half the L1 distance; the universal closeness metric for measures here."""
    _check_same_alphabet(p.alphabet, q.alphabet, "total_variation")
    return 0.5 * float(np.abs(p.weights - q.weights).sum())


# ---------------------------------------------------------------------------
# Decision theory
# ---------------------------------------------------------------------------
def expected_loss(measure: FiniteDistribution, potential) -> float:
    """Linear functional sum_i V_i mu_i of a measure against a loss row."""
    v = as_potential(potential, measure.alphabet)
    return float(np.dot(v, measure.weights))


def bayes_classifier(posterior: FiniteDistribution, loss: LossMatrix) -> BayesDecision:
    """Row minimizing the posterior-expected loss, ties to the lowest index."""
    _check_same_alphabet(loss.label_alphabet, posterior.alphabet, "bayes_classifier")
    risks = loss.entries @ posterior.weights
    best = float(risks.min())
    idx = int(np.flatnonzero(risks <= best + TIE_TOLERANCE)[0])
    return BayesDecision(decision_index=idx, expected_loss=float(risks[idx]))


def empirical_from_samples(samples: Sequence[int], alphabet: Alphabet) -> EmpiricalMeasure:
    """Count observations, given as alphabet indices, into a type vector."""
    s = np.asarray(samples)
    if s.size == 0:
        raise EmptySample("no observations")
    if not np.issubdtype(s.dtype, np.integer):
        raise IndexOutOfRange("samples must be integer alphabet indices")
    if s.min() < 0 or s.max() >= alphabet.size:
        raise IndexOutOfRange(
            f"sample index out of range for alphabet of size {alphabet.size}"
        )
    counts = np.bincount(s, minlength=alphabet.size)
    return EmpiricalMeasure(alphabet, counts)
