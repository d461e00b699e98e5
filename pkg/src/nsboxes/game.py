"""The index-guessing game connecting box strength to information causality.

Alice holds N = 2^n uniform data bits, Bob a uniform index K; with one
classical message bit and n levels of shared boxes (one fresh box per tree
node) Bob guesses the K-th bit.  The figure of merit is the sum over K of
the mutual information between Bob's guess and the true bit; staying at or
below the one transmitted bit is the information-causality requirement.

Two evaluation modes are provided: exact channel arithmetic (per-path biases
are products of the per-level biases, grouped by binomial multiplicity) and
a Monte Carlo mode that plays the protocol with sampled box outcomes.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .boxes import CorrelatorVector, JointBox, correlators_of, marginals_of, validate

#: classical message budget (bits)
MESSAGE_BITS = 1

#: slack when comparing an information total against the message budget
TOTAL_TOL = 1e-9


def binary_entropy(p: float) -> float:
    """Shannon entropy of a coin in bits; 0 log 0 taken as 0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def guess_information(p_correct: float) -> float:
    """Mutual information (bits) of a uniform bit with its noisy guess."""
    return 1.0 - binary_entropy(p_correct)


@dataclass(frozen=True)
class BiasPair:
    """Per-level guessing biases of a box used in the protocol.

    e_i applies when Bob's level input is 0, e_ii when it is 1; the success
    probability of a single level is (1 + e)/2.  Their squared norm scaled
    by 4 reproduces the information-causality quadratic form.
    """

    e_i: float
    e_ii: float

    @classmethod
    def from_correlators(cls, c: CorrelatorVector) -> "BiasPair":
        return cls(e_i=(c.c00 + c.c10) / 2.0, e_ii=(c.c01 - c.c11) / 2.0)

    @classmethod
    def from_box(cls, box: JointBox) -> "BiasPair":
        return cls.from_correlators(correlators_of(box))

    @property
    def uffink_value(self) -> float:
        return 4.0 * (self.e_i**2 + self.e_ii**2)


@dataclass(frozen=True)
class PathClass:
    """All indices whose binary digits contain `ones` ones behave alike."""

    ones: int
    multiplicity: int
    bias: float
    p_correct: float
    info_bits: float


@dataclass(frozen=True)
class GameConfig:
    """Game parameters: depth n (N = 2^n data bits), the shared box, mode."""

    box: JointBox
    n: int
    mode: str = "exact"
    trials: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one level")
        if self.mode not in ("exact", "monte_carlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "monte_carlo" and self.trials < 1:
            raise ValueError("need at least one trial")
        report = validate(self.box)
        if not report.ok:
            raise ValueError("box table fails validation; cannot play the game")
        if not marginals_of(self.box).unbiased:
            warnings.warn(
                "box has biased marginals; per-level bias arithmetic still "
                "applies but the quadratic criterion is calibrated for "
                "unbiased boxes",
                stacklevel=2,
            )

    @property
    def n_bits(self) -> int:
        return 2**self.n


@dataclass(frozen=True)
class Transcript:
    """Bit-exact record of a Monte Carlo run; same seed, same bytes."""

    n: int
    trials: int
    seed: int
    columns: tuple[str, ...]
    records: np.ndarray

    def tobytes(self) -> bytes:
        return self.records.tobytes()

    def sha256(self) -> str:
        return hashlib.sha256(self.tobytes()).hexdigest()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "columns": list(self.columns),
            "sha256": self.sha256(),
        }


@dataclass(frozen=True)
class GameResult:
    """Per-index success statistics and the information total."""

    mode: str
    n: int
    n_bits: int
    message_bits: int
    e_i: float
    e_ii: float
    classes: tuple[PathClass, ...]
    total: float
    ic_satisfied: bool
    trials: int | None = None
    seed: int | None = None
    counts: np.ndarray | None = None
    successes: np.ndarray | None = None
    p_hat: np.ndarray | None = None
    info_hat: np.ndarray | None = None
    stderr: np.ndarray | None = None

    def per_bit(self) -> list[dict]:
        """One entry per index K = 1..N (indices grouped by digit weight in
        exact mode)."""
        rows = []
        for k0 in range(self.n_bits):
            w = bin(k0).count("1")
            cls = self.classes[w]
            row = {"K": k0 + 1, "bias": cls.bias}
            if self.mode == "exact":
                row["P"] = cls.p_correct
                row["I"] = cls.info_bits
            else:
                row["P"] = float(self.p_hat[k0])
                row["I"] = float(self.info_hat[k0])
                row["count"] = int(self.counts[k0])
                row["stderr"] = float(self.stderr[k0])
            rows.append(row)
        return rows

    def to_dict(self) -> dict:
        d: dict = {
            "n": self.n,
            "N": self.n_bits,
            "mode": self.mode,
            "e_I": self.e_i,
            "e_II": self.e_ii,
            "total": self.total,
            "ic_satisfied": self.ic_satisfied,
        }
        if self.mode == "monte_carlo":
            d["trials"] = self.trials
            d["seed"] = self.seed
        if self.n_bits <= 64:
            d["per_K"] = self.per_bit()
        else:
            d["classes"] = [
                {
                    "ones": c.ones,
                    "multiplicity": c.multiplicity,
                    "bias": c.bias,
                    "P": c.p_correct,
                    "I": c.info_bits,
                }
                for c in self.classes
            ]
        return d


# ---------------------------------------------------------------------------
# the protocol
# ---------------------------------------------------------------------------

def level1_protocol(
    a0: int, a1: int, box: JointBox, rng: np.random.Generator
) -> tuple[int, Callable[[int], int]]:
    """One round: Alice encodes (a0, a1) into one message bit.

    Alice feeds x = a0 XOR a1 into her side, sends c = a0 XOR her output.
    The returned decoder plays Bob: feed the wanted index y into his side
    and output c XOR his outcome (sampling from his conditional outcome
    distribution when called).
    """
    x = a0 ^ a1
    p_a0 = float(box.p[0, :, x, 0].sum())
    a = 0 if rng.random() < p_a0 else 1
    c = a0 ^ a

    def decoder(y: int) -> int:
        pa = float(box.p[a, :, x, y].sum())
        p_b0 = float(box.p[a, 0, x, y]) / pa
        b = 0 if rng.random() < p_b0 else 1
        return c ^ b

    return c, decoder


def _classes_for(e_i: float, e_ii: float, n: int) -> tuple[tuple[PathClass, ...], float]:
    classes = []
    total = 0.0
    for ones in range(n + 1):
        bias = (e_i ** (n - ones)) * (e_ii**ones)
        mult = math.comb(n, ones)
        p = (1.0 + abs(bias)) / 2.0
        info = guess_information(p)
        classes.append(
            PathClass(ones=ones, multiplicity=mult, bias=bias, p_correct=p, info_bits=info)
        )
        total += mult * info
    return tuple(classes), total


def exact_total_information(config: GameConfig) -> GameResult:
    """Exact per-index statistics via products of per-level biases.

    An index whose digits contain w ones has bias e_i^(n-w) * e_ii^w; the
    optimal decoder flips the guess on negative bias, so the success
    probability is (1 + |bias|)/2.  2^n indices reduce to n+1 digit-weight
    classes with binomial multiplicities.
    """
    pair = BiasPair.from_box(config.box)
    classes, total = _classes_for(pair.e_i, pair.e_ii, config.n)
    return GameResult(
        mode="exact",
        n=config.n,
        n_bits=config.n_bits,
        message_bits=MESSAGE_BITS,
        e_i=pair.e_i,
        e_ii=pair.e_ii,
        classes=classes,
        total=total,
        ic_satisfied=total <= MESSAGE_BITS + TOTAL_TOL,
    )


def _transcript_columns(n: int) -> tuple[str, ...]:
    n_bits = 2**n
    cols = [f"a{i + 1}" for i in range(n_bits)]
    cols.append("k")
    for level in range(1, n + 1):
        for j in range(2 ** (n - level)):
            cols += [f"x_l{level}n{j}", f"a_l{level}n{j}"]
    cols.append("c")
    for level in range(1, n + 1):
        cols += [f"y_l{level}", f"b_l{level}"]
    cols += ["guess", "correct"]
    return tuple(cols)


def monte_carlo_game(config: GameConfig) -> tuple[GameResult, Transcript]:
    """Play the nested protocol trial by trial with sampled box outcomes.

    Each trial draws fresh data bits and a fresh index, uses one independent
    box copy per tree node (per-trial counter-based seeding keeps results
    independent of evaluation order), and tallies per-index success counts.
    """
    if config.mode != "monte_carlo":
        raise ValueError("config.mode must be 'monte_carlo'")
    n, n_bits = config.n, config.n_bits
    pair = BiasPair.from_box(config.box)
    sign_i = -1 if pair.e_i < 0 else 1
    sign_ii = -1 if pair.e_ii < 0 else 1
    # negative product bias: Bob flips his guess (the optimal decoder)
    flip_for = [
        (sign_i ** (n - w)) * (sign_ii**w) < 0 for w in range(n + 1)
    ]

    # flat conditional tables for speed: cum[x][y] over (a,b) pairs
    cum = [[np.cumsum(config.box.p[:, :, x, y].reshape(4)) for y in range(2)] for x in range(2)]
    p_a0 = [float(config.box.p[0, :, x, 0].sum()) for x in range(2)]

    columns = _transcript_columns(n)
    records = np.zeros((config.trials, len(columns)), dtype=np.uint8)
    counts = np.zeros(n_bits, dtype=np.int64)
    successes = np.zeros(n_bits, dtype=np.int64)

    for trial in range(config.trials):
        bg = np.random.Philox(key=config.seed, counter=[0, 0, 0, trial])
        rng = np.random.Generator(bg)
        row = records[trial]
        bits = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
        k0 = int(rng.integers(0, n_bits))
        row[:n_bits] = bits
        row[n_bits] = k0

        col = n_bits + 1
        bob_col = col + 2 * (n_bits - 1) + 1
        data = [int(v) for v in bits]
        bob_xor = 0
        for level in range(1, n + 1):
            j_path = k0 >> level
            y_level = (k0 >> (level - 1)) & 1
            nxt = []
            for j in range(len(data) // 2):
                x = data[2 * j] ^ data[2 * j + 1]
                if j == j_path:
                    u = rng.random()
                    c4 = cum[x][y_level]
                    idx = 0
                    while idx < 3 and u >= c4[idx]:
                        idx += 1
                    a, b = idx >> 1, idx & 1
                    row[bob_col] = y_level
                    row[bob_col + 1] = b
                    bob_xor ^= b
                else:
                    a = 0 if rng.random() < p_a0[x] else 1
                row[col] = x
                row[col + 1] = a
                col += 2
                nxt.append(data[2 * j] ^ a)
            data = nxt
            bob_col += 2
        message = data[0]
        row[col] = message
        guess = message ^ bob_xor
        if flip_for[bin(k0).count("1")]:
            guess ^= 1
        correct = int(guess == int(bits[k0]))
        row[-2] = guess
        row[-1] = correct
        counts[k0] += 1
        successes[k0] += correct

    with np.errstate(invalid="ignore", divide="ignore"):
        p_hat = np.where(counts > 0, successes / np.maximum(counts, 1), np.nan)
    info_hat = np.array(
        [guess_information(p) if counts[k] > 0 else np.nan for k, p in enumerate(p_hat)]
    )
    stderr = np.where(
        counts > 0, np.sqrt(np.clip(p_hat * (1 - p_hat), 0, None) / np.maximum(counts, 1)), np.nan
    )
    total = float(np.nansum(info_hat))
    classes, _ = _classes_for(pair.e_i, pair.e_ii, n)
    result = GameResult(
        mode="monte_carlo",
        n=n,
        n_bits=n_bits,
        message_bits=MESSAGE_BITS,
        e_i=pair.e_i,
        e_ii=pair.e_ii,
        classes=classes,
        total=total,
        ic_satisfied=total <= MESSAGE_BITS + TOTAL_TOL,
        trials=config.trials,
        seed=config.seed,
        counts=counts,
        successes=successes,
        p_hat=p_hat,
        info_hat=info_hat,
        stderr=stderr,
    )
    transcript = Transcript(
        n=n, trials=config.trials, seed=config.seed, columns=columns, records=records
    )
    return result, transcript


def total_information_by_level(box: JointBox, n_max: int) -> list[float]:
    """Exact information totals for n = 1..n_max."""
    pair = BiasPair.from_box(box)
    return [_classes_for(pair.e_i, pair.e_ii, n)[1] for n in range(1, n_max + 1)]


def ic_threshold_scan(box: JointBox, n_max: int = 14) -> int | None:
    """Smallest depth n <= n_max at which the exact total exceeds the budget.

    Returns None when no depth up to n_max witnesses a violation.  Depths are
    evaluated by the digit-weight closed form, so n_max up to 24 stays cheap.
    """
    if n_max > 24:
        raise ValueError("n_max larger than 24 is not supported")
    for n, total in enumerate(total_information_by_level(box, n_max), start=1):
        if total > MESSAGE_BITS + TOTAL_TOL:
            return n
    return None
