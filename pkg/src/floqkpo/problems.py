"""Ising problem instances: generation, normalization, serialization, brute force.

Energies use the both-orderings convention E(sigma) = sum_{j != i} C_ij s_i s_j,
which equals 2 * sum_{i<j} C_ij s_i s_j.  Matrices are stored 0-based
internally; the JSON format carries the row-major upper triangle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

SK7 = "sk7"
DENSE_MAXCUT = "dense"
CUBIC_MAXCUT = "cubic"
CUSTOM = "custom"
PROBLEM_CLASSES = (SK7, DENSE_MAXCUT, CUBIC_MAXCUT, CUSTOM)

# Stream tags keep instance-generation draws and trajectory draws on
# non-colliding substreams of the same user-facing seed.
_STREAM_INSTANCE = 0
_STREAM_TRAJECTORY = 1

_BRUTE_FORCE_MAX_N = 24
_ENERGY_TIE_TOL = 1e-9


def instance_rng(seed: int) -> np.random.Generator:
    """PCG64 stream reserved for instance generation under `seed`."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_STREAM_INSTANCE,))))


def trajectory_rng(seed: int, traj_index: int) -> np.random.Generator:
    """PCG64 stream reserved for trajectory `traj_index` under `seed`."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_STREAM_TRAJECTORY, traj_index)))
    )


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric, zero-diagonal, max-abs-normalized Ising coupling matrix."""

    n: int
    entries: np.ndarray
    class_tag: str = CUSTOM

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (self.n, self.n):
            raise InvalidInput(f"entries shape {entries.shape} != ({self.n}, {self.n})")
        if not np.array_equal(entries, entries.T):
            raise InvalidInput("coupling matrix must be symmetric")
        if np.any(np.diag(entries) != 0.0):
            raise InvalidInput("coupling matrix must have zero diagonal")
        max_abs = np.max(np.abs(entries)) if self.n > 0 else 0.0
        if max_abs == 0.0 and self.class_tag != CUSTOM:
            raise InvalidInput("all-zero coupling matrix is rejected (normalization undefined)")
        if self.class_tag != CUSTOM and not np.isclose(max_abs, 1.0, rtol=0, atol=1e-12):
            raise InvalidInput(f"max |entry| must be 1, got {max_abs}")
        if self.class_tag not in PROBLEM_CLASSES:
            raise InvalidInput(f"unknown class tag {self.class_tag!r}")

    def to_json(self, seed: int | None = None) -> str:
        iu = np.triu_indices(self.n, k=1)
        return json.dumps(
            {
                "n": self.n,
                "class": self.class_tag,
                "seed": seed,
                "entries": list(self.entries[iu]),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CouplingMatrix":
        data = json.loads(text)
        n = int(data["n"])
        upper = np.asarray(data["entries"], dtype=float)
        if upper.shape != (n * (n - 1) // 2,):
            raise InvalidInput("upper-triangle length inconsistent with n")
        entries = np.zeros((n, n))
        iu = np.triu_indices(n, k=1)
        entries[iu] = upper
        entries += entries.T
        return cls(n=n, entries=entries, class_tag=data.get("class", CUSTOM))


@dataclass(frozen=True)
class SpinConfiguration:
    """Spin vector with values in {-1, +1}."""

    spins: tuple

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.spins):
            raise InvalidInput("spins must be +1 or -1")

    def flipped(self) -> "SpinConfiguration":
        return SpinConfiguration(tuple(-s for s in self.spins))


@dataclass(frozen=True)
class GroundStateSet:
    """Minimal Ising energy and all configurations attaining it (flip-closed)."""

    energy: float
    configurations: frozenset = field(default_factory=frozenset)

    def contains_spins(self, spins) -> bool:
        return tuple(int(s) for s in spins) in self._spin_tuples

    @property
    def _spin_tuples(self):
        return {c.spins for c in self.configurations}


def ising_energy(c: CouplingMatrix, s: SpinConfiguration) -> float:
    """E(sigma) over all ordered pairs; equals 2 * sum_{i<j} C_ij s_i s_j."""
    spins = np.asarray(s.spins, dtype=float)
    if spins.shape != (c.n,):
        raise InvalidInput(f"spin configuration length {spins.shape} != n={c.n}")
    return float(spins @ c.entries @ spins)


def brute_force_ground_states(c: CouplingMatrix, chunk: int = 1 << 16) -> GroundStateSet:
    """Enumerate 2^(n-1) configurations (spin 0 fixed +1 by flip symmetry)."""
    n = c.n
    if n > _BRUTE_FORCE_MAX_N:
        raise InvalidInput(f"brute force limited to n <= {_BRUTE_FORCE_MAX_N}")
    total = 1 << (n - 1)
    best_energy = np.inf
    best: list[tuple] = []
    shifts = np.arange(n - 1, dtype=np.uint64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = (idx[:, None] >> shifts[None, :]) & np.uint64(1)
        spins = np.empty((len(idx), n))
        spins[:, 0] = 1.0
        spins[:, 1:] = 1.0 - 2.0 * bits
        energies = np.einsum("ti,ij,tj->t", spins, c.entries, spins)
        lo = energies.min()
        tol = _ENERGY_TIE_TOL * max(1.0, abs(min(lo, best_energy)))
        if lo < best_energy - tol:
            best_energy = lo
            best = []
        keep = energies <= best_energy + tol
        best_energy = min(best_energy, lo)
        best.extend(tuple(int(v) for v in row) for row in spins[keep])
    configs = set()
    for spins in best:
        configs.add(SpinConfiguration(spins))
        configs.add(SpinConfiguration(spins).flipped())
    return GroundStateSet(energy=float(best_energy), configurations=frozenset(configs))


def _finalize(entries: np.ndarray, n: int, tag: str) -> CouplingMatrix:
    entries = np.triu(entries, k=1)
    entries = entries + entries.T
    return CouplingMatrix(n=n, entries=entries, class_tag=tag)


def gen_sk7(n: int, seed: int) -> CouplingMatrix:
    """Upper entries uniform over the 14 nonzero integers in [-7, 7], then
    normalized by the realized max amplitude."""
    if n < 2:
        raise InvalidInput("n >= 2 required")
    rng = instance_rng(seed)
    draws = rng.integers(1, 8, size=(n, n)) * rng.choice([-1, 1], size=(n, n))
    upper = np.triu(draws, k=1).astype(float)
    upper /= np.max(np.abs(upper))
    return _finalize(upper, n, SK7)


def gen_dense_maxcut(n: int, seed: int) -> CouplingMatrix:
    """Upper entries i.i.d. Bernoulli(1/2) in {0, 1}; all-zero draws resampled."""
    if n < 2:
        raise InvalidInput("n >= 2 required")
    rng = instance_rng(seed)
    while True:
        upper = np.triu(rng.integers(0, 2, size=(n, n)).astype(float), k=1)
        if np.any(upper != 0):
            return _finalize(upper, n, DENSE_MAXCUT)


def gen_cubic_maxcut(n: int, seed: int) -> CouplingMatrix:
    """Uniform simple 3-regular graph via the pairing model with rejection.

    3-regular graphs require even order, so odd n is rejected.
    """
    if n < 4 or n % 2 != 0:
        raise InvalidInput("cubic MAX-CUT requires even n >= 4")
    rng = instance_rng(seed)
    stubs = np.repeat(np.arange(n), 3)
    while True:
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        if np.any(a == b):
            continue
        adj = np.zeros((n, n))
        np.add.at(adj, (a, b), 1.0)
        np.add.at(adj, (b, a), 1.0)
        if np.max(adj) > 1.0:
            continue
        return CouplingMatrix(n=n, entries=adj, class_tag=CUBIC_MAXCUT)


_GENERATORS = {
    SK7: gen_sk7,
    DENSE_MAXCUT: gen_dense_maxcut,
    CUBIC_MAXCUT: gen_cubic_maxcut,
}


def generate(class_tag: str, n: int, seed: int) -> CouplingMatrix:
    try:
        gen = _GENERATORS[class_tag]
    except KeyError:
        raise InvalidInput(f"no generator for class {class_tag!r}") from None
    return gen(n, seed)
