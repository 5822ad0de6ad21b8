"""Run configuration: JSON ingestion, validation, seeded state factories.

The config is one JSON document. Complex numbers are [re, im] pairs and
matrices are row-major nested arrays, so files stay language-neutral and
diff-able. The seeded generator is numpy's PCG64 (a documented, portable
64-bit generator); its identifier is recorded in every run record.
"""

import hashlib
import json
from dataclasses import dataclass, field
from math import e as _e

import numpy as np

from .dynamics import System
from .operators import trace_norm
from .sequences import OperatorSequence, symmetrize_component

__all__ = [
    "SystemConfig",
    "load_config",
    "config_from_dict",
    "default_config_dict",
    "make_system",
    "random_sequence",
    "random_sequence_raw",
    "genuine_state_sequence",
    "chaos_sequence",
    "random_hermitian",
    "RNG_ALGORITHM",
    "CORRELATION_NORM_CAP",
]

RNG_ALGORITHM = "numpy-PCG64"
SCENARIOS = ("evolve", "verify", "meanfield", "observables")

# convergence threshold for the nonlinear solution series: 1 / (2 e^3)
CORRELATION_NORM_CAP = 1.0 / (2.0 * _e ** 3)

DEFAULT_TOLERANCES = {
    "hard": 1e-12,
    "propagator": 1e-10,
    "dual_route": 1e-10,
    "group_property": 1e-9,
    "generator_fd": 1e-5,
    "traced_generator": 1e-8,
    "third_term": 1e-10,
    "vlasov_series": 1e-6,
    "hartree": 1e-8,
    "positivity": 1e-10,
}


@dataclass
class SystemConfig:
    """Validated run parameters."""

    d: int
    n_max: int
    hbar: float
    kinetic: np.ndarray
    potential: np.ndarray
    times: list
    seed: int
    scenario: str = "verify"
    epsilons: list = field(default_factory=lambda: [1.0, 0.5, 0.25, 0.125])
    tolerances: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def tol(self, name):
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def hash(self):
        blob = json.dumps(self.raw, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _parse_complex_matrix(data, rows, name):
    """Nested [re, im] arrays -> complex ndarray with shape checks."""
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"config field '{name}': not a numeric array ({exc})")
    if arr.ndim == 2:
        cplx = arr.astype(np.complex128)
    elif arr.ndim == 3 and arr.shape[2] == 2:
        cplx = arr[:, :, 0] + 1j * arr[:, :, 1]
    else:
        raise ValueError(
            f"config field '{name}': expected a {rows}x{rows} matrix of reals "
            f"or [re, im] pairs, got shape {arr.shape}")
    if cplx.shape != (rows, rows):
        raise ValueError(
            f"config field '{name}': expected shape ({rows}, {rows}), got {cplx.shape}")
    return cplx


def config_from_dict(data):
    required = ("d", "n_max", "hbar", "kinetic", "potential", "times", "seed")
    for key in required:
        if key not in data:
            raise ValueError(f"config field '{key}' is missing")
    d = int(data["d"])
    if d < 2:
        raise ValueError("config field 'd': must be an integer >= 2")
    n_max = int(data["n_max"])
    if not 1 <= n_max <= 6:
        raise ValueError("config field 'n_max': must be in 1..6")
    if d ** (2 * n_max) > 2 ** 24:
        raise ValueError("config fields 'd'/'n_max': d**(2 n_max) exceeds the "
                         "2**24 memory guard")
    hbar = float(data["hbar"])
    if hbar <= 0:
        raise ValueError("config field 'hbar': must be positive")
    kinetic = _parse_complex_matrix(data["kinetic"], d, "kinetic")
    potential = _parse_complex_matrix(data["potential"], d * d, "potential")
    if np.max(np.abs(kinetic - kinetic.conj().T)) > 1e-12:
        raise ValueError("config field 'kinetic': matrix is not Hermitian")
    if np.max(np.abs(potential - potential.conj().T)) > 1e-12:
        raise ValueError("config field 'potential': matrix is not Hermitian")
    from . import kernels
    swapped = kernels.permute(potential.astype(np.complex128), (1, 0), 2, d)
    if np.max(np.abs(potential - swapped)) > 1e-12:
        raise ValueError("config field 'potential': matrix must be symmetric "
                         "under the two-factor swap")
    times = [float(t) for t in data["times"]]
    if not all(np.isfinite(times)):
        raise ValueError("config field 'times': entries must be finite")
    seed = int(data["seed"])
    if not 0 <= seed < 2 ** 64:
        raise ValueError("config field 'seed': must fit in 64 unsigned bits")
    scenario = data.get("scenario", "verify")
    if scenario not in SCENARIOS:
        raise ValueError(f"config field 'scenario': must be one of {SCENARIOS}")
    epsilons = [float(x) for x in data.get("epsilons", [1.0, 0.5, 0.25, 0.125])]
    if any(x <= 0 for x in epsilons):
        raise ValueError("config field 'epsilons': entries must be positive")
    if not all(a > b for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("config field 'epsilons': must be strictly decreasing")
    tolerances = dict(data.get("tolerances", {}))
    for key in tolerances:
        if key not in DEFAULT_TOLERANCES:
            raise ValueError(f"config field 'tolerances': unknown entry '{key}'")
    return SystemConfig(d=d, n_max=n_max, hbar=hbar, kinetic=kinetic,
                        potential=potential, times=times, seed=seed,
                        scenario=scenario, epsilons=epsilons,
                        tolerances=tolerances, raw=data)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {path} is not valid JSON: {exc}")
    return config_from_dict(data)


def default_config_dict(scenario="verify", d=2, n_max=3, seed=42):
    """A ready-to-run configuration with mildly interacting qubits."""
    kinetic = [[0.5, 0.3], [0.3, -0.5]]
    # diagonal pair coupling plus a swap-symmetric exchange element
    potential = [
        [0.4, 0.0, 0.0, 0.0],
        [0.0, -0.2, 0.3, 0.0],
        [0.0, 0.3, -0.2, 0.0],
        [0.0, 0.0, 0.0, 0.1],
    ]
    return {
        "d": d,
        "n_max": n_max,
        "hbar": 1.0,
        "kinetic": kinetic,
        "potential": potential,
        "times": [0.1, 0.5, 1.0],
        "epsilons": [1.0, 0.5, 0.25, 0.125],
        "seed": seed,
        "scenario": scenario,
    }


def make_system(config, potential_scale=1.0):
    return System(config.d, config.kinetic,
                  potential_scale * config.potential, hbar=config.hbar)


# -- seeded factories ---------------------------------------------------------

def random_hermitian(rng, dim):
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (raw + raw.conj().T) / 2


def random_sequence_raw(d, n_max, rng, kind="correlation", component_norm=0.02):
    """Seeded random sequence from an explicit generator.

    kind='state': positive, trace-one symmetric components.
    kind='correlation': Hermitian symmetric components with every trace norm
    equal to ``component_norm`` (default safely below the convergence
    threshold 1/(2 e^3) of the solution series).
    kind='bounded': Hermitian symmetric components of unit trace norm.
    """
    mats = []
    for n in range(1, n_max + 1):
        dim = d ** n
        if kind == "state":
            raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            mat = raw @ raw.conj().T
            mat = symmetrize_component(mat, n, d)
            mat /= np.trace(mat).real
        elif kind in ("correlation", "bounded"):
            target = 1.0 if kind == "bounded" else component_norm
            mat = symmetrize_component(random_hermitian(rng, dim), n, d)
            mat *= target / trace_norm(mat)
        else:
            raise ValueError(f"unknown sequence kind: {kind!r}")
        mats.append(mat)
    return OperatorSequence.from_matrices(d, mats)


def random_sequence(config, kind="correlation"):
    """Deterministic random sequence for the configured seed."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    return random_sequence_raw(config.d, config.n_max, rng, kind=kind)


def genuine_state_sequence(config):
    """Correlation sequence of a genuine n_max-particle state.

    Only the top component is populated, with a random positive symmetric
    trace-one density matrix; its evolved marginals stay positive, which is
    what the positivity checks exercise.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed + 1))
    n = config.n_max
    dim = config.d ** n
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    top = raw @ raw.conj().T
    top = symmetrize_component(top, n, config.d)
    top /= np.trace(top).real
    mats = [np.zeros((config.d ** (k + 1),) * 2) for k in range(n - 1)] + [top]
    return OperatorSequence.from_matrices(config.d, mats)


def chaos_sequence(config, norm=0.02):
    """Chaos data: only the one-particle component is nonzero."""
    rng = np.random.Generator(np.random.PCG64(config.seed + 2))
    mat = random_hermitian(rng, config.d)
    mat *= norm / trace_norm(mat)
    mats = [mat] + [np.zeros((config.d ** (k + 1),) * 2)
                    for k in range(1, config.n_max)]
    return OperatorSequence.from_matrices(config.d, mats)
