"""Output-pattern probabilities for partially distinguishable photons.

Matrix convention: ``U[i, j]`` is the amplitude for a photon entering input
mode ``i`` to leave through output mode ``j`` (rows are inputs). A cascade of
stages ``A`` then ``B`` is therefore the product ``A @ B``.

Two independent routes are provided:

* :func:`pattern_probability` sums, over permutations ``sigma``, the
  permanent of ``M * conj(M[sigma])`` weighted by distinguishability factors
  (``prod_i G[sigma(i), i]`` for a pure Gram matrix, or the pairwise/triple
  traces for a mixed three-photon scenario);
* :func:`fock_oracle` expands the product of creation operators explicitly
  over (spatial mode, internal basis state) pairs and sums squared amplitudes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateProtocolError, ValidationError
from .scenario import GramMatrix, InternalState, Scenario, common_basis, gram_from_states

UNITARY_TOL = 1e-10
IMAG_TOL = 1e-10

OccupationPattern = tuple  # tuple[int, ...], one count per mode


@dataclass(frozen=True)
class Interferometer:
    entries: np.ndarray

    def __post_init__(self):
        u = np.array(self.entries, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValidationError(f"interferometer must be square, got shape {u.shape}")
        err = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])), initial=0.0)
        if err > UNITARY_TOL:
            raise ValidationError(f"matrix is not unitary (max |UU^dag - I| = {err:.3g})")
        u.setflags(write=False)
        object.__setattr__(self, "entries", u)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {"m": self.m, "re": self.entries.real.tolist(), "im": self.entries.imag.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Interferometer":
        u = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
        if "m" in obj and int(obj["m"]) != u.shape[0]:
            raise ValidationError(f"declared m={obj['m']} but matrix is {u.shape[0]}x{u.shape[0]}")
        return cls(u)


def as_matrix(u) -> np.ndarray:
    if isinstance(u, Interferometer):
        return u.entries
    return Interferometer(u).entries


# ---------------------------------------------------------------- permanents


def _ryser(a: np.ndarray) -> complex:
    n = a.shape[0]
    total = 0j
    # Gray-code walk over column subsets keeps row sums incremental.
    row_sums = np.zeros(n, dtype=complex)
    subset = 0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        subset ^= 1 << bit
        if subset >> bit & 1:
            row_sums += a[:, bit]
        else:
            row_sums -= a[:, bit]
        size = bin(subset).count("1")
        total += (-1) ** size * np.prod(row_sums)
    return (-1) ** n * total


def permanent(a) -> complex:
    """Permanent of a small square matrix.

    Direct expansion up to 3x3, Ryser's formula beyond.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(a[0, 0])
    if n == 2:
        return complex(a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0])
    if n == 3:
        return complex(
            a[0, 0] * (a[1, 1] * a[2, 2] + a[1, 2] * a[2, 1])
            + a[0, 1] * (a[1, 0] * a[2, 2] + a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] + a[1, 1] * a[2, 0])
        )
    return complex(_ryser(a))


# ----------------------------------------------------- distinguishability weights


def _gram_weights(g: np.ndarray) -> dict[tuple[int, ...], complex]:
    n = g.shape[0]
    return {
        sigma: complex(np.prod([g[sigma[i], i] for i in range(n)]))
        for sigma in itertools.permutations(range(n))
    }


def _scenario_weights(s: Scenario) -> dict[tuple[int, ...], complex]:
    # 2-cycles carry Tr(rho_i rho_j); the two 3-cycles carry Delta and conj(Delta).
    d = s.delta
    return {
        (0, 1, 2): 1.0 + 0j,
        (1, 0, 2): complex(s.v12),
        (2, 1, 0): complex(s.v13),
        (0, 2, 1): complex(s.v23),
        (2, 0, 1): d,
        (1, 2, 0): d.conjugate(),
    }


def distinguishability_weights(g) -> dict[tuple[int, ...], complex]:
    """Permutation weights for a Gram matrix (any n) or a 3-photon Scenario."""
    if isinstance(g, Scenario):
        return _scenario_weights(g)
    if isinstance(g, GramMatrix):
        return _gram_weights(g.entries)
    return _gram_weights(GramMatrix(g).entries)


def _check_patterns(m: int, input_pattern, output_pattern) -> tuple[list[int], list[int]]:
    inp = tuple(int(x) for x in input_pattern)
    out = tuple(int(x) for x in output_pattern)
    if len(inp) != m or len(out) != m:
        raise ValidationError(f"patterns must have length {m}")
    if any(x < 0 for x in inp + out):
        raise ValidationError("occupation counts must be non-negative")
    if any(x > 1 for x in inp):
        raise ValidationError("input must carry at most one photon per mode")
    if sum(inp) != sum(out):
        raise ValidationError(f"input has {sum(inp)} photons but output has {sum(out)}")
    rows = [i for i, x in enumerate(inp) if x]
    cols = [j for j, x in enumerate(out) for _ in range(x)]
    return rows, cols


def _probability_from_weights(u: np.ndarray, rows, cols, out, weights) -> float:
    mk = u[np.ix_(rows, cols)]
    total = 0j
    for sigma, w in weights.items():
        if w == 0:
            continue
        total += w * permanent(mk * mk[list(sigma), :].conj())
    norm = math.prod(math.factorial(k) for k in out)
    total /= norm
    if abs(total.imag) > IMAG_TOL:
        raise ValidationError(
            f"imaginary residue {total.imag:.3g} in probability; inconsistent distinguishability data"
        )
    return float(total.real)


def pattern_probability(u, input_pattern, output_pattern, g) -> float:
    """Probability of ``output_pattern`` given single photons at ``input_pattern``.

    ``g`` is a :class:`GramMatrix` whose i-th row belongs to the photon in the
    i-th occupied input mode, or a three-photon :class:`Scenario` (which also
    covers mixed internal states).
    """
    um = as_matrix(u)
    rows, cols = _check_patterns(um.shape[0], input_pattern, output_pattern)
    weights = distinguishability_weights(g)
    n = len(next(iter(weights)))
    if n != len(rows):
        raise ValidationError(
            f"distinguishability data describes {n} photons but input has {len(rows)}"
        )
    return _probability_from_weights(um, rows, cols, tuple(output_pattern), weights)


def output_patterns(m: int, n: int):
    """All occupation patterns of ``n`` photons over ``m`` modes."""
    for combo in itertools.combinations_with_replacement(range(m), n):
        counts = [0] * m
        for j in combo:
            counts[j] += 1
        yield tuple(counts)


# ---------------------------------------------------------------- Fock oracle

MAX_ORACLE_PHOTONS = 4
MAX_ORACLE_MODES = 6


def _pure_components(states) -> tuple[list[list[tuple[float, np.ndarray]]], int]:
    """Each photon as a mixture [(weight, vector)] over one shared internal basis."""
    if all(isinstance(st, InternalState) for st in states):
        labels = common_basis(states)
        return [[(1.0, st.embed(labels))] for st in states], len(labels)
    arrays = [np.asarray(st, dtype=complex) for st in states]
    dim = arrays[0].shape[0]
    comps = []
    for a in arrays:
        if a.shape[0] != dim:
            raise ValidationError("all internal states must share one basis dimension")
        if a.ndim == 1:
            comps.append([(1.0, a / np.linalg.norm(a))])
        elif a.ndim == 2:
            if np.max(np.abs(a - a.conj().T)) > 1e-12 or abs(np.trace(a) - 1) > 1e-12:
                raise ValidationError("density matrix must be Hermitian with unit trace")
            lam, vecs = np.linalg.eigh(a)
            comps.append([(float(l), vecs[:, k]) for k, l in enumerate(lam) if l > 1e-15])
        else:
            raise ValidationError("internal state must be a vector or a density matrix")
    return comps, dim


def _fock_pure(u: np.ndarray, rows, vecs, out) -> float:
    m = u.shape[0]
    d = vecs[0].shape[0]
    # monomial of creation operators, keyed by sorted (mode, internal) tuples
    terms: dict[tuple, complex] = {(): 1.0 + 0j}
    for r, psi in zip(rows, vecs):
        nxt: dict[tuple, complex] = {}
        for key, c in terms.items():
            for j in range(m):
                if u[r, j] == 0:
                    continue
                for alpha in range(d):
                    if psi[alpha] == 0:
                        continue
                    k2 = tuple(sorted(key + ((j, alpha),)))
                    nxt[k2] = nxt.get(k2, 0j) + c * u[r, j] * psi[alpha]
        terms = nxt
    prob = 0.0
    for key, c in terms.items():
        counts = [0] * m
        for j, _ in key:
            counts[j] += 1
        if tuple(counts) != out:
            continue
        mult = math.prod(math.factorial(key.count(x)) for x in set(key))
        prob += abs(c) ** 2 * mult
    return prob


def fock_oracle(u, states: Sequence[Union[InternalState, np.ndarray]], output_pattern, input_pattern=None) -> float:
    """Brute-force probability by explicit creation-operator expansion.

    ``states`` are :class:`InternalState` objects (embedded into the union of
    their bases) or arrays over a shared basis: vectors for pure states,
    density matrices for mixed ones. Photon ``i`` enters the i-th occupied
    mode of ``input_pattern`` (default: the first ``len(states)`` modes).
    """
    um = as_matrix(u)
    m = um.shape[0]
    n = len(states)
    if n > MAX_ORACLE_PHOTONS or m > MAX_ORACLE_MODES:
        raise ValidationError(
            f"oracle limited to {MAX_ORACLE_PHOTONS} photons and {MAX_ORACLE_MODES} modes"
        )
    if input_pattern is None:
        input_pattern = (1,) * n + (0,) * (m - n)
    rows, _ = _check_patterns(m, input_pattern, output_pattern)
    if len(rows) != n:
        raise ValidationError(f"{n} states for {len(rows)} occupied input modes")
    out = tuple(int(x) for x in output_pattern)
    comps, _ = _pure_components(states)
    prob = 0.0
    for choice in itertools.product(*comps):
        w = math.prod(c[0] for c in choice)
        prob += w * _fock_pure(um, rows, [c[1] for c in choice], out)
    return prob


# ------------------------------------------------ 4-mode distillation circuit

_BALANCED_BS = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)

CIRCUIT_INPUT = (1, 1, 1, 0)
HERALD_PATTERNS = ((1, 1, 1, 0), (2, 0, 1, 0), (0, 2, 1, 0))


def distillation_circuit(u_d) -> np.ndarray:
    """Identity on mode 1 and ``u_d`` on modes 2-4, then a balanced beam
    splitter between mode 1 and the first output of ``u_d``."""
    ud = as_matrix(u_d)
    if ud.shape != (3, 3):
        raise ValidationError(f"distillation unitary must be 3x3, got {ud.shape}")
    stage1 = np.eye(4, dtype=complex)
    stage1[1:, 1:] = ud
    stage2 = np.eye(4, dtype=complex)
    stage2[:2, :2] = _BALANCED_BS
    return stage1 @ stage2


def pattern_key(pattern) -> str:
    return ",".join(str(int(k)) for k in pattern)


@dataclass(frozen=True)
class SimulationResult:
    pattern_probs: dict
    p_bunch: float
    v_f_sim: float
    p_success_sim: float

    def to_json(self) -> dict:
        return {
            "pattern_probs": {pattern_key(k): v for k, v in self.pattern_probs.items()},
            "p_bunch": self.p_bunch,
            "v_f_sim": self.v_f_sim,
            "p_success_sim": self.p_success_sim,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SimulationResult":
        probs = {
            tuple(int(x) for x in key.split(",")): float(v)
            for key, v in obj["pattern_probs"].items()
        }
        return cls(probs, float(obj["p_bunch"]), float(obj["v_f_sim"]), float(obj["p_success_sim"]))


def simulate_distillation_circuit(u_d, s) -> SimulationResult:
    """Herald-conditioned HOM test of the distilled photon against photon 1.

    Photon 1 enters mode 1, photons 2 and 3 enter the first two inputs of
    ``u_d``. Success is one photon on the herald (mode 3) and vacuum on mode 4;
    the distilled visibility is ``2 p_bunch - 1``.

    ``s`` may be a :class:`Scenario` (pure or mixed), a :class:`GramMatrix`, or
    three :class:`InternalState` objects.
    """
    circuit = distillation_circuit(u_d)
    if isinstance(s, (Scenario, GramMatrix)):
        dist = s
    else:
        states = list(s)
        if len(states) != 3:
            raise ValidationError(f"expected 3 internal states, got {len(states)}")
        dist = gram_from_states(states)
    weights = distinguishability_weights(dist)
    if len(next(iter(weights))) != 3:
        raise ValidationError("the distillation circuit takes exactly three photons")
    probs = {}
    for pat in HERALD_PATTERNS:
        rows, cols = _check_patterns(4, CIRCUIT_INPUT, pat)
        probs[pat] = _probability_from_weights(circuit, rows, cols, pat, weights)
    total = sum(probs.values())
    if total <= 1e-15:
        raise DegenerateProtocolError("herald pattern has vanishing probability")
    p_bunch = (probs[(2, 0, 1, 0)] + probs[(0, 2, 1, 0)]) / total
    return SimulationResult(probs, p_bunch, 2.0 * p_bunch - 1.0, total)
