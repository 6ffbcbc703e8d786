"""Three-photon distinguishability scenarios.

A scenario is the triple of pairwise visibilities together with the
three-photon Bargmann invariant ``Delta_123 = <1|2><2|3><3|1>`` (or
``Tr(rho1 rho2 rho3)`` for mixed internal states). Scenarios can be built from
explicit internal states, from the polarization / polarization+delay
preparations used in the experiment, from raw data, or sampled at random.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleBalanceError, InfeasibleBargmannError, ValidationError

TWO_PI = 2.0 * math.pi

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
PURITY_TOL = 1e-10
BARGMANN_TOL = 1e-12

# cyclic relabelings preserve the orientation of the triad
_EVEN_PERMUTATIONS = {(0, 1, 2), (1, 2, 0), (2, 0, 1)}


def wrap_phase(x: float) -> float:
    """Map an angle into [0, 2pi)."""
    r = math.fmod(float(x), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


@dataclass(frozen=True)
class InternalState:
    """Pure internal state of one photon over a labelled orthonormal basis."""

    amplitudes: np.ndarray
    basis_labels: tuple[str, ...]

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        labels = tuple(str(lab) for lab in self.basis_labels)
        if len(labels) != amps.size:
            raise ValidationError(
                f"{amps.size} amplitudes but {len(labels)} basis labels"
            )
        if len(set(labels)) != len(labels):
            raise ValidationError(f"basis labels must be distinct, got {labels}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_labels", labels)

    def embed(self, labels: Sequence[str]) -> np.ndarray:
        """Amplitude vector expressed over ``labels`` (a superset of our basis)."""
        index = {lab: k for k, lab in enumerate(labels)}
        out = np.zeros(len(labels), dtype=complex)
        for lab, a in zip(self.basis_labels, self.amplitudes):
            out[index[lab]] = a
        return out

    def with_global_phase(self, phase: float) -> "InternalState":
        return InternalState(self.amplitudes * np.exp(1j * phase), self.basis_labels)


def common_basis(states: Iterable[InternalState]) -> tuple[str, ...]:
    """Union of basis labels, in order of first appearance."""
    labels: list[str] = []
    seen = set()
    for st in states:
        for lab in st.basis_labels:
            if lab not in seen:
                seen.add(lab)
                labels.append(lab)
    return tuple(labels)


_SQRT_HALF = 1.0 / math.sqrt(2.0)
_POLARIZATIONS = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "D": (_SQRT_HALF, _SQRT_HALF),
    "A": (_SQRT_HALF, -_SQRT_HALF),
    "L": (_SQRT_HALF, -1j * _SQRT_HALF),
    "R": (_SQRT_HALF, 1j * _SQRT_HALF),
}


def polarization(name: str) -> InternalState:
    """One of H, V, D, A, L, R, with L = (H - iV)/sqrt2 and R = (H + iV)/sqrt2."""
    try:
        amps = _POLARIZATIONS[name.upper()]
    except KeyError:
        raise ValidationError(f"unknown polarization {name!r}") from None
    return InternalState(np.array(amps, dtype=complex), ("H", "V"))


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian PSD matrix of internal-state overlaps with unit diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        g = np.array(self.entries, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValidationError(f"Gram matrix must be square, got shape {g.shape}")
        if np.max(np.abs(g - g.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValidationError("Gram matrix is not Hermitian")
        if np.max(np.abs(np.diag(g) - 1.0), initial=0.0) > HERMITIAN_TOL:
            raise ValidationError("Gram matrix diagonal must be 1")
        lam_min = float(np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0])
        if lam_min < -PSD_TOL:
            raise ValidationError(
                f"Gram matrix is not positive semidefinite (min eigenvalue {lam_min!r})"
            )
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {"re": self.entries.real.tolist(), "im": self.entries.imag.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "GramMatrix":
        return cls(np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float))


@dataclass(frozen=True)
class Scenario:
    """Pairwise visibilities plus the Bargmann invariant of three photons."""

    v12: float
    v13: float
    v23: float
    delta_mod: float
    delta_phase: float = 0.0
    pure: bool = True

    def __post_init__(self):
        for name in ("v12", "v13", "v23"):
            v = float(getattr(self, name))
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} = {v!r} outside [0, 1]")
            object.__setattr__(self, name, v)
        dm = float(self.delta_mod)
        if not dm >= 0.0:
            raise ValidationError(f"delta_mod = {dm!r} must be >= 0")
        ph = float(self.delta_phase)
        if not (0.0 <= ph < TWO_PI):
            raise ValidationError(f"delta_phase = {ph!r} outside [0, 2pi)")
        if dm == 0.0:
            ph = 0.0
        object.__setattr__(self, "delta_mod", dm)
        object.__setattr__(self, "delta_phase", ph)
        object.__setattr__(self, "pure", bool(self.pure))
        prod = self.v12 * self.v13 * self.v23
        if dm * dm > prod + BARGMANN_TOL:
            raise InfeasibleBargmannError(
                f"|Delta|^2 = {dm * dm!r} exceeds V12*V13*V23 = {prod!r}"
            )
        if self.pure and abs(dm * dm - prod) > PURITY_TOL:
            raise ValidationError("pure scenario requires |Delta|^2 = V12*V13*V23")

    @property
    def v(self) -> tuple[float, float, float]:
        return (self.v12, self.v13, self.v23)

    @property
    def delta(self) -> complex:
        return self.delta_mod * complex(math.cos(self.delta_phase), math.sin(self.delta_phase))

    @property
    def max_visibility(self) -> float:
        return max(self.v12, self.v13, self.v23)

    def visibility(self, i: int, j: int) -> float:
        """Visibility between photons ``i`` and ``j`` (0-based); 1 on the diagonal."""
        if i == j:
            return 1.0
        key = tuple(sorted((i, j)))
        return {(0, 1): self.v12, (0, 2): self.v13, (1, 2): self.v23}[key]

    def permuted(self, perm: Sequence[int]) -> "Scenario":
        """Relabel photons so that new photon k is old photon ``perm[k]``.

        Odd permutations reverse the cyclic order of the triad and therefore
        conjugate the Bargmann invariant.
        """
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != [0, 1, 2]:
            raise ValidationError(f"not a permutation of (0, 1, 2): {perm}")
        a, b, c = perm
        phase = self.delta_phase if perm in _EVEN_PERMUTATIONS else wrap_phase(-self.delta_phase)
        return Scenario(
            self.visibility(a, b),
            self.visibility(a, c),
            self.visibility(b, c),
            self.delta_mod,
            phase,
            self.pure,
        )

    def gram(self) -> GramMatrix:
        """Canonical Gram matrix with real (1,2) and (1,3) entries; pure only."""
        if not self.pure:
            raise ValidationError("mixed scenarios have no Gram matrix")
        s12, s13, s23 = (math.sqrt(v) for v in self.v)
        e = complex(math.cos(self.delta_phase), math.sin(self.delta_phase))
        g = np.array(
            [
                [1.0, s12, s13],
                [s12, 1.0, s23 * e],
                [s13, s23 * e.conjugate(), 1.0],
            ],
            dtype=complex,
        )
        return GramMatrix(g)

    def to_json(self) -> dict:
        return {
            "v": [self.v12, self.v13, self.v23],
            "delta_mod": self.delta_mod,
            "delta_phase": self.delta_phase,
            "pure": self.pure,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        v12, v13, v23 = (float(x) for x in obj["v"])
        sc = scenario_from_data(v12, v13, v23, float(obj["delta_mod"]), float(obj.get("delta_phase", 0.0)))
        if "pure" in obj and bool(obj["pure"]) and not sc.pure:
            raise ValidationError("scenario marked pure but |Delta|^2 != V12*V13*V23")
        return sc


def _clip_unit(x: float) -> float:
    if -NORM_TOL <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + NORM_TOL:
        return 1.0
    return x


def gram_from_states(states: Sequence[InternalState]) -> GramMatrix:
    """Gram matrix ``G[i, j] = <psi_i|psi_j>`` over the union of the state bases."""
    states = list(states)
    labels = common_basis(states)
    vecs = np.array([st.embed(labels) for st in states])
    g = vecs.conj() @ vecs.T
    np.fill_diagonal(g, 1.0)
    return GramMatrix(0.5 * (g + g.conj().T))


def scenario_from_gram(g: GramMatrix) -> Scenario:
    if g.n != 3:
        raise ValidationError(f"expected a 3x3 Gram matrix, got {g.n}x{g.n}")
    e = g.entries
    v12, v13, v23 = (_clip_unit(abs(e[i, j]) ** 2) for i, j in ((0, 1), (0, 2), (1, 2)))
    delta = complex(e[0, 1] * e[1, 2] * e[2, 0])
    dm = abs(delta)
    # recompute so purity holds to rounding even after clipping
    dm = math.sqrt(v12 * v13 * v23) if dm > 0.0 else 0.0
    phase = wrap_phase(math.atan2(delta.imag, delta.real)) if dm > 0.0 else 0.0
    return Scenario(v12, v13, v23, dm, phase, pure=True)


def scenario_from_data(v12: float, v13: float, v23: float, delta_mod: float, delta_phase: float = 0.0) -> Scenario:
    """Scenario from measured data; purity is inferred from the Bargmann bound."""
    for name, v in (("v12", v12), ("v13", v13), ("v23", v23)):
        if not (0.0 <= v <= 1.0):
            raise ValidationError(f"{name} = {v!r} outside [0, 1]")
    prod = v12 * v13 * v23
    if delta_mod * delta_mod > prod + BARGMANN_TOL:
        raise InfeasibleBargmannError(
            f"|Delta|^2 = {delta_mod * delta_mod!r} exceeds V12*V13*V23 = {prod!r}"
        )
    pure = abs(delta_mod * delta_mod - prod) <= PURITY_TOL
    return Scenario(v12, v13, v23, delta_mod, wrap_phase(delta_phase), pure)


def prepare_polarization(theta: float) -> list[InternalState]:
    """|H>, and |H> rotated by +theta and -theta through half-wave plates."""
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    basis = ("H", "V")
    return [
        InternalState(np.array([1.0, 0.0]), basis),
        InternalState(np.array([c, s]), basis),
        InternalState(np.array([c, -s]), basis),
    ]


@dataclass(frozen=True)
class PreparationConfig:
    theta: float
    t: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValidationError(f"tau = {self.tau!r} must be > 0")
        if not self.t >= 0.0:
            raise ValidationError(f"t = {self.t!r} must be >= 0")


def prepare_polarization_time(cfg: PreparationConfig) -> list[InternalState]:
    """Polarization preparation with the first photon split over a delayed time bin.

    The first photon carries amplitude sqrt(1 - exp(-t/tau)) on the synchronized
    bin (H, 0) and sqrt(exp(-t/tau)) on the delayed bin (H, t); the two bins are
    treated as orthogonal for every t.
    """
    w = math.exp(-cfg.t / cfg.tau)
    c, s = math.cos(2 * cfg.theta), math.sin(2 * cfg.theta)
    basis = ("H,0", "V,0", "H,t")
    return [
        InternalState(np.array([math.sqrt(-math.expm1(-cfg.t / cfg.tau)), 0.0, math.sqrt(w)]), basis),
        InternalState(np.array([c, s, 0.0]), basis),
        InternalState(np.array([c, -s, 0.0]), basis),
    ]


def balance_delay(theta: float, tau: float = 1.0) -> float:
    """Delay ``t`` making V12 = V13 = V23 for the polarization+delay preparation.

    Solves (1 - exp(-t/tau)) cos^2(2 theta) = cos^2(4 theta). Raises
    :class:`InfeasibleBalanceError` when this needs ``1 - exp(-t/tau) >= 1``.
    """
    if not tau > 0.0:
        raise ValidationError(f"tau = {tau!r} must be > 0")
    c2 = math.cos(2 * theta) ** 2
    c4 = math.cos(4 * theta) ** 2
    if c4 < 1e-300:
        return 0.0
    if c2 <= 0.0:
        raise InfeasibleBalanceError(f"no delay balances theta = {theta!r}")
    target = c4 / c2
    if target >= 1.0 - 1e-15:
        raise InfeasibleBalanceError(
            f"balance at theta = {theta!r} needs 1 - exp(-t/tau) = {target!r} (unbounded delay)"
        )
    return -tau * math.log1p(-target)


def sample_random_gram(kind: str, rng_seed=None, dim: int = 3) -> GramMatrix:
    """Gram matrix of three independent uniformly random unit vectors.

    ``kind="real"`` draws from the unit sphere of R^dim, ``kind="complex"``
    from the Haar-uniform sphere of C^dim.
    """
    rng = np.random.default_rng(rng_seed)
    if kind == "real":
        x = rng.standard_normal((3, dim))
    elif kind == "complex":
        x = rng.standard_normal((3, dim)) + 1j * rng.standard_normal((3, dim))
    else:
        raise ValidationError(f"kind must be 'real' or 'complex', got {kind!r}")
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    g = x.conj() @ x.T
    np.fill_diagonal(g, 1.0)
    if kind == "real":
        g = g.real.astype(complex)
    return GramMatrix(0.5 * (g + g.conj().T))


def sample_random_scenario(kind: str, rng_seed=None, dim: int = 3) -> Scenario:
    return scenario_from_gram(sample_random_gram(kind, rng_seed, dim))


SAMPLING_MEASURE = {
    "real": "Gram of 3 i.i.d. uniform unit vectors on the sphere of R^dim",
    "complex": "Gram of 3 i.i.d. Haar-uniform unit vectors in C^dim",
}
