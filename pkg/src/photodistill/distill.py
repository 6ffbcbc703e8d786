"""Distillation predictions, parameter optimization and optimal-unitary synthesis.

Photon 1 is the verifier; photons 2 and 3 enter inputs 1 and 2 of the 3-mode
distillation unitary ``U_D`` (rows are inputs, columns outputs). A run
succeeds when output 2 holds one photon and output 3 is empty; the photon left
in output 1 is the distilled one. Everything depends on ``U_D`` only through

    S     = |u11 u22 / (u21 u12)|
    phi_u = arg(u11 u22 conj(u21) conj(u12))

and the overall heralding weight ``|u12 u21|^2``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DegenerateProtocolError, UndefinedParametersError, ValidationError
from .interference import Interferometer, as_matrix
from .scenario import TWO_PI, Scenario, wrap_phase

DENOMINATOR_TOL = 1e-14
PARAM_TOL = 1e-12

S_FLOOR = 1e-6
S_CAP = 1.0 / S_FLOOR

GRID_SIZE = 256
_ALPHA_MAX = math.atan(S_CAP)

U0 = np.array(
    [
        [1.0, 1.0, math.sqrt(2.0)],
        [1.0, 1.0, -math.sqrt(2.0)],
        [math.sqrt(2.0), -math.sqrt(2.0), 0.0],
    ],
    dtype=complex,
) / 2.0


@dataclass(frozen=True)
class DistillParams:
    s: float
    phi_u: float = 0.0

    def __post_init__(self):
        s = float(self.s)
        if not (math.isfinite(s) and s >= 0.0):
            raise ValidationError(f"S = {s!r} must be finite and >= 0")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "phi_u", wrap_phase(self.phi_u))


U0_PARAMS = DistillParams(1.0, 0.0)


# ------------------------------------------------------------------ closed forms


def _visibility(s, phi_u, v12, v13, v23, delta_mod, phi):
    num = v12 * s * s + v13 + 2.0 * s * delta_mod * np.cos(phi + phi_u)
    den = 1.0 + s * s + 2.0 * s * v23 * np.cos(phi_u)
    return num, den


def predicted_visibility(p: DistillParams, s: Scenario) -> float:
    """Distilled HOM visibility between the verifier and the distilled photon.

    Uses ``|Delta_123|`` in the interference term, which equals
    ``sqrt(V12 V13 V23)`` for pure states.
    """
    num, den = _visibility(p.s, p.phi_u, s.v12, s.v13, s.v23, s.delta_mod, s.delta_phase)
    if den <= DENOMINATOR_TOL:
        raise DegenerateProtocolError(
            f"success probability vanishes for S={p.s!r}, phi_u={p.phi_u!r}"
        )
    return float(num / den)


def predicted_success(u, s: Scenario) -> float:
    """Heralding probability ``|u12 u21|^2 (1 + S^2 + 2 S V23 cos phi_u)``."""
    um = as_matrix(u)
    a = um[0, 0] * um[1, 1]
    b = um[0, 1] * um[1, 0]
    # expanded form stays defined when u12 u21 = 0
    return float(abs(b) ** 2 + abs(a) ** 2 + 2.0 * s.v23 * (a * b.conjugate()).real)


def optimal_success_probability(p: DistillParams, s: Scenario) -> float:
    """Success probability of :func:`synthesize_optimal_unitary` in closed form."""
    c = math.cos(p.phi_u / 2.0)
    root = 2.0 * math.sqrt(p.s) * abs(c)  # sqrt(2 S (1 + cos phi_u))
    return (1.0 + p.s**2 + 2.0 * p.s * s.v23 * math.cos(p.phi_u)) / (1.0 + p.s + root) ** 2


def gain(v_f: float, s: Scenario) -> float:
    return v_f - s.max_visibility


def extract_params(u) -> DistillParams:
    um = as_matrix(u)
    if um.shape[0] < 2:
        raise ValidationError("need at least a 2x2 block")
    a = um[0, 0] * um[1, 1]
    b = um[1, 0] * um[0, 1]
    if abs(b) < PARAM_TOL:
        raise UndefinedParametersError(f"|u21 u12| = {abs(b):.3g} is too small")
    z = a * b.conjugate()
    return DistillParams(abs(a) / abs(b), math.atan2(z.imag, z.real))


# ------------------------------------------------------------------ optimization


_GRID_ALPHA = np.arange(GRID_SIZE) * (0.5 * math.pi / GRID_SIZE)
_GRID_PHI = np.arange(GRID_SIZE) * (TWO_PI / GRID_SIZE)
_GRID_S = np.tan(_GRID_ALPHA)[:, None]
_GRID_S2 = _GRID_S**2
_GRID_COS = np.cos(_GRID_PHI)[None, :]
_GRID_SIN = np.sin(_GRID_PHI)[None, :]


def _grid_search(s: Scenario):
    cos_shift = math.cos(s.delta_phase) * _GRID_COS - math.sin(s.delta_phase) * _GRID_SIN
    num = s.v12 * _GRID_S2 + s.v13 + (2.0 * s.delta_mod) * _GRID_S * cos_shift
    den = 1.0 + _GRID_S2 + (2.0 * s.v23) * _GRID_S * _GRID_COS
    bad = den <= DENOMINATOR_TOL
    if bad.any():
        den = np.where(bad, 1.0, den)
        vals = np.where(bad, -np.inf, num / den)
    else:
        vals = num / den
    return _GRID_ALPHA, _GRID_PHI, vals


def _value(sv: float, pu: float, s: Scenario) -> float:
    num = s.v12 * sv * sv + s.v13 + 2.0 * sv * s.delta_mod * math.cos(s.delta_phase + pu)
    den = 1.0 + sv * sv + 2.0 * sv * s.v23 * math.cos(pu)
    return -math.inf if den <= DENOMINATOR_TOL else num / den


def _objective(x, s: Scenario) -> float:
    return -_value(math.tan(min(max(x[0], 0.0), _ALPHA_MAX)), x[1], s)


def _gradient_numerator(x, s: Scenario):
    """Numerator of grad V_f in (S, phi_u); zero exactly at stationary points."""
    sv, pu = x
    phi, dm, v23 = s.delta_phase, s.delta_mod, s.v23
    num = s.v12 * sv * sv + s.v13 + 2.0 * sv * dm * math.cos(phi + pu)
    den = 1.0 + sv * sv + 2.0 * sv * v23 * math.cos(pu)
    dn_ds = 2.0 * s.v12 * sv + 2.0 * dm * math.cos(phi + pu)
    dn_dp = -2.0 * sv * dm * math.sin(phi + pu)
    dd_ds = 2.0 * sv + 2.0 * v23 * math.cos(pu)
    dd_dp = -2.0 * sv * v23 * math.sin(pu)
    return [dn_ds * den - num * dd_ds, dn_dp * den - num * dd_dp]


def _refine(alphas, phis, vals, i, j, s: Scenario):
    """Nelder-Mead from grid cell (i, j), then a root polish of the gradient."""
    da, dp = alphas[1] - alphas[0], phis[1] - phis[0]
    x0 = np.array([alphas[i], phis[j]])
    simplex = np.array([x0, x0 + [da, 0.0], x0 + [0.0, dp]])
    res = optimize.minimize(
        _objective,
        x0,
        args=(s,),
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-15, "maxiter": 600},
    )
    alpha = min(max(float(res.x[0]), 0.0), _ALPHA_MAX)
    best_s, best_phi = math.tan(alpha), float(res.x[1])
    best_v = _value(best_s, best_phi, s)
    if vals[i, j] > best_v:
        best_s, best_phi, best_v = math.tan(alphas[i]), float(phis[j]), float(vals[i, j])

    if 0.0 < alpha < _ALPHA_MAX:
        sol = optimize.root(_gradient_numerator, [best_s, best_phi], args=(s,), method="hybr", tol=1e-15)
        # hybr reports failure once it stalls at rounding level; judge the point itself
        if np.all(np.isfinite(sol.x)):
            ps, pp = float(sol.x[0]), float(sol.x[1])
            near = abs(ps - best_s) <= 1e-3 * (1.0 + best_s) and abs(pp - best_phi) <= 1e-3
            pv = _value(ps, pp, s) if ps >= 0.0 else -math.inf
            if near and pv >= best_v - 1e-15:
                best_s, best_phi, best_v = ps, pp, max(pv, best_v)

    return best_s, best_phi, best_v


def optimize_params(s: Scenario) -> DistillParams:
    """Maximize the distilled visibility over (S, phi_u).

    S = tan(alpha) is scanned on a 256 x 256 grid in (alpha, phi_u), the best
    cell is refined by Nelder-Mead, and an interior optimum is finally
    polished by solving grad V_f = 0. Exact ties resolve to the smallest
    |S - 1|, then the smallest phi_u. S is confined to [0, 1e6].
    """
    alphas, phis, vals = _grid_search(s)
    finite = vals[np.isfinite(vals)]
    if finite.size == 0 or finite.max() - finite.min() <= 1e-13:
        return DistillParams(1.0, 0.0)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    starts = [(i, j)]
    if i == 0 or i == GRID_SIZE - 1:
        # the S = 0 row is flat in phi_u, so a boundary cell says nothing about
        # the phase; also refine from the best interior cell
        inner = vals[1:-1]
        k, l = np.unravel_index(np.argmax(inner), inner.shape)
        starts.append((k + 1, l))
    best_s, best_phi, best_v = -1.0, 0.0, -math.inf
    for a, b in starts:
        cs, cp, cv = _refine(alphas, phis, vals, a, b, s)
        if cv > best_v:
            best_s, best_phi, best_v = cs, cp, cv

    best_phi = wrap_phase(best_phi)
    # tie-breaking: snap to S = 1 and then to phi_u = 0 when the value is unchanged
    for cand_s, cand_phi in ((1.0, best_phi), (1.0, 0.0), (best_s, 0.0)):
        if (abs(cand_s - 1.0), cand_phi) < (abs(best_s - 1.0), best_phi):
            if _value(cand_s, cand_phi, s) >= best_v - 1e-15:
                best_s, best_phi = cand_s, cand_phi
    return DistillParams(min(max(best_s, 0.0), S_CAP), best_phi)


# ------------------------------------------------------------------- synthesis


def synthesize_optimal_unitary(p: DistillParams) -> Interferometer:
    """Three-mode unitary realizing (S, phi_u) with maximal ``|u12 u21|^2``.

    Dilation of A = (sqrt(S), 1; 1, sqrt(S) e^{i phi_u}) / sqrt(1 + S + sqrt(2S(1+cos phi_u))).
    The formula is evaluated through cos(phi_u/2) to stay accurate next to
    phi_u = pi, where the matrix is replaced by its analytic limit.
    """
    sv, pu = p.s, p.phi_u
    if not sv > 0.0:
        raise ValidationError("synthesis needs S > 0")
    rs = math.sqrt(sv)
    c = math.cos(pu / 2.0)
    if abs(c) <= 1e-15:
        k = 1.0 / math.sqrt(1.0 + sv)
        u = np.array(
            [[rs * k, k, 0.0], [k, -rs * k, 0.0], [0.0, 0.0, 1.0]],
            dtype=complex,
        )
        return Interferometer(u)
    sgn = 1.0 if c > 0 else -1.0
    ac = abs(c)
    half = complex(math.cos(pu / 2.0), math.sin(pu / 2.0))
    ephi = complex(math.cos(pu), math.sin(pu))
    edge = math.sqrt(2.0) * sv**0.25 * math.sqrt(ac)
    u = np.array(
        [
            [rs, 1.0, edge],
            [1.0, rs * ephi, -sgn * edge * half],
            [edge, -sgn * edge * half, sgn * half - rs],
        ],
        dtype=complex,
    )
    u /= math.sqrt(1.0 + sv + 2.0 * rs * ac)
    return Interferometer(u)


def unitary_dilation(a) -> np.ndarray:
    """Unitary ``[[A, sqrt(I - AA^dag)], [sqrt(I - A^dag A), -A^dag]]`` of a contraction."""
    a = np.asarray(a, dtype=complex)
    w, sig, vh = np.linalg.svd(a)
    if sig[0] > 1.0 + 1e-12:
        raise ValidationError(f"not a contraction (||A||_2 = {sig[0]!r})")
    defect = np.sqrt(np.clip(1.0 - sig**2, 0.0, None))
    left = (w * defect) @ w.conj().T
    right = (vh.conj().T * defect) @ vh
    return np.block([[a, left], [right, -a.conj().T]])


# ------------------------------------------------------------------------ plan

VERIFIER_PERMUTATIONS = ((0, 1, 2), (1, 0, 2), (2, 0, 1))
TIE_TOL = 1e-12


@dataclass(frozen=True)
class DistillationPlan:
    params: DistillParams
    unitary: Interferometer
    permutation: tuple[int, int, int]
    v_f: float
    p_success: float
    gain: float

    def to_json(self) -> dict:
        return {
            "S": self.params.s,
            "phi_u": self.params.phi_u,
            "permutation": list(self.permutation),
            "unitary": self.unitary.to_json(),
            "v_f": self.v_f,
            "p_success": self.p_success,
            "gain": self.gain,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DistillationPlan":
        return cls(
            DistillParams(obj["S"], obj["phi_u"]),
            Interferometer.from_json(obj["unitary"]),
            tuple(int(k) for k in obj["permutation"]),
            float(obj["v_f"]),
            float(obj["p_success"]),
            float(obj["gain"]),
        )


def _plan_for(s: Scenario, perm) -> DistillationPlan:
    sp = s.permuted(perm)
    params = optimize_params(sp)
    if params.s < S_FLOOR:
        warnings.warn(f"optimal S={params.s!r} replaced by {S_FLOOR} for synthesis", RuntimeWarning, stacklevel=3)
        params = DistillParams(S_FLOOR, params.phi_u)
    u = synthesize_optimal_unitary(params)
    v_f = predicted_visibility(params, sp)
    return DistillationPlan(params, u, tuple(perm), v_f, predicted_success(u, sp), gain(v_f, s))


def plan(s: Scenario, search_permutations: bool = True) -> DistillationPlan:
    """Optimal distillation plan, optionally over the three choices of verifier photon.

    ``permutation[0]`` is the verifier; ``permutation[1:]`` enter inputs 1 and 2
    of the unitary. Ties in gain go to the higher success probability, then to
    the lexicographically first permutation.
    """
    perms = VERIFIER_PERMUTATIONS if search_permutations else ((0, 1, 2),)
    best = None
    for perm in perms:
        cand = _plan_for(s, perm)
        if best is None:
            best = cand
        elif cand.gain > best.gain + TIE_TOL:
            best = cand
        elif abs(cand.gain - best.gain) <= TIE_TOL and cand.p_success > best.p_success + TIE_TOL:
            best = cand
    return best


def u0_gain(s: Scenario, search_permutations: bool = True) -> tuple[float, tuple[int, int, int]]:
    """Best gain of the fixed unitary U0 over input permutations."""
    perms = VERIFIER_PERMUTATIONS if search_permutations else ((0, 1, 2),)
    best = None
    for perm in perms:
        g = gain(predicted_visibility(U0_PARAMS, s.permuted(perm)), s)
        if best is None or g > best[0] + TIE_TOL:
            best = (g, perm)
    return best
