"""Dynamical Ising solvers: three measurement-feedback CIM variants and
discrete simulated bifurcation.

Each variant evolves continuous amplitudes ``x`` under an explicit Euler
scheme (symplectic Euler for dSB) with a linearly ramped pump, then reads
out spins as ``sign(x)``.  The coupling force always points toward lower
energy of the instance Hamiltonian; the local fields ``h`` do not enter
the dynamics, only the final energy evaluation.

Variants
--------
cac   amplitude-heterogeneity error feedback on the amplitudes
      dx_i = -x_i^3 + (p-1) x_i - e_i * zeta * (J x)_i
      de_i = -beta * e_i * (x_i^2 - alpha)
cfc   error feedback applied to the injected coupling field
      z_i  = e_i * zeta * (J x)_i
      dx_i = -x_i^3 + (p-1) x_i - z_i
      de_i = -beta * e_i * (z_i^2 - alpha)
sfc   saturable coupling with a low-pass error tracker
      z_i  = zeta * (J x)_i
      dx_i = -x_i^3 + (p-1) x_i - tanh(c z_i) - k (z_i - e_i)
      de_i = -beta * (e_i - z_i)
dsb   discrete simulated bifurcation with inelastic walls
      dx_i = a0 * momentum_i
      dmomentum_i = -(a0 - a(t)) x_i - c0 * sum_j J_ij sign(x_j)
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Mapping

import numpy as np

from . import _kernels
from .model import IsingInstance, energy

__all__ = [
    "CimParams",
    "DivergenceError",
    "SbParams",
    "ShotResult",
    "SolverState",
    "Variant",
    "binarize",
    "coupling_sigma",
    "default_params",
    "init_state",
    "integrate",
    "params_with_overrides",
    "pump_schedule",
    "resolve_c0",
    "run_shot",
    "step_cac",
    "step_cfc",
    "step_dsb",
    "step_sfc",
]

# Error-variable guard band for the multiplicative CAC/CFC feedback: values
# drifting below E_FLOOR (Euler overshoot toward a sign flip) or above
# E_CEIL are clamped after each step.  An exactly-zero error variable is a
# fixed point of the dynamics and is left untouched.
E_FLOOR = 1e-4
E_CEIL = 1e4

_MASK64 = (1 << 64) - 1


class Variant(str, Enum):
    """Solver selector; values double as CLI / wire names."""

    CAC = "cac"
    CFC = "cfc"
    SFC = "sfc"
    DSB = "dsb"

    @classmethod
    def coerce(cls, value: "Variant | str") -> "Variant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {value!r}; expected one of: {names}") from None


@dataclass(frozen=True)
class CimParams:
    """Hyperparameters shared by the cac/cfc/sfc variants.

    ``c`` and ``k`` only affect sfc; ``alpha`` only cac/cfc.  ``zeta`` is
    the coupling gain, auto-scaled by :func:`default_params`.
    """

    p_end: float = 2.0
    alpha: float = 1.0
    beta: float = 0.3
    zeta: float = 1.0
    c: float = 1.0
    k: float = 0.1
    dt: float = 0.05
    steps: int = 2000
    noise_sigma0: float = 0.1
    noise_per_step: float = 0.0
    amplitude_clamp: float = 1.5

    def __post_init__(self) -> None:
        _check_common(self)
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.noise_per_step < 0:
            raise ValueError(f"noise_per_step must be >= 0, got {self.noise_per_step}")
        if not self.amplitude_clamp > 0:
            raise ValueError(f"amplitude_clamp must be > 0, got {self.amplitude_clamp}")


@dataclass(frozen=True)
class SbParams:
    """Hyperparameters for dsb; ``c0 = None`` means auto-scale per instance."""

    a0: float = 1.0
    c0: float | None = None
    dt: float = 0.25
    steps: int = 1000
    noise_sigma0: float = 0.1

    def __post_init__(self) -> None:
        _check_common(self)
        if not self.a0 > 0:
            raise ValueError(f"a0 must be > 0, got {self.a0}")
        if self.c0 is not None and not math.isfinite(self.c0):
            raise ValueError("c0 must be finite")


def _check_common(params) -> None:
    for f in fields(params):
        value = getattr(params, f.name)
        if isinstance(value, (int, float)) and value is not None:
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value}")
    if not params.dt > 0:
        raise ValueError(f"dt must be > 0, got {params.dt}")
    if not isinstance(params.steps, int) or params.steps < 1:
        raise ValueError(f"steps must be a positive integer, got {params.steps!r}")
    if params.noise_sigma0 < 0:
        raise ValueError(f"noise_sigma0 must be >= 0, got {params.noise_sigma0}")


@dataclass
class SolverState:
    """Mutable trajectory state.  ``e`` is the CIM error vector (unused by
    dsb); ``momentum`` is the dsb conjugate variable (unused by CIM)."""

    x: np.ndarray
    e: np.ndarray | None = None
    momentum: np.ndarray | None = None
    t: float = 0.0
    step_index: int = 0

    def copy(self) -> "SolverState":
        return SolverState(
            x=self.x.copy(),
            e=None if self.e is None else self.e.copy(),
            momentum=None if self.momentum is None else self.momentum.copy(),
            t=self.t,
            step_index=self.step_index,
        )


@dataclass
class ShotResult:
    """Outcome of one solver shot (optionally refined by descent)."""

    config: np.ndarray
    energy: float
    steps_run: int
    wall_time: float
    seed: int
    raw_energy_before_descent: float | None = None


class DivergenceError(RuntimeError):
    """Raised when the state turns non-finite during integration."""

    def __init__(self, variant: Variant, step_index: int):
        super().__init__(f"{variant.value} state became non-finite at step {step_index}")
        self.variant = variant
        self.step_index = step_index


def coupling_sigma(inst: IsingInstance) -> float:
    """RMS magnitude of the nonzero couplings; 1.0 when there are none."""
    vals = np.array([v for v in inst.couplings.values() if v != 0.0])
    if vals.size == 0:
        return 1.0
    return float(np.sqrt(np.mean(vals * vals)))


# Per-variant gain factor applied on top of the common 1/(sigma_J sqrt(n))
# normalisation.  Calibrated on the ferromagnetic ring/complete families
# (n = 8, 16) and the n=10 spin-glass corpus: the multiplicative-feedback
# variants want a weak injection (late bifurcation, so the aligned mode
# outgrows domain-wall modes on sparse graphs), while the saturable sfc
# drive and dsb's sign coupling want a strong one.
_GAIN_FACTOR = {
    Variant.CAC: 0.25,
    Variant.CFC: 0.25,
    Variant.SFC: 1.35,
    Variant.DSB: 1.41,
}
# Slow error-variable growth for the same reason; sfc's linear tracker
# keeps the plain rate (slowing it collapses its ring performance).
_CAC_CFC_BETA = 0.15
# dsb heals sparse-graph domain walls ballistically and needs the longer
# schedule; CIM variants do not benefit.
_DSB_STEPS = 4000


def default_params(variant: Variant | str, inst: IsingInstance) -> CimParams | SbParams:
    """Calibrated defaults with the coupling gain scaled to the instance.

    The base normalisation keeps the injected field O(1) across problem
    sizes and coupling scales: ``zeta = gain / (sigma_J sqrt(n))`` for the
    CIM variants and ``c0 = gain * a0 / (2 sigma_J sqrt(n))`` for dsb,
    where ``sigma_J`` is the RMS nonzero coupling magnitude and ``gain``
    is the per-variant factor above.
    """
    variant = Variant.coerce(variant)
    if inst.n < 1:
        raise ValueError(f"instance must have n >= 1, got n = {inst.n}")
    scale = _GAIN_FACTOR[variant] / (coupling_sigma(inst) * math.sqrt(inst.n))
    if variant is Variant.DSB:
        base = SbParams(steps=_DSB_STEPS)
        return replace(base, c0=base.a0 * scale / 2.0)
    if variant is Variant.SFC:
        return CimParams(zeta=scale)
    return CimParams(zeta=scale, beta=_CAC_CFC_BETA)


def params_with_overrides(
    params: CimParams | SbParams, overrides: Mapping[str, object]
) -> CimParams | SbParams:
    """Apply ``key=value`` overrides, rejecting unknown keys by name."""
    valid = [f.name for f in fields(type(params))]
    updates: dict[str, object] = {}
    for key, raw in overrides.items():
        if key not in valid:
            raise ValueError(
                f"unknown override key {key!r}; {type(params).__name__} accepts: "
                + ", ".join(valid)
            )
        try:
            value = float(raw)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise ValueError(f"override {key} expects a number, got {raw!r}") from None
        if isinstance(getattr(params, key), int):
            if not value.is_integer():
                raise ValueError(f"override {key} expects an integer, got {raw!r}")
            updates[key] = int(value)
        else:
            updates[key] = value
    return replace(params, **updates)


def pump_schedule(t: float, t_total: float, end_value: float) -> float:
    """Linear ramp from 0 at t=0 to ``end_value`` at ``t = t_total``."""
    if not t_total > 0:
        raise ValueError(f"t_total must be > 0, got {t_total}")
    return end_value * (min(max(t, 0.0), t_total) / t_total)


def resolve_c0(inst: IsingInstance, params: SbParams) -> float:
    """Concrete dsb coupling strength (auto-scale when ``c0`` is unset)."""
    if params.c0 is not None:
        return params.c0
    return params.a0 / (2.0 * coupling_sigma(inst) * math.sqrt(inst.n))


def init_state(
    variant: Variant | str,
    inst: IsingInstance,
    params: CimParams | SbParams,
    rng: np.random.Generator,
) -> SolverState:
    """Draw the initial state: ``x ~ N(0, noise_sigma0^2)`` i.i.d.

    CIM error variables start at 1 (cac/cfc) or 0 (sfc, so the tracker is
    odd under x -> -x); dsb momenta start at rest.
    """
    variant = Variant.coerce(variant)
    _check_kind(variant, params)
    x = rng.normal(0.0, params.noise_sigma0, inst.n)
    if variant is Variant.DSB:
        return SolverState(x=x, momentum=np.zeros(inst.n))
    e0 = 0.0 if variant is Variant.SFC else 1.0
    return SolverState(x=x, e=np.full(inst.n, e0))


def _check_kind(variant: Variant, params) -> None:
    want = SbParams if variant is Variant.DSB else CimParams
    if not isinstance(params, want):
        raise ValueError(
            f"variant {variant.value!r} needs {want.__name__}, got {type(params).__name__}"
        )


_NO_NOISE = np.zeros((0, 0))


def _advance(
    variant: Variant,
    inst: IsingInstance,
    params,
    state: SolverState,
    nsteps: int,
    noise_rows: np.ndarray,
    dt: float | None = None,
) -> SolverState:
    jmat = inst.coupling_matrix
    # the pump ramp is anchored to the configured run length even when a
    # single step is taken with a custom dt
    t_total = params.steps * params.dt
    dt = params.dt if dt is None else float(dt)
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if variant is Variant.DSB:
        t, fail = _kernels.dsb(
            state.x, state.momentum, jmat, params.a0, resolve_c0(inst, params),
            dt, state.t, t_total, nsteps,
        )
    elif variant is Variant.CAC:
        t, fail = _kernels.cim_cac(
            state.x, state.e, jmat, params.zeta, params.p_end, params.alpha, params.beta,
            dt, state.t, t_total, nsteps, params.amplitude_clamp, E_FLOOR, E_CEIL,
            noise_rows,
        )
    elif variant is Variant.CFC:
        t, fail = _kernels.cim_cfc(
            state.x, state.e, jmat, params.zeta, params.p_end, params.alpha, params.beta,
            dt, state.t, t_total, nsteps, params.amplitude_clamp, E_FLOOR, E_CEIL,
            noise_rows,
        )
    else:
        t, fail = _kernels.cim_sfc(
            state.x, state.e, jmat, params.zeta, params.p_end, params.beta, params.c,
            params.k, dt, state.t, t_total, nsteps, params.amplitude_clamp,
            noise_rows,
        )
    if fail >= 0:
        state.step_index += fail
        raise DivergenceError(variant, state.step_index)
    state.t = t
    state.step_index += nsteps
    return state


def _step(variant, inst, params, state, dt):
    variant = Variant.coerce(variant)
    _check_kind(variant, params)
    return _advance(variant, inst, params, state, 1, _NO_NOISE, dt=dt)


def step_cac(state, inst, params, dt):
    """One Euler step of the cac dynamics (in place; returns the state)."""
    return _step(Variant.CAC, inst, params, state, dt)


def step_cfc(state, inst, params, dt):
    """One Euler step of the cfc dynamics (in place; returns the state)."""
    return _step(Variant.CFC, inst, params, state, dt)


def step_sfc(state, inst, params, dt):
    """One Euler step of the sfc dynamics (in place; returns the state)."""
    return _step(Variant.SFC, inst, params, state, dt)


def step_dsb(state, inst, params, dt):
    """One symplectic Euler step of dsb: momentum first, then position with
    the new momentum, then the wall rule."""
    return _step(Variant.DSB, inst, params, state, dt)


def integrate(
    variant: Variant | str,
    inst: IsingInstance,
    params: CimParams | SbParams,
    state: SolverState,
    noise: np.ndarray | None = None,
) -> SolverState:
    """Advance ``state`` through the remaining steps of the schedule.

    ``noise`` (CIM only) is a ``(params.steps, n)`` array of per-step
    additive kicks indexed by absolute step; rows already consumed by a
    partial run are skipped.  Raises :class:`DivergenceError` if the state
    turns non-finite, recording the failing step index.
    """
    variant = Variant.coerce(variant)
    _check_kind(variant, params)
    remaining = params.steps - state.step_index
    if remaining <= 0:
        return state
    rows = _NO_NOISE
    if noise is not None and variant is not Variant.DSB:
        noise = np.ascontiguousarray(noise, dtype=float)
        if noise.shape != (params.steps, inst.n):
            raise ValueError(
                f"noise must have shape ({params.steps}, {inst.n}), got {noise.shape}"
            )
        rows = noise[state.step_index :]
    return _advance(variant, inst, params, state, remaining, rows)


def binarize(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Read out spins as sign(x); exact zeros get a fair coin flip from
    ``rng``, drawn in index order."""
    cfg = np.where(x > 0.0, 1, -1).astype(np.int8)
    for i in np.flatnonzero(x == 0.0):
        cfg[i] = 1 if rng.integers(0, 2) == 1 else -1
    return cfg


def run_shot(
    variant: Variant | str,
    inst: IsingInstance,
    params: CimParams | SbParams | None = None,
    seed: int = 0,
) -> ShotResult:
    """One full trajectory from a seeded random start to a spin readout.

    The same ``(variant, inst, params, seed)`` always yields the same
    configuration and energy; ``wall_time`` is the only field that varies
    between calls.
    """
    variant = Variant.coerce(variant)
    if params is None:
        params = default_params(variant, inst)
    _check_kind(variant, params)
    started = time.perf_counter()
    rng = np.random.default_rng(seed & _MASK64)
    state = init_state(variant, inst, params, rng)
    noise = None
    if variant is not Variant.DSB and params.noise_per_step > 0.0:
        amp = params.noise_per_step * math.sqrt(params.dt)
        noise = rng.normal(0.0, amp, (params.steps, inst.n))
    integrate(variant, inst, params, state, noise)
    config = binarize(state.x, rng)
    return ShotResult(
        config=config,
        energy=energy(inst, config),
        steps_run=state.step_index,
        wall_time=time.perf_counter() - started,
        seed=seed,
    )
