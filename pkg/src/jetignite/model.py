"""Reaction nonlinearities, jet flow profiles and their analytic transforms.

The nonlinearity ``f`` enters through the transform ``G(v) = int_v^inf ds/f``
with total mass ``K = G(0)``. The flow enters through the velocity profile
``phi``, the concentration profile ``psi``, the running maximum ``M`` of
``psi/phi`` and the weight ``mu(r) = exp(alpha * int_0^r s phi(s) ds)``.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple
import json
import math

import numpy as np

from . import kernels
from .errors import (ConfigError, DivergentIntegral, ModelValidationError, OutOfRange,
                     ProfileDegenerate, ToleranceNotMet)
from .numerics import bracket_root, quad

BLOWUP_FRACTION = 1e-8
M_TABLE_SIZE = 100_001
U_MAX_CEILING = 1e300


# ---------------------------------------------------------------------------
# Nonlinearity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NonlinearitySpec:
    """Convex, non-decreasing reaction term with integrable reciprocal.

    Parameters
    ----------
    kind : {"exp", "power", "custom"}
    p : float
        Exponent of ``(1 + u)**p``; only used for ``kind="power"``.
    s, f, fp : tuple of float
        Knots, values and derivatives of a custom ``f``. Between knots ``f``
        is the cubic Hermite interpolant; beyond the last knot it continues as
        ``f_N * (1 + (u - s_N) f'_N / (q f_N))**q``.
    tail_exponent : float
        The tail growth exponent ``q``; ``q > 1`` is required.
    fpp : tuple of float, optional
        Second-derivative samples at the knots of a custom ``f``.
    """

    kind: str
    p: float = 2.0
    s: Tuple[float, ...] = ()
    f: Tuple[float, ...] = ()
    fp: Tuple[float, ...] = ()
    tail_exponent: float = 2.0
    fpp: Optional[Tuple[float, ...]] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("exp", "power", "custom"):
            raise ModelValidationError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "power":
            if not self.p > 1.0:
                raise DivergentIntegral("power nonlinearity needs p > 1")
        if self.kind == "custom":
            self._validate_custom()
        self._cache["K"] = compute_K(self)
        with np.errstate(over="ignore"):
            u_max = G_inverse(self, BLOWUP_FRACTION * self._cache["K"])
        self._cache["u_max"] = min(float(u_max), U_MAX_CEILING)

    @staticmethod
    def exponential():
        return NonlinearitySpec("exp")

    @staticmethod
    def power(p):
        return NonlinearitySpec("power", p=float(p))

    def _validate_custom(self):
        s, fv, fpv = (np.asarray(a, dtype=float) for a in (self.s, self.f, self.fp))
        if not (len(s) == len(fv) == len(fpv) >= 2):
            raise ModelValidationError("custom nonlinearity needs matching s, f, fp samples")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0):
            raise ModelValidationError("custom knots must start at 0 and increase")
        if fv[0] <= 0:
            raise ModelValidationError("f(0) must be positive")
        if np.any(fpv < 0) or np.any(np.diff(fv) < 0):
            raise ModelValidationError("f must be non-decreasing")
        if not self.tail_exponent > 1.0:
            raise DivergentIntegral("tail exponent must exceed 1 for int ds/f to converge")
        if fpv[-1] <= 0:
            raise DivergentIntegral("tail needs a positive slope at the last knot")
        probe = np.linspace(0.0, s[-1] * 1.5, 4001)
        d = self.fprime(probe)
        if np.any(np.diff(d) < -1e-8 * max(1.0, float(np.max(np.abs(d))))):
            raise ModelValidationError("f is not convex on the probe grid")
        if self.fpp is not None and len(self.fpp) != len(s):
            raise ModelValidationError("fpp samples must match the knots")

    # kernel encoding -------------------------------------------------------
    def code(self):
        """Flat tuple consumed by :mod:`jetignite.kernels`."""
        if "code" not in self._cache:
            kind = {"exp": kernels.EXP, "power": kernels.POWER, "custom": kernels.CUSTOM}[self.kind]
            if self.kind == "custom":
                xs = np.asarray(self.s, dtype=float)
                ys = np.asarray(self.f, dtype=float)
                ds = np.asarray(self.fp, dtype=float)
            else:
                xs = ys = ds = np.zeros(2)
            self._cache["code"] = (kind, float(self.p), xs, ys, ds, float(self.tail_exponent))
        return self._cache["code"]

    # evaluation --------------------------------------------------------------
    def __call__(self, u):
        return self.value(u)

    def value(self, u):
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = kernels.f_values(*self.code(), np.ascontiguousarray(u_arr), 0)
        return out if np.ndim(u) else float(out[0])

    def fprime(self, u):
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = kernels.f_values(*self.code(), np.ascontiguousarray(u_arr), 1)
        return out if np.ndim(u) else float(out[0])

    def fsecond(self, u):
        """Second derivative, or ``None`` for a custom ``f`` without samples."""
        u = np.asarray(u, dtype=float)
        if self.kind == "exp":
            return np.exp(u)
        if self.kind == "power":
            return self.p * (self.p - 1.0) * (1.0 + u) ** (self.p - 2.0)
        if self.fpp is None:
            return None
        return np.interp(u, self.s, self.fpp)

    @property
    def K(self) -> float:
        return self._cache["K"]

    @property
    def u_max(self) -> float:
        """Blow-up cap: the point where the remaining G-mass is 1e-8 K."""
        return self._cache["u_max"]

    def G(self, v):
        return G(self, v)

    def G_inverse(self, g):
        return G_inverse(self, g)

    def to_dict(self) -> dict:
        if self.kind == "exp":
            return {"kind": "exp"}
        if self.kind == "power":
            return {"kind": "power", "p": self.p}
        d = {"kind": "custom", "s": list(self.s), "f": list(self.f), "fp": list(self.fp),
             "tail_exponent": self.tail_exponent}
        if self.fpp is not None:
            d["fpp"] = list(self.fpp)
        return d

    # custom tail helpers -----------------------------------------------------
    def _tail(self):
        sN, fN, dN, q = self.s[-1], self.f[-1], self.fp[-1], self.tail_exponent
        return sN, fN, dN / (q * fN), q


def _kappa_transform(fn):
    """Map ``int_0^inf fn`` to ``[0, 1)`` through ``s = t/(1 - t)``."""
    def g(t):
        if t >= 1.0:
            return 0.0
        s = t / (1.0 - t)
        return fn(s) / (1.0 - t) ** 2
    return g


def compute_K(nl: NonlinearitySpec) -> float:
    """``K = int_0^inf ds / f(s)``.

    Closed forms for ``exp`` (1) and ``power`` (``1/(p-1)``); custom kinds
    integrate the Hermite body by adaptive quadrature and add the tail in
    closed form.

    Raises
    ------
    DivergentIntegral
        The quadrature does not settle (custom kinds only).
    """
    if "K" in nl._cache:
        return nl._cache["K"]
    if nl.kind == "exp":
        return 1.0
    if nl.kind == "power":
        return 1.0 / (nl.p - 1.0)
    sN = nl.s[-1]
    try:
        body = quad(lambda s: 1.0 / nl.value(s), 0.0, sN, rel_tol=1e-12, abs_tol=1e-14,
                    points=tuple(nl.s[1:-1]) or None, max_depth=500)
    except ToleranceNotMet as exc:
        raise DivergentIntegral(str(exc)) from exc
    return body + _custom_tail_G(nl, sN)


def K_by_quadrature(nl: NonlinearitySpec) -> float:
    """``K`` by adaptive quadrature after ``s = t/(1 - t)``; cross-check only."""
    try:
        return quad(_kappa_transform(lambda s: 1.0 / float(nl.value(s))), 0.0, 1.0,
                    abs_tol=1e-14, rel_tol=1e-12, max_depth=500)
    except ToleranceNotMet as exc:
        raise DivergentIntegral(str(exc)) from exc


def _custom_tail_G(nl, v):
    sN, fN, a, q = nl._tail()
    return (1.0 + (v - sN) * a) ** (1.0 - q) / (fN * a * (q - 1.0))


def _G_scalar(nl, v):
    if nl.kind == "exp":
        return math.exp(-v)
    if nl.kind == "power":
        return (1.0 + v) ** (1.0 - nl.p) / (nl.p - 1.0)
    sN = nl.s[-1]
    if v >= sN:
        return _custom_tail_G(nl, v)
    return quad(lambda s: 1.0 / nl.value(s), v, sN, rel_tol=1e-12, abs_tol=1e-15,
                max_depth=500) + _custom_tail_G(nl, sN)


def G(nl: NonlinearitySpec, v):
    """``G(v) = int_v^inf ds/f(s)``, vectorised over ``v >= 0``."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr < 0):
        raise OutOfRange("G is defined for v >= 0")
    if nl.kind == "exp":
        out = np.exp(-v_arr)
    elif nl.kind == "power":
        out = (1.0 + v_arr) ** (1.0 - nl.p) / (nl.p - 1.0)
    else:
        out = np.vectorize(lambda x: _G_scalar(nl, x), otypes=[float])(v_arr)
    return out if out.ndim else float(out)


def G_inverse(nl: NonlinearitySpec, g):
    """Inverse of :func:`G` on ``(0, K]``.

    Raises
    ------
    OutOfRange
        For ``g <= 0`` or ``g > K(1 + 1e-12)``.
    """
    g_arr = np.asarray(g, dtype=float)
    K = nl._cache.get("K")
    if np.any(g_arr <= 0) or (K is not None and np.any(g_arr > K * (1 + 1e-12))):
        raise OutOfRange("G_inverse needs 0 < g <= K")
    if K is not None:
        g_arr = np.minimum(g_arr, K)
    if nl.kind == "exp":
        out = -np.log(g_arr)
    elif nl.kind == "power":
        out = (g_arr * (nl.p - 1.0)) ** (1.0 / (1.0 - nl.p)) - 1.0
    else:
        out = np.vectorize(lambda x: _G_inv_custom(nl, x), otypes=[float])(g_arr)
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def _G_inv_custom(nl, g):
    sN, fN, a, q = nl._tail()
    g_sN = _custom_tail_G(nl, sN)
    if g <= g_sN:
        return sN + ((g * fN * a * (q - 1.0)) ** (1.0 / (1.0 - q)) - 1.0) / a
    return bracket_root(lambda v: _G_scalar(nl, v) - g, 0.0, sN, tol=1e-14)


# ---------------------------------------------------------------------------
# Flow profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Radial profile on ``[0, 1]``.

    ``kind`` is one of ``gaussian`` (``exp(-a r^2)``), ``schlichting``
    (``(1 - r^1.5)^2``), ``constant`` or ``custom`` (piecewise linear through
    ``(r, values)``).
    """

    kind: str
    a: float = 0.0
    r: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("gaussian", "schlichting", "constant", "custom"):
            raise ModelValidationError(f"unknown profile kind {self.kind!r}")
        if self.kind == "gaussian" and self.a < 0:
            raise ModelValidationError("Gaussian rate a must be >= 0")
        if self.kind == "custom":
            r = np.asarray(self.r, dtype=float)
            if len(r) < 2 or len(r) != len(self.values):
                raise ModelValidationError("custom profile needs matching r and values")
            if r[0] != 0.0 or r[-1] != 1.0 or np.any(np.diff(r) <= 0):
                raise ModelValidationError("custom profile knots must increase from 0 to 1")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-self.a * r * r)
        if self.kind == "schlichting":
            return (1.0 - np.clip(r, 0.0, 1.0) ** 1.5) ** 2
        if self.kind == "constant":
            return np.ones_like(r)
        return np.interp(r, self.r, self.values)

    def log(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "gaussian":
            return -self.a * r * r
        with np.errstate(divide="ignore"):
            return np.log(self(r))

    def moment(self, r):
        """``Phi_1(r) = int_0^r s phi(s) ds``."""
        r = np.asarray(r, dtype=float)
        if self.kind == "constant" or (self.kind == "gaussian" and self.a == 0.0):
            return 0.5 * r * r
        if self.kind == "gaussian":
            return -np.expm1(-self.a * r * r) / (2.0 * self.a)
        if self.kind == "schlichting":
            rc = np.clip(r, 0.0, 1.0)
            return 0.5 * rc ** 2 - (4.0 / 7.0) * rc ** 3.5 + 0.2 * rc ** 5
        return self._custom_moment(r)

    def _custom_moment(self, r):
        rk = np.asarray(self.r, dtype=float)
        vk = np.asarray(self.values, dtype=float)
        slope = np.diff(vk) / np.diff(rk)

        def piece(j, lo, hi):
            c0 = vk[j] - slope[j] * rk[j]
            return c0 * (hi ** 2 - lo ** 2) / 2.0 + slope[j] * (hi ** 3 - lo ** 3) / 3.0

        cum = np.concatenate([[0.0], np.cumsum([piece(j, rk[j], rk[j + 1]) for j in range(len(slope))])])
        rc = np.clip(r, 0.0, 1.0)
        j = np.clip(np.searchsorted(rk, rc, side="right") - 1, 0, len(slope) - 1)
        return cum[j] + piece(j, rk[j], rc)

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "a": self.a}
        if self.kind == "custom":
            return {"kind": "custom", "r": list(self.r), "values": list(self.values)}
        return {"kind": self.kind}


@dataclass(frozen=True)
class FlowProfileSpec:
    """Velocity profile ``phi`` and concentration profile ``psi``.

    ``psi`` is either a :class:`Profile` or ``None``, meaning ``phi**(2 Sc)``
    (or ``phi**psi_exponent`` when an explicit exponent is given).
    """

    phi: Profile
    psi: Optional[Profile] = None
    sc: float = 0.75
    psi_exponent: Optional[float] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.sc <= 0:
            raise ModelValidationError("Schlichting number must be positive")
        self._validate()
        self._build_M()

    @property
    def exponent(self) -> float:
        return self.psi_exponent if self.psi_exponent is not None else 2.0 * self.sc

    def phi_of(self, r):
        return self.phi(r)

    def psi_of(self, r):
        r = np.asarray(r, dtype=float)
        if self.psi is not None:
            return self.psi(r)
        with np.errstate(divide="ignore"):
            return np.exp(self.exponent * self.phi.log(r))

    def _validate(self):
        r = np.linspace(0.0, 1.0, 20001)
        ph, ps = self.phi(r), self.psi_of(r)
        if abs(ph[0] - 1.0) > 1e-12 or abs(ps[0] - 1.0) > 1e-12:
            raise ModelValidationError("profiles must equal 1 at the axis")
        tol = 1e-12
        if np.any(np.diff(ph) > tol) or np.any(np.diff(ps) > tol):
            raise ModelValidationError("profiles must be non-increasing")
        if np.any(ps < 0):
            raise ModelValidationError("psi must be non-negative")
        if np.any(ph[:-1] <= 0):
            bad = np.flatnonzero(ph[:-1] <= 0)
            if np.any(ps[bad] > 0):
                raise ProfileDegenerate("phi vanishes inside the disk where psi > 0")
            raise ModelValidationError("phi must be positive on [0, 1)")

    def _build_M(self):
        r = np.linspace(0.0, 1.0, M_TABLE_SIZE)
        ratio = self._ratio(r)
        table = np.maximum.accumulate(ratio)
        self._cache["M_r"] = r
        self._cache["M_table"] = table
        if not np.isfinite(table[-2]):
            raise DivergentIntegral("psi/phi is unbounded inside the disk")
        try:
            m = quad(self.M_of, 0.0, 1.0, abs_tol=1e-10, rel_tol=1e-9, max_depth=2000)
        except ToleranceNotMet as exc:
            raise DivergentIntegral(f"int M is not finite: {exc}") from exc
        self._cache["m"] = m

    def _ratio(self, r):
        r = np.asarray(r, dtype=float)
        ph, ps = self.phi(r), self.psi_of(r)
        out = np.empty_like(ph)
        pos = ph > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            out[pos] = ps[pos] / ph[pos]
        zero = ~pos
        interior = zero & (r < 1.0)
        if np.any(interior & (ps > 0)):
            raise ProfileDegenerate("phi = 0 at an interior point where psi > 0")
        out[zero & (ps > 0)] = np.inf
        # 0/0 at the rim: continue the ratio by its limit from inside
        out[zero & (ps <= 0)] = np.nan
        if np.any(np.isnan(out)):
            idx = np.flatnonzero(~np.isnan(out))
            out = np.interp(np.arange(len(out)), idx, out[idx])
        return out

    def M_of(self, s):
        """Running maximum of ``psi/phi`` on ``[0, s]``."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_arr < 0) or np.any(s_arr > 1.0 + 1e-12):
            raise OutOfRange("M is defined on [0, 1]")
        s_arr = np.clip(s_arr, 0.0, 1.0)
        table = self._cache["M_table"]
        j = np.minimum((s_arr * (M_TABLE_SIZE - 1)).astype(int), M_TABLE_SIZE - 1)
        out = np.maximum(table[j], self._ratio(s_arr))
        return out if np.ndim(s) else float(out[0])

    @property
    def m(self) -> float:
        return self._cache["m"]

    def log_mu(self, alpha, r):
        return alpha * self.phi.moment(r)

    def to_dict(self) -> dict:
        d = {"phi": self.phi.to_dict(), "sc": self.sc}
        if self.psi is None:
            d["psi"] = {"kind": "power_of_phi"}
            if self.psi_exponent is not None:
                d["psi"]["exponent"] = self.psi_exponent
        else:
            d["psi"] = self.psi.to_dict()
        return d


def M_of(flow: FlowProfileSpec, s):
    return flow.M_of(s)


def m_integral(flow: FlowProfileSpec) -> float:
    return flow.m


def weight_mu(flow: FlowProfileSpec, alpha: float, r, log: bool = False):
    """``mu(r) = exp(alpha * int_0^r s phi(s) ds)``; ``log=True`` returns ``log mu``."""
    if alpha < 0:
        raise OutOfRange("alpha must be non-negative")
    lm = flow.log_mu(alpha, r)
    return lm if log else np.exp(lm)


# ---------------------------------------------------------------------------
# Full model and JSON descriptor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    nonlinearity: NonlinearitySpec
    flow: FlowProfileSpec

    @property
    def K(self) -> float:
        return self.nonlinearity.K

    def to_dict(self) -> dict:
        d = {"nonlinearity": self.nonlinearity.to_dict()}
        d.update(self.flow.to_dict())
        return d


_NUM = {"type": "number"}
_NUM_ARRAY = {"type": "array", "items": _NUM, "minItems": 2}

MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["nonlinearity"],
    "properties": {
        "nonlinearity": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "exp"}}},
                {"type": "object", "additionalProperties": False, "required": ["kind", "p"],
                 "properties": {"kind": {"const": "power"}, "p": _NUM}},
                {"type": "object", "additionalProperties": False,
                 "required": ["kind", "s", "f", "fp", "tail_exponent"],
                 "properties": {"kind": {"const": "custom"}, "s": _NUM_ARRAY, "f": _NUM_ARRAY,
                                "fp": _NUM_ARRAY, "fpp": _NUM_ARRAY, "tail_exponent": _NUM}},
            ]
        },
        "phi": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["kind", "a"],
                 "properties": {"kind": {"const": "gaussian"}, "a": _NUM}},
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"enum": ["schlichting", "constant"]}}},
                {"type": "object", "additionalProperties": False, "required": ["kind", "r", "values"],
                 "properties": {"kind": {"const": "custom"}, "r": _NUM_ARRAY, "values": _NUM_ARRAY}},
            ]
        },
        "psi": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "power_of_phi"}, "exponent": _NUM}},
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "constant"}}},
                {"type": "object", "additionalProperties": False, "required": ["kind", "r", "values"],
                 "properties": {"kind": {"const": "custom"}, "r": _NUM_ARRAY, "values": _NUM_ARRAY}},
            ]
        },
        "sc": _NUM,
    },
}


def _profile_from(d: dict) -> Profile:
    kind = d["kind"]
    if kind == "gaussian":
        return Profile("gaussian", a=float(d["a"]))
    if kind == "custom":
        return Profile("custom", r=tuple(map(float, d["r"])), values=tuple(map(float, d["values"])))
    return Profile(kind)


def model_from_dict(desc: dict) -> ModelSpec:
    """Build a :class:`ModelSpec` from a JSON-style descriptor.

    Raises
    ------
    ConfigError
        The descriptor does not match :data:`MODEL_SCHEMA`.
    ModelValidationError
        The descriptor parses but violates a model invariant.
    """
    import jsonschema

    try:
        jsonschema.validate(desc, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid model descriptor: {exc.message}") from exc
    nd = desc["nonlinearity"]
    if nd["kind"] == "exp":
        nl = NonlinearitySpec.exponential()
    elif nd["kind"] == "power":
        nl = NonlinearitySpec.power(nd["p"])
    else:
        nl = NonlinearitySpec("custom", s=tuple(nd["s"]), f=tuple(nd["f"]), fp=tuple(nd["fp"]),
                              tail_exponent=float(nd["tail_exponent"]),
                              fpp=tuple(nd["fpp"]) if "fpp" in nd else None)
    phi = _profile_from(desc.get("phi", {"kind": "constant"}))
    psi_d = desc.get("psi", {"kind": "power_of_phi"})
    sc = float(desc.get("sc", 0.75))
    if psi_d["kind"] == "power_of_phi":
        flow = FlowProfileSpec(phi, None, sc=sc, psi_exponent=psi_d.get("exponent"))
    else:
        flow = FlowProfileSpec(phi, _profile_from(psi_d), sc=sc)
    return ModelSpec(nl, flow)


def load_model(path) -> ModelSpec:
    """Read a JSON model descriptor from ``path``."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read model file {path}: {exc}") from exc
    if not text.strip():
        raise ConfigError(f"model file {path} is empty")
    try:
        desc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file {path} is not valid JSON: {exc}") from exc
    return model_from_dict(desc)


def exp_model() -> ModelSpec:
    """``f = e^u`` with uniform flow ``phi = psi = 1``."""
    return ModelSpec(NonlinearitySpec.exponential(),
                     FlowProfileSpec(Profile("constant"), Profile("constant")))


def power_model(p: float = 2.0) -> ModelSpec:
    """``f = (1 + u)^p`` with uniform flow ``phi = psi = 1``."""
    return ModelSpec(NonlinearitySpec.power(p),
                     FlowProfileSpec(Profile("constant"), Profile("constant")))


def gaussian_jet_model(a: float = 4.0, sc: float = 0.75, nonlinearity=None) -> ModelSpec:
    """Gaussian jet ``phi = exp(-a r^2)``, ``psi = phi^(2 Sc)``."""
    nl = nonlinearity or NonlinearitySpec.exponential()
    return ModelSpec(nl, FlowProfileSpec(Profile("gaussian", a=a), None, sc=sc))
