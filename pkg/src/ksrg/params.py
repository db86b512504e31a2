"""Model parameters and the closed-form phase exponents.

Extended reals are plain ``float`` values internally (``math.inf``); use
:func:`ext_to_json` when writing them out.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .errors import InconsistentParametersError, ParameterDomainError

INF = math.inf
TIE_TOL = 1e-9

KERNELS = ("interpolation", "sum")
PROFILES = ("threshold", "polynomial")
VERTEX_PROCESSES = ("ppp", "lattice")
CONNECTION_TYPES = ("short", "ll", "hl", "hh")


@dataclass(frozen=True)
class ModelParams:
    d: int = 1
    tau: float = INF
    alpha: float = INF
    kernel: str = "interpolation"
    sigma: float = 0.0
    beta: float = 1.0
    p: float = 1.0
    profile: str = "threshold"
    vertex_process: str = "ppp"

    @property
    def marks_constant(self) -> bool:
        return math.isinf(self.tau)

    @property
    def threshold(self) -> bool:
        return self.profile == "threshold"

    @property
    def effective_sigma(self) -> float:
        # the sum kernel is treated as sigma = 0 in every exponent formula
        return 0.0 if self.kernel == "sum" else float(self.sigma)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["tau"] = ext_to_json(self.tau)
        out["alpha"] = ext_to_json(self.alpha)
        return out


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if it satisfies every model constraint."""
    d, tau, alpha = params.d, params.tau, params.alpha
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParameterDomainError(f"dimension d must be an integer >= 1, got {d!r}")
    if math.isnan(tau) or (not math.isinf(tau) and tau <= 2) or tau == -INF:
        raise ParameterDomainError(f"tau must satisfy tau > 2 or tau = inf, got {tau}")
    if math.isnan(alpha) or (not math.isinf(alpha) and alpha <= 1) or alpha == -INF:
        raise ParameterDomainError(f"alpha must satisfy alpha > 1 or alpha = inf, got {alpha}")
    if params.kernel not in KERNELS:
        raise ParameterDomainError(f"unknown kernel {params.kernel!r}")
    if params.profile not in PROFILES:
        raise ParameterDomainError(f"unknown profile {params.profile!r}")
    if params.vertex_process not in VERTEX_PROCESSES:
        raise ParameterDomainError(f"unknown vertex process {params.vertex_process!r}")
    if not math.isfinite(params.sigma) or params.sigma < 0:
        raise ParameterDomainError(f"sigma must be a finite real >= 0, got {params.sigma}")
    if not math.isfinite(params.beta) or params.beta <= 0:
        raise ParameterDomainError(f"beta must be > 0, got {params.beta}")
    if not (0 < params.p <= 1):
        raise ParameterDomainError(f"p must lie in (0, 1], got {params.p}")
    if (params.profile == "threshold") != math.isinf(alpha):
        raise InconsistentParametersError(
            f"profile={params.profile!r} is incompatible with alpha={alpha}: "
            "the threshold profile is encoded as alpha = inf"
        )
    return params


@dataclass(frozen=True)
class ExponentReport:
    zeta_short: float
    zeta_ll: float
    zeta_hl: float
    zeta_hh: float
    zeta_long: float
    zeta_star: float
    gamma_ll: float | None
    gamma_hl: float | None
    gamma_hh: float | None
    eta_ll: float | None
    eta_hl: float | None
    eta_hh: float | None
    multiplicity: int
    dominant_types: tuple[str, ...]
    # growth exponent of the long-edge edge boundary, 2 - delta_eff
    two_minus_delta_eff: float = -INF
    # alternative cluster-decay upper exponent when hh dominates with sigma > tau - 1
    cluster_decay_alt_exponent: float | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            elif isinstance(v, float):
                v = ext_to_json(v)
            out[f.name] = v
        return out


def ext_to_json(x):
    """Map an extended real to a JSON-safe value (infinities become strings)."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def ext_from_json(x):
    if isinstance(x, str):
        return parse_extended(x)
    return x


def parse_extended(text: str) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity", "∞"):
        return INF
    if t in ("-inf", "-infinity", "-∞"):
        return -INF
    return float(t)


def gamma_hh(tau: float, alpha: float, sigma: float) -> float:
    """Two-branch high-high mark exponent; the alpha -> inf limit is taken termwise."""
    if tau <= sigma + 2:
        if math.isinf(alpha):
            return 1.0 / (sigma + 1.0)
        return (1.0 - 1.0 / alpha) / (sigma + 1.0 - (tau - 1.0) / alpha)
    return 1.0 / (sigma + 1.0)


def _edge_boundary_exponent(tau: float, alpha: float, sigma: float) -> float:
    """Growth exponent of the expected long-edge edge boundary (mark-scale optimisation).

    Marks are written as n^a, n^b with a, b in [0, 1/(tau-1)]; the count of edges
    between the two mark classes across distance n^(1/d) grows like
    n^(2 - (tau-1)(a+b) + alpha*min(0, max(a,b) + sigma*min(a,b) - 1)).
    The objective is concave and piecewise linear, so the maximum sits at a
    vertex of the subdivided triangle b <= a <= 1/(tau-1).
    """
    if math.isinf(tau):
        return -INF if math.isinf(alpha) else 2.0 - alpha
    top = 1.0 / (tau - 1.0)
    pts = [(0.0, 0.0), (top, 0.0), (top, top)]
    if 1.0 <= top:
        pts.append((1.0, 0.0))
    if sigma > 0:
        b = (1.0 - top) / sigma
        if 0.0 <= b <= top:
            pts.append((top, b))
    diag = 1.0 / (1.0 + sigma)
    if diag <= top:
        pts.append((diag, diag))
    best = -INF
    for a, b in pts:
        reach = a + sigma * b - 1.0
        if math.isinf(alpha):
            if reach < -1e-12:
                continue
            val = 2.0 - (tau - 1.0) * (a + b)
        else:
            val = 2.0 - (tau - 1.0) * (a + b) + alpha * min(0.0, reach)
        best = max(best, val)
    return best


def compute_exponents(params: ModelParams) -> ExponentReport:
    validate(params)
    d, tau, alpha = params.d, float(params.tau), float(params.alpha)
    sigma = params.effective_sigma
    tau_inf, alpha_inf = math.isinf(tau), math.isinf(alpha)

    zeta_short = (d - 1) / d
    zeta_ll = -INF if alpha_inf else 2.0 - alpha

    g_hl = 1.0 if alpha_inf else 1.0 - 1.0 / alpha
    if tau_inf:
        zeta_hl = -INF
    elif alpha_inf:
        zeta_hl = 2.0 - tau
    else:
        zeta_hl = (tau - 1.0) / alpha - (tau - 2.0)

    if tau_inf:
        g_hh = None
        zeta_hh = -INF
    else:
        g_hh = gamma_hh(tau, alpha, sigma)
        zeta_hh = 1.0 - g_hh * (tau - 1.0)

    g_ll = None if (tau_inf or alpha_inf) else (alpha - 1.0) / (tau - 1.0)
    eta_ll = 0.0 if alpha_inf else 1.0 / alpha
    if tau_inf:
        eta_hl = None
    else:
        eta_hl = 1.0 if alpha_inf else 1.0 - g_hl * (tau - 1.0) / alpha
    eta_hh = None if g_hh is None else 1.0 - sigma * g_hh

    zeta_long = max(0.0, zeta_ll, zeta_hl, zeta_hh)
    zeta_star = max(zeta_short, zeta_long)

    values = dict(zip(CONNECTION_TYPES, (zeta_short, zeta_ll, zeta_hl, zeta_hh)))
    top = max(values.values())
    dominant = tuple(k for k, v in values.items() if abs(v - top) <= TIE_TOL)

    alt = None
    if (not tau_inf and zeta_long > 0 and abs(zeta_long - zeta_hh) <= TIE_TOL
            and sigma > tau - 1.0):
        alt = 1.0 / (sigma + 1.0 - (0.0 if alpha_inf else (tau - 1.0) / alpha))

    warns = []
    if len(dominant) > 1:
        warns.append(
            f"phase boundary: {len(dominant)} connection types share the maximal "
            "exponent; polylogarithmic corrections are not fitted"
        )
    if zeta_long <= 0:
        warns.append("zeta_long <= 0: the long-edge scaling results do not apply")

    return ExponentReport(
        zeta_short=zeta_short,
        zeta_ll=zeta_ll,
        zeta_hl=zeta_hl,
        zeta_hh=zeta_hh,
        zeta_long=zeta_long,
        zeta_star=zeta_star,
        gamma_ll=g_ll,
        gamma_hl=g_hl,
        gamma_hh=g_hh,
        eta_ll=eta_ll,
        eta_hl=eta_hl,
        eta_hh=eta_hh,
        multiplicity=len(dominant),
        dominant_types=dominant,
        two_minus_delta_eff=_edge_boundary_exponent(tau, alpha, sigma),
        cluster_decay_alt_exponent=alt,
        warnings=tuple(warns),
    )
