"""Explicit constants, stability certificates, and eigenvalue-enclosure disks.

Conventions for certificates:

* a ``stable`` verdict always compares a rigorous upper bound
  (computed norm plus tail) against the threshold, never the bare value;
* theorems with existential constants (the qualitative tau/w_sigma
  smallness conditions) can only ever yield ``inconclusive`` -- the norm is
  reported but no threshold is invented;
* ``enclosure`` verdicts carry the two closed disks centred at
  +-m (v^2+1)/(v^2-1) with radius 2 m v / (v^2-1).
"""

from dataclasses import dataclass, field

import numpy as np

from .potential import PotentialSpec
from .weights import WeightSpec, NormResult, dyadic_norm, weighted_sup_norm

THEOREM_IDS = ("2.1", "2.2-massless", "2.2-massive", "2.3", "2.4", "2.5-j1", "2.5-j2")


@dataclass(frozen=True)
class ConstantsReport:
    """The closed-form constants for given dimension, mass and weight norms."""

    n: int
    m: float
    C1: float
    C2: float
    C3: float
    kato_yajima: float
    rho_l2linf: float
    rho_halfpower_linf: float = None


@dataclass
class DiskPair:
    """Two closed disks on the real axis confining the massive Dirac point spectrum."""

    x0_plus: float
    x0_minus: float
    r0: float
    V_j: float
    j: int
    m: float

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z - self.x0_plus) <= self.r0) | (np.abs(z - self.x0_minus) <= self.r0)


@dataclass
class Certificate:
    """Outcome of a theorem check with every number needed to re-derive it."""

    theorem: str
    verdict: str  # stable | enclosure | inconclusive
    norm: float = None
    tail_bound: float = None
    norm_upper: float = None
    constant: float = None
    threshold: float = None
    reason: str = ""
    disks: DiskPair = None
    n: int = 0
    m: float = 0.0
    params: dict = field(default_factory=dict)
    potential_hash: str = ""


def c2_constant(n) -> float:
    """576 n max(sqrt(n), (64n+324)^(1/4))."""
    return 576.0 * n * max(np.sqrt(n), (64.0 * n + 324.0) ** 0.25)


def kato_yajima_constant(n) -> float:
    """Best constant sqrt(pi / (2(n-2))) of the weighted free-resolvent bound."""
    if n < 3:
        raise ValueError(f"dimension {n} unsupported: the estimates need n >= 3")
    return float(np.sqrt(np.pi / (2.0 * (n - 2))))


def c1_constant(n, m, rho_l2linf, rho_halfpower_linf=None) -> float:
    """The stability constant of the quantitative weighted theorem.

    Massive case: 576 n [sqrt(n) + (2m+1) (64n+324)^(1/4)] |rho|^2
                  + (2m+1) sqrt(pi/(2(n-2))) | |x|^(1/2) rho |^2.
    Massless case: 2 C2(n) |rho|^2.
    """
    if n < 3:
        raise ValueError(f"dimension {n} unsupported: the estimates need n >= 3")
    if m == 0.0:
        return 2.0 * c2_constant(n) * rho_l2linf ** 2
    if rho_halfpower_linf is None:
        raise ValueError("massive case needs the | |x|^(1/2) rho |_Linf norm to be finite")
    quarter = (64.0 * n + 324.0) ** 0.25
    return (576.0 * n * (np.sqrt(n) + (2.0 * m + 1.0) * quarter) * rho_l2linf ** 2
            + (2.0 * m + 1.0) * kato_yajima_constant(n) * rho_halfpower_linf ** 2)


def c3_constant(n, rho_l2linf, rho_halfpower_linf) -> float:
    """576 n (64n+324)^(1/4) |rho|^2 + sqrt(pi/(2(n-2))) | |x|^(1/2) rho |^2."""
    return (576.0 * n * (64.0 * n + 324.0) ** 0.25 * rho_l2linf ** 2
            + kato_yajima_constant(n) * rho_halfpower_linf ** 2)


def rho_norms(rho: WeightSpec, j_range=(-40, 40)):
    """(|rho|_{ell2 Linf}, | |x|^(1/2) rho |_Linf) as NormResults."""
    l2 = dyadic_norm(None, 2, np.inf, 3, j_range=j_range, radial_profile=rho.radial)
    half = weighted_sup_norm(None, w=WeightSpec("power", exponent=0.5),
                             radial_profile=rho.radial, j_range=j_range)
    return l2, half


def eval_constants(n, m, rho=None, rho_l2linf=None, rho_halfpower_linf=None) -> ConstantsReport:
    """Closed-form arithmetic evaluation of C1, C2, C3 and the Kato-Yajima constant.

    The weight norms may be given directly (e.g. the analytic bounds 2 and 1
    for rho = (|x|^(-1/2)+|x|^(1/2))^(-1)) or computed from a WeightSpec.
    """
    if n < 3:
        raise ValueError(f"dimension {n} unsupported: the estimates need n >= 3")
    if m < 0:
        raise ValueError("mass must be nonnegative")
    if rho_l2linf is None:
        if rho is None:
            raise ValueError("need either a weight or its precomputed norms")
        l2, half = rho_norms(rho)
        rho_l2linf = l2.rigorous_upper()
        rho_halfpower_linf = half.rigorous_upper()
    C2 = c2_constant(n)
    C1 = c1_constant(n, m, rho_l2linf, rho_halfpower_linf)
    C3 = (c3_constant(n, rho_l2linf, rho_halfpower_linf)
          if rho_halfpower_linf is not None else None)
    return ConstantsReport(n=n, m=m, C1=C1, C2=C2, C3=C3,
                           kato_yajima=kato_yajima_constant(n),
                           rho_l2linf=rho_l2linf,
                           rho_halfpower_linf=rho_halfpower_linf)


def _norm_upper(res: NormResult):
    """Rigorous upper bound, or None when the tail is unknown/divergent."""
    if res.diverged:
        return np.inf
    return res.rigorous_upper()


def _potential_profile(V: PotentialSpec):
    try:
        return V.radial_opnorm
    except Exception:
        return None


def _weighted_potential_norm(V, wfun, n, p=np.inf, q=np.inf, j_range=(-40, 40)):
    """Dyadic norm of x -> w(|x|) |V(x)|, exact radial path for presets."""
    if V.kind != "grid-sampled":
        prof = lambda r: wfun(r) * V.radial_opnorm(r)
        return dyadic_norm(None, p, q, n, j_range=j_range, radial_profile=prof)

    def f(pts):
        from .potential import pointwise_opnorm
        r = np.linalg.norm(pts, axis=-1)
        return wfun(r) * pointwise_opnorm(V, pts)

    return dyadic_norm(f, p, q, n, j_range=j_range)


def n1_norm(V: PotentialSpec, j_range=(-40, 40)) -> NormResult:
    """N_1(V) = || |x| V ||_{ell^1 L^inf}."""
    return _weighted_potential_norm(V, lambda r: r, V.n, p=1, q=np.inf, j_range=j_range)


def n2_norm(V: PotentialSpec, rho: WeightSpec, j_range=(-40, 40)):
    """N_2(V) = |rho|^2_{ell2 Linf} * || |x| rho^-2 V ||_Linf; returns (NormResult, rho_l2)."""
    l2, _ = rho_norms(rho, j_range=j_range)
    wfun = lambda r: r / rho.radial(r) ** 2
    core = _weighted_potential_norm(V, wfun, V.n, j_range=j_range)
    return core, l2


def certify(theorem, V: PotentialSpec, m=0.0, eps=0.25, sigma=2.0,
            rho: WeightSpec = None, j_range=(-40, 40)) -> Certificate:
    """Check one theorem's hypothesis against a potential.

    Quantitative theorems (2.3, 2.4) compare C * (norm + tail) with 1 and can
    return ``stable``; the qualitative smallness conditions (2.1, 2.2) have
    existential constants, so the computed norm is reported and the verdict
    is always ``inconclusive``.
    """
    if theorem not in ("2.1", "2.2-massless", "2.2-massive", "2.3", "2.4"):
        raise ValueError(f"unknown theorem id {theorem!r} (disks are produced by enclosure_disks)")
    n = V.n
    if n < 3:
        raise ValueError(f"dimension {n} unsupported: the estimates need n >= 3")
    cert = Certificate(theorem=theorem, verdict="inconclusive", n=n, m=m,
                       potential_hash=V.content_hash())

    if theorem in ("2.1", "2.2-massive"):
        tau = WeightSpec("tau", eps=eps)
        res = _weighted_potential_norm(V, lambda r: tau.radial(r) ** 2, n, j_range=j_range)
        cert.params = {"eps": eps}
        cert.norm, cert.tail_bound = res.value, res.tail_bound
        cert.norm_upper = _norm_upper(res)
        cert.reason = ("threshold alpha is existential in the qualitative theorem; "
                       "norm reported, no stability claim")
        return cert
    if theorem == "2.2-massless":
        if m != 0.0:
            raise ValueError("theorem 2.2-massless needs m = 0")
        w = WeightSpec("w_sigma", sigma=sigma)
        res = _weighted_potential_norm(V, w.radial, n, j_range=j_range)
        cert.params = {"sigma": sigma}
        cert.norm, cert.tail_bound = res.value, res.tail_bound
        cert.norm_upper = _norm_upper(res)
        cert.reason = ("threshold alpha is existential in the qualitative theorem; "
                       "norm reported, no stability claim")
        return cert

    if theorem == "2.3":
        rho = rho if rho is not None else WeightSpec("rho2", eps=0.5, delta=0.5)
        l2, half = rho_norms(rho, j_range=j_range)
        rl2, rhalf = _norm_upper(l2), _norm_upper(half)
        if m > 0 and (rhalf is None or not np.isfinite(rhalf)):
            cert.reason = "massive case needs | |x|^(1/2) rho |_Linf finite"
            return cert
        C1 = c1_constant(n, m, rl2, rhalf if m > 0 else None)
        wfun = lambda r: r / rho.radial(r) ** 2
        res = _weighted_potential_norm(V, wfun, n, j_range=j_range)
        upper = _norm_upper(res)
        cert.params = {"rho": rho.kind, "rho_l2linf": rl2, "rho_halfpower_linf": rhalf}
        cert.norm, cert.tail_bound, cert.norm_upper = res.value, res.tail_bound, upper
        cert.constant, cert.threshold = C1, 1.0 / C1
        if upper is None:
            cert.reason = "tail bound unknown; cannot certify"
        elif C1 * upper < 1.0:
            cert.verdict = "stable"
        else:
            cert.reason = "smallness condition not met; no claim either way"
        return cert

    # theorem 2.4, massless dyadic
    if m != 0.0:
        raise ValueError("theorem 2.4 needs m = 0")
    res = n1_norm(V, j_range=j_range)
    upper = _norm_upper(res)
    C2 = c2_constant(n)
    cert.norm, cert.tail_bound, cert.norm_upper = res.value, res.tail_bound, upper
    cert.constant, cert.threshold = 2.0 * C2, 1.0 / (2.0 * C2)
    if res.diverged or upper is None:
        cert.reason = "norm divergent or tail unknown; cannot certify"
    elif 2.0 * C2 * upper < 1.0:
        cert.verdict = "stable"
    else:
        cert.reason = "smallness condition not met; no claim either way"
    return cert


def disk_pair(m, Nj, j, n=3) -> DiskPair:
    """Disks for a given value of N_j(V); requires 2 C2 N_j < 1."""
    C2 = c2_constant(n)
    if not 2.0 * C2 * Nj < 1.0:
        raise ValueError(f"2*C2*N_j = {2.0 * C2 * Nj} >= 1: disks undefined")
    v = (1.0 / (C2 * Nj) - 1.0) ** 2
    x0 = m * (v ** 2 + 1.0) / (v ** 2 - 1.0)
    r0 = m * 2.0 * v / (v ** 2 - 1.0)
    return DiskPair(x0_plus=x0, x0_minus=-x0, r0=r0, V_j=v, j=j, m=m)


def enclosure_disks(V: PotentialSpec, m, j=1, rho: WeightSpec = None,
                    j_range=(-40, 40)) -> Certificate:
    """Eigenvalue-enclosure certificate for the massive Dirac operator.

    N_j includes the tail bound before the disks are formed, so a larger
    (more conservative) N_j only enlarges the disks.
    """
    if m <= 0:
        raise ValueError("enclosure disks need m > 0")
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    n = V.n
    if n < 3:
        raise ValueError(f"dimension {n} unsupported: the estimates need n >= 3")
    theorem = f"2.5-j{j}"
    cert = Certificate(theorem=theorem, verdict="inconclusive", n=n, m=m,
                       potential_hash=V.content_hash())
    if j == 1:
        res = n1_norm(V, j_range=j_range)
        upper = _norm_upper(res)
        extra = {}
    else:
        rho = rho if rho is not None else WeightSpec("rho2", eps=0.5, delta=0.5)
        core, l2 = n2_norm(V, rho, j_range=j_range)
        cu, lu = _norm_upper(core), _norm_upper(l2)
        res = core
        upper = None if (cu is None or lu is None) else lu ** 2 * cu
        extra = {"rho": rho.kind, "rho_l2linf": lu}
    C2 = c2_constant(n)
    cert.norm, cert.tail_bound, cert.norm_upper = res.value, res.tail_bound, upper
    cert.constant, cert.threshold = 2.0 * C2, 1.0 / (2.0 * C2)
    cert.params = {"N_j": upper, **extra}
    if upper is None or not np.isfinite(upper):
        cert.reason = "N_j tail unknown or divergent; cannot certify"
        return cert
    if not 2.0 * C2 * upper < 1.0:
        cert.reason = "2*C2*N_j >= 1; enclosure condition not met"
        return cert
    cert.verdict = "enclosure"
    cert.disks = disk_pair(m, upper, j, n=n)
    return cert
