"""Hand-evaluated exponent instances covering every phase.

Each row: (d, tau, alpha, sigma) and the expected fields.  Values were worked
out by hand from the closed-form expressions; -inf marks an absent connection
type and None an exponent that is not defined for the parameters.
"""
import math

INF = math.inf

TABLE = [
    # low-low dominated, constant marks
    ((1, INF, 1.5, 0.0), dict(zeta_ll=0.5, zeta_hl=-INF, zeta_hh=-INF, zeta_short=0.0, zeta_long=0.5,
                              zeta_star=0.5, multiplicity=1, gamma_hl=1 / 3, eta_ll=2 / 3,
                              gamma_ll=None, gamma_hh=None, eta_hl=None, eta_hh=None)),
    # high-high strongest long type, surface tension dominant
    ((2, 2.5, 2.0, 1.0), dict(zeta_hl=0.25, gamma_hh=0.4, zeta_hh=0.4, zeta_ll=0.0, zeta_short=0.5,
                              zeta_long=0.4, zeta_star=0.5, multiplicity=1, gamma_hl=0.5, gamma_ll=2 / 3,
                              eta_hl=0.625, eta_ll=0.5, eta_hh=0.6)),
    # threshold GIRG, (3 - tau)/2 at sigma = 1
    ((1, 2.5, INF, 1.0), dict(zeta_hh=0.25, zeta_star=0.25, zeta_long=0.25, zeta_ll=-INF, zeta_short=0.0,
                              gamma_hh=0.5, gamma_hl=1.0, eta_ll=0.0, eta_hl=1.0, eta_hh=0.5, multiplicity=1)),
    # two-way tie between surface and low-low
    ((2, INF, 1.5, 0.0), dict(zeta_ll=0.5, zeta_short=0.5, zeta_star=0.5, multiplicity=2)),
    # tau = sigma + 2 continuity points
    ((1, 3.0, 2.0, 1.0), dict(gamma_hh=0.5, zeta_hh=0.0, zeta_hl=0.0, zeta_ll=0.0, zeta_short=0.0,
                              zeta_star=0.0, multiplicity=4)),
    ((2, 2.5, 3.0, 0.5), dict(gamma_hh=2 / 3, zeta_hh=0.0, zeta_hl=0.0, zeta_ll=-1.0, zeta_short=0.5,
                              zeta_long=0.0, zeta_star=0.5, multiplicity=1, gamma_ll=4 / 3)),
    ((3, 4.0, 1.5, 2.0), dict(gamma_hh=1 / 3, zeta_hh=0.0, zeta_hl=0.0, zeta_ll=0.5, zeta_short=2 / 3,
                              zeta_long=0.5, zeta_star=2 / 3, multiplicity=1, gamma_ll=1 / 6)),
    # tau = inf and alpha = inf sentinels
    ((1, INF, INF, 0.0), dict(zeta_ll=-INF, zeta_hl=-INF, zeta_hh=-INF, zeta_short=0.0, zeta_long=0.0,
                              zeta_star=0.0, multiplicity=1, gamma_hl=1.0, eta_ll=0.0,
                              gamma_ll=None, gamma_hh=None, eta_hl=None, eta_hh=None)),
    ((2, INF, INF, 0.0), dict(zeta_short=0.5, zeta_long=0.0, zeta_star=0.5, multiplicity=1)),
    # tau > sigma + 2 branch at alpha = inf
    ((1, 2.2, INF, 0.0), dict(gamma_hh=1.0, zeta_hh=-0.2, zeta_long=0.0, zeta_star=0.0, multiplicity=1)),
    # tau > sigma + 2 branch, low-low dominant
    ((1, 2.5, 1.25, 0.0), dict(gamma_hh=1.0, zeta_hh=-0.5, zeta_hl=0.7, zeta_ll=0.75, zeta_star=0.75,
                               multiplicity=1, gamma_ll=1 / 6, eta_hl=0.76)),
    # all three long types close together
    ((1, 2.2, 1.1, 1.0), dict(gamma_hh=0.1, zeta_hh=0.88, zeta_hl=1.2 / 1.1 - 0.2, zeta_ll=0.9, zeta_star=0.9,
                              multiplicity=1, gamma_ll=1 / 12)),
]


def params_for(d, tau, alpha, sigma):
    from ksrg.params import ModelParams
    return ModelParams(d=d, tau=tau, alpha=alpha, sigma=sigma,
                       profile="threshold" if math.isinf(alpha) else "polynomial")


def mismatches(report, expected, tol=1e-12):
    bad = []
    for key, want in expected.items():
        got = getattr(report, key)
        if want is None or got is None:
            ok = want is got
        elif isinstance(want, float) and math.isinf(want):
            ok = got == want
        else:
            ok = abs(got - want) <= tol
        if not ok:
            bad.append((key, got, want))
    return bad
