"""Reference values for the Clayton-copula AFT loss.

Evaluates the loss straight from its closed form in 50-digit arithmetic and
differentiates it numerically with mpmath, so nothing is shared with the C++
derivation. Prints C++ initializer rows frozen into tests/unit/test_loss.cpp.
"""
import mpmath as mp

mp.mp.dps = 50


def extreme_cdf(x):
    return 1 - mp.exp(-mp.exp(x))


def extreme_pdf(x):
    return mp.exp(x - mp.exp(x))


def clayton_loss(theta, sigma_z, sigma_v, t, delta, yhat):
    s = (mp.log(t) - yhat) / sigma_z
    r = (mp.log(t) - yhat) / sigma_v
    sz = 1 - extreme_cdf(s)
    sv = 1 - extreme_cdf(r)
    head = (1 + 1 / theta) * mp.log(sz ** (-theta) + sv ** (-theta) - 1)
    if delta == 1:
        g = (1 + theta) * mp.log(sz) - mp.log(extreme_pdf(s) / (sigma_z * t))
    else:
        g = (1 + theta) * mp.log(sv) - mp.log(extreme_pdf(r) / (sigma_v * t))
    return head + g


THETA = mp.mpf(3)
SIGMA = mp.mpf(1) / 3
GRID = [
    (mp.mpf("0.5"), 1, mp.mpf("0.0")),
    (mp.mpf("1.0"), 0, mp.mpf("0.2")),
    (mp.mpf("2.0"), 1, mp.mpf("0.5")),
    (mp.mpf("3.5"), 0, mp.mpf("1.0")),
    (mp.mpf("0.8"), 1, mp.mpf("-0.3")),
]

if __name__ == "__main__":
    for t, delta, yhat in GRID:
        f = lambda y: clayton_loss(THETA, SIGMA, SIGMA, t, delta, y)
        value = f(yhat)
        grad = mp.diff(f, yhat, 1)
        hess = mp.diff(f, yhat, 2)
        print("    {%s, %d, %s, %s, %s, %s}," % (
            mp.nstr(t, 3), delta, mp.nstr(yhat, 3),
            mp.nstr(value, 17), mp.nstr(grad, 17), mp.nstr(hess, 17)))
