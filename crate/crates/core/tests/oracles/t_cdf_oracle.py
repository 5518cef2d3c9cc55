"""Reference values for the Student-t CDF at 50 significant digits.

Each value is obtained by adaptive quadrature of the t density in mpmath,
independent of any incomplete-beta code. Regenerate with:

    python3 t_cdf_oracle.py > ../data/t_cdf_oracle.csv
"""
import random

import mpmath as mp

mp.mp.dps = 50


def t_cdf(x, nu):
    x = mp.mpf(x)
    nu = mp.mpf(nu)
    log_norm = mp.loggamma((nu + 1) / 2) - mp.loggamma(nu / 2) - mp.log(nu * mp.pi) / 2
    dens = lambda t: mp.exp(log_norm - (nu + 1) / 2 * mp.log1p(t * t / nu))
    if x <= 0:
        return mp.quad(dens, [-mp.inf, x])
    return mp.mpf(1) / 2 + mp.quad(dens, [0, x])


def main():
    rng = random.Random(20161015)
    points = [(1.372, 10.0), (0.0, 3.0), (1.0, 1.0), (-2.5, 0.7), (3.8, 97.0)]
    while len(points) < 1000:
        nu = 10 ** rng.uniform(-0.5, 5.0)
        spread = 6.0 if nu > 2 else 40.0
        x = rng.uniform(-spread, spread)
        points.append((round(x, 6), round(nu, 6)))
    print("x,dof,cdf")
    for x, nu in points:
        print(f"{x!r},{nu!r},{mp.nstr(t_cdf(x, nu), 25)}")


if __name__ == "__main__":
    main()
