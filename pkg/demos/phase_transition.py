"""Scalar phase transitions: optimizer scans, theta_c, and the uniqueness field."""

import numpy as np

from multigibbs import (
    critical_theta,
    ising_pm1,
    quadratic_case,
    scalar_maximizers,
    three_point,
    uniqueness_field,
)


def scan(mu, name, thetas, v=2):
    print(f"\n== {name}, v = {v}")
    print(f"{'theta':>8} {'#opt':>5}  optimizers")
    for theta in thetas:
        rep = scalar_maximizers(mu, theta, 0.0, v)
        opts = ", ".join(f"{t:+.6f}" for t in sorted(rep.optimizers))
        print(f"{theta:8.3f} {len(rep.optimizers):5d}  {opts}")


def main():
    mu = ising_pm1()
    scan(mu, "fair coin", [0.2, 0.4, 0.5, 0.6, 0.8, 1.0])
    tc = critical_theta(mu, 2)
    print(f"theta_c (bisection) = {tc:.8f}   [tanh threshold: 0.5]")

    mu3 = three_point(0.5)
    scan(mu3, "three-point (1/4,1/2,1/4)", [0.8, 0.95, 1.05, 1.3])
    print(f"theta_c = {critical_theta(mu3, 2):.8f}   [1/(2 alpha''(0)) = 1.0]")
    print("quadratic trichotomy at theta = 1.05:", quadratic_case(mu3, 1.05).case)

    # quartic interaction: the transition is first order
    scan(mu, "fair coin", [0.4, 0.6, 0.688, 0.69, 0.8], v=4)
    tc4 = critical_theta(mu, 4)
    print(f"theta_c for v = 4: {tc4:.8f} (maximizer jumps discontinuously)")

    b0, table = uniqueness_field(mu, 1.0, 2, np.round(np.arange(0.0, 0.2001, 0.02), 10))
    print(f"\nuniqueness field at theta = 1: B0 = {b0}")
    for b, count, best in table[:5]:
        print(f"  B = {b:.2f}: {count} maximizer(s), best {best:+.6f}")


if __name__ == "__main__":
    main()
