"""Reference even-level energies of the delta-barrier well (L = 2, hbar = m = 1).

Solves tan(kL/2) = -k/g (and tanh(qL/2) = -q/g for a bound state) with
mpmath at 40 digits. This is a different form of the quantization condition
from the one used by the library solver. Run to regenerate the frozen values
in test_spectrum.py.
"""
import mpmath as mp

mp.mp.dps = 40
L = mp.mpf(2)


def even_levels(g, count):
    g = mp.mpf(g)
    out = []
    for j in range(count):
        if g > 0:
            lo, hi = (j + mp.mpf(1) / 2) * mp.pi, (j + 1) * mp.pi
        elif j > 0:
            lo, hi = j * mp.pi, (j + mp.mpf(1) / 2) * mp.pi
        else:
            lo, hi = mp.mpf(10) ** -30, mp.pi / 2
        if g < 0 and j == 0 and -g > 2 / L:
            # bound state: tanh(phi) = -2 phi / (g L), phi = q L / 2
            f = lambda p: mp.tanh(p) + 2 * p / (g * L)  # noqa: E731
            phi = mp.findroot(f, (mp.mpf(10) ** -30, -g * L / 2), solver="anderson")
            out.append(-((2 * phi / L) ** 2) / 2)
            continue
        # theta = kL/2:  tan(theta) = -2 theta / (g L)
        f = lambda t: mp.sin(t) * g * L + 2 * t * mp.cos(t)  # noqa: E731
        theta = mp.findroot(f, (lo, hi), solver="anderson")
        out.append((2 * theta / L) ** 2 / 2)
    return out


if __name__ == "__main__":
    for g in (1, -1, 10, -5, 1e6):
        print(g, [mp.nstr(e, 20) for e in even_levels(g, 3)])
