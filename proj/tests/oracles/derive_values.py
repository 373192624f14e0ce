"""Independent numpy oracle for the frozen reference values in the C++ tests.

Run with `python3 tests/oracles/derive_values.py`; the printed numbers are
pasted into tests/*.cpp as literals. Nothing here imports the C++ library.
"""
import numpy as np

I = np.eye(2)
X = np.array([[0, 1], [1, 0]])
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1])


def amplitude_damping(lam):
    return [np.array([[1, 0], [0, np.sqrt(1 - lam)]]), np.array([[0, np.sqrt(lam)], [0, 0]])]


def dephasing(mu):
    return [np.sqrt(1 - mu) * I, np.sqrt(mu) * np.diag([1, 0]), np.sqrt(mu) * np.diag([0, 1])]


def depolarizing(kappa):
    return [np.sqrt(1 - kappa) * I] + [np.sqrt(kappa / 3) * P for P in (X, Y, Z)]


def apply(rho, left, right):
    return sum(np.kron(a, b) @ rho @ np.kron(a, b).conj().T for a in left for b in right)


psi_plus = np.array([0, 1, 1, 0]) / np.sqrt(2)
bell = np.outer(psi_plus, psi_plus).astype(complex)


def xparams(rho):
    return dict(a=rho[0, 0].real, g=rho[1, 1].real, f=rho[2, 2].real, h=rho[3, 3].real,
                w=rho[2, 1], z=rho[3, 0])


def astro(Va, Vp):
    r = np.zeros((4, 4), complex)
    r[1, 1] = r[2, 2] = 0.5
    r[1, 2] = 0.5 * Va * np.exp(1j * Vp)
    r[2, 1] = np.conj(r[1, 2])
    return r


def xstate(a, g, f, h, wa, wp, za=0.0, zp=0.0):
    r = np.diag([a, g, f, h]).astype(complex)
    r[1, 2] = wa * np.exp(-1j * wp)
    r[2, 1] = np.conj(r[1, 2])
    r[0, 3] = za * np.exp(-1j * zp)
    r[3, 0] = np.conj(r[0, 3])
    return r


def port(sign):
    # local (A, X) pair, index 2 n_A + n_X
    v = np.zeros(4)
    v[2] = 1
    v[1] = sign
    v /= np.sqrt(2)
    return np.outer(v, v)


def coincidences(rho_a, rho_x):
    # network state transposed; right beam splitter mirrored
    rho = np.kron(rho_a, rho_x.T).reshape([2] * 8)
    rho = rho.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)
    p = {}
    for s1 in (1, -1):
        for s2 in (1, -1):
            p[(s1, s2)] = np.trace(np.kron(port(s1), port(-s2)) @ rho).real
    return p[(1, 1)] + p[(-1, -1)], p[(1, -1)] + p[(-1, 1)]


def dirty_peaks(sep, lam, bmax, count, grid):
    b = np.concatenate([[0.0], bmax * np.arange(1, count + 1) / count])
    v = np.cos(np.pi * b * sep / lam)
    w = np.empty_like(b)
    w[0] = b[1]
    w[1:-1] = 0.5 * (b[2:] - b[:-2])
    w[-1] = 0.5 * (b[-1] - b[-2])
    img = np.array([w[0] + np.sum(w[1:] * 2 * v[1:] * np.cos(2 * np.pi * b[1:] * t / lam)) for t in grid])
    img /= img.sum()
    idx = [j for j in range(1, len(img) - 1)
           if img[j] >= 0.5 * img.max() and img[j] > img[j - 1] and img[j] >= img[j + 1]]
    return grid[idx]


np.set_printoptions(precision=17)
print("depolarizing (0.7, 0.2):", xparams(apply(bell, depolarizing(0.7), depolarizing(0.2))))
print("amplitude damping (0.3, 0.6):", xparams(apply(bell, amplitude_damping(0.3), amplitude_damping(0.6))))
print("dephasing (0.2, 0.7):", xparams(apply(bell, dephasing(0.2), dephasing(0.7))))

print("coincidences A(0.6,1.1) X(g=.4,f=.35,w=.3@.4):",
      coincidences(astro(0.6, 1.1), xstate(0.1, 0.4, 0.35, 0.15, 0.3, 0.4, 0.1, -0.7)))

for bl in (10.0, np.log(100.0)):
    u = np.exp(-bl / 2)
    k = 1 - u
    x = 2 * k / 3 - 4 * k * k / 9
    exact = np.log((1 - 2 * x) / 2)
    approx = np.log(0.5) + np.log(5 / 9) - 0.8 * u
    print(f"depolarizing rate bl={bl!r}: exact ln {exact!r} approx ln {approx!r} diff {abs(exact - approx)!r}")

sep, lam = 0.01, 1.0
grid = np.linspace(-2 * sep, 2 * sep, 81)
for factor in (0.5, 2.0, 4.0):
    print(f"dirty peaks at {factor}x threshold:", dirty_peaks(sep, lam, factor * lam / (2 * sep), 64, grid))
