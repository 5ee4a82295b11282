"""Independent numerical references used by the test-suite.

Integrals over Cartesian Gaussians are evaluated by brute-force quadrature:
Gauss-Hermite in every Cartesian direction (exact for polynomial times
Gaussian once the quadratic form is diagonalised) and, for Coulomb-type
operators, the representation 1/r = 2/sqrt(pi) int_0^inf exp(-u^2 r^2) du
integrated with Gauss-Legendre after the change of variables
u = sqrt(rho) t / sqrt(1 - t^2). No Hermite expansion, recursion or Boys
function is involved.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

GH_X, GH_W = np.polynomial.hermite.hermgauss(12)
GL_X, GL_W = np.polynomial.legendre.leggauss(96)
T_NODES = 0.5 * (GL_X + 1.0)
T_WEIGHTS = 0.5 * GL_W


def _dfact(n):
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def cart(l):
    return [(l - i, i - j, j) for i in range(l + 1) for j in range(i + 1)]


def _gauss1d(i, j, a, b, A, B, u2=0.0, C=0.0, deriv=False):
    """int (x-A)^i (x-B)^j exp(-a(x-A)^2 - b(x-B)^2 - u2 (x-C)^2) dx by Gauss-Hermite.
    With deriv=True the second derivative acts on the (x-B)^j exp(-b(x-B)^2) factor."""
    g = a + b + u2
    m = (a * A + b * B + u2 * C) / g
    const = a * A * A + b * B * B + u2 * C * C - g * m * m
    x = m + GH_X / np.sqrt(g)
    f = (x - A) ** i
    xb = x - B
    if deriv:
        f = f * (j * (j - 1) * xb ** max(j - 2, 0) * (j >= 2)
                 - 2 * b * (2 * j + 1) * xb ** j + 4 * b * b * xb ** (j + 2))
    else:
        f = f * xb ** j
    return np.exp(-const) / np.sqrt(g) * np.dot(GH_W, f)


def _gauss2d(i, j, k, l, a, b, c, d, A, B, C, D, u2):
    """int int (x1-A)^i (x1-B)^j (x2-C)^k (x2-D)^l
       exp(-a(x1-A)^2 - b(x1-B)^2 - c(x2-C)^2 - d(x2-D)^2 - u2 (x1-x2)^2) dx1 dx2

    vectorised over an array of u2 values."""
    u2 = np.atleast_1d(u2)
    p, q = a + b, c + d
    M = np.zeros(u2.shape + (2, 2))
    M[:, 0, 0], M[:, 1, 1] = p + u2, q + u2
    M[:, 0, 1] = M[:, 1, 0] = -u2
    lin = np.array([a * A + b * B, c * C + d * D])
    m = np.linalg.solve(M, np.broadcast_to(lin, u2.shape + (2,))[..., None])[..., 0]
    const = a * A * A + b * B * B + c * C * C + d * D * D - m @ lin
    w, V = np.linalg.eigh(M)
    T = V / np.sqrt(w)[:, None, :]          # x = m + T y, weight exp(-|y|^2)
    Y = np.stack(np.meshgrid(GH_X, GH_X, indexing="ij")).reshape(2, -1)
    W = np.outer(GH_W, GH_W).ravel()
    x = m[:, :, None] + T @ Y               # (nu, 2, nodes)
    f = (x[:, 0] - A) ** i * (x[:, 0] - B) ** j * (x[:, 1] - C) ** k * (x[:, 1] - D) ** l
    return np.exp(-const) / np.sqrt(np.prod(w, axis=1)) * (f @ W)


def _norm(l, a):
    """Prefactor making every Cartesian component (lx,ly,lz) unit-normalised."""
    out = []
    for c in cart(l):
        s = np.prod([_gauss1d(2 * ci, 0, 2 * a, 0.0, 0.0, 0.0) for ci in c])
        out.append(1.0 / np.sqrt(s))
    return np.array(out)


def overlap_prim(la, a, A, lb, b, B):
    out = np.zeros((len(cart(la)), len(cart(lb))))
    for i, ca in enumerate(cart(la)):
        for j, cb in enumerate(cart(lb)):
            out[i, j] = np.prod([_gauss1d(ca[d], cb[d], a, b, A[d], B[d]) for d in range(3)])
    return out * np.outer(_norm(la, a), _norm(lb, b))


def kinetic_prim(la, a, A, lb, b, B):
    out = np.zeros((len(cart(la)), len(cart(lb))))
    for i, ca in enumerate(cart(la)):
        for j, cb in enumerate(cart(lb)):
            s = [_gauss1d(ca[d], cb[d], a, b, A[d], B[d]) for d in range(3)]
            t = [_gauss1d(ca[d], cb[d], a, b, A[d], B[d], deriv=True) for d in range(3)]
            out[i, j] = -0.5 * (t[0] * s[1] * s[2] + s[0] * t[1] * s[2] + s[0] * s[1] * t[2])
    return out * np.outer(_norm(la, a), _norm(lb, b))


def nuclear_prim(la, a, A, lb, b, B, C):
    """<a| 1/|r - C| |b> (attraction without the -Z prefactor)."""
    p = a + b
    out = np.zeros((len(cart(la)), len(cart(lb))))
    for t, wt in zip(T_NODES, T_WEIGHTS):
        u2 = p * t * t / (1 - t * t)
        jac = np.sqrt(p) * (1 - t * t) ** -1.5
        for i, ca in enumerate(cart(la)):
            for j, cb in enumerate(cart(lb)):
                val = np.prod([_gauss1d(ca[d], cb[d], a, b, A[d], B[d], u2, C[d])
                               for d in range(3)])
                out[i, j] += wt * jac * val
    return 2 / np.sqrt(np.pi) * out * np.outer(_norm(la, a), _norm(lb, b))


def eri_prim(shells):
    """(ab|cd) for four primitive shells given as (l, alpha, centre)."""
    (la, a, A), (lb, b, B), (lc, c, C), (ld, d, D) = shells
    p, q = a + b, c + d
    rho = p * q / (p + q)
    u2 = rho * T_NODES ** 2 / (1 - T_NODES ** 2)
    wt = T_WEIGHTS * np.sqrt(rho) * (1 - T_NODES ** 2) ** -1.5
    tab = np.zeros((3, la + 1, lb + 1, lc + 1, ld + 1, len(u2)))
    for dim in range(3):
        for i in range(la + 1):
            for j in range(lb + 1):
                for k in range(lc + 1):
                    for l in range(ld + 1):
                        tab[dim, i, j, k, l] = _gauss2d(i, j, k, l, a, b, c, d, A[dim], B[dim],
                                                        C[dim], D[dim], u2)
    ca, cb, cc, cd = cart(la), cart(lb), cart(lc), cart(ld)
    out = np.zeros((len(ca), len(cb), len(cc), len(cd)))
    for ia, xa in enumerate(ca):
        for ib, xb in enumerate(cb):
            for ic, xc in enumerate(cc):
                for id_, xd in enumerate(cd):
                    f = np.prod([tab[k, xa[k], xb[k], xc[k], xd[k]] for k in range(3)], axis=0)
                    out[ia, ib, ic, id_] = wt @ f
    norms = [_norm(la, a), _norm(lb, b), _norm(lc, c), _norm(ld, d)]
    return 2 / np.sqrt(np.pi) * np.einsum("abcd,a,b,c,d->abcd", out, *norms)


# ----------------------------------------------------------- Fock-space oracle

def fock_operators(norb):
    """Dense a+_i (spin-orbital i, alpha-then-beta ordering) on 2^(2 norb) states.

    Mode k <-> bit k; the JW sign counts occupied modes below k. This is a
    deliberately different layout from the package's interleaved register.
    """
    n = 2 * norb
    dim = 1 << n
    ops = []
    for k in range(n):
        M = np.zeros((dim, dim))
        for s in range(dim):
            if not s >> k & 1:
                sign = (-1) ** bin(s & ((1 << k) - 1)).count("1")
                M[s | 1 << k, s] = sign
        ops.append(M)
    return ops


def brute_rdms(norb, nalpha, nbeta, ci):
    """Spin-summed RDMs of a determinant expansion by dense operator algebra.

    *ci[ia, ib]* multiplies a+_{alpha string} a+_{beta string} |0>, alpha
    creators to the left, orbitals ascending inside each string.
    """
    ops = fock_operators(norb)
    dim = 1 << (2 * norb)
    vac = np.zeros(dim)
    vac[0] = 1.0
    alphas = list(combinations(range(norb), nalpha))
    betas = list(combinations(range(norb), nbeta))
    psi = np.zeros(dim)
    for ia, sa in enumerate(alphas):
        for ib, sb in enumerate(betas):
            v = vac.copy()
            for o in reversed(sb):
                v = ops[norb + o] @ v
            for o in reversed(sa):
                v = ops[o] @ v
            psi += ci[ia, ib] * v
    cre = ops
    ann = [o.T for o in ops]
    n = norb
    gamma = np.zeros((n, n))
    Gamma = np.zeros((n, n, n, n))
    for p in range(n):
        for q in range(n):
            for s in (0, 1):
                gamma[p, q] += psi @ cre[p + s * n] @ ann[q + s * n] @ psi
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for t in range(n):
                    acc = 0.0
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            acc += psi @ (cre[p + s1 * n] @ cre[q + s2 * n]
                                          @ ann[t + s2 * n] @ ann[r + s1 * n]) @ psi
                    Gamma[p, q, r, t] = acc
    return gamma, Gamma


def dense_hamiltonian(h, v, norb):
    """Second-quantised H on the full Fock space, built from dense operators."""
    ops = fock_operators(norb)
    cre = ops
    ann = [o.T for o in ops]
    dim = 1 << (2 * norb)
    H = np.zeros((dim, dim))
    n = norb
    for p in range(n):
        for q in range(n):
            for s in (0, 1):
                H += h[p, q] * cre[p + s * n] @ ann[q + s * n]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for t in range(n):
                    if v[p, q, r, t] == 0.0:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            H += 0.5 * v[p, q, r, t] * (cre[p + s1 * n] @ cre[r + s2 * n]
                                                        @ ann[t + s2 * n] @ ann[q + s1 * n])
    return H


def dense_fci(h, v, norb, n_alpha, n_beta):
    """Lowest eigenvalue in the (n_alpha, n_beta) sector of the dense Fock-space H."""
    H = dense_hamiltonian(h, v, norb)
    idx = np.arange(1 << (2 * norb))
    amask = (1 << norb) - 1
    na = np.array([bin(i & amask).count("1") for i in idx])
    nb = np.array([bin(i >> norb).count("1") for i in idx])
    keep = (na == n_alpha) & (nb == n_beta)
    return np.linalg.eigvalsh(H[np.ix_(keep, keep)])[0]
