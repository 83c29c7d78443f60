"""Shared fuzzing and oracle helpers for the test suite.

The acceptance suite re-runs several of these at full criterion sizes, so
they are parametrized by sample count and return violation counts instead of
asserting internally.
"""

from __future__ import annotations

import math

import numpy as np

from eigshape import intervals as iv
from eigshape.intervals import Interval, IntervalSymMatrix


def _sample(rng, a: Interval) -> float:
    u = rng.random()
    x = a.lo + u * (a.hi - a.lo)
    return min(max(x, a.lo), a.hi)


def _random_interval(rng, scale=10.0, nonneg=False) -> Interval:
    lo = rng.uniform(-scale, scale)
    w = rng.uniform(0.0, scale) * rng.random()
    if nonneg:
        lo = abs(lo)
    return Interval(lo, lo + w)


def interval_fuzz(n_ops: int, seed: int = 2023) -> int:
    """Random interval ops with point-sampled operands; returns violations."""
    rng = np.random.default_rng(seed)
    violations = 0
    ops = ("add", "sub", "mul", "div", "sqrt", "sq", "abs", "sin", "cos")
    for _ in range(n_ops):
        op = ops[rng.integers(len(ops))]
        a = _random_interval(rng)
        x = _sample(rng, a)
        if op in ("add", "sub", "mul", "div"):
            b = _random_interval(rng)
            if op == "div" and b.lo <= 0.0 <= b.hi:
                b = Interval(b.lo + 11.0, b.hi + 11.0)
            y = _sample(rng, b)
            if op == "add":
                res, pt = a + b, x + y
            elif op == "sub":
                res, pt = a - b, x - y
            elif op == "mul":
                res, pt = a * b, x * y
            else:
                res, pt = a / b, x / y
        elif op == "sqrt":
            a = _random_interval(rng, nonneg=True)
            x = _sample(rng, a)
            res, pt = a.sqrt(), math.sqrt(x)
        elif op == "sq":
            res, pt = a.sq(), x * x
        elif op == "abs":
            res, pt = abs(a), abs(x)
        elif op == "sin":
            res, pt = iv.sin(a), math.sin(x)
        else:
            res, pt = iv.cos(a), math.cos(x)
        if not res.contains(pt):
            violations += 1
    return violations


def random_sym_interval(rng, scale=5.0, width=0.5) -> IntervalSymMatrix:
    def entry():
        lo = rng.uniform(-scale, scale)
        return Interval(lo, lo + rng.uniform(0.0, width))

    return IntervalSymMatrix(entry(), entry(), entry())


def sample_point_matrix(rng, a: IntervalSymMatrix) -> np.ndarray:
    p11 = _sample(rng, a.a11)
    p12 = _sample(rng, a.a12)
    p22 = _sample(rng, a.a22)
    return np.array([[p11, p12], [p12, p22]])


def sym2_eig_fuzz(n_samples: int, seed: int = 77) -> int:
    """Eigenvalues of sampled point matrices must land in the enclosures."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(n_samples):
        a = random_sym_interval(rng)
        lo_enc, hi_enc = a.eig_bounds()
        m = sample_point_matrix(rng, a)
        w = np.linalg.eigvalsh(m)
        if not (lo_enc.contains(w[0]) and hi_enc.contains(w[1])):
            violations += 1
    return violations


def principal_sines(u: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """(delta_b, bar_delta_b) between the column spans of orthonormal u, v."""
    sig = np.linalg.svd(u.T @ v, compute_uv=False)
    smin = min(sig.min(), 1.0)
    return math.sqrt(max(0.0, 1.0 - smin * smin)), math.sqrt(max(0.0, 2.0 - 2.0 * smin))


def energy_distance(u: np.ndarray, v: np.ndarray, a_sqrt: np.ndarray) -> float:
    """delta_a between spans in the A-metric (largest principal sine)."""
    au = np.linalg.qr(a_sqrt @ u)[0]
    av = np.linalg.qr(a_sqrt @ v)[0]
    return principal_sines(au, av)[0]


def _unit_constrained_min(g: np.ndarray, b: np.ndarray) -> float:
    """min over ||d|| = 1 of d^T g d - 2 b^T d  (g SPD), by the secular
    equation of the Lagrange system (g - mu I) d = b with mu < lambda_min(g)."""
    from scipy.optimize import brentq

    lam, q = np.linalg.eigh(g)
    beta = q.T @ b

    def radius_sq(mu):
        return float(np.sum((beta / (lam - mu)) ** 2))

    lo = lam[0] - max(1.0, np.linalg.norm(b)) * 2.0
    while radius_sq(lo) > 1.0:
        lo = lam[0] - 2.0 * (lam[0] - lo)
    hi = lam[0] - 1e-14 * max(1.0, abs(lam[0]))
    if radius_sq(hi) < 1.0:
        mu = hi  # degenerate hard case; accept the near-optimal boundary value
    else:
        mu = brentq(lambda m: radius_sq(m) - 1.0, lo, hi, xtol=1e-15)
    d = np.linalg.solve(g - mu * np.eye(len(b)), b)
    d /= np.linalg.norm(d)
    return float(d @ g @ d - 2.0 * b @ d)


def sampled_bar_delta_a(u, v, a_mat, a_sqrt, rng, n_dirs=160):
    """Lower estimate of the unit-constrained energy distance: the outer max
    is sampled, the inner min over unit vectors of the span is exact."""
    g = v.T @ (a_mat @ v)
    worst = 0.0
    for _ in range(n_dirs):
        c = rng.standard_normal(u.shape[1])
        c /= np.linalg.norm(c)
        vec = u @ c
        b = v.T @ (a_mat @ vec)
        dist_sq = float(vec @ a_mat @ vec) + _unit_constrained_min(g, b)
        worst = max(worst, math.sqrt(max(0.0, dist_sq)))
    return worst


def make_model_problem(rng, dim, cluster_start, cluster_size, noise):
    """Symmetric model matrix with a planted (near-)multiple cluster.

    Returns (a, lam, q, u_exact, v_approx) with v_approx an orthonormal
    perturbation of the exact cluster block.
    """
    gaps = rng.uniform(0.8, 3.0, dim)
    lam = 1.0 + np.cumsum(gaps)
    for i in range(1, cluster_size):
        lam[cluster_start + i] = lam[cluster_start] + rng.uniform(0.0, 1e-9)
    lam = np.sort(lam)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    a = (q * lam) @ q.T
    a = 0.5 * (a + a.T)
    u = q[:, cluster_start : cluster_start + cluster_size]
    v = u + noise * rng.standard_normal(u.shape)
    v, _ = np.linalg.qr(v)
    return a, lam, q, u, v


def subspace_domination_trials(n_trials: int, seed: int = 99) -> int:
    """Dense-model oracle: every distance bound must dominate the directly
    computed distance of its construction.  Returns violation count."""
    from eigshape.intervals import Interval
    from eigshape.subspace import (
        Cluster,
        ClusterApproxData,
        bar_delta_b,
        delta_a_from_b,
        delta_bounds_recursive,
        orthonormal_correction,
    )

    from eigshape.subspace import nonorthogonality

    rng = np.random.default_rng(seed)
    violations = 0
    done = 0
    while done < n_trials:
        dim = int(rng.integers(6, 13))
        size = int(rng.integers(1, 4))
        start = int(rng.integers(0, dim - size - 1))
        noise = 10.0 ** rng.uniform(-6.0, -1.5)
        a, lam, q, u, v = make_model_problem(rng, dim, start, size, noise)
        a_sqrt = (q * np.sqrt(lam)) @ q.T

        lam_n = Interval.point(lam[start])
        lam_last = Interval.point(lam[start + size - 1])
        # top Rayleigh quotient over the span = largest Ritz value
        ritz = np.linalg.eigvalsh(v.T @ (a @ v))
        lam_hat = Interval(ritz[-1] * (1 - 1e-12), ritz[-1] * (1 + 1e-12))
        rho = Interval.point(lam[start + size])
        if rho.lo <= lam_last.hi:
            continue
        done += 1

        # preceding eigenvalues enter as singleton clusters approximated by
        # the exact eigenvectors; the mixing of v into them is carried by
        # the non-orthogonality terms
        chain = []
        eps_a_row = []
        eps_b_row = []
        eye = np.eye(dim)
        for l in range(start):
            lam_l = Interval.point(lam[l])
            chain.append(
                ClusterApproxData(
                    cluster=Cluster(l + 1, l + 1),
                    lam_n=lam_l,
                    lam_last=lam_l,
                    lam_hat_last=lam_l,
                    rho=Interval.point(lam[l + 1]),
                )
            )
            ea, eb = nonorthogonality(q[:, l : l + 1], v, eye, a)
            eps_a_row.append(ea)
            eps_b_row.append(eb)
        chain.append(
            ClusterApproxData(
                cluster=Cluster(start + 1, start + size),
                lam_n=lam_n,
                lam_last=lam_last,
                lam_hat_last=lam_hat,
                rho=rho,
                eps_a=tuple(eps_a_row),
                eps_b=tuple(eps_b_row),
            )
        )
        d_a_bound, d_b_bound = delta_bounds_recursive(chain)[-1]

        d_b_direct, bar_b_direct = principal_sines(u, v)
        d_a_direct = energy_distance(u, v, a_sqrt)
        if d_b_bound.hi < d_b_direct - 1e-9:
            violations += 1
        if d_a_bound.hi < d_a_direct - 1e-9:
            violations += 1
        if d_b_bound.hi <= 1.0 - 1e-12:
            if bar_delta_b(d_b_bound).hi < bar_b_direct - 1e-9:
                violations += 1
        if d_b_bound.hi < 1.0:
            _, bar_a_bound = delta_a_from_b(lam_n, lam_last, lam_hat, d_b_bound)
            bar_a_direct = sampled_bar_delta_a(u, v, a, a_sqrt, rng)
            if bar_a_bound.hi < bar_a_direct - 1e-9:
                violations += 1

        # orthonormalized-basis error bound, two-dimensional clusters
        if size == 2 and d_b_direct < 0.4:
            db = Interval(0.0, d_b_direct * (1 + 1e-12))
            err_a, err_b = orthonormal_correction(db, lam_n, lam_last, lam_hat)
            proj = v @ (v.T @ u)  # P_h u_i
            w2 = proj[:, 0] / np.linalg.norm(proj[:, 0])
            raw3 = proj[:, 1] - (proj[:, 1] @ w2) * w2
            w3 = raw3 / np.linalg.norm(raw3)
            for i, w in enumerate((w2, w3)):
                if np.linalg.norm(u[:, i] - w) > err_b.hi + 1e-9:
                    violations += 1
                if np.linalg.norm(a_sqrt @ (u[:, i] - w)) > err_a.hi + 1e-9:
                    violations += 1
    return violations


def sandwich_fuzz(n_pairs: int, mesh_n: int = 16, k_max: int = 4, seed: int = 17) -> int:
    """Transported and direct eigenvalue bounds must overlap for random
    shape pairs (a bound-level consequence of the two-sided transport)."""
    from eigshape.bounds import eigenvalue_bounds, transport_bounds
    from eigshape.geometry import ShapeParam, transform_between

    rng = np.random.default_rng(seed)
    cache = {}

    def bounds_at(p):
        if p not in cache:
            cache[p] = eigenvalue_bounds(p, mesh_n, k_max)
        return cache[p]

    violations = 0
    for _ in range(n_pairs):
        p = ShapeParam(rng.uniform(0.5, 2.0), rng.uniform(0.6, 2.4))
        q = ShapeParam(rng.uniform(0.5, 2.0), rng.uniform(0.6, 2.4))
        bp, bq = bounds_at(p), bounds_at(q)
        moved = transport_bounds(bq, transform_between(p, q))
        for k in range(k_max):
            if moved.lower[k] > bp.upper[k] or bp.lower[k] > moved.upper[k]:
                violations += 1
    return violations


def fd_lambda1(p, e, n_mesh: int, step: float) -> float:
    """Central finite difference of the first discrete eigenvalue along e."""
    from eigshape.assembly import assemble, fem_space
    from eigshape.eigen import smallest_eigenpairs
    from eigshape.geometry import triangle_of
    from eigshape.mesh import uniform_mesh

    lams = []
    for sign in (+1.0, -1.0):
        q = p.shifted(e, sign * step)
        mesh = uniform_mesh(triangle_of(q), n_mesh)
        space = fem_space(mesh, "CG")
        k_mat, m_mat, _ = assemble(space)
        lams.append(smallest_eigenpairs(k_mat, m_mat, 1).eigenvalues[0])
    return (lams[0] - lams[1]) / (2.0 * step)


def pencil_identity_deviation(e, t: float, n_mesh: int = 8) -> float:
    """Max relative deviation between difference quotients of the discrete
    double eigenvalue and the generalized eigenvalues of the small pencil
    built from exact pulled-back discrete eigenvectors."""
    import scipy.linalg

    from eigshape.assembly import assemble, f_p_form, fem_space
    from eigshape.eigen import smallest_eigenpairs
    from eigshape.geometry import ShapeParam, SymMatrix2, perturbation_matrix, triangle_of
    from eigshape.intervals import Interval
    from eigshape.mesh import uniform_mesh

    p0 = ShapeParam(1.0, math.pi / 3.0)
    out = {}
    for tag, shape in (("p", p0), ("t", p0.shifted(e, t))):
        mesh = uniform_mesh(triangle_of(shape), n_mesh)
        space = fem_space(mesh, "CG")
        k_mat, m_mat, d = assemble(space)
        out[tag] = (m_mat, d, smallest_eigenpairs(k_mat, m_mat, 4))
    m_p, d_p, sys_p = out["p"]
    _, _, sys_t = out["t"]
    lam = 0.5 * (sys_p.eigenvalues[1] + sys_p.eigenvalues[2])
    tilde = np.array(sys_t.vectors[:, 1:3])
    exact = sys_p.vectors[:, 1:3]
    pm = perturbation_matrix(e, p0, Interval.point(t))
    p_mid = SymMatrix2(pm.a11.mid, pm.a12.mid, pm.a22.mid)
    m_small = np.array(
        [[f_p_form(p_mid, d_p, tilde[:, j], exact[:, i]) for j in range(2)] for i in range(2)]
    )
    n_small = np.array(
        [[tilde[:, j] @ (m_p @ exact[:, i]) for j in range(2)] for i in range(2)]
    )
    mu = np.sort(scipy.linalg.eig(m_small, n_small)[0].real)
    quot = np.sort((sys_t.eigenvalues[1:3] - lam) / t)
    return float(max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(mu, quot)))


def det_sign_fuzz(n_matrices: int, n_samples: int = 20, seed: int = 123) -> int:
    """Whenever ||A - I||_F < 1 holds, sampled determinants must be positive."""
    rng = np.random.default_rng(seed)
    violations = 0
    tried = 0
    while tried < n_matrices:
        a = IntervalSymMatrix(
            Interval(1.0, 1.0) + _random_interval(rng, 0.4, False),
            _random_interval(rng, 0.4),
            Interval(1.0, 1.0) + _random_interval(rng, 0.4),
        )
        dev = iv.frobenius_upper(a - IntervalSymMatrix.identity())
        if dev >= 1.0:
            continue
        tried += 1
        for _ in range(n_samples):
            m = sample_point_matrix(rng, a)
            if np.linalg.det(m) <= 0.0:
                violations += 1
    return violations
