#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Poly(nP) 的近似 Fekete 点与基本 Lagrange 多项式

在离散网格上选取使 |det V| 尽量大的 d_n 个节点：先用列主元 QR 贪心选点，再做交换细化，
直到网格上所有 |l_j| ≤ 1 + 容差。
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import linalg

from app.config import FEKETE_CONFIG
from app.exceptions import DomainError, NumericalError
from app.numerics.approx import fit_rate, lobatto_points
from app.numerics.basis import Polynomial, ProductBasis
from app.numerics.convex_body import enumerate_index_set
from app.numerics.extremal import Interval, v_p_values

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Mesh:
    """K 的离散代替；points 形状 (N, d)，复数"""
    points: np.ndarray
    domain: object
    resolution: int
    description: str

    def __len__(self):
        return len(self.points)

    @property
    def dimension(self):
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class FeketeSet:
    n: int
    body: object
    basis: ProductBasis
    node_indices: tuple
    nodes: np.ndarray
    lagrange_coeffs: np.ndarray
    vdm_log_abs: float
    greedy_vdm_log_abs: float
    vdm_history: tuple
    swaps_performed: int
    max_psi_on_mesh: float
    residual: float
    conditioning_warning: bool

    @property
    def d_n(self):
        return self.basis.size

    @property
    def domain(self):
        return self.basis.domain

    def lagrange_values(self, Z):
        """所有 l_j 在 Z 处的值，形状 (..., d_n)"""
        return self.basis.evaluate(Z) @ self.lagrange_coeffs

    def report(self):
        return {
            'n': self.n,
            'd_n': self.d_n,
            'vdm_log_abs': self.vdm_log_abs,
            'max_psi_on_mesh': self.max_psi_on_mesh,
            'swaps_performed': self.swaps_performed,
            'greedy_vdm_log_abs': self.greedy_vdm_log_abs,
            'residual': self.residual,
            'conditioning_warning': self.conditioning_warning
        }

    def nodes_frame(self):
        nodes = self.nodes
        if np.all(nodes.imag == 0):
            return pd.DataFrame(nodes.real, columns=[f"x{k + 1}" for k in range(nodes.shape[1])])
        columns = {}
        for k in range(nodes.shape[1]):
            columns[f"x{k + 1}"] = nodes[:, k].real
            columns[f"y{k + 1}"] = nodes[:, k].imag
        return pd.DataFrame(columns)


@dataclass(frozen=True)
class DRInclusionReport:
    rows: pd.DataFrame
    R1: float
    R: float
    samples: int
    min_clean_n: int = None

    @property
    def violations(self):
        return int(self.rows['violations'].sum())


def _factor_points(factor, resolution):
    if isinstance(factor, Interval):
        return factor.from_unit(lobatto_points(resolution)[::-1]).astype(complex)
    # 圆心 + (resolution−1) 个同心圆，每圈 2·resolution 个点
    angles = np.exp(2j * np.pi * np.arange(2 * resolution) / (2 * resolution))
    radii = np.arange(1, resolution) / (resolution - 1)
    rings = (factor.radius * radii[:, None] * angles[None, :]).ravel()
    return factor.center + np.concatenate([[0.0], rings])


def build_mesh(K, resolution):
    """
    乘积集 K 的张量网格

    区间因子取 Chebyshev–Lobatto 点（升序），圆盘因子取圆心加均匀同心圆。
    """
    if resolution < 2:
        raise DomainError(f"网格分辨率必须 ≥ 2: {resolution}")
    axes = [_factor_points(f, resolution) for f in K.factors]
    points = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, K.dimension)
    kind = 'chebyshev-lobatto' if K.is_box else 'lobatto+rings'
    return Mesh(points, K, resolution, f"{kind}:{K.to_spec()}:res={resolution}")


def _vandermonde(mesh, basis):
    V = basis.evaluate(mesh.points)
    if np.all(V.imag == 0):
        return np.ascontiguousarray(V.real)
    return V


def _greedy_nodes(V, index_set):
    d_n = V.shape[1]
    _, R, piv = linalg.qr(V.T, mode='economic', pivoting=True)
    diag = np.abs(np.diag(R))
    tol = FEKETE_CONFIG['rank_tolerance'] * diag[0] if len(diag) else 0.0
    deficient = np.nonzero(diag[:d_n] <= tol)[0]
    if len(diag) < d_n or len(deficient):
        k = int(deficient[0]) if len(deficient) else len(diag)
        raise NumericalError(
            f"Vandermonde 矩阵秩亏: 第 {k} 列（基函数 J={index_set.as_tuples()[k]}），网格太粗或退化")
    return [int(i) for i in piv[:d_n]]


def lagrange_coefficients(A):
    """
    节点 Vandermonde 矩阵的逆，列即 Lagrange 基的系数

    列主元 QR：A[:, piv] = Q R，于是 A⁻¹ 的第 piv[k] 行为 (R⁻¹ Qᴴ) 的第 k 行。
    """
    Q, R, piv = linalg.qr(A, pivoting=True)
    C = np.empty_like(A)
    C[piv] = linalg.solve_triangular(R, Q.conj().T)
    return C


def approx_fekete(mesh, body, n):
    """
    近似 Fekete 点

    Args:
        mesh (Mesh): K 的网格
        body (ConvexBody): 凸体
        n (int): 次数

    Returns:
        FeketeSet
    """
    if body.dimension != mesh.dimension:
        raise DomainError(f"凸体维数 {body.dimension} 与网格维数 {mesh.dimension} 不一致")
    index_set = enumerate_index_set(body, n)
    basis = ProductBasis(mesh.domain, index_set)
    d_n = index_set.d_n
    if len(mesh) < FEKETE_CONFIG['mesh_factor'] * d_n:
        raise DomainError(
            f"网格太粗: {len(mesh)} 个点 < {FEKETE_CONFIG['mesh_factor']}·d_n = {FEKETE_CONFIG['mesh_factor'] * d_n}")

    V = _vandermonde(mesh, basis)
    nodes = _greedy_nodes(V, index_set)
    identity = np.eye(d_n)
    greedy = float(np.linalg.slogdet(V[nodes])[1])
    history = [greedy]
    threshold = 1.0 + FEKETE_CONFIG['swap_tolerance']

    swaps = 0
    while True:
        C = lagrange_coefficients(V[nodes])
        L = np.abs(V @ C)
        i, j = np.unravel_index(int(np.argmax(L)), L.shape)
        if L[i, j] <= threshold:
            break
        if swaps >= FEKETE_CONFIG['max_swaps']:
            raise NumericalError(f"交换细化未收敛: {swaps} 次交换后 max|l_j| = {L[i, j]:.6g}")
        # 替换后 |det| 乘以 |l_j(z_i)| > 1
        nodes[j] = int(i)
        history.append(history[-1] + math.log(L[i, j]))
        swaps += 1

    residual = float(np.max(np.abs(V[nodes] @ C - identity)))
    warning = residual >= FEKETE_CONFIG['residual_warning']
    if warning:
        logger.warning(f"Lagrange 系数残差偏大: {residual:.3e} (n={n}, d_n={d_n})")
    logger.info(f"Fekete 点完成: n={n}, d_n={d_n}, 交换 {swaps} 次, max ψ = {L.max():.12g}")

    return FeketeSet(
        n=n, body=body, basis=basis,
        node_indices=tuple(nodes),
        nodes=mesh.points[nodes].copy(),
        lagrange_coeffs=C,
        vdm_log_abs=float(np.linalg.slogdet(V[nodes])[1]),
        greedy_vdm_log_abs=greedy,
        vdm_history=tuple(history),
        swaps_performed=swaps,
        max_psi_on_mesh=float(L.max()),
        residual=residual,
        conditioning_warning=warning
    )


def psi_values(fs, Z):
    """ψ_n 在 Z (..., d) 上的值"""
    return np.max(np.abs(fs.lagrange_values(np.asarray(Z, dtype=complex))), axis=-1)


def psi_n(fs, z):
    """ψ_n(z) = max_j |l_j(z)|"""
    z = np.asarray(z, dtype=complex)
    if z.shape != (fs.basis.domain.dimension,):
        raise DomainError(f"点的维数 {z.shape} 与 d={fs.basis.domain.dimension} 不一致")
    return float(psi_values(fs, z))


def phi_bracket(fs, z):
    """(1/n) log Φ_n(z) 所在区间 [(1/n) log ψ_n, (1/n)(log d_n + log ψ_n)]"""
    log_psi = math.log(psi_n(fs, z))
    return log_psi / fs.n, (math.log(fs.d_n) + log_psi) / fs.n


def interpolate(fs, f):
    """L_n(f) = Σ_j f(a_j) l_j，返回 Poly(nP) 中的多项式"""
    values = np.asarray(f.evaluate(fs.nodes))
    if not np.all(np.isfinite(values)):
        raise DomainError(f"函数在插值节点上取非有限值: {f.describe()}")
    return Polynomial(fs.basis, fs.lagrange_coeffs @ values)


def interp_error(fs, f, eval_mesh):
    """网格 eval_mesh 上的 max |f − L_n(f)|"""
    poly = interpolate(fs, f)
    diff = np.asarray(f.evaluate(eval_mesh.points)) - poly.evaluate(eval_mesh.points)
    return float(np.max(np.abs(diff)))


def interpolation_series(K, body, f, n_values, resolution, eval_resolution):
    """
    一组 n 的插值误差与拟合速率

    Returns:
        (DataFrame, float): 列 n、d_n、D_hat 的误差表与拟合的几何速率
    """
    mesh = build_mesh(K, resolution)
    eval_mesh = build_mesh(K, eval_resolution)
    rows = []
    for n in n_values:
        fs = approx_fekete(mesh, body, n)
        rows.append({'n': n, 'd_n': fs.d_n, 'D_hat': interp_error(fs, f, eval_mesh)})
    rows = pd.DataFrame(rows)
    try:
        rate = fit_rate(rows, (rows['n'].min(), rows['n'].max()))
    except NumericalError as e:
        logger.warning(f"无法拟合插值误差速率: {e}")
        rate = math.nan
    return rows, rate


def dr_inclusion_check(fekete_sets, R1, R, samples):
    """
    检查 ψ_n(z) < R1^n ⇒ V_{P,K}(z) ≤ log R

    Args:
        fekete_sets: 一个或多个 FeketeSet（不同 n）
        samples: 复向量，形状 (N, d)

    Returns:
        DRInclusionReport: min_clean_n 为此后各 n 都无违例的最小 n
    """
    if not 1 < R1 < R:
        raise DomainError(f"要求 R > R1 > 1: R1={R1}, R={R}")
    if isinstance(fekete_sets, FeketeSet):
        fekete_sets = [fekete_sets]
    samples = np.asarray(samples, dtype=complex)
    if not np.all(np.isfinite(samples)):
        raise DomainError("样本点必须有限")

    rows = []
    for fs in sorted(fekete_sets, key=lambda s: s.n):
        inside = psi_values(fs, samples) < R1 ** fs.n
        V = v_p_values(fs.body, fs.domain, samples)
        violations = int(np.count_nonzero(inside & (V > math.log(R) + 1e-12)))
        rows.append({'n': fs.n, 'in_D_R1': int(np.count_nonzero(inside)), 'violations': violations})
    rows = pd.DataFrame(rows)

    min_clean = None
    for n, violations in zip(rows['n'][::-1], rows['violations'][::-1]):
        if violations:
            break
        min_clean = int(n)
    return DRInclusionReport(rows, R1, R, len(samples), min_clean)


def exhaustive_fekete_1d(mesh, body, n, chunk_size=20000):
    """
    一维小网格上穷举所有 d_n 元子集，返回 (节点下标, log|VDM|)
    """
    if mesh.dimension != 1:
        raise DomainError("穷举 Fekete 点只支持 d=1")
    basis = ProductBasis(mesh.domain, enumerate_index_set(body, n))
    V = _vandermonde(mesh, basis)
    combos = itertools.combinations(range(len(mesh)), basis.size)
    best, best_value = None, -math.inf
    while True:
        chunk = np.array(list(itertools.islice(combos, chunk_size)), dtype=int)
        if len(chunk) == 0:
            break
        values = np.linalg.slogdet(V[chunk])[1]
        k = int(np.argmax(values))
        if values[k] > best_value:
            best, best_value = tuple(int(i) for i in chunk[k]), float(values[k])
    return best, best_value
