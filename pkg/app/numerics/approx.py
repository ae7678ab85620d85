#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
逼近数 D_n(f,P,K) 的估计

在 K=[-1,1]^d 上做张量 Chebyshev 分析，截断到 nP 的格点集得到 p_n ∈ Poly(nP)，
以网格上确界误差作为 D_n 的上界估计，再拟合几何速率 R̂。
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.fft import dct

from app.config import APPROX_CONFIG, LATTICE_CONFIG
from app.exceptions import DomainError, NumericalError
from app.numerics.basis import Polynomial, ProductBasis
from app.numerics.convex_body import enumerate_index_set
from app.numerics.extremal import ProductSet
from app.numerics.rate import SingularSetQuadric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FunctionSpec:
    """
    被逼近的函数

    quadric-runge: f(z) = 1/(Σ_j (z_j − a_j)² + r²)；callable: f(points)，points 形状 (..., d)
    """
    family: str
    center: tuple = None
    offset: float = 0.0
    func: object = field(default=None, compare=False, repr=False)
    label: str = None

    @classmethod
    def quadric_runge(cls, center, offset=0.0):
        return cls('quadric-runge', tuple(float(a) for a in center), float(offset))

    @classmethod
    def from_callable(cls, func, label='callable'):
        return cls('callable', func=func, label=label)

    @property
    def dimension(self):
        return len(self.center) if self.family == 'quadric-runge' else None

    def singular_set(self):
        if self.family != 'quadric-runge':
            raise DomainError("只有 quadric-runge 函数有二次奇异集")
        return SingularSetQuadric(self.center, self.offset)

    def check_domain(self, d):
        """检查奇异集的实部与 [-1,1]^d 不相交"""
        if self.family != 'quadric-runge':
            return
        if len(self.center) != d:
            raise DomainError(f"函数维数 {len(self.center)} 与 d={d} 不一致")
        a = np.abs(np.asarray(self.center))
        gap = float(np.sum(np.maximum(a - 1.0, 0.0) ** 2) + self.offset ** 2)
        if gap <= APPROX_CONFIG['real_gap']:
            raise DomainError(f"函数在 K 上有极点: {self.describe()}")

    def evaluate(self, points):
        points = np.asarray(points)
        if np.iscomplexobj(points) and np.all(points.imag == 0):
            points = points.real
        if self.family == 'quadric-runge':
            shifts = points - np.asarray(self.center)
            return 1.0 / (np.sum(shifts * shifts, axis=-1) + self.offset ** 2)
        return np.asarray(self.func(points))

    def describe(self):
        if self.family == 'quadric-runge':
            return f"quadric:a={','.join(f'{a:g}' for a in self.center)};r={self.offset:g}"
        return self.label or 'callable'


@dataclass(frozen=True, eq=False)
class CoeffTensor:
    """张量 Chebyshev 系数 c_J，0 ≤ J_k ≤ m"""
    m: int
    coeffs: np.ndarray

    @property
    def dimension(self):
        return self.coeffs.ndim


@dataclass(frozen=True, eq=False)
class ApproxSeries:
    rows: pd.DataFrame
    fitted_rate: float
    fit_range: tuple
    body: str = None
    function: str = None

    def is_nonincreasing(self, jitter=APPROX_CONFIG['jitter']):
        values = self.rows['D_hat'].to_numpy()
        return bool(np.all(values[1:] <= values[:-1] * (1.0 + jitter) + APPROX_CONFIG['floor']))

    def summary(self):
        return {
            'R_hat': self.fitted_rate,
            'fit_range': list(self.fit_range) if self.fit_range else None,
            'body': self.body,
            'function': self.function
        }


def lobatto_points(count):
    """Chebyshev–Lobatto 点 cos(πk/(count−1))，降序"""
    if count < 1:
        raise DomainError(f"点数必须为正: {count}")
    if count == 1:
        return np.array([1.0])
    return np.cos(np.pi * np.arange(count) / (count - 1))


def analysis_degree(body, n):
    """每轴分析次数 m = max(2n⌈max_k max_{y∈P} y_k⌉, 最小值)"""
    tol = LATTICE_CONFIG['membership_tolerance']
    reach = max(body.max_coordinate(k) for k in range(body.dimension))
    return max(2 * n * math.ceil(reach - tol), APPROX_CONFIG['min_analysis_degree'])


def eval_grid_size(d):
    sizes = APPROX_CONFIG['eval_grid']
    if d not in sizes:
        raise DomainError(f"D_n 估计只支持 d ≤ {max(sizes)}: d={d}")
    return sizes[d]


def _tensor_grid(axes):
    return np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)


def cheb_coeffs(f, d, m):
    """
    Chebyshev–Lobatto 张量网格 (m+1)^d 上的插值系数

    Args:
        f (FunctionSpec): 在 K 上取实值的函数
        d (int): 维数
        m (int): 每轴次数

    Returns:
        CoeffTensor
    """
    if m < 0:
        raise DomainError(f"m 必须非负: {m}")
    f.check_domain(d)
    nodes = lobatto_points(m + 1)
    values = np.asarray(f.evaluate(_tensor_grid([nodes] * d)), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"函数在分析网格上取非有限值（K 上有极点）: {f.describe()}")
    coeffs = values
    if m > 0:
        for axis in range(d):
            coeffs = dct(coeffs, type=1, axis=axis) / m
            edge = [slice(None)] * d
            for j in (0, m):
                edge[axis] = j
                coeffs[tuple(edge)] *= 0.5
    return CoeffTensor(m, coeffs)


def truncate_to_body(coeffs, body, n):
    """保留 J ∈ nP ∩ ℤ₊^d 的系数，得到 p_n ∈ Poly(nP)"""
    tol = LATTICE_CONFIG['membership_tolerance']
    if body.dimension != coeffs.dimension:
        raise DomainError(f"凸体维数 {body.dimension} 与系数张量维数 {coeffs.dimension} 不一致")
    needed = max(math.floor(n * body.max_coordinate(k) * (1 + tol) + tol) for k in range(body.dimension))
    if coeffs.m < needed:
        raise DomainError(f"分析网格太小: m={coeffs.m} < {needed}，请增大分析次数")
    index_set = enumerate_index_set(body, n)
    basis = ProductBasis(ProductSet.cube(body.dimension), index_set)
    return Polynomial(basis, coeffs.coeffs[tuple(index_set.indices.T)].copy())


class _TruncationHarness:
    """缓存系数与网格函数值，供同一函数的多个 (P, n) 复用"""

    def __init__(self, f, d, m, eval_grid=None):
        self.f = f
        self.d = d
        self.coeffs = cheb_coeffs(f, d, m)
        count = eval_grid or eval_grid_size(d)
        self.axes = [lobatto_points(count)] * d
        self.f_grid = np.asarray(f.evaluate(_tensor_grid(self.axes)), dtype=float)

    def error(self, body, n):
        poly = truncate_to_body(self.coeffs, body, n)
        return float(np.max(np.abs(self.f_grid - poly.evaluate_tensor_grid(self.axes)))), poly.index_set.d_n


def dn_estimate(f, body, n, eval_grid=None):
    """
    D_n 的上界估计：Chebyshev 截断在网格上的最大误差
    """
    harness = _TruncationHarness(f, body.dimension, analysis_degree(body, n), eval_grid)
    value, _ = harness.error(body, n)
    return value


def _usable(rows):
    return rows[rows['D_hat'] > APPROX_CONFIG['floor'] * APPROX_CONFIG['floor_margin']]


def _fit(rows, fit_range=None):
    rows = rows.sort_values('n')
    if fit_range is None:
        rows = rows.iloc[APPROX_CONFIG['fit_drop']:]
    else:
        rows = rows[(rows['n'] >= fit_range[0]) & (rows['n'] <= fit_range[1])]
    rows = _usable(rows)
    if len(rows) < 3:
        raise NumericalError(f"可用于拟合的行不足 3 行: {len(rows)}")
    slope, _ = np.polyfit(rows['n'].to_numpy(dtype=float), np.log(rows['D_hat'].to_numpy()), 1)
    return math.exp(-slope), (int(rows['n'].iloc[0]), int(rows['n'].iloc[-1]))


def fit_rate(series, fit_range=None):
    """
    最小二乘拟合 log D̂_n ≈ b − n log R̂，返回 R̂

    Args:
        series (ApproxSeries 或 DataFrame): 含 n、D_hat 列
        fit_range (tuple): (n_lo, n_hi)；默认舍弃前几行过渡段
    """
    rows = series.rows if isinstance(series, ApproxSeries) else series
    return _fit(rows, fit_range)[0]


def dn_series(f, body, n_range, eval_grid=None, fit_range=None):
    """
    对一组 n 计算 D̂_n 并拟合几何速率

    Returns:
        ApproxSeries
    """
    n_values = [int(n) for n in n_range]
    if not n_values or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError(f"n 序列必须非空且严格递增: {n_values}")
    harness = _TruncationHarness(f, body.dimension, analysis_degree(body, n_values[-1]), eval_grid)

    rows = []
    for n in n_values:
        value, d_n = harness.error(body, n)
        rows.append({'n': n, 'd_n': d_n, 'D_hat': value})
        logger.debug(f"D_n: n={n}, d_n={d_n}, D_hat={value:.6e}")
    rows = pd.DataFrame(rows)

    try:
        rate, used = _fit(rows, fit_range)
    except NumericalError as e:
        logger.warning(f"无法拟合速率: {e}")
        rate, used = math.nan, None
    logger.info(f"D_n 序列完成: {body.to_spec()}, {f.describe()}, R_hat={rate:.6g}")
    return ApproxSeries(rows, rate, used, body.to_spec(), f.describe())
