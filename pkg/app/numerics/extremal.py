#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
乘积集上的 P-极值函数

V_{P,K}(z) = φ_P(V_{E₁}(z₁), ..., V_{E_d}(z_d))，各因子的 Green 函数均为闭式，
因此逐点求值不需要任何网格或包络计算。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from app.config import EXTREMAL_CONFIG, MULTITHREADING_CONFIG
from app.exceptions import DomainError, HypothesisError, SingularityError
from app.numerics.convex_body import lower_set_verified, support_value

logger = logging.getLogger(__name__)


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def interval_branch(z):
    """
    √(z²−1) 的分支：在两个根中取使 |z+w| 最大者

    水平集即 Bernstein 椭圆 E_ρ，所以取模最大的分支。
    """
    z = np.asarray(z, dtype=complex)
    w = np.sqrt(z * z - 1.0)
    flip = np.abs(z - w) > np.abs(z + w)
    return np.where(flip, -w, w)


def green_interval(z):
    """[-1,1] 的 Green 函数 log|z + √(z²−1)|，在线段上严格为 0"""
    z = np.asarray(z, dtype=complex)
    w = interval_branch(z)
    with np.errstate(divide='ignore'):
        value = np.log(np.maximum(np.abs(z + w), 1.0))
    on_segment = (z.imag == 0) & (np.abs(z.real) <= 1.0)
    return _scalar_or_array(np.where(on_segment, 0.0, value))


def ellipse_semi_axes(rho):
    """水平集 E_ρ 的半轴 a=(ρ+1/ρ)/2, b=(ρ−1/ρ)/2"""
    if rho < 1:
        raise DomainError(f"Bernstein 椭圆要求 ρ ≥ 1: {rho}")
    return 0.5 * (rho + 1.0 / rho), 0.5 * (rho - 1.0 / rho)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"区间退化: [{self.a}, {self.b}]")

    def green(self, z):
        z = np.asarray(z, dtype=complex)
        return green_interval((2.0 * z - self.a - self.b) / (self.b - self.a))

    def to_unit(self, z):
        return (2.0 * np.asarray(z) - self.a - self.b) / (self.b - self.a)

    def from_unit(self, t):
        return 0.5 * (self.b - self.a) * np.asarray(t) + 0.5 * (self.a + self.b)

    def contains(self, z, tol=1e-12):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z.imag) <= tol) & (z.real >= self.a - tol) & (z.real <= self.b + tol)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"圆盘半径必须为正: {self.radius}")

    def green(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide='ignore'):
            value = np.log(np.abs(z - self.center) / self.radius)
        return _scalar_or_array(np.maximum(value, 0.0))

    def to_unit(self, z):
        return (np.asarray(z) - self.center) / self.radius


@dataclass(frozen=True)
class ProductSet:
    """K = E₁ × ⋯ × E_d"""
    factors: tuple

    def __post_init__(self):
        if len(self.factors) < 1:
            raise DomainError("乘积集至少需要一个因子")
        for factor in self.factors:
            if not isinstance(factor, (Interval, Disk)):
                raise DomainError(f"未知的一维集合: {factor!r}")

    @classmethod
    def cube(cls, d):
        """[-1,1]^d"""
        return cls(tuple(Interval(-1.0, 1.0) for _ in range(d)))

    @property
    def dimension(self):
        return len(self.factors)

    @property
    def is_box(self):
        return all(isinstance(f, Interval) for f in self.factors)

    @property
    def is_unit_cube(self):
        return all(isinstance(f, Interval) and f.a == -1.0 and f.b == 1.0 for f in self.factors)

    def to_spec(self):
        parts = []
        for f in self.factors:
            if isinstance(f, Interval):
                parts.append(f"[{f.a:g},{f.b:g}]")
            else:
                parts.append(f"disk({complex(f.center).real:g}{complex(f.center).imag:+g}j,{f.radius:g})")
        return 'x'.join(parts)


@dataclass(frozen=True)
class ExtremalValue:
    """V_{P,K}(z) 及各因子的 Green 函数值"""
    value: float
    per_factor: tuple

    @property
    def phi(self):
        """Φ = e^{V}"""
        return math.exp(self.value)


@dataclass(frozen=True)
class HPValue:
    """H_P(z)；regime 为 'dual-norm'（所有 |z_j| ≥ 1）或 'direct'"""
    value: float
    regime: str
    degenerate: bool = False


def as_complex_vector(z, d=None):
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1:
        raise DomainError(f"复向量必须是一维: shape={z.shape}")
    if not np.all(np.isfinite(z)):
        raise DomainError(f"复向量分量必须有限: {z.tolist()}")
    if d is not None and len(z) != d:
        raise DomainError(f"复向量维数 {len(z)} 与 d={d} 不一致")
    return z


def green_univariate(set1d, z):
    """一维集合的 Green 函数；区间经仿射变换化为 [-1,1]"""
    return set1d.green(z)


def check_product_hypotheses(body, K):
    if body.dimension != K.dimension:
        raise DomainError(f"凸体维数 {body.dimension} 与乘积集维数 {K.dimension} 不一致")
    if EXTREMAL_CONFIG['check_lower_set'] and not lower_set_verified(body):
        raise HypothesisError(f"乘积公式要求 P 为 lower set: {body.to_spec()}")


def factor_greens(K, Z):
    """Z 形状 (..., d)，返回各因子的 Green 值 (..., d)"""
    Z = np.asarray(Z, dtype=complex)
    if K.is_unit_cube:
        return np.asarray(green_interval(Z), dtype=float)
    return np.stack([np.asarray(f.green(Z[..., k]), dtype=float) for k, f in enumerate(K.factors)], axis=-1)


def v_p_values(body, K, Z):
    """向量化的 V_{P,K}，Z 的最后一维为 d"""
    check_product_hypotheses(body, K)
    Z = np.asarray(Z, dtype=complex)
    if Z.shape[-1] != K.dimension:
        raise DomainError(f"点的维数 {Z.shape[-1]} 与 d={K.dimension} 不一致")
    return body._support_array(factor_greens(K, Z))


def v_p_product(body, K, z):
    """
    乘积公式 V_{P,K}(z) = φ_P(V_{E₁}(z₁), ..., V_{E_d}(z_d))

    Args:
        body (ConvexBody): lower set 凸体
        K (ProductSet): 乘积集
        z: 复向量

    Returns:
        ExtremalValue
    """
    check_product_hypotheses(body, K)
    z = as_complex_vector(z, K.dimension)
    per_factor = factor_greens(K, z)
    return ExtremalValue(support_value(body, per_factor), tuple(float(g) for g in per_factor))


def h_p(body, z):
    """
    H_P(z) = sup_{J∈P} log|z^J|

    所有 log|z_j| ≥ 0 时即 φ_P(log|z₁|, ..., log|z_d|)；否则直接在 P 上求线性型的上确界，
    并在结果中标记 regime='direct'。某个 z_j = 0 且 P 要求该坐标为正时返回 -inf（degenerate）。
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != body.dimension:
        raise DomainError(f"点的维数 {z.shape[-1]} 与凸体维数 {body.dimension} 不一致")
    with np.errstate(divide='ignore'):
        logs = np.log(np.abs(z))
    if np.all(logs >= 0):
        return HPValue(support_value(body, logs), 'dual-norm')
    value = float(body.sup_linear_form(logs))
    degenerate = value == -math.inf
    if degenerate:
        logger.warning(f"H_P 退化为 -inf: z={z.tolist()}")
    return HPValue(value, 'direct', degenerate)


def green_gradient(z):
    """
    [-1,1] 的 Green 函数梯度 (∂/∂x, ∂/∂y) = (Re 1/w, −Im 1/w)，w 与 green_interval 同分支
    """
    z = complex(z)
    tol = EXTREMAL_CONFIG['segment_tolerance']
    if abs(z.imag) <= tol and abs(z.real) <= 1.0 + tol:
        raise SingularityError(f"梯度在 [-1,1] 上奇异: z={z}")
    inv = 1.0 / complex(interval_branch(z))
    return np.array([inv.real, -inv.imag])


def sublevel_member(body, K, z, R):
    """z ∈ Ω_R = {V_{P,K} < log R}"""
    if not R > 1:
        raise DomainError(f"要求 R > 1: {R}")
    return v_p_product(body, K, z).value < math.log(R)


def bernstein_walsh_ratio(poly, body, K, samples, n, k_points):
    """
    max_z |p(z)| / (‖p‖_K · exp(n V_{P,K}(z)))

    ‖p‖_K 取 k_points 上的最大值；结果 ≤ 1 即 Bernstein-Walsh 不等式在样本上成立。
    """
    sup_k = float(np.max(np.abs(poly.evaluate(k_points))))
    if sup_k == 0.0:
        return 0.0
    values = np.abs(poly.evaluate(samples))
    bound = sup_k * np.exp(n * v_p_values(body, K, samples))
    return float(np.max(values / bound))


def axis_values(re_range, im_range):
    """一个坐标上的复网格：re_range/im_range 为 (lo, hi, count)"""
    re = np.linspace(re_range[0], re_range[1], int(re_range[2]))
    im = np.linspace(im_range[0], im_range[1], int(im_range[2]))
    return (re[:, None] + 1j * im[None, :]).ravel()


def evaluate_grid(body, K, axes, threads=None, chunk_size=50000):
    """
    在各坐标复网格的张量积上求 V_{P,K}

    Args:
        axes (list): 每个坐标一个复数数组
        threads (int): 线程数；结果与线程数无关

    Returns:
        pandas.DataFrame: 列 x1,y1,...,xd,yd,V
    """
    if len(axes) != K.dimension:
        raise DomainError(f"需要 {K.dimension} 个坐标网格，得到 {len(axes)} 个")
    check_product_hypotheses(body, K)
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, K.dimension)
    chunks = [mesh[i:i + chunk_size] for i in range(0, len(mesh), chunk_size)]
    max_workers = threads or MULTITHREADING_CONFIG['max_workers']
    logger.info(f"计算极值函数网格: {len(mesh)} 个点, {len(chunks)} 块")

    if MULTITHREADING_CONFIG['enable_multithreading'] and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            values = list(executor.map(lambda c: v_p_values(body, K, c), chunks))
    else:
        values = [v_p_values(body, K, c) for c in chunks]

    columns = {}
    for k in range(K.dimension):
        columns[f"x{k + 1}"] = mesh[:, k].real
        columns[f"y{k + 1}"] = mesh[:, k].imag
    columns['V'] = np.concatenate(values) if values else np.array([])
    return pd.DataFrame(columns)
