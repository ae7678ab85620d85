#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
凸体 P ⊂ (ℝ₊)^d 及其次数函数

提供 Minkowski 泛函（P-次数）、支撑函数（对偶范数）、格点集 nP ∩ ℤ₊^d、
体积与包含常数。q=∞ 一律按极限符号处理，不用大 q 近似。
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd
from scipy.spatial import ConvexHull
from scipy.special import comb, gammaln

from app.config import LATTICE_CONFIG
from app.exceptions import DomainError, HypothesisError

logger = logging.getLogger(__name__)


def conjugate_exponent(q):
    """返回 q'，满足 1/q + 1/q' = 1（q=1 → ∞，q=∞ → 1）"""
    if math.isinf(q):
        return 1.0
    if q == 1:
        return math.inf
    return q / (q - 1.0)


def as_multi_index(entries):
    """校验并返回多重指标（非负整数元组）"""
    J = tuple(int(j) for j in entries)
    if any(j < 0 for j in J) or any(float(j) != float(e) for j, e in zip(J, entries)):
        raise DomainError(f"多重指标必须是非负整数: {tuple(entries)}")
    return J


@dataclass(frozen=True)
class LqBall:
    """ℓq 球在第一卦限中的部分 {x ≥ 0 : ‖x‖_q ≤ 1}"""
    q: float


@dataclass(frozen=True)
class Polytope:
    """顶点凸包"""
    vertices: tuple


@dataclass(frozen=True)
class ConvexBody:
    """
    凸体 c·P₀，P₀ 为 ℓq 球或多面体

    构造时检查内部非空、0 ∈ P 以及包含常数 A、k 的存在性，之后不可变。
    """
    dimension: int
    shape: object
    scale: float = 1.0
    _normals: np.ndarray = field(init=False, repr=False, compare=False, default=None)
    _offsets: np.ndarray = field(init=False, repr=False, compare=False, default=None)
    _constants: tuple = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        d = self.dimension
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise DomainError(f"维数必须是正整数: {d}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"缩放系数必须为正: {self.scale}")
        if isinstance(self.shape, LqBall):
            if not self.shape.q >= 1:
                raise DomainError(f"ℓq 球要求 q ≥ 1: {self.shape.q}")
        elif isinstance(self.shape, Polytope):
            self._init_polytope()
        else:
            raise DomainError(f"未知的凸体形状: {self.shape!r}")
        object.__setattr__(self, '_constants', self._compute_containment_constants())

    # ===== 构造辅助 =====
    @classmethod
    def lq(cls, q, d, scale=1.0):
        return cls(int(d), LqBall(float(q)), float(scale))

    @classmethod
    def simplex(cls, d):
        """标准单纯形 Σ（总次数）"""
        return cls.lq(1.0, d)

    @classmethod
    def polytope(cls, vertices, scale=1.0):
        verts = tuple(tuple(float(v) for v in vertex) for vertex in vertices)
        if not verts:
            raise DomainError("多面体至少需要一个顶点")
        return cls(len(verts[0]), Polytope(verts), float(scale))

    def _init_polytope(self):
        d = self.dimension
        verts = np.asarray(self.shape.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != d:
            raise DomainError(f"顶点维数与 d={d} 不一致")
        if np.any(verts < 0):
            raise DomainError("多面体顶点必须位于第一卦限")
        # 需要 d+1 个仿射无关的顶点
        if len(verts) < d + 1 or np.linalg.matrix_rank(verts - verts[0]) < d:
            raise DomainError(f"多面体内部为空（仿射无关顶点不足 {d + 1} 个）")

        if d == 1:
            hi = float(verts.max())
            lo = float(verts.min())
            normals = np.array([[1.0], [-1.0]])
            offsets = np.array([-hi, lo])
        else:
            hull = ConvexHull(verts)
            normals = hull.equations[:, :-1]
            offsets = hull.equations[:, -1]
        # 0 ∈ P（Σ ⊂ kP 的必要条件）
        if np.any(offsets > 1e-12):
            raise HypothesisError("多面体不包含原点，不存在 k 使 Σ ⊂ kP")
        object.__setattr__(self, '_normals', normals)
        object.__setattr__(self, '_offsets', offsets)

    # ===== 基本属性 =====
    @property
    def is_lq_ball(self):
        return isinstance(self.shape, LqBall)

    @property
    def q(self):
        return self.shape.q if self.is_lq_ball else None

    @property
    def dual_exponent(self):
        """q'（多面体返回 None）"""
        return conjugate_exponent(self.shape.q) if self.is_lq_ball else None

    @property
    def containment(self):
        return self._constants

    def scaled(self, c):
        """返回 c·P"""
        return ConvexBody(self.dimension, self.shape, self.scale * float(c))

    def to_spec(self):
        """规格字符串（与命令行格式一致）"""
        if self.is_lq_ball:
            q = 'inf' if math.isinf(self.shape.q) else f"{self.shape.q:g}"
            return f"lq:q={q},d={self.dimension},scale={self.scale:.12g}"
        verts = ','.join('(' + ','.join(f"{v:g}" for v in vertex) + ')' for vertex in self.shape.vertices)
        spec = f"poly:d={self.dimension},verts=[{verts}]"
        return spec if self.scale == 1.0 else f"{spec},scale={self.scale:.12g}"

    def __str__(self):
        return self.to_spec()

    # ===== 向量化求值 =====
    def _norm_array(self, x):
        if self.is_lq_ball:
            return np.linalg.norm(x, ord=self.shape.q, axis=-1) / self.scale
        proj = x @ self._normals.T
        cone = self._offsets > -1e-12
        with np.errstate(divide='ignore', invalid='ignore'):
            ratios = proj[..., ~cone] / (-self._offsets[~cone])
        lam = np.maximum(ratios.max(axis=-1), 0.0) if ratios.shape[-1] else np.zeros(x.shape[:-1])
        if np.any(cone):
            size = np.abs(x).sum(axis=-1)
            outside = (proj[..., cone] > 1e-12 * np.maximum(size, 1.0)[..., None]).any(axis=-1)
            lam = np.where(outside, np.inf, lam)
        return lam / self.scale

    def _support_array(self, x):
        if self.is_lq_ball:
            return self.scale * np.linalg.norm(x, ord=conjugate_exponent(self.shape.q), axis=-1)
        verts = np.asarray(self.shape.vertices, dtype=float)
        return self.scale * (x @ verts.T).max(axis=-1)

    def sup_linear_form(self, w):
        """
        sup_{y∈P} w·y，w 可含负分量

        ℓq 球：c·‖w⁺‖_{q'}（负分量对应坐标取 0 最优）；多面体：顶点最大值。
        w 中的 -inf 分量只有在对应坐标可取 0 时才不致结果为 -inf。
        """
        w = np.asarray(w, dtype=float)
        if self.is_lq_ball:
            return self._support_array(np.maximum(w, 0.0))
        verts = np.asarray(self.shape.vertices, dtype=float)
        with np.errstate(invalid='ignore'):
            terms = np.where(verts == 0.0, 0.0, w[..., None, :] * verts)
        return self.scale * terms.sum(axis=-1).max(axis=-1)

    def max_coordinate(self, k):
        """max_{y∈P} y_k"""
        e = np.zeros(self.dimension)
        e[k] = 1.0
        return float(self._support_array(e))

    def _compute_containment_constants(self):
        tol = LATTICE_CONFIG['membership_tolerance']
        s = float(self._support_array(np.ones(self.dimension)))
        A = max(1, math.ceil(s - tol * max(1.0, s)))
        unit_norms = self._norm_array(np.eye(self.dimension))
        kmax = float(np.max(unit_norms))
        if not math.isfinite(kmax):
            raise HypothesisError(f"不存在整数 k 使 Σ ⊂ kP: {self.to_spec()}")
        k = max(1, math.ceil(kmax - tol * max(1.0, kmax)))
        return A, k


@dataclass(frozen=True, eq=False)
class IndexSet:
    """格点集 nP ∩ ℤ₊^d（分级字典序）"""
    n: int
    indices: np.ndarray

    @property
    def d_n(self):
        return len(self.indices)

    @property
    def dimension(self):
        return self.indices.shape[1]

    def as_tuples(self):
        return [tuple(int(j) for j in row) for row in self.indices]

    def __len__(self):
        return self.d_n

    def __contains__(self, J):
        return tuple(int(j) for j in J) in self._lookup

    @property
    def _lookup(self):
        cached = self.__dict__.get('_lookup_cache')
        if cached is None:
            cached = frozenset(self.as_tuples())
            object.__setattr__(self, '_lookup_cache', cached)
        return cached

    def to_frame(self):
        """导出为 DataFrame，列名 j1..jd"""
        return pd.DataFrame(self.indices, columns=[f"j{k + 1}" for k in range(self.dimension)])


def _check_nonnegative(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError(f"向量分量必须非负: {x.tolist()}")
    return x


def minkowski_degree_norm(body, x):
    """
    Minkowski 泛函 ‖x‖_P = inf{λ > 0 : x ∈ λP}

    Args:
        body (ConvexBody): 凸体
        x: 非负 d 维向量（或最后一维为 d 的数组）

    Returns:
        float 或 ndarray: 正齐次一阶；x 不在 P 生成的锥内时为 inf
    """
    x = _check_nonnegative(x)
    if x.shape[-1] != body.dimension:
        raise DomainError(f"向量维数 {x.shape[-1]} 与凸体维数 {body.dimension} 不一致")
    value = body._norm_array(x)
    return float(value) if np.ndim(value) == 0 else value


def support_value(body, x):
    """支撑函数 φ_P(x) = sup_{y∈P} x·y，即对偶范数 ‖x‖_{P°}（x ≥ 0）"""
    x = _check_nonnegative(x)
    if x.shape[-1] != body.dimension:
        raise DomainError(f"向量维数 {x.shape[-1]} 与凸体维数 {body.dimension} 不一致")
    value = body._support_array(x)
    return float(value) if np.ndim(value) == 0 else value


def _lattice_candidates(body, n):
    tol = LATTICE_CONFIG['membership_tolerance']
    bounds = [int(math.floor(n * body.max_coordinate(k) * (1 + tol) + tol)) for k in range(body.dimension)]
    grids = np.indices([b + 1 for b in bounds]).reshape(body.dimension, -1).T
    return grids


def enumerate_index_set(body, n):
    """
    枚举 nP ∩ ℤ₊^d

    Args:
        body (ConvexBody): 凸体
        n (int): 次数，n ≥ 0

    Returns:
        IndexSet: 按分级字典序排列（同级内 (1,0) 在 (0,1) 之前）
    """
    if n < 0:
        raise DomainError(f"n 必须非负: {n}")
    tol = LATTICE_CONFIG['membership_tolerance']
    candidates = _lattice_candidates(body, n)
    norms = body._norm_array(candidates.astype(float))
    kept = candidates[norms <= n * (1 + tol)]
    graded = sorted(map(tuple, kept), key=lambda J: (sum(J), tuple(-j for j in J)))
    indices = np.array(graded, dtype=int).reshape(-1, body.dimension)
    logger.debug(f"枚举格点集: {body.to_spec()}, n={n}, d_n={len(indices)}")
    return IndexSet(int(n), indices)


def is_lower_set(body, n_max):
    """
    对所有 n ≤ n_max 穷举检查 nP ∩ ℤ₊^d 是否向下封闭
    """
    if n_max < 1:
        raise DomainError(f"n_max 必须 ≥ 1: {n_max}")
    for n in range(1, int(n_max) + 1):
        index_set = enumerate_index_set(body, n)
        members = index_set._lookup
        for J in members:
            for k, j in enumerate(J):
                if j > 0 and J[:k] + (j - 1,) + J[k + 1:] not in members:
                    logger.debug(f"非 lower set: n={n}, J={J} 的下邻点缺失")
                    return False
    return True


@lru_cache(maxsize=128)
def lower_set_verified(body):
    """
    乘积公式前置条件的缓存检查

    ℓq 球在第一卦限向下封闭，直接返回 True；多面体穷举到配置深度，
    高维时按格点数上限降低深度。
    """
    if body.is_lq_ball:
        return True
    depth = LATTICE_CONFIG['lower_set_check_depth']
    A, _ = body.containment
    while depth > 1 and (depth * A + 1) ** body.dimension > LATTICE_CONFIG['lower_set_max_points']:
        depth -= 1
    return is_lower_set(body, depth)


def volume(body):
    """d 维体积：ℓq 球用 Γ 函数闭式，多面体用凸包体积"""
    d = body.dimension
    if body.is_lq_ball:
        q = body.shape.q
        if math.isinf(q):
            base = 1.0
        else:
            base = math.exp(d * gammaln(1 + 1 / q) - gammaln(1 + d / q))
    elif d == 1:
        base = float(np.max(body.shape.vertices) - np.min(body.shape.vertices))
    else:
        base = float(ConvexHull(np.asarray(body.shape.vertices)).volume)
    return base * body.scale ** d


def dim_match_scale(q, d):
    """c(q) = (vol(P₁)/vol(P_q))^{1/d}，使 vol(c·P_q) = vol(P₁)"""
    if q < 1 or d < 1:
        raise DomainError(f"要求 q ≥ 1, d ≥ 1: q={q}, d={d}")
    return (volume(ConvexBody.simplex(d)) / volume(ConvexBody.lq(q, d))) ** (1.0 / d)


def poly_degree(support, body):
    """deg_P(p) = max_{a_α ≠ 0} ‖α‖_P"""
    indices = [as_multi_index(J) for J in support]
    if not indices:
        raise DomainError("零多项式的次数没有定义")
    return float(np.max(minkowski_degree_norm(body, np.array(indices, dtype=float))))


def containment_constants(body):
    """返回 (A, k)：P ⊂ AΣ 的最小整数 A 与 Σ ⊂ kP 的最小整数 k"""
    return body.containment


def polynomial_space_bound(body, n):
    """dim 𝒫_{An} = C(An+d, d)，d_n 的上界"""
    A, _ = body.containment
    return int(comb(A * n + body.dimension, body.dimension, exact=True))
