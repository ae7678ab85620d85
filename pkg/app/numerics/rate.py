#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
收敛速率 R(P,K) = exp(min_{z∈S} V_{P,K}(z))

二次奇异集 S = {Σ_j (z_j − a_j)² + r² = 0}：在一个坐标上显式解出约束（两个叶），
其余坐标作为实参数做多起点 Nelder-Mead；z_j ∈ [-1,1] 的边界候选按递归限制单独搜索。
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import pandas as pd
from scipy.optimize import bisect, minimize

from app.config import MULTITHREADING_CONFIG, OPTIMIZER_CONFIG, ORACLE_CONFIG
from app.exceptions import DomainError, NoClosedFormError, NumericalError, SingularityError
from app.numerics.convex_body import ConvexBody, dim_match_scale
from app.numerics.extremal import (
    Interval, ProductSet, check_product_hypotheses, factor_greens, green_interval, interval_branch,
    v_p_product, v_p_values
)

logger = logging.getLogger(__name__)

INTERIOR = 'interior-critical'
BOUNDARY = 'boundary'
SYMMETRIC = 'symmetric-candidate'


@dataclass(frozen=True)
class SingularSetQuadric:
    """S = {z ∈ ℂ^d : Σ_j (z_j − a_j)² + r² = 0}，a 实，r ≥ 0"""
    center: tuple
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'center', tuple(float(a) for a in self.center))
        if len(self.center) < 1:
            raise DomainError("奇异集中心至少一维")
        if not (self.offset >= 0 and math.isfinite(self.offset)):
            raise DomainError(f"奇异集参数 r 必须非负: {self.offset}")

    @classmethod
    def origin(cls, r, d):
        """z² = −r²"""
        return cls((0.0,) * d, float(r))

    @classmethod
    def real_pole(cls, alpha):
        """z₂ = ±i(z₁ − α)"""
        return cls((float(alpha), 0.0), 0.0)

    @classmethod
    def diagonal_pole(cls, alpha):
        """(z₁−α)² + (z₂−α)² = 0"""
        return cls((float(alpha), float(alpha)), 0.0)

    @property
    def dimension(self):
        return len(self.center)

    def residual(self, z):
        z = np.asarray(z, dtype=complex)
        return complex(np.sum((z - np.asarray(self.center)) ** 2) + self.offset ** 2)

    def family(self):
        """'origin-quadric'、'real-pole' 或 None"""
        a = np.asarray(self.center)
        if self.offset > 0 and np.all(a == 0):
            return 'origin-quadric'
        if self.offset == 0 and self.dimension == 2 and np.count_nonzero(a) == 1 and np.max(np.abs(a)) > 1:
            return 'real-pole'
        return None

    def to_spec(self):
        return f"quadric:a={','.join(f'{a:g}' for a in self.center)};r={self.offset:g}"


@dataclass(frozen=True)
class RateOptions:
    starts: int = OPTIMIZER_CONFIG['starts']
    max_iterations: int = OPTIMIZER_CONFIG['max_iterations']
    fatol: float = OPTIMIZER_CONFIG['fatol']
    xatol: float = OPTIMIZER_CONFIG['xatol']
    seed: int = OPTIMIZER_CONFIG['seed']
    scatter_radius: float = OPTIMIZER_CONFIG['scatter_radius']
    boundary_starts: int = OPTIMIZER_CONFIG['boundary_starts']
    polish: bool = OPTIMIZER_CONFIG['polish']
    sheets: tuple = (1, -1)
    threads: int = None


@dataclass(frozen=True)
class RateReport:
    rate: float
    log_rate: float
    minimizer: tuple
    kkt_spread: float
    classification: str
    starts_used: int
    converged_starts: int
    seed: int
    closed_form: float = None

    def to_dict(self):
        data = asdict(self)
        data['minimizer'] = [[z.real, z.imag] for z in self.minimizer]
        data['starts'] = data.pop('starts_used')
        return data


@dataclass(frozen=True)
class _Task:
    mode: str
    sheet: int
    x0: tuple
    fixed: int = None


@dataclass
class _Outcome:
    value: float
    z: np.ndarray
    x: np.ndarray
    converged: bool
    task: _Task = field(repr=False, default=None)


# ===== 约束消元 =====
def _assemble(S, U, sheet, fixed=None, K=None):
    """
    由实参数构造 S 上的点

    无固定坐标时 U 为 (x₁,y₁,…,x_{d−1},y_{d−1})；fixed=j 时 U[0] 为角度 θ，
    z_j = cos θ 经 K 的第 j 个区间映射，其余坐标同无固定情形，r'² = r² + (z_j − a_j)²。
    """
    U = np.asarray(U, dtype=float)
    a = np.asarray(S.center)
    d = S.dimension
    r2 = S.offset ** 2
    free = list(range(d))
    Z = np.empty(U.shape[:-1] + (d,), dtype=complex)
    if fixed is not None:
        t = np.cos(U[..., 0])
        factor = K.factors[fixed] if K is not None else Interval(-1.0, 1.0)
        Z[..., fixed] = factor.from_unit(t)
        r2 = r2 + (Z[..., fixed].real - a[fixed]) ** 2
        free.remove(fixed)
        U = U[..., 1:]
    params, last = free[:-1], free[-1]
    shifts = U[..., 0::2] + 1j * U[..., 1::2]
    Z[..., params] = a[params] + shifts
    w = np.sqrt(r2 + np.sum(shifts ** 2, axis=-1))
    Z[..., last] = a[last] + sheet * 1j * w
    return Z


def sheet_points(S, U, sheet):
    """向量化的叶参数化，U 最后一维为 2(d−1)"""
    return _assemble(S, U, sheet)


def objective_on_sheet(body, K, S, u, sheet):
    """
    叶上的目标函数 V_{P,K}(z(u))

    z_j = a_j + (x_j + i y_j)（j < d），z_d = a_d + sheet·i·√(r² + Σ(z_j − a_j)²)，
    构造出的点恒满足二次约束。
    """
    if S.dimension < 2:
        raise DomainError("叶参数化要求 d ≥ 2")
    z = _assemble(S, np.asarray(u, dtype=float), sheet)
    return float(v_p_values(body, K, z))


# ===== Lagrange 条件 =====
def kkt_residual(z, p, center=None):
    """
    临界点条件 m(z_j) = m(z_{j'}) 的离散程度

    m(z_j) = (log|z_j + √(z_j²−1)|)^{p−1} / ((z_j − a_j)·√(z_j²−1))，返回 max_{j,j'} |m_j − m_{j'}|。
    """
    z = np.asarray(z, dtype=complex)
    if not (p >= 1 and math.isfinite(p)):
        raise DomainError(f"要求有限的 p ≥ 1: {p}")
    on_segment = (np.abs(z.imag) <= 1e-12) & (np.abs(z.real) <= 1.0 + 1e-12)
    if np.any(on_segment):
        raise SingularityError("z 有分量位于 [-1,1] 上，Lagrange 条件不适用")
    a = np.zeros(len(z)) if center is None else np.asarray(center, dtype=float)
    g = np.asarray(green_interval(z), dtype=float)
    m = g ** (p - 1.0) / ((z - a) * interval_branch(z))
    return float(np.max(np.abs(m[:, None] - m[None, :])))


# ===== 多起点搜索 =====
def _scatter(rng, count, dim, radius):
    direction = rng.standard_normal((count, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * radius * rng.random((count, 1)) ** (1.0 / dim)


def _build_tasks(S, K, opts):
    d = S.dimension
    dim = 2 * (d - 1)
    a = np.asarray(S.center)
    rng = np.random.default_rng(opts.seed)
    tasks = []

    starts, boundary_starts = opts.starts, opts.boundary_starts
    if d >= 3:
        starts = min(starts, OPTIMIZER_CONFIG['high_dimension_starts'])
        boundary_starts = min(boundary_starts, OPTIMIZER_CONFIG['high_dimension_boundary_starts'])

    for i, u in enumerate(_scatter(rng, starts, dim, opts.scatter_radius)):
        tasks.append(_Task('free', opts.sheets[i % len(opts.sheets)], tuple(u)))

    seeds = [np.zeros(dim)]
    # 对称点 z_j = a_j ± i r/√d
    sym = S.offset / math.sqrt(d)
    patterns = range(2 ** (d - 1)) if d <= 4 else [0]
    for mask in patterns:
        u = np.zeros(dim)
        for j in range(d - 1):
            u[2 * j + 1] = -sym if (mask >> j) & 1 else sym
        seeds.append(u)
    # z_j 取 [-1,1] 中的实数
    for t in (-1.0, -0.5, 0.0, 0.5, 1.0):
        u = np.zeros(dim)
        u[0::2] = t - a[:d - 1]
        seeds.append(u)
    for sheet in opts.sheets:
        tasks.extend(_Task('free', sheet, tuple(u)) for u in seeds)

    if d >= 2:
        thetas = np.linspace(0.0, math.pi, max(boundary_starts, 1))
        extra = 2 * (d - 2)
        for j, factor in enumerate(K.factors):
            if not isinstance(factor, Interval):
                continue
            for sheet in opts.sheets:
                for theta in thetas:
                    tasks.append(_Task('boundary', sheet, (theta,) + (0.0,) * extra, j))
    return tasks


def _task_points(S, K, task, x):
    if task.mode == 'free':
        return _assemble(S, x, task.sheet)
    return _assemble(S, x, task.sheet, fixed=task.fixed, K=K)


def _support_function(body):
    """φ_P 作用于长度 d 的 Python 列表"""
    scale = body.scale
    if body.is_lq_ball:
        p = body.dual_exponent
        if p == 1:
            return lambda g: scale * sum(g)
        if math.isinf(p):
            return lambda g: scale * max(g)
        return lambda g: scale * sum(v ** p for v in g) ** (1.0 / p)
    verts = [tuple(float(c) for c in vertex) for vertex in body.shape.vertices]
    return lambda g: scale * max(sum(c * v for c, v in zip(vertex, g)) for vertex in verts)


def _scalar_objective(body, K, S, task):
    """
    单个起点的目标函数，每个起点构造一次

    前置条件已在 minimize_rate 中检查。K 为 [-1,1]^d 时逐坐标用 cmath 计算，
    取 |z ± √(z²−1)| 中较大者；其余乘积集走向量化路径。
    """
    if not K.is_unit_cube:
        return lambda x: float(body._support_array(factor_greens(K, _task_points(S, K, task, x))))

    a = S.center
    d = S.dimension
    r2 = S.offset ** 2
    sheet = task.sheet
    fixed = task.fixed if task.mode == 'boundary' else None
    free = [j for j in range(d) if j != fixed]
    params, last = free[:-1], free[-1]
    support = _support_function(body)

    def fun(x):
        x = x.tolist()
        z = [0j] * d
        total = complex(r2)
        if fixed is not None:
            t = math.cos(x[0])
            z[fixed] = complex(t)
            total += (t - a[fixed]) ** 2
            x = x[1:]
        for k, j in enumerate(params):
            shift = complex(x[2 * k], x[2 * k + 1])
            total += shift * shift
            z[j] = a[j] + shift
        z[last] = a[last] + sheet * 1j * cmath.sqrt(total)
        greens = []
        for w in z:
            root = cmath.sqrt(w * w - 1.0)
            greens.append(math.log(max(abs(w + root), abs(w - root), 1.0)))
        return support(greens)

    return fun


def _run_task(body, K, S, task, opts):
    fun = _scalar_objective(body, K, S, task)

    x = np.asarray(task.x0, dtype=float)
    options = dict(maxiter=opts.max_iterations, xatol=opts.xatol, fatol=opts.fatol,
                   adaptive=x.size > 2)
    res = minimize(fun, x, method='Nelder-Mead', options=options)
    best_x, best_value, converged = res.x, res.fun, bool(res.success)
    # 重启：以当前点为中心的小单纯形
    for step in (1e-2, 1e-4):
        simplex = np.vstack([best_x] + [best_x + step * e for e in np.eye(x.size)])
        res = minimize(fun, best_x, method='Nelder-Mead',
                       options=dict(options, initial_simplex=simplex))
        improved = res.fun < best_value - opts.fatol
        if res.fun < best_value:
            best_x, best_value = res.x, res.fun
        converged = converged or bool(res.success)
        if not improved:
            break
    z = _task_points(S, K, task, best_x)
    logger.debug(f"起点完成: mode={task.mode}, sheet={task.sheet}, value={best_value:.12g}")
    return _Outcome(float(best_value), z, best_x, converged, task)


def _classify(z, S, K):
    tol = OPTIMIZER_CONFIG['boundary_tolerance']
    for k, factor in enumerate(K.factors):
        if isinstance(factor, Interval) and bool(factor.contains(z[k], tol=tol)):
            return BOUNDARY
    shifts = (z - np.asarray(S.center)) ** 2
    scale = max(1.0, float(np.max(np.abs(shifts))))
    if np.max(np.abs(shifts - shifts[0])) <= OPTIMIZER_CONFIG['symmetry_tolerance'] * scale:
        return SYMMETRIC
    return INTERIOR


def _smooth_exponent(body):
    """光滑目标（ℓq 球且 q > 1）时返回 p = q'，否则 None"""
    if body.is_lq_ball and body.shape.q > 1:
        return body.dual_exponent
    return None


def _polish(body, K, S, outcome):
    """内部临界点的 BFGS 精修；只接受不变差的结果"""
    task = outcome.task
    fun = _scalar_objective(body, K, S, task)
    res = minimize(fun, outcome.x, method='BFGS', options=dict(gtol=1e-12, maxiter=200))
    if res.fun <= outcome.value:
        return _Outcome(float(res.fun), _task_points(S, K, task, res.x), res.x, True, task)
    return outcome


def _one_dimensional_rate(body, K, S):
    a = S.center[0]
    candidates = [np.array([a + 1j * S.offset]), np.array([a - 1j * S.offset])]
    values = [float(v_p_values(body, K, z)) for z in candidates]
    best = int(np.argmin(values))
    return candidates[best], values[best]


def minimize_rate(body, K, S, opts=None):
    """
    多起点极小化 min_{z∈S} V_{P,K}(z)

    Args:
        body (ConvexBody): 凸体
        K (ProductSet): 乘积集
        S (SingularSetQuadric): 奇异集
        opts (RateOptions): 优化参数；结果与线程数无关

    Returns:
        RateReport
    """
    opts = opts or RateOptions()
    d = S.dimension
    if body.dimension != d or K.dimension != d:
        raise DomainError(f"维数不一致: body={body.dimension}, K={K.dimension}, S={d}")
    check_product_hypotheses(body, K)

    if d == 1:
        z, value = _one_dimensional_rate(body, K, S)
        return _report(body, K, S, z, value, BOUNDARY if value == 0 else SYMMETRIC, 0.0, 0, 0, opts.seed)

    tasks = _build_tasks(S, K, opts)
    logger.info(f"开始多起点极小化: {body.to_spec()}, {S.to_spec()}, 起点数 {len(tasks)}")

    max_workers = opts.threads or MULTITHREADING_CONFIG['max_workers']
    if MULTITHREADING_CONFIG['enable_multithreading'] and max_workers != 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            outcomes = list(executor.map(lambda t: _run_task(body, K, S, t, opts), tasks))
    else:
        outcomes = [_run_task(body, K, S, t, opts) for t in tasks]

    def key(o):
        return (o.value, tuple((c.real, c.imag) for c in o.z))

    converged = [o for o in outcomes if o.converged]
    if not converged:
        incumbent = min(outcomes, key=key)
        raise NumericalError(f"所有 {len(tasks)} 个起点均未收敛", incumbent=incumbent)
    best = min(converged, key=key)

    classification = _classify(best.z, S, K)
    p = _smooth_exponent(body)
    if classification == INTERIOR and p is not None and opts.polish and best.task.mode == 'free':
        best = _polish(body, K, S, best)
        classification = _classify(best.z, S, K)

    kkt = 0.0
    if classification != BOUNDARY and p is not None:
        if np.min(np.abs(best.z - np.asarray(S.center))) > 1e-12:
            kkt = kkt_residual(best.z, p, S.center)
        else:
            logger.debug("极小点是奇异集的奇点，Lagrange 条件不适用")

    logger.info(f"极小化完成: V={best.value:.12g}, 分类={classification}, 收敛起点 {len(converged)}/{len(tasks)}")
    return _report(body, K, S, best.z, best.value, classification, kkt, len(tasks), len(converged), opts.seed)


def _report(body, K, S, z, value, classification, kkt, starts, converged, seed):
    residual = abs(S.residual(z))
    if residual > 1e-8 * max(1.0, S.offset ** 2):
        logger.warning(f"极小点的约束残差偏大: {residual:.3e}")
    exact = v_p_product(body, K, z).value
    return RateReport(
        rate=math.exp(exact),
        log_rate=exact,
        minimizer=tuple(complex(c) for c in z),
        kkt_spread=float(kkt),
        classification=classification,
        starts_used=starts,
        converged_starts=converged,
        seed=seed
    )


# ===== 闭式结果 =====
def closed_form_rate(q, S):
    """
    已知闭式的速率

    原点二次曲面：q=1 → (r+√(r²+d))/√d；q=∞ → r+√(r²+1)；d=2 且 q ≥ 2 → r+√(r²+1)。
    实极点 (α,0)：q=1 → α；q=∞ → α−1+√((α−1)²+1)。
    """
    family = S.family()
    d = S.dimension
    if family == 'origin-quadric':
        r = S.offset
        if q == 1:
            return (r + math.sqrt(r * r + d)) / math.sqrt(d)
        if math.isinf(q) or (d == 2 and q >= 2):
            return r + math.sqrt(r * r + 1)
    elif family == 'real-pole':
        alpha = float(np.max(np.abs(S.center)))
        if q == 1:
            return alpha
        if math.isinf(q):
            return alpha - 1 + math.sqrt((alpha - 1) ** 2 + 1)
    raise NoClosedFormError(f"没有闭式速率: q={q}, {S.to_spec()}")


def scaled_rate(R, c):
    """R(cP,K) = R(P,K)^c"""
    if not R > 1:
        raise DomainError(f"要求 R > 1: {R}")
    if not c > 0:
        raise DomainError(f"要求 c > 0: {c}")
    return R ** c


def find_crossover(d=2, q=2.0, lo=0.1, hi=10.0, xtol=1e-6):
    """
    总次数与体积归一化后的 P_q 次数速率相等的 r

    g(r) = log R(P₁,K) − c(q)·log R(P_q,K)，在 [lo, hi] 上二分求根。
    """
    if d != 2 and not math.isinf(q):
        raise DomainError(f"d={d} 时只有 q=∞ 有闭式速率")
    c = dim_match_scale(q, d)

    def g(r):
        S = SingularSetQuadric.origin(r, d)
        return math.log(closed_form_rate(1, S)) - c * math.log(closed_form_rate(q, S))

    if g(lo) * g(hi) > 0:
        raise NumericalError(f"区间 [{lo}, {hi}] 内 g 不变号")
    root = bisect(g, lo, hi, xtol=xtol)
    logger.info(f"交叉点 r = {root:.10g}")
    return root


def normalized_comparison(S, qs=(1.0, 2.0, math.inf), K=None, opts=None):
    """
    各 P_q 的速率及体积归一化速率 R^{c(q)}

    有闭式时用闭式，否则调用 minimize_rate。
    """
    d = S.dimension
    K = K or ProductSet.cube(d)
    rows = []
    for q in qs:
        try:
            R = closed_form_rate(q, S)
            source = 'closed-form'
        except NoClosedFormError:
            R = minimize_rate(ConvexBody.lq(q, d), K, S, opts).rate
            source = 'numeric'
        c = dim_match_scale(q, d)
        rows.append({'q': q, 'c': c, 'R': R, 'R_normalized': scaled_rate(R, c), 'source': source})
    return pd.DataFrame(rows)


def rate_versus_dimension(q, r, dims):
    """原点二次曲面上闭式速率随维数的变化"""
    rows = []
    for d in dims:
        S = SingularSetQuadric.origin(r, d)
        rows.append({'d': d, 'R': closed_form_rate(q, S), 'c': dim_match_scale(q, d)})
    return pd.DataFrame(rows)


# ===== 稠密扫描 =====
@dataclass(frozen=True)
class SweepResult:
    value: float
    minimizer: tuple
    u: tuple
    sheet: int


def dense_sheet_sweep(body, K, S, half_width=None, count=None, zoom_levels=None,
                      zoom_count=None, sheets=(1, -1)):
    """
    d=2 时在两个叶上做 count×count 的网格扫描，再逐级放大最优网格单元

    与 minimize_rate 完全独立，用作全局极小的暴力校验。
    """
    if S.dimension != 2:
        raise DomainError("稠密扫描只支持 d=2")
    half_width = half_width or ORACLE_CONFIG['half_width']
    count = count or ORACLE_CONFIG['count']
    zoom_levels = ORACLE_CONFIG['zoom_levels'] if zoom_levels is None else zoom_levels
    zoom_count = zoom_count or ORACLE_CONFIG['zoom_count']

    best = None
    axis = np.linspace(-half_width, half_width, count)
    step = axis[1] - axis[0]
    for sheet in sheets:
        grid = np.stack(np.meshgrid(axis, axis, indexing='ij'), axis=-1).reshape(-1, 2)
        values = v_p_values(body, K, _assemble(S, grid, sheet))
        i = int(np.argmin(values))
        center, value, width = grid[i], float(values[i]), step
        for _ in range(zoom_levels):
            local = np.linspace(-width, width, zoom_count)
            grid = center + np.stack(np.meshgrid(local, local, indexing='ij'), axis=-1).reshape(-1, 2)
            values = v_p_values(body, K, _assemble(S, grid, sheet))
            i = int(np.argmin(values))
            if values[i] <= value:
                center, value = grid[i], float(values[i])
            width = 2.0 * width / (zoom_count - 1)
        if best is None or value < best.value:
            z = _assemble(S, center, sheet)
            best = SweepResult(value, tuple(complex(c) for c in z), tuple(center), sheet)
    return best


def with_closed_form(report, q, S):
    """如有闭式则填入 closed_form 字段"""
    try:
        return replace(report, closed_form=closed_form_rate(q, S))
    except NoClosedFormError:
        return report
