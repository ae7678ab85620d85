#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
复现套件：闭式速率、文中数值、交叉点、经验速率与 Fekete 不变量

每项检查返回若干行 (criterion, case, observed, expected, tolerance, passed)，
run_suite 汇总成一张 pandas 表。
"""

import logging
import math
import time

import numpy as np
import pandas as pd

from app.config import RUNTIME_LIMITS
from app.numerics.approx import FunctionSpec, cheb_coeffs, dn_series, lobatto_points, truncate_to_body
from app.numerics.convex_body import ConvexBody, enumerate_index_set, volume
from app.numerics.extremal import ProductSet, bernstein_walsh_ratio, v_p_values
from app.numerics.fekete import (approx_fekete, build_mesh, exhaustive_fekete_1d, interp_error,
                                 interpolation_series)
from app.numerics.rate import (RateOptions, SingularSetQuadric, closed_form_rate, dense_sheet_sweep,
                               find_crossover, minimize_rate, scaled_rate)
from app.tools import output

logger = logging.getLogger(__name__)

SUITES = ('paper', 'quick')


def _row(criterion, case, observed, expected, tolerance, relative=False, passed=None):
    if passed is None:
        error = abs(observed - expected)
        if relative:
            error /= abs(expected)
        passed = error <= tolerance
    return {
        'criterion': criterion,
        'case': case,
        'observed': float(observed),
        'expected': float(expected) if expected is not None else math.nan,
        'tolerance': tolerance,
        'passed': bool(passed)
    }


def _rate(q, S, opts):
    d = S.dimension
    return minimize_rate(ConvexBody.lq(q, d), ProductSet.cube(d), S, opts).rate


def _runtime_row(criterion, case, elapsed, limit):
    """只记录是否在上限内，结果表不含耗时"""
    within = elapsed < limit
    if not within:
        logger.warning(f"{criterion} {case} 超时: {elapsed:.1f}s > {limit:g}s")
    return _row(criterion, f"{case} < {limit:g}s", float(within), 1.0, 0.0, passed=within)


def _timed(check):
    def run(*args, **kwargs):
        start = time.perf_counter()
        rows = check(*args, **kwargs)
        return rows, time.perf_counter() - start
    return run


def check_closed_forms(opts, quick=False):
    rows = []
    radii = (1.0,) if quick else (0.25, 1.0, 2.0)
    for r in radii:
        for d in (2, 3):
            for q in (1.0, math.inf, 2.0):
                if q == 2.0 and d != 2:
                    continue
                S = SingularSetQuadric.origin(r, d)
                case = f"q={q:g}, d={d}, r={r:g}"
                rate, elapsed = _timed(_rate)(q, S, opts)
                rows.append(_row('1 closed form', case, rate, closed_form_rate(q, S), 1e-4, relative=True))
                rows.append(_runtime_row('1 runtime', case, elapsed, RUNTIME_LIMITS['closed_form_case']))
    return rows


def check_reference_decimals(opts):
    S = SingularSetQuadric.origin(0.25, 2)
    return [
        _row('2 decimals', 'R(P1), r=0.25', _rate(1.0, S, opts), 1.19228, 5e-5),
        _row('2 decimals', 'R(P2)^sqrt(2/pi), r=0.25',
             scaled_rate(_rate(2.0, S, opts), math.sqrt(2 / math.pi)), 1.2182, 5e-4)
    ]


def check_crossover():
    return [_row('3 crossover', 'd=2, q=2', find_crossover(2), 2.1090, 1e-3)]


def check_real_pole(opts, quick=False):
    rows = []
    for alpha in ((1.5,) if quick else (1.25, 1.5, 2.0)):
        S = SingularSetQuadric.real_pole(alpha)
        for q in (1.0, math.inf):
            rows.append(_row('4 real pole', f"q={q:g}, alpha={alpha:g}",
                             _rate(q, S, opts), closed_form_rate(q, S), 1e-4))
    return rows


def check_diagonal_pole(opts):
    S = SingularSetQuadric.diagonal_pole(1.25)
    r2, rinf = _rate(2.0, S, opts), _rate(math.inf, S, opts)
    return [
        _row('5 diagonal pole', 'R(P2), alpha=1.25', r2, 2.0518, 1e-3),
        _row('5 diagonal pole', 'R(Pinf), alpha=1.25', rinf, 2.1531, 1e-3),
        _row('5 diagonal pole', 'R(P2) < R(Pinf)', rinf - r2, 0.0, 0.0, passed=r2 < rinf)
    ]


def check_empirical_rates(quick=False):
    f = FunctionSpec.quadric_runge((0.0, 0.0), 1.0)
    n_range = range(4, 17 if quick else 25)
    fitted = {}
    rows = []
    for q in (1.0, 2.0, math.inf):
        expected = closed_form_rate(q, f.singular_set())
        fitted[q] = dn_series(f, ConvexBody.lq(q, 2), n_range).fitted_rate
        rows.append(_row('6 empirical rate', f"q={q:g}", fitted[q], expected, 0.10, relative=True))
    rows.append(_row('6 empirical rate', 'R(P1) < R(P2)', fitted[2.0] - fitted[1.0], 0.0, 0.0,
                     passed=fitted[1.0] < fitted[2.0]))
    rows.append(_row('6 empirical rate', 'R(P2) ~ R(Pinf)', fitted[2.0], fitted[math.inf], 0.03, relative=True))
    return rows


def check_dense_oracle(opts):
    rows = []
    K = ProductSet.cube(2)
    families = (('origin r=1', SingularSetQuadric.origin(1.0, 2)),
                ('real pole 1.5', SingularSetQuadric.real_pole(1.5)),
                ('diagonal 1.25', SingularSetQuadric.diagonal_pole(1.25)))
    for label, S in families:
        for q in (1.0, 2.0, math.inf):
            body = ConvexBody.lq(q, 2)
            numeric = minimize_rate(body, K, S, opts).log_rate
            sweep = dense_sheet_sweep(body, K, S).value
            rows.append(_row('7 dense oracle', f"{label}, q={q:g}", numeric, sweep, 1e-3))
    return rows


def check_fekete(quick=False):
    rows = []
    K1 = ProductSet.cube(1)
    simplex1 = ConvexBody.simplex(1)
    mesh = build_mesh(K1, 41)
    for n in range(1, 5):
        fs = approx_fekete(mesh, simplex1, n)
        _, exact = exhaustive_fekete_1d(mesh, simplex1, n)
        rows.append(_row('8 fekete', f"d=1 exhaustive n={n}", fs.vdm_log_abs, exact, 1e-9))

    K = ProductSet.cube(2)
    body = ConvexBody.simplex(2)
    fs = approx_fekete(build_mesh(K, 40), body, 8)
    kron = np.abs(fs.lagrange_values(fs.nodes) - np.eye(fs.d_n)).max()
    rows.append(_row('8 fekete', 'Kronecker n=8', kron, 0.0, 1e-8))
    rows.append(_row('8 fekete', 'mesh psi n=8', fs.max_psi_on_mesh, 1.0, 1e-8,
                     passed=fs.max_psi_on_mesh <= 1 + 1e-8))
    monomial = FunctionSpec.from_callable(lambda t: t[..., 0] ** 3 * t[..., 1] ** 5, label='t1^3*t2^5')
    error = interp_error(fs, monomial, build_mesh(K, 61))
    rows.append(_row('8 fekete', 'reproduction n=8', error, 0.0, 1e-8))

    f = FunctionSpec.quadric_runge((0.0, 0.0), 1.0)
    n_values = range(2, 9 if quick else 11)
    _, rate = interpolation_series(K, body, f, n_values, 40, 61)
    rows.append(_row('8 fekete', 'interpolation rate P1', rate, closed_form_rate(1.0, f.singular_set()), 0.25,
                     relative=True))
    return rows


def check_structure():
    rows = []
    for q in (1.0, 2.0, math.inf):
        body = ConvexBody.lq(q, 2)
        ratio = enumerate_index_set(body, 64).d_n / 64 ** 2
        rows.append(_row('9 structure', f"d_n/n^d q={q:g}", ratio, volume(body), 0.10, relative=True))
    body = ConvexBody.lq(2.0, 2)
    closed = True
    for n in range(7):
        for m in range(7):
            target = enumerate_index_set(body, n + m)
            outer = enumerate_index_set(body, m).indices
            for J in enumerate_index_set(body, n).indices:
                closed &= all(tuple(J + Jp) in target for Jp in outer)
    rows.append(_row('9 structure', 'ring closure P2 n,m<=6', float(closed), 1.0, 0.0))

    K = ProductSet.cube(2)
    rng = np.random.default_rng(9)
    samples = rng.uniform(-2, 2, (2000, 2)) + 1j * rng.uniform(-2, 2, (2000, 2))
    values = [v_p_values(ConvexBody.lq(q, 2), K, samples) for q in (1.0, 2.0, math.inf)]
    monotone = np.all(np.diff(values, axis=0) >= -1e-12)
    rows.append(_row('9 structure', 'V monotone in q', float(monotone), 1.0, 0.0))
    homogeneity = np.abs(v_p_values(body.scaled(2.0), K, samples) - 2.0 * values[1]).max()
    rows.append(_row('9 structure', 'V_{2P} = 2 V_P', homogeneity, 0.0, 1e-12))

    # Bernstein-Walsh: 截断的 Runge 多项式在复样本上满足 |p| ≤ ‖p‖_K e^{nV}
    coeffs = cheb_coeffs(FunctionSpec.quadric_runge((0.0, 0.0), 1.0), 2, 32)
    grid = lobatto_points(201)
    k_points = np.stack(np.meshgrid(grid, grid, indexing='ij'), axis=-1).reshape(-1, 2)
    for q in (1.0, 2.0, math.inf):
        body = ConvexBody.lq(q, 2)
        ratio = bernstein_walsh_ratio(truncate_to_body(coeffs, body, 8), body, K, samples, 8, k_points)
        rows.append(_row('9 structure', f"Bernstein-Walsh q={q:g} n=8", ratio, 1.0, 1e-8,
                         passed=ratio <= 1 + 1e-8))
    return rows


def _with_runtime(criterion, check, quick, limit):
    rows, elapsed = _timed(check)(quick)
    return rows + [_runtime_row(criterion, 'suite', elapsed, limit)]


def run_suite(suite='paper', opts=None):
    """
    运行复现套件

    Returns:
        pandas.DataFrame: 每行一个检查（不含耗时，保证输出可复现）
    """
    if suite not in SUITES:
        raise ValueError(f"未知的套件: {suite}（可用: {', '.join(SUITES)}）")
    quick = suite == 'quick'
    opts = opts or RateOptions()
    checks = [
        ('closed forms', lambda: check_closed_forms(opts, quick)),
        ('reference decimals', lambda: check_reference_decimals(opts)),
        ('crossover', check_crossover),
        ('real pole', lambda: check_real_pole(opts, quick)),
        ('diagonal pole', lambda: check_diagonal_pole(opts)),
        ('empirical rates', lambda: _with_runtime('6 runtime', check_empirical_rates, quick,
                                                  RUNTIME_LIMITS['empirical_rates'])),
        ('fekete', lambda: _with_runtime('8 runtime', check_fekete, quick, RUNTIME_LIMITS['fekete'])),
        ('structure', check_structure)
    ]
    if not quick:
        checks.insert(6, ('dense oracle', lambda: check_dense_oracle(opts)))

    rows = []
    for name, check in checks:
        start = time.perf_counter()
        logger.info(f"复现检查: {name}")
        result = check()
        elapsed = time.perf_counter() - start
        rows.extend(result)
        logger.info(f"{name} 完成: {sum(r['passed'] for r in result)}/{len(result)} 通过, 用时 {elapsed:.1f}s")
    return pd.DataFrame(rows)


def format_table(table):
    """打印用的对照表"""
    shown = table.copy()
    shown['passed'] = shown['passed'].map({True: 'PASS', False: 'FAIL'})
    return output.to_text(shown)
