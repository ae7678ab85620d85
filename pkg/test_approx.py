#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试 Chebyshev 分析、截断到 nP 以及 D_n 速率拟合
"""

import math
import os
import sys

import numpy as np
import pandas as pd

# 添加项目路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from app.exceptions import DomainError, NumericalError
from app.numerics.approx import (FunctionSpec, analysis_degree, cheb_coeffs, dn_estimate, dn_series,
                                 eval_grid_size, fit_rate, lobatto_points, truncate_to_body)
from app.numerics.convex_body import ConvexBody, enumerate_index_set
from app.numerics.rate import closed_form_rate

P1 = ConvexBody.lq(1, 2)
P2 = ConvexBody.lq(2, 2)
PINF = ConvexBody.lq(math.inf, 2)
RUNGE = FunctionSpec.quadric_runge((0.0, 0.0), 1.0)
MONOMIAL = FunctionSpec.from_callable(lambda t: t[..., 0] * t[..., 1] ** 2, label='t1*t2^2')


def _raises(error, func, *args, **kwargs):
    try:
        func(*args, **kwargs)
    except error:
        return True
    return False


def test_lobatto_points():
    assert np.allclose(lobatto_points(3), [1.0, 0.0, -1.0], atol=1e-15)
    assert np.array_equal(lobatto_points(1), [1.0])
    assert _raises(DomainError, lobatto_points, 0)


def test_monomial_coefficients():
    coeffs = cheb_coeffs(MONOMIAL, 2, 4)
    expected = np.zeros((5, 5))
    expected[1, 0] = 0.5
    expected[1, 2] = 0.5
    assert np.allclose(coeffs.coeffs, expected, atol=1e-14)
    assert coeffs.m == 4 and coeffs.dimension == 2


def test_runge_coefficients_decay():
    f = FunctionSpec.quadric_runge((0.0,), 1.0)
    c = cheb_coeffs(f, 1, 8).coeffs
    assert np.all(np.abs(c[1::2]) < 1e-14)
    even = c[0::2]
    assert np.all(np.sign(even[1:]) == -np.sign(even[:-1]))
    ratio = 1 / (1 + math.sqrt(2)) ** 2
    # 插值系数含混叠项，比值只在首项附近精确
    assert abs(even[2] / even[1] + ratio) < 1e-3
    assert abs(even[3] / even[2] + ratio) < 1e-2


def test_interpolation_at_grid_points():
    m = 12
    coeffs = cheb_coeffs(RUNGE, 2, m)
    poly = truncate_to_body(coeffs, PINF, m)
    axes = [lobatto_points(m + 1)] * 2
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
    assert np.max(np.abs(poly.evaluate_tensor_grid(axes) - RUNGE.evaluate(grid))) < 1e-12
    # 张量收缩与逐点求值一致
    assert np.allclose(poly.evaluate(grid), poly.evaluate_tensor_grid(axes), atol=1e-13)


def test_zero_degree_analysis():
    coeffs = cheb_coeffs(RUNGE, 2, 0)
    assert coeffs.coeffs.shape == (1, 1)
    assert math.isclose(float(coeffs.coeffs[0, 0]), 1 / 3)


def test_truncate_to_body():
    coeffs = cheb_coeffs(RUNGE, 2, 8)
    poly = truncate_to_body(coeffs, P2, 2)
    assert poly.index_set.as_tuples() == enumerate_index_set(P2, 2).as_tuples()
    assert len(poly.coeffs) == 6
    assert len(truncate_to_body(coeffs, P1, 3).coeffs) == 10
    assert _raises(DomainError, truncate_to_body, coeffs, PINF, 9)


def test_pole_on_K_rejected():
    assert _raises(DomainError, cheb_coeffs, FunctionSpec.quadric_runge((0.5, 0.0), 0.0), 2, 8)
    assert _raises(DomainError, cheb_coeffs, FunctionSpec.quadric_runge((1.0, 0.3), 0.0), 2, 8)
    assert _raises(DomainError, cheb_coeffs, FunctionSpec.quadric_runge((0.0,), 1.0), 2, 8)
    singular = FunctionSpec.from_callable(lambda t: 1 / t[..., 0], label='1/t1')
    assert _raises(DomainError, cheb_coeffs, singular, 2, 4)


def test_singular_set_of_runge_function():
    S = RUNGE.singular_set()
    assert S.center == (0.0, 0.0) and S.offset == 1.0
    assert abs(closed_form_rate(1, S) - 1.93185) < 1e-5
    assert abs(closed_form_rate(2, S) - 2.41421) < 1e-5
    assert _raises(DomainError, MONOMIAL.singular_set)


def test_exact_reproduction():
    assert dn_estimate(MONOMIAL, P1, 3) < 1e-12
    assert dn_estimate(MONOMIAL, PINF, 2) < 1e-12
    assert dn_estimate(MONOMIAL, P1, 2) > 0.1


def test_analysis_degree_rule():
    assert analysis_degree(P1, 4) == 32
    assert analysis_degree(P1, 24) == 48
    assert analysis_degree(P1.scaled(2), 24) == 96
    assert eval_grid_size(2) == 201 and eval_grid_size(3) == 65
    assert _raises(DomainError, eval_grid_size, 4)


def test_nesting_across_bodies():
    for n in range(6, 13, 2):
        values = [dn_estimate(RUNGE, body, n) for body in (P1, P2, PINF)]
        assert values[2] < values[1] < values[0]


def test_series_rates():
    n_range = range(4, 25)
    s1 = dn_series(RUNGE, P1, n_range)
    s2 = dn_series(RUNGE, P2, n_range)
    sinf = dn_series(RUNGE, PINF, n_range)
    assert abs(s1.fitted_rate - 1.93185) < 0.10 * 1.93185
    assert abs(s2.fitted_rate - 2.41421) < 0.10 * 2.41421
    assert abs(sinf.fitted_rate - 2.41421) < 0.10 * 2.41421
    assert s1.fitted_rate < s2.fitted_rate
    assert abs(s2.fitted_rate - sinf.fitted_rate) < 0.03 * sinf.fitted_rate
    for series, predicted in ((s1, 1.93185), (s2, 2.41421), (sinf, 2.41421)):
        assert series.is_nonincreasing()
        assert series.fitted_rate <= 1.1 * predicted
        assert list(series.rows.columns) == ['n', 'd_n', 'D_hat']
        assert series.fit_range == (8, 24)


def test_real_pole_rate():
    f = FunctionSpec.quadric_runge((1.25, 0.0), 0.0)
    series = dn_series(f, P1, range(4, 25))
    assert abs(series.fitted_rate - 1.25) < 0.10 * 1.25


def test_diagonal_pole_ordering():
    f = FunctionSpec.quadric_runge((1.25, 1.25), 0.0)
    r2 = dn_series(f, P2, range(4, 25)).fitted_rate
    rinf = dn_series(f, PINF, range(4, 25)).fitted_rate
    assert r2 < rinf


def test_scaled_body_consistency():
    for n in range(4, 13, 4):
        assert math.isclose(dn_estimate(RUNGE, P2.scaled(2), n), dn_estimate(RUNGE, P2, 2 * n), rel_tol=1e-9)
    half = P2.scaled(0.5)
    for n in range(8, 25, 4):
        ratio = dn_estimate(RUNGE, half, n) / dn_estimate(RUNGE, P2, math.ceil(n / 2))
        assert 1 / 3 <= ratio <= 3


def test_grid_robustness():
    for n in (8, 16, 24):
        coarse = dn_estimate(RUNGE, P1, n)
        fine = dn_estimate(RUNGE, P1, n, eval_grid=401)
        assert abs(fine - coarse) < 0.02 * fine


def test_fit_rate_direct():
    n = np.arange(0, 20)
    rows = pd.DataFrame({'n': n, 'd_n': n + 1, 'D_hat': 3.0 * 2.0 ** (-n)})
    assert math.isclose(fit_rate(rows), 2.0, rel_tol=1e-10)
    assert math.isclose(fit_rate(rows, (10, 15)), 2.0, rel_tol=1e-10)
    assert _raises(NumericalError, fit_rate, rows.iloc[:6])
    floor = rows.assign(D_hat=np.where(n > 5, 1e-14, rows['D_hat']))
    assert _raises(NumericalError, fit_rate, floor)


def test_series_of_exact_polynomial_has_no_rate():
    series = dn_series(MONOMIAL, P1, range(3, 10))
    assert math.isnan(series.fitted_rate)
    assert series.fit_range is None
    assert _raises(DomainError, dn_series, RUNGE, P1, [4, 4, 5])
    assert _raises(DomainError, dn_series, RUNGE, P1, [])


def main():
    """运行所有测试"""
    print("\n" + "🧪 " * 20)
    print("D_n 估计测试")
    print("🧪 " * 20 + "\n")

    tests = [(name, func) for name, func in sorted(globals().items()) if name.startswith('test_') and callable(func)]
    failed = 0
    for name, func in tests:
        try:
            func()
            print(f"{name}: ✅ 通过")
        except Exception as e:
            failed += 1
            print(f"{name}: ❌ 失败 ({type(e).__name__}: {e})")

    print("\n" + "=" * 60)
    print(f"总计: {len(tests)} 个测试, 通过: {len(tests) - failed} 个, 失败: {failed} 个")
    print("=" * 60)
    return failed == 0


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
