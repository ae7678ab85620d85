#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试 Green 函数、乘积公式 V_{P,K}、H_P 与 Bernstein-Walsh 不等式
"""

import math
import os
import sys

import numpy as np

# 添加项目路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from app.exceptions import DomainError, HypothesisError, SingularityError
from app.numerics.approx import FunctionSpec, cheb_coeffs, truncate_to_body
from app.numerics.convex_body import ConvexBody
from app.numerics.extremal import (Disk, Interval, ProductSet, axis_values, bernstein_walsh_ratio,
                                   ellipse_semi_axes, evaluate_grid, green_gradient, green_interval,
                                   green_univariate, h_p, sublevel_member, v_p_product, v_p_values)

CUBE = ProductSet.cube(2)
P1 = ConvexBody.lq(1, 2)
P2 = ConvexBody.lq(2, 2)
PINF = ConvexBody.lq(math.inf, 2)


def _raises(error, func, *args):
    try:
        func(*args)
    except error:
        return True
    return False


def _polydisk(rng, count, radius, d=2):
    r = radius * np.sqrt(rng.uniform(0, 1, (count, d)))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, (count, d)))


def test_green_interval_examples():
    assert green_interval(0.5) == 0.0
    assert green_interval(-1.0) == 0.0
    for r in (0.25, 1.0, 3.0):
        assert math.isclose(green_interval(1j * r), math.log(r + math.sqrt(r * r + 1)), rel_tol=1e-12)
    assert math.isclose(green_interval(2.0), math.log(2 + math.sqrt(3)), rel_tol=1e-12)
    assert math.isclose(green_interval(-2.0), math.log(2 + math.sqrt(3)), rel_tol=1e-12)
    a, b = ellipse_semi_axes(2 + math.sqrt(3))
    assert math.isclose(a, 2.0) and math.isclose(b, math.sqrt(3))


def test_green_interval_branch_everywhere():
    rng = np.random.default_rng(3)
    z = rng.normal(size=500) * 3 + 1j * rng.normal(size=500) * 3
    values = np.asarray(green_interval(z))
    assert np.all(values >= 0)
    # 两个根中 |z±w| 的乘积为 1，取较大者
    w = np.sqrt(z * z - 1)
    expected = np.log(np.maximum(np.abs(z + w), np.abs(z - w)))
    assert np.allclose(values, expected, atol=1e-12)


def test_ellipse_semi_axes_edge():
    assert ellipse_semi_axes(1.0) == (1.0, 0.0)
    assert _raises(DomainError, ellipse_semi_axes, 0.5)


def test_green_univariate_examples():
    assert green_univariate(Interval(-1, 1), 0.3) == 0.0
    assert math.isclose(green_univariate(Disk(0, 1), 2), math.log(2))
    assert green_univariate(Disk(0, 1), 0.5j) == 0.0
    for r in (0.5, 2.0):
        assert math.isclose(green_univariate(Interval(0, 2), 1 + 1j * r), math.log(r + math.sqrt(r * r + 1)),
                            rel_tol=1e-12)
    assert _raises(DomainError, Interval, 1, 1)
    assert _raises(DomainError, Disk, 0, 0)


def test_v_p_product_examples():
    assert v_p_product(P2, CUBE, [0.2, -0.9]).value == 0.0
    for r in (0.5, 1.0, 2.0):
        z = [1j * r / math.sqrt(2)] * 2
        level = math.log(r / math.sqrt(2) + math.sqrt(r * r / 2 + 1))
        assert math.isclose(v_p_product(P2, CUBE, z).value, math.sqrt(2) * level, rel_tol=1e-12)
        assert math.isclose(v_p_product(P1, CUBE, z).value, level, rel_tol=1e-12)
        assert math.isclose(v_p_product(PINF, CUBE, z).value, 2 * level, rel_tol=1e-12)
    value = v_p_product(P1, CUBE, [1j, 2])
    assert math.isclose(value.per_factor[1], math.log(2 + math.sqrt(3)))
    assert math.isclose(value.value, max(value.per_factor))


def test_v_p_product_preconditions():
    assert _raises(DomainError, v_p_product, P2, ProductSet.cube(3), [0, 0])
    assert _raises(DomainError, v_p_product, P2, CUBE, [0, 0, 0])
    kite = ConvexBody.polytope([(0, 0), (1, 0), (3, 3), (0, 1)])
    assert _raises(HypothesisError, v_p_product, kite, CUBE, [2j, 0])


def test_zero_on_K():
    rng = np.random.default_rng(4)
    points = rng.uniform(-1, 1, (1000, 2)).astype(complex)
    for body in (P1, P2, PINF, ConvexBody.polytope([(0, 0), (2, 0), (0, 2), (2, 2)])):
        assert np.all(v_p_values(body, CUBE, points) == 0.0)


def test_monotonicity_in_q():
    rng = np.random.default_rng(5)
    Z = _polydisk(rng, 1000, 3.0)
    values = [v_p_values(ConvexBody.lq(q, 2), CUBE, Z) for q in (1, 2, 3, 7, math.inf)]
    for lower, upper in zip(values, values[1:]):
        assert np.all(lower <= upper + 1e-12)


def test_scaling_identity():
    rng = np.random.default_rng(6)
    Z = _polydisk(rng, 200, 2.0)
    for body in (P1, P2, PINF):
        for c in (0.5, 2.0, 3.7):
            assert np.allclose(v_p_values(body.scaled(c), CUBE, Z), c * v_p_values(body, CUBE, Z), rtol=1e-12)


def test_disk_factor_product():
    K = ProductSet((Interval(-1, 1), Disk(0, 1)))
    value = v_p_product(P2, K, [2.0, 3.0])
    assert math.isclose(value.value, math.hypot(math.log(2 + math.sqrt(3)), math.log(3)))
    assert v_p_product(P2, K, [0.5, 0.5j]).value == 0.0
    assert not K.is_box


def test_h_p_examples():
    torus = np.exp(1j * np.array([0.3, 2.0]))
    assert abs(h_p(P2, torus).value) < 1e-15
    assert math.isclose(h_p(ConvexBody.simplex(2), [2, 1]).value, math.log(2))
    assert math.isclose(h_p(P2, [math.e, math.e]).value, math.sqrt(2))
    inner = h_p(ConvexBody.simplex(2), [0.5, 2])
    assert inner.regime == 'direct' and math.isclose(inner.value, math.log(2))
    assert h_p(P2, [0.5, 0.5]).value == 0.0
    assert not h_p(P2, [0, 3]).degenerate
    assert math.isclose(h_p(P2, [0, 3]).value, math.log(3))


def test_green_gradient():
    g = green_gradient(2.0)
    assert np.allclose(g, [1 / math.sqrt(3), 0.0], atol=1e-14)
    for r in (0.5, 2.0):
        g = green_gradient(1j * r)
        assert np.allclose(g, [0.0, 1 / math.sqrt(r * r + 1)], atol=1e-14)
    assert _raises(SingularityError, green_gradient, 0.3)
    assert _raises(SingularityError, green_gradient, 1.0)


def test_green_gradient_finite_differences():
    rng = np.random.default_rng(7)
    h = 1e-6
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        distance = abs(z.imag) if -1 <= z.real <= 1 else abs(z - math.copysign(1, z.real))
        if distance <= 0.1:
            continue
        fd = [(green_interval(z + h) - green_interval(z - h)) / (2 * h),
              (green_interval(z + 1j * h) - green_interval(z - 1j * h)) / (2 * h)]
        assert np.allclose(green_gradient(z), fd, atol=1e-5)
        conj = green_gradient(z.conjugate())
        assert np.allclose(conj, green_gradient(z) * [1, -1], atol=1e-14)
        checked += 1


def test_sublevel_member():
    assert sublevel_member(P1, CUBE, [0.3, -0.2], 1.01)
    assert not sublevel_member(P1, CUBE, [1j, 0], 1 + math.sqrt(2))
    assert sublevel_member(P1, CUBE, [1j, 0], 2.5)
    assert _raises(DomainError, sublevel_member, P1, CUBE, [0, 0], 1.0)


def test_bernstein_walsh_inequality():
    n = 8
    f = FunctionSpec.quadric_runge((0.0, 0.0), 1.0)
    coeffs = cheb_coeffs(f, 2, 32)
    rng = np.random.default_rng(8)
    samples = _polydisk(rng, 41 * 41, 2.0)
    grid = np.cos(np.pi * np.arange(201) / 200)
    k_points = np.stack(np.meshgrid(grid, grid, indexing='ij'), axis=-1).reshape(-1, 2)
    for body in (P1, P2, PINF):
        poly = truncate_to_body(coeffs, body, n)
        assert bernstein_walsh_ratio(poly, body, CUBE, samples, n, k_points) <= 1 + 1e-8


def test_evaluate_grid_thread_invariant():
    axes = [axis_values((-2, 2, 9), (-1, 1, 5)), axis_values((-2, 2, 7), (0, 1, 3))]
    single = evaluate_grid(P2, CUBE, axes, threads=1, chunk_size=50)
    multi = evaluate_grid(P2, CUBE, axes, threads=4, chunk_size=50)
    assert list(single.columns) == ['x1', 'y1', 'x2', 'y2', 'V']
    assert len(single) == 45 * 21
    assert single.equals(multi)
    assert _raises(DomainError, evaluate_grid, P2, CUBE, axes[:1])


def main():
    """运行所有测试"""
    print("\n" + "🧪 " * 20)
    print("极值函数测试")
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
