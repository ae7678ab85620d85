#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
乘积基与多项式

区间因子使用（仿射映射后的）第一类 Chebyshev 多项式，圆盘因子使用归一化单项式。
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev

from app.numerics.extremal import Interval


def axis_vander(factor, z, degree):
    """一维 Vandermonde 矩阵，形状 (..., degree+1)"""
    t = factor.to_unit(np.asarray(z))
    if isinstance(factor, Interval):
        return chebyshev.chebvander(t, degree)
    return t[..., None] ** np.arange(degree + 1)


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """以格点集为指标的乘积基 e_J(z) = Π_k b_{J_k}(z_k)"""
    domain: object
    index_set: object

    @property
    def size(self):
        return self.index_set.d_n

    def axis_degrees(self):
        indices = self.index_set.indices
        return [int(indices[:, k].max()) if len(indices) else 0 for k in range(self.domain.dimension)]

    def evaluate(self, Z):
        """Z 形状 (..., d)，返回 (..., d_n)"""
        Z = np.asarray(Z)
        indices = self.index_set.indices
        result = None
        for k, (factor, degree) in enumerate(zip(self.domain.factors, self.axis_degrees())):
            values = axis_vander(factor, Z[..., k], degree)[..., indices[:, k]]
            result = values if result is None else result * values
        return result


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Σ_J c_J e_J(z)"""
    basis: ProductBasis
    coeffs: np.ndarray

    @property
    def index_set(self):
        return self.basis.index_set

    def evaluate(self, Z):
        return self.basis.evaluate(Z) @ self.coeffs

    def evaluate_tensor_grid(self, axes):
        """
        在张量网格 axes[0] × ⋯ × axes[d−1] 上求值

        稠密系数张量逐轴收缩，避免构造 (网格点数 × d_n) 的矩阵。
        """
        degrees = self.basis.axis_degrees()
        dense = np.zeros([m + 1 for m in degrees], dtype=np.result_type(self.coeffs, float))
        dense[tuple(self.index_set.indices.T)] = self.coeffs
        result = dense
        for factor, degree, points in zip(self.basis.domain.factors, degrees, axes):
            result = np.tensordot(result, axis_vander(factor, points, degree), axes=([0], [1]))
        return result
