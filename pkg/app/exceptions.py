#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常定义
"""


class PDegreeError(Exception):
    """所有计算错误的基类"""


class DomainError(PDegreeError, ValueError):
    """输入不满足前置条件"""


class SpecParseError(DomainError):
    """规格字符串无法解析（命令行用法错误）"""

    def __init__(self, message, token=None):
        super().__init__(message if token is None else f"{message}: '{token}'")
        self.token = token


class HypothesisError(DomainError):
    """定理的假设条件不成立（例如凸体不是 lower set）"""


class SingularityError(DomainError):
    """在 [-1,1] 上求梯度或 Lagrange 条件"""


class NoClosedFormError(PDegreeError):
    """该组合没有闭式速率，请改用数值极小化"""


class NumericalError(PDegreeError):
    """数值过程失败；incumbent 保存当前最好结果（如有）"""

    def __init__(self, message, incumbent=None):
        super().__init__(message)
        self.incumbent = incumbent
