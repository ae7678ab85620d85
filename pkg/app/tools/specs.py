#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行与配置文件中的规格字符串

  凸体:   lq:q=2,d=2[,scale=1]   poly:d=2,verts=[(0,0),(2,0),(0,2)][,scale=1]
  奇异集: quadric:a=0,0;r=1      （a 只给一个值时广播到 d 维）
  函数:   quadric:a=0,0;r=1      const:c=1
  乘积集: cube                   [-1,1]x[0,2]x disk(0+0j,1)
  复网格: RE_LO:RE_HI:N,IM_LO:IM_HI:N
  n 序列: 4..24   4..24..2   2,4,6
"""

import ast
import math
import re

import numpy as np

from app.exceptions import DomainError, SpecParseError
from app.numerics.approx import FunctionSpec
from app.numerics.convex_body import ConvexBody
from app.numerics.extremal import Disk, Interval, ProductSet
from app.numerics.rate import SingularSetQuadric

_QUADRIC = re.compile(r'^a=(?P<a>.+?)(?:[;,]\s*r=(?P<r>[^;,]+))?$')
_DISK = re.compile(r'^disk\((?P<c>[^,]+),(?P<r>[^)]+)\)$')
_INTERVAL = re.compile(r'^\[(?P<a>[^,\]]+),(?P<b>[^\]]+)\]$')


def _split_kind(text, kinds):
    text = text.strip()
    kind, sep, rest = text.partition(':')
    if not sep or kind not in kinds:
        raise SpecParseError(f"未知的规格类型（可用: {', '.join(kinds)}）", kind if sep else text)
    return kind, rest.strip()


def _number(token, name=None):
    token = token.strip()
    if token.lower() in ('inf', '+inf', 'infinity'):
        return math.inf
    try:
        return float(token)
    except ValueError:
        raise SpecParseError(f"无法解析数值{f' {name}' if name else ''}", token) from None


def _integer(token, name=None):
    value = _number(token, name)
    if not math.isfinite(value) or value != int(value):
        raise SpecParseError(f"需要整数{f' {name}' if name else ''}", token)
    return int(value)


def _key_values(text, allowed):
    values = {}
    for item in filter(None, (part.strip() for part in text.split(','))):
        key, sep, value = item.partition('=')
        if not sep or key not in allowed:
            raise SpecParseError("无法识别的参数", item)
        values[key] = value
    return values


def parse_body(text):
    """凸体规格 → ConvexBody"""
    try:
        return _parse_body(text)
    except SpecParseError:
        raise
    except DomainError as e:
        raise SpecParseError(f"凸体规格无效（{e}）", text) from None


def _parse_body(text):
    kind, rest = _split_kind(text, ('lq', 'poly'))
    try:
        if kind == 'lq':
            values = _key_values(rest, ('q', 'd', 'scale'))
            if 'q' not in values or 'd' not in values:
                raise SpecParseError("lq 规格需要 q 和 d", text)
            return ConvexBody.lq(_number(values['q'], 'q'), _integer(values['d'], 'd'),
                                 _number(values.get('scale', '1'), 'scale'))

        match = re.search(r'verts=(\[.*\])', rest)
        if not match:
            raise SpecParseError("poly 规格需要 verts=[...]", text)
        try:
            vertices = ast.literal_eval(match.group(1))
        except (ValueError, SyntaxError):
            raise SpecParseError("无法解析顶点列表", match.group(1)) from None
        values = _key_values(rest[:match.start()] + rest[match.end():], ('d', 'scale'))
        body = ConvexBody.polytope(vertices, _number(values.get('scale', '1'), 'scale'))
        if 'd' in values and _integer(values['d'], 'd') != body.dimension:
            raise SpecParseError("d 与顶点维数不一致", values['d'])
        return body
    except (TypeError, IndexError) as e:
        raise SpecParseError(f"凸体规格无效: {e}", text) from None


def _quadric_parts(rest, d=None):
    match = _QUADRIC.match(rest.replace(' ', ''))
    if not match:
        raise SpecParseError("quadric 规格应为 a=...;r=...", rest)
    center = [_number(a, 'a') for a in match.group('a').split(',') if a]
    if len(center) == 1 and d:
        center = center * d
    if d is not None and len(center) != d:
        raise SpecParseError(f"中心维数 {len(center)} 与 d={d} 不一致", match.group('a'))
    offset = _number(match.group('r'), 'r') if match.group('r') else 0.0
    return tuple(center), offset


def parse_quadric(text, d=None):
    """奇异集规格 → SingularSetQuadric"""
    _, rest = _split_kind(text, ('quadric',))
    center, offset = _quadric_parts(rest, d)
    try:
        return SingularSetQuadric(center, offset)
    except DomainError as e:
        raise SpecParseError(f"奇异集规格无效（{e}）", text) from None


def _constant(value):
    def f(points):
        return np.full(np.shape(points)[:-1], value, dtype=float)
    return f


def parse_function(text, d=None):
    """函数规格 → FunctionSpec"""
    kind, rest = _split_kind(text, ('quadric', 'const'))
    if kind == 'quadric':
        center, offset = _quadric_parts(rest, d)
        return FunctionSpec.quadric_runge(center, offset)
    values = _key_values(rest, ('c',))
    c = _number(values.get('c', '1'), 'c')
    return FunctionSpec.from_callable(_constant(c), label=f"const:c={c:g}")


def parse_domain(text, d):
    """乘积集规格 → ProductSet；'cube' 表示 [-1,1]^d"""
    text = (text or 'cube').strip()
    if text == 'cube':
        return ProductSet.cube(d)
    factors = []
    for token in (t.strip() for t in text.split('x')):
        interval = _INTERVAL.match(token)
        disk = _DISK.match(token)
        try:
            if interval:
                factors.append(Interval(_number(interval.group('a')), _number(interval.group('b'))))
            elif disk:
                factors.append(Disk(complex(disk.group('c').strip()), _number(disk.group('r'))))
            else:
                raise SpecParseError("无法识别的一维集合", token)
        except ValueError as e:
            if isinstance(e, SpecParseError):
                raise
            raise SpecParseError(f"一维集合无效: {e}", token) from None
    if len(factors) != d:
        raise SpecParseError(f"乘积集有 {len(factors)} 个因子，需要 {d} 个", text)
    return ProductSet(tuple(factors))


def parse_axis(text):
    """'RE_LO:RE_HI:N,IM_LO:IM_HI:N' → ((lo, hi, n), (lo, hi, n))"""
    parts = text.split(',')
    if len(parts) != 2:
        raise SpecParseError("复网格应为 RE_LO:RE_HI:N,IM_LO:IM_HI:N", text)
    ranges = []
    for part in parts:
        fields = part.split(':')
        if len(fields) != 3:
            raise SpecParseError("范围应为 LO:HI:N", part)
        count = _integer(fields[2], 'N')
        if count < 1:
            raise SpecParseError("点数必须为正", fields[2])
        ranges.append((_number(fields[0]), _number(fields[1]), count))
    return tuple(ranges)


def parse_range(text):
    """'4..24'、'4..24..2' 或 '2,4,6' → 严格递增的整数列表"""
    text = text.strip()
    if '..' in text:
        fields = text.split('..')
        if len(fields) not in (2, 3):
            raise SpecParseError("范围应为 LO..HI 或 LO..HI..STEP", text)
        lo, hi = _integer(fields[0]), _integer(fields[1])
        step = _integer(fields[2]) if len(fields) == 3 else 1
        if step < 1:
            raise SpecParseError("步长必须为正", fields[2])
        values = list(range(lo, hi + 1, step))
    else:
        values = [_integer(t) for t in text.split(',') if t.strip()]
    if not values or any(v < 0 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise SpecParseError("n 序列必须非空、非负且严格递增", text)
    return values


def check_dimension(name, actual, expected):
    if actual != expected:
        raise SpecParseError(f"{name} 维数 {actual} 与 d={expected} 不一致")
