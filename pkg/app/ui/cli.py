#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行入口

子命令: body、extremal {eval,point}、rate、approx、fekete、reproduce
退出码: 0 成功，1 用法错误，2 数值失败，3 复现检查未通过
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from app import __version__
from app.config import OPTIMIZER_CONFIG, OUTPUT_CONFIG, USER_SETTINGS_PATH
from app.exceptions import PDegreeError, SpecParseError
from app.logger import setup_logging
from app.numerics.approx import dn_series
from app.numerics.convex_body import (dim_match_scale, enumerate_index_set, lower_set_verified,
                                      minkowski_degree_norm, volume)
from app.numerics.extremal import axis_values, evaluate_grid, h_p, v_p_product
from app.numerics.fekete import approx_fekete, build_mesh, interpolation_series
from app.numerics.rate import (RateOptions, dense_sheet_sweep, minimize_rate, normalized_comparison,
                               with_closed_form)
from app.tools import output, reproduce
from app.tools.specs import (check_dimension, parse_axis, parse_body, parse_domain, parse_function,
                             parse_quadric, parse_range)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ACCEPTANCE = 0, 1, 2, 3

# 必需参数在合并配置文件之后检查，因此可以只写在 --config 中
REQUIRED = {
    'body': ('spec',),
    'extremal eval': ('body',),
    'extremal point': ('body', 'z'),
    'rate': ('body', 'sing'),
    'approx': ('body', 'func'),
    'fekete': ('body', 'n'),
    'reproduce': ()
}


class UsageError(Exception):
    """命令行用法错误（退出码 1）"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ===== 参数定义 =====
def _common(parser):
    parser.add_argument('--config', help='JSON 配置文件，命令行参数优先')
    parser.add_argument('--output', '-o', help='输出文件路径（默认写入 output/）')
    parser.add_argument('--format', choices=OUTPUT_CONFIG['formats'], default='csv', help='表格输出格式')
    parser.add_argument('--seed', type=int, default=OPTIMIZER_CONFIG['seed'], help='随机种子')
    parser.add_argument('--threads', type=int, default=None, help='线程数（默认 CPU 核数）')
    parser.add_argument('--log-level', default=None, help='日志级别')


def build_parser():
    """返回 (主解析器, {命令路径: 叶子解析器})"""
    parser = _Parser(prog='pdegree', description='凸体次数多项式逼近工具')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    leaves = {}

    p = commands.add_parser('body', help='凸体信息与格点集')
    p.add_argument('--spec', help='凸体规格，如 lq:q=2,d=2')
    p.add_argument('--indexset', type=int, help='导出 nP ∩ ℤ₊^d 的格点')
    p.add_argument('--norm', action='append', default=[], help='计算 ‖x‖_P，x 以逗号分隔，可重复')
    leaves['body'] = p

    extremal = commands.add_parser('extremal', help='P-极值函数')
    actions = extremal.add_subparsers(dest='action', parser_class=_Parser)
    p = actions.add_parser('eval', help='复网格上求值，输出 x1,y1,...,V')
    p.add_argument('--body')
    p.add_argument('--domain', default='cube', help="乘积集，默认 'cube' 即 [-1,1]^d")
    p.add_argument('--axis', action='append', default=[], help='RE_LO:RE_HI:N,IM_LO:IM_HI:N，每个坐标一次')
    leaves['extremal eval'] = p
    p = actions.add_parser('point', help='单点的 V_{P,K} 与 H_P')
    p.add_argument('--body')
    p.add_argument('--domain', default='cube')
    p.add_argument('--z', help='复向量，如 2j,0.5')
    leaves['extremal point'] = p

    p = commands.add_parser('rate', help='预测收敛速率 R(P,K)')
    p.add_argument('--body')
    p.add_argument('--sing', help='奇异集，如 quadric:a=0,0;r=1')
    p.add_argument('--domain', default='cube')
    p.add_argument('--starts', type=int, default=OPTIMIZER_CONFIG['starts'])
    p.add_argument('--compare', action='store_true', help='输出 P_1、P_2、P_∞ 的体积归一化比较表')
    p.add_argument('--sweep', action='store_true', help='附加稠密扫描校验（仅 d=2）')
    leaves['rate'] = p

    p = commands.add_parser('approx', help='逼近数 D_n 的估计')
    p.add_argument('--body')
    p.add_argument('--func', help='函数，如 quadric:a=0,0;r=1')
    p.add_argument('--n', default='4..24', help='n 序列，如 4..24')
    p.add_argument('--eval-grid', type=int, default=None, help='每轴上确界网格点数')
    p.add_argument('--fit-range', default=None, help='拟合范围 LO..HI')
    leaves['approx'] = p

    p = commands.add_parser('fekete', help='近似 Fekete 点与插值')
    p.add_argument('--body')
    p.add_argument('--domain', default='cube')
    p.add_argument('--n', type=int)
    p.add_argument('--resolution', type=int, default=40, help='每轴网格点数')
    p.add_argument('--func', default=None, help='给出时输出插值误差序列')
    p.add_argument('--series', default=None, help='插值误差序列的 n，如 2..10')
    p.add_argument('--eval-resolution', type=int, default=61)
    leaves['fekete'] = p

    p = commands.add_parser('reproduce', help='运行复现套件')
    p.add_argument('--suite', choices=reproduce.SUITES, default='paper')
    leaves['reproduce'] = p

    for leaf in leaves.values():
        _common(leaf)
    return parser, leaves


def _leaf_key(args):
    return f"{args.command} {args.action}" if getattr(args, 'action', None) else args.command


def _load_config(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"无法读取配置文件 {path}: {e}") from None
    if not isinstance(data, dict):
        raise UsageError(f"配置文件必须是 JSON 对象: {path}")
    return data


def parse_args(argv):
    """解析命令行；--config 中的值作为默认值合并，命令行优先"""
    parser, leaves = build_parser()
    args = parser.parse_args(argv)
    if args.command is None or (args.command == 'extremal' and args.action is None):
        raise UsageError("缺少子命令（可用: body, extremal, rate, approx, fekete, reproduce）")
    if args.log_level and not isinstance(logging.getLevelName(args.log_level.upper()), int):
        raise UsageError(f"未知的日志级别: {args.log_level}")

    config_path = args.config
    if config_path is None and os.path.exists(USER_SETTINGS_PATH):
        config_path = USER_SETTINGS_PATH
    if config_path:
        leaf = leaves[_leaf_key(args)]
        settings = {k.replace('-', '_'): v for k, v in _load_config(config_path).items()}
        known = {a.dest for a in leaf._actions}
        unknown = sorted(set(settings) - known - {'config'})
        if unknown and args.config:
            raise UsageError(f"配置文件包含未知参数: {', '.join(unknown)}")
        settings = {k: v for k, v in settings.items() if k in known and k != 'config'}
        leaf.set_defaults(**settings)
        args = parser.parse_args(argv)
        args.config = config_path

    missing = [f"--{dest}" for dest in REQUIRED[_leaf_key(args)] if getattr(args, dest) is None]
    if missing:
        raise UsageError(f"缺少必需参数: {', '.join(missing)}")
    return args


# ===== 子命令 =====
def _table(df, args, default_name, argv):
    fmt = args.format
    name = default_name if fmt == 'csv' else os.path.splitext(default_name)[0] + f".{fmt}"
    path = output.resolve_output(args.output, name)
    if fmt == 'json':
        return output.write_json({'rows': df.to_dict(orient='records')}, path, argv, args.seed)
    return output.write_table(df, path, argv, args.seed, fmt)


def _json(data, args, default_name, argv, path=None):
    path = path or output.resolve_output(args.output, default_name)
    return output.write_json(data, path, argv, args.seed)


def _companion(path, suffix):
    return os.path.splitext(path)[0] + suffix


def cmd_body(args, argv):
    body = parse_body(args.spec)
    try:
        points = [[float(v) for v in text.split(',')] for text in args.norm]
    except ValueError:
        raise UsageError(f"无法解析 --norm: {args.norm}") from None
    if args.indexset is not None:
        path = _table(enumerate_index_set(body, args.indexset).to_frame(), args, 'index_set.csv', argv)
        print(f"✅ 格点集已保存: {path}")
        return EXIT_OK
    A, k = body.containment
    info = {
        'spec': body.to_spec(),
        'dimension': body.dimension,
        'volume': volume(body),
        'containment': {'A': A, 'k': k},
        'lower_set': lower_set_verified(body),
        'norms': [{'x': x, 'norm': minkowski_degree_norm(body, x)} for x in points]
    }
    if body.is_lq_ball and body.scale == 1.0:
        info['c'] = dim_match_scale(body.q, body.dimension)
    path = _json(info, args, 'body.json', argv)
    print(output.to_json_text(info, argv, args.seed))
    print(f"✅ 结果已保存: {path}")
    return EXIT_OK


def _point(text):
    try:
        return np.array([complex(t.strip().replace(' ', '')) for t in text.split(',')])
    except ValueError:
        raise SpecParseError("无法解析复向量", text) from None


def cmd_extremal(args, argv):
    body = parse_body(args.body)
    K = parse_domain(args.domain, body.dimension)
    if args.action == 'point':
        z = _point(args.z)
        check_dimension('复向量', len(z), body.dimension)
        value = v_p_product(body, K, z)
        hp = h_p(body, z)
        info = {'z': [[c.real, c.imag] for c in z], 'V': value.value, 'Phi': value.phi,
                'per_factor': list(value.per_factor),
                'H_P': hp.value, 'H_P_regime': hp.regime, 'H_P_degenerate': hp.degenerate}
        print(output.to_json_text(info, argv, args.seed))
        path = _json(info, args, 'extremal_point.json', argv)
        print(f"✅ 结果已保存: {path}")
        return EXIT_OK

    if len(args.axis) != body.dimension:
        raise UsageError(f"需要 {body.dimension} 个 --axis，得到 {len(args.axis)} 个")
    axes = [axis_values(*parse_axis(text)) for text in args.axis]
    path = _table(evaluate_grid(body, K, axes, threads=args.threads), args, 'extremal.csv', argv)
    print(f"✅ 网格已保存: {path}")
    return EXIT_OK


def cmd_rate(args, argv):
    body = parse_body(args.body)
    S = parse_quadric(args.sing, body.dimension)
    K = parse_domain(args.domain, body.dimension)
    opts = RateOptions(starts=args.starts, seed=args.seed, threads=args.threads)

    if args.compare:
        table = normalized_comparison(S, K=K, opts=opts)
        print(output.to_text(table))
        path = _table(table, args, 'rate_compare.csv', argv)
        print(f"✅ 比较表已保存: {path}")
        return EXIT_OK

    report = minimize_rate(body, K, S, opts)
    if body.is_lq_ball and body.scale == 1.0 and K.is_unit_cube:
        report = with_closed_form(report, body.q, S)
    data = report.to_dict()
    if args.sweep:
        sweep = dense_sheet_sweep(body, K, S)
        data['sweep'] = {'log_rate': sweep.value, 'rate': math.exp(sweep.value), 'sheet': sweep.sheet}
    print(output.to_json_text(data, argv, args.seed))
    path = _json(data, args, 'rate.json', argv)
    print(f"✅ 速率报告已保存: {path}")
    return EXIT_OK


def cmd_approx(args, argv):
    body = parse_body(args.body)
    f = parse_function(args.func, body.dimension)
    fit_range = parse_range(args.fit_range) if args.fit_range else None
    if fit_range is not None:
        fit_range = (fit_range[0], fit_range[-1])
    series = dn_series(f, body, parse_range(args.n), eval_grid=args.eval_grid, fit_range=fit_range)
    print(output.to_text(series.rows))
    print(f"📈 R_hat = {series.fitted_rate:.12g}")
    path = _table(series.rows, args, 'approx.csv', argv)
    _json(series.summary(), args, None, argv, path=_companion(path, '_summary.json'))
    print(f"✅ D_n 序列已保存: {path}")
    return EXIT_OK


def cmd_fekete(args, argv):
    body = parse_body(args.body)
    K = parse_domain(args.domain, body.dimension)
    fs = approx_fekete(build_mesh(K, args.resolution), body, args.n)
    path = _table(fs.nodes_frame(), args, 'fekete_nodes.csv', argv)
    _json(fs.report(), args, None, argv, path=_companion(path, '_report.json'))
    print(output.to_json_text(fs.report(), argv, args.seed))

    if args.func:
        f = parse_function(args.func, body.dimension)
        n_values = parse_range(args.series) if args.series else list(range(2, args.n + 1))
        rows, rate = interpolation_series(K, body, f, n_values, args.resolution, args.eval_resolution)
        series_path = _companion(path, '_series.csv')
        if args.format == 'json':
            output.write_json({'rows': rows.to_dict(orient='records'), 'rate': rate},
                              _companion(path, '_series.json'), argv, args.seed)
        else:
            output.write_table(rows, series_path, argv, args.seed, args.format)
        print(output.to_text(rows))
        print(f"📈 插值误差速率 = {rate:.12g}")
    print(f"✅ Fekete 点已保存: {path}")
    return EXIT_OK


def cmd_reproduce(args, argv):
    opts = RateOptions(seed=args.seed, threads=args.threads)
    table = reproduce.run_suite(args.suite, opts)
    print(reproduce.format_table(table))
    path = _table(table, args, 'reproduce.csv', argv)
    failed = int((~table['passed']).sum())
    print(f"\n{'✅' if not failed else '❌'} {len(table) - failed}/{len(table)} 项通过，结果已保存: {path}")
    return EXIT_OK if not failed else EXIT_ACCEPTANCE


COMMANDS = {
    'body': cmd_body,
    'extremal': cmd_extremal,
    'rate': cmd_rate,
    'approx': cmd_approx,
    'fekete': cmd_fekete,
    'reproduce': cmd_reproduce
}


def run(argv=None):
    """执行命令行，返回退出码"""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except UsageError as e:
        print(f"❌ 用法错误: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(args.log_level)
    try:
        return COMMANDS[args.command](args, argv)
    except (UsageError, SpecParseError) as e:
        print(f"❌ 用法错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PDegreeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
