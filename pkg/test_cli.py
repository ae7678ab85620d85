#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试命令行：子命令输出、配置合并、退出码与可复现输出
"""

import io
import json
import math
import os
import shutil
import sys
import tempfile
from contextlib import redirect_stdout

import pandas as pd

# 添加项目路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from app.tools.output import format_float, read_table, to_text
from app.ui.cli import EXIT_OK, EXIT_USAGE, parse_args, run


def _tmp():
    return tempfile.mkdtemp(prefix='pdegree_test_')


def _read(path):
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def test_body_index_set():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'idx.csv')
        assert run(['body', '--spec', 'lq:q=2,d=2', '--indexset', '2', '-o', path]) == EXIT_OK
        lines = _read(path).splitlines()
        assert lines[0].startswith('# pdegree ')
        assert lines[1] == '# argv: body --spec lq:q=2,d=2 --indexset 2 -o ' + path
        assert lines[2] == '# seed: 0'
        df = read_table(path)
        assert list(df.columns) == ['j1', 'j2'] and len(df) == 6
        assert {tuple(r) for r in df.itertuples(index=False)} == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_body_info():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'body.json')
        assert run(['body', '--spec', 'lq:q=1,d=2', '--norm', '1,1', '-o', path]) == EXIT_OK
        data = json.loads(_read(path))
        assert data['dimension'] == 2
        assert abs(data['volume'] - 0.5) < 1e-12
        assert data['lower_set'] is True
        assert data['norms'][0]['norm'] == 2.0
        assert data['_meta']['program'] == 'pdegree'
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_rate_json():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'rate.json')
        argv = ['rate', '--body', 'lq:q=1,d=2', '--sing', 'quadric:a=0,0;r=1', '--starts', '16', '-o', path]
        assert run(argv) == EXIT_OK
        data = json.loads(_read(path))
        assert abs(data['rate'] - 1.93185) < 1e-5
        assert abs(data['closed_form'] - 1.93185) < 1e-5
        assert data['_meta']['seed'] == 0
        first = _read(path)
        assert run(argv) == EXIT_OK
        assert _read(path) == first
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_usage_errors():
    folder = _tmp()
    try:
        out = os.path.join(folder, 'x.json')
        assert run([]) == EXIT_USAGE
        assert run(['extremal']) == EXIT_USAGE
        assert run(['body']) == EXIT_USAGE
        assert run(['body', '--spec', 'lq:q=0.5,d=2', '-o', out]) == EXIT_USAGE
        assert run(['body', '--spec', 'ball:d=2', '-o', out]) == EXIT_USAGE
        assert run(['rate', '--body', 'lq:q=1,d=2', '--sing', 'quadric:a=0,0,0', '-o', out]) == EXIT_USAGE
        assert run(['approx', '--body', 'lq:q=1,d=2', '--func', 'quadric:a=0,0;r=1', '--n', '5..3',
                    '-o', out]) == EXIT_USAGE
        assert run(['body', '--spec', 'lq:q=1,d=2', '--format', 'txt']) == EXIT_USAGE
        assert run(['body', '--spec', 'lq:q=1,d=2', '--log-level', 'LOUD', '-o', out]) == EXIT_USAGE
        assert run(['extremal', 'eval', '--body', 'lq:q=1,d=2', '--axis=-2:2:3,0:0:1', '-o', out]) == EXIT_USAGE
        assert not os.path.exists(out)
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_numeric_error_exit_code():
    folder = _tmp()
    try:
        # 网格点数少于 4·d_n
        argv = ['fekete', '--body', 'lq:q=1,d=2', '--n', '6', '--resolution', '5', '-o',
                os.path.join(folder, 'nodes.csv')]
        assert run(argv) == 2
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_config_merge():
    folder = _tmp()
    try:
        config = os.path.join(folder, 'settings.json')
        with open(config, 'w', encoding='utf-8') as f:
            json.dump({'spec': 'lq:q=inf,d=2', 'indexset': 1}, f)
        path = os.path.join(folder, 'idx.csv')
        assert run(['body', '--config', config, '-o', path]) == EXIT_OK
        assert len(read_table(path)) == 4

        # 命令行优先
        args = parse_args(['body', '--config', config, '--indexset', '2'])
        assert args.indexset == 2 and args.spec == 'lq:q=inf,d=2'

        with open(config, 'w', encoding='utf-8') as f:
            json.dump({'spec': 'lq:q=1,d=2', 'colour': 'blue'}, f)
        assert run(['body', '--config', config, '-o', path]) == EXIT_USAGE

        with open(config, 'w', encoding='utf-8') as f:
            f.write('{not json')
        assert run(['body', '--config', config, '-o', path]) == EXIT_USAGE
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_extremal_eval_and_point():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'grid.csv')
        argv = ['extremal', 'eval', '--body', 'lq:q=1,d=2', '--axis=-2:2:5,0:0:1', '--axis=0:0:1,-1:1:3',
                '-o', path]
        assert run(argv) == EXIT_OK
        df = read_table(path)
        assert list(df.columns) == ['x1', 'y1', 'x2', 'y2', 'V']
        assert len(df) == 15
        assert (df['V'] >= 0).all()

        point = os.path.join(folder, 'point.json')
        assert run(['extremal', 'point', '--body', 'lq:q=1,d=2', '--z', '2j,0', '-o', point]) == EXIT_OK
        data = json.loads(_read(point))
        assert abs(data['V'] - 1.4436354751788103) < 1e-9
        assert data['z'] == [[0.0, 2.0], [0.0, 0.0]]
        assert abs(data['Phi'] - math.exp(data['V'])) < 1e-9 * data['Phi']
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_approx_outputs():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'approx.csv')
        argv = ['approx', '--body', 'lq:q=1,d=2', '--func', 'quadric:a=0,0;r=1', '--n', '4..24..2', '-o', path]
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            assert run(argv) == EXIT_OK
        df = read_table(path)
        assert list(df['n']) == list(range(4, 25, 2))
        # 终端表格与文件一样保留 12 位有效数字
        printed = buffer.getvalue()
        assert all(format_float(v) in printed for v in df['D_hat'])
        assert '0.333333333333' in to_text(pd.DataFrame({'x': [1 / 3]}))
        summary = json.loads(_read(os.path.join(folder, 'approx_summary.json')))
        assert abs(summary['R_hat'] - 1.93185) / 1.93185 < 0.10
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_fekete_outputs():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'nodes.csv')
        argv = ['fekete', '--body', 'lq:q=1,d=2', '--n', '4', '--resolution', '20',
                '--func', 'quadric:a=0,0;r=1', '--series', '2..5', '--eval-resolution', '31', '-o', path]
        assert run(argv) == EXIT_OK
        nodes = read_table(path)
        assert list(nodes.columns) == ['x1', 'x2'] and len(nodes) == 15
        report = json.loads(_read(os.path.join(folder, 'nodes_report.json')))
        assert report['d_n'] == 15 and report['max_psi_on_mesh'] <= 1 + 1e-8
        series = read_table(os.path.join(folder, 'nodes_series.csv'))
        assert list(series['n']) == [2, 3, 4, 5]
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def test_xlsx_output():
    folder = _tmp()
    try:
        path = os.path.join(folder, 'idx.xlsx')
        assert run(['body', '--spec', 'lq:q=1,d=3', '--indexset', '1', '--format', 'xlsx', '-o', path]) == EXIT_OK
        sheets = pd.read_excel(path, sheet_name=None)
        assert set(sheets) == {'data', 'meta'}
        assert len(sheets['data']) == 4
        assert 'seed' in list(sheets['meta']['key'])
    finally:
        shutil.rmtree(folder, ignore_errors=True)


def main():
    """运行所有测试"""
    print("\n" + "🧪 " * 20)
    print("命令行测试")
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
