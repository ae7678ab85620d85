#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试复现套件中较快的检查项与结果表格式
"""

import os
import sys

import pandas as pd

# 添加项目路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from app.numerics.rate import RateOptions
from app.tools import reproduce

COLUMNS = ['criterion', 'case', 'observed', 'expected', 'tolerance', 'passed']


def _raises(error, func, *args, **kwargs):
    try:
        func(*args, **kwargs)
    except error:
        return True
    return False


def test_crossover_row():
    rows = reproduce.check_crossover()
    assert len(rows) == 1
    assert list(rows[0]) == COLUMNS
    assert rows[0]['passed']


def test_structure_rows():
    rows = pd.DataFrame(reproduce.check_structure())
    assert list(rows.columns) == COLUMNS
    assert len(rows) == 3 + 1 + 2 + 3
    assert rows['passed'].all(), rows[~rows['passed']].to_string()


def test_row_tolerances():
    assert reproduce._row('x', 'abs', 1.0004, 1.0, 5e-4)['passed']
    assert not reproduce._row('x', 'abs', 1.0006, 1.0, 5e-4)['passed']
    assert reproduce._row('x', 'rel', 110.0, 100.0, 0.10, relative=True)['passed']
    assert not reproduce._row('x', 'forced', 0.0, 0.0, 1.0, passed=False)['passed']


def test_runtime_rows_record_only_the_verdict():
    fast = reproduce._runtime_row('1 runtime', 'q=1, d=3, r=1', 0.8, 5.0)
    slow = reproduce._runtime_row('1 runtime', 'q=1, d=3, r=1', 26.2, 5.0)
    assert fast['case'] == 'q=1, d=3, r=1 < 5s'
    assert (fast['observed'], fast['expected'], fast['passed']) == (1.0, 1.0, True)
    assert (slow['observed'], slow['passed']) == (0.0, False)


def test_closed_forms_within_time_limit():
    rows = pd.DataFrame(reproduce.check_closed_forms(RateOptions(), quick=True))
    assert list(rows['criterion'].unique()) == ['1 closed form', '1 runtime']
    # r=1：d=2 有 q=1,∞,2，d=3 有 q=1,∞
    assert (rows['criterion'] == '1 runtime').sum() == 5
    assert rows['passed'].all(), rows[~rows['passed']].to_string()


def test_format_table():
    table = pd.DataFrame([reproduce._row('3 crossover', 'd=2', 2.10901, 2.1090, 1e-3),
                          reproduce._row('3 crossover', 'bad', 3.0, 2.1090, 1e-3)])
    text = reproduce.format_table(table)
    assert 'PASS' in text and 'FAIL' in text
    assert table['passed'].dtype == bool


def test_unknown_suite():
    assert reproduce.SUITES == ('paper', 'quick')
    assert _raises(ValueError, reproduce.run_suite, 'nightly')


def main():
    """运行所有测试"""
    print("\n" + "🧪 " * 20)
    print("复现套件测试")
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
