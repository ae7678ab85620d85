#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
凸体次数多项式逼近工具 - 主启动脚本

python main.py <子命令> [参数]，子命令见 python main.py --help
"""

import sys


def check_dependencies():
    """检查依赖库"""
    try:
        import numpy
        import openpyxl
        import pandas
        import scipy
        return True
    except ImportError as e:
        print(f"❌ 缺少依赖库: {e}")
        print("\n📦 请先安装依赖:")
        print("pip install -r requirements.txt")
        print("\n或者运行自动安装脚本:")
        print("python setup.py")
        return False


def print_usage():
    print("=" * 60)
    print("📐 凸体次数多项式逼近工具")
    print("=" * 60)
    print("  body       凸体信息与格点集 nP ∩ ℤ₊^d")
    print("  extremal   P-极值函数 V_{P,K}（eval 网格 / point 单点）")
    print("  rate       由奇异集预测收敛速率 R(P,K)")
    print("  approx     Chebyshev 截断估计 D_n 并拟合速率")
    print("  fekete     近似 Fekete 点、Lagrange 插值")
    print("  reproduce  复现套件（--suite paper|quick）")
    print("-" * 60)
    print("示例: python main.py rate --body lq:q=1,d=2 --sing 'quadric:a=0,0;r=1'")


def main():
    """主函数"""
    if not check_dependencies():
        sys.exit(1)
    if len(sys.argv) == 1:
        print_usage()
        return
    from app.ui.cli import run
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
