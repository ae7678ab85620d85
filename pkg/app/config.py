#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
配置文件 - 凸体次数多项式逼近工具（app 包内）
"""

# 默认输出文件夹（当未指定输出路径时使用）
DEFAULT_OUTPUT_FOLDER = "output"

# 用户配置文件（JSON，命令行参数优先）
USER_SETTINGS_PATH = "config/user_settings.json"

# 格点配置
LATTICE_CONFIG = {
    # 判断 ‖J‖_P ≤ n 时的相对容差
    'membership_tolerance': 1e-9,

    # 乘积公式前对 lower set 的穷举检查深度
    'lower_set_check_depth': 20,

    # 穷举检查的格点数上限（高维时自动降低深度）
    'lower_set_max_points': 200000
}

# 极值函数配置
EXTREMAL_CONFIG = {
    # 距离 [-1,1] 小于该值视为在线段上（梯度奇异）
    'segment_tolerance': 1e-12,

    # lower set 检查是否在 v_p_product 中启用
    'check_lower_set': True
}

# 多起点优化配置
OPTIMIZER_CONFIG = {
    # 随机起点数量
    'starts': 64,

    # 单次 Nelder-Mead 最大迭代次数
    'max_iterations': 2000,

    # 目标函数容差
    'fatol': 1e-10,

    # 单纯形坐标容差
    'xatol': 1e-9,

    # 随机种子
    'seed': 0,

    # 随机起点散布半径 ‖u‖ ≤ radius
    'scatter_radius': 3.0,

    # 边界候选（z_j ∈ [-1,1]）每个坐标的起点数
    'boundary_starts': 7,

    # d ≥ 3 时随机起点与边界起点的上限（结构化起点照常保留）
    'high_dimension_starts': 16,
    'high_dimension_boundary_starts': 4,

    # 内部临界点的 BFGS 精修
    'polish': True,

    # 判定边界点的容差
    'boundary_tolerance': 1e-7,

    # 判定对称候选点的相对容差
    'symmetry_tolerance': 1e-6
}

# 稠密扫描（暴力校验）配置
ORACLE_CONFIG = {
    'half_width': 3.0,
    'count': 401,
    'zoom_levels': 8,
    'zoom_count': 41
}

# 逼近数 D_n 估计配置
APPROX_CONFIG = {
    # 每个坐标的最小分析次数
    'min_analysis_degree': 32,

    # 上确界网格（每轴点数），按维数选择
    'eval_grid': {1: 401, 2: 201, 3: 65},

    # 视为数值零的误差下限
    'floor': 1e-13,

    # 拟合时舍弃与下限相差不足该倍数的行
    'floor_margin': 100.0,

    # 拟合时舍弃的前几行（过渡段）
    'fit_drop': 4,

    # 函数奇异集与 K 的最小实距离平方
    'real_gap': 1e-10,

    # 单调性检查的抖动容差
    'jitter': 0.05
}

# Fekete 点配置
FEKETE_CONFIG = {
    # 交换阈值 |l_j(z)| > 1 + tol
    'swap_tolerance': 1e-10,

    # 最大交换次数
    'max_swaps': 20000,

    # 网格点数至少为 d_n 的倍数
    'mesh_factor': 4,

    # Lagrange 系数残差超过该值时给出条件数警告
    'residual_warning': 1e-6,

    # 秩亏判定（相对于首个主元）
    'rank_tolerance': 1e-13
}

# 复现套件的耗时上限（秒）；结果表只记录是否达标
RUNTIME_LIMITS = {
    'closed_form_case': 5.0,
    'empirical_rates': 60.0,
    'fekete': 120.0
}

# 多线程配置
MULTITHREADING_CONFIG = {
    # 是否启用多线程
    'enable_multithreading': True,

    # 最大线程数（None 表示使用 CPU 核数）
    'max_workers': None
}

# 输出配置
OUTPUT_CONFIG = {
    # 浮点有效数字
    'significant_digits': 12,

    # 支持的输出格式
    'formats': ('csv', 'json', 'xlsx')
}

# 日志配置
LOG_CONFIG = {
    'log_file': 'logs/pdegree.log',
    'log_level': 'INFO',
    'log_format': '%(asctime)s - %(levelname)s - %(name)s - %(message)s',
    'date_format': '%m/%d %H:%M:%S'
}
