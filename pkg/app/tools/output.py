#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
结果文件输出

所有文件带有版本、命令行与种子信息，浮点数统一保留 12 位有效数字，不写入时间戳，
因此相同的命令行与种子得到逐字节相同的文件。
"""

import json
import logging
import math
import os

import numpy as np
import pandas as pd

from app import PROJECT_NAME, __version__
from app.config import DEFAULT_OUTPUT_FOLDER, OUTPUT_CONFIG

logger = logging.getLogger(__name__)


def format_float(value):
    return f"{value:.{OUTPUT_CONFIG['significant_digits']}g}"


def meta(argv, seed):
    return {
        'program': PROJECT_NAME,
        'version': __version__,
        'argv': ' '.join(argv or []),
        'seed': seed
    }


def header_lines(argv, seed):
    info = meta(argv, seed)
    return [f"# {info['program']} {info['version']}", f"# argv: {info['argv']}", f"# seed: {info['seed']}"]


def resolve_output(path, default_name):
    """未指定路径时写入默认输出文件夹，并创建父目录"""
    path = path or os.path.join(DEFAULT_OUTPUT_FOLDER, default_name)
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    return path


def _rounded(value):
    """递归地把浮点数规整为 12 位有效数字；nan/inf 写成 null"""
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    if isinstance(value, np.ndarray):
        return _rounded(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return float(format_float(value)) if math.isfinite(value) else None
    if isinstance(value, complex):
        return [_rounded(value.real), _rounded(value.imag)]
    return value


def to_json_text(data, argv=None, seed=None):
    payload = dict(_rounded(data))
    payload['_meta'] = meta(argv, seed)
    return json.dumps(payload, ensure_ascii=False, indent=2)


def to_text(df):
    """终端显示用的表格，浮点数与文件输出同样保留有效数字"""
    return df.to_string(index=False, float_format=format_float)


def write_json(data, path, argv=None, seed=None):
    """写入 JSON，附带 _meta"""
    with open(path, 'w', encoding='utf-8') as f:
        f.write(to_json_text(data, argv, seed) + '\n')
    logger.info(f"JSON 已保存: {path}")
    return path


def write_table(df, path, argv=None, seed=None, fmt='csv'):
    """
    写入表格

    Args:
        df (pandas.DataFrame): 数据
        path (str): 输出路径
        fmt (str): 'csv' 或 'xlsx'；xlsx 额外写入 meta 工作表
    """
    if fmt == 'xlsx':
        if not path.endswith('.xlsx'):
            path = os.path.splitext(path)[0] + '.xlsx'
        with pd.ExcelWriter(path, engine='openpyxl') as writer:
            df.to_excel(writer, sheet_name='data', index=False)
            pd.DataFrame(list(meta(argv, seed).items()), columns=['key', 'value']).to_excel(
                writer, sheet_name='meta', index=False)
    elif fmt == 'csv':
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write('\n'.join(header_lines(argv, seed)) + '\n')
            df.to_csv(f, index=False, float_format=f"%.{OUTPUT_CONFIG['significant_digits']}g",
                      lineterminator='\n')
    else:
        raise ValueError(f"不支持的表格格式: {fmt}")
    logger.info(f"表格已保存: {path} ({len(df)} 行)")
    return path


def read_table(path):
    """读取 write_table 写出的 CSV（跳过 # 注释行）"""
    return pd.read_csv(path, comment='#')
