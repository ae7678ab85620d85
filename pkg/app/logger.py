#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日志配置
"""

import logging
import os

from app.config import LOG_CONFIG

_configured = False


def setup_logging(level=None, log_file=LOG_CONFIG['log_file']):
    """
    配置根日志记录器（只生效一次）

    Args:
        level (str): 日志级别，默认使用 LOG_CONFIG
        log_file (str): 日志文件路径，None 表示只输出到终端
    """
    global _configured
    if _configured:
        if level:
            logging.getLogger().setLevel(getattr(logging, level.upper()))
        return

    handlers = [logging.StreamHandler()]
    if log_file:
        # 确保日志目录存在
        _log_dir = os.path.dirname(log_file)
        if _log_dir:
            os.makedirs(_log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, (level or LOG_CONFIG['log_level']).upper()),
        format=LOG_CONFIG['log_format'],
        datefmt=LOG_CONFIG.get('date_format'),
        handlers=handlers
    )
    _configured = True
