# -*- coding: utf-8 -*-
"""规格解析、结果输出与复现套件"""
