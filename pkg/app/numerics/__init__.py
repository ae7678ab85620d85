#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# 数值计算模块
