#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
安装和设置脚本
创建虚拟环境、安装数值计算依赖、检查导入，并准备 output/、logs/、config/ 工作目录
"""

import json
import os
import subprocess
import sys
from pathlib import Path

from app.config import DEFAULT_OUTPUT_FOLDER, LOG_CONFIG, OPTIMIZER_CONFIG, USER_SETTINGS_PATH

VENV = Path("venv")
STACK = ("numpy", "scipy", "pandas", "openpyxl")


def check_python_version():
    """检查Python版本"""
    version = sys.version_info
    if version < (3, 9):
        print(f"❌ 需要Python 3.9或更高版本，当前版本: {version.major}.{version.minor}.{version.micro}")
        return False
    print(f"✅ Python版本检查通过: {version.major}.{version.minor}.{version.micro}")
    return True


def venv_executable(name):
    folder = "Scripts" if os.name == 'nt' else "bin"
    return str(VENV / folder / name)


def create_virtual_environment():
    """创建虚拟环境"""
    if VENV.exists():
        print("✅ 虚拟环境已存在")
        return True
    try:
        print("📦 创建虚拟环境...")
        subprocess.run([sys.executable, "-m", "venv", str(VENV)], check=True)
        print("✅ 虚拟环境创建成功")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ 虚拟环境创建失败: {e}")
        return False


def install_dependencies():
    """安装 requirements.txt 中的依赖"""
    try:
        print("📦 安装依赖包（numpy / scipy 首次安装可能需要几分钟）...")
        pip = venv_executable("pip")
        subprocess.run([pip, "install", "--upgrade", "pip"], check=True)
        subprocess.run([pip, "install", "-r", "requirements.txt"], check=True)
        print("✅ 依赖包安装成功")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ 依赖包安装失败: {e}")
        return False


def verify_stack():
    """在虚拟环境中导入数值计算栈并打印版本"""
    script = "; ".join([f"import {name}" for name in STACK] +
                       [f"print('{name}', {name}.__version__)" for name in STACK])
    result = subprocess.run([venv_executable("python"), "-c", script], capture_output=True, text=True)
    if result.returncode != 0:
        print(f"❌ 导入检查失败:\n{result.stderr.strip()}")
        return False
    for line in result.stdout.strip().splitlines():
        print(f"  {line}")
    print("✅ 数值计算依赖可用")
    return True


def create_folder_structure():
    """创建工作目录"""
    folders = [DEFAULT_OUTPUT_FOLDER, os.path.dirname(LOG_CONFIG['log_file']), os.path.dirname(USER_SETTINGS_PATH)]
    print("📁 创建工作目录...")
    for folder in folders:
        Path(folder).mkdir(parents=True, exist_ok=True)
        print(f"  {folder}/")


def write_example_settings():
    """写出用户配置示例；复制为 user_settings.json 后自动生效"""
    example = Path(USER_SETTINGS_PATH).with_name("user_settings.example.json")
    if example.exists():
        return
    settings = {
        'seed': OPTIMIZER_CONFIG['seed'],
        'starts': OPTIMIZER_CONFIG['starts'],
        'threads': None,
        'format': 'csv',
        'log_level': 'INFO'
    }
    with open(example, "w", encoding="utf-8") as f:
        json.dump(settings, f, ensure_ascii=False, indent=2)
    print(f"📄 配置示例: {example}")


def write_gitignore():
    entries = ["__pycache__/", "*.py[cod]", ".pytest_cache/", "venv/",
               f"{DEFAULT_OUTPUT_FOLDER}/", "logs/", USER_SETTINGS_PATH, ".DS_Store"]
    with open(".gitignore", "w", encoding="utf-8") as f:
        f.write("\n".join(entries) + "\n")


def print_usage_instructions():
    """打印使用说明"""
    print("\n" + "=" * 60)
    print("🎉 安装完成！")
    print("=" * 60)
    activate = "venv\\Scripts\\activate" if os.name == 'nt' else "source venv/bin/activate"
    print(f"\n1. 激活虚拟环境: {activate}")
    print("\n2. 运行工具:")
    print("   python main.py rate --body lq:q=1,d=2 --sing 'quadric:a=0,0;r=1'")
    print("   python main.py approx --body lq:q=2,d=2 --func 'quadric:a=0,0;r=1' --n 4..24")
    print("   python main.py reproduce --suite quick")
    print("\n3. 运行测试: python -m pytest")


def main():
    """主安装函数"""
    print("=" * 60)
    print("凸体次数多项式逼近工具 - 安装程序")
    print("=" * 60)

    steps = (check_python_version, create_virtual_environment, install_dependencies, verify_stack)
    for step in steps:
        if not step():
            return False

    create_folder_structure()
    write_example_settings()
    write_gitignore()
    print_usage_instructions()
    return True


if __name__ == "__main__":
    if not main():
        print("\n❌ 安装过程中出现错误")
        sys.exit(1)
    print("\n✅ 安装成功完成！")
