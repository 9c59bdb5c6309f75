#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
诊断和错误处理模块
提供友好的错误信息、解决建议和退出码映射
"""

import importlib
import sys
import traceback
from typing import List, Tuple

from core.config import CONFIG_ENV_VAR, default_config_path
from core.errors import (BouncerError, ConfigError, ConvergenceError, DomainError, NegativeOrderError,
                         UnboundedBoundError, UnsupportedScaleError)

__all__ = ["BouncerDiagnostics", "handle_exception", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_PARTIAL"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4

_REQUIRED_MODULES = ("numpy", "scipy", "yaml", "easydict", "tqdm")

# 按异常类查找, 子类先于父类
_ERROR_SUGGESTIONS = (
    (ConfigError, {
        "description": "配置文件或命令行参数无效",
        "solutions": [
            "检查 configs/config.yaml 中的键名和取值范围",
            f"确认环境变量 {CONFIG_ENV_VAR} 指向正确的文件",
            "删除未知的配置项, 所有物理常数必须为正",
        ],
    }),
    (NegativeOrderError, {
        "description": "Bessel 阶数为负 (eps >= 1), 该能级只能用格点或微扰方法",
        "solutions": [
            "改用 --method lattice",
            "s = 1 以及 s = 2 的高能级属于这种情况",
        ],
    }),
    (UnsupportedScaleError, {
        "description": "输入超出保证精度的数值范围",
        "solutions": [
            "减小 s (2 * s^3 需不超过 1e4)",
            "减小 --nmax 或提高 SPECTRUM.MAX_DIMENSION",
        ],
    }),
    (UnboundedBoundError, {
        "description": "公式分母为零, 不存在有限上界",
        "solutions": [
            "检查振动谱 S_a 是否全为零",
            "增大 VIBRATION.N_SUM_MAX",
        ],
    }),
    (ConvergenceError, {
        "description": "求根或线性求解没有收敛",
        "solutions": [
            "用 --verbose 查看求根区间",
            "尝试相邻的 s 值确认是否为孤立问题",
        ],
    }),
    (DomainError, {
        "description": "参数超出运算的定义域",
        "solutions": [
            "能级编号必须是正整数, s 必须 >= 1",
            "跃迁需要两个不同的能级",
        ],
    }),
    (FileNotFoundError, {
        "description": "文件或目录不存在",
        "solutions": [
            "检查 --config 路径是否正确",
            "确保 configs/config.yaml 存在",
        ],
    }),
    (ImportError, {
        "description": "依赖包缺失",
        "solutions": [
            "运行 'pip install -r requirements.txt'",
            "检查Python环境是否正确",
        ],
    }),
)

_FALLBACK = {
    "description": "未知错误",
    "solutions": [
        "检查控制台错误信息",
        "确保所有依赖正确安装",
        "尝试使用 --verbose 查看详细信息",
    ],
}


class BouncerDiagnostics:
    """诊断工具类"""

    @staticmethod
    def check_environment() -> List[Tuple[str, bool, str]]:
        """检查运行环境"""
        checks = []

        py_version = sys.version_info
        py_ok = py_version >= (3, 8)
        py_msg = f"Python {py_version.major}.{py_version.minor}.{py_version.micro}"
        if not py_ok:
            py_msg += " (需要 3.8+)"
        checks.append(("Python版本", py_ok, py_msg))

        for module in _REQUIRED_MODULES:
            try:
                mod = importlib.import_module(module)
                checks.append((f"依赖 {module}", True, getattr(mod, "__version__", "已安装")))
            except ImportError as exc:
                checks.append((f"依赖 {module}", False, f"缺失 ({exc})"))

        cfg_path = default_config_path()
        exists = cfg_path.exists()
        checks.append((f"配置文件 {cfg_path}", exists, "存在" if exists else "缺失"))
        return checks

    @staticmethod
    def diagnose_error(error: BaseException) -> str:
        """诊断错误并提供解决建议"""
        suggestion = _FALLBACK
        for cls, entry in _ERROR_SUGGESTIONS:
            if isinstance(error, cls):
                suggestion = entry
                break

        diagnosis = f"""
❌ 错误类型: {type(error).__name__}
📝 错误描述: {suggestion['description']}
💬 错误信息: {error}

💡 解决建议:
"""
        for i, solution in enumerate(suggestion["solutions"], 1):
            diagnosis += f"   {i}. {solution}\n"
        return diagnosis

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        """配置问题 -> 2, 数值问题 -> 3, 其他 -> 1"""
        if isinstance(error, (ConfigError, FileNotFoundError)):
            return EXIT_CONFIG
        if isinstance(error, BouncerError):
            return EXIT_NUMERICAL
        return 1

    @staticmethod
    def create_diagnostic_report() -> str:
        """创建完整的诊断报告"""
        report = "🔍 polymer-bouncer 系统诊断报告\n"
        report += "=" * 50 + "\n\n"

        report += "📋 环境检查:\n"
        for name, status, message in BouncerDiagnostics.check_environment():
            status_icon = "✅" if status else "❌"
            report += f"   {status_icon} {name}: {message}\n"

        report += "\n" + "=" * 50 + "\n"
        return report


def handle_exception(exc_type, exc_value, exc_traceback):
    """全局异常处理器"""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return

    err = sys.stderr
    print("\n" + "=" * 60, file=err)
    print("❌ polymer-bouncer 运行时发生错误", file=err)
    print("=" * 60, file=err)
    print(BouncerDiagnostics.diagnose_error(exc_value), file=err)

    print("\n🔍 详细错误信息:", file=err)
    traceback.print_exception(exc_type, exc_value, exc_traceback, file=err)

    print("\n📋 如需更多帮助:", file=err)
    print("   1. 运行诊断: python run.py --diagnose", file=err)
    print("   2. 查看文档: cat README.md", file=err)

    sys.exit(BouncerDiagnostics.exit_code_for(exc_value))
