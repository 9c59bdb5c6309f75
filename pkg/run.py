import argparse
import logging
import sys

from core.config import apply_overrides, load_config
from core.diagnostics import BouncerDiagnostics, EXIT_CONFIG, handle_exception
from core.errors import BouncerError
from core.logger import setup_logger
from bouncer.commands import COMMANDS, write_report


def parse_s_list(value):
    """
    解析 s 列表, 支持逗号分隔和区间写法。
    示例:
        "10"        -> [10]
        "10,14,20"  -> [10, 14, 20]
        "1-10"      -> [1, 2, ..., 10]
    """
    try:
        if "-" in value and "," not in value:
            lo, hi = (int(v) for v in value.split("-", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        out = []
        for part in value.split(","):
            number = float(part)
            out.append(int(number) if number.is_integer() else number)
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"无效的 s 列表: {value!r} (例: 10,14,20 或 1-10)")


def build_parser():
    """
    构建命令行解析器, 子命令共享同一组参数。
    """
    common = argparse.ArgumentParser(add_help=False)

    # 基础设置
    basic_group = common.add_argument_group('📁 基础设置')
    basic_group.add_argument(
        '--config',
        help='配置文件路径 (默认: $BOUNCER_CONFIG 或 configs/config.yaml)',
        type=str
    )
    basic_group.add_argument(
        '--format',
        choices=['csv', 'json', 'table'],
        help='输出格式: csv=表格数据, json=带元数据, table=终端对齐'
    )
    basic_group.add_argument(
        '--out',
        help='输出文件 (默认: 标准输出)',
        type=str
    )

    # 物理参数
    physics_group = common.add_argument_group('🧮 物理参数')
    physics_group.add_argument(
        '--s',
        help='格点比 s = l0/lambda, 逗号列表或区间 (如: "1-10", "10,14,20")',
        type=parse_s_list
    )
    physics_group.add_argument(
        '--nmax',
        help='能级数量 (spectrum)',
        type=int
    )
    physics_group.add_argument(
        '--n',
        help='能级编号 (profile / lifetime)',
        type=int
    )
    physics_group.add_argument(
        '--method',
        choices=['lattice', 'bessel'],
        default='lattice',
        help='波函数求解方法 (profile)'
    )
    physics_group.add_argument(
        '--g-factor',
        dest='g_factor',
        help='有效重力倍数 g -> g_factor * g (bound, 离心情形)',
        type=float
    )
    physics_group.add_argument(
        '--L',
        dest='L',
        help='微扰求和截断 (rate, >= 10)',
        type=int
    )

    # 性能设置
    perf_group = common.add_argument_group('⚙️ 性能设置')
    perf_group.add_argument(
        '--num-workers',
        dest='num_workers',
        help='多进程数量 (spectrum, 按 s 并行)',
        type=int
    )
    perf_group.add_argument(
        '--progress',
        action='store_true',
        help='显示进度条'
    )

    # 调试选项
    debug_group = common.add_argument_group('🔍 调试选项')
    debug_group.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='详细输出模式'
    )

    parser = argparse.ArgumentParser(
        description="🚀 polymer-bouncer: 聚合物量子化的重力弹跳粒子",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例用法:
  能级表 (s = 1..10, n = 1..10):
    python run.py spectrum

  外推到更大的 s:
    python run.py spectrum --s 20 --nmax 3 --format json

  密度分布:
    python run.py profile --s 10 --n 1 --out profile_s10_n1.csv

  lambda 上界 (自由落体 + 离心):
    python run.py bound --g-factor 1e7

  振动寿命与上界:
    python run.py lifetime --format table

  引力子辐射速率比:
    python run.py rate --L 60

  多进程加速:
    python run.py spectrum --num-workers 4 --progress

退出码: 0 成功, 2 配置错误, 3 数值失败, 4 部分结果
更多信息请查看 README.md
        """
    )
    parser.add_argument(
        '--diagnose',
        action='store_true',
        help='运行系统诊断检查'
    )
    sub = parser.add_subparsers(dest='command', metavar='{spectrum,profile,bound,lifetime,rate}')
    sub.add_parser('spectrum', parents=[common], help='能级表, 双路求解')
    sub.add_parser('profile', parents=[common], help='格点与连续密度分布')
    sub.add_parser('bound', parents=[common], help='GRANIT 能量分辨率给出的 lambda 上界')
    sub.add_parser('lifetime', parents=[common], help='振动跃迁寿命与 lambda 上界')
    sub.add_parser('rate', parents=[common], help='四极辐射速率与聚合物修正')
    return parser


def command_line_overrides(args):
    """命令行参数 -> {(SECTION, KEY): value}; --s/--n 按子命令落到不同配置项"""
    s_list = getattr(args, 's', None)
    s_targets = {
        'spectrum': ('SPECTRUM', 'S_LIST'),
        'profile': ('SPECTRUM', 'PROFILE_S'),
        'lifetime': ('VIBRATION', 'S'),
        'rate': ('RADIATIVE', 'S_SWEEP'),
    }
    n_targets = {
        'profile': ('SPECTRUM', 'PROFILE_N'),
        'lifetime': ('VIBRATION', 'LEVEL'),
    }

    overrides = {
        ('SPECTRUM', 'N_MAX'): getattr(args, 'nmax', None),
        ('EXPERIMENT', 'G_FACTOR'): getattr(args, 'g_factor', None),
        ('RADIATIVE', 'L'): getattr(args, 'L', None),
        ('OUTPUT', 'NUM_WORKERS'): getattr(args, 'num_workers', None),
        ('OUTPUT', 'FORMAT'): getattr(args, 'format', None),
        ('OUTPUT', 'OUT'): getattr(args, 'out', None),
    }
    if s_list is not None and args.command in s_targets:
        takes_list = args.command in ('spectrum', 'rate')
        overrides[s_targets[args.command]] = s_list if takes_list else s_list[0]
    if getattr(args, 'n', None) is not None and args.command in n_targets:
        overrides[n_targets[args.command]] = args.n
    return overrides


def run_command(args, cfg):
    """执行子命令并写出结果, 返回退出码"""
    builder = COMMANDS[args.command]
    if args.command == 'spectrum':
        report = builder(cfg, progress=args.progress)
    elif args.command == 'profile':
        report = builder(cfg, method=args.method)
    else:
        report = builder(cfg)
    write_report(report, cfg.OUTPUT.FORMAT, cfg.OUTPUT.OUT)
    return report.exit_code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    # 诊断模式
    if args.diagnose:
        print(BouncerDiagnostics.create_diagnostic_report())
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    # 设置日志级别, 日志走 stderr, stdout 只留给数据
    log_level = logging.DEBUG if args.verbose else logging.INFO
    logger = setup_logger("bouncer", level=log_level, stream=sys.stderr)

    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, command_line_overrides(args))
        if args.verbose:
            logger.debug("配置: %s", {k: dict(v) for k, v in cfg.items()})
        return run_command(args, cfg)
    except (BouncerError, FileNotFoundError) as exc:
        logger.error(BouncerDiagnostics.diagnose_error(exc))
        return BouncerDiagnostics.exit_code_for(exc)


if __name__ == "__main__":
    sys.excepthook = handle_exception
    sys.exit(main())
