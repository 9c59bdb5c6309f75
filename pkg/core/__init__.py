"""
Core package providing shared utilities: configuration loading, logging,
the exception hierarchy and diagnostics.

Other modules import common helpers via
    from core.config import load_config
    from core.logger import setup_logger
    from core.errors import DomainError
"""
