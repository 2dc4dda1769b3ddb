"""
Logging System
Centralized simulator logging with console output and optional file rotation
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional


LOG_ENV_VAR = "TIERSIM_LOG"

# TIERSIM_LOG accepts the short names used on the command line
_LEVEL_ALIASES = {
    'error': 'ERROR',
    'warn': 'WARNING',
    'warning': 'WARNING',
    'info': 'INFO',
    'debug': 'DEBUG',
}


def resolve_level(level: Optional[str] = None) -> int:
    """
    Resolve a logging level from an explicit value or the TIERSIM_LOG variable

    Args:
        level: Level name; falls back to the environment, then INFO

    Returns:
        Numeric logging level
    """
    name = level or os.environ.get(LOG_ENV_VAR) or 'info'
    name = _LEVEL_ALIASES.get(name.strip().lower(), name.strip().upper())
    return getattr(logging, name, logging.INFO)


class SimLogger:
    """Centralized logging system for the simulator"""

    def __init__(self, log_file: Optional[str] = None,
                 level: Optional[str] = None,
                 max_size_mb: int = 10,
                 backup_count: int = 5):
        """
        Initialize logging system

        Args:
            log_file: Path to log file; console only when omitted
            level: Logging level (error, warn, info, debug)
            max_size_mb: Maximum log file size in MB before rotation
            backup_count: Number of backup log files to keep
        """
        self.log_file = log_file
        self.level = resolve_level(level)
        self.max_size_bytes = max_size_mb * 1024 * 1024
        self.backup_count = backup_count

        self.logger = logging.getLogger("TierSim")
        self.logger.setLevel(self.level)
        self.logger.propagate = False

        # Clear any existing handlers
        for handler in list(self.logger.handlers):
            handler.close()
        self.logger.handlers.clear()

        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # Console handler writes to stderr so stdout stays machine-readable
        console_handler = logging.StreamHandler()
        console_handler.setLevel(self.level)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        if log_file:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=self.max_size_bytes,
                backupCount=backup_count,
                encoding='utf-8'
            )
            file_handler.setLevel(self.level)
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

    @property
    def debug_enabled(self) -> bool:
        return self.logger.isEnabledFor(logging.DEBUG)

    def info(self, message: str) -> None:
        """Log info message"""
        self.logger.info(message)

    def debug(self, message: str) -> None:
        """Log debug message"""
        self.logger.debug(message)

    def warning(self, message: str) -> None:
        """Log warning message"""
        self.logger.warning(message)

    def error(self, message: str, exc_info: bool = False) -> None:
        """Log error message"""
        self.logger.error(message, exc_info=exc_info)

    def critical(self, message: str, exc_info: bool = False) -> None:
        """Log critical message"""
        self.logger.critical(message, exc_info=exc_info)

    def log_migration(self, kind: str, folio_id: int, order: int,
                      status: str = "SUCCESS", detail: str = "") -> None:
        """
        Log a migration with structured format

        Args:
            kind: Migration kind (PROMOTE, DEMOTE, SPLIT, ADMIT)
            folio_id: Folio being migrated
            order: Folio order
            status: Outcome (SUCCESS, FAILED, DEFERRED)
            detail: Extra context
        """
        # Migrations are per-fault events; they only ever reach debug output
        if not self.debug_enabled:
            return

        message = f"[{kind}] {status} | folio={folio_id} order={order}"
        if detail:
            message += f" | {detail}"
        self.debug(message)

    def log_run_status(self, status: str, message: str = "") -> None:
        """
        Log scenario run status changes

        Args:
            status: Status type (STARTED, FINISHED, ERROR)
            message: Additional message
        """
        full_message = f"[RUN-{status}]"
        if message:
            full_message += f" {message}"

        if status == "ERROR":
            self.error(full_message)
        else:
            self.info(full_message)

    def log_sweep_row(self, scenario: str, policy: str, level: float,
                      throughput: float) -> None:
        """Log one completed sweep cell"""
        self.info(f"[SWEEP] {scenario} | policy={policy} contention={level:g}% "
                  f"throughput_proxy={throughput:.6f}")


# Singleton instance
_logger_instance: Optional[SimLogger] = None


def get_logger(log_file: Optional[str] = None,
               level: Optional[str] = None,
               max_size_mb: int = 10,
               backup_count: int = 5) -> SimLogger:
    """
    Get singleton logger instance

    Args:
        log_file: Path to log file
        level: Logging level
        max_size_mb: Maximum log file size in MB
        backup_count: Number of backup log files

    Returns:
        SimLogger instance
    """
    global _logger_instance
    if _logger_instance is None:
        _logger_instance = SimLogger(log_file, level, max_size_mb, backup_count)
    return _logger_instance


def init_logger(level: Optional[str] = None, log_file: Optional[str] = None) -> SimLogger:
    """Rebuild the singleton logger with new settings"""
    global _logger_instance
    _logger_instance = SimLogger(log_file, level)
    return _logger_instance


def init_logger_from_config(config: dict) -> SimLogger:
    """
    Initialize logger from configuration dictionary

    Args:
        config: Logging configuration dictionary

    Returns:
        SimLogger instance
    """
    global _logger_instance
    _logger_instance = SimLogger(
        log_file=config.get('log_file'),
        level=config.get('level'),
        max_size_mb=config.get('max_size_mb', 10),
        backup_count=config.get('backup_count', 5)
    )
    return _logger_instance
