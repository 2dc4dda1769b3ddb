"""Tests for logger level resolution and structured helpers"""

import logging

from logger import LOG_ENV_VAR, SimLogger, init_logger, init_logger_from_config, resolve_level


def test_level_from_environment(monkeypatch):
    monkeypatch.setenv(LOG_ENV_VAR, "warn")
    assert resolve_level() == logging.WARNING
    assert resolve_level("debug") == logging.DEBUG


def test_default_level_is_info(monkeypatch):
    monkeypatch.delenv(LOG_ENV_VAR, raising=False)
    assert resolve_level() == logging.INFO


def test_migrations_only_logged_at_debug(tmp_path):
    log_file = tmp_path / "sim.log"
    logger = SimLogger(str(log_file), level="info")
    logger.log_migration("PROMOTE", 3, 9)
    logger.log_run_status("STARTED", "scenario")
    debug_logger = init_logger("debug", str(log_file))
    debug_logger.log_migration("SPLIT", 4, 7, "SUCCESS", "reason=DensityPick")
    for handler in debug_logger.logger.handlers:
        handler.flush()

    text = log_file.read_text(encoding='utf-8')
    assert "[RUN-STARTED] scenario" in text
    assert "folio=3" not in text
    assert "[SPLIT] SUCCESS | folio=4 order=7 | reason=DensityPick" in text


def test_init_from_config(tmp_path):
    logger = init_logger_from_config({'level': 'error', 'log_file': str(tmp_path / 'x.log')})
    assert logger.level == logging.ERROR
    assert (tmp_path / 'x.log').exists()
