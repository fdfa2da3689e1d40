#!/usr/bin/env python3
"""
Pytest ortak ayarları

Uzun süren yakınsama ve tam doğrulama testleri `slow` ile işaretlidir;
yalnızca --runslow verildiğinde ya da KINETIK_RUN_SLOW=1 iken koşar.
"""

import os

import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="slow testlerini de koş")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: uzun süren yakınsama / tam takım testleri")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.getenv("KINETIK_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="--runslow ile koşar")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
