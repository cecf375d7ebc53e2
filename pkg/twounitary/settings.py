#!/usr/bin/env python
# twounitary/settings.py

"""
    Copyright (C) 2023-2026 the twounitary authors.

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
"""

import os
from typing import Any, Dict, Optional

from twounitary.constants import (
    DB_URL_ENV_VAR,
    NUM_THREADS_ENV_VAR,
    U36_FILE_ENV_VAR,
)

dbsettings = {
    # three slashes for a relative path, e.g. sqlite:///runs.sqlite
    'url': None,
    'echo': False,
}

runsettings = {
    'num_threads': None,
    'u36_file': None,
}


def get_database_settings() -> Dict[str, Any]:
    if dbsettings['url'] is None and DB_URL_ENV_VAR in os.environ:
        set_database_url(os.environ[DB_URL_ENV_VAR])
    return dbsettings


def get_database_url() -> Optional[str]:
    """None means "no run ledger"."""
    return get_database_settings()['url']


def set_database_url(url: Optional[str]) -> None:
    dbsettings['url'] = url


def set_database_echo(echo: bool) -> None:
    dbsettings['echo'] = echo


def get_num_threads() -> int:
    n = runsettings['num_threads']
    if n is None:
        value = os.environ.get(NUM_THREADS_ENV_VAR)
        if value is None:
            return os.cpu_count() or 1
        try:
            n = int(value)
        except ValueError:
            raise ValueError(
                "Environment variable {} must be an integer, not {!r}".format(
                    NUM_THREADS_ENV_VAR, value))
    if n < 1:
        raise ValueError("Thread count must be >= 1, not {}".format(n))
    return n


def set_num_threads(n: Optional[int]) -> None:
    runsettings['num_threads'] = n


def get_u36_path() -> Optional[str]:
    """
    Command-line value, else environment variable, else None. No U36 data
    ships with the package; it must be supplied one of these two ways. The
    path returned need not exist.
    """
    if runsettings['u36_file']:
        return runsettings['u36_file']
    return os.environ.get(U36_FILE_ENV_VAR) or None


def set_u36_path(path: Optional[str]) -> None:
    runsettings['u36_file'] = path
