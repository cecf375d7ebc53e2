#!/usr/bin/env python
# twounitary/models.py

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

from contextlib import contextmanager
import json
import logging
from typing import Any, Dict, Generator, List, Optional

import arrow
import numpy as np
from sqlalchemy import (
    Boolean,
    Column,
    DateTime,
    Float,
    Integer,
    MetaData,
    String,
    create_engine,
)
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.orm.session import Session

from twounitary.version import VERSION

log = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

MAX_GENERIC_STRING_LENGTH = 255
DIGEST_LENGTH = 64

NAMING_CONVENTION = {
    "ix": 'ix_%(column_0_label)s',
    "uq": "uq_%(table_name)s_%(column_0_name)s",
    "ck": "ck_%(table_name)s_%(constraint_name)s",
    "fk": "fk_%(table_name)s_%(column_0_name)s_%(referred_table_name)s",
    "pk": "pk_%(table_name)s",
}

# =============================================================================
# SQLAlchemy base.
# =============================================================================

MASTER_META = MetaData(naming_convention=NAMING_CONVENTION)
Base = declarative_base(metadata=MASTER_META)


# =============================================================================
# Plain value objects
# =============================================================================

def jsonable(x: Any) -> Any:
    """numpy and complex values to JSON-friendly builtins."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {'re': float(x.real), 'im': float(x.imag)}
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, np.bool_)):
        return x.item()
    return x


class CommandReport(object):
    """
    What one command did: its echo, input digests, results, tolerances,
    verdict and wall time. Field names are part of the output format.
    """

    def __init__(self, command: str, argv: List[str]) -> None:
        self.command = command
        self.argv = list(argv)
        self.version = VERSION
        self.started_at = arrow.now()
        self.inputs = {}  # type: Dict[str, str]
        self.results = {}  # type: Dict[str, Any]
        self.tolerances = {}  # type: Dict[str, float]
        self.verdict = None  # type: Optional[bool]
        self.wall_time_s = None  # type: Optional[float]

    def finish(self) -> None:
        self.wall_time_s = (arrow.now() - self.started_at).total_seconds()

    def as_dict(self) -> Dict[str, Any]:
        return jsonable({
            'command': self.command,
            'argv': self.argv,
            'version': self.version,
            'started_at': self.started_at.isoformat(),
            'inputs': self.inputs,
            'results': self.results,
            'tolerances': self.tolerances,
            'verdict': (None if self.verdict is None
                        else ('pass' if self.verdict else 'fail')),
            'wall_time_s': self.wall_time_s,
        })

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = []

        def emit(prefix: str, value: Any) -> None:
            if isinstance(value, dict) and value and not (
                    set(value) == {'re', 'im'}):
                for k in sorted(value):
                    emit("{}.{}".format(prefix, k) if prefix else k, value[k])
            else:
                lines.append("{}: {}".format(prefix, json.dumps(value)))

        emit("", self.as_dict())
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return "{} -> {}".format(self.command, self.as_dict()['verdict'])


# =============================================================================
# Run ledger
# =============================================================================

class RunRecord(Base):
    __tablename__ = 'run_record'
    id = Column(Integer, primary_key=True)
    when = Column(DateTime)
    version = Column(String(MAX_GENERIC_STRING_LENGTH))
    command = Column(String(MAX_GENERIC_STRING_LENGTH))
    input_digest = Column(String(DIGEST_LENGTH))
    d = Column(Integer)
    seed = Column(Integer)
    passed = Column(Boolean)
    iterations = Column(Integer)
    deficit_u = Column(Float)
    deficit_r = Column(Float)
    deficit_g = Column(Float)
    residual = Column(Float)

    def __repr__(self) -> str:
        return "<RunRecord(id={}, command={!r}, passed={})>".format(
            self.id, self.command, self.passed)

    @classmethod
    def record_run(cls, session: Session, report: CommandReport,
                   **kwargs: Any) -> "RunRecord":
        digest = next(iter(report.inputs.values()), None)
        record = cls(
            when=report.started_at.to('utc').naive,
            version=report.version,
            command=report.command,
            input_digest=digest,
            passed=report.verdict,
            **kwargs
        )
        session.add(record)
        session.commit()
        log.debug("Recorded {!r}".format(record))
        return record


@contextmanager
def session_scope(url: str, echo: bool = False) \
        -> Generator[Session, None, None]:
    engine = create_engine(url, echo=echo)
    Base.metadata.create_all(engine)
    session = sessionmaker(bind=engine)()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()
        engine.dispose()
