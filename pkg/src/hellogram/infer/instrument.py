"""Cell-read instrumentation for the scoring loop."""

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional


class CellReadCounter:
    """Number of probability cells read while the counter was active."""

    def __init__(self) -> None:
        self.count = 0

    def __repr__(self) -> str:
        return f"CellReadCounter(count={self.count})"


_active: ContextVar[Optional[CellReadCounter]] = ContextVar("hellogram_cell_reads", default=None)


def record_cell_reads(n: int) -> None:
    counter = _active.get()
    if counter is not None:
        counter.count += n


@contextmanager
def count_cell_reads() -> Iterator[CellReadCounter]:
    """Count probability cells read by scoring calls in this context.

    Example:
        ```python
        with count_cell_reads() as reads:
            predict(models, x)
        assert reads.count == sum(min(len(x), m.m) for m in models.models())
        ```
    """
    counter = CellReadCounter()
    token = _active.set(counter)
    try:
        yield counter
    finally:
        _active.reset(token)
