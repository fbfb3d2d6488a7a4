"""Unit tests for parallel execution."""

import asyncio
import threading

import pytest

from gpderain.core.exceptions import DataError, GPDerainError
from gpderain.core.parallel import AsyncParallelExecutor, parallel_map


class TestAsyncParallelExecutor:
    """Tests for AsyncParallelExecutor."""

    def test_results_keep_input_order(self):
        """Test that results come back in input order despite uneven work."""

        async def slow_square(x):
            await asyncio.sleep(0.01 * (5 - x))
            return x * x

        executor = AsyncParallelExecutor(concurrency=3)
        assert asyncio.run(executor.process_items(range(5), slow_square)) == [0, 1, 4, 9, 16]

    def test_concurrency_bound(self):
        """Test that no more than `concurrency` items run at once."""
        active, peak = 0, 0
        lock = threading.Lock()

        async def track(_):
            nonlocal active, peak
            with lock:
                active += 1
                peak = max(peak, active)
            await asyncio.sleep(0.01)
            with lock:
                active -= 1

        asyncio.run(AsyncParallelExecutor(concurrency=2).process_items(range(8), track))
        assert peak <= 2

    def test_empty_input(self):
        assert asyncio.run(AsyncParallelExecutor(2).process_items([], lambda x: x)) == []

    def test_invalid_concurrency(self):
        with pytest.raises(ValueError):
            AsyncParallelExecutor(concurrency=0)

    def test_domain_errors_propagate_unchanged(self):
        def fail(_):
            raise DataError("bad record", context={"id": "r1"})

        with pytest.raises(DataError, match="bad record"):
            asyncio.run(AsyncParallelExecutor(2).process_items([1], fail))

    def test_other_errors_are_wrapped(self):
        def fail(x):
            if x == 2:
                raise RuntimeError("boom")
            return x

        with pytest.raises(GPDerainError, match="Item 2 processing failed") as exc_info:
            asyncio.run(AsyncParallelExecutor(2).process_items([0, 1, 2], fail))
        assert exc_info.value.context["item_index"] == 2


class TestParallelMap:
    """Tests for parallel_map."""

    def test_inline_and_parallel_agree(self):
        items = list(range(10))
        assert parallel_map(lambda x: x + 1, items) == parallel_map(lambda x: x + 1, items, 4)

    def test_inline_runs_on_calling_thread(self):
        caller = threading.get_ident()
        assert parallel_map(lambda _: threading.get_ident(), [1, 2], concurrency=1) == [caller] * 2
