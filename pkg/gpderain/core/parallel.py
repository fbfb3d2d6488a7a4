"""Async parallel execution for per-record work (rendering, evaluation)."""

import asyncio
from typing import Awaitable, Callable, Iterable, TypeVar

from gpderain.core.exceptions import GPDerainError

T = TypeVar("T")
R = TypeVar("R")


class AsyncParallelExecutor:
    """Async executor that maps a function over items with bounded concurrency.

    Results come back in input order. Sync functions run in the default thread
    pool, so numpy-heavy work overlaps where numpy releases the GIL.
    """

    def __init__(self, concurrency: int):
        """Initialize async parallel executor.

        Args:
            concurrency: Maximum number of items processed at once
        """
        if concurrency < 1:
            raise ValueError("concurrency must be at least 1")
        self.concurrency = concurrency
        self.semaphore = asyncio.Semaphore(concurrency)

    async def process_items(
        self,
        items: Iterable[T],
        process_func: Callable[[T], R] | Callable[[T], Awaitable[R]],
    ) -> list[R]:
        """Process items in parallel while maintaining order.

        Args:
            items: Items to process
            process_func: Function applied to each item (sync or async)

        Returns:
            Results in the same order as the input items

        Raises:
            GPDerainError: If processing any item fails; domain errors raised
                by process_func propagate unchanged
        """
        item_list = list(items)
        if not item_list:
            return []

        tasks = [self._process_with_semaphore(item, process_func) for item in item_list]
        results = await asyncio.gather(*tasks, return_exceptions=True)

        processed = []
        for i, result in enumerate(results):
            if isinstance(result, GPDerainError):
                raise result
            if isinstance(result, Exception):
                raise GPDerainError(
                    f"Item {i} processing failed: {result}",
                    context={"item_index": i, "concurrency": self.concurrency},
                ) from result
            processed.append(result)
        return processed

    async def _process_with_semaphore(self, item: T, process_func) -> R:
        async with self.semaphore:
            if asyncio.iscoroutinefunction(process_func):
                return await process_func(item)
            loop = asyncio.get_running_loop()
            return await loop.run_in_executor(None, process_func, item)


def parallel_map(
    process_func: Callable[[T], R], items: Iterable[T], concurrency: int = 1
) -> list[R]:
    """Map process_func over items, in parallel when concurrency > 1.

    Args:
        process_func: Sync function applied to each item
        items: Items to process
        concurrency: Maximum parallel workers; 1 runs inline

    Returns:
        Results in input order
    """
    if concurrency <= 1:
        return [process_func(item) for item in items]

    async def _run() -> list[R]:
        executor = AsyncParallelExecutor(concurrency)
        return await executor.process_items(items, process_func)

    return asyncio.run(_run())
