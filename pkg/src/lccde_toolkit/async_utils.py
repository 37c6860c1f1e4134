from asyncio import BoundedSemaphore, gather, get_running_loop, run, to_thread
from collections.abc import Iterable
from typing import Callable, TypeVar

T = TypeVar("T")


async def run_concurrently(limit: int, calls: Iterable[Callable[[], T]]) -> list[T]:
    """Runs the provided blocking callables in worker threads,
    with maximum `limit` running at once. Results keep the input order."""
    if limit < 1:
        raise ValueError("limit must be at least one")
    semaphore = BoundedSemaphore(limit)

    async def bounded_task(call: Callable[[], T]):
        async with semaphore:
            return await to_thread(call)

    tasks = [bounded_task(call) for call in calls]
    results: list[T] = await gather(*tasks)
    return results


def run_blocking(limit: int, calls: Iterable[Callable[[], T]]) -> list[T]:
    """Synchronous entry point for `run_concurrently`.

    With `limit == 1` the calls run inline on the current thread.
    """
    calls = list(calls)
    if limit <= 1 or len(calls) <= 1:
        return [call() for call in calls]
    try:
        get_running_loop()
    except RuntimeError:
        return run(run_concurrently(limit, calls))
    raise RuntimeError(
        "run_blocking() cannot be used inside a running event loop; "
        "await the *_async variant instead"
    )
