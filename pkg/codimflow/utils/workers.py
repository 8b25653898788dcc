"""
Thread pool for independent pieces of work (trials, families, scales,
net centers). Results keep the order of the inputs, so runs stay
deterministic whatever the number of threads.

"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from core.secrets import env



Item = TypeVar("Item")
Result = TypeVar("Result")

_threads:int|None = None



def set_threads(threads:int|None) -> None:
    """Cap the pool size for the rest of the process (None: use the env)."""

    global _threads
    _threads = threads


def thread_count() -> int:
    return max(1, _threads if _threads is not None else env.threads)



def parallel_map(function:Callable[[Item], Result], items:Iterable[Item]) -> list[Result]:
    """Apply `function` to every item, in a thread pool when allowed."""

    items = list(items)
    threads = min(thread_count(), len(items))
    if threads <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(function, items))
