import threading
from concurrent.futures import Future, ThreadPoolExecutor
from types import TracebackType
from typing import Dict, List, Optional, Sequence, Type

from ..core.errors import LastMultError
from ..core.logger import get_logger
from ..core.registry import register_runner
from ..core.types import Check
from ..utils.validation import DEFAULT_TOLERANCE
from .checks import CheckResult


logger = get_logger(__name__)

DEFAULT_WORKERS = 4


class CheckRunner:
    """Runs independent residual checks on a shared thread pool.

    Results come back ordered by check name, whatever order the workers
    finish in, so reports built from them are reproducible.
    """

    def __init__(self, max_workers: int = DEFAULT_WORKERS, tolerance: float = DEFAULT_TOLERANCE):
        if max_workers < 1:
            raise ValueError(f"max_workers must be positive, got {max_workers}")
        self.max_workers = max_workers
        self.tolerance = tolerance

        self._executor: Optional[ThreadPoolExecutor] = None
        self._executor_lock = threading.Lock()

        self._shutdown_started = False
        self._shutdown_lock = threading.Lock()

        register_runner(self)

    def run(self, checks: Sequence[Check]) -> List[CheckResult]:
        names = [check.name for check in checks]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"Duplicate check names: {', '.join(duplicates)}")

        executor = self._get_or_create_executor()
        if executor is None:
            raise RuntimeError("CheckRunner has been shut down")

        futures: Dict[str, "Future[CheckResult]"] = {
            check.name: executor.submit(self._run_check, check) for check in checks
        }
        results = [futures[name].result() for name in sorted(futures)]

        failed = [result.name for result in results if not result.passed]
        logger.info("checks_finished", total=len(results), failed=len(failed))
        return results

    def shutdown(self) -> None:
        with self._shutdown_lock:
            if self._shutdown_started:
                return
            self._shutdown_started = True

        with self._executor_lock:
            executor, self._executor = self._executor, None
        if executor is not None:
            executor.shutdown(wait=True)

    def __enter__(self) -> "CheckRunner":
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        self.shutdown()

    def _get_or_create_executor(self) -> Optional[ThreadPoolExecutor]:
        with self._executor_lock:
            if self._shutdown_started:
                return None

            if self._executor is None:
                self._executor = ThreadPoolExecutor(
                    max_workers=self.max_workers, thread_name_prefix="lastmult-check"
                )

            return self._executor

    def _run_check(self, check: Check) -> CheckResult:
        log = logger.bind(check=check.name)
        log.debug("check_started")
        try:
            stats = check.run()
        except Exception as e:
            # an error fails its own check only
            error = str(e) if isinstance(e, LastMultError) else f"{type(e).__name__}: {e}"
            log.warning("check_errored", error=error)
            return CheckResult.failed(check.name, check.anchor, error, self.tolerance)

        result = CheckResult(check.name, check.anchor, stats)
        if result.passed:
            log.debug("check_passed", max=stats.max)
        else:
            log.warning("check_failed", max=stats.max, argmax=stats.argmax)
        return result


__all__ = ["DEFAULT_WORKERS", "CheckRunner"]
