"""Check runner registry for cleanup on interpreter shutdown."""

import atexit
import weakref
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from ..verify.runner import CheckRunner

# Global registry of live runners whose worker pools must be released
_active_runners: "weakref.WeakSet[CheckRunner]" = weakref.WeakSet()


def _shutdown_all_runners() -> None:
    """Shut down every live runner's executor on exit."""
    for runner in list(_active_runners):
        try:
            runner.shutdown()
        except Exception:
            pass


def register_runner(runner: "CheckRunner") -> None:
    """Register a runner for automatic shutdown."""
    _active_runners.add(runner)


def active_runner_count() -> int:
    return len(_active_runners)


atexit.register(_shutdown_all_runners)


__all__ = ["active_runner_count", "register_runner"]
