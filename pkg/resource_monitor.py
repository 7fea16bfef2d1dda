"""
Resource Monitor for candidate fitting

Looks at current CPU and memory load and decides how many candidate models
can be fitted at once:
- Sequential: machine busy or short on memory, one fit at a time
- Parallel: headroom available, several fits on a thread pool

Largest state-space models are scheduled first so long fits start early.
"""

import os
import logging
import time
from typing import Dict, List, Optional
from dataclasses import dataclass, field
from enum import Enum

try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False

from sarima import SarimaSpec

logger = logging.getLogger(__name__)


class FitMode(Enum):
    """Fitting strategy based on available resources."""
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"


@dataclass
class ResourceSnapshot:
    """Point-in-time resource usage snapshot."""
    cpu_percent: float
    memory_percent: float
    memory_available_mb: float
    cpu_count: int
    timestamp: float


@dataclass
class FitCapacity:
    """How many fits the machine can take right now."""
    recommended_workers: int
    recommended_mode: FitMode
    warnings: List[str] = field(default_factory=list)


@dataclass
class FitPlan:
    """Execution plan for a candidate sweep."""
    mode: FitMode
    worker_count: int
    order: List[str]          # candidate labels, largest model first
    warnings: List[str]


def state_dimension(spec: SarimaSpec) -> int:
    return max(spec.p + spec.s * spec.P, spec.q + spec.s * spec.Q + 1)


class ResourceMonitor:
    """
    Monitors system resources and recommends a worker count for fitting.

    Thresholds are configurable to accommodate different hardware profiles.
    """

    DEFAULT_THRESHOLDS = {
        "cpu_medium": 60,
        "cpu_high": 80,
        "cpu_critical": 95,
        "memory_high": 80,
        "memory_critical": 90,
        "memory_min_available_mb": 500,
        "max_workers": 8,
    }

    def __init__(self, thresholds: Optional[Dict] = None):
        self.thresholds = {**self.DEFAULT_THRESHOLDS}
        if thresholds:
            self.thresholds.update(thresholds)
        if not PSUTIL_AVAILABLE:
            logger.warning("psutil not available - fitting candidates sequentially")

    def get_snapshot(self) -> ResourceSnapshot:
        """Get current resource usage snapshot."""
        if not PSUTIL_AVAILABLE:
            return ResourceSnapshot(
                cpu_percent=100.0,
                memory_percent=100.0,
                memory_available_mb=0.0,
                cpu_count=1,
                timestamp=time.time(),
            )
        memory = psutil.virtual_memory()
        return ResourceSnapshot(
            cpu_percent=psutil.cpu_percent(interval=0.1),
            memory_percent=memory.percent,
            memory_available_mb=memory.available / (1024 * 1024),
            cpu_count=psutil.cpu_count(logical=True) or os.cpu_count() or 1,
            timestamp=time.time(),
        )

    def get_capacity(self) -> FitCapacity:
        snapshot = self.get_snapshot()
        warnings = []
        idle_workers = max(1, snapshot.cpu_count - 1)

        if snapshot.cpu_percent >= self.thresholds["cpu_critical"]:
            cpu_workers = 1
            warnings.append("CPU critically high - sequential fitting only")
        elif snapshot.cpu_percent >= self.thresholds["cpu_high"]:
            cpu_workers = min(2, idle_workers)
            warnings.append("CPU usage high - limiting parallelism")
        elif snapshot.cpu_percent >= self.thresholds["cpu_medium"]:
            cpu_workers = min(4, idle_workers)
        else:
            cpu_workers = min(self.thresholds["max_workers"], idle_workers)

        if snapshot.memory_percent >= self.thresholds["memory_critical"]:
            mem_workers = 1
            warnings.append("Memory critically low - sequential fitting only")
        elif snapshot.memory_available_mb < self.thresholds["memory_min_available_mb"]:
            mem_workers = 1
            warnings.append(f"Low available memory ({snapshot.memory_available_mb:.0f}MB)")
        elif snapshot.memory_percent >= self.thresholds["memory_high"]:
            mem_workers = 2
            warnings.append("Memory usage high - limiting parallelism")
        else:
            mem_workers = self.thresholds["max_workers"]

        workers = max(1, min(cpu_workers, mem_workers))
        mode = FitMode.SEQUENTIAL if workers <= 1 else FitMode.PARALLEL
        return FitCapacity(workers, mode, warnings)

    def create_fit_plan(
        self,
        candidates: Dict[str, SarimaSpec],
        requested_workers: Optional[int] = None,
    ) -> FitPlan:
        """
        Plan a sweep over ``candidates``.

        ``requested_workers`` overrides the load-based recommendation.
        """
        order = sorted(candidates, key=lambda label: -state_dimension(candidates[label]))
        if requested_workers is not None:
            workers = max(1, min(requested_workers, len(candidates) or 1))
            warnings: List[str] = []
        else:
            capacity = self.get_capacity()
            workers = max(1, min(capacity.recommended_workers, len(candidates) or 1))
            warnings = list(capacity.warnings)
        mode = FitMode.SEQUENTIAL if workers <= 1 else FitMode.PARALLEL
        logger.info(f"Fit plan: {len(candidates)} candidates, {workers} worker(s), mode={mode.value}")
        return FitPlan(mode=mode, worker_count=workers, order=order, warnings=warnings)


# Global instance
_resource_monitor: Optional[ResourceMonitor] = None


def get_resource_monitor() -> ResourceMonitor:
    """Get or create global resource monitor."""
    global _resource_monitor
    if _resource_monitor is None:
        _resource_monitor = ResourceMonitor()
    return _resource_monitor
