"""
Candidate Sweep

Fits several labelled SARIMA specifications on the same training window with:
- Resource-aware parallelism
- Per-model progress tracking
- Error isolation (one failed fit doesn't stop the others)
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Callable, Dict, List, Optional

from core_series import MonthlySeries
from estimation import FitOptions, fit
from resource_monitor import FitMode, FitPlan, ResourceMonitor, get_resource_monitor
from sarima import FittedModel, SarimaSpec
from spec_notation import render_spec

logger = logging.getLogger(__name__)


class FitStatus(Enum):
    """Status of one candidate in a sweep."""
    QUEUED = "queued"
    FITTING = "fitting"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class CandidateProgress:
    """Progress of a single candidate fit."""
    label: str
    spec: SarimaSpec
    status: FitStatus = FitStatus.QUEUED
    model: Optional[FittedModel] = None
    error_kind: Optional[str] = None
    error_message: Optional[str] = None
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "spec": render_spec(self.spec),
            "status": self.status.value,
            "loglik": self.model.loglik if self.model else None,
            "aic": self.model.aic if self.model else None,
            "bic": self.model.bic if self.model else None,
            "error_kind": self.error_kind,
            "error_message": self.error_message,
            "duration_seconds": (
                (self.completed_at - self.started_at).total_seconds()
                if self.started_at and self.completed_at else None
            ),
        }


@dataclass
class SweepProgress:
    """Overall sweep progress."""
    total: int
    completed: int = 0
    failed: int = 0
    candidates: List[CandidateProgress] = field(default_factory=list)
    mode: FitMode = FitMode.SEQUENTIAL
    worker_count: int = 1
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def progress_percent(self) -> float:
        if self.total == 0:
            return 100.0
        return (self.completed + self.failed) / self.total * 100

    @property
    def is_complete(self) -> bool:
        return (self.completed + self.failed) >= self.total

    def models(self) -> Dict[str, FittedModel]:
        """Successfully fitted models keyed by label, in submission order."""
        return {c.label: c.model for c in self.candidates if c.model is not None}

    def failures(self) -> List[CandidateProgress]:
        return [c for c in self.candidates if c.status is FitStatus.FAILED]

    def to_dict(self) -> Dict:
        return {
            "total": self.total,
            "completed": self.completed,
            "failed": self.failed,
            "progress_percent": round(self.progress_percent, 1),
            "mode": self.mode.value,
            "worker_count": self.worker_count,
            "is_complete": self.is_complete,
            "warnings": self.warnings,
            "candidates": [c.to_dict() for c in self.candidates],
        }


class CandidateSweep:
    """
    Fits candidate models with resource-aware parallelism.

    Fits share only the immutable training series; each runs on one thread.
    """

    def __init__(
        self,
        resource_monitor: Optional[ResourceMonitor] = None,
        options: Optional[FitOptions] = None,
    ):
        self.monitor = resource_monitor or get_resource_monitor()
        self.options = options or FitOptions()
        self._lock = threading.Lock()

    def _fit_single(self, train: MonthlySeries, progress: CandidateProgress) -> None:
        progress.status = FitStatus.FITTING
        progress.started_at = datetime.now()
        try:
            progress.model = fit(progress.spec, train, label=progress.label, options=self.options)
            progress.status = FitStatus.COMPLETED
            logger.info(f"Fitted {progress.label}: aic={progress.model.aic:.2f}")
        except Exception as e:
            progress.status = FitStatus.FAILED
            progress.error_kind = getattr(e, "kind", type(e).__name__)
            progress.error_message = str(e)
            logger.error(f"Failed to fit {progress.label}: {e}")
        finally:
            progress.completed_at = datetime.now()

    def _record(self, sweep: SweepProgress, progress: CandidateProgress,
                callback: Optional[Callable[[SweepProgress], None]]) -> None:
        with self._lock:
            if progress.status is FitStatus.COMPLETED:
                sweep.completed += 1
            else:
                sweep.failed += 1
        if callback:
            callback(sweep)

    def run(
        self,
        train: MonthlySeries,
        candidates: Dict[str, SarimaSpec],
        workers: Optional[int] = None,
        progress_callback: Optional[Callable[[SweepProgress], None]] = None,
    ) -> SweepProgress:
        """Fit every candidate; failures are recorded, never raised."""
        plan: FitPlan = self.monitor.create_fit_plan(candidates, requested_workers=workers)
        sweep = SweepProgress(
            total=len(candidates),
            mode=plan.mode,
            worker_count=plan.worker_count,
            started_at=datetime.now(),
            warnings=plan.warnings,
            candidates=[CandidateProgress(label, spec) for label, spec in candidates.items()],
        )
        by_label = {c.label: c for c in sweep.candidates}
        scheduled = [by_label[label] for label in plan.order]

        if plan.mode is FitMode.SEQUENTIAL or plan.worker_count <= 1:
            for progress in scheduled:
                self._fit_single(train, progress)
                self._record(sweep, progress, progress_callback)
        else:
            with ThreadPoolExecutor(max_workers=plan.worker_count) as executor:
                futures = {executor.submit(self._fit_single, train, p): p for p in scheduled}
                for future in as_completed(futures):
                    progress = futures[future]
                    try:
                        future.result()
                    except Exception as e:
                        progress.status = FitStatus.FAILED
                        progress.error_message = str(e)
                        logger.error(f"Parallel fitting error: {e}")
                    self._record(sweep, progress, progress_callback)

        sweep.completed_at = datetime.now()
        logger.info(f"Sweep finished: {sweep.completed} fitted, {sweep.failed} failed")
        return sweep
