"""
Check Metrics Module

Prometheus metrics for verification runs. Each run owns a registry so
reports from separate runs never mix; the registry is written next to the
CSV/JSON reports as ``metrics.prom``.
"""

import logging
from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

METRICS_FILENAME = "metrics.prom"


class CheckMetrics:
    def __init__(self):
        self.registry = CollectorRegistry()

        # =====================================================================
        # COUNTERS
        # =====================================================================

        self.outcomes = Counter(
            "lab_check_outcomes_total",
            "Check rows by outcome",
            ["check", "status"],  # status: 'pass', 'fail', 'skipped'
            registry=self.registry,
        )
        self.skip_reasons = Counter(
            "lab_check_skips_total",
            "Skipped rows by reason code",
            ["reason"],
            registry=self.registry,
        )

        # =====================================================================
        # HISTOGRAMS
        # =====================================================================

        self.duration = Histogram(
            "lab_check_duration_seconds",
            "Wall time of a single check row",
            ["check"],
            buckets=(0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0),
            registry=self.registry,
        )

        # =====================================================================
        # GAUGES
        # =====================================================================

        self.scenarios = Gauge(
            "lab_scenarios_in_run",
            "Scenarios executed by this run",
            registry=self.registry,
        )

    def record(self, check: str, status: str, seconds: float, reason: str = None) -> None:
        self.outcomes.labels(check=check, status=status).inc()
        self.duration.labels(check=check).observe(seconds)
        if reason:
            self.skip_reasons.labels(reason=reason).inc()

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / METRICS_FILENAME
        write_to_textfile(str(path), self.registry)
        logger.debug("metrics written", extra={"path": str(path)})
        return path
