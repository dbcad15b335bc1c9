"""MLflow service for tracking verification runs."""

import logging
from pathlib import Path
from typing import Dict, Iterable, Optional

import mlflow

from resonance_lab.config.settings import get_settings
from resonance_lab.models.report_models import RunSummary

logger = logging.getLogger(__name__)


class MLflowService:
    """Logs run summaries and report files; a no-op without a tracking URI."""

    def __init__(self, tracking_uri: Optional[str] = None, experiment_name: Optional[str] = None):
        current = get_settings()
        self.tracking_uri = tracking_uri if tracking_uri is not None else current.MLFLOW_TRACKING_URI
        self.experiment_name = experiment_name or current.MLFLOW_EXPERIMENT

    @property
    def enabled(self) -> bool:
        return bool(self.tracking_uri)

    def setup_experiment(self) -> bool:
        """Select the experiment, creating it on first use."""
        mlflow.set_tracking_uri(self.tracking_uri)
        try:
            mlflow.set_experiment(self.experiment_name)
            logger.info(f"Using MLflow experiment: {self.experiment_name}")
            return True
        except Exception as e:
            logger.warning(f"Could not set MLflow experiment: {e}")
        try:
            mlflow.create_experiment(self.experiment_name)
            mlflow.set_experiment(self.experiment_name)
            logger.info(f"Created and set MLflow experiment: {self.experiment_name}")
            return True
        except Exception as create_error:
            logger.error(f"Failed to create experiment: {create_error}")
            return False

    def log_run(
        self,
        summary: RunSummary,
        params: Dict[str, object],
        artifacts: Iterable[Path] = (),
    ) -> bool:
        """Log one run. Tracking failures are logged, never raised."""
        if not self.enabled:
            return False
        if not self.setup_experiment():
            return False
        try:
            with mlflow.start_run(run_name=summary.run_id):
                mlflow.log_params({k: str(v) for k, v in params.items()})
                mlflow.log_metrics(
                    {
                        "checks_passed": summary.passed,
                        "checks_failed": summary.failed,
                        "checks_skipped": summary.skipped,
                    }
                )
                mlflow.set_tag("exit_code", summary.exit_code)
                for path in artifacts:
                    mlflow.log_artifact(str(path))
            logger.info("run tracked in MLflow", extra={"experiment": self.experiment_name})
            return True
        except Exception as e:
            logger.error(f"Failed to track run in MLflow: {e}")
            return False
