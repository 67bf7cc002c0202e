"""
Check Observer Pattern

Implements the Observer Pattern for monitoring the residual suites run by the
command-line checks: stage timing, pass/fail events and statistics for the
report summary.
"""

import time
import logging
from abc import ABC, abstractmethod
from enum import Enum, auto
from typing import Dict, List, Any, Optional
from dataclasses import dataclass, field


class CheckEventType(Enum):
    """Enumeration of check event types."""
    RUN_STARTED = auto()
    RUN_COMPLETED = auto()
    RUN_FAILED = auto()
    STAGE_STARTED = auto()
    STAGE_COMPLETED = auto()
    CHECK_PASSED = auto()
    CHECK_FAILED = auto()
    WARNING = auto()
    ERROR = auto()


@dataclass
class CheckEvent:
    """
    Represents an event that occurs while a command runs its checks.
    """
    event_type: CheckEventType
    source: str
    timestamp: float = field(default_factory=time.time)
    data: Dict[str, Any] = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert event to dictionary representation."""
        return {
            "event_type": self.event_type.name,
            "source": self.source,
            "timestamp": self.timestamp,
            "data": self.data,
            "message": self.message
        }


class CheckObserver(ABC):
    """
    Abstract Observer class in the Observer Pattern.

    Receives and processes check events.
    """

    @abstractmethod
    def update(self, event: CheckEvent) -> None:
        """
        Update the observer with a new event.

        Args:
            event: The event to process
        """
        pass

    def can_handle_event(self, event_type: CheckEventType) -> bool:
        """
        Check if this observer can handle a specific event type.

        Args:
            event_type: The event type to check

        Returns:
            True if this observer can handle the event type, False otherwise
        """
        return True


class LoggingCheckObserver(CheckObserver):
    """
    Check observer that writes events to the log.
    """

    def __init__(self, verbose: bool = False):
        """
        Initialize logging observer.

        Args:
            verbose: Whether to log passing checks too
        """
        self.verbose = verbose
        self.logger = logging.getLogger(self.__class__.__name__)

    def update(self, event: CheckEvent) -> None:
        """
        Log check event.

        Args:
            event: The event to log
        """
        if event.event_type == CheckEventType.RUN_STARTED:
            self.logger.info(f"Run started: {event.message}")
        elif event.event_type == CheckEventType.RUN_COMPLETED:
            self.logger.info(f"Run completed: {event.message}")
        elif event.event_type == CheckEventType.RUN_FAILED:
            self.logger.error(f"Run failed: {event.message}")
        elif event.event_type == CheckEventType.STAGE_STARTED:
            self.logger.info(f"Stage {event.data.get('stage_name', 'unknown')} started")
        elif event.event_type == CheckEventType.STAGE_COMPLETED:
            stage_time = event.data.get("duration_seconds", 0)
            self.logger.info(f"Stage {event.data.get('stage_name', 'unknown')} completed "
                             f"in {stage_time:.2f}s")
        elif event.event_type == CheckEventType.CHECK_FAILED:
            self.logger.warning(f"Check {event.data.get('name')} failed: "
                                f"max residual {event.data.get('max_residual')} "
                                f"> tolerance {event.data.get('tolerance')}")
        elif event.event_type == CheckEventType.CHECK_PASSED:
            if self.verbose:
                self.logger.info(f"Check {event.data.get('name')} passed "
                                 f"(max residual {event.data.get('max_residual')})")
        elif event.event_type == CheckEventType.WARNING:
            self.logger.warning(event.message)
        elif event.event_type == CheckEventType.ERROR:
            self.logger.error(event.message)


class StatisticsCheckObserver(CheckObserver):
    """
    Check observer that collects statistics.
    """

    def __init__(self):
        """Initialize statistics observer."""
        self.stage_times: Dict[str, float] = {}
        self.stage_start_times: Dict[str, float] = {}
        self.passed: int = 0
        self.failed: int = 0
        self.error_count: int = 0
        self.warning_count: int = 0
        self.failed_checks: List[str] = []

    def update(self, event: CheckEvent) -> None:
        """
        Update statistics with a new event.

        Args:
            event: The event to process
        """
        if event.event_type == CheckEventType.STAGE_STARTED:
            stage_name = event.data.get("stage_name", "unknown")
            self.stage_start_times[stage_name] = event.timestamp

        elif event.event_type == CheckEventType.STAGE_COMPLETED:
            stage_name = event.data.get("stage_name", "unknown")
            if stage_name in self.stage_start_times:
                self.stage_times[stage_name] = event.timestamp - self.stage_start_times[stage_name]

        elif event.event_type == CheckEventType.CHECK_PASSED:
            self.passed += 1

        elif event.event_type == CheckEventType.CHECK_FAILED:
            self.failed += 1
            self.failed_checks.append(event.data.get("name", "unknown"))

        elif event.event_type == CheckEventType.WARNING:
            self.warning_count += 1

        elif event.event_type == CheckEventType.ERROR:
            self.error_count += 1

    def get_statistics(self) -> Dict[str, Any]:
        """
        Get current statistics.

        Stage times are kept separately in stage_times.

        Returns:
            Dictionary with statistics
        """
        return {
            "checks_passed": self.passed,
            "checks_failed": self.failed,
            "failed_checks": list(self.failed_checks),
            "error_count": self.error_count,
            "warning_count": self.warning_count,
        }


class CheckObserverManager:
    """
    Manager for check observers.

    This class provides a centralized point for managing observers and
    creating events.
    """

    def __init__(self, source: str = "spinframe"):
        """
        Initialize the observer manager.

        Args:
            source: Source name stamped on created events
        """
        self.source = source
        self.observers: List[CheckObserver] = []
        self.logger = logging.getLogger(self.__class__.__name__)
        self._stage_started: Dict[str, float] = {}

    def add_observer(self, observer: CheckObserver) -> None:
        """
        Add an observer.

        Args:
            observer: The observer to add
        """
        self.observers.append(observer)
        self.logger.debug(f"Added observer: {observer.__class__.__name__}")

    def remove_observer(self, observer: CheckObserver) -> None:
        """
        Remove an observer.

        Args:
            observer: The observer to remove
        """
        if observer in self.observers:
            self.observers.remove(observer)
            self.logger.debug(f"Removed observer: {observer.__class__.__name__}")

    def notify_observers(self, event: CheckEvent) -> None:
        """
        Notify all observers of an event.

        Args:
            event: The event to notify observers about
        """
        for observer in self.observers:
            try:
                if observer.can_handle_event(event.event_type):
                    observer.update(event)
            except Exception as e:
                self.logger.error(f"Error notifying observer {observer.__class__.__name__}: {e}")

    def run_started(self, command: str, target: str) -> None:
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.RUN_STARTED,
            source=self.source,
            message=f"{command} {target}",
            data={"command": command, "target": target},
        ))

    def run_completed(self, command: str, passed: bool) -> None:
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.RUN_COMPLETED,
            source=self.source,
            message=f"{command}: {'pass' if passed else 'fail'}",
            data={"command": command, "pass": passed},
        ))

    def run_failed(self, command: str, error: str) -> None:
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.RUN_FAILED,
            source=self.source,
            message=f"{command}: {error}",
            data={"command": command, "error": error},
        ))

    def stage_started(self, stage_name: str) -> None:
        event = CheckEvent(
            event_type=CheckEventType.STAGE_STARTED,
            source=self.source,
            message=f"Starting stage: {stage_name}",
            data={"stage_name": stage_name},
        )
        self._stage_started[stage_name] = event.timestamp
        self.notify_observers(event)

    def stage_completed(self, stage_name: str) -> None:
        now = time.time()
        duration = now - self._stage_started.pop(stage_name, now)
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.STAGE_COMPLETED,
            source=self.source,
            timestamp=now,
            message=f"Completed stage: {stage_name}",
            data={"stage_name": stage_name, "duration_seconds": duration},
        ))

    def check_result(self, name: str, max_residual: Optional[float], tolerance: float,
                     passed: bool) -> None:
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.CHECK_PASSED if passed else CheckEventType.CHECK_FAILED,
            source=self.source,
            message=name,
            data={"name": name, "max_residual": max_residual, "tolerance": tolerance},
        ))

    def warning(self, message: str, details: Dict[str, Any] = None) -> None:
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.WARNING,
            source=self.source,
            message=message,
            data=details or {},
        ))

    def error(self, message: str, details: Dict[str, Any] = None) -> None:
        self.notify_observers(CheckEvent(
            event_type=CheckEventType.ERROR,
            source=self.source,
            message=message,
            data=details or {},
        ))
