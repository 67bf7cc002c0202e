"""
Batch Processor

Batch processing of grid sweeps with different execution strategies.
Implements the Factory Pattern to create the processor named in the
"processing" configuration section; map_grid wraps it for the common case of
an ordered, fail-fast map over grid points.
"""

from abc import ABC, abstractmethod
import logging
import os
import concurrent.futures
from typing import List, Dict, Any, Callable, Sequence, Tuple, TypeVar, Generic

from tqdm import tqdm

from spinframe.exceptions import SpinframeError

# Type variables for generic typing
T = TypeVar('T')  # Input type
R = TypeVar('R')  # Result type


class BatchProcessor(Generic[T, R], ABC):
    """
    Abstract base class for batch processors.

    Implements the Template Method pattern for batch processing with hooks for
    specific processing strategies to override.
    """

    def __init__(self, config: Dict[str, Any] = None):
        """
        Initialize the batch processor.

        Args:
            config: Processing configuration (batch_size, max_workers,
                show_progress, fail_fast, description)
        """
        self.config = config or {}
        self.logger = logging.getLogger(self.__class__.__name__)
        self.batch_size = max(1, int(self.config.get("batch_size") or 512))
        self.max_workers = self.config.get("max_workers") or os.cpu_count()
        self.show_progress = bool(self.config.get("show_progress", False))
        self.fail_fast = bool(self.config.get("fail_fast", True))
        self.description = self.config.get("description", "grid sweep")
        self.results = []
        self.errors = []

    @abstractmethod
    def process_batch(self, batch: List[T]) -> List[R]:
        """
        Process a batch of items.

        Args:
            batch: List of items to process

        Returns:
            List of processing results
        """
        pass

    def on_batch_complete(self, batch_index: int, batch_results: List[R]) -> None:
        """
        Hook called when a batch is complete.

        Args:
            batch_index: Index of the completed batch
            batch_results: Results from the batch
        """
        self.logger.debug(f"Completed batch {batch_index} with {len(batch_results)} results")

    def on_error(self, item: T, error: Exception) -> None:
        """
        Hook called when an error occurs during processing.

        The error is raised again when fail_fast is set.

        Args:
            item: Item that caused the error
            error: The exception that occurred
        """
        self.errors.append({"item": item, "error": str(error)})
        if self.fail_fast:
            raise error
        self.logger.error(f"Error processing item {item}: {error}")

    def process(self, items: List[T]) -> Dict[str, Any]:
        """
        Process a list of items in batches.

        Args:
            items: List of items to process

        Returns:
            Dictionary with processing results and stats
        """
        self.logger.info(f"Starting {self.description} of {len(items)} items "
                         f"with batch size {self.batch_size}")

        batches = [items[i:i + self.batch_size] for i in range(0, len(items), self.batch_size)]

        all_results = []
        with tqdm(total=len(items), desc=self.description, disable=not self.show_progress,
                  leave=False) as progress:
            for i, batch in enumerate(batches):
                try:
                    batch_results = self.process_batch(batch)
                except SpinframeError:
                    raise
                except Exception as e:
                    if self.fail_fast:
                        raise
                    self.logger.error(f"Error processing batch {i}: {e}")
                    continue
                all_results.extend(batch_results)
                self.on_batch_complete(i, batch_results)
                progress.update(len(batch))

        self.results = all_results
        self.logger.info(f"Finished {self.description}: {len(all_results)} results, "
                         f"{len(self.errors)} errors")

        return {
            "results": all_results,
            "total_processed": len(all_results),
            "total_items": len(items),
            "errors": self.errors,
            "error_count": len(self.errors)
        }


class SequentialBatchProcessor(BatchProcessor[T, R]):
    """
    A batch processor that processes items sequentially.
    """

    def __init__(self, process_func: Callable[[T], R], config: Dict[str, Any] = None):
        super().__init__(config)
        self.process_func = process_func

    def process_batch(self, batch: List[T]) -> List[R]:
        results = []
        for item in batch:
            try:
                results.append(self.process_func(item))
            except Exception as e:
                self.on_error(item, e)
        return results


class _PoolBatchProcessor(BatchProcessor[T, R]):
    """Shared submission loop of the executor-backed processors."""

    executor_class = concurrent.futures.ThreadPoolExecutor

    def __init__(self, process_func: Callable[[T], R], config: Dict[str, Any] = None):
        super().__init__(config)
        self.process_func = process_func

    def process_batch(self, batch: List[T]) -> List[R]:
        """
        Process a batch of items on the executor.

        Results keep the order of the batch, and errors are reported in
        batch order whatever the completion order of the workers.
        """
        results: List[Any] = []
        with self.executor_class(max_workers=self.max_workers) as executor:
            futures = [executor.submit(self.process_func, item) for item in batch]

            for item, future in zip(batch, futures):
                try:
                    results.append(future.result())
                except Exception as e:
                    self.on_error(item, e)

        return results


class ParallelBatchProcessor(_PoolBatchProcessor[T, R]):
    """
    A batch processor that processes items in parallel using a thread pool.
    """

    executor_class = concurrent.futures.ThreadPoolExecutor


class MultiprocessBatchProcessor(_PoolBatchProcessor[T, R]):
    """
    A batch processor that processes items in parallel using a process pool.

    The process function must be picklable.
    """

    executor_class = concurrent.futures.ProcessPoolExecutor


class BatchProcessorFactory:
    """
    Factory for creating batch processors from the processing configuration.
    """

    @staticmethod
    def create_processor(processor_type: str, process_func: Callable,
                         config: Dict[str, Any] = None) -> BatchProcessor:
        """
        Create a batch processor of the specified type.

        Args:
            processor_type: Type of processor to create
                ("sequential", "parallel", "multiprocess")
            process_func: Function to process items
            config: Configuration dictionary

        Returns:
            A batch processor instance

        Raises:
            ValueError: If the processor type is unknown
        """
        config = config or {}

        if processor_type == "sequential":
            return SequentialBatchProcessor(process_func, config)
        elif processor_type == "parallel":
            return ParallelBatchProcessor(process_func, config)
        elif processor_type == "multiprocess":
            return MultiprocessBatchProcessor(process_func, config)
        else:
            raise ValueError(f"Unknown processor type: {processor_type}")


def map_grid(process_func: Callable[[T], R], items: Sequence[T],
             processing: Dict[str, Any] = None, description: str = "grid sweep") -> List[R]:
    """
    Map a function over grid items with the configured processor.

    Args:
        process_func: Function applied to each item
        items: Items in grid order
        processing: The "processing" configuration section
        description: Label for logs and the progress bar

    Returns:
        Results in the order of items

    Raises:
        SpinframeError: The first library error raised by process_func
    """
    processing = dict(processing or {})
    processing.setdefault("description", description)
    processing["fail_fast"] = True
    processor = BatchProcessorFactory.create_processor(
        processing.get("processor", "sequential"), process_func, processing)
    outcome = processor.process(list(items))
    return outcome["results"]


def grid_items(nu: int, nv: int) -> List[Tuple[int, int]]:
    """Grid indices (i, j) in row-major order."""
    return [(i, j) for i in range(nu) for j in range(nv)]
