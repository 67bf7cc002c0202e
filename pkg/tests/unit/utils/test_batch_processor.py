"""
Tests for the grid-sweep batch processors.
"""

import pytest

from spinframe.exceptions import ImmersionDegenerate
from spinframe.utils.batch_processor import (BatchProcessorFactory, ParallelBatchProcessor,
                                             SequentialBatchProcessor, grid_items, map_grid)


def square(item):
    i, j = item
    return i * 10 + j


def test_grid_items_row_major():
    assert grid_items(2, 3) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


@pytest.mark.parametrize("processor", ["sequential", "parallel", "multiprocess"])
def test_map_grid_keeps_order(processor):
    items = grid_items(7, 9)
    processing = {"processor": processor, "batch_size": 10, "max_workers": 4}
    assert map_grid(square, items, processing) == [square(item) for item in items]


def degenerate_off_diagonal(item):
    i, j = item
    if i != j:
        raise ImmersionDegenerate("rank drop", {"index": [i, j]})
    return i


@pytest.mark.parametrize("processor", ["sequential", "parallel", "multiprocess"])
def test_first_error_in_grid_order(processor):
    processing = {"processor": processor, "batch_size": 16, "max_workers": 4}
    with pytest.raises(ImmersionDegenerate) as info:
        map_grid(degenerate_off_diagonal, grid_items(4, 4), processing)
    assert info.value.details["index"] == [0, 1]


def test_library_errors_propagate():
    def failing(item):
        if item == (1, 2):
            raise ImmersionDegenerate("rank drop", {"index": list(item)})
        return 0

    with pytest.raises(ImmersionDegenerate) as info:
        map_grid(failing, grid_items(3, 3))
    assert info.value.details["index"] == [1, 2]


def test_collecting_errors_without_fail_fast():
    def failing(item):
        if item[0] == 1:
            raise ValueError("bad row")
        return item

    processor = SequentialBatchProcessor(failing, {"fail_fast": False, "batch_size": 2})
    outcome = processor.process(grid_items(3, 2))
    assert outcome["total_processed"] == 4
    assert outcome["error_count"] == 2


def test_factory():
    assert isinstance(BatchProcessorFactory.create_processor("parallel", square),
                      ParallelBatchProcessor)
    with pytest.raises(ValueError):
        BatchProcessorFactory.create_processor("gpu", square)
