# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import logging
from itertools import islice
from typing import Callable, Iterable, Iterator, Tuple, TypeVar

LOGGER = logging.getLogger(__name__)


V = TypeVar('V')
R = TypeVar('R')


def chunk(stream: Iterable[V], n: int) -> Iterator[Tuple[V, ...]]:
    """
    :returns the generator of consecutive chunks of at most n values, in stream order; nothing for an empty stream
    """
    assert n > 0, f'expected a positive chunk size: {n}'
    it = iter(stream)
    while True:
        items = tuple(islice(it, n))
        if not items:
            return
        yield items


def reduce_in_chunks(*, stream: Iterable[V], n: int, initial: R, consumer: Callable[[Tuple[V, ...], R], R]) -> R:
    """
    Folds consumer over the chunks of stream.  The stream is pulled lazily, one chunk ahead of the consumer at most, so
    a grid generator never has to be materialized.

    :param stream: stream of values
    :param n: chunk size.  if n is 0, the whole stream is one chunk.
    :param initial: the initial state
    :param consumer: takes a chunk and the state, returns the next state
    :returns the final state
    """
    if n <= 0:
        return consumer(tuple(stream), initial)
    state = initial
    count = 0
    for items in chunk(stream, n):
        state = consumer(items, state)
        count += 1
    LOGGER.debug(f'reduced {count} chunks of at most {n}')
    return state
