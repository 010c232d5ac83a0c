# transaction traces: `sender,receiver,volume,timestamp` csv files and a synthetic heavy-tailed generator

import os
import csv
import math
import shutil
import logging
import tempfile
from typing import List, NamedTuple, Optional

import numpy as np

from modules.network.topology import InvalidParameter

logger = logging.getLogger(__name__)

TRACE_FIELDS = ['sender', 'receiver', 'volume', 'timestamp']
DAY = 24 * 60 * 60
EPOCH_2018 = 1514764800         # 2018-01-01T00:00:00Z, day aligned


class TraceParseError(ValueError):

    def __init__(self, line: int, reason: str):
        super().__init__(f'line {line}: {reason}')
        self.line = line
        self.reason = reason


class EmptyInput(ValueError):
    pass


class TraceRecord(NamedTuple):
    sender: str
    receiver: str
    volume: int
    timestamp: int


def load_trace(fp: str) -> List[TraceRecord]:
    records = []
    with open(fp, 'r', encoding='utf8', newline='') as file:
        reader = csv.DictReader(file)
        if reader.fieldnames is None or set(TRACE_FIELDS) - set(reader.fieldnames):
            raise TraceParseError(1, f'header must name the columns {",".join(TRACE_FIELDS)}, got {reader.fieldnames}')

        for row in reader:
            lineno = reader.line_num
            if None in row.values() or None in row:
                raise TraceParseError(lineno, 'wrong number of columns')
            try:
                volume = int(row['volume'])
                timestamp = int(row['timestamp'])
            except ValueError as e:
                raise TraceParseError(lineno, str(e)) from e
            sender, receiver = row['sender'].strip(), row['receiver'].strip()
            if volume <= 0:
                raise TraceParseError(lineno, f'volume must be positive, got {volume}')
            if not sender or not receiver:
                raise TraceParseError(lineno, 'empty account id')
            if sender == receiver:
                raise TraceParseError(lineno, f'sender equals receiver ({sender})')
            records.append(TraceRecord(sender, receiver, volume, timestamp))

    logger.info(f'[load_trace] {len(records)} records from {fp}')
    return records


def save_trace(records: List[TraceRecord], fp: str):
    # Write to temporary file first, so we don't nuke the file if something goes wrong
    fd, temp_path = tempfile.mkstemp('.csv')
    with os.fdopen(fd, 'w', encoding='utf8', newline='') as file:
        writer = csv.DictWriter(file, fieldnames=TRACE_FIELDS)
        writer.writeheader()
        writer.writerows(r._asdict() for r in records)
    shutil.move(temp_path, fp)


def pareto_shape(top_share: float, top_fraction: float = 0.1) -> float:
    '''
    Shape of the Pareto law whose top `top_fraction` of draws carries `top_share` of the volume,
    from share = fraction ** (1 - 1/alpha).

    >>> round(pareto_shape(0.945), 4)
    1.0252
    '''
    if not 0 < top_fraction < top_share < 1:
        raise InvalidParameter(f'need 0 < top_fraction < top_share < 1, got {top_fraction}, {top_share}')
    return 1.0 / (1.0 - math.log(top_share) / math.log(top_fraction))


def synthetic_trace(n: int, seed: int = 0, users: int = 200, days: int = 30,
                    median: float = 4.8, top_share: float = 0.945, unit_scale: int = 100,
                    favorites: int = 5, p_favorite: float = 0.85, max_volume: Optional[int] = None) -> List[TraceRecord]:
    '''
    Heavy-tailed payments between `users` accounts over `days` calendar days.
      - volumes: Pareto with shape from `top_share` and scale from `median`, in atomic units
      - pairs: each sender keeps a few favorite receivers and picks one of them with
        probability `p_favorite`, which makes recurring pairs the common case
    '''
    if n < 0 or users < 2 or days < 1 or median <= 0 or unit_scale < 1:
        raise InvalidParameter(f'bad synthetic trace parameters (n={n}, users={users}, days={days}, median={median})')
    if not 0.0 <= p_favorite <= 1.0:
        raise InvalidParameter(f'p_favorite must be in [0, 1], got {p_favorite}')

    rng = np.random.default_rng(seed)
    alpha = pareto_shape(top_share)
    x_min = median / 2 ** (1 / alpha)
    volumes = (rng.pareto(alpha, size=n) + 1.0) * x_min * unit_scale
    volumes = np.maximum(np.rint(volumes), 1).astype(np.int64)
    if max_volume is not None:
        volumes = np.minimum(volumes, max_volume)

    n_fav = min(favorites, users - 1)
    fav = np.empty((users, n_fav), dtype=np.int64)
    for u in range(users):
        others = np.delete(np.arange(users), u)
        fav[u] = rng.choice(others, size=n_fav, replace=False)
    # zipf-like preference among a sender's favorites
    fav_weights = 1.0 / np.arange(1, n_fav + 1)
    fav_weights /= fav_weights.sum()

    timestamps = np.sort(rng.integers(0, days * DAY, size=n)) + EPOCH_2018
    records = []
    for i in range(n):
        s = int(rng.integers(users))
        if rng.random() < p_favorite:
            r = int(fav[s][rng.choice(n_fav, p=fav_weights)])
        else:
            r = int(rng.integers(users - 1))
            if r >= s: r += 1
        records.append(TraceRecord(f'u{s}', f'u{r}', int(volumes[i]), int(timestamps[i])))

    logger.debug(f'[synthetic_trace] n={n} alpha={alpha:.4f} x_min={x_min:.4f}')
    return records
