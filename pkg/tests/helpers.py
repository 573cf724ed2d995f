"""Hand-rolled reference implementations used as test oracles.

Everything here is deliberately written in the most transparent way
possible (plain loops, no shared code with the package) so that a test
failure points at the library, not at the oracle.
"""

from __future__ import annotations

import calendar

import numpy as np

from cropmeta.cropsim.types import WeatherDay, WeatherSeries


def constant_weather(year: int = 2001, radiation: float = 15.0, rain: float = 2.0,
                     tmax: float = 20.0, tmin: float = 10.0,
                     location_id: int = 0) -> WeatherSeries:
    """A full year with every day identical."""
    n = 366 if calendar.isleap(year) else 365
    days = tuple(
        WeatherDay(doy=d, radiation=radiation, rain=rain, tmax=tmax, tmin=tmin)
        for d in range(1, n + 1)
    )
    return WeatherSeries(location_id=location_id, year=year, days=days)


def weather_with(base: WeatherSeries, **per_day) -> WeatherSeries:
    """Copy of ``base`` with per-field overrides given as doy->value dicts."""
    days = []
    for d in base.days:
        kw = {"doy": d.doy, "radiation": d.radiation, "rain": d.rain,
              "tmax": d.tmax, "tmin": d.tmin}
        for field, mapping in per_day.items():
            if d.doy in mapping:
                kw[field] = mapping[d.doy]
        days.append(WeatherDay(**kw))
    return WeatherSeries(location_id=base.location_id, year=base.year,
                         days=tuple(days))


def naive_conv1d(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Valid cross-correlation, quintuple loop."""
    n, c_in, length = x.shape
    c_out, c_in_w, k = w.shape
    assert c_in == c_in_w
    out = np.zeros((n, c_out, length - k + 1))
    for s in range(n):
        for co in range(c_out):
            for t in range(length - k + 1):
                acc = 0.0
                for ci in range(c_in):
                    for j in range(k):
                        acc += x[s, ci, t + j] * w[co, ci, j]
                out[s, co, t] = acc + b[co]
    return out


def naive_avgpool1d(x: np.ndarray, window: int) -> np.ndarray:
    n, c, length = x.shape
    steps = length // window
    out = np.zeros((n, c, steps))
    for s in range(n):
        for ch in range(c):
            for t in range(steps):
                out[s, ch, t] = sum(x[s, ch, t * window + j] for j in range(window)) / window
    return out


def reference_monitor(losses, initial_lr=0.001, es_min_delta=0.001,
                      es_patience=20, lr_factor=0.5, lr_min_delta=0.001,
                      lr_patience=10):
    """Scripted replay of the monitor rules.

    The first epoch sets the reference and counts as one epoch without
    improvement; an improvement must undercut the reference by more than
    min_delta and resets the counter; a plateau reduction resets only the
    LR counter. Returns one (epoch, lr_in_effect, reduced, stop) tuple per
    processed epoch, truncated at the stop.
    """
    events = []
    lr = initial_lr
    es_ref = lr_ref = None
    es_since = lr_since = 0
    for epoch, val in enumerate(losses, start=1):
        lr_in_effect = lr
        if es_ref is None:
            es_ref, es_since = val, 1
        elif val < es_ref - es_min_delta:
            es_ref, es_since = val, 0
        else:
            es_since += 1
        if lr_ref is None:
            lr_ref, lr_since = val, 1
        elif val < lr_ref - lr_min_delta:
            lr_ref, lr_since = val, 0
        else:
            lr_since += 1
        reduced = lr_since >= lr_patience
        if reduced:
            lr *= lr_factor
            lr_since = 0
        stop = es_since >= es_patience
        events.append((epoch, lr_in_effect, reduced, stop))
        if stop:
            break
    return events


def reference_rmse(p, o) -> float:
    total = 0.0
    for a, b in zip(p, o):
        total += (float(a) - float(b)) ** 2
    return (total / len(p)) ** 0.5


def reference_pearson(p, o) -> float:
    n = len(p)
    mp = sum(float(v) for v in p) / n
    mo = sum(float(v) for v in o) / n
    cov = sum((float(a) - mp) * (float(b) - mo) for a, b in zip(p, o))
    vp = sum((float(a) - mp) ** 2 for a in p)
    vo = sum((float(b) - mo) ** 2 for b in o)
    return cov / (vp ** 0.5 * vo ** 0.5)
