"""Deterministic synthetic benchmark for the metric-evaluation pipeline.

Real eye-movement corpora cannot ship with the code, so the evaluator is
exercised on a generated stand-in whose ground truth is known: one
designated driver metric shapes the responses, one metric is pure noise,
and the remaining metrics pick up signal only through their algebraic
overlap with the driver.  The random stream is fully pinned (splitmix64
feeding Box-Muller) so every run of a given seed produces bit-identical
draws on any platform.
"""

import math
from dataclasses import dataclass

from ..geometry import POSITION_LABELS
from ..records import FixationRecord, MetricRow

_MASK64 = (1 << 64) - 1
_TO_UNIT = 2.0 ** -53


class SplitMix64:
    """splitmix64: 64-bit mix of a Weyl sequence; tiny and well studied."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self) -> float:
        """Uniform in [0, 1): the top 53 bits scaled down."""
        return (self.next_u64() >> 11) * _TO_UNIT

    def normal(self) -> float:
        """One standard normal via Box-Muller; draws two uniforms, no caching."""
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        return r * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class SimConfig:
    """Knobs of the generator; defaults are the benchmark configuration.

    The driver metric is sum_vissem_sim by construction: the response
    depends on it through the bump function g below.  concepts_semsim is
    drawn independently of everything else, making it the designated
    noise metric.
    """
    n_objects: int = 3
    n_participants: int = 5
    duration_intercept: float = 5.0
    count_intercept: float = 1.3
    count_signal_scale: float = 0.8
    noise_sd: float = 0.35
    participant_sd: float = 0.15

    def __post_init__(self):
        if self.n_objects < 1 or self.n_participants < 1:
            raise ValueError("need at least one object and one participant")


def g_driver(d: float) -> float:
    """Nonlinear effect of the driver metric on the log response."""
    return 0.35 * math.sin(1.7 * d) + 0.15 * d


_FLAT_POSITIONS = tuple(label for row in POSITION_LABELS for label in row)


def simulate_benchmark(seed: int, n_scenes: int, config: SimConfig = SimConfig()):
    """Generate (metric rows, fixation records) for a synthetic corpus.

    Draw order is part of the contract: first one offset per participant,
    then per scene and object the metric draws in a fixed order, then per
    scene, object and participant the two response noises.  Metric ranges:

        obj_image_vissim  uniform [0, 0.8)
        objs_vissim       uniform [0, 2.5)
        sent_semsim       uniform [0, 1)
        words_semsim      uniform [0, 2.5)
        concepts_semsim   uniform [0, 2.5), independent of the rest
        proportion        uniform [0.01, 0.6)
        saliency          uniform [0, 1)
        position          uniform over the nine labels

    The three sum metrics are their defining sums, so the correlation
    structure among metrics mirrors the real pipeline: overall_semsim
    shares two of the driver's three components, obj_image_vissim one.
    Responses:

        duration_ms = exp(5.0 + g(driver) + participant_offset + 0.35 * N)
        count       = round(exp(1.3 + 0.8 * g(driver) + participant_offset + 0.35 * N))
    """
    if n_scenes < 0:
        raise ValueError(f"n_scenes must be >= 0, got {n_scenes}")
    rng = SplitMix64(seed)
    offsets = {}
    for p in range(1, config.n_participants + 1):
        offsets[f"p{p}"] = config.participant_sd * rng.normal()

    rows = []
    drivers = {}
    for s in range(n_scenes):
        image_id = f"img_{s:05d}"
        for k in range(config.n_objects):
            v_img = rng.uniform() * 0.8
            v_objs = rng.uniform() * 2.5
            sent = rng.uniform()
            words = rng.uniform() * 2.5
            concepts = rng.uniform() * 2.5
            prop = 0.01 + rng.uniform() * 0.59
            sal = rng.uniform()
            pos = _FLAT_POSITIONS[int(rng.uniform() * 9.0)]
            overall_sem = sent + words
            row = MetricRow(
                image_id=image_id, object_id=f"obj_{k}", name=f"thing{k}",
                obj_image_vissim=v_img, objs_vissim=v_objs,
                overall_vissim=v_img + v_objs,
                sent_semsim=sent, words_semsim=words, concepts_semsim=concepts,
                overall_semsim=overall_sem, sum_vissem_sim=overall_sem + v_img,
                proportion=prop, saliency=sal, position=pos,
            )
            rows.append(row)
            drivers[(image_id, row.object_id)] = row.sum_vissem_sim

    fixations = []
    for s in range(n_scenes):
        image_id = f"img_{s:05d}"
        for k in range(config.n_objects):
            object_id = f"obj_{k}"
            signal = g_driver(drivers[(image_id, object_id)])
            for p in range(1, config.n_participants + 1):
                participant = f"p{p}"
                offset = offsets[participant]
                duration = math.exp(config.duration_intercept + signal + offset
                                    + config.noise_sd * rng.normal())
                count = int(round(math.exp(
                    config.count_intercept + config.count_signal_scale * signal
                    + offset + config.noise_sd * rng.normal())))
                fixations.append(FixationRecord(
                    image_id=image_id, object_id=object_id, participant=participant,
                    total_duration_ms=duration, fixation_count=max(count, 0),
                ))
    return rows, fixations
