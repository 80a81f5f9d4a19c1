"""Trace-to-signature processing.

A received trace is smoothed, synchronized against the known tag code by
sliding correlation, and segmented into per-tag blocks.  Each block yields
one reflected-power estimate (mean of reflecting samples minus mean of
non-reflecting ones); the K estimates form a multipath signature, which is
L2-normalized to cancel transmit power.  L successive signatures stack into
a signal profile.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSignatureError,
    InsufficientDataError,
    MaskError,
    ParameterError,
    SegmentationError,
    ShapeError,
)
from .scenario import ReceivedTrace, tag_block_bit_spans

DEFAULT_SMOOTHING_WINDOW = 9
DEFAULT_PROFILE_LEN = 10

# A correlation peak below this multiple of the median correlation is
# indistinguishable from background, so the trace is dropped as undecodable.
PEAK_FLOOR_RATIO = 3.0


@dataclass(frozen=True)
class MultipathSignature:
    """Per-tag reflected powers and their unit-norm form."""

    raw: np.ndarray
    normalized: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=np.float64)
        normed = np.asarray(self.normalized, dtype=np.float64)
        if raw.ndim != 1 or normed.shape != raw.shape:
            raise ShapeError(f"raw {raw.shape} and normalized {normed.shape} must match")
        if np.any(raw < 0):
            raise ParameterError("raw reflected powers must be nonnegative")
        if raw.any() and abs(np.linalg.norm(normed) - 1.0) > 1e-9:
            raise ParameterError("normalized signature must have unit L2 norm")
        raw.flags.writeable = False
        normed.flags.writeable = False
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "normalized", normed)

    @classmethod
    def from_raw(cls, raw) -> "MultipathSignature":
        raw = np.asarray(raw, dtype=np.float64)
        if np.any(raw < 0):
            raise ParameterError("raw reflected powers must be nonnegative")
        norm = np.linalg.norm(raw)
        if norm == 0.0:
            raise DegenerateSignatureError("all-zero reflection vector cannot be normalized")
        return cls(raw=raw, normalized=raw / norm)

    @property
    def n_tags(self) -> int:
        return int(self.raw.size)


@dataclass(frozen=True)
class SignalProfile:
    """L successive normalized signatures for one identity, plus their mean."""

    identity: str
    signatures: np.ndarray
    mean_vector: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.signatures, dtype=np.float64)
        mean = np.asarray(self.mean_vector, dtype=np.float64)
        if rows.ndim != 2:
            raise ShapeError(f"signatures must be (L, K), got {rows.shape}")
        if mean.shape != (rows.shape[1],):
            raise ShapeError(f"mean_vector {mean.shape} does not match K={rows.shape[1]}")
        if np.any(rows < 0):
            raise ParameterError("profile rows must be nonnegative")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ParameterError("every profile row must have unit L2 norm")
        if np.any(np.abs(rows.mean(axis=0) - mean) > 1e-9):
            raise ParameterError("mean_vector must equal the arithmetic mean of the rows")
        rows.flags.writeable = False
        mean.flags.writeable = False
        object.__setattr__(self, "signatures", rows)
        object.__setattr__(self, "mean_vector", mean)

    @classmethod
    def from_rows(cls, identity: str, rows) -> "SignalProfile":
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        return cls(identity=identity, signatures=rows, mean_vector=rows.mean(axis=0))

    @property
    def profile_len(self) -> int:
        return int(self.signatures.shape[0])

    @property
    def n_tags(self) -> int:
        return int(self.signatures.shape[1])

    def row(self, l: int) -> np.ndarray:
        return self.signatures[l]


@dataclass(frozen=True)
class SegmentBounds:
    """Sample-index bounds [t_start, t_end) of the backscattered region."""

    t_start: int
    t_end: int

    def __post_init__(self):
        if self.t_start < 0 or self.t_end <= self.t_start:
            raise ParameterError(
                f"bounds must satisfy 0 <= t_start < t_end, got [{self.t_start}, {self.t_end})")


def moving_average(samples, window: int) -> np.ndarray:
    """Centered moving average with edge truncation.

    Each output sample is the mean of the window centered on it (the extra
    tap of an even window falls on the past side); windows are truncated at
    the array edges, so a constant sequence passes through unchanged.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"samples must be 1-D, got shape {x.shape}")
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window}")
    if window > x.size:
        raise ParameterError(f"window {window} exceeds signal length {x.size}")
    if window == 1:
        return x.copy()
    back, fwd = window // 2, (window - 1) // 2
    # anchored on the first sample so the running sums stay near zero and a
    # constant sequence really does pass through bit-exactly
    anchor = x[0]
    csum = np.concatenate([[0.0], np.cumsum(x - anchor)])
    idx = np.arange(x.size)
    lo = np.maximum(idx - back, 0)
    hi = np.minimum(idx + fwd + 1, x.size)
    return anchor + (csum[hi] - csum[lo]) / (hi - lo)


def correlate(smoothed, code) -> np.ndarray:
    """Sliding dot product of the signal against the code template.

    c[n] = sum_m smoothed[n + m] * code[m] over all full-overlap lags.
    """
    x = np.asarray(smoothed, dtype=np.float64)
    template = np.asarray(code, dtype=np.float64)
    if x.ndim != 1 or template.ndim != 1:
        raise ShapeError("both inputs must be 1-D")
    if template.size == 0:
        raise ParameterError("code must be nonempty")
    if template.size > x.size:
        raise ParameterError(
            f"code length {template.size} exceeds signal length {x.size}")
    return np.correlate(x, template, mode="valid")


def expand_code(code, samples_per_bit: int) -> np.ndarray:
    """Expand an M-bit code to the sample domain."""
    if samples_per_bit < 1:
        raise ParameterError(f"samples_per_bit must be >= 1, got {samples_per_bit}")
    return np.repeat(np.asarray(code, dtype=np.float64), samples_per_bit)


def segment_backscatter(trace: ReceivedTrace,
                        window: int = DEFAULT_SMOOTHING_WINDOW) -> SegmentBounds:
    """Locate the backscattered region of a trace.

    The smoothed trace is correlated against the sample-domain code; the
    peak lag is the region start.  A peak below PEAK_FLOOR_RATIO times the
    median correlation means no code is convincingly present and the trace
    is rejected as undecodable.
    """
    smoothed = moving_average(trace.samples, window)
    template = expand_code(trace.tag_code, trace.samples_per_bit)
    c = correlate(smoothed, template)
    peak_idx = int(np.argmax(c))
    peak = float(c[peak_idx])
    floor = PEAK_FLOOR_RATIO * float(np.median(c))
    if peak <= 0.0 or peak < floor:
        raise SegmentationError(
            f"correlation peak {peak:.3e} below decision floor {floor:.3e}")
    return SegmentBounds(t_start=peak_idx, t_end=peak_idx + template.size)


def extract_reflection(block, reflect_mask) -> float:
    """Reflected-power estimate for one tag block.

    Mean of samples taken while the tag reflects minus mean while it
    absorbs, clamped below at zero (noise can push the difference negative,
    but a reflection cannot remove power).
    """
    x = np.asarray(block, dtype=np.float64)
    mask = np.asarray(reflect_mask, dtype=bool)
    if x.ndim != 1 or mask.shape != x.shape:
        raise ShapeError(f"block {x.shape} and mask {mask.shape} must be equal-length 1-D")
    n1 = int(mask.sum())
    if n1 == 0 or n1 == mask.size:
        raise MaskError("mask must select at least one reflected and one non-reflected sample")
    diff = float(x[mask].mean() - x[~mask].mean())
    return max(diff, 0.0)


def build_signature(trace: ReceivedTrace, bounds: SegmentBounds) -> MultipathSignature:
    """Extract the K-vector multipath signature from a segmented trace.

    Works on the raw (unsmoothed) samples: block means are already noise
    averages, and smoothing would only correlate the estimation errors.
    """
    if bounds.t_end > trace.samples.size:
        raise ShapeError(
            f"bounds [{bounds.t_start}, {bounds.t_end}) exceed trace length {trace.samples.size}")
    if bounds.t_end - bounds.t_start != trace.code_span:
        raise ShapeError(
            f"bounds span {bounds.t_end - bounds.t_start} does not equal the "
            f"code span {trace.code_span}")
    spans = tag_block_bit_spans(int(trace.tag_code.size), trace.n_tags)
    spb = trace.samples_per_bit
    region = trace.samples[bounds.t_start:bounds.t_end]
    raw = np.empty(trace.n_tags, dtype=np.float64)
    for tag_idx, (b0, b1) in enumerate(spans):
        block = region[b0 * spb:b1 * spb]
        mask = np.repeat(trace.tag_code[b0:b1], spb).astype(bool)
        raw[tag_idx] = extract_reflection(block, mask)
    if not raw.any():
        raise DegenerateSignatureError(
            f"identity {trace.identity!r} at t={trace.t_s}: zero reflection on every tag")
    return MultipathSignature.from_raw(raw)


def signature_from_trace(trace: ReceivedTrace,
                         window: int = DEFAULT_SMOOTHING_WINDOW) -> MultipathSignature:
    """Segment and extract in one step."""
    return build_signature(trace, segment_backscatter(trace, window))


def _normalized_rows(signatures):
    rows = []
    for sig in signatures:
        vec = getattr(sig, "normalized", sig)
        rows.append(np.asarray(vec, dtype=np.float64))
    return rows


def build_profile(identity: str, signatures, profile_len: int = DEFAULT_PROFILE_LEN) -> SignalProfile:
    """Profile from the most recent profile_len signatures of a stream.

    ``signatures`` is an ordered sequence of MultipathSignature (or plain
    normalized vectors), oldest first.
    """
    if profile_len < 1:
        raise ParameterError(f"profile_len must be >= 1, got {profile_len}")
    rows = _normalized_rows(signatures)
    if len(rows) < profile_len:
        raise InsufficientDataError(
            f"identity {identity!r}: {len(rows)} valid signatures, need {profile_len}")
    return SignalProfile.from_rows(identity, np.vstack(rows[-profile_len:]))


class ProfileAssembler:
    """Sliding profile window over one identity's signature stream.

    Traces that fail segmentation simply never reach push(), so the
    assembler sees gaps in the period index.  Signatures older than
    ``max_age_periods`` update periods (default 2 L) are discarded, which
    makes a long outage reset the window instead of gluing stale history
    onto fresh data.
    """

    def __init__(self, identity: str, profile_len: int = DEFAULT_PROFILE_LEN,
                 max_age_periods: int | None = None):
        if profile_len < 1:
            raise ParameterError(f"profile_len must be >= 1, got {profile_len}")
        self.identity = identity
        self.profile_len = profile_len
        self.max_age_periods = 2 * profile_len if max_age_periods is None else max_age_periods
        if self.max_age_periods < profile_len:
            raise ParameterError("max_age_periods must be >= profile_len")
        self._window = deque()
        self._last_period = None

    @property
    def window(self) -> tuple:
        """The signatures currently in the window, oldest first."""
        return tuple(sig for _, sig in self._window)

    def push(self, period_idx: int, signature: MultipathSignature):
        """Add one signature; returns a SignalProfile when the window is full."""
        if self._last_period is not None and period_idx <= self._last_period:
            raise ParameterError(
                f"period index must increase, got {period_idx} after {self._last_period}")
        self._last_period = period_idx
        self._window.append((period_idx, signature))
        if len(self._window) > self.profile_len:
            self._window.popleft()
        while self._window and self._window[0][0] <= period_idx - self.max_age_periods:
            self._window.popleft()
        if len(self._window) == self.profile_len:
            rows = np.vstack([sig.normalized for _, sig in self._window])
            return SignalProfile.from_rows(self.identity, rows)
        return None
