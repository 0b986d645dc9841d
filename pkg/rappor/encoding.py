"""Client-side RAPPOR encoding.

A value goes through three stages before it leaves the client:

    value --bloom_encode--> Bloom bits --permanent_rr--> PRR --instantaneous_rr--> IRR

Bitsets are plain integers wrapped in :class:`Bitset`; bit ``i`` of the
integer is index ``i`` of the filter. Noise is drawn with numpy generators,
one uniform per bit.
"""
import hashlib
import hmac
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from .exceptions import DomainError

DEFAULT_SECRET = b'ara-rappor-client'

# SHA-256 gives one byte per Bloom hash.
MAX_HASHES = hashlib.sha256().digest_size
# Cohorts are hashed as two big-endian bytes.
MAX_COHORTS = 1 << 16


@dataclass(frozen=True)
class EncodingParams:
    k: int = 32
    h: int = 2
    m: int = 64
    f: float = 0.5
    p: float = 0.5
    q: float = 0.75

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f'k must be at least 1, got {self.k}')
        if not 1 <= self.h <= self.k:
            raise DomainError(f'h must be in [1, k={self.k}], got {self.h}')
        if self.h > MAX_HASHES:
            raise DomainError(f'h must be at most {MAX_HASHES}, got {self.h}')
        if not 1 <= self.m <= MAX_COHORTS:
            raise DomainError(f'm must be in [1, {MAX_COHORTS}], got {self.m}')
        for name in ('f', 'p', 'q'):
            # Equal parameters must print, and so fingerprint, the same way.
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f'{name} must be a probability in [0, 1], got {value}')

    def fingerprint(self) -> str:
        """16 hex digits identifying this parameter set in store headers."""
        canonical = (f'k={self.k};h={self.h};m={self.m};'
                     f'f={self.f!r};p={self.p!r};q={self.q!r}')
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


@dataclass(frozen=True)
class Bitset:
    width: int
    bits: int = 0

    def __post_init__(self):
        if self.width < 1:
            raise DomainError(f'bitset width must be positive, got {self.width}')
        if not 0 <= self.bits < (1 << self.width):
            raise DomainError(f'bits do not fit in width {self.width}')

    @classmethod
    def from_indices(cls, width, indices):
        bits = 0
        for index in indices:
            if not 0 <= index < width:
                raise DomainError(f'bit index {index} outside width {width}')
            bits |= 1 << index
        return cls(width, bits)

    @classmethod
    def from_array(cls, array):
        return cls.from_indices(len(array), np.flatnonzero(array).tolist())

    @classmethod
    def from_string(cls, text):
        """Parse a '0'/'1' string written most significant index first."""
        if not text or set(text) - {'0', '1'}:
            raise DomainError(f'not a bit string: {text!r}')
        return cls(len(text), int(text, 2))

    def to_array(self):
        return np.array([self.bits >> i & 1 for i in range(self.width)], dtype=bool)

    def popcount(self) -> int:
        return self.bits.bit_count()

    def indices(self):
        return [i for i in range(self.width) if self.bits >> i & 1]

    def __str__(self):
        return format(self.bits, f'0{self.width}b')


@dataclass(frozen=True)
class ClientReport:
    client_id: str
    cohort: int
    prr: Bitset
    irr: Bitset
    true_value: Optional[str] = None

    @property
    def is_labeled(self) -> bool:
        return self.true_value is not None

    def without_label(self):
        return replace(self, true_value=None)


def _keyed_digest(secret, *parts):
    message = b'\x00'.join(part.encode('utf-8') for part in parts)
    return hmac.new(secret, message, hashlib.sha256).digest()


@lru_cache(maxsize=65536)
def _bloom_indices(value, cohort, h, k):
    digest = hashlib.sha256(cohort.to_bytes(2, 'big') + value.encode('utf-8')).digest()
    return tuple(digest[j] % k for j in range(h))


def bloom_encode(value: str, cohort: int, params: EncodingParams) -> Bitset:
    """Bloom filter of ``value`` under the hash functions of ``cohort``.

    digest = SHA-256(cohort as 2-byte big endian || UTF-8 value); hash ``j``
    sets bit ``digest[j] mod k``.
    """
    if not 0 <= cohort < params.m:
        raise DomainError(f'cohort {cohort} outside [0, {params.m})')
    return Bitset.from_indices(params.k, _bloom_indices(value, cohort, params.h, params.k))


def prr_generator(memo_key, secret=DEFAULT_SECRET):
    client_id, value = memo_key
    digest = _keyed_digest(secret, 'prr', client_id, value)
    return np.random.default_rng(int.from_bytes(digest, 'big'))


def permanent_rr(bloom: Bitset, params: EncodingParams, memo_key, secret=DEFAULT_SECRET) -> Bitset:
    """Permanent randomized response, memoized by construction.

    Each bit becomes 1 w.p. f/2, 0 w.p. f/2, and keeps its Bloom value
    otherwise. The uniforms come from a generator seeded by an HMAC of
    ``memo_key = (client_id, value)``, so the same client reporting the same
    value always gets the same PRR.
    """
    if bloom.width != params.k:
        raise DomainError(f'bloom width {bloom.width} != k={params.k}')
    u = prr_generator(memo_key, secret).random(params.k)
    force_one = u < params.f / 2
    force_zero = (u >= params.f / 2) & (u < params.f)
    return Bitset.from_array((bloom.to_array() | force_one) & ~force_zero)


def instantaneous_rr(prr: Bitset, params: EncodingParams, rng) -> Bitset:
    """Fresh noise on every call: 1 w.p. q where the PRR bit is set, else w.p. p."""
    if prr.width != params.k:
        raise DomainError(f'prr width {prr.width} != k={params.k}')
    u = rng.random(params.k)
    return Bitset.from_array(np.where(prr.to_array(), u < params.q, u < params.p))


def assign_cohort(client_id: str, params: EncodingParams, secret=DEFAULT_SECRET) -> int:
    digest = _keyed_digest(secret, 'cohort', client_id)
    return int.from_bytes(digest[:8], 'big') % params.m


def encode_report(client_id, value, params, rng=None, cohort=None,
                  secret=DEFAULT_SECRET, labeled=True) -> ClientReport:
    """Run the full client pipeline for one value.

    ``cohort`` overrides the hashed assignment; ``rng`` feeds the IRR and
    defaults to a fresh unseeded generator.
    """
    if cohort is None:
        cohort = assign_cohort(client_id, params, secret)
    if rng is None:
        rng = np.random.default_rng()
    bloom = bloom_encode(value, cohort, params)
    prr = permanent_rr(bloom, params, (client_id, value), secret)
    irr = instantaneous_rr(prr, params, rng)
    return ClientReport(
        client_id=client_id,
        cohort=cohort,
        prr=prr,
        irr=irr,
        true_value=value if labeled else None,
    )
