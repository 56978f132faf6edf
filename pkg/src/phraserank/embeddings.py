"""Embedding backends and cosine similarity.

Vectors are plain tuples of Python floats. The whole module is pure
Python on purpose: the deterministic backend and the similarity math
must produce bit-identical results across platforms so that golden
pipeline outputs can be compared byte for byte.
"""

from __future__ import annotations

import hashlib
import math
import threading
import time
from abc import ABC, abstractmethod
from typing import Sequence

import httpx

from phraserank.errors import ContractViolationError, TransportError

Vector = tuple[float, ...]

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


def _splitmix64_next(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX_1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_2) & _MASK64
    z ^= z >> 31
    return state, z


def hash_embed(text: str, dim: int, seed: int) -> Vector:
    """Deterministic stand-in embedding, bit-reproducible across platforms.

    Procedure (fixed; an independent implementation must reproduce it
    exactly):

    1. Lowercase the text and split it on whitespace into tokens; zero
       tokens yield the all-zero vector.
    2. Per token, take the first 8 bytes (big-endian) of
       SHA-256(UTF-8(token) || seed) as a 64-bit generator state, where
       seed is the configured seed as 8 big-endian bytes (unsigned,
       modulo 2^64).
    3. Draw dim values with SplitMix64 (increment 0x9E3779B97F4A7C15,
       mixers 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB, shifts 30/27/31);
       map each 64-bit output u to 2 * ((u >> 11) * 2^-53) - 1, uniform
       in [-1, 1).
    4. The text vector is the componentwise sum of the token vectors, in
       token order.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    seed_bytes = (seed & _MASK64).to_bytes(8, "big")
    acc = [0.0] * dim
    for token in text.lower().split():
        digest = hashlib.sha256(token.encode("utf-8") + seed_bytes).digest()
        state = int.from_bytes(digest[:8], "big")
        for i in range(dim):
            state, z = _splitmix64_next(state)
            acc[i] += 2.0 * ((z >> 11) * _TO_UNIT) - 1.0
    return tuple(acc)


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine similarity, clamped to [-1, 1]; 0.0 when either norm is zero.

    Sums use math.fsum (exactly rounded) so results are identical across
    platforms and cosine(a, b) == cosine(b, a) bit for bit.
    """
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    dot = math.fsum(x * y for x, y in zip(a, b))
    norm_a = math.sqrt(math.fsum(x * x for x in a))
    norm_b = math.sqrt(math.fsum(y * y for y in b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


class EmbeddingBackend(ABC):
    """Contract: a named, fixed-dimension, deterministic text embedder.

    ``embed`` caches by exact string; subclasses implement the uncached
    ``embed_batch``. Instances are safe to share across worker threads.
    """

    def __init__(self) -> None:
        self._cache: dict[str, Vector] = {}
        self._cache_lock = threading.Lock()

    @property
    @abstractmethod
    def name(self) -> str: ...

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @abstractmethod
    def embed_batch(self, texts: Sequence[str]) -> list[Vector]:
        """Embed texts without caching; one vector per text, in order."""

    def embed(self, texts: Sequence[str]) -> list[Vector]:
        missing: list[str] = []
        seen: set[str] = set()
        for text in texts:
            if text not in self._cache and text not in seen:
                seen.add(text)
                missing.append(text)
        if missing:
            vectors = self.embed_batch(missing)
            if len(vectors) != len(missing):
                raise ContractViolationError(
                    f"backend {self.name!r} returned {len(vectors)} vectors for {len(missing)} texts"
                )
            expected = self.dim
            for text, vector in zip(missing, vectors):
                if len(vector) != expected:
                    raise ContractViolationError(
                        f"backend {self.name!r} returned a {len(vector)}-dim vector, declared dim {expected}"
                    )
                if any(not math.isfinite(v) for v in vector):
                    raise ContractViolationError(
                        f"backend {self.name!r} returned a non-finite component for {text!r}"
                    )
            with self._cache_lock:
                for text, vector in zip(missing, vectors):
                    self._cache[text] = tuple(vector)
        return [self._cache[text] for text in texts]


def embed_texts(backend: EmbeddingBackend, texts: Sequence[str]) -> list[Vector]:
    """Embed texts through the backend's cache; order-preserving."""
    return backend.embed(texts)


class HashEmbeddingBackend(EmbeddingBackend):
    """Offline deterministic backend built on hash_embed."""

    def __init__(self, dim: int = 64, seed: int = 42):
        super().__init__()
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self._dim = dim
        self._seed = seed

    @property
    def name(self) -> str:
        return f"hash:{self._dim}:{self._seed}"

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def seed(self) -> int:
        return self._seed

    def embed_batch(self, texts: Sequence[str]) -> list[Vector]:
        return [hash_embed(text, self._dim, self._seed) for text in texts]


class HttpEmbeddingBackend(EmbeddingBackend):
    """Client for the embedding sidecar: POST /embed, GET /health.

    The dimension is learned from the /health handshake, so any model the
    sidecar hosts works unchanged. Transient failures (connection errors,
    5xx) are retried with exponential backoff; a malformed response
    raises ContractViolationError immediately.
    """

    def __init__(
        self,
        url: str,
        batch_size: int = 32,
        retries: int = 3,
        timeout: float = 30.0,
        backoff: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ):
        super().__init__()
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        if retries < 1:
            raise ValueError(f"retries must be >= 1, got {retries}")
        self._url = url.rstrip("/")
        self._batch_size = batch_size
        self._retries = retries
        self._backoff = backoff
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._handshake_lock = threading.Lock()
        self._model: str | None = None
        self._dim: int | None = None

    @property
    def url(self) -> str:
        return self._url

    @property
    def name(self) -> str:
        self._ensure_handshake()
        return f"http:{self._model}"

    @property
    def dim(self) -> int:
        self._ensure_handshake()
        assert self._dim is not None
        return self._dim

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "HttpEmbeddingBackend":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def health(self) -> dict:
        """GET /health, retried; returns the decoded body once the service is ready."""
        payload = self._request_with_retries("GET", f"{self._url}/health")
        if not isinstance(payload, dict):
            raise ContractViolationError("health response is not a JSON object")
        return payload

    def _ensure_handshake(self) -> None:
        if self._dim is not None:
            return
        with self._handshake_lock:
            if self._dim is not None:
                return
            payload = self.health()
            model = payload.get("model")
            dim = payload.get("dim")
            if not isinstance(model, str) or not isinstance(dim, int) or dim < 1:
                raise ContractViolationError(
                    f"health handshake must declare model and positive dim, got {payload!r}"
                )
            self._model = model
            self._dim = dim

    def embed_batch(self, texts: Sequence[str]) -> list[Vector]:
        self._ensure_handshake()
        vectors: list[Vector] = []
        for i in range(0, len(texts), self._batch_size):
            chunk = list(texts[i : i + self._batch_size])
            payload = self._request_with_retries(
                "POST", f"{self._url}/embed", json={"texts": chunk}
            )
            vectors.extend(self._decode_embed_response(payload, len(chunk)))
        return vectors

    def _decode_embed_response(self, payload, expected_count: int) -> list[Vector]:
        if not isinstance(payload, dict) or not isinstance(payload.get("vectors"), list):
            raise ContractViolationError(f"embed response malformed: {payload!r}")
        raw_vectors = payload["vectors"]
        if len(raw_vectors) != expected_count:
            raise ContractViolationError(
                f"embed response has {len(raw_vectors)} vectors for {expected_count} texts"
            )
        if payload.get("dim") != self._dim:
            raise ContractViolationError(
                f"embed response dim {payload.get('dim')!r} != handshake dim {self._dim}"
            )
        out: list[Vector] = []
        for raw in raw_vectors:
            if not isinstance(raw, list) or len(raw) != self._dim:
                raise ContractViolationError(
                    f"embed vector has length {len(raw) if isinstance(raw, list) else 'N/A'}, expected {self._dim}"
                )
            vector = tuple(float(v) for v in raw)
            out.append(vector)
        return out

    def _request_with_retries(self, method: str, url: str, json=None):
        last_error: str = ""
        for attempt in range(self._retries):
            if attempt > 0:
                time.sleep(self._backoff * (2 ** (attempt - 1)))
            try:
                response = self._client.request(method, url, json=json)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code == 200:
                try:
                    return response.json()
                except ValueError:
                    raise ContractViolationError(
                        f"non-JSON response from {url}"
                    ) from None
            if response.status_code < 500 and response.status_code != 503:
                # 4xx other than 503: retrying cannot help
                raise ContractViolationError(
                    f"{method} {url} failed with status {response.status_code}: {response.text[:200]}"
                )
            last_error = f"status {response.status_code}"
        raise TransportError(
            f"{method} {url} failed after {self._retries} attempts ({last_error})"
        )
