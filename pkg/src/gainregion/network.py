"""Scenario data model: transmitters, receivers, channels and file I/O.

A Scenario is immutable after construction and safe for shared concurrent
reads.  Receivers are numbered 1..K, matching the on-disk format and the
CLI; the math modules index plain channel lists 0-based.

Virtual transmitters (one physical transmitter split per intended
receiver, coupled by a shared power budget) are modeled by giving several
TransmitterSpec entries the same ``channel_key``: they then share channel
vectors and are listed together in one power group.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import as_cvec, unit

__all__ = [
    "SCENARIO_FORMAT",
    "ScenarioFormatError",
    "TransmitterSpec",
    "Scenario",
    "direction_vector",
    "generate_channels",
    "snr_to_noise",
    "effective_miso_channel",
    "svd_receive_filter",
    "mrc_receive_filter",
    "reduce_to_miso",
    "scenario_to_dict",
    "scenario_from_dict",
    "save_scenario",
    "load_scenario",
    "scenario_digest",
    "ic_skeleton",
    "mixed_skeleton",
]

SCENARIO_FORMAT = "miso-gain-region/1"


class ScenarioFormatError(ValueError):
    """A scenario document violates the schema; messages carry field paths."""


@dataclass(frozen=True)
class TransmitterSpec:
    """One (possibly virtual) transmitter: antennas and receiver sets."""

    tid: str
    n_antennas: int
    intended: frozenset[int]
    channel_key: str

    def __init__(self, tid, n_antennas, intended, channel_key=None):
        object.__setattr__(self, "tid", str(tid))
        object.__setattr__(self, "n_antennas", int(n_antennas))
        object.__setattr__(self, "intended", frozenset(int(r) for r in intended))
        object.__setattr__(
            self, "channel_key", str(tid) if channel_key is None else str(channel_key)
        )

    def unintended(self, n_receivers: int) -> frozenset[int]:
        return frozenset(range(1, n_receivers + 1)) - self.intended


@dataclass(frozen=True)
class Scenario:
    """A full network: transmitters, receivers, channels and noise level.

    ``channels`` maps ``(channel_key, receiver)`` to a complex channel
    vector of the owning transmitter's antenna dimension; it may be empty
    for a skeleton awaiting generate_channels().  Every power group shares
    one unit transmit power budget.
    """

    transmitters: tuple[TransmitterSpec, ...]
    n_receivers: int
    noise_power: float
    power_groups: tuple[tuple[str, ...], ...]
    channels: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "transmitters", tuple(self.transmitters))
        groups = tuple(tuple(str(t) for t in g) for g in self.power_groups)
        object.__setattr__(self, "power_groups", groups)
        frozen = {}
        for key, vec in self.channels.items():
            arr = np.array(vec, dtype=np.complex128)
            arr.flags.writeable = False
            frozen[(str(key[0]), int(key[1]))] = arr
        object.__setattr__(self, "channels", frozen)
        _check_structure(self)

    @property
    def receivers(self) -> range:
        return range(1, self.n_receivers + 1)

    @property
    def tids(self) -> tuple[str, ...]:
        return tuple(t.tid for t in self.transmitters)

    def transmitter(self, tid: str) -> TransmitterSpec:
        for t in self.transmitters:
            if t.tid == tid:
                return t
        raise KeyError(f"unknown transmitter id {tid!r}")

    def group_of(self, tid: str) -> tuple[str, ...]:
        for g in self.power_groups:
            if tid in g:
                return g
        raise KeyError(f"transmitter {tid!r} is in no power group")

    def channel(self, tid: str, receiver: int) -> np.ndarray:
        t = self.transmitter(tid)
        try:
            return self.channels[(t.channel_key, int(receiver))]
        except KeyError:
            raise KeyError(
                f"no channel for transmitter {tid!r} (key {t.channel_key!r}) "
                f"to receiver {receiver}"
            ) from None

    def channels_for(self, tid: str) -> list[np.ndarray]:
        """Channel vectors from one transmitter to receivers 1..K, in order."""
        return [self.channel(tid, r) for r in self.receivers]

    def has_channels(self) -> bool:
        return all(
            (t.channel_key, r) in self.channels
            for t in self.transmitters
            for r in self.receivers
        )


def _check_structure(s: Scenario) -> None:
    if s.n_receivers < 1:
        raise ScenarioFormatError("receivers: must be >= 1")
    if not math.isfinite(s.noise_power) or s.noise_power <= 0:
        raise ScenarioFormatError(f"noise_power: must be positive, got {s.noise_power}")
    if not s.transmitters:
        raise ScenarioFormatError("transmitters: must not be empty")
    seen = set()
    key_dims = {}
    for i, t in enumerate(s.transmitters):
        path = f"transmitters[{i}]"
        if t.tid in seen:
            raise ScenarioFormatError(f"{path}.id: duplicate id {t.tid!r}")
        seen.add(t.tid)
        if t.n_antennas < 1:
            raise ScenarioFormatError(f"{path}.antennas: must be >= 1")
        if not t.intended:
            raise ScenarioFormatError(
                f"{path}.intended: must contain at least one receiver "
                "(the direction vector would be all -1)"
            )
        bad = [r for r in t.intended if not 1 <= r <= s.n_receivers]
        if bad:
            raise ScenarioFormatError(
                f"{path}.intended: receiver indices {sorted(bad)} outside 1..{s.n_receivers}"
            )
        if t.channel_key in key_dims and key_dims[t.channel_key] != t.n_antennas:
            raise ScenarioFormatError(
                f"{path}.antennas: channel key {t.channel_key!r} already declared "
                f"with {key_dims[t.channel_key]} antennas"
            )
        key_dims[t.channel_key] = t.n_antennas
    grouped = [tid for g in s.power_groups for tid in g]
    if sorted(grouped) != sorted(seen):
        raise ScenarioFormatError(
            "power_groups: must partition the transmitter ids exactly once each; "
            f"got {s.power_groups!r} for ids {sorted(seen)}"
        )
    for (key, r), vec in s.channels.items():
        if key not in key_dims:
            raise ScenarioFormatError(f"channels[{key}/{r}]: unknown channel key {key!r}")
        if not 1 <= r <= s.n_receivers:
            raise ScenarioFormatError(f"channels[{key}/{r}]: receiver outside 1..{s.n_receivers}")
        if vec.ndim != 1 or vec.size != key_dims[key]:
            raise ScenarioFormatError(
                f"channels[{key}/{r}]: expected {key_dims[key]} entries for "
                f"channel key {key!r}, got {vec.size}"
            )
        if not np.isfinite(vec).all():
            raise ScenarioFormatError(f"channels[{key}/{r}]: non-finite entries")


def direction_vector(s: Scenario, tid: str) -> np.ndarray:
    """Boundary direction for one transmitter: +1 at intended receivers."""
    t = s.transmitter(tid)
    e = np.array(
        [1 if r in t.intended else -1 for r in s.receivers], dtype=np.int64
    )
    e.flags.writeable = False
    return e


def _stream_generator(seed: int, channel_key: str, receiver: int) -> np.random.Generator:
    """Counter-based generator for one (channel key, receiver) stream.

    The Philox key is derived by hashing (seed, channel key, receiver), so
    every channel vector has its own stream: adding receivers or
    transmitters never perturbs existing channels.
    """
    tag = f"{int(seed)}|{channel_key}|{int(receiver)}".encode()
    digest = hashlib.blake2b(tag, digest_size=16).digest()
    key = np.frombuffer(digest, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def generate_channels(seed: int, skeleton: Scenario) -> Scenario:
    """Fill every channel with i.i.d. CN(0, 1) entries, deterministically.

    Entries are circularly symmetric complex Gaussian with zero mean and
    unit variance.  The same seed always reproduces the same channels,
    bit for bit.
    """
    keys = {}
    for t in skeleton.transmitters:
        keys.setdefault(t.channel_key, t.n_antennas)
    channels = {}
    for key, n in keys.items():
        for r in skeleton.receivers:
            rng = _stream_generator(seed, key, r)
            z = rng.standard_normal(2 * n)
            channels[(key, r)] = (z[0::2] + 1j * z[1::2]) / np.sqrt(2.0)
    return replace(skeleton, channels=channels)


def snr_to_noise(snr_db: float) -> float:
    """Noise power sigma^2 for a given SNR in dB (SNR = 1/sigma^2)."""
    snr_db = float(snr_db)
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    return 10.0 ** (-snr_db / 10.0)


def effective_miso_channel(h_matrix, receive_filter) -> np.ndarray:
    """Reduce one MIMO link to MISO under a fixed unit receive filter.

    For an R x N channel matrix H and unit filter z, returns h = H^H z so
    that |z^H H w|^2 = |h^H w|^2 for every transmit beamformer w.
    """
    h = np.asarray(h_matrix, dtype=np.complex128)
    if h.ndim != 2:
        raise ValueError(f"expected an R x N channel matrix, got shape {h.shape}")
    z = as_cvec(receive_filter)
    if z.size != h.shape[0]:
        raise ValueError(
            f"receive filter has dimension {z.size}, channel matrix has {h.shape[0]} rows"
        )
    if abs(np.linalg.norm(z) - 1.0) > 1e-8:
        raise ValueError("receive filter must have unit norm")
    return h.conj().T @ z


def svd_receive_filter(h_matrix) -> np.ndarray:
    """Left singular vector of the largest singular value of H."""
    h = np.asarray(h_matrix, dtype=np.complex128)
    u, _, _ = np.linalg.svd(h)
    from .linalg import fix_phase

    return fix_phase(u[:, 0])


def mrc_receive_filter(h_matrix, w) -> np.ndarray:
    """Maximum ratio combining filter H w (normalized) for beamformer w."""
    h = np.asarray(h_matrix, dtype=np.complex128)
    return unit(h @ as_cvec(w))


def reduce_to_miso(skeleton: Scenario, mimo_channels: dict, receive_filters: dict) -> Scenario:
    """Build a MISO scenario from MIMO channel matrices and fixed filters.

    ``mimo_channels`` maps (channel_key, receiver) to an R x N matrix and
    ``receive_filters`` maps receiver to a unit filter of dimension R.
    The filters must not depend on unintended transmitters for the gain
    region framework to apply; that choice is the caller's.
    """
    channels = {}
    for t in skeleton.transmitters:
        for r in skeleton.receivers:
            key = (t.channel_key, r)
            if key in channels:
                continue
            try:
                h = mimo_channels[key]
            except KeyError:
                raise ScenarioFormatError(f"mimo_channels[{key[0]}/{r}]: missing entry") from None
            try:
                z = receive_filters[r]
            except KeyError:
                raise ScenarioFormatError(f"receive_filters[{r}]: missing entry") from None
            channels[key] = effective_miso_channel(h, z)
    return replace(skeleton, channels=channels)


def _complex_to_pairs(vec: np.ndarray) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in vec]


def scenario_to_dict(s: Scenario) -> dict:
    """Plain-data form of a scenario, exact for round tripping."""
    return {
        "format": SCENARIO_FORMAT,
        "receivers": s.n_receivers,
        "noise_power": float(s.noise_power),
        "transmitters": [
            {
                "id": t.tid,
                "antennas": t.n_antennas,
                "intended": sorted(t.intended),
                "channel_key": t.channel_key,
            }
            for t in s.transmitters
        ],
        "power_groups": [list(g) for g in s.power_groups],
        "channels": {
            f"{key}/{r}": _complex_to_pairs(vec)
            for (key, r), vec in sorted(s.channels.items())
        },
    }


def _parse_channel_entry(path: str, raw) -> np.ndarray:
    if not isinstance(raw, list):
        raise ScenarioFormatError(f"{path}: expected a list of [re, im] pairs")
    out = np.zeros(len(raw), dtype=np.complex128)
    for i, pair in enumerate(raw):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ScenarioFormatError(f"{path}[{i}]: expected a [re, im] pair")
        try:
            out[i] = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError):
            raise ScenarioFormatError(f"{path}[{i}]: entries must be numbers") from None
    return out


def scenario_from_dict(doc: dict) -> Scenario:
    """Parse and validate a scenario document; channels may be absent."""
    if not isinstance(doc, dict):
        raise ScenarioFormatError("document: expected an object")
    if doc.get("format") != SCENARIO_FORMAT:
        raise ScenarioFormatError(
            f"format: expected {SCENARIO_FORMAT!r}, got {doc.get('format')!r}"
        )
    for fieldname in ("receivers", "noise_power", "transmitters", "power_groups"):
        if fieldname not in doc:
            raise ScenarioFormatError(f"{fieldname}: missing")
    transmitters = []
    raw_txs = doc["transmitters"]
    if not isinstance(raw_txs, list):
        raise ScenarioFormatError("transmitters: expected a list")
    for i, raw in enumerate(raw_txs):
        path = f"transmitters[{i}]"
        if not isinstance(raw, dict):
            raise ScenarioFormatError(f"{path}: expected an object")
        for k in ("id", "antennas", "intended"):
            if k not in raw:
                raise ScenarioFormatError(f"{path}.{k}: missing")
        if not isinstance(raw["intended"], list):
            raise ScenarioFormatError(f"{path}.intended: expected a list")
        transmitters.append(
            TransmitterSpec(
                tid=raw["id"],
                n_antennas=raw["antennas"],
                intended=raw["intended"],
                channel_key=raw.get("channel_key"),
            )
        )
    channels = {}
    for key_str, raw in doc.get("channels", {}).items():
        try:
            ckey, recv = key_str.rsplit("/", 1)
            recv = int(recv)
        except ValueError:
            raise ScenarioFormatError(
                f"channels[{key_str}]: key must look like '<channel_key>/<receiver>'"
            ) from None
        channels[(ckey, recv)] = _parse_channel_entry(f"channels[{key_str}]", raw)
    try:
        return Scenario(
            transmitters=tuple(transmitters),
            n_receivers=int(doc["receivers"]),
            noise_power=float(doc["noise_power"]),
            power_groups=tuple(tuple(g) for g in doc["power_groups"]),
            channels=channels,
        )
    except ScenarioFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(str(exc)) from exc


def save_scenario(s: Scenario, path) -> None:
    """Write a scenario file; floats round-trip exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(s), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"document: invalid JSON ({exc})") from exc
    return scenario_from_dict(doc)


def scenario_digest(s: Scenario) -> str:
    """Short stable hash of the full scenario content."""
    blob = json.dumps(scenario_to_dict(s), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def ic_skeleton(users: int, antennas: int, noise_power: float = 1.0) -> Scenario:
    """K-user MISO interference channel: transmitter k serves receiver k."""
    if users < 1:
        raise ValueError("users must be >= 1")
    transmitters = tuple(
        TransmitterSpec(tid=str(k), n_antennas=antennas, intended={k})
        for k in range(1, users + 1)
    )
    return Scenario(
        transmitters=transmitters,
        n_receivers=users,
        noise_power=noise_power,
        power_groups=tuple((t.tid,) for t in transmitters),
    )


def mixed_skeleton(antennas: int = 3, noise_power: float = 1.0) -> Scenario:
    """Two physical transmitters, three receivers: BC + MAC + multicast + IC.

    Transmitter 1 is split into virtual transmitters 11 (serves receiver 1)
    and 12 (serves receiver 2) sharing one power budget and one physical
    channel; transmitter 2 multicasts to receivers 2 and 3.  Receiver sets:
    intended(11)={1}, intended(12)={2}, intended(2)={2,3}; everything else
    is interference.
    """
    transmitters = (
        TransmitterSpec(tid="11", n_antennas=antennas, intended={1}, channel_key="1"),
        TransmitterSpec(tid="12", n_antennas=antennas, intended={2}, channel_key="1"),
        TransmitterSpec(tid="2", n_antennas=antennas, intended={2, 3}, channel_key="2"),
    )
    return Scenario(
        transmitters=transmitters,
        n_receivers=3,
        noise_power=noise_power,
        power_groups=(("11", "12"), ("2",)),
    )
