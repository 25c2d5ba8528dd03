"""The module which holds the weights of the distortion-aware blocks and stores them on disk.

The storage format is a flat little-endian binary of 32-bit floats (``.bin``) together with a JSON sidecar
(``.json``) listing the name, shape and element offset of each tensor, e.g.

.. code-block:: json

    {"tensors": [{"name": "daab_offset.w1", "shape": [32, 3], "offset": 0}, ...]}
"""

from pathlib import Path
from typing import Self

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, NonNegativeInt, ValidationError, model_validator

from omnisr.io.rasters import write_bytes
from omnisr.modulation.errors import Modulation

HIDDEN_WIDTH = 32
"""The width of the hidden stages of the offset networks."""

DAAB_OFFSETS = 2
"""The output channels of the attention offset network, one ``(dy, dx)`` pair."""

DACB_OFFSETS = 18
"""The output channels of the convolution offset network, one ``(dy, dx)`` pair per tap of the 3x3 kernel."""

DTYPE = np.dtype("<f4")


class _Tensors(BaseModel):
    """The base model of named bundles of ``float32`` arrays."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def _check_finite(self) -> Self:
        for name, value in self:
            if isinstance(value, np.ndarray) and not np.all(np.isfinite(value)):
                raise ValueError(f"The tensor {name} is not finite.")
        return self


class OffsetNetWeights(_Tensors):
    """The three pointwise (1x1) stages ``in -> hidden -> hidden -> out`` of an offset network."""
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        hidden = self.w1.shape[0]
        if (self.w1.ndim != 2 or self.b1.shape != (hidden,) or self.w2.shape != (hidden, hidden)
                or self.b2.shape != (hidden,) or self.w3.ndim != 2 or self.w3.shape[1] != hidden
                or self.b3.shape != (self.w3.shape[0],)):
            raise ValueError("Inconsistent offset network shapes.")
        return self

    @property
    def in_channels(self) -> int:
        """The number of condition channels the network takes."""
        return self.w1.shape[1]

    @property
    def out_channels(self) -> int:
        """The number of offset channels the network produces."""
        return self.w3.shape[0]


class AttentionWeights(_Tensors):
    """The ``(C, C)`` query, key and value projections; tokens are row vectors, e.g. ``q = f @ w_q``."""
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        c = self.w_q.shape[0]
        if any(w.shape != (c, c) for w in (self.w_q, self.w_k, self.w_v)):
            raise ValueError("The attention projections must be square and of the same size.")
        return self


class ConvWeights(_Tensors):
    """The ``(C_out, C_in, 3, 3)`` filter bank and the ``(C_out,)`` bias of the deformable convolution."""
    filters: np.ndarray
    bias: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        if self.filters.ndim != 4 or self.filters.shape[2:] != (3, 3) or self.bias.shape != self.filters.shape[:1]:
            raise ValueError("The filter bank must be (C_out, C_in, 3, 3) with a (C_out,) bias.")
        return self


class TensorEntry(BaseModel):
    """The sidecar entry of a single tensor."""
    name: str
    shape: list[NonNegativeInt]
    offset: NonNegativeInt


class Sidecar(BaseModel):
    """The JSON sidecar of a weights binary."""
    tensors: list[TensorEntry]


_SECTIONS = {
    "daab_offset": OffsetNetWeights,
    "attention": AttentionWeights,
    "dacb_offset": OffsetNetWeights,
    "conv": ConvWeights,
}


class BlockWeights(BaseModel):
    """All the weights of one attention block and one convolution block."""
    model_config = ConfigDict(frozen=True)

    daab_offset: OffsetNetWeights
    attention: AttentionWeights
    dacb_offset: OffsetNetWeights
    conv: ConvWeights

    @model_validator(mode="after")
    def _check_consistency(self) -> Self:
        channels = self.attention.w_q.shape[0]
        if self.daab_offset.in_channels != 3 or self.daab_offset.out_channels != DAAB_OFFSETS:
            raise ValueError("The attention offset network must map 3 channels to 2.")
        if self.dacb_offset.in_channels != 1 or self.dacb_offset.out_channels != DACB_OFFSETS:
            raise ValueError("The convolution offset network must map 1 channel to 18.")
        if self.conv.filters.shape[1] != channels:
            raise ValueError("The convolution input channels must match the attention channels.")
        return self

    @property
    def channels(self) -> int:
        """The number of feature channels ``C``."""
        return self.attention.w_q.shape[0]

    @classmethod
    def random(
            cls,
            seed: int,
            channels: int = 4,
            out_channels: int | None = None,
            hidden: int = HIDDEN_WIDTH,
            zero_offsets: bool = False) -> Self:
        """Draws Gaussian weights, scaled by the inverse square root of the fan-in, from a seeded generator.

        Args:
            seed:
                The seed of the generator; it fully determines the weights.
            channels (Optional, default ``4``):
                The number of feature channels.
            out_channels (Optional, default ``None``):
                The output channels of the convolution, ``channels`` by default.
            hidden (Optional, default ``32``):
                The width of the hidden stages of the offset networks.
            zero_offsets (Optional, default ``False``):
                Whether to zero both offset networks, so that the blocks reduce to their standard counterparts.
        """
        rng = np.random.default_rng(seed)
        out_channels = out_channels or channels

        def draw(*shape: int) -> np.ndarray:
            fan_in = int(np.prod(shape[1:])) or 1
            return (rng.standard_normal(shape) / np.sqrt(fan_in)).astype(DTYPE)

        def offset_net(in_channels: int, out: int) -> OffsetNetWeights:
            net = OffsetNetWeights(
                w1=draw(hidden, in_channels), b1=draw(hidden),
                w2=draw(hidden, hidden), b2=draw(hidden),
                w3=draw(out, hidden), b3=draw(out),
            )
            return _zero_like(net) if zero_offsets else net

        return cls(
            daab_offset=offset_net(3, DAAB_OFFSETS),
            attention=AttentionWeights(
                w_q=draw(channels, channels), w_k=draw(channels, channels), w_v=draw(channels, channels)),
            dacb_offset=offset_net(1, DACB_OFFSETS),
            conv=ConvWeights(filters=draw(out_channels, channels, 3, 3), bias=draw(out_channels)),
        )

    @classmethod
    def zeros(cls, channels: int = 4, out_channels: int | None = None, hidden: int = HIDDEN_WIDTH) -> Self:
        """Makes all-zero weights."""
        return _zero_like(cls.random(0, channels, out_channels, hidden))

    def named_tensors(self) -> list[tuple[str, np.ndarray]]:
        """Lists the tensors with their dotted names, in storage order."""
        return [
            (f"{section}.{name}", value)
            for section in _SECTIONS
            for name, value in getattr(self, section)
        ]

    def save(self, path: Path | str) -> tuple[Path, Path]:
        """Writes the binary ``<path>`` and its sidecar ``<path>.json``.

        Returns:
            The paths of the binary and the sidecar.
        """
        path = Path(path)
        entries, chunks, offset = [], [], 0
        for name, value in self.named_tensors():
            entries.append(TensorEntry(name=name, shape=list(value.shape), offset=offset))
            chunks.append(np.ascontiguousarray(value, dtype=DTYPE).ravel())
            offset += value.size
        write_bytes(path, np.concatenate(chunks).tobytes())
        sidecar = write_bytes(sidecar_path(path), Sidecar(tensors=entries).model_dump_json(indent=2).encode())
        logger.info(f"Saved the block weights to {path}.")
        return path, sidecar

    @classmethod
    def load(cls, path: Path | str) -> Self:
        """Reads weights written by :func:`BlockWeights.save`; the round trip is bit-exact.

        Raises:
            :class:`~omnisr.errors.errors.OmniError`:
                ``Modulation.WeightsFormat`` if the binary or its sidecar is malformed.
        """
        path = Path(path)
        try:
            sidecar = Sidecar.model_validate_json(sidecar_path(path).read_bytes())
            flat = np.frombuffer(path.read_bytes(), dtype=DTYPE)
            sections: dict[str, dict[str, np.ndarray]] = {section: {} for section in _SECTIONS}
            for entry in sidecar.tensors:
                section, name = entry.name.split(".", 1)
                size = int(np.prod(entry.shape))
                if entry.offset + size > flat.size:
                    raise ValueError(f"The tensor {entry.name} exceeds the binary.")
                sections[section][name] = flat[entry.offset:entry.offset + size].reshape(entry.shape).copy()
            return cls(**{section: _SECTIONS[section](**tensors) for section, tensors in sections.items()})
        except (OSError, ValueError, KeyError, ValidationError) as e:
            raise Modulation.WeightsFormat.with_information(path=str(path), reason=str(e)) from e


def sidecar_path(path: Path) -> Path:
    """The path of the JSON sidecar of a weights binary."""
    return path.with_name(path.name + ".json")


def _zero_like(model: BaseModel) -> BaseModel:
    """Returns a copy of a tensor bundle (or of all bundles) with every tensor zeroed."""
    if isinstance(model, BlockWeights):
        return model.model_copy(update={section: _zero_like(getattr(model, section)) for section in _SECTIONS})
    return type(model)(**{name: np.zeros_like(value) for name, value in model})
