"""
    Serialization and deserialization of states, channels and results.

    Design Pattern: Strategy (output shape is configurable)
    ───────────────────────────────────────────────────────
    ``SerializationConfig`` selects the format (json | csv), the display
    units and the CSV float precision.  Unit conversion happens here and
    nowhere else: values inside the library are always nats.

    Also provides Factory Methods for deserialization:
        JSON file → CQState / WiretapChannel / KrausChannel / AffineHash

    Wire formats
    ────────────
        matrix          {"re": [[...]], "im": [[...]]}
        CQState         {"p": [...], "rhos": [matrix, ...]}
        WiretapChannel  {"dB": int, "dE": int, "outputs": [matrix, ...]}
        KrausChannel    {"dA": int, "dB": int, "kraus": [matrix, ...]}
        AffineHash      {"u": int, "v": int, "modulus": int, "a": int, "b": int}
"""
import csv
import hashlib
import io
import json
import math
from dataclasses import replace
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from api.exceptions import ValidationError
from api.models.cq_state import CQState, KrausChannel, WiretapChannel
from api.models.hashing import AffineHash, GFContext
from api.types import Units

from privamp.config import SerializationConfig

TOOL_VERSION = "1.0.0"

# Keys whose values carry nats^power and are rescaled for display.
UNIT_POWERS = {
    **dict.fromkeys((
        "rate", "exponent", "threshold", "entropy", "information", "a_n",
        "ach_exponent", "conv_exponent", "err_exponent",
        "length_lower", "length_upper", "length_lower_collision", "length_upper_two_thirds",
    ), 1),
    "variance": 2,
    # −ln ε / (n a_n²)
    "normalized_exponent": -2,
    "limit": -2,
}


class ResultSerializer:
    """
    Codec for every wire format of the toolkit.

    Usage:
        serializer = ResultSerializer(SerializationConfig(units=Units.BITS))
        state = serializer.load_state("state.json")
        text = serializer.render(payload, rows)
    """

    def __init__(self, config: Optional[SerializationConfig] = None):
        self._config = config or SerializationConfig()

    @property
    def config(self) -> SerializationConfig:
        return self._config

    @config.setter
    def config(self, value: SerializationConfig) -> None:
        self._config = value

    # ── Matrices ─────────────────────────────────────────────────

    @staticmethod
    def encode_matrix(matrix: Any) -> Dict[str, List[List[float]]]:
        m = np.asarray(matrix, dtype=complex)
        return {"re": m.real.tolist(), "im": m.imag.tolist()}

    @staticmethod
    def decode_matrix(data: Any, path: str = "$") -> np.ndarray:
        """
        Raises:
            ValidationError: Naming the JSON path of the malformed entry.
        """
        if isinstance(data, dict):
            if "re" not in data:
                raise ValidationError(f"{path}: matrix object needs an 're' field.")
            try:
                re = np.asarray(data["re"], dtype=float)
                im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
            except (TypeError, ValueError) as e:
                raise ValidationError(f"{path}: matrix entries must be numbers ({e}).") from e
            if re.shape != im.shape:
                raise ValidationError(f"{path}: 're' and 'im' shapes differ ({re.shape} vs {im.shape}).")
            m = re + 1j * im
        elif isinstance(data, list):
            try:
                m = np.asarray(data, dtype=float).astype(complex)
            except (TypeError, ValueError) as e:
                raise ValidationError(f"{path}: matrix entries must be numbers ({e}).") from e
        else:
            raise ValidationError(f"{path}: expected a matrix, got {type(data).__name__}.")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"{path}: matrix must be square, got shape {m.shape}.")
        return m

    def _decode_list(self, data: Dict[str, Any], key: str, path: str) -> List[np.ndarray]:
        items = data.get(key)
        if not isinstance(items, list) or not items:
            raise ValidationError(f"{path}.{key}: expected a non-empty list of matrices.")
        return [self.decode_matrix(item, f"{path}.{key}[{i}]") for i, item in enumerate(items)]

    @staticmethod
    def _require(data: Any, keys: Sequence[str], path: str) -> Dict[str, Any]:
        if not isinstance(data, dict):
            raise ValidationError(f"{path}: expected an object, got {type(data).__name__}.")
        missing = [k for k in keys if k not in data]
        if missing:
            raise ValidationError(f"{path}: missing field(s) {', '.join(missing)}.")
        return data

    # ── States and channels ──────────────────────────────────────

    def encode_state(self, state: CQState) -> Dict[str, Any]:
        return {"p": [float(x) for x in state.p],
                "rhos": [self.encode_matrix(r) for r in state.rhos]}

    def decode_state(self, data: Any, path: str = "$") -> CQState:
        data = self._require(data, ("p", "rhos"), path)
        rhos = self._decode_list(data, "rhos", path)
        try:
            return CQState(data["p"], rhos)
        except ValidationError as e:
            raise ValidationError(f"{path}: {e}") from e

    def encode_wiretap(self, channel: WiretapChannel) -> Dict[str, Any]:
        return {"dB": channel.d_b, "dE": channel.d_e,
                "outputs": [self.encode_matrix(s) for s in channel.outputs]}

    def decode_wiretap(self, data: Any, path: str = "$") -> WiretapChannel:
        data = self._require(data, ("dB", "dE", "outputs"), path)
        outputs = self._decode_list(data, "outputs", path)
        try:
            return WiretapChannel(outputs, int(data["dB"]), int(data["dE"]))
        except ValidationError as e:
            raise ValidationError(f"{path}: {e}") from e

    def encode_kraus(self, channel: KrausChannel) -> Dict[str, Any]:
        return {"dA": channel.d_a, "dB": channel.d_b,
                "kraus": [{"re": k.real.tolist(), "im": k.imag.tolist()} for k in channel.kraus]}

    def decode_kraus(self, data: Any, path: str = "$") -> KrausChannel:
        data = self._require(data, ("dA", "dB", "kraus"), path)
        items = data["kraus"]
        if not isinstance(items, list) or not items:
            raise ValidationError(f"{path}.kraus: expected a non-empty list of matrices.")
        ops = []
        for i, item in enumerate(items):
            item_path = f"{path}.kraus[{i}]"
            if not isinstance(item, dict) or "re" not in item:
                raise ValidationError(f"{item_path}: expected a matrix object.")
            k = np.asarray(item["re"], dtype=float) + 1j * np.asarray(item.get("im", 0.0), dtype=float)
            if k.shape != (int(data["dB"]), int(data["dA"])):
                raise ValidationError(f"{item_path}: expected shape (dB, dA) = "
                                      f"({data['dB']}, {data['dA']}), got {k.shape}.")
            ops.append(k)
        try:
            return KrausChannel(ops)
        except ValidationError as e:
            raise ValidationError(f"{path}: {e}") from e

    def decode_inputs(self, data: Any, path: str = "$") -> List[np.ndarray]:
        if isinstance(data, dict):
            data = data.get("states")
        if not isinstance(data, list) or not data:
            raise ValidationError(f"{path}: expected a non-empty list of input states.")
        return [self.decode_matrix(item, f"{path}[{i}]") for i, item in enumerate(data)]

    @staticmethod
    def decode_hash(data: Any, path: str = "$") -> AffineHash:
        data = ResultSerializer._require(data, ("u", "v", "a", "b"), path)
        ctx = GFContext(int(data["u"]), data.get("modulus"))
        return AffineHash(ctx, int(data["v"]), int(data["a"]), int(data["b"]))

    # ── Files ────────────────────────────────────────────────────

    @staticmethod
    def load_json(path: str) -> Any:
        """
        Raises:
            ValidationError: If the file is missing or not valid JSON (with line/column).
        """
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError as e:
            raise ValidationError(f"{path}: file not found.") from e
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}.") from e

    def load_state(self, path: str) -> CQState:
        return self.decode_state(self.load_json(path))

    def load_wiretap(self, path: str) -> WiretapChannel:
        return self.decode_wiretap(self.load_json(path))

    def load_kraus(self, path: str) -> KrausChannel:
        return self.decode_kraus(self.load_json(path))

    def load_inputs(self, path: str) -> List[np.ndarray]:
        return self.decode_inputs(self.load_json(path))

    # ── Provenance ───────────────────────────────────────────────

    @staticmethod
    def canonical_json(data: Any) -> str:
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def content_hash(self, obj: Any) -> str:
        """SHA-256 of the canonical JSON of a state, channel or raw JSON value."""
        if isinstance(obj, CQState):
            data = self.encode_state(obj)
        elif isinstance(obj, WiretapChannel):
            data = self.encode_wiretap(obj)
        elif isinstance(obj, KrausChannel):
            data = self.encode_kraus(obj)
        else:
            data = obj
        return hashlib.sha256(self.canonical_json(data).encode("utf-8")).hexdigest()

    # ── Units and rendering ──────────────────────────────────────

    def convert_units(self, data: Any) -> Any:
        """Rescale every nats-valued field (see ``UNIT_POWERS``) to the display unit."""
        units = self._config.units
        if units is Units.NATS:
            return data
        if isinstance(data, dict):
            return {k: (self._scale(v, units, UNIT_POWERS[k]) if k in UNIT_POWERS
                        else self.convert_units(v))
                    for k, v in data.items()}
        if isinstance(data, list):
            return [self.convert_units(v) for v in data]
        return data

    def _scale(self, value: Any, units: Units, power: int) -> Any:
        if isinstance(value, bool):
            return value
        if isinstance(value, (int, float)):
            return units.from_nats(float(value), power)
        return self.convert_units(value)

    def in_units(self, units: Units) -> "ResultSerializer":
        """A serializer identical to this one but displaying ``units``."""
        return ResultSerializer(replace(self._config, units=units))

    @staticmethod
    def _plain(value: Any) -> Any:
        if isinstance(value, dict):
            return {str(k): ResultSerializer._plain(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [ResultSerializer._plain(v) for v in value]
        if isinstance(value, np.generic):
            value = value.item()
        if isinstance(value, float) and not math.isfinite(value):
            return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return value

    def to_json(self, payload: Dict[str, Any]) -> str:
        return json.dumps(self._plain(self.convert_units(payload)), indent=2, sort_keys=True,
                          ensure_ascii=False) + "\n"

    def format_float(self, value: Any) -> str:
        if isinstance(value, bool) or not isinstance(value, (float, np.floating)):
            return str(value)
        return format(float(value), f".{self._config.significant_digits}g")

    def to_csv(self, rows: Iterable[Dict[str, Any]]) -> str:
        """CSV with columns in first-seen order, floats at the configured precision."""
        rows = [self.convert_units(r) for r in rows]
        columns: List[str] = []
        for r in rows:
            columns.extend(k for k in r if k not in columns)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow(["" if r.get(c) is None else self.format_float(r.get(c)) for c in columns])
        return buffer.getvalue()

    def envelope(self, command: str, config: Dict[str, Any], inputs: Dict[str, Any],
                 result: Any) -> Dict[str, Any]:
        """Result with its resolved configuration and input provenance."""
        return {
            "command": command,
            "config": config,
            "inputs": inputs,
            "units": self._config.units.value,
            "result": result,
            "metadata": {"tool": "privamp", "version": TOOL_VERSION},
        }

    def render(self, payload: Dict[str, Any], rows: Optional[List[Dict[str, Any]]] = None) -> str:
        if self._config.format == "csv":
            return self.to_csv(rows if rows is not None else [payload.get("result", {})])
        return self.to_json(payload)
