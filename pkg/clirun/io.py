"""
Atomic file output and JSON document loading for the command line
"""

import json
import os
import tempfile
import numpy as np
from pathlib import Path
from typing import Union
from config.settings import TNCORE_CONFIG
from equivar.basis import EquivariantBasis, basis_from_dict
from invgen.generators import GeneratorSet, generator_set_from_dict
from utils.errors import NetworkFormatError
from utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """
    Write text through a temporary file in the target directory, then rename

    Readers never observe a partially written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {path}")
    return path


def atomic_write_json(path: PathLike, doc: dict) -> Path:
    return atomic_write_text(path, json.dumps(doc, indent=TNCORE_CONFIG['json_indent']) + '\n')


def tensor_document(t: np.ndarray, **meta) -> dict:
    """{"shape": [...], "data": [...row-major...]} plus metadata such as l"""
    t = np.asarray(t, dtype=np.float64)
    return dict(meta, shape=list(t.shape), data=t.ravel().tolist())


def read_json(path: PathLike) -> dict:
    """
    Raises:
        OSError: the file cannot be read
        NetworkFormatError: the file is not a JSON object
    """
    with open(path, 'r', encoding='utf-8') as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise NetworkFormatError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise NetworkFormatError(f"{path} does not hold a JSON object")
    return doc


def load_document(path: PathLike) -> Union[GeneratorSet, EquivariantBasis]:
    """
    Read a GeneratorSet or EquivariantBasis file, dispatching on its "kind"

    Documents without a kind are recognized by their "generators" or
    "elements" list.

    Raises:
        NetworkFormatError: unknown kind or malformed content
    """
    doc = read_json(path)
    kind = doc.get('kind')
    if kind == 'generator_set' or (kind is None and 'generators' in doc):
        return generator_set_from_dict(doc)
    if kind == 'equivariant_basis' or (kind is None and 'elements' in doc):
        return basis_from_dict(doc)
    raise NetworkFormatError(f"{path}: unknown document kind {kind!r}")
