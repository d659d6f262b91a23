"""On-disk cache of class lists, one JSON file per (coset, kind, primes)."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .cosets import Coset, coset_from_json
from .isometry import ClassIndex
from .neighbors import ClassList, class_list_from_json

CACHE_VERSION = "1"
ENV_VAR = "TERNARY_COSETS_CACHE"


def cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "ternary_cosets"


def cache_key(seed: Coset, kind: str, primes) -> str:
    # the seed's JSON form is what a cached list gets compared against after loading
    payload = json.dumps(
        {"coset": seed.key.decode(), "seed": seed.to_json(), "kind": kind, "primes": list(primes), "v": CACHE_VERSION},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def check_class_list(cl: ClassList) -> None:
    """Raise ValueError unless representatives are pairwise distinct classes with matching o+."""
    index = ClassIndex()
    seen = set()
    for rep, o in cl.representatives:
        info = index.locate(rep)
        if info.key in seen:
            raise ValueError("cached class list has properly isometric representatives")
        if info.o_plus != o:
            raise ValueError("cached o+ value is wrong")
        seen.add(info.key)


class ClassListCache:
    def __init__(self, directory: Path | None = None, enabled: bool = True):
        self.directory = Path(directory) if directory else cache_dir()
        self.enabled = enabled

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, seed: Coset, kind: str, primes) -> ClassList | None:
        if not self.enabled:
            return None
        path = self._path(cache_key(seed, kind, primes))
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if data.get("version") != CACHE_VERSION:
            return None
        try:
            cl = class_list_from_json(data["value"])
            check_class_list(cl)
        except (KeyError, ValueError, TypeError):
            return None
        return cl

    def put(self, seed: Coset, kind: str, primes, cl: ClassList) -> None:
        if not self.enabled:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(cache_key(seed, kind, primes))
        body = json.dumps({"version": CACHE_VERSION, "value": cl.to_json()}, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(body)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
