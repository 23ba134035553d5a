"""Stage manifest: records what each stage consumed and produced.

One TSV line per stage: name, input digest, seed, duration, and the output
files with their hashes. A stage is skipped when its recorded input digest
matches the current inputs and all recorded outputs still hash the same;
an output that exists but no longer matches its recorded hash raises
ManifestConflict rather than being silently overwritten or trusted.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import DataError


class ManifestConflict(DataError):
    pass


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def digest_inputs(files: dict[str, Path], params: dict) -> str:
    """Stable digest over named input files and stage parameters."""
    h = hashlib.sha256()
    for name in sorted(files):
        h.update(name.encode())
        h.update(file_sha256(files[name]).encode())
    for key in sorted(params):
        h.update(f"{key}={params[key]!r}".encode())
    return h.hexdigest()


class Manifest:
    def __init__(self, path):
        self.path = Path(path)
        self.entries: dict[str, dict] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 5:
                    raise DataError(f"{self.path}: malformed manifest line {line!r}")
                stage, digest, seed, duration, outputs = fields
                out_map = {}
                if outputs:
                    for item in outputs.split(";"):
                        rel, _, sha = item.rpartition(":")
                        out_map[rel] = sha
                self.entries[stage] = {
                    "digest": digest,
                    "seed": int(seed),
                    "duration": float(duration),
                    "outputs": out_map,
                }

    def _save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as fh:
            fh.write("# stage\tinputs\tseed\tduration\toutputs\n")
            for stage in sorted(self.entries):
                e = self.entries[stage]
                outputs = ";".join(
                    f"{rel}:{sha}" for rel, sha in sorted(e["outputs"].items())
                )
                fh.write(
                    f"{stage}\t{e['digest']}\t{e['seed']}\t{e['duration']:.3f}\t{outputs}\n"
                )

    def is_current(self, stage: str, digest: str, out_root: Path) -> bool:
        """True when the stage ran on identical inputs and its outputs are intact."""
        entry = self.entries.get(stage)
        if entry is None or entry["digest"] != digest:
            return False
        for rel, sha in entry["outputs"].items():
            path = out_root / rel
            if not path.exists():
                return False
            if file_sha256(path) != sha:
                raise ManifestConflict(
                    f"{path} changed since stage {stage!r} recorded it; "
                    "delete it (or the manifest) to regenerate"
                )
        return True

    def record(self, stage: str, digest: str, seed: int, duration: float,
               outputs: list[Path], out_root: Path) -> None:
        self.entries[stage] = {
            "digest": digest,
            "seed": seed,
            "duration": duration,
            "outputs": {
                str(p.relative_to(out_root)): file_sha256(p) for p in outputs
            },
        }
        self._save()
