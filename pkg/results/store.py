"""
Result Store
Output directory layout, the run lock, file manifests and the result cache.

Layout under the output directory:
    <experiment>/...          emitted CSV, JSON and plot files
    .cache/<key>/...          cached copies plus manifest.json
    .speclab.lock             held while a run writes
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Union
import hashlib
import json
import logging
import os
import shutil

from utils.errors import LockError, OutputError
from utils.formatting import dumps

logger = logging.getLogger(__name__)

LOCK_NAME = ".speclab.lock"
CACHE_DIR = ".cache"
MANIFEST_NAME = "manifest.json"
CACHED_REPORT = "cached_report.json"


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class ResultStore:
    """Owns one output directory."""

    def __init__(self, output_dir: Union[str, Path]):
        """
        Initialize the store.

        Args:
            output_dir: Root directory for all experiments
        """
        self.root = Path(output_dir)

    @property
    def lock_path(self) -> Path:
        return self.root / LOCK_NAME

    @property
    def cache_root(self) -> Path:
        return self.root / CACHE_DIR

    def _mkdir(self, path: Path) -> Path:
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputError(str(path), f"Cannot create directory {path}: {e.strerror or e}") from e
        return path

    def experiment_dir(self, name: str) -> Path:
        return self._mkdir(self.root / name)

    @contextmanager
    def lock(self) -> Iterator[Path]:
        """Hold the output-directory lock; a second holder gets LockError."""
        self._mkdir(self.root)
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as e:
            raise LockError(str(self.lock_path)) from e
        except OSError as e:
            raise OutputError(str(self.lock_path), f"Cannot create lock file: {e.strerror or e}") from e
        try:
            os.write(fd, str(os.getpid()).encode("ascii"))
            os.close(fd)
            yield self.lock_path
        finally:
            try:
                self.lock_path.unlink()
            except FileNotFoundError:
                pass

    def build_manifest(self, directory: Path, files: Sequence[Path]) -> List[Dict[str, Any]]:
        """One entry (relative path, sha256, size) per file."""
        manifest = []
        for path in files:
            path = Path(path)
            manifest.append({
                "path": path.relative_to(directory).as_posix(),
                "sha256": file_sha256(path),
                "bytes": path.stat().st_size,
            })
        return manifest

    def write_manifest(self, directory: Path, files: Sequence[Path]) -> List[Dict[str, Any]]:
        manifest = self.build_manifest(directory, files)
        self._write(directory / MANIFEST_NAME, dumps(manifest) + "\n")
        return manifest

    @staticmethod
    def verify_manifest(directory: Path, manifest: Sequence[Dict[str, Any]]) -> List[str]:
        """Relative paths that are missing or whose hash differs."""
        bad = []
        for entry in manifest:
            path = Path(directory) / entry["path"]
            if not path.is_file() or file_sha256(path) != entry["sha256"]:
                bad.append(entry["path"])
        return bad

    def _write(self, path: Path, text: str) -> None:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            raise OutputError(str(path), f"Cannot write {path}: {e.strerror or e}") from e

    def load_cached(self, key: str, target: Path) -> Optional[Dict[str, Any]]:
        """
        Restore a cache entry into target.

        Returns:
            The cached report, or None on a miss or a hash mismatch
            (mismatches are logged as warnings and treated as misses)
        """
        entry = self.cache_root / key
        manifest_path = entry / MANIFEST_NAME
        if not manifest_path.is_file():
            return None
        try:
            with open(manifest_path, "r", encoding="utf-8") as f:
                manifest = json.load(f)
            with open(entry / CACHED_REPORT, "r", encoding="utf-8") as f:
                report = json.load(f)
        except (OSError, ValueError) as e:
            logger.warning(f"Ignoring unreadable cache entry {key}: {e}")
            return None

        bad = self.verify_manifest(entry, manifest)
        if bad:
            logger.warning(f"Cache entry {key} failed hash verification ({', '.join(bad)}); recomputing")
            return None

        self._mkdir(target)
        try:
            for item in manifest:
                shutil.copyfile(entry / item["path"], target / item["path"])
            shutil.copyfile(manifest_path, target / MANIFEST_NAME)
        except OSError as e:
            raise OutputError(str(target), f"Cannot restore cached results: {e.strerror or e}") from e
        logger.info(f"Cache hit {key}: restored {len(manifest)} files into {target}")
        report["files"] = manifest
        return report

    def save_cache(self, key: str, directory: Path, manifest: Sequence[Dict[str, Any]],
                   report: Dict[str, Any]) -> Path:
        """Copy the emitted files and the report into the cache entry for key."""
        entry = self.cache_root / key
        if entry.exists():
            shutil.rmtree(entry)
        self._mkdir(entry)
        try:
            for item in manifest:
                shutil.copyfile(directory / item["path"], entry / item["path"])
        except OSError as e:
            raise OutputError(str(entry), f"Cannot populate cache: {e.strerror or e}") from e
        self._write(entry / MANIFEST_NAME, dumps(list(manifest)) + "\n")
        self._write(entry / CACHED_REPORT, dumps(report) + "\n")
        logger.debug(f"Cached {len(manifest)} files under {entry}")
        return entry

    def clean_cache(self) -> int:
        """Delete every cache entry; returns the number removed."""
        if not self.cache_root.is_dir():
            return 0
        entries = [p for p in self.cache_root.iterdir() if p.is_dir()]
        for entry in entries:
            shutil.rmtree(entry)
        logger.info(f"Removed {len(entries)} cache entries from {self.cache_root}")
        return len(entries)
