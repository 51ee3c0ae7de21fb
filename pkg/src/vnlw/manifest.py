"""Persisted index of everything a run wrote.

A manifest records the configuration digest, the code version, the RNG
provenance (mixing function and master seed), the wall-clock cost, and
one line per artifact with its byte length.  ``verify_manifest`` checks
completeness in both directions: every listed file exists with the
recorded length, and every file in the directory is listed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .seeding import MIXER_NAME

__all__ = [
    "ArtifactRecord",
    "OutputManifest",
    "ManifestError",
    "MANIFEST_NAME",
    "scan_artifacts",
    "build_manifest",
    "write_manifest",
    "read_manifest",
    "verify_manifest",
]

MANIFEST_NAME = "manifest.txt"


class ManifestError(ValueError):
    """Malformed manifest text or a failed completeness check."""


@dataclass(frozen=True)
class ArtifactRecord:
    path: str
    n_bytes: int


@dataclass(frozen=True)
class OutputManifest:
    config_digest: str
    code_version: str
    mixer: str
    master_seed: int
    wall_clock_seconds: float
    complete: bool
    artifacts: tuple[ArtifactRecord, ...]


def scan_artifacts(directory: str | Path) -> tuple[ArtifactRecord, ...]:
    """List every regular file under the directory except the manifest.

    Paths are directory-relative with '/' separators and sorted, so the
    listing is deterministic across platforms and traversal orders.
    """
    root = Path(directory)
    records = []
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.name != MANIFEST_NAME:
            rel = path.relative_to(root).as_posix()
            records.append(ArtifactRecord(rel, path.stat().st_size))
    return tuple(records)


def build_manifest(config_digest: str, code_version: str, master_seed: int,
                   wall_clock_seconds: float, directory: str | Path,
                   complete: bool = True) -> OutputManifest:
    return OutputManifest(
        config_digest=config_digest,
        code_version=code_version,
        mixer=MIXER_NAME,
        master_seed=int(master_seed),
        wall_clock_seconds=float(wall_clock_seconds),
        complete=bool(complete),
        artifacts=scan_artifacts(directory),
    )


def write_manifest(manifest: OutputManifest, directory: str | Path) -> Path:
    """Render the manifest as text; the wall-clock line is written last
    so that the run-identifying prefix is stable across reruns."""
    lines = [
        f"config_digest = {manifest.config_digest}",
        f"code_version = {manifest.code_version}",
        f"mixer = {manifest.mixer}",
        f"master_seed = {manifest.master_seed}",
        f"complete = {'true' if manifest.complete else 'false'}",
    ]
    for record in manifest.artifacts:
        lines.append(f"artifact = {record.n_bytes} {record.path}")
    lines.append(f"wall_clock_seconds = {manifest.wall_clock_seconds!r}")
    path = Path(directory) / MANIFEST_NAME
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_manifest(path: str | Path) -> OutputManifest:
    fields: dict[str, str] = {}
    artifacts: list[ArtifactRecord] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(),
                                 start=1):
        line = raw.strip()
        if not line:
            continue
        key, sep, body = line.partition(" = ")
        if not sep:
            raise ManifestError(f"line {lineno}: expected 'key = value'")
        if key == "artifact":
            size_text, _, rel = body.partition(" ")
            try:
                artifacts.append(ArtifactRecord(rel, int(size_text)))
            except ValueError as exc:
                raise ManifestError(f"line {lineno}: bad artifact entry ({exc})") from exc
        else:
            fields[key] = body
    try:
        return OutputManifest(
            config_digest=fields["config_digest"],
            code_version=fields["code_version"],
            mixer=fields["mixer"],
            master_seed=int(fields["master_seed"]),
            wall_clock_seconds=float(fields["wall_clock_seconds"]),
            complete=fields.get("complete", "true") == "true",
            artifacts=tuple(artifacts),
        )
    except KeyError as exc:
        raise ManifestError(f"manifest missing field {exc.args[0]!r}") from exc


def verify_manifest(directory: str | Path) -> list[str]:
    """Return completeness problems (empty list when the index is exact)."""
    root = Path(directory)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.exists():
        return [f"missing {MANIFEST_NAME} in {root}"]
    manifest = read_manifest(manifest_path)
    problems = []
    listed = {record.path: record.n_bytes for record in manifest.artifacts}
    for rel, size in listed.items():
        path = root / rel
        if not path.is_file():
            problems.append(f"listed artifact missing: {rel}")
        elif path.stat().st_size != size:
            problems.append(
                f"size mismatch for {rel}: listed {size}, found {path.stat().st_size}"
            )
    for record in scan_artifacts(root):
        if record.path not in listed:
            problems.append(f"unlisted file present: {record.path}")
    return problems
