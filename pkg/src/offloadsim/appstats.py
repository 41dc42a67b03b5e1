"""Corpus statistics for app package overlap and dedup storage savings.

An app corpus records, per app, its dex size and a package-path to
class-count map. Overlap is judged on package-name prefixes of a chosen
depth N: a prefix present in two or more apps marks those classes as
shared. Obfuscated packages (any single-letter segment) and packages
shallower than N can never match across apps, so their classes count as
app-private.

Corpus line format (tab separated)::

    app_id<TAB>dex_size_bytes<TAB>com.foo.bar=12;com.foo.util=3

Savings model: keeping one copy per shared prefix group (the copy priced at
the sharer with the largest per-class size) against the naive sum of all
dex sizes.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path


class CorpusError(ValueError):
    """Raised for malformed corpus input."""


@dataclass
class AppRecord:
    """One app: identifier, dex size, and per-package class counts."""

    app_id: str
    dex_size_bytes: int
    packages: dict[str, int] = field(default_factory=dict)

    def total_classes(self) -> int:
        return sum(self.packages.values())

    def per_class_size(self) -> float:
        total = self.total_classes()
        if total == 0:
            raise CorpusError(f"app {self.app_id!r} declares zero classes")
        return self.dex_size_bytes / total


@dataclass
class Corpus:
    apps: list[AppRecord] = field(default_factory=list)

    def __post_init__(self):
        seen: set[str] = set()
        for app in self.apps:
            if app.app_id in seen:
                raise CorpusError(f"duplicate app id {app.app_id!r}")
            seen.add(app.app_id)


def parse_corpus(source) -> Corpus:
    """Read the tab-separated corpus format from a path or literal text."""
    if hasattr(source, "read_text"):
        text = source.read_text()
    else:
        text = str(source)
        if "\t" not in text and "\n" not in text:
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise CorpusError(f"cannot read corpus {source}: {exc}") from exc
    apps: list[AppRecord] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusError(
                f"line {line_no}: expected 'app_id<TAB>dex_size<TAB>packages', got {raw!r}"
            )
        app_id, size_text, pkg_text = parts
        if not app_id:
            raise CorpusError(f"line {line_no}: empty app id")
        try:
            dex_size = int(size_text)
        except ValueError:
            raise CorpusError(f"line {line_no}: dex size {size_text!r} is not an integer") from None
        if dex_size < 0:
            raise CorpusError(f"line {line_no}: dex size must be non-negative")
        packages: dict[str, int] = {}
        if pkg_text:
            for chunk in pkg_text.split(";"):
                if not chunk:
                    raise CorpusError(f"line {line_no}: empty package entry")
                if "=" not in chunk:
                    raise CorpusError(
                        f"line {line_no}: package entry {chunk!r} lacks '=count'"
                    )
                pkg, _, count_text = chunk.partition("=")
                if not pkg:
                    raise CorpusError(f"line {line_no}: empty package path")
                try:
                    count = int(count_text)
                except ValueError:
                    raise CorpusError(
                        f"line {line_no}: class count {count_text!r} is not an integer"
                    ) from None
                if count < 1:
                    raise CorpusError(f"line {line_no}: class count must be at least 1")
                if pkg in packages:
                    raise CorpusError(f"line {line_no}: duplicate package {pkg!r}")
                packages[pkg] = count
        apps.append(AppRecord(app_id=app_id, dex_size_bytes=dex_size, packages=packages))
    return Corpus(apps=apps)


def write_corpus(corpus: Corpus, path) -> None:
    lines = []
    for app in corpus.apps:
        pkgs = ";".join(f"{p}={c}" for p, c in sorted(app.packages.items()))
        lines.append(f"{app.app_id}\t{app.dex_size_bytes}\t{pkgs}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def is_obfuscated_package(path: str, single_letter_range: bool = False) -> bool:
    """A package is considered obfuscated when any segment is one character.

    With ``single_letter_range`` only letters a through p count (the typical
    minifier alphabet); off by default.
    """
    for segment in path.split("."):
        if len(segment) == 1:
            if not single_letter_range or "a" <= segment <= "p":
                return True
    return False


def _prefix(path: str, depth: int) -> str | None:
    """First ``depth`` segments, or None when the path is too shallow."""
    segments = path.split(".")
    if len(segments) < depth:
        return None
    return ".".join(segments[:depth])


@dataclass
class OverlapReport:
    """Corpus-level overlap summary at one prefix depth.

    Unique fractions are percentages (0..100); savings is a fraction (0..1).
    """

    depth: int
    per_app_unique_fraction: dict[str, float]
    mean_unique_fraction: float
    median_unique_fraction: float
    storage_savings: float


def _shared_prefixes(corpus: Corpus, depth: int) -> dict[str, list[str]]:
    """Prefix -> sorted app ids containing it (only prefixes in 2+ apps)."""
    holders: dict[str, set[str]] = {}
    for app in corpus.apps:
        for pkg in app.packages:
            if is_obfuscated_package(pkg):
                continue
            pre = _prefix(pkg, depth)
            if pre is None:
                continue
            holders.setdefault(pre, set()).add(app.app_id)
    return {p: sorted(a) for p, a in sorted(holders.items()) if len(a) >= 2}


def unique_class_fraction(corpus: Corpus, depth: int) -> OverlapReport:
    """Percentage of each app's classes that no other app shares at
    prefix depth N, plus the corpus storage savings at that depth."""
    if depth < 1:
        raise CorpusError("prefix depth must be at least 1")
    if not corpus.apps:
        raise CorpusError("corpus holds no apps")
    shared = _shared_prefixes(corpus, depth)
    per_app: dict[str, float] = {}
    for app in corpus.apps:
        total = app.total_classes()
        if total == 0:
            per_app[app.app_id] = 100.0
            continue
        unique = 0
        for pkg, count in app.packages.items():
            pre = None
            if not is_obfuscated_package(pkg):
                pre = _prefix(pkg, depth)
            if pre is None or pre not in shared:
                unique += count
        per_app[app.app_id] = 100.0 * unique / total
    values = list(per_app.values())
    return OverlapReport(
        depth=depth,
        per_app_unique_fraction=per_app,
        mean_unique_fraction=statistics.fmean(values),
        median_unique_fraction=statistics.median(values),
        storage_savings=storage_savings(corpus, depth),
    )


def storage_savings(corpus: Corpus, depth: int) -> float:
    """Fraction of total dex bytes saved by deduplicating shared prefixes.

    Every app must declare at least one class (sizes are prorated per
    class). For each shared prefix group exactly one copy is kept, priced
    at the holder with the largest per-class size (ties prefer the larger
    class count, then the smallest app id).
    """
    if depth < 1:
        raise CorpusError("prefix depth must be at least 1")
    if not corpus.apps:
        raise CorpusError("corpus holds no apps")
    sizes = {app.app_id: app.per_class_size() for app in corpus.apps}
    naive = float(sum(app.dex_size_bytes for app in corpus.apps))
    if naive == 0.0:
        return 0.0
    shared = _shared_prefixes(corpus, depth)

    dedup = 0.0
    shared_counts: dict[tuple[str, str], int] = {}
    for app in corpus.apps:
        unique_classes = 0
        for pkg, count in app.packages.items():
            pre = None
            if not is_obfuscated_package(pkg):
                pre = _prefix(pkg, depth)
            if pre is not None and pre in shared:
                key = (pre, app.app_id)
                shared_counts[key] = shared_counts.get(key, 0) + count
            else:
                unique_classes += count
        dedup += unique_classes * sizes[app.app_id]
    for pre, holders in shared.items():
        # Largest per-class size wins, then larger count; max() keeps the
        # first (smallest id) of remaining ties since holders are sorted.
        best_id = max(
            holders, key=lambda a: (sizes[a], shared_counts.get((pre, a), 0))
        )
        dedup += shared_counts.get((pre, best_id), 0) * sizes[best_id]
    saving = 1.0 - dedup / naive
    return saving if saving > 0.0 else 0.0


#: Library paths used when synth_corpus gets no explicit pool.
DEFAULT_LIBRARY_POOL = [
    ("com.google.gms.ads.internal", 420),
    ("com.google.gms.common.util", 160),
    ("com.squareup.okhttp.internal", 310),
    ("com.squareup.okio.core", 90),
    ("com.fasterxml.jackson.databind", 540),
    ("org.apache.commons.lang", 220),
    ("io.reactivex.internal.operators", 380),
    ("com.bumptech.glide.load", 270),
    ("retrofit2.converter.gson", 60),
    ("androidx.appcompat.widget", 480),
]


@dataclass(frozen=True)
class LibrarySpec:
    """A shareable library package for corpus synthesis."""

    path: str
    class_count: int


@dataclass
class SynthCorpus:
    """Synthetic corpus plus its planted ground truth."""

    corpus: Corpus
    placements: dict[str, list[str]]  # library path -> sorted holder app ids


def synth_corpus(
    n_apps: int,
    library_pool: list[LibrarySpec] | None = None,
    inclusion_prob: float = 0.35,
    private_packages: int = 4,
    obfuscated_packages: int = 1,
    seed=0,
) -> SynthCorpus:
    """Generate a corpus with known shared-library structure.

    Each app draws every pool library independently with
    ``inclusion_prob``, then adds deep app-private packages and optionally
    obfuscated ones. Same seed, same corpus.
    """
    if n_apps < 1:
        raise CorpusError("need at least one app")
    if not 0.0 <= inclusion_prob <= 1.0:
        raise CorpusError("inclusion probability must lie in [0, 1]")
    if library_pool is None:
        library_pool = [LibrarySpec(p, c) for p, c in DEFAULT_LIBRARY_POOL]
    rng = random.Random(f"{seed}|corpus")
    apps: list[AppRecord] = []
    placements: dict[str, list[str]] = {lib.path: [] for lib in library_pool}
    for i in range(n_apps):
        app_id = f"app{i:04d}"
        packages: dict[str, int] = {}
        for lib in library_pool:
            if rng.random() < inclusion_prob:
                packages[lib.path] = lib.class_count
                placements[lib.path].append(app_id)
        for j in range(private_packages):
            depth_extra = rng.randrange(3)
            pkg = f"com.vendor{i:04d}.app.feature{j}"
            for extra in range(depth_extra):
                pkg += f".part{extra}"
            packages[pkg] = rng.randint(5, 60)
        for j in range(obfuscated_packages):
            seg1 = chr(ord("a") + (i + j) % 16)
            seg2 = chr(ord("a") + (i * 7 + j * 3) % 16)
            packages[f"{seg1}.{seg2}.impl{i}_{j}"] = rng.randint(10, 80)
        bytes_per_class = rng.randint(280, 900)
        total = sum(packages.values())
        apps.append(
            AppRecord(
                app_id=app_id,
                dex_size_bytes=total * bytes_per_class,
                packages=packages,
            )
        )
    placements = {p: sorted(a) for p, a in placements.items()}
    return SynthCorpus(corpus=Corpus(apps=apps), placements=placements)


__all__ = [
    "AppRecord",
    "Corpus",
    "CorpusError",
    "DEFAULT_LIBRARY_POOL",
    "LibrarySpec",
    "OverlapReport",
    "SynthCorpus",
    "is_obfuscated_package",
    "parse_corpus",
    "storage_savings",
    "synth_corpus",
    "unique_class_fraction",
    "write_corpus",
]
