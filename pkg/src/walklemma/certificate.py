"""Plain-text certificate files.

A certificate records what automaton it belongs to (content hashes and the
automaton fingerprint), the activities it certifies, and one value per
class.  Lattice certificates also embed the filter pattern, so they can be
re-checked without any other input.

::

    walklemma-certificate 1
    kind lattice
    lattice square
    pattern_hash 1f...
    window none
    fingerprint 9a...
    classes 5
    lambda 0.10546779...
    pattern-begin
    lattice=square
    (0,0) (1,0)
    pattern-end
    values
    0 0.1171...
    ...
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = "walklemma-certificate 1"


class CertificateFormatError(ValueError):
    pass


class HashMismatch(ValueError):
    pass


@dataclass
class Certificate:
    kind: str  # "graph" or "lattice"
    fingerprint: str
    values: np.ndarray
    lam: float | None = None
    activities: list[float] | None = None
    header: dict = field(default_factory=dict)
    pattern_text: str | None = None

    @property
    def activity(self):
        return self.lam if self.activities is None else np.asarray(self.activities)

    def dumps(self) -> str:
        out = [MAGIC, f"kind {self.kind}"]
        for k, v in self.header.items():
            out.append(f"{k} {'none' if v is None else v}")
        out.append(f"fingerprint {self.fingerprint}")
        out.append(f"classes {len(self.values)}")
        if self.activities is not None:
            out.append("activities " + " ".join(repr(float(v)) for v in self.activities))
        else:
            out.append(f"lambda {float(self.lam)!r}")
        if self.pattern_text is not None:
            out.append("pattern-begin")
            out.extend(self.pattern_text.rstrip("\n").splitlines())
            out.append("pattern-end")
        out.append("values")
        out.extend(f"{c} {float(v)!r}" for c, v in enumerate(self.values))
        return "\n".join(out) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


def loads(text: str) -> Certificate:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise CertificateFormatError("not a certificate file")
    header: dict = {}
    pattern = None
    k = 1
    while k < len(lines) and lines[k].strip() != "values":
        line = lines[k].strip()
        if line == "pattern-begin":
            end = k + 1
            while end < len(lines) and lines[end].strip() != "pattern-end":
                end += 1
            if end == len(lines):
                raise CertificateFormatError("unterminated pattern block")
            pattern = "\n".join(lines[k + 1:end]) + "\n"
            k = end + 1
            continue
        if line:
            key, _, val = line.partition(" ")
            header[key] = val.strip()
        k += 1
    if k == len(lines):
        raise CertificateFormatError("missing values section")
    try:
        kind = header.pop("kind")
        fingerprint = header.pop("fingerprint")
        classes = int(header.pop("classes"))
    except (KeyError, ValueError):
        raise CertificateFormatError("missing kind, fingerprint or classes") from None
    values = np.full(classes, np.nan)
    for line in lines[k + 1:]:
        if not line.strip():
            continue
        parts = line.split()
        try:
            c, v = int(parts[0]), float(parts[1])
        except (ValueError, IndexError):
            raise CertificateFormatError(f"bad value line {line!r}") from None
        if not 0 <= c < classes or not np.isnan(values[c]):
            raise CertificateFormatError(f"bad or repeated class id {c}")
        values[c] = v
    if np.any(np.isnan(values)):
        raise CertificateFormatError("missing class values")
    lam = acts = None
    try:
        if "activities" in header:
            acts = [float(t) for t in header.pop("activities").split()]
        else:
            lam = float(header.pop("lambda"))
    except (KeyError, ValueError):
        raise CertificateFormatError("missing lambda or activities") from None
    header = {key: (None if v == "none" else v) for key, v in header.items()}
    return Certificate(kind, fingerprint, values, lam, acts, header, pattern)


def read(path: str | Path) -> Certificate:
    return loads(Path(path).read_text())
