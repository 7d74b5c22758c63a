"""Experiment configuration in a small INI dialect.

::

    [basis]
    m = 2,3,2,4,2,3      ; or a single radix repeated N times
    N = 6

    [weights]
    kinds = fejer; riesz; power:0.5; iterlog:1,1

    [experiment]
    seed = 0
    batch = 20
    samples = 10000
    p = 1/2, 1/3
    blocks = 3
    level = 3
    out =

Weight kinds are separated by ``;`` because iterated-log parameters use ``,``.
``fejer`` always means the Fejer means ``sigma_n``.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from fractions import Fraction

from .summability import parse_weight


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    m: tuple[int, ...] = (2,) * 12
    weights: tuple[str, ...] = ("fejer", "riesz", "power:0.5", "inverse_cesaro:0.5", "iterlog:1,1")
    p: tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1, 3))
    seed: int = 0
    batch: int = 20
    samples: int = 10_000
    blocks: int = 3
    level: int = 3
    out: str = ""

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if not m or min(m) < 2:
            raise ConfigError(f"radices must be >= 2, got {m}")
        object.__setattr__(self, "m", m)
        ws = tuple(str(w).strip() for w in self.weights)
        for w in ws:
            if w != "fejer":
                try:
                    parse_weight(w)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "p", tuple(Fraction(v) for v in self.p))
        if any(not 0 < v for v in self.p):
            raise ConfigError("p values must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        for name in ("batch", "samples", "blocks"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.level < 0:
            raise ConfigError("level must be >= 0")

    @property
    def N(self) -> int:
        return len(self.m)

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        uniform = len(set(self.m)) == 1
        cp["basis"] = {"m": str(self.m[0]) if uniform else ",".join(map(str, self.m)),
                       "N": str(self.N)}
        cp["weights"] = {"kinds": "; ".join(self.weights)}
        cp["experiment"] = {"seed": str(self.seed), "batch": str(self.batch),
                            "samples": str(self.samples),
                            "p": ", ".join(str(v) for v in self.p),
                            "blocks": str(self.blocks), "level": str(self.level),
                            "out": self.out}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def replace(self, **kw) -> "ExperimentConfig":
        vals = {k: getattr(self, k) for k in ("m", "weights", "p", "seed", "batch",
                                               "samples", "blocks", "level", "out")}
        vals.update(kw)
        return ExperimentConfig(**vals)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    # ';' separates weight kinds, so only '#' starts inline comments there
    cp_kinds = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
        cp_kinds.read_string(text)
        unknown = set(cp.sections()) - {"basis", "weights", "experiment"}
        if unknown:
            raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
        kw = {}
        if cp.has_section("basis"):
            sec = cp["basis"]
            m = _ints(sec.get("m", "2"))
            if "N" in sec or "n" in sec:
                N = int(sec.get("N"))
                if len(m) == 1:
                    m = m * N
                elif len(m) != N:
                    raise ConfigError(f"N = {N} but {len(m)} radices given")
            kw["m"] = m
        if cp_kinds.has_section("weights"):
            kinds = cp_kinds["weights"].get("kinds", "")
            kw["weights"] = tuple(k.strip() for k in kinds.split(";") if k.strip())
        if cp.has_section("experiment"):
            sec = cp["experiment"]
            for name in ("seed", "batch", "samples", "blocks", "level"):
                if name in sec:
                    kw[name] = int(sec[name])
            if "p" in sec:
                kw["p"] = tuple(Fraction(v.strip()) for v in sec["p"].split(",") if v.strip())
            if "out" in sec:
                kw["out"] = sec["out"].strip()
        return ExperimentConfig(**kw)
    except ConfigError:
        raise
    except (configparser.Error, ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"bad config: {exc}") from None


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
