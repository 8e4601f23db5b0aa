"""Experiment configuration: a frozen dataclass tree, TOML loading, and
dotted-key overrides so every file key can also be set from the command
line. A canonical hash of the full configuration is stored in trained
models for provenance.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cuttlefish import CuttlefishConfig
from .elephant_herd import HerdConfig


def _weight_search_herd() -> HerdConfig:
    # weight vectors live in a tighter box than the generic optimizer
    # default: Gaussian hidden units saturate (activation ~ 0) once a
    # pre-activation passes ~3, which strands the global search
    return HerdConfig(bounds=(-1.0, 1.0))


def _selection_search() -> CuttlefishConfig:
    # lambda 0.1: strong enough to price a noise feature above its accuracy
    # contribution; weaker penalties let the mask swallow most predictors
    return CuttlefishConfig(generations=25, subset_penalty=0.1)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = ""
    outdir: str = "runs"
    seed: int = 7
    impute_k: int = 5
    folds: int = 10
    hidden: tuple[int, ...] = (8,)
    epochs: int = 120
    alpha_lr: float = 0.05
    feature_selection: bool = True
    weight_search: bool = True
    cuttlefish: CuttlefishConfig = field(default_factory=_selection_search)
    herd: HerdConfig = field(default_factory=_weight_search_herd)

    def to_dict(self) -> dict:
        return {
            "data": {
                "dataset": self.dataset,
                "outdir": self.outdir,
                "seed": self.seed,
                "impute_k": self.impute_k,
                "folds": self.folds,
            },
            "features": {
                "enabled": self.feature_selection,
                "population": self.cuttlefish.population,
                "generations": self.cuttlefish.generations,
                "delta": self.cuttlefish.delta,
                "threshold": self.cuttlefish.threshold,
                "lambda": self.cuttlefish.subset_penalty,
                "lower": self.cuttlefish.bounds[0],
                "upper": self.cuttlefish.bounds[1],
            },
            "network": {
                "hidden": list(self.hidden),
                "epochs": self.epochs,
                "alpha_lr": self.alpha_lr,
            },
            "weights": {
                "enabled": self.weight_search,
                "clans": self.herd.clans,
                "clan_size": self.herd.clan_size,
                "alpha": self.herd.alpha,
                "beta": self.herd.beta,
                "generations": self.herd.max_generations,
                "lower": self.herd.bounds[0],
                "upper": self.herd.bounds[1],
                "worst_count": self.herd.worst_count,
                "mutation_rate": self.herd.mutation_rate,
            },
        }


def config_hash(config: ExperimentConfig) -> str:
    """Hash of everything that can influence results; the output directory
    is excluded so relocating a run does not change its recorded identity."""
    payload = config.to_dict()
    payload["data"].pop("outdir", None)
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _from_sections(sections: dict) -> ExperimentConfig:
    data = sections.get("data", {})
    feats = sections.get("features", {})
    net = sections.get("network", {})
    wts = sections.get("weights", {})

    cuttle = CuttlefishConfig(
        population=int(feats.get("population", 20)),
        generations=int(feats.get("generations", 25)),
        delta=float(feats.get("delta", 4.0)),
        threshold=float(feats.get("threshold", 0.5)),
        subset_penalty=float(feats.get("lambda", 0.1)),
        bounds=(float(feats.get("lower", 0.0)), float(feats.get("upper", 1.0))),
    )
    herd = HerdConfig(
        clans=int(wts.get("clans", 3)),
        clan_size=int(wts.get("clan_size", 10)),
        alpha=float(wts.get("alpha", 0.5)),
        beta=float(wts.get("beta", 0.1)),
        max_generations=int(wts.get("generations", 50)),
        bounds=(float(wts.get("lower", -1.0)), float(wts.get("upper", 1.0))),
        worst_count=int(wts.get("worst_count", 1)),
        mutation_rate=float(wts.get("mutation_rate", 0.1)),
    )
    return ExperimentConfig(
        dataset=str(data.get("dataset", "")),
        outdir=str(data.get("outdir", "runs")),
        seed=int(data.get("seed", 7)),
        impute_k=int(data.get("impute_k", 5)),
        folds=int(data.get("folds", 10)),
        hidden=tuple(int(h) for h in net.get("hidden", [8])),
        epochs=int(net.get("epochs", 120)),
        alpha_lr=float(net.get("alpha_lr", 0.05)),
        feature_selection=bool(feats.get("enabled", True)),
        weight_search=bool(wts.get("enabled", True)),
        cuttlefish=cuttle,
        herd=herd,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        sections = tomllib.load(fh)
    return _from_sections(sections)


def _coerce(token: str):
    low = token.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def apply_overrides(
    config: ExperimentConfig, sets: list[str], seed: int | None = None
) -> ExperimentConfig:
    """Apply ``section.key=value`` overrides (same keys as the TOML file)
    plus an optional seed shortcut."""
    sections = config.to_dict()
    for item in sets:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ValueError(f"override {item!r} must look like section.key=value")
        dotted, raw = item.split("=", 1)
        section, key = dotted.split(".", 1)
        if section not in sections:
            raise ValueError(f"unknown config section {section!r}")
        if key not in sections[section]:
            raise ValueError(f"unknown config key {section}.{key}")
        if key == "hidden":
            sections[section][key] = [int(tok) for tok in raw.split(",") if tok]
        else:
            sections[section][key] = _coerce(raw)
    rebuilt = _from_sections(sections)
    if seed is not None:
        rebuilt = replace(rebuilt, seed=int(seed))
    return rebuilt
