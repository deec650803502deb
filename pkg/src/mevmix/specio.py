"""Model-spec JSON documents.

General form::

    {"d": 2, "components": [
        {"alpha": 0.5, "beta": [0.6, 0.4], "copula": {"kind": "independence"}},
        {"alpha": 0.8, "beta": [0.4, 0.6], "copula": {"kind": "gumbel", "r": 0.7}}]}

Presets expand to the general form before validation:

* ``{"preset": "logistic", "d": 3, "alpha": 0.5}``
* ``{"preset": "generalized_archimedean", "d": 2, "alpha": 0.5, "copula": {...}}``
* ``{"preset": "asymmetric_logistic", "alphas": [...], "betas": [[...], ...]}``
* ``{"preset": "tawn", "d": 3, "subsets": [{"A": [1, 2], "alpha": 0.4, "beta": [0.5, 0.3]}, ...]}``
  (coordinates in ``A`` are 1-based)
* ``{"preset": "geometric_mean", "d": 2, "weights": [...], "alphas": [...], "copulas": [...]}``
* ``{"preset": "cuadras_auge", "beta1": 0.3}``
"""

from __future__ import annotations

import json
from pathlib import Path

from . import model as mdl
from .copulas import from_dict as copula_from_dict
from .errors import MevMixError, SpecError


def _need(doc: dict, key: str):
    if key not in doc:
        raise SpecError(f"model spec is missing {key!r}")
    return doc[key]


def _expand_preset(doc: dict) -> mdl.MevMixModel:
    preset = doc["preset"]
    if preset == "logistic":
        return mdl.make_logistic(int(_need(doc, "d")), _need(doc, "alpha"))
    if preset == "generalized_archimedean":
        d = int(_need(doc, "d"))
        return mdl.make_generalized_archimedean(_need(doc, "alpha"), copula_from_dict(_need(doc, "copula"), d))
    if preset == "asymmetric_logistic":
        return mdl.make_asymmetric_logistic(_need(doc, "alphas"), _need(doc, "betas"))
    if preset == "tawn":
        d = int(_need(doc, "d"))
        subsets = []
        for entry in _need(doc, "subsets"):
            coords = [int(i) - 1 for i in _need(entry, "A")]
            subsets.append((coords, _need(entry, "alpha"), _need(entry, "beta")))
        return mdl.make_tawn_model(subsets, d)
    if preset == "geometric_mean":
        d = int(_need(doc, "d"))
        copulas = [copula_from_dict(c, d) for c in _need(doc, "copulas")]
        return mdl.make_geometric_mean(_need(doc, "weights"), _need(doc, "alphas"), copulas)
    if preset == "cuadras_auge":
        return mdl.make_cuadras_auge(_need(doc, "beta1"), doc.get("alpha", 0.5))
    raise SpecError(f"unknown preset {preset!r}")


def model_from_dict(doc: dict) -> mdl.MevMixModel:
    """Build (but do not validate) a model from a parsed spec document."""
    if not isinstance(doc, dict):
        raise SpecError("model spec must be a JSON object")
    try:
        if "preset" in doc:
            return _expand_preset(doc)
        d = int(_need(doc, "d"))
        comps = []
        for k, c in enumerate(_need(doc, "components"), start=1):
            if not isinstance(c, dict):
                raise SpecError(f"component {k} must be an object")
            copula = copula_from_dict(_need(c, "copula"), d)
            comps.append(mdl.MixtureComponent(_need(c, "alpha"), _need(c, "beta"), copula))
        return mdl.MevMixModel(comps, d=d)
    except SpecError:
        raise
    except (MevMixError, TypeError, ValueError, KeyError) as exc:
        raise SpecError(str(exc)) from exc


def load_model(path) -> mdl.MevMixModel:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON ({exc})") from exc
    return model_from_dict(doc)


def model_to_dict(m: mdl.MevMixModel) -> dict:
    return m.to_dict()
