"""Narrative realization: templated locally, neural via the wire contract.

The templated path fills per-relation sentence templates and is fully
deterministic. The neural path POSTs the linearized graph to a serving
backend speaking the versioned ``t3/1`` contract and never rewrites the
returned text. A fallback mode degrades to templates when the backend is
down, tagging the narrative accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

from .decode import DecodingConfig
from .errors import (
    BackendError,
    BackendUnreachable,
    ContractViolation,
    NonFiniteValue,
    Timeout,
    UncoveredRelation,
)

WIRE_VERSION = "t3/1"
_MARKERS = ("<H>", "<R>", "<T>")


def verbalize_number(x: float, unit: str = "") -> str:
    """Magnitude-scaled rendering: 17500 -> '17.5 thousand', 8.02e7 -> '80.2 million'.

    Below a thousand the value keeps at most two decimals with trailing
    zeros trimmed. The unit, when given, is appended with a space.
    """
    if not math.isfinite(x):
        raise NonFiniteValue(f"cannot verbalize {x}")
    magnitude = abs(x)
    if magnitude >= 1e9:
        body = f"{x / 1e9:.1f} billion"
    elif magnitude >= 1e6:
        body = f"{x / 1e6:.1f} million"
    elif magnitude >= 1e3:
        body = f"{x / 1e3:.1f} thousand"
    else:
        body = f"{x:.2f}".rstrip("0").rstrip(".")
        if body in ("-0", ""):
            body = "0"
    return f"{body} {unit}".strip()


@dataclass(frozen=True)
class Narrative:
    text: str
    generator: str
    decoding: DecodingConfig | None = None
    model_id: str | None = None
    warning: str | None = None

    def __post_init__(self):
        if not self.text:
            raise ContractViolation("narrative text must be non-empty")
        if self.generator == "templated" and self.decoding is not None:
            raise ContractViolation("templated narratives carry no decoding config")
        for marker in _MARKERS:
            if marker in self.text:
                raise ContractViolation(f"narrative text contains marker {marker}")


@dataclass(frozen=True)
class TemplateSet:
    """Per-relation sentence templates for one domain.

    Placeholders: {head} and {tail} insert the triple fields verbatim;
    {Head} and {Tail} capitalize the first letter for sentence starts.
    """

    domain: str
    templates: dict

    def render(self, head: str, relation: str, tail: str) -> str:
        template = self.templates.get(relation)
        if template is None:
            raise UncoveredRelation(f"no template covers relation {relation!r}")
        return (
            template.replace("{head}", head)
            .replace("{tail}", tail)
            .replace("{Head}", head[:1].upper() + head[1:])
            .replace("{Tail}", tail[:1].upper() + tail[1:])
        )


def parse_template_text(domain: str, text: str) -> TemplateSet:
    """Parse 'relation = sentence template' lines; '#' starts a comment."""
    templates = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {line_no}: expected 'relation = template'")
        relation, template = line.split("=", 1)
        templates[relation.strip()] = template.strip()
    return TemplateSet(domain, templates)


_DOMAIN_KEYWORDS = (
    ("covid", "covid19"),
    ("export", "dots_exports"),
    ("pollution", "co_pollution"),
    ("population", "world_population"),
    ("temperature", "global_temperature"),
)


def select_domain(measure: str) -> str:
    lowered = measure.lower()
    for keyword, domain in _DOMAIN_KEYWORDS:
        if keyword in lowered:
            return domain
    return "generic"


def load_templates(domain: str = "generic") -> TemplateSet:
    """Load a packaged template set; unknown domains fall back to generic."""
    root = resources.files("tsnarrate") / "templates"
    candidate = root / f"{domain}.tmpl"
    if not candidate.is_file():
        domain = "generic"
        candidate = root / "generic.tmpl"
    return parse_template_text(domain, candidate.read_text(encoding="utf-8"))


def load_templates_from(path: str | Path, domain: str = "custom") -> TemplateSet:
    return parse_template_text(domain, Path(path).read_text(encoding="utf-8"))


def template_render(graph, templates: TemplateSet) -> Narrative:
    """Realize every triple as one sentence, in graph order."""
    sentences = [
        templates.render(t.head, t.relation, t.tail) for t in graph.triples
    ]
    return Narrative(text=" ".join(sentences), generator="templated")


def neural_narrate(
    graph,
    endpoint: str,
    decoding: DecodingConfig,
    timeout: float = 30.0,
) -> Narrative:
    """Request a narrative for the linearized graph from a t3/1 backend.

    The response text is used byte for byte; the backend's model id is
    echoed into the narrative. Raises on any transport or contract problem.
    """
    from .kg import linearize

    payload = {
        "version": WIRE_VERSION,
        "linearized": linearize(graph),
        "decoding": {
            "strategy": decoding.strategy,
            "k": decoding.k,
            "p": decoding.p,
            "seed": decoding.seed,
            "max_tokens": decoding.max_tokens,
        },
    }
    url = endpoint.rstrip("/") + "/narrate"
    try:
        response = requests.post(url, json=payload, timeout=timeout)
    except requests.Timeout as exc:
        raise Timeout(f"backend did not answer within {timeout}s") from exc
    except requests.ConnectionError as exc:
        raise BackendUnreachable(f"cannot reach backend at {endpoint}") from exc
    if response.status_code != 200:
        try:
            detail = response.json()
            message = str(detail.get("detail") or detail.get("error") or response.text)
        except ValueError:
            message = response.text
        raise BackendError(response.status_code, message)
    try:
        body = response.json()
    except ValueError as exc:
        raise ContractViolation("backend response is not valid JSON") from exc
    for field_name in ("version", "narrative", "model_id", "token_count"):
        if field_name not in body:
            raise ContractViolation(f"backend response missing {field_name!r}")
    if not isinstance(body["narrative"], str) or not body["narrative"]:
        raise ContractViolation("backend narrative must be a non-empty string")
    return Narrative(
        text=body["narrative"],
        generator="neural",
        decoding=decoding,
        model_id=str(body["model_id"]),
    )


def narrate(
    graph,
    mode: str = "templated",
    templates: TemplateSet | None = None,
    endpoint: str | None = None,
    decoding: DecodingConfig | None = None,
    timeout: float = 30.0,
) -> Narrative:
    """Orchestrate narrative generation for the requested mode.

    ``neural_with_fallback`` returns a templated narrative (tagged templated,
    with the failure recorded on the narrative) whenever the backend errs.
    """
    if mode not in ("templated", "neural", "neural_with_fallback"):
        raise ValueError(f"unknown narration mode {mode!r}")
    if mode == "templated":
        return template_render(graph, templates or load_templates())
    if endpoint is None:
        raise BackendUnreachable("no backend endpoint configured")
    decoding = decoding or DecodingConfig()
    try:
        return neural_narrate(graph, endpoint, decoding, timeout)
    except (BackendUnreachable, BackendError, Timeout, ContractViolation) as exc:
        if mode == "neural":
            raise
        fallback = template_render(graph, templates or load_templates())
        return Narrative(
            text=fallback.text,
            generator="templated",
            warning=f"backend failed, fell back to templates: "
                    f"{type(exc).__name__}: {exc}",
        )
