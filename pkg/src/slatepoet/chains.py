"""Mode-specific two-stage prompt chains.

Each mode owns a pair of templates. Stage 1 exemplifies the mode's
behavior on the poem; stage 2 condenses or reshapes stage 1's output
(the condensed text is what the slate displays). Three modes carry a
5-15 word target on stage 2; analogy deliberately has none. Template
texts are frozen and must not be edited casually: the fidelity tests
pin them byte-for-byte.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Mapping, Protocol

from .errors import ChainError, TemplateError
from .vocabulary import Mode

__all__ = [
    "PromptTemplate",
    "ChainSpec",
    "ChainResult",
    "CHAIN_SPECS",
    "LENGTH_LIMITED_MODES",
    "render",
    "validate_length",
    "run_chain",
]

_PLACEHOLDER = re.compile(r"\{(\w+)\}")


class CompletionBackend(Protocol):
    identifier: str

    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class PromptTemplate:
    text: str

    @property
    def placeholders(self) -> set[str]:
        return set(_PLACEHOLDER.findall(self.text))


@dataclass(frozen=True)
class ChainSpec:
    mode: Mode
    prompt1: PromptTemplate
    prompt2: PromptTemplate

    def __post_init__(self):
        if "poem" not in self.prompt1.placeholders:
            raise ValueError(f"{self.mode.value} stage-1 template must use {{poem}}")
        if "response" not in self.prompt2.placeholders:
            raise ValueError(f"{self.mode.value} stage-2 template must use {{response}}")


CHAIN_SPECS: dict[Mode, ChainSpec] = {
    Mode.INTERPRET: ChainSpec(
        mode=Mode.INTERPRET,
        prompt1=PromptTemplate(
            "I just wrote the following text: {poem}. Speculate on what I'm feeling "
            "when writing this. Please keep the interpretation short (2-3 sentences)."
        ),
        prompt2=PromptTemplate("Summarise this: {response} in only 5-15 words."),
    ),
    Mode.COLLABORATE: ChainSpec(
        mode=Mode.COLLABORATE,
        prompt1=PromptTemplate(
            "Select words from the following text: {poem} to form a question that the "
            "text seems to be asking or addressing. Then, use other words from the "
            "text to answer it (2-3 sentences)."
        ),
        prompt2=PromptTemplate("Summarise this: {response} in only 5-15 words."),
    ),
    Mode.IDEATE: ChainSpec(
        mode=Mode.IDEATE,
        prompt1=PromptTemplate(
            "The user just input the following text: {poem} Try and develop a creative "
            "idea or strategy that builds upon similarities between these words/concepts "
            "presented. Please keep your response short (2-3 sentences)."
        ),
        prompt2=PromptTemplate("Reword your answer here: {response} in only 5-15 words."),
    ),
    Mode.ANALOGY: ChainSpec(
        mode=Mode.ANALOGY,
        prompt1=PromptTemplate(
            "Reframe this the following text with reference to a different discipline: {poem}"
        ),
        prompt2=PromptTemplate("Repeat the following: {response} except obscure it further."),
    ),
}

# Modes whose stage-2 output should land in the 5-15 word band.
LENGTH_LIMITED_MODES = frozenset({Mode.INTERPRET, Mode.COLLABORATE, Mode.IDEATE})
LENGTH_BAND = (5, 15)


def render(template: PromptTemplate, bindings: Mapping[str, str]) -> str:
    """Exact placeholder substitution; nothing else is transformed.

    Every placeholder in the template must be bound (extra binding keys
    are ignored). Substitution is single-pass, so a bound value that
    happens to contain ``{poem}`` is inserted literally.
    """
    missing = template.placeholders - set(bindings)
    if missing:
        raise TemplateError(f"missing bindings for {sorted(missing)}")
    return _PLACEHOLDER.sub(lambda m: str(bindings[m.group(1)]), template.text)


def validate_length(stage2_text: str, mode: Mode) -> bool:
    """True when the response falls outside the mode's word band (warning only).

    Counts whitespace-delimited tokens; analogy is exempt.
    """
    if mode not in LENGTH_LIMITED_MODES:
        return False
    lo, hi = LENGTH_BAND
    n = len(stage2_text.split())
    return not (lo <= n <= hi)


@dataclass(frozen=True)
class ChainResult:
    poem: str
    mode: Mode
    stage1_text: str
    stage2_text: str
    stage1_latency_ms: float
    stage2_latency_ms: float
    backend: str
    length_warning: bool

    @property
    def total_latency_ms(self) -> float:
        return self.stage1_latency_ms + self.stage2_latency_ms


def _complete_stage(backend: CompletionBackend, prompt: str, stage: int) -> tuple[str, float]:
    t0 = time.perf_counter()
    try:
        text = backend.complete(prompt)
    except ChainError:
        raise
    except Exception as exc:
        raise ChainError(f"stage {stage} completion failed: {exc}", stage=stage) from exc
    latency_ms = (time.perf_counter() - t0) * 1000.0
    if not text or not text.strip():
        raise ChainError(f"stage {stage} returned an empty completion", stage=stage)
    return text, latency_ms


def run_chain(
    mode: Mode,
    poem: str,
    backend: CompletionBackend,
    specs: Mapping[Mode, ChainSpec] = CHAIN_SPECS,
) -> ChainResult:
    """Run the two-stage chain for ``mode``: stage 2 always embeds stage 1's full output."""
    if not poem:
        raise ValueError("poem must be non-empty")
    spec = specs[mode]
    stage1_text, lat1 = _complete_stage(backend, render(spec.prompt1, {"poem": poem}), stage=1)
    stage2_text, lat2 = _complete_stage(
        backend, render(spec.prompt2, {"response": stage1_text}), stage=2
    )
    return ChainResult(
        poem=poem,
        mode=mode,
        stage1_text=stage1_text,
        stage2_text=stage2_text,
        stage1_latency_ms=lat1,
        stage2_latency_ms=lat2,
        backend=backend.identifier,
        length_warning=validate_length(stage2_text, mode),
    )
