"""Knowledge-base documents: schematic facts and isomorphisms with citations.

A document is JSON with top-level arrays ``facts`` and ``isomorphisms``
(optionally ``group_facts``, ``k_table`` and ``nil_vanishing`` for the
torsion and K-theory modules). Integer variables in a fact act as schema
parameters; ``where`` adds a guard, and all parameters must be >= 0.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .groups import (
    KERNEL_KINDS,
    PREDICATES,
    Fact,
    Group,
    ParseError,
    compile_guard,
    instantiate,
    match,
    parse_group,
    pattern_variables,
)

ENV_VAR = "MCGK_KB"


class KBError(ValueError):
    """Malformed knowledge-base document."""


@dataclass(frozen=True)
class Schema:
    fact: Fact  # argument slots may contain pattern arithmetic
    cite: str
    where: str | None = None
    route: str | None = None  # restrict use to one rule id
    variables: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "_guard", compile_guard(self.where) if self.where else None)

    def key(self) -> tuple:
        return (self.fact, self.where, self.route)

    def instances(self, slot: int, concrete: Group):
        """Instantiate the schema so that argument ``slot`` equals ``concrete``."""
        if self.fact.args[slot].ctor != concrete.ctor:
            return None
        env = match(self.fact.args[slot], concrete)
        if env is None:
            return None
        if set(env) != set(self.variables) or any(v < 0 for v in env.values()):
            return None
        if self._guard is not None and not self._guard(env):
            return None
        args = tuple(instantiate(a, env) for a in self.fact.args)
        if any(a is None for a in args):
            return None
        return Fact(self.fact.pred, args, self.fact.kind, self.fact.realizable)

    def matches(self, fact: Fact) -> bool:
        if (fact.pred, fact.kind, fact.realizable) != (self.fact.pred, self.fact.kind, self.fact.realizable):
            return False
        if len(fact.args) != len(self.fact.args):
            return False
        # match all slots at once so arithmetic can use variables bound in any slot
        env = match(Group("Product", self.fact.args), Group("Product", fact.args))
        if env is None:
            return False
        if set(env) != set(self.variables) or any(v < 0 for v in env.values()):
            return False
        return self._guard is None or self._guard(env)

    def __str__(self) -> str:
        s = str(self.fact)
        return s + (f" where {self.where}" if self.where else "")


@dataclass
class KnowledgeBase:
    schemas: tuple[Schema, ...] = ()
    group_facts: tuple = ()
    k_table: tuple = ()
    nil_vanishing: tuple = ()
    source: str = "<memory>"
    _by_pred: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        merged: dict = {}
        for s in self.schemas:
            k = s.key()
            if k in merged:
                old = merged[k]
                if s.cite not in old.cite.split("; "):
                    merged[k] = Schema(old.fact, f"{old.cite}; {s.cite}", old.where, old.route, old.variables)
            else:
                merged[k] = s
        self.schemas = tuple(merged.values())
        self._by_pred = {}
        for s in self.schemas:
            self._by_pred.setdefault(s.fact.pred, []).append(s)

    def __len__(self) -> int:
        return len(self.schemas)

    def of(self, pred: str):
        return self._by_pred.get(pred, ())

    def lookup(self, fact: Fact, route: str | None = None) -> Schema | None:
        """First schema that has ``fact`` as an instance."""
        for s in self.of(fact.pred):
            if s.route not in (None, route) and route != "*":
                continue
            if s.matches(fact):
                return s
        return None

    def ses_with_total(self, total: Group, route: str | None = None):
        for s in self.of("SES"):
            if s.route not in (None, route):
                continue
            inst = s.instances(1, total)
            if inst is not None:
                yield inst, s

    def supergroups(self, h: Group):
        for s in self.of("Subgroup"):
            inst = s.instances(0, h)
            if inst is not None:
                yield inst, s

    def iso_images(self, g: Group, route: str | None = None):
        """Yield (iso fact, image) for each isomorphism schema applicable to ``g``, both directions."""
        for s in self.of("Isomorphic"):
            if s.route != route:
                continue
            for slot in (0, 1):
                inst = s.instances(slot, g)
                if inst is not None:
                    yield inst, inst.args[1 - slot], s

    def extended(self, extra_schemas) -> "KnowledgeBase":
        return KnowledgeBase(self.schemas + tuple(extra_schemas), self.group_facts, self.k_table,
                             self.nil_vanishing, self.source)


def _schema_from_entry(entry: dict, where_label: str) -> Schema:
    if not isinstance(entry, dict):
        raise KBError(f"{where_label}: entry must be an object")
    cite = entry.get("cite")
    if not isinstance(cite, str) or not cite.strip():
        raise KBError(f"{where_label}: missing citation ('cite')")
    try:
        if "kernel" in entry or entry.get("predicate") == "SES":
            kind = entry.get("kind")
            if kind not in KERNEL_KINDS:
                raise KBError(f"{where_label}: SES kind must be one of {KERNEL_KINDS}, got {kind!r}")
            args = tuple(parse_group(entry[k], pattern=True) for k in ("kernel", "total", "quotient"))
            fact = Fact("SES", args, kind, bool(entry.get("realizable", False)))
        elif "a" in entry and "b" in entry:
            fact = Fact("Isomorphic", (parse_group(entry["a"], pattern=True),
                                       parse_group(entry["b"], pattern=True)))
        else:
            pred = entry.get("predicate")
            if pred not in PREDICATES or pred == "SES":
                raise KBError(f"{where_label}: unknown predicate {pred!r}")
            raw = entry.get("args")
            if isinstance(raw, str):
                raw = [raw]
            if not raw:
                raise KBError(f"{where_label}: missing 'args'")
            fact = Fact(pred, tuple(parse_group(a, pattern=True) for a in raw))
        where = entry.get("where")
        variables = frozenset().union(*(pattern_variables(a) for a in fact.args))
        schema = Schema(fact, cite.strip(), where, entry.get("rule"), variables)
    except ParseError as exc:
        raise KBError(f"{where_label}: {exc}") from None
    except KeyError as exc:
        raise KBError(f"{where_label}: missing field {exc}") from None
    if schema._guard is not None and not schema._guard.names <= variables:
        raise KBError(f"{where_label}: guard mentions unknown variables "
                      f"{sorted(schema._guard.names - variables)}")
    return schema


def _check_cited(rows, label: str) -> tuple:
    rows = tuple(rows or ())
    for k, r in enumerate(rows):
        if not isinstance(r, dict):
            raise KBError(f"{label}[{k}]: entry must be an object")
        if label == "group_facts":
            items = list(r.get("normalizers", [])) + list(r.get("exclusions", []))
            if r.get("central_involution"):
                ci = r["central_involution"]
                items.append(ci if isinstance(ci, dict) else {})
        else:
            items = [r]
        for item in items:
            if not item.get("cite"):
                raise KBError(f"{label}[{k}]: missing citation ('cite')")
    return rows


def load_kb(source=None) -> KnowledgeBase:
    """Load a knowledge base from a path, JSON text, or an already-decoded dict.

    ``None`` loads the file named by ``MCGK_KB`` or the bundled default.
    """
    label = "<text>"
    if source is None:
        source = os.environ.get(ENV_VAR) or default_kb_path()
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith(("{", "["))
                                    and source.strip()):
        label = str(source)
        try:
            source = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise KBError(f"cannot read knowledge base {label}: {exc}") from None
    if isinstance(source, str):
        if not source.strip():
            return KnowledgeBase(source=label)
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise KBError(f"{label}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise KBError(f"{label}: top level must be an object")
    schemas = []
    for section in ("facts", "isomorphisms"):
        entries = doc.get(section, [])
        if not isinstance(entries, list):
            raise KBError(f"{label}: '{section}' must be an array")
        for k, entry in enumerate(entries):
            schemas.append(_schema_from_entry(entry, f"{label}: {section}[{k}]"))
    return KnowledgeBase(
        tuple(schemas),
        _check_cited(doc.get("group_facts"), "group_facts"),
        _check_cited(doc.get("k_table"), "k_table"),
        _check_cited(doc.get("nil_vanishing"), "nil_vanishing"),
        label,
    )


def default_kb_path() -> str:
    return str(resources.files("mcgk").joinpath("data", "default_kb.json"))
