"""Textual rule language: parser, pretty-printer, and structural diff.

Grammar (ASCII rendering of the display-math rule notation):

    rule   := name "(" var ")" ":-" clause (";" clause)* "."
    clause := atom ("," atom)*
    atom   := ["!"] name "(" term ("," term)* ")"
    term   := var | ident | number
    var    := /[A-Z][A-Za-z0-9]*/
    ident  := /[a-z][A-Za-z0-9_]*/

Atom and rule names additionally admit uppercase-initial identifiers
(``ACDR(X,A)``); the position before ``(`` disambiguates them from
variables. A rule is a disjunction of clauses; a clause a conjunction of
possibly negated atoms. Variables are scoped to their clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .data import (
    KIND_NUMERIC,
    PredicateAtom,
    PredicateVocabulary,
    Term,
    Var,
    is_variable,
)

HEAD_VAR = "X"
_OBJECT_POOL = "ABCDEFGHIJKLM"
_NUMERIC_POOL = "NOPQRSTU"


class DslSyntaxError(ValueError):
    """Parse failure; ``position`` is the character offset into the input."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


@dataclass(frozen=True)
class Clause:
    """Conjunction of atoms; satisfied when one variable binding satisfies all."""

    atoms: tuple[PredicateAtom, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not self.atoms:
            raise ValueError("clause must contain at least one atom")

    def variables(self) -> tuple[Var, ...]:
        seen: list[Var] = []
        for atom in self.atoms:
            for v in atom.variables():
                if v not in seen:
                    seen.append(v)
        return tuple(seen)

    def __str__(self) -> str:
        return ", ".join(str(a) for a in self.atoms)


@dataclass(frozen=True)
class Rule:
    """Disjunction of clauses defining one label."""

    label: str
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if not self.clauses:
            raise ValueError("rule must contain at least one clause")

    def __str__(self) -> str:
        return print_rule(self)


@dataclass(frozen=True)
class RuleSet:
    """One rule per label, in label order."""

    rules: Mapping[str, Rule] = field(default_factory=dict)

    def __post_init__(self):
        for label, rule in self.rules.items():
            if rule.label != label:
                raise ValueError(f"rule for {rule.label!r} stored under {label!r}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.rules)

    def get(self, label: str) -> Rule:
        return self.rules[label]

    def with_rule(self, rule: Rule) -> "RuleSet":
        updated = dict(self.rules)
        updated[rule.label] = rule
        return RuleSet(rules=updated)

    def __iter__(self):
        return iter(self.rules.values())

    def __len__(self) -> int:
        return len(self.rules)

    def __str__(self) -> str:
        return print_ruleset(self)


# --- tokenizer ---

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>:-)
  | (?P<number>-?[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[(),;.!])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            tokens.append((kind if kind != "punct" else value, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _is_var_name(name: str) -> bool:
    return name[0].isupper()


class _Parser:
    def __init__(self, text: str, vocab: PredicateVocabulary):
        self.tokens = _tokenize(text)
        self.vocab = vocab
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str, what: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise DslSyntaxError(f"expected {what}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse_rule(self) -> Rule:
        rule = self._rule()
        tok = self.peek()
        if tok[0] != "eof":
            raise DslSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return rule

    def parse_rules(self) -> list[Rule]:
        rules = [self._rule()]
        while self.peek()[0] != "eof":
            rules.append(self._rule())
        return rules

    def _rule(self) -> Rule:
        _, label, label_pos = self.take("name", "rule label")
        if _is_var_name(label):
            label = label  # uppercase labels permitted; treated as plain identifiers
        self.take("(", "'('")
        _, head, head_pos = self.take("name", "head variable")
        if not _is_var_name(head):
            raise DslSyntaxError(f"head argument {head!r} must be a variable", head_pos)
        self.take(")", "')'")
        self.take("arrow", "':-'")
        clauses = [self._clause(head)]
        while self.peek()[0] == ";":
            self.i += 1
            clauses.append(self._clause(head))
        self.take(".", "'.'")
        return canonicalize_rule(Rule(label=label, clauses=tuple(clauses)), self.vocab, head)

    def _clause(self, head: str) -> Clause:
        tok = self.peek()
        if tok[0] in (".", ";", "eof"):
            raise DslSyntaxError("empty clause", tok[2])
        atoms = [self._atom()]
        while self.peek()[0] == ",":
            self.i += 1
            atoms.append(self._atom())
        clause = Clause(atoms=tuple(atoms))
        self._check_bindings(clause, head, tok[2])
        return clause

    def _atom(self) -> PredicateAtom:
        negated = False
        if self.peek()[0] == "!":
            self.i += 1
            negated = True
        _, name, name_pos = self.take("name", "predicate name")
        if not self.vocab.has(name):
            raise DslSyntaxError(f"unknown predicate {name!r}", name_pos)
        self.take("(", "'('")
        args = [self._term()]
        while self.peek()[0] == ",":
            self.i += 1
            args.append(self._term())
        self.take(")", "')'")
        kinds = self.vocab.kinds(name)
        if len(args) != len(kinds):
            raise DslSyntaxError(
                f"predicate {name!r} expects {len(kinds)} arguments, got {len(args)}", name_pos
            )
        for term, kind in zip(args, kinds):
            if isinstance(term, float) and kind != KIND_NUMERIC:
                raise DslSyntaxError(
                    f"numeric constant in {kind} position of {name!r}", name_pos
                )
            if isinstance(term, str) and kind == KIND_NUMERIC:
                raise DslSyntaxError(
                    f"symbol {term!r} in numeric position of {name!r}", name_pos
                )
        return PredicateAtom(name=name, args=tuple(args), negated=negated)

    def _term(self) -> Term:
        tok = self.peek()
        if tok[0] == "number":
            self.i += 1
            return float(tok[1])
        if tok[0] == "name":
            self.i += 1
            return Var(tok[1]) if _is_var_name(tok[1]) else tok[1]
        raise DslSyntaxError(f"expected a term, found {tok[1] or 'end of input'!r}", tok[2])

    def _check_bindings(self, clause: Clause, head: str, pos: int) -> None:
        bound: set[str] = {head}
        for atom in clause.atoms:
            if atom.is_comparison:
                lhs, rhs = atom.args
                if not is_variable(lhs):
                    raise DslSyntaxError(
                        f"{atom.name} requires a numeric variable as first argument", pos
                    )
                if is_variable(rhs):
                    raise DslSyntaxError(
                        f"{atom.name} requires a numeric constant as second argument", pos
                    )
                if lhs.name not in bound:
                    raise DslSyntaxError(
                        f"comparison variable {lhs.name!r} is not introduced earlier in the clause",
                        pos,
                    )
            else:
                for v in atom.variables():
                    bound.add(v.name)


def parse_rule(text: str, vocab: PredicateVocabulary) -> Rule:
    """Parse one rule; variables come back canonically named."""
    return _Parser(text, vocab).parse_rule()


def parse_ruleset(text: str, vocab: PredicateVocabulary) -> RuleSet:
    """Parse consecutive rules into a RuleSet (one rule per label)."""
    rules = _Parser(text, vocab).parse_rules()
    out: dict[str, Rule] = {}
    for rule in rules:
        if rule.label in out:
            raise DslSyntaxError(f"duplicate rule for label {rule.label!r}", 0)
        out[rule.label] = rule
    return RuleSet(rules=out)


def canonicalize_rule(
    rule: Rule, vocab: PredicateVocabulary, head: str = HEAD_VAR
) -> Rule:
    """Rename variables clause by clause: the head variable becomes X, other
    variables take A,B,C,... (N,O,P,... in numeric positions) by first appearance."""
    new_clauses = []
    for clause in rule.clauses:
        mapping: dict[str, Var] = {head: Var(HEAD_VAR)}
        obj_i = num_i = 0
        for atom in clause.atoms:
            kinds = vocab.kinds(atom.name) if vocab.has(atom.name) else None
            for pos, term in enumerate(atom.args):
                if not is_variable(term) or term.name in mapping:
                    continue
                numeric = kinds is not None and kinds[pos] == KIND_NUMERIC
                if numeric:
                    name = (
                        _NUMERIC_POOL[num_i]
                        if num_i < len(_NUMERIC_POOL)
                        else f"N{num_i}"
                    )
                    num_i += 1
                else:
                    name = (
                        _OBJECT_POOL[obj_i]
                        if obj_i < len(_OBJECT_POOL)
                        else f"V{obj_i}"
                    )
                    obj_i += 1
                mapping[term.name] = Var(name)
        new_atoms = tuple(
            PredicateAtom(
                name=a.name,
                args=tuple(mapping.get(t.name, t) if is_variable(t) else t for t in a.args),
                negated=a.negated,
            )
            for a in clause.atoms
        )
        new_clauses.append(Clause(atoms=new_atoms))
    return Rule(label=rule.label, clauses=tuple(new_clauses))


def print_rule(rule: Rule) -> str:
    """Canonical text: ``label(X) :- a, b ; c.``"""
    body = " ; ".join(str(c) for c in rule.clauses)
    return f"{rule.label}({HEAD_VAR}) :- {body}."


def print_ruleset(rules: RuleSet) -> str:
    return "\n".join(print_rule(r) for r in rules)


def clause_key(clause: Clause):
    """Hashable form invariant under consistent variable renaming."""
    mapping: dict[str, int] = {}
    atoms = []
    for atom in clause.atoms:
        args = []
        for term in atom.args:
            if is_variable(term):
                if term.name not in mapping:
                    mapping[term.name] = len(mapping)
                args.append(("v", mapping[term.name]))
            elif isinstance(term, float):
                args.append(("n", term))
            else:
                args.append(("s", term))
        atoms.append((atom.name, atom.negated, tuple(args)))
    return tuple(atoms)


def clauses_equal(a: Clause, b: Clause) -> bool:
    return clause_key(a) == clause_key(b)


def rules_equal(a: Rule, b: Rule) -> bool:
    return (
        a.label == b.label
        and len(a.clauses) == len(b.clauses)
        and all(clauses_equal(x, y) for x, y in zip(a.clauses, b.clauses))
    )


def rulesets_equal(a: RuleSet, b: RuleSet) -> bool:
    return a.labels == b.labels and all(
        rules_equal(a.get(label), b.get(label)) for label in a.labels
    )


def first_inconsistent_clause(
    current: Rule, gold: Rule
) -> Optional[tuple[int, Clause]]:
    """Smallest index where the two rules' clauses structurally differ.

    Returns ``(i, gold.clauses[i])`` for the first positional mismatch,
    ``(len(current), gold.clauses[len(current)])`` when ``current`` is a
    proper prefix of ``gold``, and None when current matches gold up to
    gold's length (including the case where current carries extra clauses;
    there is no gold clause to offer for those).
    """
    if current.label != gold.label:
        raise ValueError(
            f"label mismatch: {current.label!r} vs {gold.label!r}"
        )
    for i, gold_clause in enumerate(gold.clauses):
        if i >= len(current.clauses):
            return (i, gold_clause)
        if not clauses_equal(current.clauses[i], gold_clause):
            return (i, gold_clause)
    return None
