"""Rule language syntax: terms, atoms, rules, parser, and canonical printer.

The language is a small Datalog dialect: facts and Horn rules over
predicates ``onegram``..``fivegram`` (document, gram text, token position,
char start, char end), ``positive``/``negative`` (category, document) and
``success`` (category, document, three integer scores), with
negation-as-failure written ``not``.

Whitespace, including newlines, is insignificant between tokens, and a
whitespace run inside a quoted string is read as a single space, so rule
files wrapped mid-string by an editor still parse to the intended gram.
``%`` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass

NGRAM_PREDICATES = {
    "onegram": 1,
    "twogram": 2,
    "threegram": 3,
    "fourgram": 4,
    "fivegram": 5,
}
NGRAM_NAME_BY_ARITY = {n: name for name, n in NGRAM_PREDICATES.items()}

KNOWN_ARITIES = {name: 5 for name in NGRAM_PREDICATES}
KNOWN_ARITIES.update({"positive": 2, "negative": 2, "success": 5})

RULE_HEAD_PREDICATES = ("positive", "negative", "success")
NEGATABLE_PREDICATES = frozenset(NGRAM_PREDICATES) | {"positive", "negative"}


class RuleError(Exception):
    pass


class RuleSyntaxError(RuleError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class RuleSemanticError(RuleError):
    pass


@dataclass(frozen=True)
class Constant:
    value: str

    def __post_init__(self) -> None:
        if '"' in self.value:
            raise ValueError("string constants cannot contain double quotes")


@dataclass(frozen=True)
class Number:
    value: int


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Anonymous:
    pass


Term = Constant | Number | Variable | Anonymous


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    def variables(self) -> set[str]:
        return {term.name for term in self.args if isinstance(term, Variable)}


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Literal, ...] = ()


# --- lexer -----------------------------------------------------------------

_PUNCT = {"(": "LPAREN", ")": "RPAREN", ",": "COMMA", ".": "PERIOD"}


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


def _lex(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, column = 1, 1
    i = 0
    length = len(source)

    def advance(text: str) -> None:
        nonlocal line, column
        for ch in text:
            if ch == "\n":
                line += 1
                column = 1
            else:
                column += 1

    while i < length:
        ch = source[i]
        if ch in " \t\r\n":
            advance(ch)
            i += 1
            continue
        if ch == "%":
            end = source.find("\n", i)
            if end == -1:
                end = length
            advance(source[i:end])
            i = end
            continue
        start_line, start_column = line, column
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, start_line, start_column))
            advance(ch)
            i += 1
            continue
        if ch == ":":
            if source.startswith(":-", i):
                tokens.append(_Token("IMPLIES", ":-", start_line, start_column))
                advance(":-")
                i += 2
                continue
            raise RuleSyntaxError("expected ':-'", start_line, start_column)
        if ch == '"':
            end = source.find('"', i + 1)
            if end == -1:
                raise RuleSyntaxError("unterminated string", start_line, start_column)
            raw = source[i + 1 : end]
            value = " ".join(raw.split()) if raw.strip() else raw
            tokens.append(_Token("STRING", value, start_line, start_column))
            advance(source[i : end + 1])
            i = end + 1
            continue
        if ch == "_":
            if i + 1 < length and (source[i + 1].isalnum() or source[i + 1] == "_"):
                raise RuleSyntaxError("'_' must stand alone (anonymous term)", start_line, start_column)
            tokens.append(_Token("ANON", "_", start_line, start_column))
            advance(ch)
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < length and source[j].isdigit():
                j += 1
            tokens.append(_Token("NUMBER", source[i:j], start_line, start_column))
            advance(source[i:j])
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < length and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "VARIABLE" if word[0].isupper() else "IDENT"
            tokens.append(_Token(kind, word, start_line, start_column))
            advance(word)
            i = j
            continue
        raise RuleSyntaxError(f"unexpected character {ch!r}", start_line, start_column)
    tokens.append(_Token("EOF", "", line, column))
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _error(self, expected: str) -> RuleSyntaxError:
        tok = self.current
        found = tok.value or "end of input"
        return RuleSyntaxError(f"expected {expected}, found {found!r}", tok.line, tok.column)

    def expect(self, kind: str, expected: str) -> _Token:
        if self.current.kind != kind:
            raise self._error(expected)
        tok = self.current
        self.pos += 1
        return tok

    def parse_program(self) -> list[Rule]:
        rules = []
        while self.current.kind != "EOF":
            rules.append(self.parse_rule())
        return rules

    def parse_rule(self) -> Rule:
        head = self.parse_atom()
        body: list[Literal] = []
        if self.current.kind == "IMPLIES":
            self.pos += 1
            body.append(self.parse_literal())
            while self.current.kind == "COMMA":
                self.pos += 1
                body.append(self.parse_literal())
        self.expect("PERIOD", "'.'")
        return Rule(head=head, body=tuple(body))

    def parse_literal(self) -> Literal:
        negated = False
        if self.current.kind == "IDENT" and self.current.value == "not":
            negated = True
            self.pos += 1
        return Literal(atom=self.parse_atom(), negated=negated)

    def parse_atom(self) -> Atom:
        name = self.expect("IDENT", "a predicate name")
        self.expect("LPAREN", "'('")
        args = [self.parse_term()]
        while self.current.kind == "COMMA":
            self.pos += 1
            args.append(self.parse_term())
        self.expect("RPAREN", "')'")
        return Atom(predicate=name.value, args=tuple(args))

    def parse_term(self) -> Term:
        tok = self.current
        if tok.kind == "STRING":
            self.pos += 1
            return Constant(tok.value)
        if tok.kind == "NUMBER":
            self.pos += 1
            return Number(int(tok.value))
        if tok.kind == "VARIABLE":
            self.pos += 1
            return Variable(tok.value)
        if tok.kind == "ANON":
            self.pos += 1
            return Anonymous()
        raise self._error("a term (string, integer, variable, or '_')")


def validate_rule(rule: Rule) -> None:
    """Arity, safety, and negation checks shared by parsing and generation."""
    for atom in [rule.head] + [lit.atom for lit in rule.body]:
        expected = KNOWN_ARITIES.get(atom.predicate)
        if expected is not None and len(atom.args) != expected:
            raise RuleSemanticError(
                f"{atom.predicate}/{len(atom.args)} in {print_atom(atom)}: "
                f"{atom.predicate} takes {expected} arguments"
            )
    positive_vars: set[str] = set()
    for lit in rule.body:
        if not lit.negated:
            positive_vars |= lit.atom.variables()
    unsafe = rule.head.variables() - positive_vars
    for lit in rule.body:
        if lit.negated:
            unsafe |= lit.atom.variables() - positive_vars
            if lit.atom.predicate == "success":
                raise RuleSemanticError(
                    f"negation over success is not allowed: {print_rule(rule)}"
                )
    if unsafe:
        names = ", ".join(sorted(unsafe))
        raise RuleSemanticError(
            f"unsafe rule (variables {names} never bound positively): {print_rule(rule)}"
        )


def parse_program(source: str) -> list[Rule]:
    """Parse rule text into validated rules; [] for empty input."""
    rules = _Parser(_lex(source)).parse_program()
    for rule in rules:
        validate_rule(rule)
    return rules


# --- printer ---------------------------------------------------------------


def print_term(term: Term) -> str:
    if isinstance(term, Constant):
        return f'"{term.value}"'
    if isinstance(term, Number):
        return str(term.value)
    if isinstance(term, Variable):
        return term.name
    return "_"


def print_atom(atom: Atom) -> str:
    return f"{atom.predicate}({', '.join(print_term(term) for term in atom.args)})"


def print_literal(literal: Literal) -> str:
    text = print_atom(literal.atom)
    return f"not {text}" if literal.negated else text


def print_rule(rule: Rule) -> str:
    if not rule.body:
        return f"{print_atom(rule.head)}."
    body = ", ".join(print_literal(lit) for lit in rule.body)
    return f"{print_atom(rule.head)} :- {body}."


def print_program(rules: list[Rule]) -> str:
    if not rules:
        return ""
    return "\n".join(print_rule(rule) for rule in rules) + "\n"
