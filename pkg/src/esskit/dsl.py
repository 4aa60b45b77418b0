"""Lexer and recursive-descent parser for the ``.ess`` declaration language.

Surface grammar (``#`` comments run to end of line; strings are
double-quoted with ``\\"`` as the only escape; the language is
newline-insensitive):

    document    := (kernel | practice | method | role | phase)*
    kernel      := "kernel" STRING "{" (area | alpha | competency | space | workproduct)* "}"
    area        := "area" IDENT "color" IDENT
    alpha       := "alpha" IDENT "area" IDENT "{" state+ "}"
    state       := "state" IDENT "{" ("check" STRING)+ "}"
    competency  := "competency" IDENT "area" IDENT ("levels" INT)?
    space       := "space" STRING "area" IDENT ("in" STRING)? ("goal" STRING)?
    workproduct := "workproduct" STRING "category" IDENT ("description" STRING)?
    role        := "role" STRING "{" ("competency" IDENT "@" INT)+ "}"
    practice    := "practice" STRING "area" IDENT "{" ("goal" STRING)+ ("input" STRING)*
                   output* space_block* "}"
    output      := "output" STRING ("category" IDENT)? ("description" STRING)?
    space_block := "space" STRING ("goal" STRING)? "{" (space_block | activity)* "}"
    activity    := "activity" STRING ("requires" IDENT "@" INT)* ("produces" STRING)*
                   ("role" STRING)? ("tag" IDENT)*
    method      := "method" STRING "{" ("preamble" STRING)? ("cycle" STRING)+
                   ("concurrent" STRING)* "}"
    phase       := "togaf_phase" IDENT STRING "{" "objective" STRING (output | step)* "}"
    step        := "step" STRING ("goal" STRING)? ("{" spec_activity* "}")?
    spec_activity := "activity" STRING ("tag" IDENT)* ("feeds" STRING)* ("role" STRING)?
                   ("{" spec_activity* "}")?

IDENT tokens encode display-name spaces as underscores
(``Stakeholder_Representation`` names "Stakeholder Representation").
A ``produces`` or ``feeds`` string containing ``": "`` splits at the first
occurrence into work-product name and contributed part.

Cross-references are left unresolved here; resolution belongs to the
validator. Syntax errors and same-file duplicate ids raise
:class:`~esskit.diagnostics.ParseError` carrying every diagnostic found.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, ParseError, Severity, SourceSpan
from .model import (
    ACTIVITY_TAGS,
    PHASE_IDS,
    Activity,
    ActivitySpec,
    Alpha,
    AlphaState,
    Area,
    AreaDecl,
    CompetencyGrade,
    Competency,
    Contribution,
    Kernel,
    Method,
    ModelDocument,
    Practice,
    Role,
    Space,
    StepSpec,
    TogafPhase,
    WorkProduct,
    WorkProductCategory,
    slug,
)

SYNTAX_RULE = "P001"
DUPLICATE_RULE = "P002"

_TOP_KEYWORDS = ("kernel", "practice", "method", "role", "togaf_phase")

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_BODY = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")


@dataclass(frozen=True)
class Token:
    type: str  # IDENT | STRING | INT | LBRACE | RBRACE | AT | EOF
    value: str | int
    line: int
    col: int
    end_line: int
    end_col: int

    def describe(self) -> str:
        if self.type == "EOF":
            return "end of input"
        if self.type == "STRING":
            return f'string "{self.value}"'
        return repr(str(self.value))


class _SyntaxFailure(Exception):
    def __init__(self, diagnostic: Diagnostic) -> None:
        self.diagnostic = diagnostic
        super().__init__(diagnostic.message)


def _error(file: str, line: int, col: int, message: str, *, hint: str | None = None,
           end_line: int | None = None, end_col: int | None = None) -> _SyntaxFailure:
    span = SourceSpan(file, line, col, end_line or line, end_col or col)
    return _SyntaxFailure(Diagnostic(
        rule=SYNTAX_RULE, severity=Severity.ERROR, path="", message=message,
        span=span, hint=hint,
    ))


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Token stream for ``source``; lexical errors raise :class:`ParseError`."""
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def advance(count: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    try:
        while i < n:
            ch = source[i]
            if ch in " \t\r\n":
                advance()
                continue
            if ch == "#":
                while i < n and source[i] != "\n":
                    advance()
                continue
            start_line, start_col = line, col
            if ch == "{":
                tokens.append(Token("LBRACE", "{", start_line, start_col, line, col))
                advance()
                continue
            if ch == "}":
                tokens.append(Token("RBRACE", "}", start_line, start_col, line, col))
                advance()
                continue
            if ch == "@":
                tokens.append(Token("AT", "@", start_line, start_col, line, col))
                advance()
                continue
            if ch == '"':
                advance()
                parts: list[str] = []
                while True:
                    if i >= n or source[i] == "\n":
                        raise _error(file, start_line, start_col, "unterminated string")
                    c = source[i]
                    if c == "\\":
                        if i + 1 < n and source[i + 1] == '"':
                            parts.append('"')
                            advance(2)
                            continue
                        raise _error(file, line, col,
                                     "invalid escape sequence; only \\\" is supported")
                    if c == '"':
                        end_line, end_col = line, col
                        advance()
                        break
                    parts.append(c)
                    advance()
                tokens.append(Token("STRING", "".join(parts),
                                    start_line, start_col, end_line, end_col))
                continue
            if ch in _DIGITS:
                text = []
                while i < n and source[i] in _DIGITS:
                    text.append(source[i])
                    advance()
                tokens.append(Token("INT", int("".join(text)),
                                    start_line, start_col, line, col - 1))
                continue
            if ch in _IDENT_START:
                text = []
                while i < n and source[i] in _IDENT_BODY:
                    text.append(source[i])
                    advance()
                tokens.append(Token("IDENT", "".join(text),
                                    start_line, start_col, line, col - 1))
                continue
            raise _error(file, start_line, start_col, f"unexpected character {ch!r}")
    except _SyntaxFailure as failure:
        raise ParseError([failure.diagnostic]) from None
    tokens.append(Token("EOF", "", line, col, line, col))
    return tokens


def _decode(ident: str) -> str:
    """Display name for an IDENT token: underscores become spaces."""
    return ident.replace("_", " ")


class _Parser:
    def __init__(self, tokens: list[Token], file: str) -> None:
        self.tokens = tokens
        self.file = file
        self.pos = 0
        self.last = tokens[0]
        self.diagnostics: list[Diagnostic] = []

    # Cursor helpers ------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.type != "EOF":
            self.pos += 1
        self.last = token
        return token

    def _fail(self, message: str, *, hint: str | None = None,
              token: Token | None = None) -> _SyntaxFailure:
        token = token or self.current
        return _error(self.file, token.line, token.col, message, hint=hint,
                      end_line=token.end_line, end_col=token.end_col)

    def _expect(self, token_type: str, hint: str | None = None) -> Token:
        if self.current.type != token_type:
            names = {"IDENT": "an identifier", "STRING": "a string",
                     "INT": "an integer", "LBRACE": "'{'", "RBRACE": "'}'",
                     "AT": "'@'"}
            raise self._fail(f"found {self.current.describe()}",
                             hint=hint or names.get(token_type, token_type))
        return self._advance()

    def _expect_word(self, word: str) -> Token:
        if not self._at_word(word):
            raise self._fail(f"found {self.current.describe()}", hint=f"'{word}'")
        return self._advance()

    def _at_word(self, word: str) -> bool:
        return self.current.type == "IDENT" and self.current.value == word

    def _take_word(self, word: str) -> bool:
        if self._at_word(word):
            self._advance()
            return True
        return False

    def _span_from(self, start: Token) -> SourceSpan:
        return SourceSpan(self.file, start.line, start.col,
                          self.last.end_line, self.last.end_col)

    def _named_string(self, what: str) -> tuple[str, Token]:
        token = self._expect("STRING")
        name = str(token.value)
        try:
            slug(name)
        except ValueError:
            raise self._fail(f"{what} name {name!r} contains no usable characters",
                             token=token) from None
        return name, token

    def _named_ident(self, what: str) -> tuple[str, Token]:
        token = self._expect("IDENT")
        return _decode(str(token.value)), token

    def _area_ref(self) -> Area:
        token = self._expect("IDENT", hint="an area name (Customer, Solution, Endeavor)")
        try:
            return Area.from_name(_decode(str(token.value)))
        except KeyError:
            raise self._fail(
                f"unknown area {str(token.value)!r}",
                hint="one of Customer, Solution, Endeavor", token=token) from None

    # Declarations --------------------------------------------------------

    def parse_document(self) -> list:
        declarations = []
        while self.current.type != "EOF":
            try:
                declarations.append(self._parse_declaration())
            except _SyntaxFailure as failure:
                self.diagnostics.append(failure.diagnostic)
                self._recover()
        return declarations

    def _recover(self) -> None:
        """Skip to the next plausible top-level declaration keyword."""
        depth = 0
        while self.current.type != "EOF":
            token = self.current
            if token.type == "LBRACE":
                depth += 1
            elif token.type == "RBRACE":
                depth = max(0, depth - 1)
            elif (depth == 0 and token.type == "IDENT"
                  and token.value in _TOP_KEYWORDS):
                return
            self._advance()

    def _parse_declaration(self):
        token = self.current
        if token.type != "IDENT" or token.value not in _TOP_KEYWORDS:
            raise self._fail(
                f"found {token.describe()} at top level",
                hint="one of " + ", ".join(f"'{w}'" for w in _TOP_KEYWORDS))
        word = str(token.value)
        if word == "kernel":
            return self._parse_kernel()
        if word == "practice":
            return self._parse_practice()
        if word == "method":
            return self._parse_method()
        if word == "role":
            return self._parse_role()
        return self._parse_phase()

    def _parse_kernel(self) -> Kernel:
        start = self._expect_word("kernel")
        name, _ = self._named_string("kernel")
        self._expect("LBRACE")
        members = []
        while not self.current.type == "RBRACE":
            if self._at_word("area"):
                members.append(self._parse_area())
            elif self._at_word("alpha"):
                members.append(self._parse_alpha())
            elif self._at_word("competency"):
                members.append(self._parse_competency())
            elif self._at_word("space"):
                members.append(self._parse_space_decl())
            elif self._at_word("workproduct"):
                members.append(self._parse_work_product("workproduct"))
            else:
                raise self._fail(
                    f"found {self.current.describe()} in kernel body",
                    hint="'area', 'alpha', 'competency', 'space', 'workproduct', or '}'")
        self._expect("RBRACE")
        return Kernel(name=name, members=tuple(members), span=self._span_from(start))

    def _parse_area(self) -> AreaDecl:
        start = self._expect_word("area")
        area = self._area_ref()
        self._expect_word("color")
        color_token = self._expect("IDENT", hint="a color name")
        color = str(color_token.value)
        if color != area.color:
            raise self._fail(
                f"area {area.value} must be {area.color}, not {color!r}",
                token=color_token)
        return AreaDecl(area=area, span=self._span_from(start))

    def _parse_alpha(self) -> Alpha:
        start = self._expect_word("alpha")
        name, _ = self._named_ident("alpha")
        self._expect_word("area")
        area = self._area_ref()
        self._expect("LBRACE")
        states = []
        while self._at_word("state"):
            states.append(self._parse_state())
        if not states:
            raise self._fail("alpha requires at least one state", hint="'state'")
        self._expect("RBRACE")
        return Alpha(name=name, area=area, states=tuple(states),
                     span=self._span_from(start))

    def _parse_state(self) -> AlphaState:
        start = self._expect_word("state")
        name, _ = self._named_ident("state")
        self._expect("LBRACE")
        checklist = []
        while self._at_word("check"):
            self._advance()
            checklist.append(str(self._expect("STRING").value))
        if not checklist:
            raise self._fail("state requires at least one checklist item",
                             hint="'check'")
        self._expect("RBRACE")
        return AlphaState(name=name, checklist=tuple(checklist),
                          span=self._span_from(start))

    def _parse_competency(self) -> Competency:
        start = self._expect_word("competency")
        name, _ = self._named_ident("competency")
        self._expect_word("area")
        area = self._area_ref()
        max_level = 5
        if self._take_word("levels"):
            max_level = int(self._expect("INT").value)
        return Competency(name=name, area=area, max_level=max_level,
                          span=self._span_from(start))

    def _parse_space_decl(self) -> Space:
        start = self._expect_word("space")
        name, _ = self._named_string("space")
        self._expect_word("area")
        area = self._area_ref()
        parent = None
        if self._take_word("in"):
            parent = str(self._expect("STRING").value)
        goal = None
        if self._take_word("goal"):
            goal = str(self._expect("STRING").value)
        return Space(name=name, area=area, parent=parent, goal=goal,
                     span=self._span_from(start))

    def _parse_work_product(self, keyword: str, *, require_category: bool = True) -> WorkProduct:
        start = self._expect_word(keyword)
        name, _ = self._named_string("work product")
        category = WorkProductCategory.OTHER
        if require_category or self._at_word("category"):
            self._expect_word("category")
            token = self._expect("IDENT", hint="a category")
            try:
                category = WorkProductCategory(str(token.value))
            except ValueError:
                valid = ", ".join(c.value for c in WorkProductCategory)
                raise self._fail(f"unknown category {str(token.value)!r}",
                                 hint=f"one of {valid}", token=token) from None
        description = None
        if self._take_word("description"):
            description = str(self._expect("STRING").value)
        return WorkProduct(name=name, category=category, description=description,
                           span=self._span_from(start))

    def _parse_role(self) -> Role:
        start = self._expect_word("role")
        name, _ = self._named_string("role")
        self._expect("LBRACE")
        grades = []
        while self._at_word("competency"):
            self._advance()
            competency, _ = self._named_ident("competency")
            self._expect("AT")
            level = int(self._expect("INT").value)
            grades.append(CompetencyGrade(competency=competency, level=level))
        if not grades:
            raise self._fail("role requires at least one competency",
                             hint="'competency'")
        self._expect("RBRACE")
        return Role(name=name, competencies=tuple(grades),
                    span=self._span_from(start))

    def _parse_practice(self) -> Practice:
        start = self._expect_word("practice")
        name, _ = self._named_string("practice")
        self._expect_word("area")
        area = self._area_ref()
        self._expect("LBRACE")
        goals = []
        while self._at_word("goal"):
            self._advance()
            goals.append(str(self._expect("STRING").value))
        if not goals:
            # Recoverable: record the error but keep parsing the body so one
            # bad practice does not hide later findings.
            self.diagnostics.append(Diagnostic(
                rule=SYNTAX_RULE, severity=Severity.ERROR, path="",
                message="practice requires at least one goal",
                span=self._span_from(start), hint="'goal'"))
        inputs = []
        while self._at_word("input"):
            self._advance()
            inputs.append(str(self._expect("STRING").value))
        outputs = []
        while self._at_word("output"):
            outputs.append(self._parse_work_product("output", require_category=False))
        members = []
        while self._at_word("space"):
            members.append(self._parse_space_block())
        self._expect("RBRACE")
        return Practice(name=name, area=area, goals=tuple(goals),
                        inputs=tuple(inputs), outputs=tuple(outputs),
                        members=tuple(members), span=self._span_from(start))

    def _parse_space_block(self) -> Space:
        start = self._expect_word("space")
        name, _ = self._named_string("space")
        goal = None
        if self._take_word("goal"):
            goal = str(self._expect("STRING").value)
        self._expect("LBRACE")
        members = []
        while True:
            if self._at_word("space"):
                members.append(self._parse_space_block())
            elif self._at_word("activity"):
                members.append(self._parse_activity())
            else:
                break
        self._expect("RBRACE")
        return Space(name=name, goal=goal, members=tuple(members),
                     span=self._span_from(start))

    def _parse_activity(self) -> Activity:
        start = self._expect_word("activity")
        name, _ = self._named_string("activity")
        requires = []
        while self._at_word("requires"):
            self._advance()
            competency, _ = self._named_ident("competency")
            self._expect("AT")
            level = int(self._expect("INT").value)
            requires.append(CompetencyGrade(competency=competency, level=level))
        produces = []
        while self._at_word("produces"):
            self._advance()
            produces.append(Contribution.from_text(str(self._expect("STRING").value)))
        role = None
        if self._take_word("role"):
            role = str(self._expect("STRING").value)
        tags = []
        while self._at_word("tag"):
            self._advance()
            tags.append(str(self._expect("IDENT").value))
        return Activity(name=name, requires=tuple(requires), produces=tuple(produces),
                        role=role, tags=tuple(tags), span=self._span_from(start))

    def _parse_method(self) -> Method:
        start = self._expect_word("method")
        name, _ = self._named_string("method")
        self._expect("LBRACE")
        preamble = None
        if self._take_word("preamble"):
            preamble = str(self._expect("STRING").value)
        cycle = []
        while self._at_word("cycle"):
            self._advance()
            cycle.append(str(self._expect("STRING").value))
        if not cycle:
            raise self._fail("method requires at least one cycle practice",
                             hint="'cycle'")
        concurrent = []
        while self._at_word("concurrent"):
            self._advance()
            concurrent.append(str(self._expect("STRING").value))
        self._expect("RBRACE")
        return Method(name=name, cycle=tuple(cycle), preamble=preamble,
                      concurrent=tuple(concurrent), span=self._span_from(start))

    def _parse_phase(self) -> TogafPhase:
        start = self._expect_word("togaf_phase")
        id_token = self._expect("IDENT", hint="a phase id (P, A-H, RM)")
        phase_id = str(id_token.value)
        if phase_id not in PHASE_IDS:
            raise self._fail(f"unknown phase id {phase_id!r}",
                             hint="one of " + ", ".join(PHASE_IDS), token=id_token)
        name, _ = self._named_string("phase")
        self._expect("LBRACE")
        self._expect_word("objective")
        objective = str(self._expect("STRING").value)
        outputs = []
        steps = []
        while True:
            if self._at_word("output"):
                outputs.append(self._parse_work_product("output"))
            elif self._at_word("step"):
                steps.append(self._parse_step())
            else:
                break
        self._expect("RBRACE")
        return TogafPhase(phase=phase_id, name=name, objective=objective,
                          steps=tuple(steps), outputs=tuple(outputs),
                          span=self._span_from(start))

    def _parse_step(self) -> StepSpec:
        start = self._expect_word("step")
        name, _ = self._named_string("step")
        goal = None
        if self._take_word("goal"):
            goal = str(self._expect("STRING").value)
        activities = []
        if self.current.type == "LBRACE":
            self._advance()
            while self._at_word("activity"):
                activities.append(self._parse_spec_activity())
            self._expect("RBRACE")
        return StepSpec(name=name, goal=goal, activities=tuple(activities),
                        span=self._span_from(start))

    def _parse_spec_activity(self) -> ActivitySpec:
        start = self._expect_word("activity")
        name, _ = self._named_string("activity")
        tags = []
        while self._at_word("tag"):
            self._advance()
            token = self._expect("IDENT", hint="an activity tag")
            tag = str(token.value)
            if tag not in ACTIVITY_TAGS:
                raise self._fail(f"unknown tag {tag!r}",
                                 hint="one of " + ", ".join(ACTIVITY_TAGS),
                                 token=token)
            if tag not in tags:
                tags.append(tag)
        feeds = []
        while self._at_word("feeds"):
            self._advance()
            feeds.append(Contribution.from_text(str(self._expect("STRING").value)))
        role = None
        if self._take_word("role"):
            role = str(self._expect("STRING").value)
        subs = []
        if self.current.type == "LBRACE":
            self._advance()
            while self._at_word("activity"):
                subs.append(self._parse_spec_activity())
            self._expect("RBRACE")
        if not tags and not subs:
            raise self._fail(
                f"activity {name!r} requires at least one tag or sub-activities",
                token=start)
        return ActivitySpec(name=name, tags=tuple(tags), feeds=tuple(feeds),
                            role=role, sub_activities=tuple(subs),
                            span=self._span_from(start))


def parse(source: str, file: str = "<input>") -> ModelDocument:
    """Parse ``source`` into a :class:`ModelDocument`.

    Raises :class:`ParseError` with every diagnostic found when the text has
    syntax errors or declares the same id twice; warnings never block.
    """
    tokens = tokenize(source, file)
    parser = _Parser(tokens, file)
    declarations = parser.parse_document()
    diagnostics = list(parser.diagnostics)
    document = ModelDocument(declarations)
    for ident, first, second in document.id_collisions():
        first_at = first.span.location() if first.span else "an earlier declaration"
        diagnostics.append(Diagnostic(
            rule=DUPLICATE_RULE, severity=Severity.ERROR, path=ident,
            message=f"duplicate id {ident!r}; first declared at {first_at}",
            span=second.span))
    if diagnostics:
        raise ParseError(diagnostics)
    return document


def parse_file(path, file: str | None = None) -> ModelDocument:
    """Parse one ``.ess`` file from disk; I/O errors propagate as OSError."""
    from pathlib import Path

    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), file or str(p))
