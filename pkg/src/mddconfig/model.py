"""Finite-domain models: variables, constraints, additive costs.

A model document is JSON with three top-level lists::

    {
      "variables":   [{"name": "color", "domain": ["black", "white"]}, ...],
      "constraints": [{"type": "expr", "text": "print = MIB implies color = black"},
                      {"type": "table", "scope": ["color", "size"], "tuples": [...]}],
      "costs":       [{"name": "price",
                       "unary": {"color": {"black": 0, "white": 1}},
                       "components": [{"scope": ["color", "size"],
                                       "tuples": [["black", "small", 3], ...]}]}]
    }

plus an optional ``"ordering"`` list naming every variable once (layer order
for compiled diagrams; defaults to declaration order).

Expressions use integer arithmetic over 0-based value indices, comparisons
(= != < <= > >=) and the connectives ``and``, ``or``, ``not``, ``implies``.
A bare identifier that is not a variable name is resolved as a value label of
the variable on the other side of its comparison, so ``size = small`` and
``size = 0`` mean the same thing.

This module also carries the enumeration oracles (`brute_force_solutions`,
`brute_force_vd`) that the diagram pipeline is checked against in tests.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import LimitExceeded, ModelError

# Partial assignments map variable index -> value index.
Assignment = Mapping[int, int]

BRUTE_FORCE_CAP = 10**7
EXPR_TABLE_CAP = 10**6


@dataclass(frozen=True)
class Variable:
    name: str
    labels: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def value_of(self, label: str | int) -> int:
        """Value index for a label, or an index passed through (checked)."""
        if isinstance(label, int) and not isinstance(label, bool):
            if 0 <= label < self.size:
                return label
            raise ModelError(f"variable {self.name!r} has no value {label!r}")
        try:
            return self.labels.index(label)
        except ValueError:
            raise ModelError(f"variable {self.name!r} has no value {label!r}") from None


# ---------------------------------------------------------------------------
# expression language
# ---------------------------------------------------------------------------

_KEYWORDS = {"and", "or", "not", "implies"}
_CMP_OPS = {"=", "==", "!=", "<>", "<", "<=", ">", ">="}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    # (kind, value, position); kinds: int, ident, op, lparen, rparen
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("ident", text[i:j], i))
            i = j
        elif text[i : i + 2] in {"==", "!=", "<>", "<=", ">=", "->", "=>"}:
            toks.append(("op", text[i : i + 2], i))
            i += 2
        elif ch in "=<>+-*":
            toks.append(("op", ch, i))
            i += 1
        elif ch == "(":
            toks.append(("lparen", ch, i))
            i += 1
        elif ch == ")":
            toks.append(("rparen", ch, i))
            i += 1
        else:
            raise ModelError(f"unexpected character {ch!r}", position=i)
    return toks


class _Parser:
    """Recursive descent over the grammar

    implication := disjunction (('implies'|'->'|'=>') implication)?
    disjunction := conjunction ('or' conjunction)*
    conjunction := negation ('and' negation)*
    negation    := 'not' negation | comparison
    comparison  := sum (cmpop sum)?
    sum         := term (('+'|'-') term)*
    term        := factor ('*' factor)*
    factor      := INT | IDENT | '-' factor | '(' implication ')'

    AST nodes are tuples tagged by kind: ("var", i), ("name", text, pos),
    ("const", k), ("cmp", op, l, r), ("bin", op, l, r), ("neg", x),
    ("not"/"and"/"or"/"implies", ...).
    """

    def __init__(self, text: str, var_index: Mapping[str, int]):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0
        self.var_index = var_index

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ModelError("unexpected end of expression", position=len(self.text))
        self.pos += 1
        return tok

    def expect_kw(self, word: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "ident" and tok[1] == word:
            self.pos += 1
            return True
        return False

    def parse(self):
        node = self.implication()
        tok = self.peek()
        if tok is not None:
            raise ModelError(f"trailing input {tok[1]!r}", position=tok[2])
        return node

    def implication(self):
        left = self.disjunction()
        tok = self.peek()
        if (tok and tok[0] == "ident" and tok[1] == "implies") or (
            tok and tok[0] == "op" and tok[1] in {"->", "=>"}
        ):
            self.pos += 1
            return ("implies", left, self.implication())
        return left

    def disjunction(self):
        node = self.conjunction()
        while self.expect_kw("or"):
            node = ("or", node, self.conjunction())
        return node

    def conjunction(self):
        node = self.negation()
        while self.expect_kw("and"):
            node = ("and", node, self.negation())
        return node

    def negation(self):
        if self.expect_kw("not"):
            return ("not", self.negation())
        return self.comparison()

    def comparison(self):
        left = self.sum()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] in _CMP_OPS:
            self.pos += 1
            right = self.sum()
            return ("cmp", tok[1], left, right)
        return left

    def sum(self):
        node = self.term()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in {"+", "-"}:
                self.pos += 1
                node = ("bin", tok[1], node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] == "*":
                self.pos += 1
                node = ("bin", "*", node, self.factor())
            else:
                return node

    def factor(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            return ("const", int(value))
        if kind == "ident":
            if value in _KEYWORDS:
                raise ModelError(f"misplaced keyword {value!r}", position=pos)
            if value in self.var_index:
                return ("var", self.var_index[value])
            return ("name", value, pos)
        if kind == "op" and value == "-":
            return ("neg", self.factor())
        if kind == "lparen":
            node = self.implication()
            closing = self.take()
            if closing[0] != "rparen":
                raise ModelError("expected ')'", position=closing[2])
            return node
        raise ModelError(f"unexpected token {value!r}", position=pos)


def _resolve_labels(node, variables: Sequence[Variable]):
    """Replace ("name", ...) leaves with value constants, using the variable
    on the other side of the enclosing comparison."""
    kind = node[0]
    if kind in {"var", "const"}:
        return node
    if kind == "name":
        raise ModelError(
            f"unknown identifier {node[1]!r} outside a comparison with a variable",
            position=node[2],
        )
    if kind == "cmp":
        _, op, left, right = node
        if left[0] == "name" and right[0] == "var":
            left = ("const", variables[right[1]].value_of(left[1]))
        elif right[0] == "name" and left[0] == "var":
            right = ("const", variables[left[1]].value_of(right[1]))
        return ("cmp", op, _resolve_labels(left, variables), _resolve_labels(right, variables))
    if kind == "neg" or kind == "not":
        return (kind, _resolve_labels(node[1], variables))
    if kind == "bin":
        return ("bin", node[1], _resolve_labels(node[2], variables), _resolve_labels(node[3], variables))
    # and / or / implies
    return (kind, _resolve_labels(node[1], variables), _resolve_labels(node[2], variables))


def _expr_vars(node, acc: set[int]):
    kind = node[0]
    if kind == "var":
        acc.add(node[1])
    elif kind == "const":
        pass
    elif kind in {"neg", "not"}:
        _expr_vars(node[1], acc)
    elif kind == "cmp" or kind == "bin":
        _expr_vars(node[2], acc)
        _expr_vars(node[3], acc)
    else:
        _expr_vars(node[1], acc)
        _expr_vars(node[2], acc)


def _eval_expr(node, values: Mapping[int, int]):
    kind = node[0]
    if kind == "var":
        return values[node[1]]
    if kind == "const":
        return node[1]
    if kind == "neg":
        return -_eval_expr(node[1], values)
    if kind == "bin":
        a = _eval_expr(node[2], values)
        b = _eval_expr(node[3], values)
        op = node[1]
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        return a * b
    if kind == "cmp":
        a = _eval_expr(node[2], values)
        b = _eval_expr(node[3], values)
        op = node[1]
        if op in {"=", "=="}:
            return a == b
        if op in {"!=", "<>"}:
            return a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b
    if kind == "not":
        return not _eval_expr(node[1], values)
    a = _eval_expr(node[1], values)
    if kind == "and":
        return bool(a) and bool(_eval_expr(node[2], values))
    if kind == "or":
        return bool(a) or bool(_eval_expr(node[2], values))
    # implies
    return (not a) or bool(_eval_expr(node[2], values))


# ---------------------------------------------------------------------------
# constraints and costs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]  # sorted variable indices
    kind: str  # "expr" | "table"
    text: str | None = None
    expr: tuple | None = field(default=None, repr=False)
    tuples: frozenset[tuple[int, ...]] | None = None  # over scope order
    _cache: dict = field(default_factory=dict, repr=False, hash=False, compare=False)

    def satisfied(self, values: Sequence[int]) -> bool:
        """values: total assignment indexed by variable index."""
        if self.kind == "table":
            return tuple(values[i] for i in self.scope) in self.tuples
        return bool(_eval_expr(self.expr, values))

    def allowed_tuples(self, model: "CspModel") -> frozenset[tuple[int, ...]]:
        """Extensional form over the scope, computed lazily for expressions.
        The scope product is capped to keep compilation honest about size."""
        if self.kind == "table":
            return self.tuples
        if "tuples" not in self._cache:
            sizes = [model.variables[i].size for i in self.scope]
            if math.prod(sizes) > EXPR_TABLE_CAP:
                raise LimitExceeded(
                    f"expression scope product {math.prod(sizes)} exceeds cap {EXPR_TABLE_CAP}"
                )
            rows = []
            values: dict[int, int] = {}
            for combo in itertools.product(*(range(s) for s in sizes)):
                for i, v in zip(self.scope, combo):
                    values[i] = v
                if _eval_expr(self.expr, values):
                    rows.append(combo)
            self._cache["tuples"] = frozenset(rows)
        return self._cache["tuples"]


@dataclass(frozen=True)
class CostComponent:
    scope: tuple[int, ...]
    table: Mapping[tuple[int, ...], float]

    def value(self, values: Sequence[int]) -> float:
        return self.table[tuple(values[i] for i in self.scope)]


@dataclass(frozen=True)
class CostSpec:
    """Additive cost: unary per-variable tables plus optional wider-scope
    components; total cost of a solution is the sum of all parts."""

    name: str
    unary: tuple[tuple[float, ...], ...]  # per variable, per value; 0 rows for absent vars
    components: tuple[CostComponent, ...] = ()

    @property
    def is_unary(self) -> bool:
        return not self.components

    @property
    def is_integral(self) -> bool:
        vals = [c for row in self.unary for c in row]
        vals += [c for comp in self.components for c in comp.table.values()]
        return all(float(v).is_integer() for v in vals)

    @property
    def is_nonnegative(self) -> bool:
        vals = [c for row in self.unary for c in row]
        vals += [c for comp in self.components for c in comp.table.values()]
        return all(v >= 0 for v in vals)

    def evaluate(self, values: Sequence[int]) -> float:
        total = 0.0
        for i, row in enumerate(self.unary):
            if row:
                total += row[values[i]]
        for comp in self.components:
            total += comp.value(values)
        return total


@dataclass(frozen=True)
class CspModel:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    costs: Mapping[str, CostSpec]
    ordering: tuple[int, ...]  # layer t holds variable ordering[t]

    @property
    def n(self) -> int:
        return len(self.variables)

    def var_index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise ModelError(f"unknown variable {name!r}")

    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.variables)


# ---------------------------------------------------------------------------
# parsing / serialization
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str):
    if not cond:
        raise ModelError(message)


def _parse_variables(raw) -> tuple[Variable, ...]:
    _require(isinstance(raw, list) and raw, "'variables' must be a non-empty list")
    out = []
    seen = set()
    for entry in raw:
        _require(isinstance(entry, dict), "variable entries must be objects")
        name = entry.get("name")
        domain = entry.get("domain")
        _require(isinstance(name, str) and name, "variable needs a non-empty 'name'")
        _require(name not in seen, f"duplicate variable name {name!r}")
        seen.add(name)
        _require(
            isinstance(domain, list) and domain and all(isinstance(x, str) for x in domain),
            f"variable {name!r} needs a non-empty 'domain' of labels",
        )
        _require(len(set(domain)) == len(domain), f"variable {name!r} has duplicate labels")
        out.append(Variable(name, tuple(domain)))
    return tuple(out)


def _value_index(var: Variable, raw, where: str) -> int:
    if isinstance(raw, bool):
        raise ModelError(f"{where}: booleans are not values")
    if isinstance(raw, int):
        if not 0 <= raw < var.size:
            raise ModelError(f"{where}: value {raw} outside domain of {var.name!r}")
        return raw
    if isinstance(raw, str):
        return var.value_of(raw)
    raise ModelError(f"{where}: values must be labels or indices")


def _parse_constraint(entry, variables: tuple[Variable, ...], var_index) -> Constraint:
    _require(isinstance(entry, dict), "constraint entries must be objects")
    kind = entry.get("type")
    if kind == "expr":
        text = entry.get("text")
        _require(isinstance(text, str) and text.strip(), "expr constraint needs 'text'")
        ast = _Parser(text, var_index).parse()
        ast = _resolve_labels(ast, variables)
        scope: set[int] = set()
        _expr_vars(ast, scope)
        _require(bool(scope), f"constraint {text!r} mentions no variables")
        return Constraint(scope=tuple(sorted(scope)), kind="expr", text=text, expr=ast)
    if kind == "table":
        names = entry.get("scope")
        _require(
            isinstance(names, list) and names and all(isinstance(x, str) for x in names),
            "table constraint needs a 'scope' list of variable names",
        )
        _require(len(set(names)) == len(names), "table scope repeats a variable")
        scope_idx = []
        for nm in names:
            _require(nm in var_index, f"table scope names unknown variable {nm!r}")
            scope_idx.append(var_index[nm])
        rows = entry.get("tuples")
        _require(isinstance(rows, list), "table constraint needs 'tuples'")
        parsed = set()
        for row in rows:
            _require(isinstance(row, list) and len(row) == len(names), "table row arity mismatch")
            parsed.add(
                tuple(
                    _value_index(variables[i], cell, "table row")
                    for i, cell in zip(scope_idx, row)
                )
            )
        # normalize scope to sorted variable order
        order = sorted(range(len(scope_idx)), key=lambda k: scope_idx[k])
        scope = tuple(scope_idx[k] for k in order)
        tuples = frozenset(tuple(row[k] for k in order) for row in parsed)
        return Constraint(scope=scope, kind="table", tuples=tuples)
    raise ModelError(f"unknown constraint type {kind!r}")


def _parse_cost(entry, variables: tuple[Variable, ...], var_index) -> CostSpec:
    _require(isinstance(entry, dict), "cost entries must be objects")
    name = entry.get("name")
    _require(isinstance(name, str) and name, "cost needs a non-empty 'name'")
    unary_raw = entry.get("unary", {})
    _require(isinstance(unary_raw, dict), f"cost {name!r}: 'unary' must be an object")
    unary: list[tuple[float, ...]] = [() for _ in variables]
    for var_name, table in unary_raw.items():
        _require(var_name in var_index, f"cost {name!r} names unknown variable {var_name!r}")
        var = variables[var_index[var_name]]
        _require(isinstance(table, dict), f"cost {name!r}: table for {var_name!r} must be an object")
        row = [None] * var.size
        for label, value in table.items():
            idx = _value_index(var, label, f"cost {name!r}")
            _require(isinstance(value, (int, float)) and not isinstance(value, bool),
                     f"cost {name!r}: entry for {label!r} must be a number")
            row[idx] = float(value)
        _require(None not in row,
                 f"cost {name!r}: table for {var_name!r} must cover every value")
        unary[var_index[var_name]] = tuple(row)
    components = []
    for comp in entry.get("components", []):
        _require(isinstance(comp, dict), f"cost {name!r}: components must be objects")
        names = comp.get("scope")
        _require(isinstance(names, list) and names, f"cost {name!r}: component needs 'scope'")
        scope_idx = []
        for nm in names:
            _require(nm in var_index, f"cost {name!r} component names unknown variable {nm!r}")
            scope_idx.append(var_index[nm])
        rows = comp.get("tuples")
        _require(isinstance(rows, list) and rows, f"cost {name!r}: component needs 'tuples'")
        table: dict[tuple[int, ...], float] = {}
        for row in rows:
            _require(isinstance(row, list) and len(row) == len(names) + 1,
                     f"cost {name!r}: component rows are scope values plus one cost")
            key = tuple(
                _value_index(variables[i], cell, f"cost {name!r} component")
                for i, cell in zip(scope_idx, row[:-1])
            )
            value = row[-1]
            _require(isinstance(value, (int, float)) and not isinstance(value, bool),
                     f"cost {name!r}: component cost must be a number")
            _require(key not in table or table[key] == float(value),
                     f"cost {name!r}: conflicting component entries for {row[:-1]}")
            table[key] = float(value)
        full = math.prod(variables[i].size for i in scope_idx)
        _require(len(table) == full,
                 f"cost {name!r}: component table must cover the whole scope product")
        components.append(CostComponent(tuple(scope_idx), table))
    return CostSpec(name=name, unary=tuple(unary), components=tuple(components))


def parse_model(text: str) -> CspModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model document is not valid JSON: {exc}") from None
    _require(isinstance(doc, dict), "model document must be a JSON object")
    variables = _parse_variables(doc.get("variables"))
    var_index = {v.name: i for i, v in enumerate(variables)}
    constraints = tuple(
        _parse_constraint(entry, variables, var_index) for entry in doc.get("constraints", [])
    )
    costs: dict[str, CostSpec] = {}
    for entry in doc.get("costs", []):
        spec = _parse_cost(entry, variables, var_index)
        _require(spec.name not in costs, f"duplicate cost name {spec.name!r}")
        costs[spec.name] = spec
    ordering_raw = doc.get("ordering")
    if ordering_raw is None:
        ordering = tuple(range(len(variables)))
    else:
        _require(
            isinstance(ordering_raw, list)
            and sorted(ordering_raw) == sorted(var_index)
            and len(ordering_raw) == len(variables),
            "'ordering' must name every variable exactly once",
        )
        ordering = tuple(var_index[nm] for nm in ordering_raw)
    return CspModel(variables=variables, constraints=constraints, costs=costs, ordering=ordering)


def serialize_model(model: CspModel) -> str:
    doc: dict = {
        "variables": [{"name": v.name, "domain": list(v.labels)} for v in model.variables]
    }
    constraints = []
    for c in model.constraints:
        if c.kind == "expr":
            constraints.append({"type": "expr", "text": c.text})
        else:
            constraints.append(
                {
                    "type": "table",
                    "scope": [model.variables[i].name for i in c.scope],
                    "tuples": [
                        [model.variables[i].labels[v] for i, v in zip(c.scope, row)]
                        for row in sorted(c.tuples)
                    ],
                }
            )
    doc["constraints"] = constraints
    costs = []
    for spec in model.costs.values():
        entry: dict = {"name": spec.name}
        unary = {}
        for i, row in enumerate(spec.unary):
            if row:
                var = model.variables[i]
                unary[var.name] = {var.labels[a]: row[a] for a in range(var.size)}
        entry["unary"] = unary
        if spec.components:
            entry["components"] = [
                {
                    "scope": [model.variables[i].name for i in comp.scope],
                    "tuples": [
                        [model.variables[i].labels[v] for i, v in zip(comp.scope, key)]
                        + [comp.table[key]]
                        for key in sorted(comp.table)
                    ],
                }
                for comp in spec.components
            ]
        costs.append(entry)
    doc["costs"] = costs
    if model.ordering != tuple(range(model.n)):
        doc["ordering"] = [model.variables[i].name for i in model.ordering]
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# enumeration oracles
# ---------------------------------------------------------------------------


def iter_solutions(model: CspModel, cap: int = BRUTE_FORCE_CAP):
    """Yield total assignments (value tuples in variable order) satisfying
    every constraint, in lexicographic order."""
    space = math.prod(model.domain_sizes())
    if space > cap:
        raise LimitExceeded(f"assignment space {space} exceeds enumeration cap {cap}")
    checks = [c.satisfied for c in model.constraints]
    for combo in itertools.product(*(range(v.size) for v in model.variables)):
        if all(check(combo) for check in checks):
            yield combo


def brute_force_solutions(model: CspModel, cap: int = BRUTE_FORCE_CAP) -> list[tuple[int, ...]]:
    return list(iter_solutions(model, cap))


def brute_force_vd(
    model: CspModel,
    rho: Assignment,
    bounds: Sequence[tuple[CostSpec, float]] = (),
    cap: int = BRUTE_FORCE_CAP,
) -> list[set[int]]:
    """Valid domains by enumeration: value a is in result[i] iff some solution
    extends rho with x_i = a and stays within every cost bound."""
    for i, v in rho.items():
        if not 0 <= i < model.n:
            raise ModelError(f"assignment names unknown variable index {i}")
        if not 0 <= v < model.variables[i].size:
            raise ModelError(f"assignment value {v} outside domain of {model.variables[i].name!r}")
    domains: list[set[int]] = [set() for _ in model.variables]
    for sol in iter_solutions(model, cap):
        if any(sol[i] != v for i, v in rho.items()):
            continue
        if any(spec.evaluate(sol) > bound for spec, bound in bounds):
            continue
        for i, v in enumerate(sol):
            domains[i].add(v)
    return domains


# ---------------------------------------------------------------------------
# catalogues
# ---------------------------------------------------------------------------

COST_COLUMN_PREFIX = "cost:"


@dataclass(frozen=True)
class CatalogueDoc:
    variables: tuple[Variable, ...]
    rows: tuple[tuple[int, ...], ...]  # value indices per variable column
    costs: tuple[tuple[str, tuple[float, ...]], ...]  # (name, per-row cost)


def parse_catalogue(text: str) -> CatalogueDoc:
    """Catalogue: CSV with a header of variable names, one solution per row.
    Trailing columns whose header starts with ``cost:`` carry per-row numeric
    costs named by the rest of the header cell."""
    import csv
    import io

    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    _require(len(rows) >= 2, "catalogue needs a header row and at least one solution row")
    header = [cell.strip() for cell in rows[0]]
    n_cols = len(header)
    cost_names = []
    var_names = []
    for cell in header:
        if cell.startswith(COST_COLUMN_PREFIX):
            cost_names.append(cell[len(COST_COLUMN_PREFIX):].strip())
            _require(cost_names[-1] != "", "cost column needs a name after 'cost:'")
        else:
            _require(not cost_names, "cost columns must come after all variable columns")
            _require(cell != "", "empty variable name in catalogue header")
            var_names.append(cell)
    _require(len(set(var_names)) == len(var_names), "duplicate variable name in catalogue header")
    _require(len(set(cost_names)) == len(cost_names), "duplicate cost name in catalogue header")
    _require(bool(var_names), "catalogue has no variable columns")
    n_vars = len(var_names)

    label_order: list[list[str]] = [[] for _ in range(n_vars)]
    seen: list[set[str]] = [set() for _ in range(n_vars)]
    body = []
    for row in rows[1:]:
        _require(len(row) == n_cols, "catalogue row width differs from header")
        cells = [cell.strip() for cell in row]
        for j in range(n_vars):
            if cells[j] not in seen[j]:
                seen[j].add(cells[j])
                label_order[j].append(cells[j])
        costs = []
        for j in range(n_vars, n_cols):
            try:
                costs.append(float(cells[j]))
            except ValueError:
                raise ModelError(f"catalogue cost cell {cells[j]!r} is not a number") from None
        body.append((cells[:n_vars], costs))

    variables = tuple(Variable(nm, tuple(lbls)) for nm, lbls in zip(var_names, label_order))
    value_rows = []
    cost_rows: list[list[float]] = [[] for _ in cost_names]
    seen_rows: dict[tuple[int, ...], int] = {}
    for cells, costs in body:
        values = tuple(variables[j].value_of(cells[j]) for j in range(n_vars))
        if values in seen_rows:
            k = seen_rows[values]
            _require(
                all(cost_rows[c][k] == costs[c] for c in range(len(cost_names))),
                f"duplicate catalogue row {cells} with conflicting costs",
            )
            continue
        seen_rows[values] = len(value_rows)
        value_rows.append(values)
        for c in range(len(cost_names)):
            cost_rows[c].append(costs[c])
    return CatalogueDoc(
        variables=variables,
        rows=tuple(value_rows),
        costs=tuple((nm, tuple(vals)) for nm, vals in zip(cost_names, cost_rows)),
    )


def catalogue_to_model(doc: CatalogueDoc) -> CspModel:
    """View a catalogue as a model: one table constraint over all variables,
    each cost a single full-scope component."""
    scope = tuple(range(len(doc.variables)))
    constraint = Constraint(scope=scope, kind="table", tuples=frozenset(doc.rows))
    costs: dict[str, CostSpec] = {}
    for name, values in doc.costs:
        table = {row: val for row, val in zip(doc.rows, values)}
        costs[name] = CostSpec(
            name=name,
            unary=tuple(() for _ in doc.variables),
            components=(CostComponent(scope, table),),
        )
    return CspModel(
        variables=doc.variables,
        constraints=(constraint,),
        costs=costs,
        ordering=scope,
    )
