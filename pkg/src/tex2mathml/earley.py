"""Earley parsing over arbitrary context-free grammars with a shared
packed parse forest (SPPF).

The recognizer is a standard agenda-driven Earley parser with two
refinements:

* nullable symbols are handled by an empty-completion memo per position,
  so predict/complete reach a fixpoint even when rules complete within
  the set currently being built;
* deterministic right-recursive completion chains are collapsed through
  Leo-style transitive items, which keeps right recursion linear.  The
  completions a transitive item skips are reconstructed lazily when the
  forest is built, so the resulting SPPF is indistinguishable from the
  unoptimized one.

Forest nodes are binarized: every packed alternative has at most a
prefix child (intermediate or symbol node) and the node for the symbol
consumed last.  Enumerated trees use a compact form: a leaf is the input
position (int), an inner node is ``(rule_id, children_tuple)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable


class GrammarError(ValueError):
    pass


class ParseStateError(RuntimeError):
    """Raised when forest operations are invoked out of order."""


@dataclass(frozen=True)
class Terminal:
    """A terminal symbol: a named predicate over input symbols."""

    name: str
    predicate: Callable[[Any], bool] | None = None
    literal: str | None = None

    def match(self, symbol: Any) -> bool:
        if self.predicate is not None:
            return bool(self.predicate(symbol))
        return symbol == self.literal

    def __repr__(self):
        return f"Terminal({self.name!r})"


@dataclass(frozen=True)
class Rule:
    rule_id: int
    lhs: str
    rhs: tuple[str, ...]
    build_tag: str = ""

    def __str__(self):
        rhs = " ".join(self.rhs) if self.rhs else "ε"
        return f"{self.lhs} -> {rhs}"


class Grammar:
    """A validated CFG: named nonterminals and predicate terminals."""

    def __init__(self, rules: Iterable[tuple], terminals: Iterable[Terminal],
                 start: str):
        self.terminals: dict[str, Terminal] = {}
        for t in terminals:
            if t.name in self.terminals:
                raise GrammarError(f"duplicate terminal {t.name!r}")
            self.terminals[t.name] = t
        self.rules: list[Rule] = []
        for entry in rules:
            lhs, rhs = entry[0], tuple(entry[1])
            tag = entry[2] if len(entry) > 2 else ""
            self.rules.append(Rule(len(self.rules), lhs, rhs, tag))
        self.nonterminals = {r.lhs for r in self.rules}
        if start not in self.nonterminals:
            raise GrammarError(f"start symbol {start!r} has no rules")
        self.start = start
        overlap = self.nonterminals & set(self.terminals)
        if overlap:
            raise GrammarError(f"symbols are both terminal and nonterminal: "
                               f"{sorted(overlap)}")
        for r in self.rules:
            for sym in r.rhs:
                if sym not in self.nonterminals and sym not in self.terminals:
                    raise GrammarError(
                        f"undeclared symbol {sym!r} in rule {r}")
        self.rules_by_lhs: dict[str, list[Rule]] = {}
        for r in self.rules:
            self.rules_by_lhs.setdefault(r.lhs, []).append(r)
        self.nullable = self._compute_nullable()
        self._reject_empty_cycles()

    def _compute_nullable(self) -> frozenset[str]:
        nullable: set[str] = set()
        changed = True
        while changed:
            changed = False
            for r in self.rules:
                if r.lhs in nullable:
                    continue
                if all(s in nullable for s in r.rhs):
                    nullable.add(r.lhs)
                    changed = True
        return frozenset(nullable)

    def _reject_empty_cycles(self) -> None:
        # A -> B edge whenever B is a nonterminal in a rule of A and every
        # other right-hand symbol can derive empty.  A cycle then means
        # A =>+ A with empty yield: infinitely many derivation trees.
        edges: dict[str, set[str]] = {n: set() for n in self.nonterminals}
        for r in self.rules:
            for idx, sym in enumerate(r.rhs):
                if sym not in self.nonterminals:
                    continue
                rest = r.rhs[:idx] + r.rhs[idx + 1:]
                if all(s in self.nullable for s in rest):
                    edges[r.lhs].add(sym)
        color: dict[str, int] = {}

        def visit(node: str, stack: list[str]) -> None:
            color[node] = 1
            for nxt in edges[node]:
                if color.get(nxt) == 1:
                    cycle = stack[stack.index(nxt):] if nxt in stack else [nxt]
                    raise GrammarError(
                        "grammar has a derivation cycle with empty yield "
                        f"through {' -> '.join(cycle + [nxt])}")
                if nxt not in color:
                    visit(nxt, stack + [nxt])
            color[node] = 2

        for n in sorted(self.nonterminals):
            if n not in color:
                visit(n, [n])

    def is_nonterminal(self, sym: str) -> bool:
        return sym in self.nonterminals

    @classmethod
    def from_text(cls, text: str, start: str | None = None) -> "Grammar":
        """Parse the BNF-like fixture format.

        One rule set per line: ``S -> A '+' B | 'a' | ε``.  Quoted atoms
        are literal terminals; bare names are nonterminals; ``ε`` or an
        empty alternative denotes the empty string.
        """
        rules: list[tuple[str, tuple[str, ...]]] = []
        terminals: dict[str, Terminal] = {}
        first_lhs: str | None = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("//")[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise GrammarError(f"line {lineno}: missing '->'")
            lhs, rhs_text = line.split("->", 1)
            lhs = lhs.strip()
            if not lhs:
                raise GrammarError(f"line {lineno}: empty left-hand side")
            if first_lhs is None:
                first_lhs = lhs
            for alt in rhs_text.split("|"):
                symbols: list[str] = []
                for piece in alt.split():
                    if piece in ("ε", "eps", "''", '""'):
                        continue
                    if len(piece) >= 3 and piece[0] == piece[-1] and \
                            piece[0] in "'\"":
                        literal = piece[1:-1]
                        name = f"'{literal}'"
                        terminals.setdefault(
                            name, Terminal(name, literal=literal))
                        symbols.append(name)
                    else:
                        symbols.append(piece)
                rules.append((lhs, tuple(symbols)))
        if not rules:
            raise GrammarError("no rules in grammar text")
        return cls(rules, terminals.values(), start or first_lhs)


@dataclass(frozen=True)
class ChartItem:
    rule_id: int
    dot: int
    origin: int
    current: int


class ForestNode:
    """SPPF node: a symbol/intermediate/leaf with packed alternatives."""

    __slots__ = ("kind", "label", "start", "end", "families", "_family_keys",
                 "payload")

    def __init__(self, kind: str, label, start: int, end: int, payload=None):
        self.kind = kind            # "symbol" | "intermediate" | "leaf"
        self.label = label
        self.start = start
        self.end = end
        self.payload = payload      # input symbol for leaves
        self.families: list[tuple] = []   # (rule_id, split, left, right)
        self._family_keys: set[tuple] = set()

    def add_family(self, rule_id: int, split: int, left, right) -> None:
        key = (rule_id, split)
        if key in self._family_keys:
            return
        self._family_keys.add(key)
        self.families.append((rule_id, split, left, right))

    def add_deferred(self, chain, child) -> None:
        key = ("leo", id(chain), id(child))
        if key in self._family_keys:
            return
        self._family_keys.add(key)
        self.families.append(("leo", chain, child, None))

    def __repr__(self):
        return f"<{self.kind} {self.label} [{self.start},{self.end}]>"


class _Item:
    __slots__ = ("rule", "dot", "origin", "node")

    def __init__(self, rule: Rule, dot: int, origin: int, node):
        self.rule = rule
        self.dot = dot
        self.origin = origin
        self.node = node


class _LeoLink:
    """One step of a deterministic right-recursion chain."""

    __slots__ = ("item", "parent", "top_rule", "top_origin")

    def __init__(self, item: _Item, parent: "_LeoLink | None"):
        self.item = item
        self.parent = parent
        if parent is None:
            self.top_rule = item.rule
            self.top_origin = item.origin
        else:
            self.top_rule = parent.top_rule
            self.top_origin = parent.top_origin


class _SetState:
    __slots__ = ("items", "agenda", "waiting", "empty_done", "leo")

    def __init__(self):
        self.items: dict[tuple, _Item] = {}
        self.agenda: deque[_Item] = deque()
        self.waiting: dict[str, list[_Item]] = {}
        self.empty_done: dict[str, ForestNode] = {}
        self.leo: dict[str, _LeoLink | None] = {}


class Chart:
    """Recognition result: item sets plus the internal forest state."""

    def __init__(self, grammar: Grammar, input_symbols: list,
                 sets: list[_SetState], nodes: dict, accepted: bool):
        self.grammar = grammar
        self.input = input_symbols
        self.accepted = accepted
        self._sets = sets
        self._nodes = nodes

    @property
    def item_sets(self) -> list[frozenset[ChartItem]]:
        out = []
        for i, st in enumerate(self._sets):
            out.append(frozenset(
                ChartItem(it.rule.rule_id, it.dot, it.origin, i)
                for it in st.items.values()))
        return out

    @property
    def item_count(self) -> int:
        return sum(len(st.items) for st in self._sets)

    def completed(self) -> set[tuple[str, int, int]]:
        """(lhs, start, end) for every completed item — chart soundness view."""
        done = set()
        for i, st in enumerate(self._sets):
            for it in st.items.values():
                if it.dot == len(it.rule.rhs):
                    done.add((it.rule.lhs, it.origin, i))
        return done


def recognize(grammar: Grammar, input_symbols: list) -> tuple[bool, Chart]:
    """Run the recognizer; returns (accepted, chart)."""
    chart = _parse(grammar, list(input_symbols))
    return chart.accepted, chart


def _parse(grammar: Grammar, input_symbols: list) -> Chart:
    n = len(input_symbols)
    sets = [_SetState() for _ in range(n + 1)]
    nodes: dict[tuple, ForestNode] = {}

    def get_node(kind, label, start, end, payload=None) -> ForestNode:
        key = (kind, label, start, end)
        node = nodes.get(key)
        if node is None:
            node = ForestNode(kind, label, start, end, payload)
            nodes[key] = node
        return node

    def add_item(pos: int, rule: Rule, dot: int, origin: int,
                 node) -> _Item | None:
        key = (rule.rule_id, dot, origin)
        st = sets[pos]
        existing = st.items.get(key)
        if existing is not None:
            return None
        item = _Item(rule, dot, origin, node)
        st.items[key] = item
        st.agenda.append(item)
        return item

    def advance(item: _Item, v: ForestNode, k: int) -> None:
        """Move the dot of ``item`` over a child node ``v`` ending at k."""
        rule = item.rule
        new_dot = item.dot + 1
        w = item.node
        if new_dot == len(rule.rhs):
            y = get_node("symbol", rule.lhs, item.origin, k)
            y.add_family(rule.rule_id, v.start, w, v)
        elif new_dot == 1:
            y = v
        else:
            y = get_node("intermediate", (rule.rule_id, new_dot),
                         item.origin, k)
            y.add_family(rule.rule_id, v.start, w, v)
        add_item(k, rule, new_dot, item.origin, y)

    def leo_link(pos: int, symbol: str) -> _LeoLink | None:
        """Transitive item for completions of ``symbol`` at ``pos``.

        Iterative: walks the candidate chain down to the first memoized
        (or non-deterministic) step, then fills the memo back up, so even
        a chain first examined at its top stays recursion-free.
        """
        pending: list[tuple[int, str, _Item]] = []
        cur_pos, cur_sym = pos, symbol
        while True:
            st = sets[cur_pos]
            if cur_sym in st.leo:
                link = st.leo[cur_sym]
                break
            waiters = st.waiting.get(cur_sym, [])
            if len(waiters) == 1 and \
                    waiters[0].dot == len(waiters[0].rule.rhs) - 1:
                item = waiters[0]
                pending.append((cur_pos, cur_sym, item))
                cur_pos, cur_sym = item.origin, item.rule.lhs
                continue
            st.leo[cur_sym] = None
            link = None
            break
        for link_pos, link_sym, item in reversed(pending):
            link = _LeoLink(item, link)
            sets[link_pos].leo[link_sym] = link
        return sets[pos].leo[symbol]

    def complete(item: _Item, pos: int) -> None:
        rule = item.rule
        lhs = rule.lhs
        if item.node is None:
            # Rule completed at birth: an epsilon production.
            v = get_node("symbol", lhs, item.origin, pos)
            v.add_family(rule.rule_id, pos, None, None)
            item.node = v
        v = item.node
        origin = item.origin
        if origin == pos:
            sets[pos].empty_done.setdefault(lhs, v)
            for waiter in list(sets[pos].waiting.get(lhs, [])):
                advance(waiter, v, pos)
            return
        link = leo_link(origin, lhs)
        if link is not None:
            top = get_node("symbol", link.top_rule.lhs, link.top_origin, pos)
            top.add_deferred(link, v)
            add_item(pos, link.top_rule, len(link.top_rule.rhs),
                     link.top_origin, top)
            return
        for waiter in list(sets[origin].waiting.get(lhs, [])):
            advance(waiter, v, pos)

    for rule in grammar.rules_by_lhs[grammar.start]:
        add_item(0, rule, 0, 0, None)

    for i in range(n + 1):
        st = sets[i]
        while st.agenda:
            item = st.agenda.popleft()
            if item.dot == len(item.rule.rhs):
                complete(item, i)
                continue
            sym = item.rule.rhs[item.dot]
            if grammar.is_nonterminal(sym):
                st.waiting.setdefault(sym, []).append(item)
                for r in grammar.rules_by_lhs.get(sym, []):
                    add_item(i, r, 0, i, None)
                done = st.empty_done.get(sym)
                if done is not None:
                    advance(item, done, i)
            else:
                if i < n and grammar.terminals[sym].match(input_symbols[i]):
                    leaf = get_node("leaf", None, i, i + 1,
                                    payload=input_symbols[i])
                    advance(item, leaf, i + 1)

    accepted = ("symbol", grammar.start, 0, n) in nodes and any(
        it.dot == len(it.rule.rhs) and it.origin == 0
        and it.rule.lhs == grammar.start
        for it in sets[n].items.values())
    return Chart(grammar, input_symbols, sets, nodes, accepted)


def build_forest(chart: Chart) -> ForestNode:
    """Return the forest root; expands Leo-deferred completion chains."""
    if not chart.accepted:
        raise ParseStateError("build_forest called without an accepting parse")
    root = chart._nodes[("symbol", chart.grammar.start, 0, len(chart.input))]
    _expand_deferred(root, chart._nodes)
    return root


def _expand_deferred(root: ForestNode, nodes: dict) -> None:
    def get_node(kind, label, start, end) -> ForestNode:
        key = (kind, label, start, end)
        node = nodes.get(key)
        if node is None:
            node = ForestNode(kind, label, start, end)
            nodes[key] = node
        return node

    seen: set[int] = set()
    stack = [root]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        deferred = [f for f in node.families if f[0] == "leo"]
        if deferred:
            node.families = [f for f in node.families if f[0] != "leo"]
            for _, link, child, _ in deferred:
                # Walk the chain bottom-up, materializing each skipped
                # completion; the final step's family lands on this node.
                current = child
                while link is not None:
                    item = link.item
                    rule = item.rule
                    if link.parent is None:
                        target = node
                    else:
                        target = get_node("symbol", rule.lhs, item.origin,
                                          node.end)
                    target.add_family(rule.rule_id, current.start, item.node,
                                      current)
                    current = target
                    link = link.parent
        for family in node.families:
            for child in (family[2], family[3]):
                if isinstance(child, ForestNode):
                    stack.append(child)


def enumerate_trees(root: ForestNode, limit: int | None = None
                    ) -> tuple[list, bool]:
    """Enumerate distinct parse trees in deterministic order.

    Returns ``(trees, truncated)``.  A tree is either an input position
    (leaf) or ``(rule_id, children)``.  Alternatives are explored ordered
    by (rule id, split point), and each distinct tree appears once.
    """
    cap = None if limit is None else max(0, limit)
    memo: dict[int, list[tuple]] = {}

    def seqs(node: ForestNode | None) -> list[tuple]:
        if node is None:
            return [()]
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if node.kind == "leaf":
            result = [(node.start,)]
        else:
            result = []
            seen = set()
            for rule_id, _split, left, right in sorted(
                    node.families, key=_family_order):
                left_seqs = seqs(left)
                right_seqs = seqs(right)
                for ls in left_seqs:
                    for rs in right_seqs:
                        children = ls + rs
                        if node.kind == "symbol":
                            tree = (rule_id, children)
                            if tree not in seen:
                                seen.add(tree)
                                result.append((tree,))
                        else:
                            if children not in seen:
                                seen.add(children)
                                result.append(children)
        memo[id(node)] = result
        return result

    if any(f[0] == "leo" for f in root.families):
        raise ParseStateError("forest has unexpanded deferred families; "
                              "call build_forest first")
    all_seqs = seqs(root)
    trees = [s[0] for s in all_seqs]
    if cap is None:
        return trees, False
    return trees[:cap], len(trees) > cap


def _family_order(family: tuple) -> tuple:
    rule_id, split = family[0], family[1]
    return (rule_id if isinstance(rule_id, int) else 1 << 30, split or 0)


def count_trees(root: ForestNode, cap: int = 10 ** 9) -> int:
    """Count distinct derivations without materializing them (iterative)."""
    counts: dict[int, int] = {}
    stack: list[tuple[ForestNode, bool]] = [(root, False)]
    while stack:
        node, processed = stack.pop()
        if id(node) in counts and not processed:
            continue
        if node.kind == "leaf":
            counts[id(node)] = 1
            continue
        children = [c for f in node.families for c in (f[2], f[3])
                    if isinstance(c, ForestNode)]
        if not processed:
            stack.append((node, True))
            for c in children:
                if id(c) not in counts:
                    stack.append((c, False))
            continue
        total = 0
        for _rid, _split, left, right in node.families:
            prod = 1
            for c in (left, right):
                if isinstance(c, ForestNode):
                    prod *= counts[id(c)]
            total += prod
            if total >= cap:
                total = cap
                break
        counts[id(node)] = total
    return counts[id(root)]
