"""JSON documents for profiles, pairwise matrices and games, plus the
payload and markdown/CSV renderings used by the command line.

Rationals travel as strings (``"45"``, ``"4/5"``) so nothing passes
through a binary float.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .core import (
    Alternative,
    GameSolution,
    MatrixGame,
    MixedStrategy,
    PairwiseMatrix,
    PreferenceGroup,
    WeightedPreferenceProfile,
    as_fraction,
    format_fraction,
)
from .games import EnvelopePoint, InformationExpansion, PureAnalysis
from .stable_sets import StableSetResult
from .voting import EliminationReport, MatchRecord, TallyResult

FIXTURES = ("table1_printed", "table1_reconciled", "table2", "matrix1", "matrix2")


class SchemaError(ValueError):
    """An input document does not match the expected shape.

    ``where`` is the location inside the document, e.g. ``groups[1].weight``;
    ``line``/``column`` are set for JSON syntax errors.
    """

    def __init__(self, message: str, where: str = "", line: Optional[int] = None, column: Optional[int] = None):
        self.where, self.line, self.column = where, line, column
        super().__init__(f"{where}: {message}" if where else message)


def fx(value: Fraction) -> str:
    return format_fraction(value)


def _rational(value: Any, where: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), where) from None


def _expect(doc: Any, kind: type, where: str):
    if not isinstance(doc, kind):
        names = {dict: "an object", list: "an array", str: "a string"}
        raise SchemaError(f"expected {names.get(kind, kind.__name__)}", where)
    return doc


def _key(doc: dict, key: str, where: str):
    if key not in doc:
        raise SchemaError(f"missing key {key!r}", where or "document")
    return doc[key]


def _no_extra(doc: dict, allowed: set, where: str) -> None:
    extra = sorted(set(doc) - allowed)
    if extra:
        raise SchemaError(f"unexpected key(s) {', '.join(map(repr, extra))}", where or "document")


# -- parsing ----------------------------------------------------------------

def read_json(path: str) -> Any:
    """Load a JSON file, or a bundled fixture when ``path`` is ``@name``."""
    if path.startswith("@"):
        name = path[1:]
        if name not in FIXTURES:
            raise SchemaError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
        text = resources.files("choicegames.fixtures").joinpath(f"{name}.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, line=exc.lineno, column=exc.colno) from None


def parse_alternatives(doc: Any, where: str = "alternatives") -> tuple[Alternative, ...]:
    out = []
    for i, item in enumerate(_expect(doc, list, where)):
        w = f"{where}[{i}]"
        if isinstance(item, str):
            out.append(Alternative(item))
            continue
        _expect(item, dict, w)
        _no_extra(item, {"id", "name"}, w)
        id_ = _expect(_key(item, "id", w), str, f"{w}.id")
        name = _expect(item.get("name", ""), str, f"{w}.name")
        out.append(Alternative(id_, name))
    return tuple(out)


def parse_profile(doc: Any) -> WeightedPreferenceProfile:
    _expect(doc, dict, "")
    _no_extra(doc, {"alternatives", "groups"}, "")
    alts = parse_alternatives(_key(doc, "alternatives", ""))
    groups_doc = _expect(_key(doc, "groups", ""), list, "groups")
    if not groups_doc:
        raise SchemaError("no groups", "groups")
    groups = []
    for i, g in enumerate(groups_doc):
        w = f"groups[{i}]"
        _expect(g, dict, w)
        _no_extra(g, {"weight", "ranking", "label"}, w)
        weight = _rational(_key(g, "weight", w), f"{w}.weight")
        ranking = _expect(_key(g, "ranking", w), list, f"{w}.ranking")
        for k, r in enumerate(ranking):
            _expect(r, str, f"{w}.ranking[{k}]")
        groups.append(PreferenceGroup(weight, tuple(ranking)))
    return WeightedPreferenceProfile(alts, tuple(groups))


def parse_pairwise(doc: Any) -> PairwiseMatrix:
    """Read a pairwise document; one direction per pair is enough.

    Missing complements are filled as ``100 - s``; a given complement that
    disagrees is rejected.
    """
    _expect(doc, dict, "")
    _no_extra(doc, {"alternatives", "support"}, "")
    alts = parse_alternatives(_key(doc, "alternatives", ""))
    ids = [a.id for a in alts]
    known = set(ids)
    given: dict[tuple[str, str], Fraction] = {}
    for x, row in _expect(_key(doc, "support", ""), dict, "support").items():
        if x not in known:
            raise SchemaError(f"unknown alternative {x!r}", f"support.{x}")
        for y, v in _expect(row, dict, f"support.{x}").items():
            if y not in known:
                raise SchemaError(f"unknown alternative {y!r}", f"support.{x}.{y}")
            if y == x:
                raise SchemaError("diagonal entry", f"support.{x}.{y}")
            given[(x, y)] = _rational(v, f"support.{x}.{y}")
    support = dict(given)
    for x in ids:
        for y in ids:
            if x == y:
                continue
            if (x, y) not in given and (y, x) in given:
                support[(x, y)] = 100 - given[(y, x)]
            elif (x, y) in given and (y, x) in given and given[(x, y)] + given[(y, x)] != 100:
                raise SchemaError(
                    f"conflicting entries {given[(x, y)]} and {given[(y, x)]} (must sum to 100)",
                    f"support.{x}.{y}",
                )
            elif (x, y) not in given and (y, x) not in given:
                raise SchemaError(f"no entry for the pair {x}/{y}", "support")
    return PairwiseMatrix(alts, support)


def parse_game(doc: Any) -> MatrixGame:
    """Read a game document, or the report written by ``game expand``."""
    _expect(doc, dict, "")
    if "command" in doc and "result" in doc:
        result = _expect(doc["result"], dict, "result")
        doc = _expect(_key(result, "game", "result"), dict, "result.game")
    _no_extra(doc, {"rows", "cols", "payoffs", "constant_sum"}, "")
    rows = _expect(_key(doc, "rows", ""), list, "rows")
    cols = _expect(_key(doc, "cols", ""), list, "cols")
    for name, labels in (("rows", rows), ("cols", cols)):
        for k, label in enumerate(labels):
            _expect(label, str, f"{name}[{k}]")
    payoffs = []
    for i, row in enumerate(_expect(_key(doc, "payoffs", ""), list, "payoffs")):
        row = _expect(row, list, f"payoffs[{i}]")
        payoffs.append([_rational(v, f"payoffs[{i}][{j}]") for j, v in enumerate(row)])
    cs = doc.get("constant_sum")
    cs = None if cs is None else _rational(cs, "constant_sum")
    return MatrixGame(tuple(rows), tuple(cols), payoffs, cs)


# -- documents --------------------------------------------------------------

def alternatives_doc(alts) -> list:
    return [{"id": a.id, "name": a.name} for a in alts]


def profile_doc(p: WeightedPreferenceProfile) -> dict:
    return {
        "alternatives": alternatives_doc(p.alternatives),
        "groups": [{"weight": fx(g.weight), "ranking": list(g.ranking)} for g in p.groups],
    }


def pairwise_doc(m: PairwiseMatrix) -> dict:
    return {
        "alternatives": alternatives_doc(m.alternatives),
        "support": {x: {y: fx(m[(x, y)]) for y in m.ids if y != x} for x in m.ids},
    }


def game_doc(g: MatrixGame) -> dict:
    doc = {
        "rows": list(g.row_labels),
        "cols": list(g.col_labels),
        "payoffs": [[fx(v) for v in row] for row in g.payoffs],
    }
    if g.constant_sum is not None:
        doc["constant_sum"] = fx(g.constant_sum)
    return doc


def tally_doc(t: TallyResult) -> dict:
    return {"scores": {k: fx(v) for k, v in t.scores.items()}, "winners": list(t.winners)}


def match_doc(m: MatchRecord) -> dict:
    return {
        "left": m.left,
        "right": m.right,
        "left_support": fx(m.left_support),
        "right_support": fx(m.right_support),
        "outcome": m.outcome,
        "winner": m.winner,
    }


def elimination_doc(r: EliminationReport) -> dict:
    rounds = []
    for rnd in r.rounds:
        d = {"field": list(rnd.field)}
        if rnd.scores is not None:
            d["scores"] = {k: fx(v) for k, v in rnd.scores.items()}
        if rnd.matches:
            d["matches"] = [match_doc(m) for m in rnd.matches]
        d["eliminated"] = list(rnd.eliminated)
        rounds.append(d)
    return {"rounds": rounds, "winner": r.winner, "tied": list(r.tied)}


def strategy_doc(s: MixedStrategy) -> dict:
    return {label: fx(p) for label, p in zip(s.labels, s.probabilities)}


def solution_doc(s: GameSolution) -> dict:
    doc = {
        "kind": s.kind,
        "row_strategy": strategy_doc(s.row_strategy),
        "col_strategy": strategy_doc(s.col_strategy),
        "value": fx(s.value),
        "column_value": None if s.column_value is None else fx(s.column_value),
        "epsilon": fx(s.epsilon),
    }
    if s.kind == "mixed-approximate":
        doc["lower"] = fx(s.lower)
        doc["upper"] = fx(s.upper)
        doc["iterations"] = s.iterations
    return doc


def pure_analysis_doc(a: PureAnalysis, g: MatrixGame) -> dict:
    return {
        "row_minima": [fx(v) for v in a.row_minima],
        "col_maxima": [fx(v) for v in a.col_maxima],
        "maximin": {"value": fx(a.maximin), "rows": [g.row_labels[i] for i in a.maximin_rows]},
        "minimax": {"value": fx(a.minimax), "cols": [g.col_labels[j] for j in a.minimax_cols]},
        "saddle_points": [{"row": g.row_labels[i], "col": g.col_labels[j]} for i, j in a.saddle_points],
    }


def expansion_doc(e: InformationExpansion) -> dict:
    return {
        "informed": e.informed,
        "game": game_doc(e.expanded),
        "strategy_maps": [dict(m) for m in e.strategy_maps],
    }


def stable_sets_doc(res: StableSetResult, matrix: PairwiseMatrix, threshold: Fraction) -> dict:
    return {
        "threshold": fx(threshold),
        "edges": [
            {"from": x, "to": y, "support": fx(matrix[(x, y)])} for x, y in res.relation.sorted_edges()
        ],
        "stable_sets": [
            {"members": list(s), "witnesses": dict(c)} for s, c in zip(res.stable_sets, res.certificates)
        ],
    }


def envelope_doc(points: list[EnvelopePoint], player: str) -> dict:
    return {
        "player": player,
        "breakpoints": [
            {"parameter": fx(p.parameter), "value": fx(p.best_response_value)} for p in points if p.is_breakpoint
        ],
        "points": [
            {
                "parameter": fx(p.parameter),
                "value": fx(p.best_response_value),
                "active_response": p.active_pure_response,
                "breakpoint": p.is_breakpoint,
            }
            for p in points
        ],
    }


def envelope_csv(doc: dict, decimal: bool = False) -> str:
    """CSV of an envelope payload; breakpoints are ordinary rows at their exact parameter."""

    def num(v: str) -> str:
        return repr(float(Fraction(v))) if decimal else v

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["parameter", "value", "active_response"])
    for p in doc["points"]:
        writer.writerow([num(p["parameter"]), num(p["value"]), p["active_response"]])
    return buf.getvalue()


# -- reports ----------------------------------------------------------------

@dataclass
class RunReport:
    command: str
    inputs: dict
    result: dict
    warnings: list = field(default_factory=list)
    meta: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {"command": self.command, "inputs": self.inputs, "result": self.result, "warnings": self.warnings}
        if self.meta is not None:
            d["meta"] = self.meta
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(d["command"], d["inputs"], d["result"], list(d.get("warnings", [])), d.get("meta"))

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def _pct(v: str) -> str:
    return f"{v}%"


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines)


def pairwise_markdown(doc: dict) -> str:
    ids = [a["id"] for a in doc["alternatives"]]
    rows = [[x] + ["" if x == y else _pct(doc["support"][x][y]) for y in ids] for x in ids]
    return _md_table([""] + ids, rows)


def game_markdown(doc: dict) -> str:
    rows = [[r] + list(p) for r, p in zip(doc["rows"], doc["payoffs"])]
    return _md_table([""] + doc["cols"], rows)


def expansion_markdown(doc: dict) -> str:
    """Expanded game laid out with each cell as ``row – response a:b``."""
    g = doc["game"]
    cs = Fraction(g["constant_sum"]) if "constant_sum" in g else None
    rows = []
    for i, label in enumerate(g["rows"]):
        cells = [label]
        for j, v in enumerate(g["payoffs"][i]):
            if doc["informed"] == "column":
                resp = doc["strategy_maps"][j][label]
                pair = f"{label} – {resp}"
            else:
                pair = f"{doc['strategy_maps'][i][g['cols'][j]]} – {g['cols'][j]}"
            other = fx(cs - Fraction(v)) if cs is not None else fx(-Fraction(v))
            cells.append(f"{pair} {v}:{other}")
        rows.append(cells)
    return _md_table([""] + g["cols"], rows)


def _elimination_markdown(res: dict) -> str:
    out = []
    for k, rnd in enumerate(res["rounds"], 1):
        out.append(f"### Round {k}: {', '.join(rnd['field'])}")
        if "scores" in rnd:
            out.append(_md_table(["alternative", "points"], [[a, s] for a, s in rnd["scores"].items()]))
        for m in rnd.get("matches", []):
            verdict = "tie" if m["outcome"] == "tie" else f"{m['winner']} wins"
            out.append(f"- {m['left']} vs {m['right']}: {_pct(m['left_support'])} : {_pct(m['right_support'])}, {verdict}")
        if rnd["eliminated"]:
            out.append(f"- eliminated: {', '.join(rnd['eliminated'])}")
        out.append("")
    if res.get("winner"):
        out.append(f"**Winner:** {res['winner']}")
    elif res.get("tied"):
        out.append(f"**Tie:** {', '.join(res['tied'])}")
    if res.get("halted"):
        out.append(f"**Halted:** {res['halted']['reason']}")
    return "\n".join(out)


def render_markdown(report: RunReport) -> str:
    cmd, res = report.command, report.result
    out = [f"# {cmd}", ""]
    if cmd == "derive-pairwise":
        out.append(pairwise_markdown(res["pairwise"]))
        if res.get("differences"):
            out += ["", f"Differences from {res['reference']}:", ""]
            out.append(_md_table(
                ["pair", "derived", "reference"],
                [[f"{d['x']} over {d['y']}", _pct(d["derived"]), _pct(d["reference"])] for d in res["differences"]],
            ))
    elif cmd in ("vote plurality", "vote league"):
        out.append(_md_table(["alternative", "score"], [[a, s] for a, s in res["scores"].items()]))
        out += ["", f"**Winner(s):** {', '.join(res['winners'])}"]
    elif cmd == "vote condorcet":
        out.append(f"**Condorcet winner:** {res['condorcet_winner'] or 'none'}")
        if res["majority_cycle"]:
            cyc = res["majority_cycle"]
            out.append(f"**Majority cycle:** {' → '.join(cyc + cyc[:1])}")
            for e in res["cycle_edges"]:
                out.append(f"- {e['from']} beats {e['to']} with {_pct(e['support'])}")
    elif cmd.startswith("vote "):
        out.append(_elimination_markdown(res))
    elif cmd == "stable-sets":
        out.append(f"Dominance: support > {_pct(res['threshold'])}")
        out.append("")
        out += [f"- {e['from']} → {e['to']} ({_pct(e['support'])})" for e in res["edges"]]
        out.append("")
        if not res["stable_sets"]:
            out.append("No stable set exists.")
        for s in res["stable_sets"]:
            out.append(f"**Stable set:** {{{', '.join(s['members'])}}}")
            out += [f"- {y} is dominated by {x}" for y, x in s["witnesses"].items()]
    elif cmd == "game solve":
        s = res["solution"]
        pa = res["pure_analysis"]
        out.append(game_markdown(report.inputs["game"]))
        out += [
            "",
            f"- maximin {pa['maximin']['value']} (rows {', '.join(pa['maximin']['rows'])})",
            f"- minimax {pa['minimax']['value']} (cols {', '.join(pa['minimax']['cols'])})",
            f"- saddle points: {', '.join(p['row'] + '/' + p['col'] for p in pa['saddle_points']) or 'none'}",
        ]
        if s:
            out += [
                f"- solution ({s['kind']}): value {s['value']}, column player {s['column_value']}, epsilon {s['epsilon']}",
                f"- row strategy: {', '.join(f'{k} {v}' for k, v in s['row_strategy'].items())}",
                f"- column strategy: {', '.join(f'{k} {v}' for k, v in s['col_strategy'].items())}",
            ]
        if res.get("halted"):
            out.append(f"- halted: {res['halted']['reason']}")
    elif cmd == "game expand":
        out.append(expansion_markdown(res))
    elif cmd == "game envelope":
        out.append(_md_table(
            ["parameter", "value", "active response"],
            [[p["parameter"], p["value"], p["active_response"] + (" (breakpoint)" if p["breakpoint"] else "")]
             for p in res["points"]],
        ))
    if report.warnings:
        out += ["", "## Warnings", ""] + [f"- {w}" for w in report.warnings]
    return "\n".join(out).rstrip() + "\n"
