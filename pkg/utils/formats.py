"""
文本格式编解码
GCNF 公式、样本、DNF、DFA、赋值与半空间(JSON)；解析错误都带 1 起始的行号

GCNF:
    c 注释
    p gcsp <n> <m> <K> <M>
    S|T|N <带符号下标 ...>      S 为 SAT_K(K 个)，T/N 为 T_{K,M}/¬T_{K,M}(K·M 个)
样本:
    p sample <dim> <m>
    <+/- 串> <0|1>
DNF:
    p dnf <vars> <clauses>
    <带符号变量 ...> 0
DFA:
    p dfa <states> <start> <sink|-1>
    <读 +1 的后继> <读 −1 的后继> <0|1>
"""

import json
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.automata import Dfa
from core.csp import Assignment, Constraint, Formula, PredicateSpec, SignedTuple
from core.exceptions import (
    BodyCountError,
    DuplicateIndexError,
    FormatArityError,
    FormatError,
    IndexRangeError,
    LabelError,
    MalformedHeaderError,
)
from core.realization import DnfFormula, Halfspace
from core.scatter import LabeledSample

_SIGN_CHARS = {"+": 1, "-": -1}


def _content_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    """跳过空行与 c 注释行，产出 (行号, 字段)"""
    for number, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields or fields[0] == "c":
            continue
        yield number, fields


def _parse_header(lines: Iterator[Tuple[int, List[str]]], kind: str, count: int) -> Tuple[int, List[int]]:
    try:
        number, fields = next(lines)
    except StopIteration:
        raise MalformedHeaderError(f"缺少头部行 'p {kind} ...'") from None
    if len(fields) != count + 2 or fields[0] != "p" or fields[1] != kind:
        raise MalformedHeaderError(f"头部应为 'p {kind}' 加 {count} 个整数: {' '.join(fields)!r}", number)
    try:
        values = [int(v) for v in fields[2:]]
    except ValueError:
        raise MalformedHeaderError(f"头部字段必须为整数: {' '.join(fields)!r}", number) from None
    return number, values


def _parse_ints(fields: Sequence[str], number: int) -> List[int]:
    try:
        return [int(v) for v in fields]
    except ValueError:
        raise FormatError(f"字段必须为整数: {' '.join(fields)!r}", number) from None


def _signed_tuple(literals: Sequence[int], n: int, number: int) -> SignedTuple:
    seen = set()
    for lit in literals:
        if lit == 0 or abs(lit) > n:
            raise IndexRangeError(f"变量下标 {abs(lit)} 超出 [1, {n}]", number)
        if abs(lit) in seen:
            raise DuplicateIndexError(f"元组内变量下标 {abs(lit)} 重复", number)
        seen.add(abs(lit))
    return SignedTuple.trusted((1 if lit > 0 else -1, abs(lit)) for lit in literals)


def _check_body_count(expected: int, actual: int, number: int) -> None:
    if actual != expected:
        raise BodyCountError(f"头部声明 {expected} 行，实际 {actual} 行", number)


# GCNF

def parse_gcnf(text: str) -> Formula:
    """解析 GCNF 文本"""
    return parse_gcnf_with_header(text)[0]


def parse_gcnf_with_header(text: str) -> Tuple[Formula, Tuple[int, int]]:
    """解析 GCNF 文本，同时返回头部的 (K, M)

    S 公式与空公式的 M 只出现在头部，原样写回时需要它。

    Raises:
        MalformedHeaderError / FormatArityError / IndexRangeError / DuplicateIndexError / BodyCountError
    """
    lines = _content_lines(text)
    header_line, (n, m, k, m_blocks) = _parse_header(lines, "gcsp", 4)
    if n < 0 or m < 0 or k < 1 or m_blocks < 1:
        raise MalformedHeaderError(f"头部取值非法: n={n}, m={m}, K={k}, M={m_blocks}", header_line)

    predicates = {"S": PredicateSpec.sat(k), "T": PredicateSpec.tkm(k, m_blocks), "N": PredicateSpec.not_tkm(k, m_blocks)}
    constraints: List[Constraint] = []
    tags = set()
    last = header_line
    for number, fields in lines:
        last = number
        if len(constraints) == m:
            raise BodyCountError(f"头部声明 {m} 个约束，正文更多", number)
        tag = fields[0]
        if tag not in predicates:
            raise FormatError(f"未知的极性标记 {tag!r}，应为 S/T/N", number)
        tags.add(tag)
        if "S" in tags and len(tags) > 1:
            raise FormatError("S 约束不能与 T/N 约束混用", number)
        predicate = predicates[tag]
        literals = _parse_ints(fields[1:], number)
        if len(literals) != predicate.arity:
            raise FormatArityError(f"{tag} 约束应有 {predicate.arity} 个文字，实际 {len(literals)}", number)
        constraints.append(Constraint.trusted(predicate, _signed_tuple(literals, n, number)))

    _check_body_count(m, len(constraints), last)
    logger.debug(f"解析 GCNF: n={n}, m={m}, K={k}, M={m_blocks}")
    return Formula.trusted(n, constraints), (k, m_blocks)


def _gcnf_shape(formula: Formula, k: Optional[int], m_blocks: Optional[int]) -> Tuple[int, int]:
    shapes = set()
    for constraint in formula.constraints:
        predicate = constraint.predicate
        if predicate.kind == "table":
            raise FormatError(f"GCNF 不支持真值表谓词: {predicate.label}")
        shapes.add((predicate.kind == "sat", predicate.k, predicate.m))
    if len(shapes) > 1:
        raise FormatError(f"GCNF 要求同一 (K,M) 且不混用 S 与 T/N: {sorted(shapes)}")
    if shapes:
        is_sat, k, intrinsic_m = shapes.pop()
        # SAT_K 约束不携带 M，沿用调用方给出的头部值
        if not is_sat:
            m_blocks = intrinsic_m
    return k or 1, m_blocks or 1


def emit_gcnf(formula: Formula, k: Optional[int] = None, m_blocks: Optional[int] = None) -> str:
    """输出规范 GCNF 文本(无注释)

    头部的 K 与 T/N 约束的 M 取自公式本身；空公式的 K、M 以及 S 公式的 M 用参数填写，缺省为 1
    """
    k, m_blocks = _gcnf_shape(formula, k, m_blocks)
    tag = {"sat": "S", "tkm": "T", "not_tkm": "N"}
    lines = [f"p gcsp {formula.n} {formula.m} {k} {m_blocks}"]
    for constraint in formula.constraints:
        literals = " ".join(str(lit) for lit in constraint.signed_tuple.to_literals())
        lines.append(f"{tag[constraint.predicate.kind]} {literals}")
    return "\n".join(lines) + "\n"


# 样本

def _parse_instance(token: str, dim: int, number: int) -> List[int]:
    if len(token) != dim:
        raise FormatArityError(f"实例长度 {len(token)} 与维度 {dim} 不一致", number)
    try:
        return [_SIGN_CHARS[ch] for ch in token]
    except KeyError:
        raise FormatError(f"实例只能包含 '+' 和 '-': {token!r}", number) from None


def parse_sample(text: str) -> LabeledSample:
    """解析样本文本；空文本为空样本"""
    return parse_sample_with_lines(text)[0]


def parse_sample_with_lines(text: str) -> Tuple[LabeledSample, List[int]]:
    """解析样本文本，同时返回每个样例所在的行号"""
    lines = _content_lines(text)
    if not text.strip():
        return LabeledSample.from_arrays([], [], dim=0), []
    header_line, (dim, m) = _parse_header(lines, "sample", 2)
    if dim < 0 or m < 0:
        raise MalformedHeaderError(f"头部取值非法: dim={dim}, m={m}", header_line)

    instances: List[List[int]] = []
    labels: List[int] = []
    numbers: List[int] = []
    last = header_line
    for number, fields in lines:
        last = number
        if len(labels) == m:
            raise BodyCountError(f"头部声明 {m} 个样例，正文更多", number)
        if dim == 0 and len(fields) == 1:
            fields = ["", fields[0]]
        if len(fields) != 2:
            raise FormatError("样例行应为 '<实例> <标签>'", number)
        instances.append(_parse_instance(fields[0], dim, number))
        if fields[1] not in ("0", "1"):
            raise LabelError(f"标签必须为 0 或 1: {fields[1]!r}", number)
        labels.append(int(fields[1]))
        numbers.append(number)

    _check_body_count(m, len(labels), last)
    sample = LabeledSample.from_arrays(np.asarray(instances, dtype=np.int8).reshape(m, dim), labels, dim=dim)
    return sample, numbers


def instance_string(row: np.ndarray) -> str:
    return "".join("+" if v == 1 else "-" for v in row.tolist())


def emit_sample(sample: LabeledSample) -> str:
    lines = [f"p sample {sample.dim} {sample.m}"]
    for row, label in zip(sample.instances, sample.labels.tolist()):
        lines.append(f"{instance_string(row)} {label}")
    return "\n".join(lines) + "\n"


# DNF

def parse_dnf(text: str) -> DnfFormula:
    lines = _content_lines(text)
    header_line, (n_vars, count) = _parse_header(lines, "dnf", 2)
    if n_vars < 0 or count < 0:
        raise MalformedHeaderError(f"头部取值非法: vars={n_vars}, clauses={count}", header_line)

    clauses = []
    last = header_line
    for number, fields in lines:
        last = number
        if len(clauses) == count:
            raise BodyCountError(f"头部声明 {count} 个子句，正文更多", number)
        literals = _parse_ints(fields, number)
        if literals[-1] != 0 or 0 in literals[:-1]:
            raise FormatError("子句行必须以唯一的 0 结尾", number)
        clause = []
        for lit in literals[:-1]:
            if abs(lit) > n_vars:
                raise IndexRangeError(f"变量 {abs(lit)} 超出 [1, {n_vars}]", number)
            literal = (1 if lit > 0 else -1, abs(lit))
            if literal in clause:
                raise DuplicateIndexError(f"子句内文字 {lit} 重复", number)
            clause.append(literal)
        clauses.append(tuple(clause))

    _check_body_count(count, len(clauses), last)
    return DnfFormula(n_vars=n_vars, clauses=tuple(clauses))


def emit_dnf(formula: DnfFormula) -> str:
    lines = [f"p dnf {formula.n_vars} {formula.clause_count}"]
    for clause in formula.clauses:
        lines.append(" ".join([str(sign * var) for sign, var in clause] + ["0"]))
    return "\n".join(lines) + "\n"


# DFA

def parse_dfa(text: str) -> Dfa:
    lines = _content_lines(text)
    header_line, (states, start, sink) = _parse_header(lines, "dfa", 3)
    if states < 1 or not 0 <= start < states or not -1 <= sink < states:
        raise MalformedHeaderError(f"头部取值非法: states={states}, start={start}, sink={sink}", header_line)

    transitions, accepting = [], []
    last = header_line
    for number, fields in lines:
        last = number
        if len(transitions) == states:
            raise BodyCountError(f"头部声明 {states} 个状态，正文更多", number)
        values = _parse_ints(fields, number)
        if len(values) != 3:
            raise FormatArityError("状态行应为 '<后继+> <后继-> <接受>'", number)
        plus, minus, accept = values
        if not (0 <= plus < states and 0 <= minus < states):
            raise IndexRangeError(f"后继状态超出 [0, {states})", number)
        if accept not in (0, 1):
            raise LabelError(f"接受标记必须为 0/1: {accept}", number)
        transitions.append((plus, minus))
        accepting.append(bool(accept))

    _check_body_count(states, len(transitions), last)
    try:
        return Dfa(transitions=tuple(transitions), start=start, accepting=tuple(accepting),
                   sink=None if sink == -1 else sink)
    except Exception as e:
        raise FormatError(str(e), header_line) from e


def emit_dfa(dfa: Dfa) -> str:
    sink = -1 if dfa.sink is None else dfa.sink
    lines = [f"p dfa {dfa.n_states} {dfa.start} {sink}"]
    for (plus, minus), accept in zip(dfa.transitions, dfa.accepting):
        lines.append(f"{plus} {minus} {int(accept)}")
    return "\n".join(lines) + "\n"


# 赋值与半空间

def parse_assignment(text: str) -> Assignment:
    for number, fields in _content_lines(text):
        if len(fields) != 1:
            raise FormatError("赋值文件应只有一行 '+/-' 串", number)
        return Assignment.model_construct(values=tuple(_parse_instance(fields[0], len(fields[0]), number)))
    return Assignment(values=())


def emit_assignment(psi: Assignment) -> str:
    return psi.to_string() + "\n"


def emit_halfspaces(halfspaces: Sequence[Halfspace]) -> str:
    payload = [{"weights": list(h.weights), "threshold": h.threshold} for h in halfspaces]
    return json.dumps(payload, indent=2) + "\n"


def parse_halfspaces(text: str) -> List[Halfspace]:
    try:
        payload = json.loads(text)
        return [Halfspace(weights=tuple(item["weights"]), threshold=item["threshold"]) for item in payload]
    except (ValueError, KeyError, TypeError) as e:
        raise FormatError(f"半空间 JSON 非法: {e}") from e
