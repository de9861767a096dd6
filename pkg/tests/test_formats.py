"""
文本格式测试
GCNF、样本、DNF、DFA、赋值与半空间的解析和输出
"""

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from core.automata import dnf_to_dfa, run_dfa
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
from core.generators import random_formula
from core.realization import DnfFormula, Halfspace
from utils.formats import (
    emit_assignment,
    emit_dfa,
    emit_dnf,
    emit_gcnf,
    emit_halfspaces,
    emit_sample,
    parse_assignment,
    parse_dfa,
    parse_dnf,
    parse_gcnf,
    parse_gcnf_with_header,
    parse_halfspaces,
    parse_sample,
    parse_sample_with_lines,
)

GCNF_TEXT = """c 两个 T_{2,2} 约束
p gcsp 6 2 2 2

T 1 -2 3 4
c 中间的注释
N -5 6 -1 2
"""


class TestGcnf:
    """GCNF 格式测试"""

    @pytest.mark.smoke
    def test_parse(self):
        formula = parse_gcnf(GCNF_TEXT)
        assert formula.n == 6
        assert formula.m == 2
        assert formula.constraints[0].predicate == PredicateSpec.tkm(2, 2)
        assert formula.constraints[1].predicate == PredicateSpec.not_tkm(2, 2)
        assert formula.constraints[1].signed_tuple.to_literals() == (-5, 6, -1, 2)

    def test_emit_is_canonical(self):
        text = emit_gcnf(parse_gcnf(GCNF_TEXT))
        assert text == "p gcsp 6 2 2 2\nT 1 -2 3 4\nN -5 6 -1 2\n"
        assert emit_gcnf(parse_gcnf(text)) == text

    def test_random_formula_survives(self, rng):
        formula = random_formula(9, 30, PredicateSpec.sat(3), rng)
        assert parse_gcnf(emit_gcnf(formula)) == formula

    def test_empty_formula_header(self):
        assert emit_gcnf(Formula(n=3), k=2, m_blocks=4) == "p gcsp 3 0 2 4\n"
        assert parse_gcnf("p gcsp 3 0 2 4\n").m == 0

    @pytest.mark.parametrize("text", ["p gcsp 4 2 2 3\nS 1 2\nS -3 4\n", "p gcsp 5 0 3 2\n"])
    def test_header_shape_preserved(self, text):
        formula, (k, m_blocks) = parse_gcnf_with_header(text)
        assert emit_gcnf(formula, k=k, m_blocks=m_blocks) == text

    def test_sat_header_defaults_to_one_block(self):
        formula = parse_gcnf("p gcsp 4 1 2 3\nS 1 2\n")
        assert emit_gcnf(formula) == "p gcsp 4 1 2 1\nS 1 2\n"

    @pytest.mark.parametrize("text,error,line", [
        ("", MalformedHeaderError, None),
        ("c x\np cnf 3 1\n", MalformedHeaderError, 2),
        ("p gcsp 3 1 2 x\n", MalformedHeaderError, 1),
        ("p gcsp 3 1 0 1\n", MalformedHeaderError, 1),
        ("p gcsp 3 1 2 1\nS 1 4\n", IndexRangeError, 2),
        ("p gcsp 3 1 2 1\nS 1 0\n", IndexRangeError, 2),
        ("p gcsp 3 1 2 1\nS 1 -1\n", DuplicateIndexError, 2),
        ("p gcsp 3 1 2 1\nS 1 2 3\n", FormatArityError, 2),
        ("p gcsp 3 2 2 1\nS 1 2\n", BodyCountError, 2),
        ("p gcsp 3 1 2 1\nS 1 2\n\nS 2 3\n", BodyCountError, 4),
        ("p gcsp 4 1 1 2\nX 1 2\n", FormatError, 2),
        ("p gcsp 4 2 1 2\nT 1 2\nS 3\n", FormatError, 3),
        ("p gcsp 4 1 1 2\nT 1 a\n", FormatError, 2),
    ])
    def test_errors_carry_line(self, text, error, line):
        with pytest.raises(error) as info:
            parse_gcnf(text)
        assert info.value.line == line

    def test_emit_rejects_unsupported(self, rng):
        table = Formula(n=3, constraints=[Constraint(
            predicate=PredicateSpec.parse("table2:0110"), signed_tuple=SignedTuple.from_literals([1, 2]))])
        with pytest.raises(FormatError):
            emit_gcnf(table)
        mixed = Formula(n=4, constraints=[
            Constraint(predicate=PredicateSpec.sat(2), signed_tuple=SignedTuple.from_literals([1, 2])),
            Constraint(predicate=PredicateSpec.tkm(1, 2), signed_tuple=SignedTuple.from_literals([3, 4])),
        ])
        with pytest.raises(FormatError):
            emit_gcnf(mixed)


class TestSample:
    """样本格式测试"""

    @pytest.mark.smoke
    def test_parse(self):
        sample = parse_sample("c 样本\np sample 3 2\n+-+ 1\n--- 0\n")
        assert sample.dim == 3
        assert sample.instances.tolist() == [[1, -1, 1], [-1, -1, -1]]
        assert sample.labels.tolist() == [1, 0]
        assert emit_sample(sample) == "p sample 3 2\n+-+ 1\n--- 0\n"

    def test_empty_text(self):
        sample = parse_sample("")
        assert sample.m == 0
        assert sample.dim == 0

    def test_dimension_zero(self):
        sample = parse_sample("p sample 0 2\n1\n0\n")
        assert sample.labels.tolist() == [1, 0]

    def test_line_numbers(self):
        _, numbers = parse_sample_with_lines("p sample 1 2\nc x\n+ 1\n\n- 0\n")
        assert numbers == [3, 5]

    @pytest.mark.parametrize("text,error,line", [
        ("p sample 2 1\n+- 2\n", LabelError, 2),
        ("p sample 2 1\n+* 1\n", FormatError, 2),
        ("p sample 2 1\n+-- 1\n", FormatArityError, 2),
        ("p sample 2 1\n+-\n", FormatError, 2),
        ("p sample 2 2\n+- 1\n", BodyCountError, 2),
        ("p sample 2\n", MalformedHeaderError, 1),
    ])
    def test_errors(self, text, error, line):
        with pytest.raises(error) as info:
            parse_sample(text)
        assert info.value.line == line


class TestDnf:
    """DNF 格式测试"""

    @pytest.mark.smoke
    def test_parse_and_emit(self):
        formula = parse_dnf("p dnf 3 3\n1 -2 0\n0\n-3 0\n")
        assert formula.clauses[0] == ((1, 1), (-1, 2))
        assert formula.clauses[1] == ()
        assert emit_dnf(formula) == "p dnf 3 3\n1 -2 0\n0\n-3 0\n"

    @pytest.mark.parametrize("text,error", [
        ("p dnf 2 1\n1 2\n", FormatError),
        ("p dnf 2 1\n1 0 2 0\n", FormatError),
        ("p dnf 2 1\n3 0\n", IndexRangeError),
        ("p dnf 2 1\n1 1 0\n", DuplicateIndexError),
        ("p dnf 2 2\n1 0\n", BodyCountError),
    ])
    def test_errors(self, text, error):
        with pytest.raises(error):
            parse_dnf(text)

    def test_empty_formula(self):
        assert emit_dnf(DnfFormula(n_vars=4)) == "p dnf 4 0\n"


class TestDfa:
    """DFA 格式测试"""

    @pytest.mark.smoke
    def test_constructed_automaton(self, rng, dnf_factory):
        formula = dnf_factory(rng, 4, 2)
        dfa = dnf_to_dfa(formula)
        text = emit_dfa(dfa)
        parsed = parse_dfa(text)
        assert emit_dfa(parsed) == text
        word = [1, -1, 1, 1] * 2
        assert run_dfa(parsed, word) == run_dfa(dfa, word)

    @pytest.mark.parametrize("text,error", [
        ("p dfa 2 0 -1\n0 2 0\n1 1 1\n", IndexRangeError),
        ("p dfa 2 0 -1\n0 1 2\n1 1 1\n", LabelError),
        ("p dfa 2 0 -1\n0 1\n1 1 1\n", FormatArityError),
        ("p dfa 2 5 -1\n", MalformedHeaderError),
        ("p dfa 1 0 0\n0 0 0\n", FormatError),
    ])
    def test_errors(self, text, error):
        with pytest.raises(error):
            parse_dfa(text)


class TestAssignmentAndHalfspaces:
    """赋值与半空间格式测试"""

    def test_assignment(self):
        psi = parse_assignment("c 种植赋值\n+-+-\n")
        assert psi == Assignment.from_string("+-+-")
        assert emit_assignment(psi) == "+-+-\n"
        assert parse_assignment("").n == 0

    def test_assignment_errors(self):
        with pytest.raises(FormatError):
            parse_assignment("+- +\n")
        with pytest.raises(FormatError):
            parse_assignment("+0-\n")

    def test_halfspaces(self):
        halfspaces = [Halfspace(weights=(1, -1), threshold=-1), Halfspace(weights=(0, 1), threshold=1)]
        assert parse_halfspaces(emit_halfspaces(halfspaces)) == halfspaces

    @pytest.mark.parametrize("text", ["not json", "[{\"weights\": [1]}]", "5", "[{\"weights\": [1], \"threshold\": \"x\"}]"])
    def test_halfspace_errors(self, text):
        with pytest.raises(FormatError):
            parse_halfspaces(text)


TOKENS = ["p", "gcsp", "sample", "dnf", "dfa", "c", "S", "T", "N", "0", "1", "2", "3", "-1", "-2", "+-", "-+", "x"]


@st.composite
def noisy_text(draw):
    lines = draw(st.lists(st.lists(st.sampled_from(TOKENS), max_size=6), max_size=6))
    return "\n".join(" ".join(line) for line in lines)


class TestMalformedInput:
    """畸形输入只抛出 FormatError"""

    @given(text=noisy_text())
    @hsettings(max_examples=300, deadline=None)
    def test_only_format_errors(self, text):
        for parser in (parse_gcnf, parse_sample, parse_dnf, parse_dfa):
            try:
                parser(text)
            except FormatError:
                pass
