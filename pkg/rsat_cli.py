#!/usr/bin/env python3
"""
命令行入口
生成实例、运行归约各阶段、实现/验证 DNF 与自动机、分散性检验与区分器

退出码:
    0       成功
    10      打包提前判定 "satisfiable"
    11      区分器多数判定 "unrealizable"
    12      验证不一致
    2       用法错误
    20-29   错误(格式 20、上限 21、学习器 22、生成 23、归约输入 24、定义域 25、其他 29)
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import ValidationError

from config import ReductionParams, profile_manager, settings
from core.automata import dnf_to_dfa, replicate_input, run_dfa, run_dfa_batch
from core.csp import Assignment, PredicateSpec
from core.exceptions import (
    CapExceededError,
    DomainError,
    FormatError,
    GenerationError,
    LearnerFailure,
    ReductionInputError,
    RsatError,
)
from core.generators import planted_formula, random_assignment, random_formula, random_mixed_formula
from core.oracles import assignment_block
from core.predicates import dnf_of_predicate
from core.realization import cnf_to_halfspaces, complement_to_cnf, realize_hypothesis
from core.reductions import (
    PipelineResult,
    formula_to_sample,
    full_pipeline,
    label_independence_pvalue,
    negate_half,
    pack_blocks,
    packed_marginal_pvalue,
    planted_pipeline,
    random_pipeline,
)
from core.rng import RngState
from core.scatter import (
    LabeledSample,
    empirical_scatter_check,
    hoeffding_scatter,
    linial_luria_bound,
    random_table_hypotheses,
    run_distinguisher_trials,
    uniform_label_sampler,
)
from learners import reference_learners
from utils import PerformanceLogger, RunReport, StepLogger, data_handler, report_generator, setup_logger
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
    parse_gcnf_with_header,
    parse_sample_with_lines,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SATISFIABLE = 10
EXIT_UNREALIZABLE = 11
EXIT_MISMATCH = 12
EXIT_FORMAT = 20
EXIT_CAP = 21
EXIT_LEARNER = 22
EXIT_GENERATION = 23
EXIT_REDUCTION_INPUT = 24
EXIT_DOMAIN = 25
EXIT_OTHER = 29

# 顺序即匹配优先级
ERROR_CODES: List[Tuple[type, int]] = [
    (FormatError, EXIT_FORMAT),
    (CapExceededError, EXIT_CAP),
    (LearnerFailure, EXIT_LEARNER),
    (GenerationError, EXIT_GENERATION),
    (ReductionInputError, EXIT_REDUCTION_INPUT),
    (DomainError, EXIT_DOMAIN),
    (RsatError, EXIT_OTHER),
]

CommandResult = Tuple[int, RunReport]


# 输入输出

def _read(path: str) -> Tuple[str, str]:
    return data_handler.read_text(path)


def _emit(report: RunReport, output: Optional[str], text: str) -> None:
    """写到 -o 指定的文件，未指定时写 stdout"""
    if output:
        report.add_output(output, data_handler.write_text(output, text))
    else:
        sys.stdout.write(text)


def _load_formula(report: RunReport, path: str):
    return _load_gcnf(report, path)[0]


def _load_gcnf(report: RunReport, path: str):
    """读取 GCNF，连同头部的 (K, M)"""
    text, digest = _read(path)
    report.add_input(path, digest)
    return parse_gcnf_with_header(text)


def _load_assignment(report: RunReport, path: str) -> Assignment:
    text, digest = _read(path)
    report.add_input(path, digest)
    return parse_assignment(text)


def _resolve_params(args: argparse.Namespace) -> ReductionParams:
    if args.params:
        return ReductionParams.parse(args.params)
    if getattr(args, "profile", None):
        return profile_manager.get_profile(args.profile).params
    raise DomainError("需要 --params K,M,B 或 --profile")


# gen

def cmd_gen(args: argparse.Namespace) -> CommandResult:
    predicate = PredicateSpec.parse(args.pred)
    if predicate.kind == "table":
        raise DomainError("GCNF 只支持 sat/tkm/ntkm 谓词")
    report = RunReport(stage="gen", seed=args.seed, parameters={
        "n": args.n, "m": args.m, "pred": predicate.label, "mixed": args.mixed, "planted": args.planted,
    })
    rng = RngState(seed=args.seed).generator()
    if args.planted:
        psi = random_assignment(args.n, rng)
        formula = planted_formula(args.n, args.m, predicate, psi, rng)
        if args.psi_out:
            _emit(report, args.psi_out, emit_assignment(psi))
    elif args.mixed:
        formula = random_mixed_formula(args.n, args.m, predicate, rng)
    else:
        formula = random_formula(args.n, args.m, predicate, rng)

    report.statistics["polarity_counts"] = formula.polarity_counts()
    _emit(report, args.output, emit_gcnf(formula, k=predicate.k, m_blocks=predicate.m))
    return EXIT_OK, report


# reduce

def cmd_reduce_pack(args: argparse.Namespace) -> CommandResult:
    params = _resolve_params(args)
    report = RunReport(stage="reduce.pack", parameters={"params": params.to_flag(), "remainder": args.remainder})
    formula = _load_formula(report, args.input)
    pack = pack_blocks(formula, params, on_fail=args.remainder)
    report.statistics["dropped"] = pack.dropped
    if pack.early:
        report.verdicts["pack"] = pack.verdict
        report.statistics["failed_block"] = pack.failed_block
        logger.warning(f"打包提前返回 satisfiable (分块 {pack.failed_block})")
        return EXIT_SATISFIABLE, report

    report.verdicts["pack"] = "packed"
    report.statistics["packed_constraints"] = pack.formula.m
    report.statistics["marginal_pvalue"] = packed_marginal_pvalue(pack, formula.n)
    report.statistics["provenance"] = [list(p) for p in pack.provenance]
    _emit(report, args.output, emit_gcnf(pack.formula, k=params.k, m_blocks=params.m_blocks))
    return EXIT_OK, report


def cmd_reduce_negate(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="reduce.negate", seed=args.seed)
    formula, (k, m_blocks) = _load_gcnf(report, args.input)
    condition = _load_assignment(report, args.condition_on) if args.condition_on else None
    mixed = negate_half(formula, RngState(seed=args.seed).generator(), condition_on=condition)
    report.statistics["polarity_counts"] = mixed.polarity_counts()
    _emit(report, args.output, emit_gcnf(mixed, k=k, m_blocks=m_blocks))
    return EXIT_OK, report


def cmd_reduce_sample(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="reduce.sample")
    formula, header = _load_gcnf(report, args.input)
    sample = formula_to_sample(formula, shape=header).to_boolean()
    report.statistics["label_counts"] = sample.label_counts()
    report.statistics["dim"] = sample.dim
    _emit(report, args.output, emit_sample(sample))
    return EXIT_OK, report


def _pipeline_report(report: RunReport, result: PipelineResult) -> int:
    if result.pack.early:
        report.verdicts["pack"] = result.verdict
        report.statistics["failed_block"] = result.pack.failed_block
        return EXIT_SATISFIABLE
    report.verdicts["pack"] = "packed"
    report.statistics["packed_constraints"] = result.pack.formula.m
    report.statistics["label_counts"] = result.sample.label_counts()
    report.statistics["label_independence_pvalue"] = label_independence_pvalue(result.sample)
    report.statistics["dim"] = result.sample.dim
    return EXIT_OK


def cmd_reduce_pipeline(args: argparse.Namespace) -> CommandResult:
    params = _resolve_params(args)
    report = RunReport(stage="reduce.pipeline", seed=args.seed, parameters={"params": params.to_flag()})
    formula = _load_formula(report, args.input)
    condition = _load_assignment(report, args.condition_on) if args.condition_on else None
    result = full_pipeline(formula, params, RngState(seed=args.seed).generator(), condition_on=condition,
                           on_fail=args.remainder)
    code = _pipeline_report(report, result)
    if code == EXIT_OK:
        _emit(report, args.output, emit_sample(result.sample))
    return code, report


# pipeline

def cmd_pipeline(args: argparse.Namespace) -> CommandResult:
    profile = profile_manager.get_profile(args.profile) if args.profile else None
    params = ReductionParams.parse(args.params) if args.params else (profile.params if profile else None)
    n = args.n if args.n is not None else (profile.n if profile else None)
    m = args.m if args.m is not None else (profile.m if profile else None)
    planted = args.planted if args.planted is not None else (profile.planted if profile else False)
    if params is None or n is None or m is None:
        raise DomainError("需要 --params/--n/--m 或 --profile")

    report = RunReport(stage="pipeline", seed=args.seed, parameters={
        "params": params.to_flag(), "n": n, "m": m, "planted": planted, "conditioned": not args.unconditioned,
        "profile": args.profile,
    })
    steps = StepLogger("pipeline")
    perf = PerformanceLogger("pipeline")
    rng = RngState(seed=args.seed).generator()

    steps.step(f"生成{'种植' if planted else '随机'}实例并归约 n={n} m={m} 参数={params.to_flag()}")
    with perf.timing("reduce"):
        if planted:
            result = planted_pipeline(n, m, params, rng, conditioned=not args.unconditioned)
        else:
            result = random_pipeline(n, m, params, rng)
    formula, psi = result.source, result.planted

    steps.step(f"写出产物到 {args.out_dir}")
    out_dir = Path(args.out_dir)
    with perf.timing("emit"):
        _emit(report, str(out_dir / "source.gcnf"), emit_gcnf(formula, k=params.k, m_blocks=params.m_blocks))
        if psi is not None:
            _emit(report, str(out_dir / "planted.psi"), emit_assignment(psi))
        code = _pipeline_report(report, result)
        if code == EXIT_OK:
            _emit(report, str(out_dir / "packed.gcnf"), emit_gcnf(result.pack.formula, k=params.k, m_blocks=params.m_blocks))
            _emit(report, str(out_dir / "mixed.gcnf"), emit_gcnf(result.mixed, k=params.k, m_blocks=params.m_blocks))
            _emit(report, str(out_dir / "sample.txt"), emit_sample(result.sample))
        else:
            steps.warning("打包提前返回 satisfiable，未写出样本")

    logger.debug(f"流水线耗时: {perf.get_performance_summary()['total_time']:.3f}秒")
    steps.finish(passed=True)
    return code, report


# realize

def cmd_realize(args: argparse.Namespace) -> CommandResult:
    predicate = PredicateSpec.parse(args.pred)
    report = RunReport(stage="realize", parameters={"pred": predicate.label, "complement": args.complement})
    psi = _load_assignment(report, args.assignment)
    pd = dnf_of_predicate(predicate)
    realized = realize_hypothesis(psi, pd, psi.n)
    report.statistics.update({"clauses": realized.clause_count, "size": realized.size, "vars": realized.n_vars})
    _emit(report, args.output, emit_dnf(realized))
    if args.complement:
        halfspaces = cnf_to_halfspaces(complement_to_cnf(realized))
        report.statistics["halfspaces"] = len(halfspaces)
        _emit(report, args.halfspaces_out, emit_halfspaces(halfspaces))
    return EXIT_OK, report


# automata

def _load_dnf(report: RunReport, path: str):
    text, digest = _read(path)
    report.add_input(path, digest)
    return parse_dnf(text)


def cmd_automata_build(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="automata.build", parameters={"strict": args.strict})
    formula = _load_dnf(report, args.dnf)
    dfa = dnf_to_dfa(formula, strict=args.strict)
    report.statistics.update({"states": dfa.n_states, "bound": dfa.state_bound(formula.clause_count, formula.n_vars)})
    _emit(report, args.output, emit_dfa(dfa))
    return EXIT_OK, report


def cmd_automata_run(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="automata.run", parameters={"copies": args.copies})
    text, digest = _read(args.dfa)
    report.add_input(args.dfa, digest)
    dfa = parse_dfa(text)
    word = parse_assignment(args.word).values
    result = run_dfa(dfa, replicate_input(word, args.copies) if args.copies > 1 else word)
    report.verdicts["accept"] = result
    sys.stdout.write(f"{result}\n")
    return EXIT_OK, report


def cmd_automata_verify(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="automata.verify", parameters={"strict": args.strict})
    formula = _load_dnf(report, args.dnf)
    if formula.n_vars > settings.exhaustive_check_cap:
        raise CapExceededError(f"变量数 {formula.n_vars} 超出穷举上限 {settings.exhaustive_check_cap}")
    dfa = dnf_to_dfa(formula, strict=args.strict)
    inputs = assignment_block(0, 1 << formula.n_vars, formula.n_vars)
    words = np.tile(inputs, (1, formula.clause_count))
    mismatches = np.flatnonzero(run_dfa_batch(dfa, words) != formula.evaluate(inputs))
    report.statistics.update({"states": dfa.n_states, "inputs": int(inputs.shape[0]), "mismatches": int(mismatches.size)})
    if mismatches.size:
        report.verdicts["automaton"] = "mismatch"
        first = Assignment.from_index(int(mismatches[0]), formula.n_vars).to_string()
        report.statistics["first_mismatch"] = first
        logger.error(f"自动机与 DNF 在输入 {first} 上不一致")
        return EXIT_MISMATCH, report
    report.verdicts["automaton"] = "exact"
    return EXIT_OK, report


# scatter

def cmd_scatter_hoeffding(args: argparse.Namespace) -> CommandResult:
    params = hoeffding_scatter(args.m, args.beta)
    report = RunReport(stage="scatter.hoeffding", parameters={"m": args.m, "beta": args.beta})
    report.statistics.update({"p": params.p, "beta": params.beta, "tail_bound": params.tail_bound()})
    sys.stdout.write(f"{params.p} {params.beta}\n")
    return EXIT_OK, report


def cmd_scatter_bound(args: argparse.Namespace) -> CommandResult:
    value = linial_luria_bound(args.alpha, args.beta, args.n, mode=args.mode)
    report = RunReport(stage="scatter.bound", parameters={
        "alpha": args.alpha, "beta": args.beta, "n": args.n, "mode": args.mode,
    })
    report.statistics["bound"] = value
    sys.stdout.write(f"{value!r}\n")
    return EXIT_OK, report


def cmd_scatter_check(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="scatter.check", seed=args.seed, parameters={
        "m": args.m, "dim": args.dim, "hypotheses": args.hypotheses, "beta": args.beta, "trials": args.trials,
    })
    state = RngState(seed=args.seed)
    hypotheses = random_table_hypotheses(args.hypotheses, args.dim, state.derive(0).generator())
    result = empirical_scatter_check(
        uniform_label_sampler(args.m, args.dim), hypotheses, args.beta, args.trials, state.derive(1).generator(),
    )
    report.statistics.update(result.model_dump(mode="json"))
    report.verdicts["scattered"] = result.passed
    return (EXIT_OK if result.passed else EXIT_MISMATCH), report


# distinguish

def _draw_policy(text: str):
    if text == "pac":
        return None
    if text == "all":
        return "all"
    try:
        count = int(text)
    except ValueError:
        raise DomainError(f"--draws 只接受 pac、all 或正整数: {text}") from None
    if count < 1:
        raise DomainError(f"抽取次数必须 ≥ 1: {count}")
    return count


def cmd_distinguish(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="distinguish", seed=args.seed, parameters={
        "learner": args.learner, "beta": args.beta, "trials": args.trials, "draws": args.draws,
    })
    text, digest = _read(args.sample)
    report.add_input(args.sample, digest)
    sample, _ = parse_sample_with_lines(text)
    if sample.m == 0:
        raise DomainError("区分器需要非空样本")

    learner = reference_learners(args.k, args.m_blocks, args.max_clauses)[args.learner]
    learner.draws = _draw_policy(args.draws)
    summary = run_distinguisher_trials(lambda trial, rng: sample, learner, args.beta, args.seed, args.trials)

    report.statistics.update({
        "realizable": summary.count("realizable"),
        "unrealizable": summary.count("unrealizable"),
        "realizable_fraction": summary.fraction("realizable"),
    })
    report.verdicts["majority"] = summary.majority()
    if args.trials_csv:
        report_generator.export_trials_csv([row.model_dump() for row in summary.rows], args.trials_csv)
    return (EXIT_UNREALIZABLE if summary.majority() == "unrealizable" else EXIT_OK), report


# verify

def cmd_verify(args: argparse.Namespace) -> CommandResult:
    report = RunReport(stage="verify")
    code = EXIT_OK

    if args.report:
        previous = report_generator.load_report(args.report)
        mismatched = report_generator.check_provenance(previous)
        report.statistics["provenance_mismatches"] = mismatched
        if mismatched:
            logger.error(f"文件摘要不一致: {', '.join(mismatched)}")
            code = EXIT_MISMATCH

    if args.sample:
        if not args.assignment:
            raise DomainError("--sample 需要同时给出 --assignment")
        text, digest = _read(args.sample)
        report.add_input(args.sample, digest)
        sample, numbers = parse_sample_with_lines(text)
        psi = _load_assignment(report, args.assignment)
        predicate = PredicateSpec.not_tkm(args.k, args.m_blocks)
        realized = realize_hypothesis(psi, dnf_of_predicate(predicate), psi.n)
        if sample.m and sample.dim != realized.n_vars:
            raise DomainError(f"样本维度 {sample.dim} 与实现 DNF 的变量数 {realized.n_vars} 不一致")
        wrong = np.flatnonzero(realized.evaluate(sample.instances) != sample.labels) if sample.m else np.zeros(0)
        report.statistics.update({"examples": sample.m, "errors": int(wrong.size)})
        if wrong.size:
            line = numbers[int(wrong[0])]
            report.verdicts["realization"] = "mismatch"
            report.statistics["first_mismatch_line"] = line
            logger.error(f"实现 DNF 在 {args.sample} 第 {line} 行的样例上出错")
            sys.stdout.write(f"{args.sample}:{line}: mismatch\n")
            code = EXIT_MISMATCH
        else:
            report.verdicts["realization"] = "zero-error"

    if not args.report and not args.sample:
        raise DomainError("verify 需要 --report 或 --sample")
    return code, report


# 参数解析

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json-report", help="写出 JSON 运行报告")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--output", help="输出文件(默认 stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsat", description="随机 K-SAT 到 DNF 学习的归约链工具")
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG 日志")
    parser.add_argument("-q", "--quiet", action="store_true", help="只输出 WARNING 以上日志")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="生成随机/混合/种植公式")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--pred", required=True, help="sat3 / tkm2x4 / ntkm2x4")
    gen.add_argument("--seed", type=int, required=True)
    group = gen.add_mutually_exclusive_group()
    group.add_argument("--mixed", action="store_true", help="随机 (P,¬P) 公式")
    group.add_argument("--planted", action="store_true", help="种植可满足公式")
    gen.add_argument("--psi-out", help="种植赋值输出文件")
    _add_output(gen)
    _add_common(gen)
    gen.set_defaults(handler=cmd_gen)

    reduce = commands.add_parser("reduce", help="归约各阶段")
    stages = reduce.add_subparsers(dest="stage", required=True)

    pack = stages.add_parser("pack", help="SAT_K → T_{K,M}")
    pack.add_argument("--input", required=True)
    pack.add_argument("--params", help="K,M,B")
    pack.add_argument("--profile", help="config/profiles 中的档案名")
    pack.add_argument("--remainder", choices=["strict", "truncate"], default="strict")
    _add_output(pack)
    _add_common(pack)
    pack.set_defaults(handler=cmd_reduce_pack)

    negate = stages.add_parser("negate", help="T → (T,¬T)")
    negate.add_argument("--input", required=True)
    negate.add_argument("--seed", type=int, required=True)
    negate.add_argument("--condition-on", help="赋值文件: 新元组在其满足的条件下抽取")
    _add_output(negate)
    _add_common(negate)
    negate.set_defaults(handler=cmd_reduce_negate)

    sample = stages.add_parser("sample", help="(T,¬T) 公式 → 布尔样本")
    sample.add_argument("--input", required=True)
    _add_output(sample)
    _add_common(sample)
    sample.set_defaults(handler=cmd_reduce_sample)

    rpipe = stages.add_parser("pipeline", help="pack → negate → sample")
    rpipe.add_argument("--input", required=True)
    rpipe.add_argument("--params", help="K,M,B")
    rpipe.add_argument("--profile")
    rpipe.add_argument("--seed", type=int, required=True)
    rpipe.add_argument("--condition-on")
    rpipe.add_argument("--remainder", choices=["strict", "truncate"], default="strict")
    _add_output(rpipe)
    _add_common(rpipe)
    rpipe.set_defaults(handler=cmd_reduce_pipeline)

    realize = commands.add_parser("realize", help="由 ψ 构造实现 DNF")
    realize.add_argument("--assignment", required=True)
    realize.add_argument("--pred", default="ntkm2x2")
    realize.add_argument("--complement", action="store_true", help="同时输出补 CNF 的半空间交")
    realize.add_argument("--halfspaces-out")
    _add_output(realize)
    _add_common(realize)
    realize.set_defaults(handler=cmd_realize)

    automata = commands.add_parser("automata", help="DNF → DFA")
    actions = automata.add_subparsers(dest="action", required=True)
    build = actions.add_parser("build")
    build.add_argument("--dnf", required=True)
    build.add_argument("--strict", action="store_true", help="要求子句数 ≤ 变量数")
    _add_output(build)
    _add_common(build)
    build.set_defaults(handler=cmd_automata_build)
    run = actions.add_parser("run")
    run.add_argument("--dfa", required=True)
    run.add_argument("--word", required=True, help="+/- 串")
    run.add_argument("--copies", type=int, default=1)
    _add_common(run)
    run.set_defaults(handler=cmd_automata_run)
    verify_dfa = actions.add_parser("verify")
    verify_dfa.add_argument("--dnf", required=True)
    verify_dfa.add_argument("--strict", action="store_true")
    _add_common(verify_dfa)
    verify_dfa.set_defaults(handler=cmd_automata_verify)

    scatter = commands.add_parser("scatter", help="分散性")
    checks = scatter.add_subparsers(dest="action", required=True)
    hoeffding = checks.add_parser("hoeffding")
    hoeffding.add_argument("--m", type=int, required=True)
    hoeffding.add_argument("--beta", type=float, default=0.25)
    _add_common(hoeffding)
    hoeffding.set_defaults(handler=cmd_scatter_hoeffding)
    bound = checks.add_parser("bound")
    bound.add_argument("--alpha", type=float, required=True)
    bound.add_argument("--beta", type=float, required=True)
    bound.add_argument("--n", type=int, required=True)
    bound.add_argument("--mode", choices=["kl", "quadratic"], default="kl")
    _add_common(bound)
    bound.set_defaults(handler=cmd_scatter_bound)
    check = checks.add_parser("check")
    check.add_argument("--m", type=int, required=True)
    check.add_argument("--dim", type=int, default=8)
    check.add_argument("--hypotheses", type=int, default=20)
    check.add_argument("--beta", type=float, default=0.25)
    check.add_argument("--trials", type=int, default=100_000)
    check.add_argument("--seed", type=int, required=True)
    _add_common(check)
    check.set_defaults(handler=cmd_scatter_check)

    distinguish = commands.add_parser("distinguish", help="运行学习器并对经验误差取阈值")
    distinguish.add_argument("--sample", required=True)
    distinguish.add_argument("--learner", choices=["memorizer", "constant", "bf-dnf", "bf-psi"], required=True)
    distinguish.add_argument("--beta", type=float, default=0.25)
    distinguish.add_argument("--trials", type=int, default=1)
    distinguish.add_argument("--seed", type=int, required=True)
    distinguish.add_argument("--k", type=int, default=2)
    distinguish.add_argument("--m-blocks", type=int, default=2)
    distinguish.add_argument("--max-clauses", type=int, default=2)
    distinguish.add_argument("--draws", default="pac", help="pac / all / 整数")
    distinguish.add_argument("--trials-csv", help="逐次试验 CSV")
    _add_common(distinguish)
    distinguish.set_defaults(handler=cmd_distinguish)

    verify = commands.add_parser("verify", help="校验实现零误差或报告摘要")
    verify.add_argument("--sample")
    verify.add_argument("--assignment")
    verify.add_argument("--k", type=int, default=2)
    verify.add_argument("--m-blocks", type=int, default=2)
    verify.add_argument("--report", help="比对报告中记录的文件摘要")
    _add_common(verify)
    verify.set_defaults(handler=cmd_verify)

    pipeline = commands.add_parser("pipeline", help="生成 SAT_K 实例并运行完整流水线")
    pipeline.add_argument("--n", type=int)
    pipeline.add_argument("--m", type=int)
    pipeline.add_argument("--params", help="K,M,B")
    pipeline.add_argument("--profile")
    pipeline.add_argument("--seed", type=int, required=True)
    pipeline.add_argument("--planted", action=argparse.BooleanOptionalAction, default=None,
                          help="种植侧或随机侧，缺省取 profile 的设置")
    pipeline.add_argument("--unconditioned", action="store_true", help="种植侧取反时不以 ψ 为条件")
    pipeline.add_argument("--out-dir", default=".")
    _add_common(pipeline)
    pipeline.set_defaults(handler=cmd_pipeline)

    return parser


def _error_code(error: Exception) -> int:
    for error_type, code in ERROR_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_OTHER


def cli_main(argv: Optional[List[str]] = None) -> int:
    """CLI 主函数，返回退出码"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.verbose:
        setup_logger(log_level="DEBUG")
    elif args.quiet:
        setup_logger(log_level="WARNING")

    try:
        code, report = args.handler(args)
    except RsatError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return _error_code(e)
    except (ValidationError, KeyError, ValueError, OSError) as e:
        logger.error(f"参数错误: {e}")
        sys.stderr.write(f"rsat: error: {e}\n")
        return EXIT_USAGE

    if args.json_report:
        report_generator.write_report(report, args.json_report)
    return code


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
