# ============================================================================
# app/gallai_covers/tools/cover_tools.py - Pipelines behind the CLI commands
# ============================================================================
import csv
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.models import CSV_COLUMNS, GenSpec, Graph, PathCover, RunRecord, StackingSequence
from ..config.settings import settings
from ..services.apollonian_service import bound_report, build_graph, cover_3tree
from ..services.generator_service import generate
from ..services.graph_service import (
    dump_cover,
    dump_graph,
    dump_stacking,
    endpoint_lower_bound,
    parse_graph,
    parse_stacking,
    verify_cover,
)
from ..services.oracle_service import min_path_cover
from ..services.sp_cover_service import sp_path_cover
from ..services.spqtree_service import normalize, recognize_and_build, to_dot
from ..utils.helpers import ceil_half, ceil_third, get_logger, load_json_data, save_json_data, stopwatch
from ..utils.validators import (
    SP_FAMILIES,
    BudgetExceeded,
    CoverConsistencyError,
    OracleCapExceeded,
    ValidationError,
    validate_family,
    validate_positive,
    validate_sizes,
)

logger = get_logger(__name__)

# status "error" kinds and the exit code the CLI uses for each
EXIT_CODES = {"input": 1, "bound": 2}

_MIN_SIZE = {"sp": 2, "triangle-chain": 3, "3tree-random": 3, "3tree-full": 4,
             "3tree-serpentine": 3, "3tree-all-type-ii": 3}


def _error(kind: str, message: str) -> Dict[str, Any]:
    return {"status": "error", "kind": kind, "message": message}


def _load_host(file_path: str) -> Tuple[Graph, Optional[StackingSequence]]:
    """A graph document, or a stacking document together with the graph it builds"""
    document = load_json_data(file_path)
    if "ops" in document:
        seq = parse_stacking(document)
        return build_graph(seq), seq
    return parse_graph(document), None


def fit_size(family: str, n: int) -> int:
    """Largest admissible size of the family that does not exceed n"""
    if family == "triangle-chain":
        return n if n % 2 else n - 1
    if family == "3tree-full":
        return n - (n - 1) % 3
    if family == "3tree-all-type-ii":
        return n - n % 3
    return n


def records_to_csv(records: Sequence[RunRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(record.as_row())
    return buffer.getvalue()


def _family_checks(family: str, n: int, size: int, seq: Optional[StackingSequence]) -> List[str]:
    """Bounds a family promises beyond the generic record check"""
    problems = []
    if family == "3tree-full" and size > ceil_third(n):
        problems.append(f"full planar 3-tree cover has {size} paths, above ceil(n/3) = {ceil_third(n)}")
    if family == "3tree-serpentine" and size > ceil_half(n):
        problems.append(f"serpentine planar 3-tree cover has {size} paths, above ceil(n/2) = {ceil_half(n)}")
    if seq is not None and seq.ops:
        report = bound_report(seq)
        if report.regime_holds and size > report.five_eighths:
            problems.append(f"cover has {size} paths, above floor(5n/8) = {report.five_eighths}")
        if report.dk_hypothesis is False:
            problems.append(f"beta = {report.beta} is large but n_odd = {report.n_odd} does not exceed n/4")
        if report.leaf_witness is False:
            problems.append(f"{report.leaf_count} leaves do not witness n_odd >= beta + 1")
    return problems


def cover_instance(g: Graph, seq: Optional[StackingSequence],
                   check_invariants: Optional[bool] = None) -> Tuple[PathCover, RunRecord]:
    """Run the pipeline that matches the input class and time it"""
    if seq is None:
        with stopwatch() as timing:
            pc = sp_path_cover(g, check_invariants=check_invariants)
        algorithm, bound = "sp", ceil_half(g.n)
    else:
        with stopwatch() as timing:
            pc, stats = cover_3tree(seq, check_invariants=check_invariants, graph=g)
        algorithm, bound = "3tree", stats.bound

    record = RunRecord(family="file", n=g.n, m=g.m, algorithm=algorithm, size=pc.size, bound=bound,
                       lower_bound=endpoint_lower_bound(g), ms=timing["ms"])
    return pc, record


def run_cover(input_path: str, graph_class: str = "sp", emit: Optional[str] = None,
              dot: Optional[str] = None, report: Optional[str] = None) -> Dict[str, Any]:
    """
    Cover one input file.

    Args:
        input_path (str): graph JSON (class sp) or stacking JSON (class 3tree)
        graph_class (str): "sp" or "3tree"
        emit (str, optional): where to write the cover JSON
        dot (str, optional): where to write the normalised SPQ-tree (class sp)
        report (str, optional): where to write the bound report (class 3tree)

    Returns:
        Dict: status, RunRecord and cover
    """
    logger.info(f"Covering {input_path} as class {graph_class}")

    if graph_class not in ("sp", "3tree"):
        return _error("input", f"unknown class '{graph_class}'. Try: sp, 3tree")

    try:
        document = load_json_data(input_path)
        if graph_class == "sp":
            g, seq = parse_graph(document), None
            if dot:
                to_dot(normalize(recognize_and_build(g))).save(dot)
        else:
            seq = parse_stacking(document)
            g = build_graph(seq)

        pc, record = cover_instance(g, seq)
        verification = verify_cover(g, pc)
        if not verification.valid:
            return _error("bound", f"cover failed verification: {verification.violation}")
        problems = record.violations()
        if problems:
            return _error("bound", "; ".join(problems))

        if emit:
            dump_cover(pc, emit)
        if report and seq is not None:
            save_json_data(bound_report(seq).model_dump(), report)

        return {"status": "success", "record": record, "cover": pc}

    except CoverConsistencyError as e:
        logger.error(f"Internal cover error on {input_path}: {e}")
        return _error("bound", str(e))
    except ValidationError as e:
        logger.warning(f"Rejected {input_path}: {e}")
        return _error("input", str(e))
    except (OSError, ValueError) as e:
        logger.warning(f"Could not read {input_path}: {e}")
        return _error("input", str(e))


def run_verify(graph_path: str, cover_path: str) -> Dict[str, Any]:
    """Check a cover file against a graph (or stacking) file"""
    logger.info(f"Verifying {cover_path} against {graph_path}")

    try:
        g, _ = _load_host(graph_path)
        pc = PathCover.model_validate(load_json_data(cover_path))
    except (ValidationError, OSError, ValueError) as e:
        return _error("input", str(e))

    verification = verify_cover(g, pc)
    if not verification.valid:
        return _error("input", verification.violation)
    return {"status": "success", "report": verification}


def run_gen(family: str, size: int, seed: Optional[int] = None, output: Optional[str] = None) -> Dict[str, Any]:
    """Generate one instance and optionally write it"""
    seed = settings.SEED if seed is None else seed
    logger.info(f"Generating {family} instance of size {size} (seed={seed})")

    is_valid, error_msg = validate_family(family)
    if not is_valid:
        return _error("input", error_msg)
    is_valid, error_msg = validate_positive(size, "size", minimum=_MIN_SIZE[family])
    if not is_valid:
        return _error("input", error_msg)

    try:
        instance = generate(GenSpec(family=family, size=size, seed=seed))
    except ValidationError as e:
        return _error("input", str(e))

    if output:
        if isinstance(instance, Graph):
            dump_graph(instance, output)
        else:
            dump_stacking(instance, output)
    return {"status": "success", "document": instance.to_document(), "instance": instance}


def run_instance(spec: GenSpec, oracle_cap: int) -> Tuple[RunRecord, List[str]]:
    """Generate, cover, verify and cross-check one instance; never raises on a bad cover"""
    instance = generate(spec)
    if isinstance(instance, Graph):
        g, seq = instance, None
    else:
        g, seq = build_graph(instance), instance

    algorithm = "sp" if spec.family in SP_FAMILIES else "3tree"
    try:
        pc, record = cover_instance(g, seq)
    except CoverConsistencyError as e:
        record = RunRecord(family=spec.family, n=g.n, m=g.m, algorithm=algorithm, size=0,
                           bound=0, lower_bound=endpoint_lower_bound(g))
        return record, [f"{spec.label()}: {e}"]

    oracle = None
    if g.m <= oracle_cap:
        try:
            oracle = min_path_cover(g, edge_cap=oracle_cap).min_size
        except (BudgetExceeded, OracleCapExceeded) as e:
            logger.warning(f"Oracle skipped on {spec.label()}: {e}")

    record = record.model_copy(update={"family": spec.family, "oracle": oracle})
    problems = record.violations()
    verification = verify_cover(g, pc)
    if not verification.valid:
        problems.append(verification.violation)
    problems.extend(_family_checks(spec.family, g.n, pc.size, seq))
    return record, [f"{spec.label()}: {p}" for p in problems]


def _map(specs: List[GenSpec], oracle_cap: int, workers: int) -> List[Tuple[RunRecord, List[str]]]:
    """Results in instance order whatever the completion order"""
    if workers <= 1 or len(specs) <= 1:
        return [run_instance(spec, oracle_cap) for spec in specs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run_instance, specs, [oracle_cap] * len(specs)))


def fuzz_specs(family: str, count: int, max_n: int, seed: int) -> List[GenSpec]:
    """Deterministic instance list: sizes and per-instance seeds come from one seeded stream"""
    rng = random.Random(f"fuzz:{family}:{max_n}:{seed}")
    low = _MIN_SIZE[family]
    specs = []
    for _ in range(count):
        size = max(low, fit_size(family, rng.randint(low, max_n)))
        specs.append(GenSpec(family=family, size=size, seed=rng.randrange(2 ** 31)))
    return specs


def run_fuzz(family: str, count: int = 100, max_n: int = 40, seed: Optional[int] = None,
             oracle_cap: Optional[int] = None, workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Generate `count` instances, cover and verify each, check the bounds and
    compare with the oracle whenever the instance has at most `oracle_cap` edges.

    Returns:
        Dict: status, records (in instance order) and violations
    """
    seed = settings.SEED if seed is None else seed
    oracle_cap = settings.ORACLE_EDGE_CAP if oracle_cap is None else oracle_cap
    workers = settings.FUZZ_WORKERS if workers is None else workers
    logger.info(f"Fuzzing {count} {family} instances up to n={max_n} (seed={seed}, workers={workers})")

    is_valid, error_msg = validate_family(family)
    if not is_valid:
        return _error("input", error_msg)
    for value, name, minimum in ((count, "count", 1), (max_n, "max-n", _MIN_SIZE[family]),
                                 (oracle_cap, "oracle-cap", 0), (workers, "workers", 1)):
        is_valid, error_msg = validate_positive(value, name, minimum=minimum)
        if not is_valid:
            return _error("input", error_msg)

    results = _map(fuzz_specs(family, count, max_n, seed), oracle_cap, workers)
    records = [record for record, _ in results]
    violations = [problem for _, problems in results for problem in problems]

    if violations:
        logger.error(f"Fuzzing found {len(violations)} violations")
        return {"status": "error", "kind": "bound", "message": f"{len(violations)} violations",
                "records": records, "violations": violations}
    logger.info(f"Fuzzing passed on {len(records)} instances")
    return {"status": "success", "records": records, "violations": []}


def scaling_summary(records: Sequence[RunRecord]) -> Tuple[List[float], Optional[float]]:
    """Time ratios between consecutive sizes and the log-log slope of time against n"""
    ratios = [b.ms / a.ms if a.ms > 0 else math.inf for a, b in zip(records, records[1:])]
    if len(records) < 2 or any(r.ms <= 0 for r in records) or len({r.n for r in records}) < 2:
        return ratios, None
    slope, _ = np.polyfit(np.log([r.n for r in records]), np.log([r.ms for r in records]), 1)
    return ratios, float(slope)


def _bench_one(spec: GenSpec, repeats: int) -> RunRecord:
    instance = generate(spec)
    if isinstance(instance, Graph):
        g, seq = instance, None
    else:
        g, seq = build_graph(instance), instance
    best = None
    for _ in range(repeats):
        _, record = cover_instance(g, seq)
        if best is None or record.ms < best.ms:
            best = record
    return best.model_copy(update={"family": spec.family})


def run_bench(family: str, sizes: Sequence[int], seed: Optional[int] = None,
              repeats: Optional[int] = None, workers: int = 1) -> Dict[str, Any]:
    """
    Time the cover pipeline on one instance per size (best of `repeats`).

    Returns:
        Dict: status, records, ratios between consecutive sizes and the fitted slope
    """
    seed = settings.SEED if seed is None else seed
    repeats = settings.BENCH_REPEATS if repeats is None else repeats
    logger.info(f"Benchmarking {family} on sizes {list(sizes)} (seed={seed})")

    is_valid, error_msg = validate_family(family)
    if not is_valid:
        return _error("input", error_msg)
    is_valid, error_msg = validate_sizes(sizes)
    if not is_valid:
        return _error("input", error_msg)
    is_valid, error_msg = validate_positive(repeats, "repeats")
    if not is_valid:
        return _error("input", error_msg)

    specs = [GenSpec(family=family, size=max(_MIN_SIZE[family], fit_size(family, n)), seed=seed) for n in sizes]
    try:
        if workers <= 1:
            records = [_bench_one(spec, repeats) for spec in specs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                records = list(ex.map(_bench_one, specs, [repeats] * len(specs)))
    except CoverConsistencyError as e:
        logger.error(f"Benchmark run failed: {e}")
        return _error("bound", str(e))

    ratios, slope = scaling_summary(records)
    if slope is not None:
        logger.info(f"Benchmark log-log slope {slope:.2f}")
    return {"status": "success", "records": records, "ratios": ratios, "slope": slope}


def run_oracle(input_path: str, node_limit: Optional[int] = None,
               edge_cap: Optional[int] = None) -> Dict[str, Any]:
    """Exact minimum path cover of a small graph (or stacking) file"""
    logger.info(f"Running the oracle on {input_path}")

    try:
        g, _ = _load_host(input_path)
        result = min_path_cover(g, node_limit=node_limit, edge_cap=edge_cap)
    except (BudgetExceeded, OracleCapExceeded) as e:
        logger.warning(f"Oracle gave up on {input_path}: {e}")
        return _error("input", str(e))
    except (ValidationError, OSError, ValueError) as e:
        return _error("input", str(e))

    return {"status": "success", "result": result, "lower_bound": endpoint_lower_bound(g)}
