"""
Command-line front end for the supercharacter toolkit.

    python supercharacter_cli.py restrict --q 2 --L 1..10 --K 1,4,5,6,7,9 \
        --arcs 1-1-3,2-1-10,4-1-7,7-1-9,3-1-8,5-1-6 --coeff-of ""

Exit codes: 0 success, 1 usage or parse error, 2 precondition violation,
3 verification failure.
"""
import sys
import json
import shlex
import logging
import argparse
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import pandas as pd

import config
from combinatorics import (
    ALTERNATE_PRIORITY,
    DEFAULT_PRIORITY,
    NodeSet,
    PrimeModulus,
    QSetPartition,
    conjugate,
    enumerate_set_partitions,
    multiset_union,
    parse_multiset,
    parse_nodes,
    q_stirling_by_recursion,
)
from decomposition import expand, restrict, tensor
from matching import certify, perturb_labels, restriction_certificate, tensor_certificate
from straightening import straighten
from character_values import (
    MultisetCharacter,
    Restriction,
    TensorProduct,
    char_value,
    superclass_values,
    verify_pointwise,
)
from conflict_poset import down_set, one_step_descents
from explicit_coefficients import (
    corollary_trivial_coefficient,
    explicit_trivial_coefficient,
    significant_crossings,
)
from sweeps import SWEEPS, trivial_coefficient_sweep
from errors import GuardExceededError, ParseError, SupercharError, VerificationError

logger = logging.getLogger(__name__)

COMMANDS = (
    "restrict", "tensor", "expand", "nonzero-trivial", "nonzero-tensor", "nonzero-restriction",
    "gamma", "straighten", "explicit", "poset-steps", "enumerate", "value", "verify",
)
PRIORITIES = {"default": DEFAULT_PRIORITY, "alternate": ALTERNATE_PRIORITY}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; usage errors here are parse errors (exit 1)."""

    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class Request:
    """One parsed invocation; every multiset already checked against its node set."""
    command: str
    q: int
    K: Optional[NodeSet] = None
    L: Optional[NodeSet] = None
    arcs: Optional[str] = None
    a: Optional[str] = None
    b: Optional[str] = None
    mu: Optional[str] = None
    nu: Optional[str] = None
    coeff_of: Optional[str] = None
    superclass: Optional[str] = None
    verify: bool = False
    witness: bool = False
    fmt: str = "json"
    depth: int = 1
    priority: str = "default"
    arc_count: Optional[int] = None
    max_arcs: Optional[int] = None
    sweep: Optional[int] = None
    suite: str = "trivial"
    n: Optional[int] = None

    @classmethod
    def from_args(cls, args):
        q = PrimeModulus(args.q).q
        fields = {name: getattr(args, name, None) for name in (
            "arcs", "a", "b", "mu", "nu", "coeff_of", "superclass", "arc_count", "max_arcs", "sweep", "n")}
        K = parse_nodes(args.K) if getattr(args, "K", None) is not None else None
        L = parse_nodes(args.L) if getattr(args, "L", None) is not None else None
        return cls(
            command=args.command, q=q, K=K, L=L,
            verify=args.verify, witness=args.witness, fmt=args.format,
            depth=getattr(args, "depth", None) or 1,
            priority=getattr(args, "priority", None) or "default",
            suite=getattr(args, "suite", None) or "trivial",
            **fields,
        )

    def need(self, name):
        value = getattr(self, name)
        if value is None:
            raise ParseError(f"{self.command} needs --{name.replace('_', '-')}")
        return value

    def multiset(self, name, support, partition=False):
        return parse_multiset(self.need(name), self.q, support=support, partition=partition)

    def optional_partition(self, name, support):
        text = getattr(self, name)
        if text is None:
            return None
        return parse_multiset(text, self.q, support=support, partition=True)


class SupercharacterTool:
    """Dispatches a Request to the library and shapes the result for output."""

    def __init__(self, request):
        self.request = request

    def run(self):
        handler = getattr(self, "cmd_" + self.request.command.replace("-", "_"))
        logger.info(f"running {self.request.command} over q={self.request.q}")
        return handler()

    # -- decompositions -----------------------------------------------------

    def _combination_result(self, comb, target):
        if target is not None:
            return comb.coefficient(target)
        return comb.to_dict()

    def _check_certificate(self, certificate, coeff, what):
        if certificate.nonzero != (coeff > 0):
            raise VerificationError(
                f"{what}: matching certificate says {certificate.nonzero}, oracle coefficient is {coeff}"
            )

    def cmd_restrict(self):
        r = self.request
        K, L = r.need("K"), r.need("L")
        partition = r.multiset("arcs", L, partition=True)
        target = r.optional_partition("coeff_of", K)
        comb = restrict(partition, K, L)
        if r.verify:
            if not verify_pointwise(Restriction(partition, L), comb):
                raise VerificationError("restriction fails the pointwise character check")
            sub = target if target is not None else QSetPartition((), r.q, K)
            self._check_certificate(restriction_certificate(partition, sub, K, L),
                                    comb.coefficient(sub), "restrict")
        return self._combination_result(comb, target)

    def cmd_tensor(self):
        r = self.request
        K = r.need("K")
        first = r.multiset("a", K, partition=True)
        second = r.multiset("b", K, partition=True)
        target = r.optional_partition("coeff_of", K)
        comb = tensor(first, second, K)
        if r.verify:
            if not verify_pointwise(TensorProduct(first, second), comb):
                raise VerificationError("tensor product fails the pointwise character check")
            nu = target if target is not None else QSetPartition((), r.q, K)
            self._check_certificate(tensor_certificate(first, second, nu, K), comb.coefficient(nu), "tensor")
        return self._combination_result(comb, target)

    def cmd_expand(self):
        r = self.request
        K = r.need("K")
        multiset = r.multiset("arcs", K)
        target = r.optional_partition("coeff_of", K)
        comb = expand(multiset, K, PRIORITIES[r.priority])
        if r.verify:
            if not verify_pointwise(MultisetCharacter(multiset), comb):
                raise VerificationError("expansion fails the pointwise character check")
            other = "alternate" if r.priority == "default" else "default"
            if expand(multiset, K, PRIORITIES[other]) != comb:
                raise VerificationError("expansion depends on the conflict order")
            nu = target if target is not None else QSetPartition((), r.q, K)
            combined = multiset_union(multiset.with_support(K), conjugate(nu).with_support(K))
            self._check_certificate(certify(combined, K), comb.coefficient(nu), "expand")
        return self._combination_result(comb, target)

    # -- certificates -------------------------------------------------------

    def _certificate_result(self, certificate, oracle):
        if self.request.verify:
            self._check_certificate(certificate, oracle(), self.request.command)
        if self.request.witness:
            return certificate.to_dict()
        return {"nonzero": certificate.nonzero}

    def cmd_nonzero_trivial(self):
        r = self.request
        K, L = r.need("K"), r.need("L")
        partition = r.multiset("arcs", L, partition=True)
        empty = QSetPartition((), r.q, K)
        certificate = restriction_certificate(partition, empty, K, L)
        return self._certificate_result(certificate, lambda: restrict(partition, K, L).coefficient(()))

    def cmd_nonzero_restriction(self):
        r = self.request
        K, L = r.need("K"), r.need("L")
        partition = r.multiset("arcs", L, partition=True)
        sub = r.multiset("mu", K, partition=True)
        certificate = restriction_certificate(partition, sub, K, L)
        return self._certificate_result(certificate, lambda: restrict(partition, K, L).coefficient(sub))

    def cmd_nonzero_tensor(self):
        r = self.request
        K = r.need("K")
        first = r.multiset("a", K, partition=True)
        second = r.multiset("b", K, partition=True)
        nu = r.multiset("nu", K, partition=True)
        certificate = tensor_certificate(first, second, nu, K)
        return self._certificate_result(certificate, lambda: tensor(first, second, K).coefficient(nu))

    def cmd_gamma(self):
        r = self.request
        K = r.need("K")
        multiset = r.multiset("arcs", r.L if r.L is not None else K)
        certificate = certify(multiset, K)
        data = certificate.to_dict() if r.witness else {"nonzero": certificate.nonzero,
                                                          "graph": certificate.graph.to_dict()}
        data["labels"] = [v.to_text() for v in perturb_labels(multiset, K)]
        return data

    # -- straightening and closed forms --------------------------------------

    def cmd_straighten(self):
        r = self.request
        K = r.need("K")
        result = straighten(r.multiset("arcs", K), K, PRIORITIES[r.priority])
        if r.verify:
            result.check_identity()
        return result.to_dict()

    def cmd_explicit(self):
        r = self.request
        K = r.need("K")
        if r.L is not None:
            partition = r.multiset("arcs", r.L, partition=True)
            value = explicit_trivial_coefficient(partition, K, r.L)
            oracle = lambda: restrict(partition, K, r.L).coefficient(())  # noqa: E731
            crossing_set = significant_crossings(partition, K)
        else:
            multiset = r.multiset("arcs", K)
            value = corollary_trivial_coefficient(multiset, K)
            oracle = lambda: expand(multiset, K).coefficient(())  # noqa: E731
            crossing_set = significant_crossings(multiset, K)
        if r.verify and oracle() != value:
            raise VerificationError(f"closed form {value} disagrees with the oracle")
        return {"coefficient": value, "significant_crossings": crossing_set.to_list()}

    def cmd_poset_steps(self):
        r = self.request
        K = r.need("K")
        multiset = r.multiset("arcs", r.L if r.L is not None else K)
        if r.depth <= 1:
            return [step.to_text() for step in one_step_descents(multiset, K)]
        return down_set(multiset, K, r.depth).to_dict()

    # -- enumeration and values ---------------------------------------------

    def cmd_enumerate(self):
        r = self.request
        K = r.need("K")
        partitions = [p.to_text() for p in enumerate_set_partitions(K, r.q, arc_count=r.arc_count)
                      if r.max_arcs is None or len(p) <= r.max_arcs]
        if r.verify and r.arc_count is None and r.max_arcs is None:
            expected = int(q_stirling_by_recursion(len(K), r.q)[len(K)].sum())
            if len(partitions) != expected:
                raise VerificationError("enumeration disagrees with the q-Stirling count")
        return partitions

    def cmd_value(self):
        r = self.request
        K = r.need("K")
        character = r.multiset("arcs", K)
        if r.superclass is not None:
            superclass = parse_multiset(r.superclass, r.q, support=K, partition=True)
            return {superclass.to_text(): char_value(character, superclass, K).to_list()}
        return {nu.to_text(): value.to_list() for nu, value in superclass_values(character, K)}

    def cmd_verify(self):
        r = self.request
        if r.sweep is not None:
            report = trivial_coefficient_sweep(r.sweep, r.q)
        else:
            if r.suite not in SWEEPS:
                raise ParseError(f"unknown suite {r.suite!r}; choose from {', '.join(sorted(SWEEPS))}")
            report = SWEEPS[r.suite](r.need("n"), r.q, False)
        logger.info(f"{report.name}: {report.instances} instances, {len(report.mismatches)} mismatches")
        if not report.ok:
            raise VerificationError(f"{report.name}: {len(report.mismatches)} mismatches, first {report.mismatches[0]}")
        return report.to_dict()


# ---------------------------------------------------------------------------
# Argument parsing and output
# ---------------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--q", type=int, default=2, help="field size (a prime)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--verify", action="store_true", help="cross-check against independent computations")
    common.add_argument("--witness", action="store_true", help="include matchings / Hall violators")

    parser = _Parser(prog="supercharacter_cli", description="Supercharacter decompositions for U_n(q)")
    parser.add_argument("--batch", help="file with one command line per request")
    parser.add_argument("--log-level", type=str.upper, choices=("DEBUG", "INFO", "WARNING", "ERROR"),
                        help="override SUPERCHAR_LOG_LEVEL")
    parser.add_argument("--format", choices=("json", "text"), default="json", dest="batch_format")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, *options):
        sub = commands.add_parser(name, parents=[common])
        for option in options:
            sub.add_argument(option)
        return sub

    command("restrict", "--K", "--L", "--arcs", "--coeff-of")
    command("tensor", "--K", "--a", "--b", "--coeff-of")
    command("expand", "--K", "--arcs", "--coeff-of").add_argument(
        "--priority", choices=tuple(PRIORITIES), default="default")
    command("nonzero-trivial", "--K", "--L", "--arcs")
    command("nonzero-tensor", "--K", "--a", "--b", "--nu")
    command("nonzero-restriction", "--K", "--L", "--arcs", "--mu")
    command("gamma", "--K", "--L", "--arcs")
    command("straighten", "--K", "--arcs").add_argument(
        "--priority", choices=tuple(PRIORITIES), default="default")
    command("explicit", "--K", "--L", "--arcs")
    command("poset-steps", "--K", "--L", "--arcs").add_argument("--depth", type=int, default=1)
    enum = command("enumerate", "--K")
    enum.add_argument("--arc-count", type=int, help="only partitions with exactly this many arcs")
    enum.add_argument("--max-arcs", type=int, help="only partitions with at most this many arcs")
    command("value", "--K", "--arcs", "--superclass")
    check = command("verify")
    check.add_argument("--sweep", type=int, help="exhaustive trivial-coefficient sweep over [1, N]")
    check.add_argument("--suite", default="trivial")
    check.add_argument("--n", type=int)
    return parser


def _cell(value):
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    return value


def render(result, fmt):
    if fmt == "json":
        return json.dumps(result, sort_keys=True, ensure_ascii=False)
    if isinstance(result, dict):
        if not result:
            return "(empty)"
        rows = [(key if key != "" else "∅", _cell(value)) for key, value in sorted(result.items())]
        return pd.DataFrame(rows, columns=["key", "value"]).to_string(index=False)
    if isinstance(result, list):
        return "\n".join(str(item) for item in result)
    return str(result)


def run_batch(path, fmt):
    try:
        with open(path) as handle:
            lines = [line.strip() for line in handle]
    except OSError as e:
        raise ParseError(f"cannot read batch file {path}: {e}")
    requests = []
    for line in lines:
        if not line or line.startswith("#"):
            continue
        argv = shlex.split(line)
        if "--format" not in argv and len(argv) > 0:
            argv = argv[:1] + ["--format", fmt] + argv[1:]
        requests.append(argv)
    with ThreadPoolExecutor(max_workers=config.BATCH_WORKERS) as pool:
        results = list(pool.map(run, requests))
    outputs = [text for text, _ in results]
    code = max((c for _, c in results), default=0)
    return "\n".join(outputs), code


def run(argv):
    """Parse, dispatch and render one invocation; returns (output text, exit code)."""
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            logging.getLogger().setLevel(args.log_level)
        if args.batch:
            return run_batch(args.batch, args.batch_format)
        if args.command is None:
            raise ParseError(f"a command is required: {', '.join(COMMANDS)}")
        request = Request.from_args(args)
        result = SupercharacterTool(request).run()
        return render(result, request.fmt), 0
    except SupercharError as e:
        logging.error(f"❌ {type(e).__name__}: {e}")
        return "", e.exit_code
    except RecursionError:
        logging.error("❌ GuardExceededError: input nests deeper than the interpreter allows")
        return "", GuardExceededError.exit_code
    except SystemExit as e:
        # --help
        return "", int(e.code or 0)


def main(argv=None):
    config.setup_logging()
    try:
        output, code = run(sys.argv[1:] if argv is None else argv)
    except Exception as e:
        logging.error(f"❌ Unexpected error: {str(e)}")
        output, code = "", VerificationError.exit_code
    if output:
        print(output)
    sys.exit(code)


if __name__ == "__main__":
    main()
