#!/usr/bin/env python3
"""
Command-line experiment runner for FreeWalk

Every subcommand writes JSON and/or CSV artifacts into --out. Exit status:
0 success, 1 a checked identity failed, 2 bad input, 3 enumeration budget
exceeded.

Example:
    python run_freewalk.py defect green --d 2 --A explicit:e --k e --E explicit:e
    python run_freewalk.py growth --d 2 --set sigma --rmax 12
"""

import argparse
import logging
import sys
from collections import Counter
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .config import ExperimentConfig, build_config
from .data_types import (
    DEFAULT_ENUMERATION_BUDGET,
    BudgetExceededError,
    FreeWalkError,
    GreenVariant,
    IdentityCheckError,
    OutputFormat,
    SpecParseError,
    fraction_to_str,
)
from .green import find_small_translate, green_at
from .martin import (
    exact_to_float,
    exact_to_str,
    expected_lightness_sum,
    harmonic_check_kernel,
    hitting_cylinder,
    kernel_value,
    lightness_partial_sums,
    sample_rays,
    sphere_average_bound,
    sphere_sqrt_sum,
)
from .serializer import ArtifactWriter
from .sets import SubsetSpec, aaa_lower_bound, aaa_sphere_count, growth_rates, psi_injectivity_test
from .stationary import (
    GreenTranslateMeasure,
    MKAverage,
    gt_defect_identity,
    mk_defect_identity,
)
from .verification import verify_all
from .words import ReducedWord, sphere

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IDENTITY_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_BUDGET_EXCEEDED = 3


class UsageError(SpecParseError):
    """argparse rejected the command line"""


class _Parser(argparse.ArgumentParser):
    # Surface usage errors as exceptions so main() owns the exit status
    def error(self, message):
        raise UsageError(message)


def _float(value) -> float:
    return float(Fraction(value))


class ExperimentRunner:
    """Runs one command against a config and records artifacts and failures"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.writer = ArtifactWriter(config.output_dir, config.format)
        self.results: Dict[str, Any] = {'artifacts': self.writer.written, 'failures': []}

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def subset(self, role: str, default: Optional[str] = None) -> SubsetSpec:
        text = self.config.sets.get(role, default)
        if text is None:
            raise SpecParseError(f"Missing subset spec --{role}")
        return SubsetSpec.parse(self.config.d, text)

    def window(self, role: str, default: Optional[str] = None) -> List[ReducedWord]:
        return self.subset(role, default).materialize(self.config.set_radius, self.config.budget)

    def emit(self, name: str, command: str, payload: Any, header: List[str], rows: List[List[Any]]):
        self.writer.write_json(name, command, self.config.to_dict(), payload)
        self.writer.write_csv(name, header, rows)

    def fail(self, message: str):
        logger.error(message)
        self.results['failures'].append(message)

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def run_green(self):
        model = self.config.green_model()
        points = [(g, green_at(model, g)) for g in self.window('E', 'all')]
        payload = {
            'model': model.to_dict(),
            'points': [{'word': str(g), 'value': fraction_to_str(v)} for g, v in points],
        }
        rows = [[str(g), fraction_to_str(v), _float(v)] for g, v in points]
        self.emit("green", "green", payload, ['word', 'value', 'value_float'], rows)

    def run_translate_search(self):
        model = self.config.green_model()
        target = self.window('A')
        steps = find_small_translate(model, target, self.config.require('radius'))
        payload = {
            'model': model.to_dict(),
            'A': [str(g) for g in target],
            'steps': [{'r': s.r, 'k': str(s.k), 'value': fraction_to_str(s.value)} for s in steps],
        }
        rows = [[s.r, str(s.k), fraction_to_str(s.value), _float(s.value)] for s in steps]
        self.emit("translate_search", "translate-search", payload, ['r', 'k', 'value', 'value_float'], rows)

    def run_defect(self, kind: str):
        target = frozenset(self.window('A'))
        windows = [
            SubsetSpec.parse(self.config.d, text).materialize(self.config.set_radius, self.config.budget)
            for key, text in sorted(self.config.sets.items()) if key.startswith('E')
        ]
        windows = sorted((w for w in windows if w), key=lambda w: ','.join(str(g) for g in w))
        if kind == "mk":
            average = MKAverage(self.config.step_measure(), target, self.config.require('steps'))
            reports = [mk_defect_identity(average, window) for window in windows]
        else:
            measure = GreenTranslateMeasure(self.config.green_model(), self.config.word('k'), target)
            reports = [gt_defect_identity(measure, window) for window in windows]
        for report in reports:
            if not report.holds:
                self.fail(f"{kind} defect identity failed on E={{{','.join(str(g) for g in report.window)}}}")
        rows = [
            [','.join(str(g) for g in r.window), fraction_to_str(r.lhs), fraction_to_str(r.rhs),
             r.exact_match, r.holds, _float(r.lhs)]
            for r in reports
        ]
        self.emit(f"defect_{kind}", f"defect {kind}", [r.to_dict() for r in reports],
                  ['E', 'lhs', 'rhs', 'exact_match', 'holds', 'lhs_float'], rows)

    def run_kernel(self):
        rays = self.config.parsed_rays()
        if not rays:
            raise SpecParseError("kernel needs at least one --ray")
        points = self.window('E', 'all')
        payload, rows = [], []
        for w in rays:
            defect = harmonic_check_kernel(w, points)
            if defect != 0:
                self.fail(f"Kernel of ray {w} is not harmonic on the window (defect {defect})")
            values = [(g, kernel_value(w, g)) for g in points]
            payload.append({
                'ray': str(w),
                'harmonicity_defect': fraction_to_str(defect),
                'points': [{'word': str(g), 'exponent': kv.exponent} for g, kv in values],
            })
            rows.extend([str(w), str(g), kv.exponent, fraction_to_str(kv.value), _float(kv.value)]
                        for g, kv in values)
        self.emit("kernel", "kernel", payload, ['ray', 'word', 'exponent', 'value', 'value_float'], rows)

    def run_lightness(self):
        spec = self.subset('set')
        radius_max = self.config.require('radius')
        tables = {str(w): lightness_partial_sums(w, spec, radius_max, self.config.budget)
                  for w in self.config.parsed_rays()}
        expected = expected_lightness_sum(spec, radius_max, self.config.budget)
        payload = {
            'set': str(spec),
            'rays': {ray: {'trend': t.trend.value, 'rows': t.to_rows()} for ray, t in tables.items()},
            'expected': {'trend': expected.trend.value, 'rows': expected.to_rows()},
        }
        rows = []
        for label, table in list(tables.items()) + [('expected', expected)]:
            rows.extend([label, row.radius, exact_to_str(row.value), exact_to_float(row.value), table.trend.value]
                        for row in table.rows)
        self.emit("lightness", "lightness", payload, ['ray', 'R', 'value', 'value_float', 'trend'], rows)

    def run_zeta_sample(self):
        seed = self.config.require('seed')
        d, length = self.config.d, self.config.length
        samples = sample_rays(d, length, self.config.samples, seed)
        frequencies = Counter(ReducedWord(d, g.codes[:1]) for g in samples)
        payload = {
            'seed': seed,
            'samples': [str(g) for g in samples],
            'first_letter': {
                str(letter): {'count': frequencies.get(letter, 0),
                              'expected': fraction_to_str(hitting_cylinder(d, letter))}
                for letter in sphere(d, 1)
            },
        }
        rows = [[i, str(g)] for i, g in enumerate(samples)]
        self.emit("zeta_sample", "zeta-sample", payload, ['index', 'prefix'], rows)

    def run_growth(self):
        spec = self.subset('set')
        report = growth_rates(spec, self.config.require('radius'), self.config.budget)
        payload = {'set': str(spec), **report.to_dict()}
        rows = [[r, count] for r, count in zip(report.radii, report.counts)]
        self.emit("growth", "growth", payload, ['r', 'count'], rows)
        print(f"{spec}: lower {report.lower_est:.4f} upper {report.upper_est:.4f}")

    def run_injectivity(self):
        n = self.config.steps or 2
        radius = self.config.require('radius')
        report = psi_injectivity_test(n, radius, self.config.d, self.config.budget)
        if not report.passed:
            self.fail(f"Product map on A_1 x ... x A_{n} is not injective within B_{radius}")
        d = self.config.d
        counts = {r: aaa_sphere_count(d, r, check_bound=False) for r in range(1, radius + 1)}
        bounds = {r: aaa_lower_bound(d, r) for r in counts}
        for r, count in counts.items():
            if bounds[r] is not None and count < bounds[r]:
                self.fail(f"|A_a^a cap S_{r}| = {count} is below the lower bound {bounds[r]}")
        payload = {**report.to_dict(), 'aaa_sphere_counts': {str(r): c for r, c in counts.items()}}
        rows = [[r, c, '' if bounds[r] is None else bounds[r]] for r, c in counts.items()]
        self.emit("injectivity", "injectivity", payload, ['r', 'aaa_count', 'lower_bound'], rows)

    def run_sphere_sum(self):
        rays = self.config.parsed_rays()
        if not rays:
            raise SpecParseError("sphere-sum needs at least one --ray")
        radius_max = self.config.require('radius')
        payload, rows = [], []
        for w in rays:
            for r in range(radius_max + 1):
                total = sphere_sqrt_sum(self.config.d, r, w, self.config.budget)
                bound = sphere_average_bound(self.config.d, r, w, budget=self.config.budget) if r >= 1 else None
                payload.append({'ray': str(w), 'r': r, 'sum': total.to_dict(), 'average_bound': bound})
                rows.append([str(w), r, str(total), total.numeric(), '' if bound is None else bound])
        self.emit("sphere_sum", "sphere-sum", payload, ['ray', 'r', 'sum', 'sum_float', 'average_bound'], rows)

    def run_verify_all(self):
        results = verify_all(self.config.quick)
        for result in results:
            if not result.passed:
                self.fail(f"Check {result.name} failed: {result.detail}")
        rows = [[r.name, r.passed, r.detail] for r in results]
        self.emit("verify_all", "verify-all", [r.to_dict() for r in results], ['check', 'passed', 'detail'], rows)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")

    def run(self, command: str, defect_kind: Optional[str] = None) -> int:
        handlers = {
            'green': self.run_green,
            'translate-search': self.run_translate_search,
            'kernel': self.run_kernel,
            'lightness': self.run_lightness,
            'zeta-sample': self.run_zeta_sample,
            'growth': self.run_growth,
            'injectivity': self.run_injectivity,
            'sphere-sum': self.run_sphere_sum,
            'verify-all': self.run_verify_all,
        }
        if command == 'defect':
            self.run_defect(defect_kind)
        else:
            handlers[command]()
        return EXIT_IDENTITY_FAILED if self.results['failures'] else EXIT_OK

# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--d', type=int, help='Rank of the free group (default 2)')
    common.add_argument('--model', choices=[v.value for v in GreenVariant], help='Green function model')
    common.add_argument('--N', dest='truncation', type=int, help='Truncation depth of the Green series')
    common.add_argument('--set-radius', type=int, help='Radius at which subset specs are materialized')
    common.add_argument('--out', dest='output_dir', help='Output directory (default freewalk_output)')
    common.add_argument('--format', dest='output_format', choices=[f.value for f in OutputFormat],
                        help='Artifact format')
    common.add_argument('--budget', type=int, help=f'Word enumeration budget (default {DEFAULT_ENUMERATION_BUDGET})')
    common.add_argument('--config', dest='config_file', help='YAML configuration file')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog='freewalk', description='Exact experiments with random walks on free groups')
    parser.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    green = commands.add_parser('green', parents=[common], help='Green function values')
    green.add_argument('--E', help='Points to evaluate (subset spec, default all)')

    search = commands.add_parser('translate-search', parents=[common], help='Translates k minimizing G^k(A)')
    search.add_argument('--A', required=True, help='Subset spec for A')
    search.add_argument('--rmax', dest='radius', type=int, required=True)

    defect = commands.add_parser('defect', parents=[common], help='Stationarity defect identities')
    defect.add_argument('kind', choices=['mk', 'green'])
    defect.add_argument('--A', required=True, help='Subset spec for A')
    defect.add_argument('--E', action='append', default=[], help='Subset spec for E (repeatable)')
    defect.add_argument('--n', dest='steps', type=int, help='Average length (mk)')
    defect.add_argument('--k', help='Translate (green, default e)')

    kernel = commands.add_parser('kernel', parents=[common], help='Martin kernel values and harmonicity')
    kernel.add_argument('--ray', action='append', default=[], help='Ray as prefix|period (repeatable)')
    kernel.add_argument('--E', help='Points to evaluate (subset spec, default all)')

    lightness = commands.add_parser('lightness', parents=[common], help='Kernel partial sums over a subset')
    lightness.add_argument('--set', required=True, help='Subset spec')
    lightness.add_argument('--ray', action='append', default=[], help='Ray as prefix|period (repeatable)')
    lightness.add_argument('--rmax', dest='radius', type=int, required=True)

    sample = commands.add_parser('zeta-sample', parents=[common], help='Sample boundary prefixes')
    sample.add_argument('--length', type=int, required=True)
    sample.add_argument('--count', dest='samples', type=int)
    sample.add_argument('--seed', type=int)

    growth = commands.add_parser('growth', parents=[common], help='Growth-rate estimates')
    growth.add_argument('--set', required=True, help='Subset spec')
    growth.add_argument('--rmax', dest='radius', type=int, required=True)

    injectivity = commands.add_parser('injectivity', parents=[common], help='Product injectivity of A_n')
    injectivity.add_argument('--n', dest='steps', type=int, help='Number of factors (default 2)')
    injectivity.add_argument('--R', dest='radius', type=int, required=True)

    sphere_sum = commands.add_parser('sphere-sum', parents=[common], help='Exact sphere sums of sqrt kernels')
    sphere_sum.add_argument('--ray', action='append', default=[], help='Ray as prefix|period (repeatable)')
    sphere_sum.add_argument('--rmax', dest='radius', type=int, required=True)

    verify = commands.add_parser('verify-all', parents=[common], help='Run the acceptance suite')
    verify.add_argument('--quick', action='store_true', default=None, help='Reduced sizes')
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = vars(args)
    sets = {}
    for role in ('A', 'set'):
        if values.get(role) is not None:
            sets[role] = values[role]
    e_specs = values.get('E')
    if isinstance(e_specs, str):
        sets['E'] = e_specs
    elif e_specs:
        sets.update({f"E{i:04d}": text for i, text in enumerate(e_specs)})
    overrides = {
        key: values.get(key)
        for key in ('d', 'model', 'truncation', 'set_radius', 'output_dir', 'output_format', 'budget',
                    'radius', 'steps', 'length', 'samples', 'seed', 'quick')
    }
    overrides['sets'] = sets or None
    overrides['words'] = {'k': values['k']} if values.get('k') else None
    overrides['rays'] = values.get('ray') or None
    return build_config(overrides, values.get('config_file'))


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"freewalk: error: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s - %(levelname)s - %(message)s'
    )

    try:
        config = config_from_args(args)
        runner = ExperimentRunner(config)
        status = runner.run(args.command, getattr(args, 'kind', None))
    except BudgetExceededError as e:
        logger.error(f"{e}")
        return EXIT_BUDGET_EXCEEDED
    except (SpecParseError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"freewalk: error: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except IdentityCheckError as e:
        logger.error(f"Identity check failed: {e}")
        return EXIT_IDENTITY_FAILED
    except FreeWalkError as e:
        # degenerate measures, evaluation outside a window and the like
        logger.error(f"{e}")
        print(f"freewalk: error: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    for path in runner.results['artifacts']:
        logger.info(f"Wrote {path}")
    return status


if __name__ == "__main__":
    sys.exit(main())
