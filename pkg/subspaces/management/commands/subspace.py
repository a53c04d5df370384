"""
subspace.py
Management command driving the distance pipelines.

Actions:
    - run: one pipeline run; prints or writes the report, optionally saves it.
    - sweep: error sweep over (bits, shots) cells; writes CSV or XLSX.
    - gen: writes a generated matrix in the matrix file format.

Errors from the subspaces app exit with their own codes: 2 invalid input,
3 precondition violation, 4 internal invariant failure.
"""

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from subspaces.exceptions import InvalidInputError, SubspaceError
from subspaces.linalg import random_diagonally_dominant, random_orthonormal, random_spd
from subspaces.matrix_io import format_matrix, render_report, sweep_frame, write_matrix, write_report, write_sweep
from subspaces.models import PipelineRun
from subspaces.pipelines import (
    DISTANCE_KINDS, ELLIPSOID_ROUTES, EVOLUTION_MODES, GENERATED_KAPPA, INPUT_MODELS, PHASE_NORMALIZATIONS,
    QPE_WINDOWS, RunConfig, error_sweep, run, trend_checks,
)
from subspaces.utils import format_value


def parse_bits_range(text):
    """'LO:HI' or 'LO:HI:STEP', inclusive of HI."""
    try:
        parts = [int(part) for part in text.split(':')]
    except ValueError:
        raise InvalidInputError(f"bits range must look like LO:HI[:STEP], got '{text}'")
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] < 1) or parts[0] > parts[1]:
        raise InvalidInputError(f"bits range must look like LO:HI[:STEP], got '{text}'")
    step = parts[2] if len(parts) == 3 else 1
    return list(range(parts[0], parts[1] + 1, step))


def parse_shots_range(text):
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise InvalidInputError(f"shots range must be comma-separated integers, got '{text}'")


class Command(BaseCommand):
    help = 'Estimate subspace distances with simulated quantum pipelines (run, sweep, gen)'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', help='Action to perform')

        run_parser = subparsers.add_parser('run', help='Run one pipeline and print its report')
        self._add_run_arguments(run_parser)
        run_parser.add_argument('--out', type=str, help='Write the report to this file')
        run_parser.add_argument('--save', action='store_true', help='Store the run in the database')

        sweep_parser = subparsers.add_parser('sweep', help='Error sweep over bits and shots')
        self._add_run_arguments(sweep_parser)
        sweep_parser.add_argument('--bits-range', type=str, required=True, help='LO:HI[:STEP], inclusive')
        sweep_parser.add_argument('--shots-range', type=str, required=True,
                                  help='Comma-separated shot counts; 0 means exact sampling')
        sweep_parser.add_argument('--workers', type=int, help='Worker threads for sweep cells')
        sweep_parser.add_argument('--out', type=str, help='Write rows to a .csv or .xlsx file')

        gen_parser = subparsers.add_parser('gen', help='Generate an input matrix')
        gen_parser.add_argument('--n', type=int, required=True, help='Rows (and columns for square kinds)')
        gen_parser.add_argument('--k', type=int, help='Columns of an orthonormal basis')
        gen_parser.add_argument('--kappa', type=float, default=GENERATED_KAPPA, help='Condition number of an SPD matrix')
        gen_parser.add_argument('--seed', type=int, default=0, help='Random seed')
        gen_parser.add_argument('--kind', type=str, choices=['orthonormal', 'spd', 'dominant'], default='orthonormal')
        gen_parser.add_argument('--out', type=str, help='Write the matrix to this file')

    def _add_run_arguments(self, parser):
        parser.add_argument('--distance', type=str, choices=DISTANCE_KINDS, default='grassmann')
        parser.add_argument('--model', type=str, choices=INPUT_MODELS, default='blackbox')
        parser.add_argument('--bits', type=int, help='Phase register bits (1-16)')
        parser.add_argument('--shots', type=int, help='Measurement shots')
        parser.add_argument('--seed', type=int, help='Seed for generation and sampling')
        parser.add_argument('--evolution', type=str, choices=EVOLUTION_MODES, help='Evolution mode')
        parser.add_argument('--eps-h', type=float, help='Evolution accuracy for jacobi_anger mode')
        parser.add_argument('--m-path', type=str, help='Matrix file for M')
        parser.add_argument('--n-path', type=str, help='Matrix file for N')
        parser.add_argument('--n', type=int, help='Generated ambient dimension')
        parser.add_argument('--k', type=int, help='Generated subspace dimension')
        parser.add_argument('--kappa', type=float, help='Spectrum bound for ellipsoid inputs')
        parser.add_argument('--exact-sampling', action='store_true', help='Use the exact ancilla probability')
        parser.add_argument('--phase-normalization', type=str, choices=PHASE_NORMALIZATIONS)
        parser.add_argument('--route', type=str, choices=ELLIPSOID_ROUTES, default='symmetric',
                            help='Ellipsoid Gram route')
        parser.add_argument('--window', type=str, choices=QPE_WINDOWS, default='auto',
                            help='Phase register preparation')

    def handle(self, *args, **options):
        action = options.get('action')
        try:
            if action == 'run':
                self._run(options)
            elif action == 'sweep':
                self._sweep(options)
            elif action == 'gen':
                self._gen(options)
            else:
                self.stdout.write(self.style.WARNING('Please specify an action: run, sweep, or gen'))
                self.stdout.write('Examples:')
                self.stdout.write('  python manage.py subspace run --distance grassmann --n 8 --k 3 --bits 12')
                self.stdout.write('  python manage.py subspace sweep --n 8 --k 3 --bits-range 4:12 --shots-range 0,1000')
                self.stdout.write('  python manage.py subspace gen --kind spd --n 4 --kappa 8 --out m.txt')
        except SubspaceError as e:
            raise CommandError(str(e), returncode=e.exit_code)

    def _config(self, options):
        defaults = settings.SUBSPACES

        def pick(key, default_key):
            return options[key] if options.get(key) is not None else defaults[default_key]

        return RunConfig(
            distance_kind=options['distance'],
            input_model=options['model'],
            qpe_bits=pick('bits', 'DEFAULT_BITS'),
            shots=pick('shots', 'DEFAULT_SHOTS'),
            seed=pick('seed', 'DEFAULT_SEED'),
            evolution_mode=pick('evolution', 'DEFAULT_EVOLUTION'),
            eps_h=pick('eps_h', 'DEFAULT_EPS_H'),
            m_path=options.get('m_path'),
            n_path=options.get('n_path'),
            n=options.get('n'),
            k=options.get('k'),
            kappa=options.get('kappa'),
            exact_sampling=options.get('exact_sampling', False),
            phase_normalization=pick('phase_normalization', 'PHASE_NORMALIZATION'),
            ellipsoid_route=options['route'],
            qpe_window=options['window'],
        )

    def _run(self, options):
        cfg = self._config(options)
        report = run(cfg)
        if options.get('out'):
            write_report(report, options['out'])
            self.stdout.write(self.style.SUCCESS(f"Report written to {options['out']}"))
        else:
            self.stdout.write(render_report(report), ending='')
        if options.get('save'):
            row = PipelineRun.from_report(report)
            row.save()
            self.stdout.write(self.style.SUCCESS(f'Saved run #{row.pk}'))
        if report.leaked_mass and report.leaked_mass > 1e-3:
            self.stdout.write(self.style.WARNING(f'Leaked phase mass {report.leaked_mass:.3e}'))

    def _sweep(self, options):
        cfg = self._config(options)
        bits_range = parse_bits_range(options['bits_range'])
        shots_range = parse_shots_range(options['shots_range'])
        workers = options.get('workers') or settings.SUBSPACES['SWEEP_WORKERS']
        rows = error_sweep(cfg, bits_range, shots_range, workers=workers)
        if options.get('out'):
            write_sweep(rows, options['out'])
            self.stdout.write(self.style.SUCCESS(f"{len(rows)} sweep rows written to {options['out']}"))
        else:
            self.stdout.write(sweep_frame(rows).to_csv(index=False), ending='')
        for name, value in trend_checks(rows).items():
            style = self.style.ERROR if value is False else self.style.SUCCESS
            self.stdout.write(style(f'{name}: {format_value(value)}'))

    def _gen(self, options):
        kind, n, seed = options['kind'], options['n'], options['seed']
        if kind == 'orthonormal':
            if options.get('k') is None:
                raise InvalidInputError('gen --kind orthonormal needs --k')
            mat = random_orthonormal(n, options['k'], seed)
        elif kind == 'spd':
            mat = random_spd(n, options['kappa'], seed)
        else:
            mat = random_diagonally_dominant(n, seed)
        comment = f'{kind} n={n} seed={seed}'
        if options.get('out'):
            write_matrix(options['out'], mat, comment)
            self.stdout.write(self.style.SUCCESS(f"Matrix written to {options['out']}"))
        else:
            self.stdout.write(format_matrix(mat, comment), ending='')
