#!/usr/bin/env python
import argparse
import dataclasses
import sys

import subres
from subres.errors import AcceptanceError, ConfigError, SubresError

"""
Command line entry point: subres capmat | linear | branches | reproduce-figures.
"""

EXIT_OK         = 0
EXIT_CONFIG     = 1
EXIT_NUMERICAL  = 2
EXIT_ACCEPTANCE = 3


def _common(parser):
    parser.add_argument('--out', type=str, default=None,
                        help='output directory (default: [output] directory of the config)')
    parser.add_argument('--refinement', type=int, default=None,
                        help='override [mesh] refinement')
    parser.add_argument('--seed', type=int, default=None,
                        help='override [sweep] seed')
    parser.add_argument('--workers', type=int, default=1,
                        help='threads for assembly and multistart sweeps')
    parser.add_argument('-v', '--verbose', action='store_true')


def build_parser():
    parser = argparse.ArgumentParser(prog='subres',
                                     description='Capacitance matrices and nonlinear '
                                                 'subwavelength resonances of sphere systems')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for name, text in (('capmat', 'capacitance and generalized capacitance matrices'),
                       ('linear', 'linear resonance asymptotics'),
                       ('branches', 'nonlinear resonance branches')):
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument('--config', type=str, required=True, help='configuration file')
        _common(sub)

    sub = subparsers.add_parser('reproduce-figures',
                                help='run the bundled dimer experiments and acceptance checks')
    _common(sub)
    sub.add_argument('--check-refinement', type=int, default=4,
                     help='refinement of the capacitance accuracy checks')
    return parser


def _configure(args):
    config = subres.config.load_config(args.config)
    changes = {}
    if args.refinement is not None:
        if args.refinement < 0 or args.refinement > config.max_refinement:
            raise ConfigError('--refinement must be in 0..' + str(config.max_refinement),
                              field='mesh.refinement')
        changes['refinement'] = args.refinement
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError('--seed must be nonnegative', field='sweep.seed')
        changes['seed'] = args.seed
    return dataclasses.replace(config, **changes)


def run(args):
    if args.command == 'reproduce-figures':
        status, manifest = subres.batch.reproduce_figures(args.out or 'reproduce_figures',
                                                   refinement=args.refinement,
                                                   check_refinement=args.check_refinement,
                                                   seed=args.seed,
                                                   n_workers=args.workers,
                                                   verbose=args.verbose)
        if status != 0:
            failed = manifest.loc[~manifest['passed'], 'check'].tolist()
            raise AcceptanceError('failed checks: ' + ', '.join(failed))
        return EXIT_OK

    config = _configure(args)
    if args.command == 'capmat':
        subres.batch.run_capmat(config, args.out, n_workers=args.workers, verbose=args.verbose)
    elif args.command == 'linear':
        subres.batch.run_linear(config, args.out, n_workers=args.workers, verbose=args.verbose)
    else:
        subres.batch.run_branches(config, args.out, n_workers=args.workers, verbose=args.verbose)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except AcceptanceError as e:
        print('acceptance: ' + str(e), file=sys.stderr)
        return EXIT_ACCEPTANCE
    except ConfigError as e:
        print('configuration error: ' + str(e), file=sys.stderr)
        return EXIT_CONFIG
    except SubresError as e:
        print(type(e).__name__ + ': ' + str(e), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
