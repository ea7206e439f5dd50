import configparser
import os
import re
from dataclasses import dataclass, field

import numpy as np

import subres.geometry
import subres.io
from subres.errors import ConfigError, GeometryError

"""
Experiment configuration files.

INI documents read with configparser in strict mode. Complex numbers are
written as `re,im`, vectors as comma separated lists. Unknown sections and
keys are rejected.
"""

MODELS = ('linear', 'leading_order', 'kerr_pencil')

SECTION_KEYS = {
    'system':       ('c0', 'cr', 'delta', 'beta', 'beta_volume_normalization',
                     'separation_threshold'),
    'mesh':         ('refinement', 'max_refinement'),
    'model':        ('model', 'pencil_sign'),
    'sweep':        ('amplitude_min', 'amplitude_max', 'amplitude_count', 'spacing',
                     'starts', 'seed'),
    'continuation': ('ds', 'ds_min', 'ds_max', 'max_points', 'amplitude_cap'),
    'output':       ('directory', 'csv', 'svg'),
}
SPHERE_KEYS = ('center', 'radius')
SPHERE_SECTION = re.compile(r'^sphere\.(\d+)$')


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    system: subres.geometry.ResonatorSystem
    beta_input: complex = 0j
    beta_volume_normalization: int = None
    refinement: int = 3
    max_refinement: int = subres.geometry.MAX_REFINEMENT
    model: str = 'leading_order'
    pencil_sign: object = 'auto'
    amplitude_min: float = 0.015
    amplitude_max: float = 3.0
    amplitude_count: int = 200
    spacing: str = 'linear'
    starts: int = 16
    seed: int = 0
    ds: float = 0.02
    ds_min: float = 1e-6
    ds_max: float = 0.1
    max_points: int = 500
    amplitude_cap: float = 3.0
    output_directory: str = 'output'
    csv: bool = True
    svg: bool = True
    source: str = field(default=None, compare=False)

    def amplitudes(self):
        if self.spacing == 'log':
            return np.geomspace(self.amplitude_min, self.amplitude_max, self.amplitude_count)
        return np.linspace(self.amplitude_min, self.amplitude_max, self.amplitude_count)


def _fail(message, path, section, key=None, line=None):
    name = section if key is None else section + '.' + key
    raise ConfigError(name + ': ' + message, path=path, line=line, field=name)


def _text(parser, section, key, path):
    value = parser.get(section, key).strip()
    if value == '':
        _fail('empty value', path, section, key)
    return value


def _float(parser, section, key, default, path, positive=False, nonnegative=False):
    if not parser.has_option(section, key):
        return default
    text = _text(parser, section, key, path)
    try:
        value = float(text)
    except ValueError:
        _fail('expected a number, got ' + repr(text), path, section, key)
    if not np.isfinite(value):
        _fail('expected a finite number, got ' + repr(text), path, section, key)
    if positive and not value > 0:
        _fail('must be positive, got ' + text, path, section, key)
    if nonnegative and not value >= 0:
        _fail('must be nonnegative, got ' + text, path, section, key)
    return value


def _int(parser, section, key, default, path, minimum=None):
    if not parser.has_option(section, key):
        return default
    text = _text(parser, section, key, path)
    try:
        value = int(text)
    except ValueError:
        _fail('expected an integer, got ' + repr(text), path, section, key)
    if minimum is not None and value < minimum:
        _fail('must be at least ' + str(minimum) + ', got ' + text, path, section, key)
    return value


def _bool(parser, section, key, default, path):
    if not parser.has_option(section, key):
        return default
    try:
        return parser.getboolean(section, key)
    except ValueError:
        _fail('expected a boolean, got ' + repr(parser.get(section, key)), path, section, key)


def _floats(parser, section, key, path, length=None):
    text = _text(parser, section, key, path)
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        _fail('expected comma separated numbers, got ' + repr(text), path, section, key)
    if length is not None and len(values) != length:
        _fail('expected ' + str(length) + ' values, got ' + str(len(values)), path, section, key)
    if not np.all(np.isfinite(values)):
        _fail('values must be finite', path, section, key)
    return values


def _complex(parser, section, key, default, path):
    if not parser.has_option(section, key):
        return default
    values = _floats(parser, section, key, path)
    if len(values) == 1:
        return complex(values[0], 0.0)
    if len(values) != 2:
        _fail('complex numbers are written as re,im', path, section, key)
    return complex(values[0], values[1])


def _choice(parser, section, key, default, choices, path):
    if not parser.has_option(section, key):
        return default
    value = _text(parser, section, key, path)
    if value not in choices:
        _fail('must be one of ' + ', '.join(choices) + ', got ' + repr(value), path, section, key)
    return value


def _read(text, path):
    parser = configparser.ConfigParser(strict=True,
                                       interpolation=None,
                                       inline_comment_prefixes=('#', ';'))
    try:
        parser.read_string(text, source=path or '<string>')
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError('syntax error: key outside of a section', path=path, line=e.lineno)
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError('syntax error: cannot parse ' + repr(e.errors[0][1]) if e.errors
                          else 'syntax error', path=path, line=line)
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as e:
        raise ConfigError('syntax error: ' + e.message.split(': ', 1)[-1], path=path, line=e.lineno)
    except configparser.Error as e:
        raise ConfigError('syntax error: ' + str(e), path=path)
    return parser


def _check_keys(parser, path):
    if parser.defaults():
        _fail('unknown section', path, parser.default_section)

    spheres = []
    for section in parser.sections():
        match = SPHERE_SECTION.match(section)
        if match:
            allowed = SPHERE_KEYS
            spheres.append(int(match.group(1)))
        elif section in SECTION_KEYS:
            allowed = SECTION_KEYS[section]
        else:
            _fail('unknown section', path, section)
        for key in parser.options(section):
            if key not in allowed:
                _fail('unknown key', path, section, key)

    if not spheres:
        _fail('at least one [sphere.1] section is required', path, 'sphere')
    if sorted(spheres) != list(range(1, len(spheres) + 1)):
        _fail('sphere sections must be numbered 1..N without gaps, got ' +
              str(sorted(spheres)), path, 'sphere')
    return len(spheres)


def _spheres(parser, n, path):
    spheres = []
    for j in range(1, n + 1):
        section = 'sphere.' + str(j)
        for key in SPHERE_KEYS:
            if not parser.has_option(section, key):
                _fail('missing required key', path, section, key)
        center = _floats(parser, section, 'center', path, length=3)
        radius = _float(parser, section, 'radius', None, path)
        try:
            spheres.append(subres.geometry.SphereSpec(center=tuple(center), radius=radius))
        except GeometryError as e:
            _fail(str(e), path, section, 'radius')
    return tuple(spheres)


def parse_config(text, path=None):
    """
    Parse and validate a configuration document. Defaults are filled in for
    every optional key; `path` only labels error messages and the config name.
    """
    parser = _read(text, path)
    n = _check_keys(parser, path)
    for section in SECTION_KEYS:
        if not parser.has_section(section):
            parser.add_section(section)

    spheres = _spheres(parser, n, path)

    c0 = _float(parser, 'system', 'c0', 1.0, path, positive=True)
    delta = _float(parser, 'system', 'delta', 1e-3, path, positive=True)
    threshold = _float(parser, 'system', 'separation_threshold',
                       subres.geometry.SEPARATION_THRESHOLD, path, nonnegative=True)
    if parser.has_option('system', 'cr'):
        cr = _floats(parser, 'system', 'cr', path)
        if len(cr) not in (1, n):
            _fail('expected 1 or ' + str(n) + ' values, got ' + str(len(cr)), path, 'system', 'cr')
        if min(cr) <= 0:
            _fail('must be positive', path, 'system', 'cr')
        cr = cr[0] if len(cr) == 1 else tuple(cr)
    else:
        cr = 1.0

    beta_input = _complex(parser, 'system', 'beta', 0j, path)
    normalization = _int(parser, 'system', 'beta_volume_normalization', None, path, minimum=1)
    beta = beta_input
    if normalization is not None:
        if normalization > n:
            _fail('refers to sphere ' + str(normalization) + ' of ' + str(n),
                  path, 'system', 'beta_volume_normalization')
        beta = beta_input / spheres[normalization - 1].volume**2

    try:
        system = subres.geometry.ResonatorSystem(spheres=spheres, c0=c0, cr=cr, delta=delta,
                                                 beta=beta, separation_threshold=threshold)
    except GeometryError as e:
        _fail(str(e), path, 'sphere')

    max_refinement = _int(parser, 'mesh', 'max_refinement', subres.geometry.MAX_REFINEMENT,
                          path, minimum=0)
    refinement = _int(parser, 'mesh', 'refinement', 3, path, minimum=0)
    if refinement > max_refinement:
        _fail('exceeds max_refinement ' + str(max_refinement), path, 'mesh', 'refinement')

    model = _choice(parser, 'model', 'model', 'leading_order', MODELS, path)
    pencil_sign = _choice(parser, 'model', 'pencil_sign', 'auto', ('auto', '+1', '1', '-1'), path)
    if pencil_sign != 'auto':
        pencil_sign = int(pencil_sign)

    amplitude_min = _float(parser, 'sweep', 'amplitude_min', 0.015, path, positive=True)
    amplitude_max = _float(parser, 'sweep', 'amplitude_max', 3.0, path, positive=True)
    if not amplitude_max >= amplitude_min:
        _fail('must not be below amplitude_min', path, 'sweep', 'amplitude_max')
    amplitude_count = _int(parser, 'sweep', 'amplitude_count', 200, path, minimum=1)
    if amplitude_count > 1 and amplitude_max == amplitude_min:
        _fail('must exceed amplitude_min when amplitude_count > 1', path, 'sweep', 'amplitude_max')
    spacing = _choice(parser, 'sweep', 'spacing', 'linear', ('linear', 'log'), path)
    starts = _int(parser, 'sweep', 'starts', 16, path, minimum=0)
    seed = _int(parser, 'sweep', 'seed', 0, path, minimum=0)

    ds = _float(parser, 'continuation', 'ds', 0.02, path, positive=True)
    ds_min = _float(parser, 'continuation', 'ds_min', 1e-6, path, positive=True)
    ds_max = _float(parser, 'continuation', 'ds_max', 0.1, path, positive=True)
    if not ds_min <= ds <= ds_max:
        _fail('need ds_min <= ds <= ds_max', path, 'continuation', 'ds')
    max_points = _int(parser, 'continuation', 'max_points', 500, path, minimum=2)
    amplitude_cap = _float(parser, 'continuation', 'amplitude_cap', 3.0, path, positive=True)

    directory = parser.get('output', 'directory', fallback='output').strip() or 'output'
    csv = _bool(parser, 'output', 'csv', True, path)
    svg = _bool(parser, 'output', 'svg', True, path)

    name = subres.io.split_file(path)[1] if path else 'config'
    return ExperimentConfig(name=name,
                            system=system,
                            beta_input=beta_input,
                            beta_volume_normalization=normalization,
                            refinement=refinement,
                            max_refinement=max_refinement,
                            model=model,
                            pencil_sign=pencil_sign,
                            amplitude_min=amplitude_min,
                            amplitude_max=amplitude_max,
                            amplitude_count=amplitude_count,
                            spacing=spacing,
                            starts=starts,
                            seed=seed,
                            ds=ds,
                            ds_min=ds_min,
                            ds_max=ds_max,
                            max_points=max_points,
                            amplitude_cap=amplitude_cap,
                            output_directory=directory,
                            csv=csv,
                            svg=svg,
                            source=path)


def load_config(path):
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError('cannot read configuration: ' + e.strerror, path=path)
    return parse_config(text, path=path)


def _number(value):
    return subres.io.FLOAT_FORMAT % value


def _pair(z):
    return _number(z.real) + ',' + _number(z.imag)


def resolved_document(config):
    """
    The configuration with every default filled in, as INI text.
    Parsing it again gives an equal ExperimentConfig.
    """
    system = config.system
    parser = configparser.ConfigParser(interpolation=None)
    parser['system'] = {'c0': _number(system.c0),
                        'cr': ','.join(_number(c) for c in system.cr),
                        'delta': _number(system.delta),
                        'beta': _pair(config.beta_input),
                        'separation_threshold': _number(system.separation_threshold)}
    if config.beta_volume_normalization is not None:
        parser['system']['beta_volume_normalization'] = str(config.beta_volume_normalization)
    for j, sphere in enumerate(system.spheres, start=1):
        parser['sphere.' + str(j)] = {'center': ','.join(_number(x) for x in sphere.center),
                                      'radius': _number(sphere.radius)}
    parser['mesh'] = {'refinement': str(config.refinement),
                      'max_refinement': str(config.max_refinement)}
    parser['model'] = {'model': config.model,
                       'pencil_sign': str(config.pencil_sign)}
    parser['sweep'] = {'amplitude_min': _number(config.amplitude_min),
                       'amplitude_max': _number(config.amplitude_max),
                       'amplitude_count': str(config.amplitude_count),
                       'spacing': config.spacing,
                       'starts': str(config.starts),
                       'seed': str(config.seed)}
    parser['continuation'] = {'ds': _number(config.ds),
                              'ds_min': _number(config.ds_min),
                              'ds_max': _number(config.ds_max),
                              'max_points': str(config.max_points),
                              'amplitude_cap': _number(config.amplitude_cap)}
    parser['output'] = {'directory': config.output_directory,
                        'csv': str(config.csv).lower(),
                        'svg': str(config.svg).lower()}

    lines = []
    for section in parser.sections():
        lines.append('[' + section + ']')
        for key, value in parser[section].items():
            lines.append(key + ' = ' + value)
        lines.append('')
    return '\n'.join(lines)


def write_resolved_config(config, output_directory):
    subres.io.create_dir(output_directory)
    output_file_name = os.path.join(output_directory, 'config_resolved.cfg')
    with open(output_file_name, 'w') as f:
        f.write(resolved_document(config))
    return output_file_name


def bundled_config_path(file_name):
    return os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                        'data', file_name)


def bundled_configs():
    return [bundled_config_path(f) for f in ('fig1.cfg', 'fig2_r210.cfg', 'fig2_r220.cfg')]
