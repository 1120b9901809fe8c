"""Command-line driver: reproducible experiments with file reports.

Every command is a pure function of its flags (plus MRAMSIM_SEED): no
timestamps, no machine state, stable field formatting, atomic writes. Run
a command twice and the output files are byte-identical.

Exit codes: 0 success, 1 domain error (bad targets, exhausted pool, out of
range operating point), 2 usage or file errors (unreadable image, bad
config, malformed descriptor).
"""

from __future__ import annotations

import contextlib
import json
import sys
from pathlib import Path

import click

from .alloc import build_pool
from .characterize import (
    ErrorMap,
    ErrorStats,
    characterize,
    compute_stats,
    sort_addresses,
    sweep_t_w,
)
from .device import ChipModel, Environment, create_chip, load_profile
from .errors import FileFormatError, MramError
from .fileio import atomic_write_text
from .patterns import parse_pattern
from .power import DEFAULT_CURVE, current_saving, load_curve_csv, power_reduction
from .profiles import PROFILE_IDS, get_profile
from .quality import (
    QUALITY_CSV_HEADER,
    quality_csv_row,
    read_pgm,
    run_image_experiment,
    write_pgm,
)

STATS_CSV_HEADER = (
    "chip_id,pattern,t_w_ns,n_measurements,"
    "e_a_pct,e_b_pct,m_a_pct,m_b_pct,c_a_pct,c_b_pct"
)
# Undefined coverage cells print as a dash, the way characterization
# tables mark patterns that produced no errors.
NO_VALUE = "-"


@contextlib.contextmanager
def _exit_codes():
    try:
        yield
    except (FileFormatError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except MramError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _load_config(ctx: click.Context, config_path: str | None) -> dict:
    if not config_path:
        return {}
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise click.UsageError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config {config_path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise click.UsageError(f"config {config_path} must hold a JSON object")
    return doc


def _merge(ctx: click.Context, config: dict, param: str, config_key: str):
    """Flag beats environment beats config file beats built-in default."""
    source = ctx.get_parameter_source(param)
    if source == click.core.ParameterSource.DEFAULT and config_key in config:
        return config[config_key]
    return ctx.params[param]


def _resolve_profile(profile_id: str | None, profile_path: str | None):
    if profile_id and profile_path:
        raise click.UsageError("--profile and --profile-path are mutually exclusive")
    if profile_path:
        return load_profile(profile_path)
    if profile_id:
        return get_profile(profile_id)
    raise click.UsageError("one of --profile or --profile-path is required")


def _stats_row(stats: ErrorStats, n_measurements: int | str) -> str:
    def pct(value: float | None) -> str:
        return NO_VALUE if value is None else f"{value:.6f}"

    return ",".join(
        [
            stats.chip_id,
            stats.pattern,
            f"{stats.t_w_ns:g}",
            str(n_measurements),
            pct(stats.e_a_pct),
            pct(stats.e_b_pct),
            pct(stats.m_a_pct),
            pct(stats.m_b_pct),
            pct(stats.c_a_pct),
            pct(stats.c_b_pct),
        ]
    )


def _characterize_summary_row(errmap: ErrorMap) -> str:
    capacity = errmap.capacity_words
    e_a = errmap.address_count / capacity * 100.0
    e_b = errmap.bit_count / (capacity * 16) * 100.0
    return ",".join(
        [
            errmap.chip_id,
            errmap.pattern,
            f"{errmap.t_w_ns:g}",
            str(errmap.n_measurements),
            f"{e_a:.6f}",
            f"{e_b:.6f}",
            NO_VALUE,
            NO_VALUE,
            NO_VALUE,
            NO_VALUE,
        ]
    )


def profile_option(fn):
    fn = click.option(
        "--profile", "profile_id", type=str, default=None,
        help=f"Built-in profile id ({', '.join(PROFILE_IDS)}).",
    )(fn)
    fn = click.option(
        "--profile-path", type=click.Path(), default=None,
        help="JSON chip-profile file (alternative to --profile).",
    )(fn)
    return fn


def common_options(fn):
    fn = click.option(
        "--seed", type=int, default=0, show_default=True, envvar="MRAMSIM_SEED",
        help="Master seed; MRAMSIM_SEED overrides the default, flags override both.",
    )(fn)
    fn = click.option(
        "--temp", "temperature_c", type=float, default=26.0, show_default=True,
        help="Operating temperature in degrees Celsius.",
    )(fn)
    fn = click.option(
        "--field", "field_mt", type=float, default=0.0, show_default=True,
        help="External magnetic field in mT.",
    )(fn)
    fn = click.option(
        "--out", "output_dir", type=click.Path(file_okay=False), default=".",
        show_default=True, help="Directory for the output files.",
    )(fn)
    fn = click.option(
        "--config", "config_path", type=click.Path(), default=None,
        help="JSON config file; explicit flags override its values.",
    )(fn)
    return fn


@click.group()
@click.version_option(package_name="mramsim")
def main() -> None:
    """Approximate toggle-MRAM write experiments."""


@main.command("characterize")
@profile_option
@common_options
@click.option("--tw", "t_w_ns", type=float, default=5.0, show_default=True,
              help="Reduced write pulse width in ns.")
@click.option("--n", "n_measurements", type=int, default=50, show_default=True,
              help="Number of accumulation rounds.")
@click.option("--pattern", "pattern_text", type=str, default="solid:0000",
              show_default=True, help="Training data pattern descriptor.")
@click.pass_context
def cmd_characterize(ctx, profile_id, profile_path, seed, temperature_c,
                     field_mt, output_dir, config_path, t_w_ns,
                     n_measurements, pattern_text):
    """Accumulate an error map and write errmap.json plus stats.csv."""
    config = _load_config(ctx, config_path)
    profile_id = _merge(ctx, config, "profile_id", "profile_id")
    profile_path = _merge(ctx, config, "profile_path", "profile_path")
    seed = int(_merge(ctx, config, "seed", "seed"))
    t_w_ns = float(_merge(ctx, config, "t_w_ns", "t_w_ns"))
    n_measurements = int(_merge(ctx, config, "n_measurements", "n_measurements"))
    pattern_text = str(_merge(ctx, config, "pattern_text", "pattern"))
    temperature_c = float(_merge(ctx, config, "temperature_c", "temperature_c"))
    field_mt = float(_merge(ctx, config, "field_mt", "field_mt"))
    output_dir = Path(_merge(ctx, config, "output_dir", "output_dir"))

    with _exit_codes():
        profile = _resolve_profile(profile_id, profile_path)
        pattern = parse_pattern(pattern_text)
        chip = create_chip(profile, seed)
        env = Environment(temperature_c=temperature_c, field_mt=field_mt)
        errmap = characterize(chip, t_w_ns, n_measurements, pattern, env)
        errmap.save(output_dir / "errmap.json")
        atomic_write_text(
            output_dir / "stats.csv",
            STATS_CSV_HEADER + "\n" + _characterize_summary_row(errmap) + "\n",
        )
        click.echo(
            f"{errmap.chip_id}: {errmap.address_count} erroneous addresses, "
            f"{errmap.bit_count} bits -> {output_dir / 'errmap.json'}"
        )


@main.command("sweep")
@profile_option
@common_options
@click.option("--tw", "t_w_values", type=float, multiple=True,
              help="Pulse width in ns; repeat the flag for several points.")
@click.option("--pattern", "pattern_text", type=str, default="solid:0000",
              show_default=True, help="Data pattern descriptor.")
@click.option("--curve", "curve_path", type=click.Path(), default=None,
              help="Power-curve CSV (time_ns,normalized_current); "
                   "defaults to the embedded anchors.")
@click.pass_context
def cmd_sweep(ctx, profile_id, profile_path, seed, temperature_c, field_mt,
              output_dir, config_path, t_w_values, pattern_text, curve_path):
    """Failed-bit fraction and power figures across pulse widths."""
    config = _load_config(ctx, config_path)
    profile_id = _merge(ctx, config, "profile_id", "profile_id")
    profile_path = _merge(ctx, config, "profile_path", "profile_path")
    seed = int(_merge(ctx, config, "seed", "seed"))
    pattern_text = str(_merge(ctx, config, "pattern_text", "pattern"))
    temperature_c = float(_merge(ctx, config, "temperature_c", "temperature_c"))
    field_mt = float(_merge(ctx, config, "field_mt", "field_mt"))
    output_dir = Path(_merge(ctx, config, "output_dir", "output_dir"))
    if not t_w_values and "t_w_values" in config:
        t_w_values = tuple(float(t) for t in config["t_w_values"])
    if not t_w_values:
        t_w_values = (2.5, 5.0, 10.0, 15.0)

    with _exit_codes():
        profile = _resolve_profile(profile_id, profile_path)
        pattern = parse_pattern(pattern_text)
        env = Environment(temperature_c=temperature_c, field_mt=field_mt)
        curve = load_curve_csv(curve_path) if curve_path else DEFAULT_CURVE
        t_full = curve.t_max
        points = sweep_t_w(
            lambda: create_chip(profile, seed), t_w_values, pattern, env
        )
        lines = ["t_w_ns,failed_bit_pct,current_saving_pct,power_reduction_pct"]
        for point in points:
            if curve.t_min <= point.t_w_ns <= t_full:
                saving = f"{current_saving(curve, point.t_w_ns, t_full) * 100:.6f}"
                reduction = f"{power_reduction(curve, point.t_w_ns, t_full) * 100:.6f}"
            else:
                # beyond the measured charge curve there is no anchor data
                saving = reduction = NO_VALUE
            lines.append(
                f"{point.t_w_ns:g},{point.failed_bit_fraction * 100:.6f},"
                f"{saving},{reduction}"
            )
        atomic_write_text(output_dir / "sweep.csv", "\n".join(lines) + "\n")
        click.echo(f"{len(points)} sweep points -> {output_dir / 'sweep.csv'}")


@main.command("image")
@profile_option
@common_options
@click.option("--image", "image_path", type=click.Path(), default=None,
              help="Input image, binary PGM (P5). Required here or in --config.")
@click.option("--init", type=click.Choice(["all_ones", "all_zeros"]),
              default="all_ones", show_default=True,
              help="Background the memory is reset to before the write.")
@click.option("--select", "selection", type=click.Choice(["none", "strategy1"]),
              default="none", show_default=True,
              help="Address selection strategy for the pixel words.")
@click.option("--tw", "t_w_ns", type=float, default=5.0, show_default=True,
              help="Reduced write pulse width in ns.")
@click.option("--n", "n_measurements", type=int, default=50, show_default=True,
              help="Characterization rounds used to build the pool "
                   "(strategy1 only).")
@click.pass_context
def cmd_image(ctx, profile_id, profile_path, seed, temperature_c, field_mt,
              output_dir, config_path, image_path, init, selection, t_w_ns,
              n_measurements):
    """Write an image at reduced t_w; emit readback.pgm and quality.csv."""
    config = _load_config(ctx, config_path)
    profile_id = _merge(ctx, config, "profile_id", "profile_id")
    profile_path = _merge(ctx, config, "profile_path", "profile_path")
    seed = int(_merge(ctx, config, "seed", "seed"))
    t_w_ns = float(_merge(ctx, config, "t_w_ns", "t_w_ns"))
    n_measurements = int(_merge(ctx, config, "n_measurements", "n_measurements"))
    temperature_c = float(_merge(ctx, config, "temperature_c", "temperature_c"))
    field_mt = float(_merge(ctx, config, "field_mt", "field_mt"))
    output_dir = Path(_merge(ctx, config, "output_dir", "output_dir"))
    image_value = _merge(ctx, config, "image_path", "image")
    if image_value is None:
        raise click.UsageError("--image is required (flag or config key 'image')")
    image_path = Path(image_value)
    init = str(_merge(ctx, config, "init", "init"))
    selection = str(_merge(ctx, config, "selection", "selection"))

    with _exit_codes():
        profile = _resolve_profile(profile_id, profile_path)
        image = read_pgm(image_path)
        chip = create_chip(profile, seed)
        env = Environment(temperature_c=temperature_c, field_mt=field_mt)
        pool = None
        if selection == "strategy1":
            errmap = characterize(chip, t_w_ns, n_measurements, 0x0000, env)
            ordering = sort_addresses(
                errmap, errmap.last_intended, errmap.last_stored
            )
            pool = build_pool(errmap, chip.capacity_words, ordering)
        read_back, report = run_image_experiment(
            chip,
            image,
            init=init,
            selection=selection,
            t_w_ns=t_w_ns,
            env=env,
            pool=pool,
            image_label=image_path.name,
        )
        write_pgm(read_back, output_dir / "readback.pgm")
        atomic_write_text(
            output_dir / "quality.csv",
            QUALITY_CSV_HEADER + "\n" + quality_csv_row(report) + "\n",
        )
        click.echo(
            f"snr={report.snr if report.snr != float('inf') else 'inf'} "
            f"mse={report.mse:g} erroneous_pixels={report.erroneous_pixels} "
            f"-> {output_dir / 'readback.pgm'}"
        )


@main.command("report")
@click.argument("char_map_path", type=click.Path())
@click.argument("eval_map_paths", type=click.Path(), nargs=-1, required=True)
@click.option("--out", "output_dir", type=click.Path(file_okay=False),
              default=".", show_default=True,
              help="Directory for the output files.")
def cmd_report(char_map_path, eval_map_paths, output_dir):
    """Tabulate M/C statistics of evaluation maps against a characterization map."""
    with _exit_codes():
        char_map = ErrorMap.load(char_map_path)
        rows = [STATS_CSV_HEADER]
        for eval_path in eval_map_paths:
            eval_map = ErrorMap.load(eval_path)
            stats = compute_stats(char_map, eval_map)
            rows.append(_stats_row(stats, eval_map.n_measurements))
        out = Path(output_dir)
        atomic_write_text(out / "report.csv", "\n".join(rows) + "\n")
        click.echo(f"{len(eval_map_paths)} evaluation rows -> {out / 'report.csv'}")


if __name__ == "__main__":
    main()
