"""Command-line interface.

Subcommands: ``serve`` (relay), ``play`` (bot client against a relay),
``sim run`` (headless sessions), ``record ls/replay/verify`` (session
logs), ``analyze panas/pxi/cr/anova/orders`` (experiment analytics), and
``bench`` (tick-kernel throughput).  CSV layouts are documented in the
README; analytics print aligned text by default and canonical JSON with
--json.
"""

from __future__ import annotations

import asyncio
import csv
import json
import logging
import sys
from pathlib import Path

import click

from . import records as rec
from .analysis import (
    PXI_CONSTRUCTS,
    PanasResponse,
    PxiItem,
    PxiResponse,
    cardiac_reactivity,
    latin_square_orders,
    rm_anova,
    score_panas,
    score_pxi,
)
from .engine import GameConfig, LevelSpec, kernel_backend
from .simulate import BotPilot, ConstantHr, ScriptedHr, ScriptedProfile, StressHr, StressModel, run_headless

logger = logging.getLogger(__name__)

_SLUGS = {c: c.lower().replace(" ", "_").replace("-", "_") for c in PXI_CONSTRUCTS}


def _emit(data, as_json: bool, text_fn) -> None:
    if as_json:
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        text_fn()


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """Heart-rate-adaptive arcade game platform."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


# -- serve ---------------------------------------------------------------


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8777, show_default=True)
@click.option("--tick-rate", default=60, show_default=True, help="Simulation rate, Hz.")
@click.option("--log-dir", default="./records", show_default=True, type=click.Path())
@click.option("--max-sessions", default=64, show_default=True)
@click.option("--fsync", is_flag=True, help="fsync the session log on every event.")
def serve(host: str, port: int, tick_rate: int, log_dir: str, max_sessions: int, fsync: bool) -> None:
    """Run the telemetry relay."""
    from .relay import RelayServer

    config = GameConfig(tick_rate=tick_rate) if tick_rate != 60 else GameConfig()
    server = RelayServer(
        host=host,
        port=port,
        log_dir=log_dir,
        max_sessions=max_sessions,
        fsync=fsync,
        default_config=config,
    )
    click.echo(f"relay on ws://{host}:{port} (health: http://{host}:{port}/health)")
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        click.echo("bye")


# -- play ------------------------------------------------------------------


@main.command()
@click.option("--server", "uri", default="ws://127.0.0.1:8777", show_default=True)
@click.option("--level", default=3, type=click.IntRange(1, 3), show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--skill", default=0.9, type=click.FloatRange(0.0, 1.0), show_default=True)
@click.option("--bpm", default=70.0, show_default=True, help="Constant synthetic heart rate.")
def play(uri: str, level: int, seed: int, skill: float, bpm: float) -> None:
    """Play one session against a relay with a bot pilot."""
    from .relay import play_session

    res = asyncio.run(
        play_session(
            uri,
            LevelSpec.level(level),
            seed=seed,
            bot=BotPilot(skill=skill, rng_seed=seed),
            hr_bpm_fn=lambda t: bpm,
        )
    )
    click.echo(
        f"session {res.session_id}: {res.reason}, score {res.final_score}, "
        f"{res.duration_s:.1f}s, {res.state_frames} frames"
    )


# -- sim ---------------------------------------------------------------------


@main.group()
def sim() -> None:
    """Headless simulation."""


@sim.command("run")
@click.option("--level", default=3, type=click.IntRange(1, 3), show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--count", default=1, show_default=True, help="Sessions (seeds seed..seed+count-1).")
@click.option("--skill", default=1.0, type=click.FloatRange(0.0, 1.0), show_default=True)
@click.option("--hr-profile", type=click.Path(exists=True), help="Scripted HR profile JSON.")
@click.option("--hr-constant", type=float, help="Constant HR in bpm.")
@click.option("--hr-stress", is_flag=True, help="Event-driven stress HR model.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Write session logs here.")
@click.option("--max-duration", default=600.0, show_default=True, help="Simulated seconds.")
def sim_run(
    level: int,
    seed: int,
    count: int,
    skill: float,
    hr_profile: str | None,
    hr_constant: float | None,
    hr_stress: bool,
    out_dir: str | None,
    max_duration: float,
) -> None:
    """Run bot-piloted sessions without a server."""
    config = GameConfig()
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    for s in range(seed, seed + count):
        if hr_profile:
            profile = ScriptedProfile.from_json(json.loads(Path(hr_profile).read_text()))
            source = ScriptedHr(profile)
        elif hr_constant is not None:
            source = ConstantHr(hr_constant)
        elif hr_stress:
            source = StressHr(StressModel(rng_seed=s))
        else:
            source = ConstantHr(70.0)
        try:
            record, path = run_headless(
                LevelSpec.level(level),
                config,
                BotPilot(skill=skill, rng_seed=s),
                source,
                seed=s,
                out_dir=out_dir,
                max_duration_s=max_duration,
            )
        except RuntimeError as e:
            click.echo(f"seed {s}: aborted ({e})", err=True)
            continue
        where = f" -> {path}" if path else ""
        click.echo(
            f"seed {s}: {record.outcome}, score {record.final_score}, "
            f"{record.duration_s:.1f}s{where}"
        )


# -- record ---------------------------------------------------------------


@main.group()
def record() -> None:
    """Session logs."""


@record.command("ls")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
def record_ls(directory: str) -> None:
    """List session logs in a directory."""
    rows = []
    for r in rec.list_records(directory):
        rows.append(
            (
                r.session_id,
                f"L{r.level.level_id}",
                str(r.seed),
                r.outcome or "(unfinished)",
                "-" if r.final_score is None else str(r.final_score),
                "-" if r.duration_s is None else f"{r.duration_s:.1f}s",
                str(len(r.events)),
            )
        )
    if not rows:
        click.echo("no session logs found")
        return
    header = ("session", "level", "seed", "outcome", "score", "duration", "events")
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        click.echo("  ".join(c.ljust(w) for c, w in zip(row, widths)))


@record.command("replay")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def record_replay(path: str) -> None:
    """Re-simulate a session log and check every recorded state hash."""
    r = rec.load_record(path, allow_partial=True)
    try:
        result = rec.replay(r)
    except rec.ReplayDivergence as e:
        click.echo(f"DIVERGED: {e}", err=True)
        sys.exit(1)
    click.echo(
        f"{r.session_id}: replayed {result.ticks} ticks, "
        f"{len(result.hash_trace)} hash checks OK, "
        f"outcome {result.final_state.reason.value if result.final_state.reason else 'n/a'} "
        f"score {result.final_state.score}"
    )


@record.command("verify")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
def record_verify(directory: str) -> None:
    """Replay every session log in a directory; non-zero exit on divergence."""
    total = ok = 0
    for r in rec.list_records(directory):
        total += 1
        try:
            rec.replay(r)
        except rec.ReplayDivergence as e:
            click.echo(f"{r.session_id}: DIVERGED ({e})")
            continue
        ok += 1
        click.echo(f"{r.session_id}: ok")
    click.echo(f"{ok}/{total} records verified")
    if ok != total:
        sys.exit(1)


# -- analyze ------------------------------------------------------------------


@main.group()
def analyze() -> None:
    """Experiment analytics."""


def _read_csv(path: str) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return list(reader.fieldnames or []), list(reader)


@analyze.command("panas")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def analyze_panas(csv_path: str, as_json: bool) -> None:
    """Score affect-schedule responses (columns p1..p10, n1..n10)."""
    _, rows = _read_csv(csv_path)
    out = []
    for i, row in enumerate(rows):
        try:
            response = PanasResponse(
                tuple(int(row[f"p{j}"]) for j in range(1, 11)),
                tuple(int(row[f"n{j}"]) for j in range(1, 11)),
            )
        except (KeyError, ValueError) as e:
            raise click.ClickException(f"row {i + 1}: {e}") from e
        pa, na = score_panas(response)
        out.append(
            {
                "participant": row.get("participant", str(i + 1)),
                **({"condition": row["condition"]} if "condition" in row else {}),
                "positive_affect": pa,
                "negative_affect": na,
            }
        )

    def text() -> None:
        for r in out:
            cond = f" {r['condition']}" if "condition" in r else ""
            click.echo(f"{r['participant']}{cond}: PA={r['positive_affect']} NA={r['negative_affect']}")

    _emit(out, as_json, text)


@analyze.command("pxi")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def analyze_pxi(csv_path: str, as_json: bool) -> None:
    """Score player-experience responses (columns <construct>_1..3)."""
    _, rows = _read_csv(csv_path)
    out = []
    for i, row in enumerate(rows):
        items = []
        for construct, slug in _SLUGS.items():
            for j in (1, 2, 3):
                key = f"{slug}_{j}"
                if key not in row:
                    raise click.ClickException(f"row {i + 1}: missing column {key}")
                items.append(PxiItem(construct, int(row[key])))
        # any extra *_1..3 item columns ride along unscored
        for key, value in row.items():
            base, _, idx = key.rpartition("_")
            if idx in ("1", "2", "3") and base and base not in _SLUGS.values() and value:
                try:
                    items.append(PxiItem(base, int(value)))
                except ValueError:
                    pass
        try:
            response = PxiResponse(tuple(items))
        except ValueError as e:
            raise click.ClickException(f"row {i + 1}: {e}") from e
        scores = score_pxi(response)
        out.append({"participant": row.get("participant", str(i + 1)), "scores": scores})

    def text() -> None:
        for r in out:
            click.echo(f"{r['participant']}:")
            for construct in PXI_CONSTRUCTS:
                click.echo(f"  {construct:<20} {r['scores'][construct]:+.2f}")

    _emit(out, as_json, text)


@analyze.command("cr")
@click.argument("session_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True)
def analyze_cr(session_dir: str, as_json: bool) -> None:
    """Cardiac reactivity per level from >= 3 session logs each.

    Sessions are ordered by filename; the first is discarded, and the
    gameplay HR of sessions 2 and 3 forms the stressor window.  Baseline
    is session 2's own pre-gameplay baseline (first five valid samples).
    """
    by_level: dict[int, list] = {}
    for r in rec.list_records(session_dir):
        by_level.setdefault(r.level.level_id, []).append(r)
    if not by_level:
        raise click.ClickException("no session logs found")
    out = {}
    for level_id in sorted(by_level):
        sessions = by_level[level_id]
        try:
            window = rec.select_stressor_window(sessions)
        except ValueError as e:
            click.echo(f"level {level_id}: skipped ({e})", err=True)
            continue
        anchor = sessions[1]
        baseline = anchor.baseline_bpm()
        if baseline is None:
            first = anchor.hr_samples(gameplay_only=False)[:5]
            if len(first) < 5:
                click.echo(f"level {level_id}: skipped (no baseline candidates)", err=True)
                continue
            baseline = sum(first) / len(first)
        try:
            result = cardiac_reactivity(baseline, window)
        except ValueError as e:
            click.echo(f"level {level_id}: skipped ({e})", err=True)
            continue
        out[f"level_{level_id}"] = result.to_dict()

    def text() -> None:
        for key, r in out.items():
            click.echo(
                f"{key}: baseline {r['baseline_bpm']:.1f} bpm, "
                f"stressor mean {r['stressor_mean_bpm']:.1f} bpm, "
                f"reactivity {r['reactivity_bpm']:+.2f} bpm"
            )

    _emit(out, as_json, text)


@analyze.command("anova")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--subjects", type=click.Choice(["rows", "cols"]), default="rows", show_default=True)
@click.option("--conditions", type=click.Choice(["rows", "cols"]), default="cols", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def analyze_anova(csv_path: str, subjects: str, conditions: str, as_json: bool) -> None:
    """One-way repeated-measures ANOVA over a subjects x conditions table."""
    if subjects == conditions:
        raise click.ClickException("--subjects and --conditions must differ")
    fields, rows = _read_csv(csv_path)
    value_cols = [f for f in fields if f.lower() not in ("subject", "participant", "id")]
    try:
        matrix = [[float(row[c]) for c in value_cols] for row in rows]
    except ValueError as e:
        raise click.ClickException(f"non-numeric cell: {e}") from e
    if subjects == "cols":
        matrix = [list(col) for col in zip(*matrix)]
    try:
        result = rm_anova(matrix)
    except ValueError as e:
        raise click.ClickException(str(e)) from e
    labels = value_cols if conditions == "cols" else [f"condition_{j+1}" for j in range(len(matrix[0]))]

    def text() -> None:
        click.echo(f"F({result.df_condition}, {result.df_error}) = {result.f_stat:.4f}")
        click.echo(f"p = {result.p_value:.6g}")
        for label, mean in zip(labels, result.condition_means):
            click.echo(f"  {label:<16} mean {mean:.4f}")
        click.echo(
            f"SS: condition {result.ss_condition:.6g}, subject {result.ss_subject:.6g}, "
            f"error {result.ss_error:.6g}, total {result.ss_total:.6g}"
        )
        if result.flags:
            click.echo(f"flags: {', '.join(result.flags)}")

    _emit(result.to_dict(), as_json, text)


@analyze.command("orders")
@click.option("--k", default=3, show_default=True, help="Conditions.")
@click.option("--n", default=25, show_default=True, help="Participants.")
@click.option("--json", "as_json", is_flag=True)
def analyze_orders(k: int, n: int, as_json: bool) -> None:
    """Latin-square condition orderings for n participants."""
    orders = latin_square_orders(k, n)

    def text() -> None:
        for p, order in enumerate(orders, start=1):
            click.echo(f"participant {p:>3}: " + " -> ".join(str(c) for c in order))

    _emit(orders, as_json, text)


# -- bench ----------------------------------------------------------------------


@main.command()
@click.option("--ticks", default=200_000, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bench(ticks: int, as_json: bool) -> None:
    """Compare compiled and pure-Python tick kernel throughput."""
    from .benchmark import run_kernel_benchmark

    results = run_kernel_benchmark(ticks)

    def text() -> None:
        click.echo(f"active backend: {kernel_backend()}")
        for r in results:
            click.echo(f"{r['backend']:<8} {r['ticks_per_second']:>12,.0f} ticks/s ({r['ticks']} ticks)")
        if len(results) == 2:
            ratio = results[0]["ticks_per_second"] / results[1]["ticks_per_second"]
            click.echo(f"speedup: {ratio:.1f}x")

    _emit(results, as_json, text)


if __name__ == "__main__":
    main()
