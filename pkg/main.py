"""
CLI entry point for pnstruct.
Analyze marked Petri nets, check single properties, extract witnesses,
reproduce the overview table and generate test nets.

Exit codes: 0 success or property holds, 1 property fails,
2 usage or parse error, 3 resource limit hit.
"""
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape
from rich.table import Table

import config
from errors import CapExceeded, ComponentLimitExceeded, LimitExceeded, PetriNetError, UnboundedNet

console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


@dataclass
class CliConfig:
    """Options shared by every subcommand."""
    max_states: int = config.MAX_STATES
    max_edges: int = config.MAX_EDGES
    verbose: bool = False

    def __post_init__(self):
        if self.max_states < 1:
            raise click.BadParameter("must be at least 1", param_hint="--max-states")

    def limits(self):
        from state_space import ExplorationLimits
        return ExplorationLimits(self.max_states, self.max_edges)


@contextmanager
def handle_errors():
    """Translate analysis errors into exit codes."""
    try:
        yield
    except (LimitExceeded, ComponentLimitExceeded, CapExceeded, UnboundedNet) as e:
        err_console.print(f"[yellow]Inconclusive:[/] {escape(str(e))}")
        sys.exit(EXIT_LIMIT)
    except PetriNetError as e:
        err_console.print(f"[red]Error:[/] {type(e).__name__}: {escape(str(e))}")
        sys.exit(EXIT_USAGE)
    except OSError as e:
        err_console.print(f"[red]Error:[/] {e}")
        sys.exit(EXIT_USAGE)


def emit_json(data) -> None:
    click.echo(json.dumps(data, indent=2))


json_option = click.option('--json', 'as_json', is_flag=True, help='Write JSON to stdout')
net_argument = click.argument('file', type=click.Path(exists=True, dir_okay=False, path_type=Path))


@click.group()
@click.option('--max-states', type=int, default=config.MAX_STATES, show_default=True,
              help='Stop exploring after this many reachable markings')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging on stderr')
@click.pass_context
def cli(ctx, max_states, verbose):
    """Structure-theory analyzer for place/transition Petri nets"""
    config.configure_logging("DEBUG" if verbose else config.LOG_LEVEL)
    ctx.obj = CliConfig(max_states=max_states, verbose=verbose)


@cli.command()
@net_argument
@json_option
@click.option('--show-details', is_flag=True, help='Also print clusters, components, home markings and blocking markings')
@click.pass_obj
def analyze(cfg, file, as_json, show_details):
    """Run every check on a marked net"""
    from formats import load_net
    from report import analyze as run_analysis, yes_no

    with handle_errors():
        net, m0 = load_net(file)
        report = run_analysis(net, m0, cfg.limits())

    if as_json:
        emit_json(report.to_dict())
    else:
        table = Table(title=escape(f"{net.name}  {m0}"))
        table.add_column("Column", style="cyan")
        table.add_column("Value", justify="right")
        for column, value in report.table_row().items():
            table.add_row(column, yes_no(value))
        table.add_row("T-components", yes_no(report.t_component_count))
        table.add_row("P-cover", yes_no(report.has_p_cover))
        table.add_row("T-cover", yes_no(report.has_t_cover))
        console.print(table)
        for warning in report.warnings:
            console.print(f"[yellow]! {escape(warning)}[/]")
        if show_details:
            _print_details(report.details)

    if report.reachable_marking_count is None and report.bounded is None:
        sys.exit(EXIT_LIMIT)


def _print_details(details: dict) -> None:
    console.print("\n[bold]Clusters[/]")
    for c in details.get("clusters", []):
        console.print(f"  {c}")
    for key, title in (("p_components", "P-components"), ("t_components", "T-components")):
        if key in details:
            console.print(f"\n[bold]{title}[/]")
            for i, comp in enumerate(details[key], 1):
                console.print(f"  {i}. {comp}")
    if "home_markings" in details:
        console.print("\n[bold]Home markings[/]")
        console.print("  " + escape(", ".join(details["home_markings"]) or "none"))
    for entry in details.get("blocking", []):
        markings = ", ".join(entry["markings"]) or "none"
        console.print(f"  blocking {entry['cluster']}: {escape(markings)}")
    if details.get("deadlocks"):
        console.print(f"[dim]deadlocks: {escape(', '.join(details['deadlocks']))}[/]")
    if details.get("dead_transitions"):
        console.print(f"[dim]dead transitions: {', '.join(details['dead_transitions'])}[/]")


@cli.command()
@click.argument('prop', type=click.Choice(['free-choice', 'p-net', 't-net', 'strongly-connected', 'workflow',
                                           'live', 'bounded', 'safe', 'locally-safe', 'cyclic', 'sound',
                                           'perpetual', 'lucent', 'lucency', 'p-cover', 't-cover']))
@net_argument
@json_option
@click.pass_obj
def check(cfg, prop, file, as_json):
    """Check one property; exit 1 when it fails"""
    from formats import load_net
    from report import check_property

    with handle_errors():
        net, m0 = load_net(file)
        result = check_property(prop, net, m0, cfg.limits())

    if as_json:
        emit_json(result.to_dict())
    elif result.holds is None:
        console.print(f"[yellow]? {result.prop} undecided for {net.name}[/]")
    elif result.holds:
        console.print(f"[bold green]✓ {net.name} is {result.prop}[/]")
    else:
        console.print(f"[bold red]✗ {net.name} is not {result.prop}[/]")
    if not as_json:
        for line in result.witness:
            console.print(f"  {escape(line)}")

    if result.holds is None:
        sys.exit(EXIT_LIMIT)
    if not result.holds:
        sys.exit(EXIT_FAIL)


@cli.command()
@net_argument
@click.option('--kind', '-k', type=click.Choice(['p', 't']), default='p', help='P- or T-components')
@json_option
@click.pass_obj
def components(cfg, file, kind, as_json):
    """List P- or T-components, numbered from 1"""
    from formats import load_net
    from structure import has_cover, p_components, t_components

    with handle_errors():
        net, _ = load_net(file)
        comps = p_components(net) if kind == 'p' else t_components(net)

    covered = has_cover(net, comps)
    if as_json:
        emit_json({"kind": kind.upper(), "components": [sorted(c.nodes) for c in comps], "cover": covered})
        return
    console.print(f"[bold]{len(comps)} {kind.upper()}-components of {net.name}[/]")
    for i, comp in enumerate(comps, 1):
        console.print(f"  {i}. {comp}")
    console.print(f"[dim]cover: {'yes' if covered else 'no'}[/]")


@cli.command()
@net_argument
@click.option('--cluster', '-c', 'node', required=True, help='Any node of the cluster')
@json_option
@click.pass_obj
def blocking(cfg, file, node, as_json):
    """Blocking markings of a cluster, with sequences avoiding it"""
    from behavior import blocking_markings
    from formats import load_net
    from petri_net import cluster_of, sequence_text

    with handle_errors():
        net, m0 = load_net(file)
        result = blocking_markings(net, m0, cluster_of(net, node), cfg.limits())

    if as_json:
        emit_json(result.to_dict())
        return
    console.print(f"[bold]Blocking markings of {result.cluster}[/]")
    if not result.blocking_markings:
        console.print("  [dim]none reachable[/]")
    for m, seq in zip(result.blocking_markings, result.avoidance_sequences):
        console.print(escape(f"  {m}  via {sequence_text(seq)}"))


@cli.command()
@net_argument
@click.option('--components', '-c', 'indices', required=True, help='Comma-separated P-component numbers, e.g. 1,3')
@json_option
@click.pass_obj
def project(cfg, file, indices, as_json):
    """Q-projection onto chosen P-components"""
    from formats import load_net, serialize_lpn
    from structure import p_components, q_projection

    try:
        chosen = [int(part) for part in indices.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter("expected numbers such as 1,3", param_hint="--components")

    with handle_errors():
        net, m0 = load_net(file)
        comps = p_components(net)
        for i in chosen:
            if not 1 <= i <= len(comps):
                raise click.BadParameter(f"{net.name} has {len(comps)} P-components", param_hint="--components")
        projection = q_projection(net, m0, [comps[i - 1] for i in chosen])

    text = serialize_lpn(projection.projected_net, projection.projected_marking)
    if as_json:
        emit_json({
            "components": [sorted(c.nodes) for c in projection.chosen],
            "marking": str(projection.projected_marking),
            "lpn": text,
        })
    else:
        click.echo(text, nl=False)


@cli.command('short-circuit')
@net_argument
@click.option('--format', '-f', 'fmt', type=click.Choice(['lpn', 'pnml']), default='lpn', help='Output format')
@click.pass_obj
def short_circuit_cmd(cfg, file, fmt):
    """Add t_star from the sink back to the source of a workflow net"""
    from formats import dump_net, load_net
    from structure import short_circuit

    with handle_errors():
        net, m0 = load_net(file)
        closed = short_circuit(net)
    click.echo(dump_net(closed, m0, f".{fmt}"), nl=False)


@cli.command()
@click.argument('directory', type=click.Path(exists=True, file_okay=False, path_type=Path))
@json_option
@click.option('--check', 'compare', is_flag=True, help='Compare against the published rows; exit 1 on mismatch')
@click.pass_obj
def table(cfg, directory, as_json, compare):
    """Overview table for every net file in a directory"""
    from corpus import PUBLISHED_TABLE, net_files
    from formats import load_net
    from report import TABLE_COLUMNS, analyze as run_analysis, yes_no

    rows = []
    with handle_errors():
        for path in net_files(directory):
            logger.info("analyzing %s", path.name)
            net, m0 = load_net(path)
            rows.append((path.stem, run_analysis(net, m0, cfg.limits()).table_row()))

    mismatches = []
    if compare:
        for name, row in rows:
            expected = PUBLISHED_TABLE.get(name)
            if expected is None:
                continue
            for column in TABLE_COLUMNS:
                if row[column] != expected[column]:
                    mismatches.append(f"{name} {column}: got {yes_no(row[column])}, expected {yes_no(expected[column])}")

    if as_json:
        emit_json([{"net": name, **row} for name, row in rows])
    else:
        out = Table(title="Overview of the analyzed nets")
        out.add_column("Net", style="bold")
        for column in TABLE_COLUMNS:
            out.add_column(column, justify="center")
        for name, row in rows:
            out.add_row(name, *(yes_no(row[c]) for c in TABLE_COLUMNS))
        console.print(out)

    if mismatches:
        for line in mismatches:
            err_console.print(f"[red]✗ {escape(line)}[/]")
        sys.exit(EXIT_FAIL)
    if compare and not as_json:
        console.print("[bold green]✓ All rows match[/]")
    if any(row["RM"] is None for _, row in rows):
        sys.exit(EXIT_LIMIT)


@cli.command()
@click.option('--kind', '-k', type=click.Choice(['wf', 'random']), default='wf', help='Block-structured workflow net or small random net')
@click.option('--seed', '-s', type=int, default=1, help='Generator seed')
@click.option('--size', '-n', type=int, default=6, help='Transitions (wf) or nodes (random)')
@click.option('--format', '-f', 'fmt', type=click.Choice(['lpn', 'pnml']), default='lpn', help='Output format')
def gen(kind, seed, size, fmt):
    """Generate a net and print it"""
    from formats import dump_net
    from generators import GenParams, gen_block_wf, gen_small_random

    with handle_errors():
        params = GenParams(seed=seed, size=size)
        net, m0 = gen_block_wf(params) if kind == 'wf' else gen_small_random(params)
    click.echo(dump_net(net, m0, f".{fmt}"), nl=False)


@cli.command()
@click.argument('source', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument('target', type=click.Path(dir_okay=False, path_type=Path))
def convert(source, target):
    """Convert between .lpn and .pnml (by extension)"""
    from formats import dump_net, load_net

    with handle_errors():
        net, m0 = load_net(source)
        target.write_text(dump_net(net, m0, target.suffix.lower()), encoding="utf-8")
    console.print(f"[bold green]✓ Wrote {target}[/]")


@cli.command()
@click.option('--host', default='127.0.0.1', help='Host to bind to')
@click.option('--port', '-p', default=8000, help='Port to bind to')
@click.option('--reload', is_flag=True, help='Restart on code changes')
def serve(host, port, reload):
    """Start the HTTP API"""
    import uvicorn

    console.print(f"[bold blue]Starting server at http://{host}:{port}[/]")
    console.print(f"[dim]API at http://{host}:{port}/api/[/]")
    uvicorn.run("server:app", host=host, port=port, reload=reload)


if __name__ == '__main__':
    cli()
