"""Command line verbs: classify, reduce, directions, stable-sets, probe, report."""
import argparse
import json
import logging
import os
import sys

from dataformat_germstable.converter import Converter
from germstable.germstable_pipeline import STAGES, GermStablePipeline
from germstable.proc_funcs.orbit import orbit_rows
from germstable.util_funcs.errors import GermError
from germstable.util_funcs.parsers import read_germ_spec
from germstable.util_funcs.settings import PipelineSettings

logger = logging.getLogger(__name__)

# report keys printed by each verb
VERB_SECTIONS = {
    "classify": ("classification", "notes", "warnings"),
    "reduce": ("classification", "reduced", "warnings"),
    "directions": ("reduced", "directions", "warnings"),
    "stable-sets": ("directions", "stable_sets", "notes", "warnings"),
    "probe": ("probes", "capture", "excluded_orbits", "warnings"),
    "report": None,
}


def _probes_arg(value):
    count, _, radius = value.partition("@")
    try:
        return int(count), float(radius) if radius else None
    except ValueError:
        raise argparse.ArgumentTypeError("expected <count>@<radius>") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="GermStable",
        description="Stable sets of holomorphic germs of (C^2, 0) near a formal invariant curve",
    )
    parser.add_argument("--show-settings", action="store_true", help="print the settings table and exit")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest="verb")
    for verb in STAGES:
        cmd = sub.add_parser(verb, help=f"run the pipeline up to '{verb}'")
        cmd.add_argument("spec", help="germ specification file")
        cmd.add_argument("--order", type=int, default=None)
        cmd.add_argument("--iterate", type=int, default=None)
        cmd.add_argument("--contact-m", dest="contact_m", type=int, default=None)
        cmd.add_argument("--tol", type=float, default=None)
        cmd.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        cmd.add_argument("--probes", type=_probes_arg, default=None, help="<count>@<radius>")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--workers", type=int, default=None)
        cmd.add_argument("--json", dest="json_path", default=None, help="write the full report here")
        cmd.add_argument("--csv-dir", dest="csv_dir", default=None, help="orbit dumps and plot data")
        cmd.add_argument("--nexus", dest="nexus_path", default=None, help="write the report as NeXus")
    return parser


def configure_logging(verbosity):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def overrides_from_args(args):
    overrides = {
        "order": args.order,
        "iterate": args.iterate,
        "contact_m": args.contact_m,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "seed": args.seed,
        "workers": args.workers,
    }
    if args.probes is not None:
        overrides["probes"], overrides["probe_radius"] = args.probes
    return overrides


def write_outputs(pipeline, args, converter):
    if args.json_path:
        converter.write_json(args.json_path)
    if args.nexus_path:
        converter.convert_to_nexus(args.nexus_path)
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        for i, record in enumerate(pipeline.records):
            header, rows = orbit_rows(record)
            converter.write_orbit_csv(header, rows, os.path.join(args.csv_dir, f"orbit_{i}.csv"))
        converter.write_plot_data(args.csv_dir)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    if args.show_settings:
        print(PipelineSettings.describe())
        return 0
    if args.verb is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        spec = read_germ_spec(args.spec)
        pipeline = GermStablePipeline(spec, overrides_from_args(args))
        report = pipeline.run(until=args.verb)
    except GermError as error:
        print(f"GermStable: {error}", file=sys.stderr)
        return error.exit_code
    except (OSError, ValueError, KeyError) as error:
        print(f"GermStable: {error}", file=sys.stderr)
        return 3

    converter = Converter(report)
    payload = report.to_dict()
    sections = VERB_SECTIONS[args.verb]
    if sections is not None:
        payload = {key: payload[key] for key in sections}
    print(json.dumps(payload, indent=2))
    write_outputs(pipeline, args, converter)
    return 0
