from .germstable_pipeline import run_pipeline
from .util_funcs.parsers import parse_germ_spec

# the console script needs a module level callable, __main__.py reuses it


def main():
    import sys

    from .germstable_cli import run

    sys.exit(run(sys.argv[1:]))
