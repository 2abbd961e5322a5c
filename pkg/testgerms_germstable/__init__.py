from .model_germs import ConjugatedModel, LinearModel, ReducedModel, ToyFlowModel

# console script entry point, __main__.py calls the same function


def _complex_list(text):
    return [complex(item.replace("i", "j")) for item in text.split(",") if item.strip()]


def main(argv=None):
    import argparse
    import sys

    import numpy as np

    from .util.specs import render_spec

    parser = argparse.ArgumentParser(prog="GermStableModels", description="write model germ specification files")
    parser.add_argument("model", choices=["reduced", "conjugated", "toy", "linear"])
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--p", type=int, default=1)
    parser.add_argument("--mu", type=complex, default=1.0)
    parser.add_argument("--lam", type=complex, default=0.5)
    parser.add_argument("--coupling", type=complex, default=0.0)
    parser.add_argument("--coeffs", type=_complex_list, default=[-1.0, 0.0], help="a(x) or A(x), e.g. -1,0.5")
    parser.add_argument("--order", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--output", default=None)
    args = parser.parse_args(argv)

    match args.model:
        case "reduced":
            model = ReducedModel(args.k, args.p, args.mu, args.coeffs, args.order)
        case "conjugated":
            base = ReducedModel(args.k, args.p, args.mu, args.coeffs, args.order)
            model = ConjugatedModel(base, np.random.default_rng(args.seed))
        case "toy":
            model = ToyFlowModel(args.k, args.p, args.mu, args.coeffs, args.order)
        case _:
            model = LinearModel(args.lam, args.mu, args.coupling, args.order)

    text = render_spec(model)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    return 0
