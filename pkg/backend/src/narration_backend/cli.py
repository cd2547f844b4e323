"""Backend command line: serve a model (or the stub), or fine-tune one."""

from __future__ import annotations

import argparse
import sys


def cmd_serve(args) -> int:
    import uvicorn

    from .server import ModelEngine, StubEngine, create_app

    if args.stub:
        engine = StubEngine()
    elif args.model:
        engine = ModelEngine(args.model)
    else:
        print("serve needs --stub or --model <artifact dir>", file=sys.stderr)
        return 2
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_finetune(args) -> int:
    from .data import prepare_dataset
    from .model import FinetuneConfig, finetune

    config = FinetuneConfig(
        base_model=args.base,
        architecture=args.architecture,
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        dataset=args.data,
        seed=args.seed,
    )
    dataset = prepare_dataset(args.data, args.data_dir)
    if args.records:
        dataset = type(dataset)(pairs=dataset.pairs[: args.records],
                                skipped=dataset.skipped, sources=dataset.sources)
    manifest = finetune(dataset, config, args.out)
    print(f"model {manifest['model_id']} trained on {manifest['records']} records "
          f"({manifest['skipped_records']} skipped); "
          f"loss {manifest['losses'][0]:.4f} -> {manifest['losses'][-1]:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="narration-backend")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="serve the t3/1 contract")
    p_serve.add_argument("--model", help="artifact directory from finetune")
    p_serve.add_argument("--stub", action="store_true",
                         help="serve the deterministic echo stub")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.set_defaults(func=cmd_serve)

    p_tune = sub.add_parser("finetune", help="train a graph-to-text model")
    p_tune.add_argument("--base", default="gru-seq2seq-small")
    p_tune.add_argument("--architecture", default="seq2seq",
                        choices=["seq2seq", "autoregressive"])
    p_tune.add_argument("--data", default="both",
                        choices=["webnlg", "dart", "both"])
    p_tune.add_argument("--data-dir", default="data")
    p_tune.add_argument("--out", required=True)
    p_tune.add_argument("--lr", type=float, default=None)
    p_tune.add_argument("--epochs", type=int, default=1)
    p_tune.add_argument("--batch-size", type=int, default=4)
    p_tune.add_argument("--records", type=int, default=None,
                        help="cap the number of training records")
    p_tune.add_argument("--seed", type=int, default=0)
    p_tune.set_defaults(func=cmd_finetune)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
