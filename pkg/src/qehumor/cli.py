"""Command-line client for the qehumor service.

Every data command goes through the HTTP interface: against a remote server
when --server is given, otherwise against an in-process instance of the same
application. The server computes and returns named artifacts; the client
writes them under the output directory.

Precedence for settings: command-line flags, then the QEHUMOR_OUTPUT_DIR
environment variable (output directory only), then the --config file, then
built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import httpx

from .config import OUTPUT_DIR_ENV, RunConfig
from .errors import QehumorError

REQUEST_TIMEOUT = 3600.0


def _add_config_flags(parser: argparse.ArgumentParser, histogram: bool = False) -> None:
    parser.add_argument("--config", help="JSON config file with base settings")
    parser.add_argument("--dataset", help="TSV/CSV dataset path")
    parser.add_argument("--embeddings", help="embedding table path")
    parser.add_argument("--taxonomy", help="taxonomy file path")
    parser.add_argument("--lm-records", dest="lm_records", help="record file path")
    parser.add_argument("--output-dir", dest="output_dir", help="artifact directory")
    parser.add_argument(
        "--features", help="comma-separated feature names (default: the two entropy features)"
    )
    parser.add_argument("--kernel", choices=("linear", "rbf"))
    parser.add_argument("--c", type=float, dest="c")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--k", type=int, help="number of folds")
    parser.add_argument("--repetitions", type=int)
    parser.add_argument("--seeds", help="comma-separated seed list")
    parser.add_argument("--fold-strategy", dest="fold_strategy", choices=("stratified", "plain"))
    parser.add_argument(
        "--pair-scope",
        dest="pair_distance_scope",
        choices=("text", "setup", "punchline"),
    )
    parser.add_argument(
        "--content-mode", dest="content_embedding_mode", choices=("raw", "normalized")
    )
    parser.add_argument("--workers", type=int)
    if histogram:
        parser.add_argument("--bins", type=int)
    else:
        parser.add_argument(
            "--experiments", help="comma-separated subset of: single, content"
        )
        parser.add_argument(
            "--no-content-baseline",
            dest="content_baseline",
            action="store_const",
            const=False,
            help="skip the plain mean-embedding run in content experiments",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qehumor",
        description="Entropy-based humor-recognition features, evaluation, and service",
    )
    parser.add_argument("--server", help="base URL of a running service; default: in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    for name, needs_histogram in (("features", False), ("evaluate", False), ("histogram", True)):
        command = sub.add_parser(name, help=f"run the {name} pipeline")
        _add_config_flags(command, histogram=needs_histogram)

    return parser


def _parse_list(raw: Optional[str]) -> Optional[list[str]]:
    if raw is None:
        return None
    return [item.strip() for item in raw.split(",") if item.strip()]


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    env_output = os.environ.get(OUTPUT_DIR_ENV)
    if env_output:
        config = config.with_overrides({"output_dir": env_output})
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "dataset",
            "embeddings",
            "taxonomy",
            "lm_records",
            "output_dir",
            "kernel",
            "c",
            "gamma",
            "tol",
            "k",
            "repetitions",
            "fold_strategy",
            "pair_distance_scope",
            "content_embedding_mode",
            "workers",
            "bins",
            "content_baseline",
        )
    }
    overrides["features"] = _parse_list(getattr(args, "features", None))
    overrides["experiments"] = _parse_list(getattr(args, "experiments", None))
    seeds = _parse_list(getattr(args, "seeds", None))
    if seeds is not None:
        overrides["seeds"] = [int(s) for s in seeds]
    return config.with_overrides(overrides)


class ServiceClient:
    """HTTP access to the service, remote or in-process."""

    def __init__(self, server: Optional[str]):
        if server:
            self._client = httpx.Client(base_url=server, timeout=REQUEST_TIMEOUT)
        else:
            import warnings

            with warnings.catch_warnings():
                # The in-process transport import warns about its own packaging.
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code != 200:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise QehumorError(f"service error ({response.status_code}): {detail}")
        return response.json()

    def close(self) -> None:
        self._client.close()


def _write_artifacts(artifacts: list[dict], output_dir: str) -> list[str]:
    os.makedirs(output_dir, exist_ok=True)
    written = []
    for artifact in artifacts:
        path = os.path.join(output_dir, artifact["filename"])
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(artifact["content"])
        written.append(path)
    return written


def cmd_features(client: ServiceClient, config: RunConfig) -> int:
    body = client.post("/features", config.to_dict())
    written = _write_artifacts(body["artifacts"], config.output_dir)
    print(f"{body['count']} samples -> {', '.join(written)}")
    if body["degeneracy_counts"]:
        print(f"degenerate inputs: {json.dumps(body['degeneracy_counts'], sort_keys=True)}")
    return 0


def cmd_evaluate(client: ServiceClient, config: RunConfig) -> int:
    body = client.post("/evaluate", config.to_dict())
    written = _write_artifacts(body["artifacts"], config.output_dir)
    for row in body["aggregates"]:
        feature = row["feature"] or "(none)"
        print(
            f"{row['experiment']:<16} {feature:<16} "
            f"P={row['precision']:.4f} R={row['recall']:.4f} "
            f"F1={row['f1']:.4f} Acc={row['accuracy']:.4f}"
        )
    print(f"reports: {', '.join(written)}")
    return 0


def cmd_histogram(client: ServiceClient, config: RunConfig) -> int:
    body = client.post("/histogram", config.to_dict())
    written = _write_artifacts(body["artifacts"], config.output_dir)
    print(f"histograms for {', '.join(body['features'])} -> {', '.join(written)}")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("qehumor.service.app:app", host=args.host, port=args.port)
        return 0

    try:
        config = resolve_config(args)
        client = ServiceClient(args.server)
        try:
            handler = {
                "features": cmd_features,
                "evaluate": cmd_evaluate,
                "histogram": cmd_histogram,
            }[args.command]
            return handler(client, config)
        finally:
            client.close()
    except QehumorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
