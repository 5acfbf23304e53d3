"""Command line client for the clustering service.

All commands go through HTTP semantics: by default against an in-process
application instance, or against a running server when --server is given.
Exit codes: 0 success, 1 runtime or transport failure, 2 usage error
(bad flags, malformed input, rejected request).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import List, Optional, Tuple

from .data import load_csv, load_dataset_json

DEFAULT_N_GRID = "256,512,1024,2048,4096,8192"


class CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


class ServiceClient:
    """Uniform request interface over in-process and remote transports."""

    def __init__(self, server: Optional[str] = None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                # starlette warns about its own test client backend at import
                warnings.simplefilter("ignore", UserWarning)
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

            from .service.app import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)
        else:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)

    def _request(self, method: str, path: str, payload=None) -> dict:
        try:
            if method == "GET":
                resp = self._client.get(path)
            else:
                resp = self._client.post(path, json=payload)
        except Exception as exc:
            raise CliError(1, f"transport failure: {exc}")
        if resp.status_code >= 500:
            raise CliError(1, f"server error {resp.status_code}: {resp.text}")
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise CliError(2, f"rejected ({resp.status_code}): {detail}")
        return resp.json()

    def get(self, path: str) -> dict:
        return self._request("GET", path)

    def post(self, path: str, payload: dict) -> dict:
        return self._request("POST", path, payload)


def _int_or_str(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _parse_pairs(text: str) -> List[Tuple[int, int]]:
    pairs = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected i:j, got {chunk!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(f"non-integer pair {chunk!r}")
    return pairs


def _parse_grid(text: str) -> List[int]:
    try:
        grid = [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated ints, got {text!r}")
    if not grid:
        raise argparse.ArgumentTypeError("empty size grid")
    return grid


def _default_threads() -> int:
    env = os.environ.get("QDPC_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _load_payload(args) -> dict:
    """Read the dataset named by --data into a request payload."""
    path = args.data
    try:
        if path.endswith(".json"):
            dataset = load_dataset_json(path, metric=args.metric)
        else:
            columns = None
            if args.columns:
                columns = [_int_or_str(c.strip()) for c in args.columns.split(",")]
            dataset = load_csv(
                path,
                delimiter=args.delimiter,
                header=args.header,
                id_column=args.id_column,
                columns=columns,
                metric=args.metric,
            )
    except OSError as exc:
        raise CliError(2, f"cannot read {path}: {exc}")
    except ValueError as exc:
        raise CliError(2, f"cannot parse {path}: {exc}")
    body = dataset.to_json()
    body["metric"] = dataset.metric
    return body


def _add_data_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="dataset file (.json or delimited text)")
    parser.add_argument("--metric", choices=["euclidean", "manhattan", "chebyshev"],
                        default="euclidean")
    parser.add_argument("--delimiter", default=",")
    parser.add_argument("--header", action="store_true",
                        help="first row of a delimited file names the columns")
    parser.add_argument("--id-column", type=_int_or_str, default=None,
                        help="column (index or header name) to drop as an identifier")
    parser.add_argument("--columns", default=None,
                        help="comma separated columns (indices or header names) to keep")


def _add_clustering_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", choices=["step", "gaussian"], required=True)
    parser.add_argument("--d-c", type=float, required=True, help="kernel cutoff")
    parser.add_argument("--rho-c", type=float, required=True, help="density threshold")
    parser.add_argument("--delta-c", type=float, required=True, help="separation threshold")


def _kernel_payload(args) -> dict:
    return {"kind": args.kernel, "d_c": args.d_c}


def _write_json(path: str, body: dict) -> None:
    with open(path, "w") as fh:
        json.dump(body, fh, indent=2)
        fh.write("\n")


def cmd_generate(args, client: ServiceClient) -> int:
    body = client.post("/generate", {
        "family": args.family, "n": args.n, "d": args.d, "seed": args.seed,
        "radius": args.radius, "k": args.k, "box": args.box,
        "covariance": args.covariance,
    })
    dataset = body["dataset"]
    if args.out:
        _write_json(args.out, dataset)
        print(f"wrote {dataset['n']} points in d={dataset['d']} to {args.out}")
    else:
        json.dump(dataset, sys.stdout)
        print()
    return 0


def cmd_cluster(args, client: ServiceClient) -> int:
    payload = {
        "dataset": _load_payload(args),
        "kernel": _kernel_payload(args),
        "rho_c": args.rho_c, "delta_c": args.delta_c,
    }
    body = client.post("/cluster", payload)
    labels = body["labels"]
    n_noise = sum(1 for l in labels if l == "noise")
    if args.out:
        _write_json(args.out, body)
    if args.rho_delta:
        with open(args.rho_delta, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "rho", "delta"])
            for idx, (rho, delta) in enumerate(zip(body["rho"], body["delta"])):
                writer.writerow([idx, repr(rho), "inf" if delta == "inf" else repr(delta)])
    print(
        f"clusters={len(body['roots'])} outliers={len(body['outliers'])} "
        f"noise_points={n_noise} classical_queries={body['classical_queries']}"
    )
    return 0


def cmd_decide(args, client: ServiceClient) -> int:
    payload = {
        "dataset": _load_payload(args), "i": args.i, "j": args.j,
        "kernel": _kernel_payload(args),
        "rho_c": args.rho_c, "delta_c": args.delta_c,
    }
    body = client.post("/decide", payload)
    verdict = "yes" if body["same_cluster"] else "no"
    print(
        f"same-cluster: {verdict} (root_i={body['root_i']} root_j={body['root_j']} "
        f"classical_queries={body['classical_queries']})"
    )
    if args.out:
        _write_json(args.out, body)
    return 0


def cmd_qdecide(args, client: ServiceClient) -> int:
    payload = {
        "dataset": _load_payload(args), "i": args.i, "j": args.j,
        "kernel": _kernel_payload(args),
        "rho_c": args.rho_c, "delta_c": args.delta_c,
        "epsilon": args.epsilon, "seed": args.seed, "repeats": args.repeats,
        "cutoff_factor": args.cutoff_factor, "growth": args.growth,
    }
    body = client.post("/qdecide", payload)
    c = body["classical"]
    q = body["quantum"]
    verdict = "yes" if c["same_cluster"] else "no"
    print(
        f"classical: {verdict} (root_i={c['root_i']} root_j={c['root_j']} "
        f"queries={c['classical_queries']})"
    )
    print(
        f"quantum:   yes_rate={q['yes_rate']:.3f} agreement={q['agreement_rate']:.3f} "
        f"mean_charged={q['mean_charged_queries']:.1f} "
        f"mean_rounds={q['mean_grover_iterations']:.1f} over {body['repeats']} repeats"
    )
    if args.out:
        _write_json(args.out, body)
    return 0


def cmd_heights(args, client: ServiceClient) -> int:
    body = client.post("/heights", {
        "family": args.family, "d": args.d, "n_grid": args.n_grid,
        "runs": args.runs, "seed": args.seed, "d_c": args.d_c,
        "threads": args.threads,
    })
    prefix = args.out_prefix
    report_path = f"{prefix}_report.csv"
    long_path = f"{prefix}_long.csv"
    with open(report_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "d", "n", "run_count", "mean_H"])
        for e in body["entries"]:
            writer.writerow([e["family"], e["d"], e["n"], e["run_count"], repr(e["mean_H"])])
    with open(long_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "d", "n", "run", "height", "d_c"])
        for r in body["long"]:
            writer.writerow([r["family"], r["d"], r["n"], r["run"], r["height"], repr(r["d_c"])])
    wrote = [report_path, long_path]
    if body["fit"] is not None:
        fit_path = f"{prefix}_fit.json"
        _write_json(fit_path, body["fit"])
        wrote.append(fit_path)
        fit = body["fit"]
        print(
            f"fit: slope={fit['slope']:.4f} d_eff={fit['d_eff']:.3f} r2={fit['r2']:.4f}"
        )
    print("wrote " + " ".join(wrote))
    return 0


def cmd_fit(args, client: ServiceClient) -> int:
    try:
        with open(args.report, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CliError(2, f"cannot read {args.report}: {exc}")
    if not rows:
        raise CliError(2, f"{args.report}: no data rows")
    try:
        points = [(float(r["n"]), float(r["mean_H"])) for r in rows]
        family = rows[0]["family"]
        d = int(rows[0]["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(2, f"{args.report}: expected a height report (family,d,n,run_count,mean_H): {exc}")
    body = client.post("/fit", {"points": points, "family": family, "d": d})
    print(
        f"fit: slope={body['slope']:.4f} d_eff={body['d_eff']:.3f} r2={body['r2']:.4f}"
    )
    if args.out:
        _write_json(args.out, body)
    return 0


def cmd_qbench(args, client: ServiceClient) -> int:
    payload = {
        "kernel": _kernel_payload(args),
        "rho_c": args.rho_c, "delta_c": args.delta_c,
        "epsilon": args.epsilon, "repeats": args.repeats, "seed": args.seed,
        "num_pairs": args.num_pairs,
    }
    if args.data:
        payload["dataset"] = _load_payload(args)
    else:
        if not (args.family and args.n and args.d):
            raise CliError(2, "qbench needs --data or all of --family, --n, --d")
        payload.update({"family": args.family, "n": args.n, "d": args.d})
    if args.pairs:
        payload["pairs"] = args.pairs
    body = client.post("/qbench", payload)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["i", "j", "same_cluster", "classical_queries", "quantum_mean_charged",
                 "quantum_mean_rounds", "agreement_rate", "repeats"]
            )
            for r in body["rows"]:
                writer.writerow(
                    [r["i"], r["j"], int(r["same_cluster"]), r["classical_queries"],
                     repr(r["quantum_mean_charged"]), repr(r["quantum_mean_rounds"]),
                     repr(r["agreement_rate"]), r["repeats"]]
                )
    below = "yes" if body["quantum_below_classical"] else "no"
    print(
        f"n={body['n']} pairs={len(body['rows'])} "
        f"classical_mean={body['classical_queries_mean']:.1f} "
        f"quantum_mean={body['quantum_charged_mean']:.1f} "
        f"agreement={body['agreement_rate']:.3f} quantum_below_classical={below}"
    )
    return 0


def cmd_toy(args, client: ServiceClient) -> int:
    payload = {"runs": args.runs, "seed": args.seed}
    if args.fixture:
        try:
            with open(args.fixture) as fh:
                payload["fixture"] = json.load(fh)
        except OSError as exc:
            raise CliError(2, f"cannot read {args.fixture}: {exc}")
        except ValueError as exc:
            raise CliError(2, f"cannot parse {args.fixture}: {exc}")
    body = client.post("/toy", payload)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["element", "quantum_mean", "classical_mean", "runs"])
            for r in body["rows"]:
                writer.writerow(
                    [r["element"], repr(r["quantum_mean"]), repr(r["classical_mean"]), r["runs"]]
                )
    for r in body["rows"]:
        print(
            f"element {r['element']}: quantum_mean={r['quantum_mean']:.3f} "
            f"classical_mean={r['classical_mean']:.3f} runs={r['runs']}"
        )
    return 0


def cmd_serve(args, client: ServiceClient) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdpc",
        description="Density peak clustering lab: generators, clustering, "
        "query-counted decisions, quantum minimum finding, scaling studies.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    parser.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads for grid studies (env QDPC_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a synthetic dataset")
    p.add_argument("--family", choices=["uniform", "gaussian"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--k", type=int, default=10, help="mixture components")
    p.add_argument("--box", type=float, default=100.0, help="centroid box side")
    p.add_argument("--covariance", choices=["random", "identity"], default="random")
    p.add_argument("--out", default=None, help="dataset JSON path (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="full clustering of a dataset")
    _add_data_args(p)
    _add_clustering_args(p)
    p.add_argument("--out", default=None, help="clustering JSON path")
    p.add_argument("--rho-delta", default=None, help="per-point rho/delta CSV path")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("decide", help="same-cluster decision for one pair")
    _add_data_args(p)
    _add_clustering_args(p)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--out", default=None, help="decision JSON path")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("qdecide", help="quantum-walk decision vs the classical verdict")
    _add_data_args(p)
    _add_clustering_args(p)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--cutoff-factor", type=float, default=22.5)
    p.add_argument("--growth", type=float, default=8.0 / 7.0)
    p.add_argument("--out", default=None, help="summary JSON path")
    p.set_defaults(func=cmd_qdecide)

    p = sub.add_parser("heights", help="tallest-tree height across dataset sizes")
    p.add_argument("--family", choices=["uniform", "gaussian"], required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-grid", type=_parse_grid, default=_parse_grid(DEFAULT_N_GRID))
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--d-c", type=float, default=None,
                   help="pin the kernel cutoff (default: per-dataset subsample estimate)")
    p.add_argument("--out-prefix", default="heights")
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("fit", help="power-law fit of a height report")
    p.add_argument("--report", required=True, help="report CSV from the heights command")
    p.add_argument("--out", default=None, help="fit JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("qbench", help="classical vs quantum decision query counts")
    p.add_argument("--data", default=None, help="dataset file (.json or delimited text)")
    p.add_argument("--metric", choices=["euclidean", "manhattan", "chebyshev"],
                   default="euclidean")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--header", action="store_true")
    p.add_argument("--id-column", type=_int_or_str, default=None)
    p.add_argument("--columns", default=None)
    p.add_argument("--family", choices=["uniform", "gaussian"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    _add_clustering_args(p)
    p.add_argument("--pairs", type=_parse_pairs, default=None, help="pairs as i:j,i:j,...")
    p.add_argument("--num-pairs", type=int, default=5)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="benchmark CSV path")
    p.set_defaults(func=cmd_qbench)

    p = sub.add_parser("toy", help="8-element threshold search experiment")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--fixture", default=None, help="fixture JSON with rho and dist")
    p.add_argument("--out", default=None, help="stats CSV path")
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        client = ServiceClient(args.server) if args.command != "serve" else None
        return args.func(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
