#!/usr/bin/env python3
"""Render figures from impedance-lab harness CSV files.

Two figure kinds:
  rmse      relative MSE of the F estimate vs SNR, one line per estimator,
            with the matching CRB drawn dashed (dB scale on the y-axis)
  capacity  C_mismatched / C_adapted / C_upper vs SNR

Usage:
  render.py --csv sweep.csv --kind rmse --out fig.svg [--filter k=v ...]

The input is read-only. The first line of the CSV must be `schema=1`.
"""

import argparse
import csv
import io
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SCHEMA = "schema=1"


class SchemaMismatch(Exception):
    """The CSV file does not carry the expected schema marker."""


class EmptySelection(Exception):
    """No rows survive the requested filters."""


def load_rows(path):
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != SCHEMA:
            raise SchemaMismatch(
                f"{path}: expected first line {SCHEMA!r}, got {first!r}")
        return list(csv.DictReader(io.StringIO(fh.read())))


def apply_filters(rows, filters):
    for key, value in filters:
        rows = [r for r in rows if r.get(key) == value]
    if not rows:
        raise EmptySelection("no rows match the requested filters")
    return rows


def _floats(rows, column):
    xs, ys = [], []
    for r in rows:
        if r[column]:
            xs.append(float(r["snr_db"]))
            ys.append(float(r[column]))
    return xs, ys


def _db(values):
    # relative MSE in dB: the CSV stores relative RMSE
    return [20.0 * math.log10(v) for v in values]


def render_rmse(rows, out):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    estimators = sorted({r["estimator"] for r in rows})
    for est in estimators:
        sub = sorted((r for r in rows if r["estimator"] == est),
                     key=lambda r: float(r["snr_db"]))
        xs, ys = _floats(sub, "rmse_F_rel")
        if xs:
            ax.plot(xs, _db(ys), marker="o", label=est)
        xs, ys = _floats(sub, "crb_F_rel")
        if xs:
            ax.plot(xs, _db(ys), linestyle="--", label=f"CRB ({est})")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("relative MSE of $\\hat{F}$ (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def render_capacity(rows, out):
    rows = sorted(rows, key=lambda r: float(r["snr_db"]))
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    xs = [float(r["snr_db"]) for r in rows]
    for column, style in (("C_upper", dict(linestyle="--", color="k")),
                          ("C_adapted", dict(marker="o")),
                          ("C_mismatched", dict(marker="s"))):
        ax.plot(xs, [float(r[column]) for r in rows], label=column, **style)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("capacity lower bound (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def render(csv_path, kind, out, filters=()):
    rows = apply_filters(load_rows(csv_path), filters)
    if kind == "rmse":
        render_rmse(rows, out)
    else:
        render_capacity(rows, out)


def parse_filter(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"filter {text!r} is not key=value")
    key, _, value = text.partition("=")
    return key, value


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--csv", required=True, help="input CSV file")
    parser.add_argument("--kind", required=True, choices=("rmse", "capacity"))
    parser.add_argument("--out", required=True, help="output image (SVG/PNG)")
    parser.add_argument("--filter", action="append", default=[],
                        type=parse_filter, metavar="KEY=VALUE",
                        help="keep only rows with this column value")
    args = parser.parse_args(argv)
    try:
        render(args.csv, args.kind, args.out, args.filter)
    except (SchemaMismatch, EmptySelection, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
