#!/usr/bin/env python3
"""Generate the Parquet test corpus with row-level JSON sidecars.

Each fixture is written by pyarrow (the reference implementation) next to a
.rows.json sidecar holding the expected decoded rows under the conventions the
C++ reader uses:

  timestamp -> int64 microseconds since epoch
  date      -> "YYYY-MM-DD"
  time      -> int64 microseconds since midnight (raw surface)
  decimal   -> exact string with the column scale
  binary    -> lowercase hex string
  map       -> {"key_value": [{"key": k, "value": v}, ...]} (raw surface)
"""

import argparse
import datetime
import decimal
import json
import pathlib
import random
import string

import pyarrow as pa
import pyarrow.parquet as pq

ROOT = pathlib.Path(__file__).resolve().parent
PARQUET_DIR = ROOT / "parquet"

EPOCH = datetime.datetime(1970, 1, 1)
EPOCH_UTC = datetime.datetime(1970, 1, 1, tzinfo=datetime.timezone.utc)


def conv(v, t):
    if v is None:
        return None
    if pa.types.is_map(t):
        return {
            "key_value": [
                {"key": conv(k, t.key_type), "value": conv(x, t.item_type)}
                for k, x in v
            ]
        }
    if pa.types.is_list(t) or pa.types.is_large_list(t):
        return [conv(x, t.value_type) for x in v]
    if pa.types.is_struct(t):
        return {f.name: conv(v[f.name], f.type) for f in t}
    if pa.types.is_timestamp(t):
        ep = EPOCH_UTC if v.tzinfo else EPOCH
        return (v - ep) // datetime.timedelta(microseconds=1)
    if pa.types.is_date(t):
        return v.isoformat()
    if pa.types.is_time(t):
        return ((v.hour * 60 + v.minute) * 60 + v.second) * 1_000_000 + v.microsecond
    if pa.types.is_decimal(t):
        return str(v)
    if (
        pa.types.is_binary(t)
        or pa.types.is_large_binary(t)
        or pa.types.is_fixed_size_binary(t)
    ):
        return v.hex()
    return v


def emit(name, table, **write_kwargs):
    PARQUET_DIR.mkdir(parents=True, exist_ok=True)
    path = PARQUET_DIR / f"{name}.parquet"
    pq.write_table(table, path, **write_kwargs)
    meta = pq.ParquetFile(path).metadata
    rows = []
    pylist = table.to_pylist()
    for row in pylist:
        rows.append([conv(row[f.name], f.type) for f in table.schema])
    sidecar = {
        "columns": [f.name for f in table.schema],
        "num_rows": table.num_rows,
        "num_row_groups": meta.num_row_groups,
        "rows": rows,
    }
    with open(PARQUET_DIR / f"{name}.rows.json", "w") as fh:
        json.dump(sidecar, fh, separators=(",", ":"), default=str)
    print(f"  {name}: {table.num_rows} rows, {meta.num_row_groups} groups, "
          f"{path.stat().st_size} bytes")


def gen_parquet():
    rng = random.Random(7)

    def words(n, pool):
        return [rng.choice(pool) for _ in range(n)]

    def hexes(n, k=12):
        return ["".join(rng.choices(string.hexdigits.lower(), k=k)) for _ in range(n)]

    # 1: flat, required, PLAIN, uncompressed
    n = 200
    emit(
        "flat_required",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "score": pa.array([i * 0.25 for i in range(n)], pa.float64()),
                "name": pa.array([f"user-{i:03d}" for i in range(n)], pa.string()),
                "ok": pa.array([i % 3 == 0 for i in range(n)], pa.bool_()),
                "n32": pa.array([i - 100 for i in range(n)], pa.int32()),
                "n16": pa.array([i % 128 - 64 for i in range(n)], pa.int16()),
                "f32": pa.array([float(i) * 0.5 for i in range(n)], pa.float32()),
                "raw": pa.array([bytes([i % 256, 255 - i % 256]) for i in range(n)],
                                pa.binary()),
            }
        ),
        use_dictionary=False,
        compression="none",
    )

    # 2: flat nullable, several row groups
    n = 210
    def maybe(vals, period):
        return [None if i % period == 0 else v for i, v in enumerate(vals)]
    emit(
        "flat_nullable",
        pa.table(
            {
                "id": pa.array(maybe(list(range(n)), 7), pa.int64()),
                "score": pa.array(maybe([i * 1.5 for i in range(n)], 5), pa.float64()),
                "name": pa.array(maybe([f"n{i}" for i in range(n)], 4), pa.string()),
                "ok": pa.array(maybe([i % 2 == 0 for i in range(n)], 3), pa.bool_()),
            }
        ),
        use_dictionary=False,
        compression="none",
        row_group_size=70,
    )

    # 3: dictionary-encoded strings, snappy, v1 pages
    n = 1000
    cats = ["alpha", "beta", "gamma", "delta", "epsilon"]
    emit(
        "dict_snappy",
        pa.table(
            {
                "cat": pa.array(words(n, cats), pa.string()),
                "sub": pa.array(maybe(words(n, cats), 9), pa.string()),
                "v": pa.array([rng.randint(-1000, 1000) for _ in range(n)], pa.int64()),
            }
        ),
        use_dictionary=True,
        compression="snappy",
        row_group_size=600,
    )

    # 4: data page v2, gzip (v2 stores levels uncompressed, bools as RLE)
    n = 500
    emit(
        "dict_gzip_pagev2",
        pa.table(
            {
                "cat": pa.array(words(n, cats), pa.string()),
                "flag": pa.array([i % 5 != 2 for i in range(n)], pa.bool_()),
                "v": pa.array(maybe([i * 11 for i in range(n)], 6), pa.int64()),
                "w": pa.array(maybe([i * 0.75 for i in range(n)], 8), pa.float64()),
            }
        ),
        use_dictionary=True,
        compression="gzip",
        data_page_version="2.0",
    )

    # 5: zstd
    n = 800
    emit(
        "zstd_floats",
        pa.table(
            {
                "x": pa.array([rng.uniform(-5, 5) for _ in range(n)], pa.float64()),
                "y": pa.array(maybe([rng.uniform(0, 1) for _ in range(n)], 11),
                              pa.float64()),
                "k": pa.array(range(n), pa.int64()),
            }
        ),
        use_dictionary=False,
        compression="zstd",
        row_group_size=500,
    )

    # 6: lists with empties, nulls, and null elements
    n = 120
    ints, strs = [], []
    for i in range(n):
        if i % 10 == 3:
            ints.append(None)
        elif i % 10 == 6:
            ints.append([])
        else:
            ints.append([None if j % 4 == 2 else i * 10 + j for j in range(i % 5)])
        if i % 7 == 2:
            strs.append(None)
        else:
            strs.append([f"s{i}.{j}" for j in range(i % 4)])
    emit(
        "nested_lists",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "nums": pa.array(ints, pa.list_(pa.int64())),
                "tags": pa.array(strs, pa.list_(pa.string())),
            }
        ),
        use_dictionary=False,
        compression="none",
        row_group_size=50,
    )

    # 7: struct column, sometimes null, with nullable members
    n = 100
    structs = []
    for i in range(n):
        if i % 9 == 4:
            structs.append(None)
        else:
            structs.append(
                {"a": None if i % 6 == 1 else i, "b": None if i % 5 == 2 else f"b{i}"}
            )
    emit(
        "nested_struct",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "rec": pa.array(
                    structs, pa.struct([("a", pa.int64()), ("b", pa.string())])
                ),
            }
        ),
        use_dictionary=False,
        compression="none",
    )

    # 8: list of struct
    n = 80
    los = []
    for i in range(n):
        if i % 11 == 5:
            los.append(None)
        else:
            los.append(
                [
                    {"x": i * 100 + j, "y": None if j == 1 else f"p{j}"}
                    for j in range(i % 4)
                ]
            )
    emit(
        "list_of_struct",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "pts": pa.array(
                    los, pa.list_(pa.struct([("x", pa.int64()), ("y", pa.string())]))
                ),
            }
        ),
        use_dictionary=False,
        compression="none",
    )

    # 9: struct of list
    n = 80
    sol = []
    for i in range(n):
        sol.append(
            {
                "tags": None if i % 8 == 3 else [f"t{j}" for j in range(i % 3)],
                "n": i,
            }
        )
    emit(
        "struct_of_list",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "meta": pa.array(
                    sol,
                    pa.struct([("tags", pa.list_(pa.string())), ("n", pa.int64())]),
                ),
            }
        ),
        use_dictionary=False,
        compression="none",
    )

    # 10: logical types (decimals int-backed)
    n = 150
    emit(
        "logical_types",
        pa.table(
            {
                "d": pa.array(
                    [datetime.date(2020, 1, 1) + datetime.timedelta(days=i * 13)
                     for i in range(n)],
                    pa.date32(),
                ),
                "ts_us": pa.array(
                    maybe([EPOCH + datetime.timedelta(seconds=i * 97, microseconds=i)
                           for i in range(n)], 10),
                    pa.timestamp("us"),
                ),
                "ts_ms": pa.array(
                    [EPOCH + datetime.timedelta(seconds=i * 41, milliseconds=i * 3)
                     for i in range(n)],
                    pa.timestamp("ms"),
                ),
                "ts_utc": pa.array(
                    [EPOCH_UTC + datetime.timedelta(seconds=i * 53) for i in range(n)],
                    pa.timestamp("us", tz="UTC"),
                ),
                "dec7": pa.array(
                    maybe([decimal.Decimal(i * 7 - 300).scaleb(-2) for i in range(n)], 9),
                    pa.decimal128(7, 2),
                ),
                "dec15": pa.array(
                    [decimal.Decimal(i * 123457 - 5_000_000).scaleb(-4)
                     for i in range(n)],
                    pa.decimal128(15, 4),
                ),
                "t_us": pa.array(
                    [datetime.time(i % 24, (i * 7) % 60, (i * 13) % 60, i * 11 % 1000000)
                     for i in range(n)],
                    pa.time64("us"),
                ),
                "big": pa.array([f"L{i}" for i in range(n)], pa.large_string()),
            }
        ),
        use_dictionary=False,
        compression="none",
        store_decimal_as_integer=True,
    )

    # 11: map + fixed-size binary (raw surfaces)
    n = 60
    maps = []
    for i in range(n):
        if i % 9 == 7:
            maps.append(None)
        else:
            maps.append([(f"k{j}", i * 10 + j) for j in range(i % 3)])
    emit(
        "exotic_map",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "m": pa.array(maps, pa.map_(pa.string(), pa.int64())),
                "fsb": pa.array(
                    [bytes([i % 256] * 4) for i in range(n)], pa.binary(4)
                ),
            }
        ),
        use_dictionary=False,
        compression="none",
    )

    # 12: wide schema (footer larger than small tail hints)
    n = 40
    emit(
        "wide_2000",
        pa.table(
            {f"c{i:04d}": pa.array([(i * 1000 + r) % 97 for r in range(n)], pa.int32())
             for i in range(2000)}
        ),
        use_dictionary=False,
        compression="none",
        row_group_size=20,
    )

    # 13-15: degenerate shapes
    emit(
        "empty_table",
        pa.table({"a": pa.array([], pa.int64()), "b": pa.array([], pa.string())}),
        use_dictionary=False,
        compression="none",
    )
    emit(
        "single_row",
        pa.table({"a": pa.array([42], pa.int64()),
                  "b": pa.array(["only"], pa.string())}),
        use_dictionary=False,
        compression="none",
    )
    n = 50
    emit(
        "all_null",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "x": pa.array([None] * n, pa.int64()),
                "s": pa.array([None] * n, pa.string()),
            }
        ),
        use_dictionary=False,
        compression="none",
    )

    # 16: no statistics (pruning must keep everything)
    n = 400
    emit(
        "no_stats",
        pa.table({"id": pa.array(range(n), pa.int64()),
                  "v": pa.array([i * 2.5 for i in range(n)], pa.float64())}),
        use_dictionary=False,
        compression="none",
        write_statistics=False,
        row_group_size=100,
    )

    # 17: large multi-group table for pruning soundness sweeps
    n = 10_000
    pool = [f"w{j:03d}" for j in range(50)]
    emit(
        "big_pruning",
        pa.table(
            {
                "id": pa.array(range(n), pa.int64()),
                "v": pa.array(maybe([rng.uniform(-1e6, 1e6) for _ in range(n)], 13),
                              pa.float64()),
                "s": pa.array(hexes(n), pa.string()),
                "cat": pa.array(words(n, pool), pa.string()),
                "neg": pa.array([rng.randint(-5000, 5000) for _ in range(n)],
                                pa.int64()),
            }
        ),
        use_dictionary=True,
        compression="snappy",
        row_group_size=1250,
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--only", choices=["parquet"], default=None)
    ap.parse_args()
    print("parquet fixtures:")
    gen_parquet()


if __name__ == "__main__":
    main()
