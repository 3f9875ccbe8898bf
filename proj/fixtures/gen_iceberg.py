#!/usr/bin/env python3
"""Iceberg v2 fixture tables with bookkeeping oracles.

Each table directory holds metadata/ (metadata JSON, Avro manifest list and
manifest files) and data/ (Parquet data and delete files), plus an oracle.json
recording the expected scan plan and surviving rows for every snapshot. Paths
inside the table files use the rill://warehouse/<name> base so the tree can
live anywhere on disk; readers rebase them against the metadata file's parent
directory.

The oracle rows are computed here, in Python, by replaying the snapshot
history against the delete-application rules (position deletes match by
(file_path, pos) at sequence >= the data file's; equality deletes match
null-safely at sequence strictly greater), independently of the C++ reader.

Avro object-container files are written by hand with the stdlib: header
(magic, metadata map, 16-byte sync marker) then blocks of zigzag-varint
encoded datums, raw-deflate compressed when the codec says so.
"""

import json
import pathlib
import struct
import zlib

import pyarrow as pa
import pyarrow.parquet as pq

ROOT = pathlib.Path(__file__).resolve().parent
ICE_DIR = ROOT / "iceberg"

POS_DELETE_PATH_FIELD_ID = 2147483546  # reserved id of file_path in pos deletes
SYNC = b"\x5ar!\x11" * 4


# --- avro encoding ---


def zigzag(n):
    return (n << 1) ^ (n >> 63)


def uvarint(n):
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def enc_long(n):
    return uvarint(zigzag(n))


def enc_bytes(b):
    return enc_long(len(b)) + b


def enc_str(s):
    return enc_bytes(s.encode())


def enc_datum(schema, v):
    if isinstance(schema, list):  # union: branch index then branch datum
        for i, branch in enumerate(schema):
            if (v is None) == (branch == "null"):
                head = enc_long(i)
                return head if v is None else head + enc_datum(branch, v)
        raise ValueError(f"no union branch for {v!r}")
    if isinstance(schema, str):
        if schema == "null":
            return b""
        if schema == "boolean":
            return b"\x01" if v else b"\x00"
        if schema in ("int", "long"):
            return enc_long(v)
        if schema == "float":
            return struct.pack("<f", v)
        if schema == "double":
            return struct.pack("<d", v)
        if schema == "string":
            return enc_str(v)
        if schema == "bytes":
            return enc_bytes(v)
        raise ValueError(schema)
    t = schema["type"]
    if t == "record":
        return b"".join(enc_datum(f["type"], v[f["name"]]) for f in schema["fields"])
    if t == "array":
        out = b""
        if v:
            out += enc_long(len(v))
            out += b"".join(enc_datum(schema["items"], x) for x in v)
        return out + enc_long(0)
    if t == "map":
        out = b""
        if v:
            out += enc_long(len(v))
            out += b"".join(enc_str(k) + enc_datum(schema["values"], x) for k, x in v.items())
        return out + enc_long(0)
    if t == "fixed":
        return v
    raise ValueError(t)


def write_avro(path, schema, records, metadata=None, codec="deflate", block_records=None):
    meta = {"avro.schema": json.dumps(schema), "avro.codec": codec}
    if metadata:
        meta.update(metadata)
    buf = bytearray(b"Obj\x01")
    buf += enc_long(len(meta))
    for k, val in meta.items():
        buf += enc_str(k) + enc_bytes(val.encode() if isinstance(val, str) else val)
    buf += enc_long(0)
    buf += SYNC
    step = block_records or max(len(records), 1)
    for i in range(0, len(records), step):
        chunk = records[i : i + step]
        body = b"".join(enc_datum(schema, r) for r in chunk)
        if codec == "deflate":
            c = zlib.compressobj(9, zlib.DEFLATED, -15)
            body = c.compress(body) + c.flush()
        buf += enc_long(len(chunk)) + enc_bytes(body) + SYNC
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(bytes(buf))


# --- manifest schemas ---

MANIFEST_LIST_SCHEMA = {
    "type": "record",
    "name": "manifest_file",
    "fields": [
        {"name": "manifest_path", "type": "string"},
        {"name": "manifest_length", "type": "long"},
        {"name": "partition_spec_id", "type": "int"},
        {"name": "content", "type": "int"},
        {"name": "sequence_number", "type": "long"},
        {"name": "min_sequence_number", "type": "long"},
        {"name": "added_snapshot_id", "type": "long"},
    ],
}

def bounds_schema(pair_name):
    return {
        "type": "array",
        "items": {
            "type": "record",
            "name": pair_name,
            "fields": [
                {"name": "key", "type": "int"},
                {"name": "value", "type": "bytes"},
            ],
        },
    }


def entry_schema(partition_fields):
    return {
        "type": "record",
        "name": "manifest_entry",
        "fields": [
            {"name": "status", "type": "int"},
            {"name": "snapshot_id", "type": ["null", "long"], "default": None},
            {"name": "sequence_number", "type": ["null", "long"], "default": None},
            {"name": "file_sequence_number", "type": ["null", "long"], "default": None},
            {
                "name": "data_file",
                "type": {
                    "type": "record",
                    "name": "r2",
                    "fields": [
                        {"name": "content", "type": "int"},
                        {"name": "file_path", "type": "string"},
                        {"name": "file_format", "type": "string"},
                        {
                            "name": "partition",
                            "type": {"type": "record", "name": "r102", "fields": partition_fields},
                        },
                        {"name": "record_count", "type": "long"},
                        {"name": "file_size_in_bytes", "type": "long"},
                        {"name": "equality_ids", "type": ["null", {"type": "array", "items": "int"}], "default": None},
                        {"name": "lower_bounds", "type": ["null", bounds_schema("k126_v127")], "default": None},
                        {"name": "upper_bounds", "type": ["null", bounds_schema("k128_v129")], "default": None},
                    ],
                },
            },
        ],
    }


ARROW_TYPES = {
    "long": pa.int64(),
    "int": pa.int32(),
    "string": pa.string(),
    "double": pa.float64(),
    "boolean": pa.bool_(),
}

CONTENT_CODE = {"data": 0, "pos": 1, "eq": 2}


class table_builder:
    """Builds one fixture table commit by commit, tracking the oracle state."""

    def __init__(self, name, fields, partition_spec=None):
        # fields: list of (field_id, name, required, iceberg_type)
        # partition_spec: list of (source column name, partition field name, transform)
        self.name = name
        self.dir = ICE_DIR / name
        self.location = f"rill://warehouse/{name}"
        self.fields = fields
        self.partition_spec = partition_spec or []
        self.seq = 0
        self.next_sid = 1001
        self.manifest_n = 0
        self.live = []  # manifest descriptors carried snapshot to snapshot
        self.snapshots = []  # metadata JSON snapshot entries
        self.oracle_snaps = []

    # -- file writers --

    def _field_type(self, column):
        for _, name, _, t in self.fields:
            if name == column:
                return t
        raise KeyError(column)

    def data_file(self, fname, rows, partition=None):
        cols = {
            name: pa.array([r.get(name) for r in rows], ARROW_TYPES[t])
            for _, name, _, t in self.fields
        }
        path = self.dir / "data" / fname
        path.parent.mkdir(parents=True, exist_ok=True)
        pq.write_table(pa.table(cols), path)
        return {
            "kind": "data",
            "logical": f"{self.location}/data/{fname}",
            "rows": rows,
            "partition": partition or {},
            "record_count": len(rows),
            "size": path.stat().st_size,
        }

    def pos_delete_file(self, fname, pairs, referenced=None):
        # pairs: list of (data file logical path, position)
        table = pa.table(
            {
                "file_path": pa.array([p for p, _ in pairs], pa.string()),
                "pos": pa.array([i for _, i in pairs], pa.int64()),
            }
        )
        path = self.dir / "data" / fname
        path.parent.mkdir(parents=True, exist_ok=True)
        pq.write_table(table, path)
        d = {
            "kind": "pos",
            "logical": f"{self.location}/data/{fname}",
            "pairs": pairs,
            "record_count": len(pairs),
            "size": path.stat().st_size,
        }
        if referenced:
            d["referenced"] = referenced
            d["bounds"] = [{"key": POS_DELETE_PATH_FIELD_ID, "value": referenced.encode()}]
        return d

    def eq_delete_file(self, fname, columns, tuples, ids):
        arrays = {
            c: pa.array([t[i] for t in tuples], ARROW_TYPES[self._field_type(c)])
            for i, c in enumerate(columns)
        }
        path = self.dir / "data" / fname
        path.parent.mkdir(parents=True, exist_ok=True)
        pq.write_table(pa.table(arrays), path)
        return {
            "kind": "eq",
            "logical": f"{self.location}/data/{fname}",
            "columns": columns,
            "tuples": tuples,
            "ids": ids,
            "record_count": len(tuples),
            "size": path.stat().st_size,
        }

    # -- commits --

    def _partition_avro_fields(self):
        out = []
        for source, pname, _ in self.partition_spec:
            t = self._field_type(source)
            avro = {"long": "long", "int": "int", "string": "string", "double": "double", "boolean": "boolean"}[t]
            out.append({"name": pname, "type": ["null", avro], "default": None})
        return out

    def _entry_datum(self, e):
        f = e["file"]
        partition = {
            pf["name"]: f.get("partition", {}).get(pf["name"])
            for pf in self._partition_avro_fields()
        }
        return {
            "status": e["status"],
            "snapshot_id": e.get("snapshot_id"),
            "sequence_number": e["seq"],
            "file_sequence_number": e["seq"],
            "data_file": {
                "content": CONTENT_CODE[f["kind"]],
                "file_path": f["logical"],
                "file_format": "PARQUET",
                "partition": partition,
                "record_count": f["record_count"],
                "file_size_in_bytes": f["size"],
                "equality_ids": f.get("ids"),
                "lower_bounds": f.get("bounds"),
                "upper_bounds": f.get("bounds"),
            },
        }

    def _write_manifest(self, entries, content, seq, sid):
        self.manifest_n += 1
        fname = f"m{self.manifest_n}.avro"
        path = self.dir / "metadata" / fname
        schema = entry_schema(self._partition_avro_fields())
        iceberg_schema = {
            "type": "struct",
            "schema-id": 0,
            "fields": [
                {"id": fid, "name": n, "required": req, "type": t}
                for fid, n, req, t in self.fields
            ],
        }
        write_avro(
            path,
            schema,
            [self._entry_datum(e) for e in entries],
            metadata={
                "schema": json.dumps(iceberg_schema),
                "content": "data" if content == 0 else "deletes",
            },
            codec="null" if content == 0 else "deflate",
            block_records=2 if len(entries) > 2 else None,
        )
        min_seq = min((e["seq"] if e["seq"] is not None else seq) for e in entries)
        return {
            "logical": f"{self.location}/metadata/{fname}",
            "length": path.stat().st_size,
            "content": content,
            "sequence_number": seq,
            "min_seq": min_seq,
            "added_snapshot_id": sid,
            "entries": entries,
        }

    def commit(self, added=(), removed=(), inherit=False):
        self.seq += 1
        seq = self.seq
        sid = self.next_sid
        self.next_sid += 1

        if removed:
            removed = set(removed)
            rewritten = []
            for m in self.live:
                hit = any(e["file"]["logical"] in removed and e["status"] != 2 for e in m["entries"])
                if not hit:
                    rewritten.append(m)
                    continue
                entries = []
                for e in m["entries"]:
                    if e["status"] == 2:
                        continue  # old tombstones age out of the rewrite
                    eseq = e["seq"] if e["seq"] is not None else m["sequence_number"]
                    gone = e["file"]["logical"] in removed
                    entries.append(
                        {
                            "status": 2 if gone else 0,
                            "seq": eseq,
                            "snapshot_id": sid if gone else e.get("snapshot_id"),
                            "file": e["file"],
                        }
                    )
                rewritten.append(self._write_manifest(entries, m["content"], seq, sid))
            self.live = rewritten

        data_entries, delete_entries = [], []
        for f in added:
            e = {
                "status": 1,
                "seq": None if inherit else seq,
                "snapshot_id": sid,
                "file": f,
            }
            (data_entries if f["kind"] == "data" else delete_entries).append(e)
        if data_entries:
            self.live.append(self._write_manifest(data_entries, 0, seq, sid))
        if delete_entries:
            self.live.append(self._write_manifest(delete_entries, 1, seq, sid))

        list_name = f"snap-{sid}.avro"
        write_avro(
            self.dir / "metadata" / list_name,
            MANIFEST_LIST_SCHEMA,
            [
                {
                    "manifest_path": m["logical"],
                    "manifest_length": m["length"],
                    "partition_spec_id": 0,
                    "content": m["content"],
                    "sequence_number": m["sequence_number"],
                    "min_sequence_number": m["min_seq"],
                    "added_snapshot_id": m["added_snapshot_id"],
                }
                for m in self.live
            ],
            codec="deflate",
        )
        self.snapshots.append(
            {
                "snapshot-id": sid,
                "sequence-number": seq,
                "timestamp-ms": 1700000000000 + sid,
                "manifest-list": f"{self.location}/metadata/{list_name}",
                "schema-id": 0,
                "summary": {"operation": "append"},
            }
        )
        self.oracle_snaps.append(self._oracle_snapshot(sid, seq))
        return sid

    # -- oracle --

    def _plan(self):
        datas, dels = [], []
        for m in self.live:
            for e in m["entries"]:
                if e["status"] == 2:
                    continue
                f = dict(e["file"])
                f["seq"] = e["seq"] if e["seq"] is not None else m["sequence_number"]
                (datas if f["kind"] == "data" else dels).append(f)
        dels.sort(key=lambda d: (d["seq"], d["logical"]))
        plan = []
        for f in datas:
            applicable = []
            for d in dels:
                if d.get("referenced") and d["referenced"] != f["logical"]:
                    continue
                ok = d["seq"] >= f["seq"] if d["kind"] == "pos" else d["seq"] > f["seq"]
                if ok:
                    applicable.append(d)
            plan.append((f, applicable))
        return plan

    def _surviving(self, plan):
        names = [n for _, n, _, _ in self.fields]
        out = []
        for f, dels in plan:
            drop = set()
            eq_sets = []
            for d in dels:
                if d["kind"] == "pos":
                    drop |= {p for path, p in d["pairs"] if path == f["logical"]}
                else:
                    eq_sets.append(d)
            for i, row in enumerate(f["rows"]):
                if i in drop:
                    continue
                # None == None: Python equality is already null-safe
                if any(
                    all(row.get(c) == tv for c, tv in zip(d["columns"], t))
                    for d in eq_sets
                    for t in d["tuples"]
                ):
                    continue
                out.append([row.get(n) for n in names])
        return out

    def _oracle_snapshot(self, sid, seq):
        plan = self._plan()
        return {
            "snapshot_id": sid,
            "sequence_number": seq,
            "manifests": len(self.live),
            "plan": [
                {
                    "file": f["logical"],
                    "partition": {k: f.get("partition", {}).get(k) for _, k, _ in self.partition_spec},
                    "deletes": [d["logical"] for d in dels],
                }
                for f, dels in plan
            ],
            "rows": self._surviving(plan),
        }

    # -- metadata + oracle emission --

    def finish(self, current="latest", format_version=2, oracle_extra=None):
        meta = {
            "format-version": format_version,
            "table-uuid": f"0000c0de-0000-4000-8000-{abs(hash(self.name)) % 10**12:012d}",
            "location": self.location,
            "last-sequence-number": self.seq,
            "last-updated-ms": 1700000000000,
            "last-column-id": max(fid for fid, _, _, _ in self.fields),
            "current-schema-id": 0,
            "schemas": [
                {
                    "type": "struct",
                    "schema-id": 0,
                    "fields": [
                        {"id": fid, "name": n, "required": req, "type": t}
                        for fid, n, req, t in self.fields
                    ],
                }
            ],
            "default-spec-id": 0,
            "partition-specs": [
                {
                    "spec-id": 0,
                    "fields": [
                        {
                            "name": pname,
                            "transform": transform,
                            "source-id": next(fid for fid, n, _, _ in self.fields if n == source),
                            "field-id": 1000 + i,
                        }
                        for i, (source, pname, transform) in enumerate(self.partition_spec)
                    ],
                }
            ],
            "properties": {},
            "snapshots": self.snapshots,
            "snapshot-log": [],
            "metadata-log": [],
        }
        if current == "latest":
            if self.snapshots:
                meta["current-snapshot-id"] = self.snapshots[-1]["snapshot-id"]
        elif current is not None:
            meta["current-snapshot-id"] = current
        mpath = self.dir / "metadata" / "v1.metadata.json"
        mpath.parent.mkdir(parents=True, exist_ok=True)
        mpath.write_text(json.dumps(meta, indent=2) + "\n")

        oracle = {
            "metadata": "metadata/v1.metadata.json",
            "columns": [n for _, n, _, _ in self.fields],
            "current_snapshot_id": meta.get("current-snapshot-id"),
            "snapshots": self.oracle_snaps,
        }
        if oracle_extra:
            oracle.update(oracle_extra)
        (self.dir / "oracle.json").write_text(json.dumps(oracle, indent=2) + "\n")
        print(f"  iceberg/{self.name}: {len(self.snapshots)} snapshot(s)")


# --- fixture tables ---


def t_plain():
    b = table_builder(
        "plain",
        [(1, "id", True, "long"), (2, "name", False, "string"), (3, "score", False, "double")],
    )
    a = b.data_file("a.parquet", [{"id": i, "name": f"r{i}", "score": i + 0.5} for i in range(6)])
    c = b.data_file(
        "b.parquet",
        [
            {"id": 100 + i, "name": None if i == 2 else f"s{i}", "score": None if i == 1 else i * 2.25}
            for i in range(5)
        ],
    )
    b.commit(added=[a, c])
    b.finish()


def t_posdel():
    b = table_builder("posdel", [(1, "id", True, "long"), (2, "name", False, "string")])
    a = b.data_file("a.parquet", [{"id": i, "name": f"a{i}"} for i in range(6)])
    c = b.data_file("b.parquet", [{"id": 100 + i, "name": f"b{i}"} for i in range(5)])
    b.commit(added=[a, c])
    d = b.pos_delete_file(
        "del-a.parquet",
        [(a["logical"], 0), (a["logical"], 3)],
        referenced=a["logical"],
    )
    b.commit(added=[d], inherit=True)  # entry seq left null, inherited from the list
    b.finish()


def t_eqdel():
    b = table_builder("eqdel", [(1, "id", True, "long"), (2, "cat", False, "string")])
    f1 = b.data_file(
        "f1.parquet",
        [{"id": i, "cat": c} for i, c in enumerate(["a", "b", None, "c", "a"])],
    )
    f2 = b.data_file("f2.parquet", [{"id": 10, "cat": "b"}, {"id": 11, "cat": None}])
    b.commit(added=[f1, f2])
    d = b.eq_delete_file("del-eq.parquet", ["cat"], [("a",), (None,)], ids=[2])
    b.commit(added=[d])
    b.finish()


def t_mixed():
    b = table_builder(
        "mixed",
        [(1, "id", True, "long"), (2, "cat", False, "string"), (3, "qty", False, "long")],
    )
    f1 = b.data_file(
        "f1.parquet",
        [{"id": i, "cat": c, "qty": q} for i, (c, q) in enumerate([("a", 1), ("b", None), ("a", 2), ("c", 1), ("b", 5)])],
    )
    f2 = b.data_file(
        "f2.parquet",
        [{"id": 10 + i, "cat": c, "qty": q} for i, (c, q) in enumerate([("a", 1), ("c", None), ("b", None), ("a", 9)])],
    )
    b.commit(added=[f1, f2])
    pos = b.pos_delete_file(
        "del-pos.parquet",
        [(f1["logical"], 1), (f2["logical"], 0), (f"{b.location}/data/ghost.parquet", 0)],
    )
    b.commit(added=[pos])
    f3 = b.data_file("f3.parquet", [{"id": 20, "cat": "a", "qty": 1}, {"id": 21, "cat": "b", "qty": None}])
    eq = b.eq_delete_file("del-eq.parquet", ["cat", "qty"], [("a", 1), ("b", None)], ids=[2, 3])
    b.commit(added=[f3, eq])
    b.finish()


def t_monotone():
    b = table_builder("monotone", [(1, "id", True, "long"), (2, "cat", False, "string")])
    f = b.data_file(
        "f.parquet",
        [{"id": i, "cat": ["a", "b", "c", "d"][i % 4]} for i in range(8)],
    )
    b.commit(added=[f])
    b.commit(added=[b.pos_delete_file("d1.parquet", [(f["logical"], 0), (f["logical"], 5)])])
    b.commit(added=[b.eq_delete_file("d2.parquet", ["cat"], [("c",)], ids=[2])])
    # overlaps rows the equality delete already removed: count must hold steady
    b.commit(added=[b.pos_delete_file("d3.parquet", [(f["logical"], 2), (f["logical"], 6)])])
    b.finish()


def t_seq_equal():
    b = table_builder("seq_equal", [(1, "id", True, "long"), (2, "cat", False, "string")])
    f = b.data_file("f.parquet", [{"id": i, "cat": ["a", "b", "c", "d"][i]} for i in range(4)])
    pos = b.pos_delete_file("dp.parquet", [(f["logical"], 0)])
    eq = b.eq_delete_file("de.parquet", ["cat"], [("c",)], ids=[2])
    # one merge-style commit: data and deletes share a sequence number, so the
    # position delete applies to the new file and the equality delete does not
    b.commit(added=[f, pos, eq])
    b.finish()


def t_partitioned():
    b = table_builder(
        "partitioned",
        [(1, "id", True, "long"), (2, "cat", False, "string")],
        partition_spec=[("cat", "cat", "identity")],
    )
    files = []
    for part, ids in [("a", (0, 1)), ("b", (2, 3)), (None, (4,))]:
        name = f"p-{part or 'null'}.parquet"
        files.append(
            b.data_file(
                name,
                [{"id": i, "cat": part} for i in ids],
                partition={"cat": part},
            )
        )
    b.commit(added=files)
    b.finish()


def t_removed():
    b = table_builder("removed", [(1, "id", True, "long"), (2, "name", False, "string")])
    a = b.data_file("a.parquet", [{"id": i, "name": f"a{i}"} for i in range(3)])
    c = b.data_file("b.parquet", [{"id": 10 + i, "name": f"b{i}"} for i in range(3)])
    b.commit(added=[a, c])
    b.commit(removed=[c["logical"]])
    b.finish()


def t_v1():
    b = table_builder("v1", [(1, "id", True, "long")])
    f = b.data_file("a.parquet", [{"id": 1}])
    b.commit(added=[f])
    b.finish(format_version=1, oracle_extra={"error": "UnsupportedFormatVersion"})


def t_no_current():
    b = table_builder("no_current", [(1, "id", True, "long")])
    b.finish(
        current=None,
        oracle_extra={
            "error_on_current": "NoCurrentSnapshot",
            "error_on_unknown_id": "UnknownSnapshotId",
        },
    )


def gen_iceberg():
    for fn in (
        t_plain,
        t_posdel,
        t_eqdel,
        t_mixed,
        t_monotone,
        t_seq_equal,
        t_partitioned,
        t_removed,
        t_v1,
        t_no_current,
    ):
        fn()


if __name__ == "__main__":
    gen_iceberg()
