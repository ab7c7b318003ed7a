"""
Stdout formats: JSON (default), dense CSV and edge lists for tables, CSV rows for
grid and benchmark records.
"""
import io
import csv
import json

from model.json_mixin import JSONOutputMixin
from report.for_human import relabel


def to_data(obj):
    return JSONOutputMixin.map_anything(obj, JSONOutputMixin.prepare_for_json)


def dump_json(obj, pretty=False):
    data = to_data(obj)
    if pretty:
        return json.dumps(relabel(data), indent=2, ensure_ascii=False)
    return json.dumps(data)


def _rows_to_csv(rows, header=None):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    if header:
        writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def dense_csv(table):
    """Dense table in input row and column order, one CSV line per row."""
    return _rows_to_csv(table.in_input_order().tolist())


def edges_csv(table):
    """`row,col,count` per nonzero entry, 0-based input positions."""
    return _rows_to_csv(table.edges(input_order=True))


def records_csv(records, columns):
    rows = []
    for record in records:
        data = to_data(record)
        rows.append([data.get(col) for col in columns])
    return _rows_to_csv(rows, header=columns)


def parse_edges(text):
    """Inverse of edges_csv: list of (row, col, count)."""
    rows = []
    for line in csv.reader(io.StringIO(text)):
        if not line or line[0].startswith('#'):
            continue
        rows.append(tuple(int(x) for x in line))
    return rows
