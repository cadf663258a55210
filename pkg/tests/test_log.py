from datetime import datetime, timezone

import pytest

from decmine.errors import ConfigError, LogParseError
from decmine.log import (
    CsvMapping,
    dump_json,
    export_xes,
    load_json,
    parse_csv,
    parse_xes,
)


def test_parse_table1_xes(table1_log):
    assert len(table1_log.traces) == 2
    po92 = table1_log.traces[0]
    assert po92.case_id == "PO92"
    assert po92.activities == ("Create Purchase Order", "Request Standard Order")
    e1 = po92.events[0]
    assert e1.attrs["res"] == "Adams"
    assert e1.attrs["total-price"] == 1000
    assert e1.attrs["vendor"] == "Apple"
    assert e1.time == datetime(2022, 10, 5, 9, 0, tzinfo=timezone.utc)
    assert table1_log.schema["total-price"] == "int"
    assert table1_log.schema["time"] == "timestamp"


def test_parse_empty_xes():
    log = parse_xes(b'<?xml version="1.0"?><log/>')
    assert len(log.traces) == 0
    assert dict(log.schema) == {}


def test_parse_xes_malformed_reports_position():
    with pytest.raises(LogParseError) as err:
        parse_xes(b"<log><trace></log>")
    assert "line" in str(err.value)


def test_parse_xes_drops_trace_missing_timestamp(table1_xes):
    broken = table1_xes.replace(
        b'<date key="time:timestamp" value="2022-10-07T13:00:00.000Z"/>', b""
    )
    log = parse_xes(broken)
    assert len(log.traces) == 1  # PO93 dropped
    assert log.traces[0].case_id == "PO92"
    assert len(log.warnings) == 1
    assert "PO93" in log.warnings[0]


def test_xes_roundtrip(table1_log):
    again = parse_xes(export_xes(table1_log))
    assert again == table1_log


def test_json_roundtrip(table1_log):
    data = dump_json(table1_log)
    again = load_json(data)
    assert again == table1_log
    assert dump_json(again) == data


TABLE1_CSV = (
    "case id,activity,timestamp,resource,total-price,vendor\n"
    "PO92,Create Purchase Order,09:00 05.Oct.2022,Adams,1000,Apple\n"
    "PO92,Request Standard Order,11:00 07.Oct.2022,Pedro,1000,Apple\n"
    "PO93,Create Purchase Order,13:00 07.Oct.2022,Peter,1500,Samsung\n"
)

MAPPING = CsvMapping("case id", "activity", "timestamp", "%H:%M %d.%b.%Y", "resource")


def test_parse_table1_csv():
    log = parse_csv(TABLE1_CSV, MAPPING)
    assert log.event_count == 3
    po92 = next(tr for tr in log.traces if tr.case_id == "PO92")
    assert len(po92.events) == 2
    assert po92.events[0].attrs["total-price"] == 1000
    assert log.schema["total-price"] == "int"


def test_parse_csv_single_row():
    log = parse_csv(
        "case id,activity,timestamp\nC1,Start,10:00 01.Jan.2024\n",
        CsvMapping("case id", "activity", "timestamp", "%H:%M %d.%b.%Y"),
    )
    assert len(log.traces) == 1
    assert len(log.traces[0].events) == 1


def test_parse_csv_bad_timestamp_skips_row():
    bad = TABLE1_CSV + "PO94,Create Purchase Order,n/a,Sam,700,Lenovo\n"
    log = parse_csv(bad, MAPPING)
    assert log.event_count == 3
    assert len(log.warnings) == 1
    assert "n/a" in log.warnings[0]


def test_parse_csv_missing_mapped_column():
    with pytest.raises(ConfigError) as err:
        parse_csv(TABLE1_CSV, CsvMapping("case", "activity", "timestamp", "%H:%M"))
    assert "case" in str(err.value)


def test_traces_sorted_by_time():
    csv_text = (
        "case,act,ts\n"
        "C1,Second,11:00 01.Jan.2024\n"
        "C1,First,10:00 01.Jan.2024\n"
    )
    log = parse_csv(csv_text, CsvMapping("case", "act", "ts", "%H:%M %d.%b.%Y"))
    assert log.traces[0].activities == ("First", "Second")


def test_timestamp_tie_keeps_file_order():
    csv_text = (
        "case,act,ts\n"
        "C1,A,10:00 01.Jan.2024\n"
        "C1,B,10:00 01.Jan.2024\n"
    )
    log = parse_csv(csv_text, CsvMapping("case", "act", "ts", "%H:%M %d.%b.%Y"))
    assert log.traces[0].activities == ("A", "B")
