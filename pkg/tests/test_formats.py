from pathlib import Path

import pytest

from tadroute.formats import (
    FormatError,
    load_network,
    parse_gtfs,
    parse_mapping,
    parse_transfer_graph,
    save_network,
    write_gtfs,
    write_transfer_graph,
)
from tadroute.model import assemble_network
from tadroute.netgen import GenParams, generate


def write(d: Path, name: str, text: str) -> Path:
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text.lstrip(), encoding="utf-8")
    return d / name


@pytest.fixture
def gtfs(tmp_path):
    d = tmp_path / "feed"
    write(d, "stops.txt", """
stop_id,stop_name,stop_lat,stop_lon
S1,One,47.1,8.5
S2,Two,47.2,8.6
""")
    write(d, "trips.txt", """
route_id,service_id,trip_id
R1,WK,T1
""")
    write(d, "stop_times.txt", """
trip_id,arrival_time,departure_time,stop_id,stop_sequence
T1,24:50:00,24:55:00,S1,1
T1,25:10:00,25:10:00,S2,2
""")
    return d


def test_parse_gtfs_defaults(gtfs):
    tt = parse_gtfs(gtfs)
    assert tt.stop_ids == ("S1", "S2")
    assert tt.buffers == (0, 0)
    (trip,) = tt.trips
    assert trip.events[1].arr == 90600


def test_transfers_become_buffers(gtfs):
    write(gtfs, "transfers.txt", """
from_stop_id,to_stop_id,transfer_type,min_transfer_time
S1,S1,2,600
S1,S2,2,120
""")
    assert parse_gtfs(gtfs).buffers == (600, 0)


def test_stop_times_out_of_order_rows_are_sorted(gtfs):
    write(gtfs, "stop_times.txt", """
trip_id,arrival_time,departure_time,stop_id,stop_sequence
T1,08:10:00,08:10:00,S2,7
T1,08:00:00,08:00:00,S1,3
""")
    (trip,) = parse_gtfs(gtfs).trips
    assert [e.stop for e in trip.events] == [0, 1]


@pytest.mark.parametrize(
    "row, needle",
    [
        ("T1,8:0x:00,08:10:00,S2,3", "malformed time"),
        ("T9,08:10:00,08:10:00,S2,3", "unknown trip_id"),
        ("T1,08:10:00,08:10:00,S9,3", "unknown stop_id"),
        ("T1,08:10:00,08:10:00,S2,1", "repeats stop_sequence"),
    ],
)
def test_stop_times_errors_name_the_row(gtfs, row, needle):
    write(gtfs, "stop_times.txt", "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
          "T1,08:00:00,08:00:00,S1,1\n" + row + "\n")
    with pytest.raises(FormatError, match=needle) as info:
        parse_gtfs(gtfs)
    assert info.value.line == 3
    assert "stop_times.txt:3" in str(info.value)


def test_missing_required_file(tmp_path):
    write(tmp_path, "stops.txt", "stop_id\nA\n")
    with pytest.raises(FormatError, match="trips.txt"):
        parse_gtfs(tmp_path)


def test_transfer_graph_examples(tmp_path):
    g = parse_transfer_graph(write(tmp_path, "g.txt", "p 2 1\n0 1 300\n"))
    assert g.vertex_count == 2 and list(g.edges()) == [(0, 1, 300)]
    g = parse_transfer_graph(write(tmp_path, "h.txt", "p 3 0\n"))
    assert g.vertex_count == 3 and g.edge_count == 0


@pytest.mark.parametrize(
    "text, needle",
    [
        ("p 2 1\n0 1 -5\n", "negative weight"),
        ("p 2 1\n0 2 5\n", "out of range"),
        ("p 2 2\n0 1 5\n", "declares 2 edges"),
        ("0 1 5\n", "expected header"),
    ],
)
def test_transfer_graph_errors(tmp_path, text, needle):
    with pytest.raises(FormatError, match=needle):
        parse_transfer_graph(write(tmp_path, "g.txt", text))


def test_mapping(tmp_path):
    m = parse_mapping(write(tmp_path, "m.csv", "stop_id,vertex\nA,4\nB,0\n"))
    assert m == {"A": 4, "B": 0}


@pytest.mark.parametrize("seed", range(5))
def test_gtfs_round_trip(tmp_path, seed):
    net = generate(GenParams(seed=seed))
    write_gtfs(net, tmp_path / "gtfs")
    write_transfer_graph(net.graph, tmp_path / "g.txt")
    again = assemble_network(parse_gtfs(tmp_path / "gtfs"), parse_transfer_graph(tmp_path / "g.txt"))
    assert again == net


def test_network_json_round_trip(tmp_path):
    net = generate(GenParams(seed=11))
    save_network(net, tmp_path / "n.json", footpath_closure=False)
    back, header = load_network(tmp_path / "n.json")
    assert back == net
    assert header["format"] == "tadroute-network" and header["footpath_closure"] is False


def test_network_json_rejects_foreign(tmp_path):
    write(tmp_path, "x.json", '{"format": "other"}')
    with pytest.raises(FormatError, match="not a"):
        load_network(tmp_path / "x.json")
    write(tmp_path, "y.json", "{broken")
    with pytest.raises(FormatError, match="y.json:1"):
        load_network(tmp_path / "y.json")
