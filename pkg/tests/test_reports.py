import json

from rmatrix_cm import reports


def test_make_report_tolerance():
    r = reports.make_report("bb(d=2)", "aybe", 3, 1e-12, 0, 1e-8)
    assert r["passed"] and r["tolerance"] == 1e-8
    assert "passed" not in reports.make_report("bb(d=2)", "aybe", 3, 1.0, 0)


def test_dumps_is_canonical():
    a = reports.dumps({"b": 1j, "a": [0.1]})
    assert a == reports.dumps({"a": [0.1], "b": 1j})
    assert json.loads(a)["b"] == [0.0, 1.0]


def test_parallel_map_is_order_preserving(monkeypatch):
    monkeypatch.setenv("RMX_THREADS", "3")
    assert reports.worker_count() == 3
    assert reports.parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
    monkeypatch.setenv("RMX_THREADS", "1")
    assert reports.parallel_map(lambda x: -x, [1, 2]) == [-1, -2]


def test_write_atomic(tmp_path):
    p = tmp_path / "r.json"
    reports.write_atomic(str(p), "{}")
    assert p.read_text() == "{}" and not (tmp_path / "r.json.tmp").exists()
