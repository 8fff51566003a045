import json

import numpy as np
import pytest

import sparseops as sp
from sparseops.bench import CSV_COLUMNS, BenchRecord, compare_reports, load_report
from sparseops.errors import InvalidArgumentError, UndefinedBaselineError

REF = sp.create_device("reference")


def fake_timer(durations):
    """Stub timer: each rep sees t0 = 0 and t1 = duration, exactly."""
    vals = []
    for d in durations:
        vals.extend((0.0, d))
    it = iter(vals)
    return lambda: next(it)


@pytest.fixture
def diag1000(tmp_path):
    m = sp.coo_from_triplets(REF, 1000, 1000, [(i, i, 1.0 + i) for i in range(1000)])
    path = tmp_path / "diag1000.mtx"
    sp.write_matrix_market(m, path)
    return path


@pytest.fixture
def small_spd(tmp_path):
    dense = np.array([[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]])
    path = tmp_path / "spd3.mtx"
    sp.write_matrix_market(sp.csr_from_dense(REF, dense), path)
    return path


class TestBenchSpmv:
    def test_gflops_formula(self, diag1000):
        rec = sp.bench_spmv(diag1000, device=REF, warmups=0, reps=1,
                            timer=fake_timer([1e-3]))
        assert rec.nnz == 1000
        assert rec.time_s == 1e-3
        assert rec.gflops == 2.0 * 1000 / 1e-3 / 1e9
        assert rec.gflops * rec.time_s * 1e9 == pytest.approx(2.0 * rec.nnz, rel=1e-15)

    def test_median_of_reps(self, diag1000):
        rec = sp.bench_spmv(diag1000, device=REF, warmups=0, reps=5,
                            timer=fake_timer([1e-3, 2e-3, 3e-3, 2e-3, 1e-3]))
        assert rec.time_s == 2e-3

    def test_warmups_excluded_from_timing(self, diag1000):
        # 2 warmups get no timer calls; only the 3 reps are timed
        rec = sp.bench_spmv(diag1000, device=REF, warmups=2, reps=3,
                            timer=fake_timer([5e-4, 5e-4, 5e-4]))
        assert rec.time_s == 5e-4

    def test_apply_called_warmups_plus_reps_times(self, diag1000, monkeypatch):
        calls = []
        original = sp.CsrMatrix.apply

        def counting(self, b, x):
            calls.append(1)
            return original(self, b, x)

        monkeypatch.setattr(sp.CsrMatrix, "apply", counting)
        sp.bench_spmv(diag1000, device=REF, warmups=2, reps=3)
        assert len(calls) == 5

    def test_seed_reproducible(self, diag1000):
        r1 = sp.bench_spmv(diag1000, device=REF, warmups=0, reps=1, seed=42)
        r2 = sp.bench_spmv(diag1000, device=REF, warmups=0, reps=1, seed=42)
        assert r1.notes == r2.notes == "seed=42"

    def test_record_fields(self, diag1000):
        rec = sp.bench_spmv(diag1000, format="coo", device=REF, warmups=1, reps=2)
        assert rec.matrix == "diag1000"
        assert rec.format == "coo"
        assert rec.kernel == "spmv"
        assert rec.device == "reference" and rec.threads == 1
        assert rec.precision == "single"
        assert rec.ok and rec.time_s > 0

    def test_timed_region_performs_no_array_allocation(self, diag1000, monkeypatch):
        a = sp.read_matrix_market(REF, diag1000, sp.Precision.double, "Csr")
        b = sp.dense_create(REF, 1000, 1, sp.Precision.double, 1.0)
        x = sp.dense_create(REF, 1000, 1, sp.Precision.double, 0.0)
        hits = []
        for name in ("empty", "zeros", "ones", "full", "empty_like", "zeros_like"):
            original = getattr(np, name)
            monkeypatch.setattr(np, name,
                                lambda *a_, _o=original, **k: (hits.append(1), _o(*a_, **k))[1])
        a.apply(b, x)  # the exact call the timed region contains
        assert hits == []


class TestBenchSolver:
    def test_fixed_iterations(self, small_spd):
        rec = sp.bench_solver(small_spd, solver="cg", device=REF, fixed_iters=10)
        assert rec.kernel == "cg"
        assert rec.ok
        assert "iters=10" in rec.notes and "time_per_iter=" in rec.notes
        assert rec.gflops * rec.time_s * 1e9 == pytest.approx(2.0 * rec.nnz * 10, rel=1e-15)

    def test_config_criteria_replaced(self, small_spd):
        tree = {"type": "solver::Gmres", "krylov_dim": 5,
                "criteria": [{"type": "Iteration", "max_iters": 99999},
                             {"type": "ResidualNorm", "reduction_factor": 1e-6}]}
        rec = sp.bench_solver(small_spd, config=tree, device=REF, fixed_iters=7)
        assert rec.kernel == "gmres"
        assert "iters=7" in rec.notes

    def test_breakdown_yields_failed_record(self, tmp_path):
        path = tmp_path / "zero.mtx"
        sp.write_matrix_market(sp.coo_from_triplets(REF, 2, 2, []), path)
        rec = sp.bench_solver(path, solver="cg", device=REF, fixed_iters=5)
        assert not rec.ok
        assert "breakdown" in rec.notes
        assert rec.time_s is None and rec.gflops is None

    def test_unknown_solver_name(self, small_spd):
        with pytest.raises(InvalidArgumentError):
            sp.bench_solver(small_spd, solver="bicgstab", device=REF)


class TestComputeOverhead:
    def test_ten_percent(self):
        p, _ = sp.compute_overhead(100.0, 90.0, 1.0, 1.0)
        assert p == 10.0

    def test_equal_inputs(self):
        p, t = sp.compute_overhead(100.0, 100.0, 1e-3, 1e-3)
        assert p == 0.0 and t == 0.0

    def test_time_difference(self):
        _, t = sp.compute_overhead(1.0, 1.0, 1.0e-5, 1.2e-5)
        assert t == 1.2e-5 - 1.0e-5
        assert t == pytest.approx(2e-6, rel=1e-9)

    def test_negative_time_difference_allowed(self):
        _, t = sp.compute_overhead(1.0, 1.0, 1.2e-5, 1.0e-5)
        assert t < 0

    def test_zero_baseline_rejected(self):
        with pytest.raises(UndefinedBaselineError):
            sp.compute_overhead(0.0, 1.0, 1.0, 1.0)


def _record(**over):
    base = dict(matrix="m", rows=2, cols=2, nnz=2, format="csr", device="reference",
                threads=1, precision="double", kernel="spmv", reps=3,
                time_s=1.5e-4, gflops=1.25)
    base.update(over)
    return BenchRecord(**base)


class TestReports:
    def test_csv_header_exact(self, tmp_path):
        path = tmp_path / "r.csv"
        text = sp.emit_report([_record()], "csv", path)
        lines = text.splitlines()
        assert lines[0] == ("matrix,rows,cols,nnz,format,device,threads,precision,"
                            "kernel,reps,time_s,gflops,speedup,p_overhead_pct,t_overhead_s")
        assert len(lines) == 2
        assert path.read_text() == text

    def test_empty_report_is_header_only(self):
        text = sp.emit_report([], "csv")
        assert text == ",".join(CSV_COLUMNS) + "\n"

    def test_optional_fields_empty_in_csv(self):
        text = sp.emit_report([_record()], "csv")
        row = text.splitlines()[1]
        assert row.endswith(",,,")  # speedup, p_overhead_pct, t_overhead_s

    def test_optional_fields_null_in_json(self):
        text = sp.emit_report([_record()], "json")
        data = json.loads(text)
        assert data[0]["speedup"] is None
        assert data[0]["gflops"] == 1.25

    def test_json_round_trip_identical(self, tmp_path):
        records = [_record(), _record(matrix="n", kernel="cg", speedup=2.5,
                                      p_overhead_pct=10.0, t_overhead_s=-1e-6,
                                      notes="iters=10", warmups=2)]
        path = tmp_path / "r.json"
        sp.emit_report(records, "json", path)
        assert load_report(path) == records

    def test_csv_round_trip_canonical_fields(self, tmp_path):
        records = [_record(speedup=3.0)]
        path = tmp_path / "r.csv"
        sp.emit_report(records, "csv", path)
        back = load_report(path)[0]
        for col in CSV_COLUMNS:
            assert getattr(back, col) == getattr(records[0], col)


class TestCompare:
    def test_overhead_columns(self, tmp_path):
        baseline = [_record(gflops=100.0, time_s=1.0e-5)]
        candidate = [_record(gflops=90.0, time_s=1.2e-5)]
        merged = compare_reports(baseline, candidate)[0]
        assert merged.p_overhead_pct == 10.0
        assert merged.t_overhead_s == 1.2e-5 - 1.0e-5
        assert merged.t_overhead_s == pytest.approx(2e-6, rel=1e-9)
        assert merged.speedup == pytest.approx(1.0e-5 / 1.2e-5)

    def test_unmatched_record_left_bare(self):
        merged = compare_reports([_record(matrix="other")], [_record()])[0]
        assert merged.speedup is None and merged.p_overhead_pct is None


class TestCli:
    def test_spmv_csv_to_file(self, diag1000, tmp_path):
        out = tmp_path / "report.csv"
        code = __import__("sparseops.cli", fromlist=["main"]).main(
            ["spmv", "--matrix", str(diag1000), "--reps", "3", "--warmups", "1",
             "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("matrix,rows,cols")
        assert lines[1].startswith("diag1000,1000,1000,1000,csr,reference,1,single,spmv,3,")

    def test_solver_failure_exit_code(self, tmp_path):
        path = tmp_path / "zero.mtx"
        sp.write_matrix_market(sp.coo_from_triplets(REF, 2, 2, []), path)
        from sparseops.cli import main
        assert main(["solver", "--matrix", str(path), "--solver", "cg",
                     "--iters", "3"]) == 1

    def test_missing_matrix_is_runtime_error(self, tmp_path):
        from sparseops.cli import main
        assert main(["spmv", "--matrix", str(tmp_path / "nope.mtx")]) == 1

    def test_usage_error_exit_code(self):
        from sparseops.cli import main
        with pytest.raises(SystemExit) as exc:
            main(["spmv"])  # --matrix is required
        assert exc.value.code == 2

    def test_omp_device_flag(self, diag1000, tmp_path):
        out = tmp_path / "omp.json"
        from sparseops.cli import main
        assert main(["spmv", "--matrix", str(diag1000), "--device", "omp",
                     "--threads", "2", "--reps", "2", "--warmups", "0",
                     "--out", str(out), "--emit", "json"]) == 0
        rec = load_report(out)[0]
        assert rec.device == "omp" and rec.threads == 2

    def test_compare_pipeline(self, tmp_path):
        base = tmp_path / "base.json"
        cand = tmp_path / "cand.json"
        out = tmp_path / "merged.csv"
        sp.emit_report([_record(gflops=100.0, time_s=1.0e-5)], "json", base)
        sp.emit_report([_record(gflops=90.0, time_s=1.2e-5)], "json", cand)
        from sparseops.cli import main
        assert main(["compare", "--baseline", str(base), "--candidate", str(cand),
                     "--out", str(out)]) == 0
        merged = load_report(out)[0]
        assert merged.p_overhead_pct == 10.0

    def test_solver_cli_with_config(self, small_spd, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "type": "solver::Cg",
            "criteria": [{"type": "Iteration", "max_iters": 500}],
        }))
        out = tmp_path / "solver.json"
        from sparseops.cli import main
        assert main(["solver", "--matrix", str(small_spd), "--config", str(cfg),
                     "--iters", "5", "--out", str(out), "--emit", "json"]) == 0
        rec = load_report(out)[0]
        assert rec.kernel == "cg" and rec.ok
