import json
import sqlite3
from datetime import datetime

from .models import BenchRow, BenchRun


class Database:
    def __init__(self, db_path: str = "tracegen.db"):
        self.db_path = db_path
        self.init_db()

    def init_db(self):
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS bench_runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    started_at TEXT NOT NULL,
                    prover TEXT NOT NULL,
                    timeout INTEGER NOT NULL
                )
            """)

            conn.execute("""
                CREATE TABLE IF NOT EXISTS bench_results (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL,
                    benchmark TEXT NOT NULL,
                    status TEXT NOT NULL,
                    wall_time REAL NOT NULL,
                    data TEXT NOT NULL,
                    FOREIGN KEY (run_id) REFERENCES bench_runs (id)
                )
            """)

    def record_run(self, run: BenchRun) -> BenchRun:
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.execute(
                "INSERT INTO bench_runs (started_at, prover, timeout) VALUES (?, ?, ?)",
                (run.started_at.isoformat(), run.prover, run.timeout),
            )
            run_id = cursor.lastrowid
            conn.executemany(
                """
                INSERT INTO bench_results (run_id, benchmark, status, wall_time, data)
                VALUES (?, ?, ?, ?, ?)
            """,
                [
                    (
                        run_id,
                        row.benchmark,
                        row.status,
                        row.wall_time,
                        json.dumps(row.model_dump()),
                    )
                    for row in run.rows
                ],
            )
        return run.model_copy(update={"id": run_id})

    def get_run(self, run_id: int) -> BenchRun | None:
        with sqlite3.connect(self.db_path) as conn:
            conn.row_factory = sqlite3.Row
            row = conn.execute(
                "SELECT * FROM bench_runs WHERE id = ?", (run_id,)
            ).fetchone()
            if not row:
                return None
            results = conn.execute(
                "SELECT data FROM bench_results WHERE run_id = ? ORDER BY id", (run_id,)
            ).fetchall()
            return BenchRun(
                id=row["id"],
                started_at=datetime.fromisoformat(row["started_at"]),
                prover=row["prover"],
                timeout=row["timeout"],
                rows=[BenchRow(**json.loads(r["data"])) for r in results],
            )

    def latest_run(self) -> BenchRun | None:
        with sqlite3.connect(self.db_path) as conn:
            row = conn.execute("SELECT MAX(id) FROM bench_runs").fetchone()
        if row is None or row[0] is None:
            return None
        return self.get_run(row[0])
