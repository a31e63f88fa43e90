import json
import os
import subprocess
import sys
import tempfile
import unittest

BIN = sys.argv.pop(1)
MOCK = sys.argv.pop(1)
DATASET = os.path.join(MOCK, "dataset.jsonl")


def cli(*args, cwd=None):
    return subprocess.run([BIN, *args], capture_output=True, text=True, cwd=cwd, timeout=300)


def read_jsonl(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


class Pipeline(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = cls.tmp.name
        cls.records = os.path.join(cls.dir, "r.jsonl")
        cls.judgments = os.path.join(cls.dir, "j.jsonl")
        cls.run_res = cli("run", DATASET, "-o", cls.records, "--mock-backends", MOCK, "--jobs", "2",
                      "--cache-dir", cls.dir)
        cls.judge_res = cli("judge", DATASET, cls.records, "-o", cls.judgments, "--mock-backends", MOCK)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_run_and_judge_cover_every_task(self):
        self.assertEqual(self.run_res.returncode, 0, self.run_res.stderr)
        self.assertEqual(len(read_jsonl(self.records)), 20)
        self.assertEqual(self.judge_res.returncode, 0, self.judge_res.stderr)
        judged = read_jsonl(self.judgments)
        self.assertEqual(len(judged), 20)
        self.assertEqual(sum(j["accuracy"] for j in judged), 17)
        with open(self.records + ".meta.json") as f:
            meta = json.load(f)
        self.assertEqual(meta["tasks"], 20)
        self.assertEqual(meta["failed"], 0)

    def test_report_outputs(self):
        prefix = os.path.join(self.dir, "rep")
        res = cli("report", DATASET, self.records, self.judgments, "-o", prefix, "--label", "lensrag")
        self.assertEqual(res.returncode, 0, res.stderr)
        with open(prefix + ".json") as f:
            rep = json.load(f)
        self.assertEqual(rep["overall"]["total"], 20)
        self.assertEqual(rep["overall"]["accuracy_display"], "85.00")
        self.assertEqual(rep["run_label"], "lensrag")
        for dim in ("difficulty", "domain", "information_seeking", "hops"):
            self.assertIn(dim, rep["slices"])
        self.assertIn("config", rep)
        self.assertTrue(os.path.exists(prefix + ".csv"))
        with open(prefix + ".txt") as f:
            self.assertIn("accuracy: 85.00", f.read())

    def test_baseline_gain(self):
        base_records = os.path.join(self.dir, "direct.jsonl")
        base_judged = os.path.join(self.dir, "direct_j.jsonl")
        self.assertEqual(cli("run", DATASET, "-o", base_records, "--system", "direct", "--mock-backends", MOCK).returncode, 0)
        self.assertEqual(cli("judge", DATASET, base_records, "-o", base_judged, "--mock-backends", MOCK).returncode, 0)
        base_acc = 100.0 * sum(j["accuracy"] for j in read_jsonl(base_judged)) / 20
        res = cli("report", DATASET, self.records, self.judgments, "--baseline", base_judged)
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertIn("%+.2f" % (85.0 - base_acc), res.stdout)
        for r in read_jsonl(base_records):
            self.assertEqual(r["mode"], "Direct")

    def test_cache_persists_between_runs(self):
        res = cli("cache", "stats", "--cache-dir", self.dir)
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertRegex(res.stdout, r"l1_entries\D+[1-9]")
        self.assertRegex(res.stdout, r"l2_entries\D+[1-9]")

    def test_overlap_and_errors(self):
        res = cli("overlap", self.judgments, self.judgments)
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertIn("100.00", res.stdout)
        res = cli("errors", DATASET, self.records, self.judgments)
        self.assertEqual(res.returncode, 0, res.stderr)
        for tid in ("t05", "t13", "t14"):
            self.assertIn(tid, res.stdout)


class Commands(unittest.TestCase):
    def test_missing_subcommand_is_a_usage_error(self):
        self.assertEqual(cli().returncode, 2)

    def test_invalid_config_lists_violations(self):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            json.dump({"weight_visual": 0.5, "weight_textual": 0.6, "top_n_pages": 0}, f)
        try:
            res = cli("run", DATASET, "-o", os.devnull, "--config", f.name, "--mock-backends", MOCK)
        finally:
            os.unlink(f.name)
        self.assertEqual(res.returncode, 2)
        self.assertIn("top_n_pages", res.stderr)
        self.assertIn("weight_visual+weight_textual", res.stderr)

    def test_live_mode_without_endpoints_is_a_usage_error(self):
        env = {k: v for k, v in os.environ.items() if not k.startswith("LENSRAG_")}
        res = subprocess.run([BIN, "stats", DATASET], capture_output=True, text=True, env=env)
        self.assertEqual(res.returncode, 0)
        res = subprocess.run([BIN, "read-url", "https://example.com/"], capture_output=True, text=True, env=env)
        self.assertEqual(res.returncode, 2)
        self.assertIn("LENSRAG_CHAT_URL", res.stderr)

    def test_ask_answers_with_a_trace(self):
        res = cli("ask", os.path.join(MOCK, "images", "campbell.png"),
                  "Which country is the renowned artist who painted this item from?",
                  "--location", "Canada", "--trace", "--mock-backends", MOCK)
        self.assertEqual(res.returncode, 0, res.stderr)
        rec = json.loads(res.stdout)
        self.assertIn("American", rec["answer"])
        self.assertEqual(rec["mode"], "Retrieved")
        self.assertTrue(rec["tool_calls"])

    def test_stats_json(self):
        res = cli("stats", DATASET, "--json")
        self.assertEqual(res.returncode, 0, res.stderr)
        s = json.loads(res.stdout)
        self.assertEqual(s["total"], 20)
        self.assertEqual(s["single_hop"] + s["multi_hop"], 20)

    def test_retrieve_dry_run_fetches_nothing(self):
        res = cli("retrieve", os.path.join(MOCK, "images", "campbell.png"),
                  "Which country is the renowned artist who painted this item from?", "--dry-run", "--mock-backends", MOCK)
        self.assertEqual(res.returncode, 0, res.stderr)
        out = json.loads(res.stdout)
        self.assertIn("urls", out)
        self.assertIn("plan", out)

    def test_read_url(self):
        res = cli("read-url", "https://en.wikipedia.org/wiki/Andy_Warhol", "--mock-backends", MOCK)
        self.assertEqual(res.returncode, 0, res.stderr)
        doc = json.loads(res.stdout)
        self.assertEqual(doc["title"], "Andy Warhol")
        self.assertNotIn("<", doc["body"].replace("< ", ""))
        res = cli("read-url", "https://broken.example/missing", "--mock-backends", MOCK)
        self.assertEqual(res.returncode, 1)

    def test_ablate_writes_twelve_rows(self):
        with tempfile.TemporaryDirectory() as d:
            sub = os.path.join(d, "one.jsonl")
            with open(DATASET) as src, open(sub, "w") as dst:
                dst.write(src.readline().replace('"images/', '"' + MOCK + '/images/'))
            prefix = os.path.join(d, "abl")
            res = cli("ablate", sub, "-o", prefix, "--mock-backends", MOCK)
            self.assertEqual(res.returncode, 0, res.stderr)
            with open(prefix + ".json") as f:
                rows = json.load(f)
            self.assertEqual(len(rows), 12)
            self.assertEqual(rows[0]["setting"], "Full system")
            self.assertEqual(len({(r["group"], r["setting"]) for r in rows}), 12)
            with open(prefix + ".txt") as f:
                self.assertIn("C. Demand-Adaptive Retrieval", f.read())


if __name__ == "__main__":
    unittest.main(verbosity=2)
