import os
import sys
import unittest

import lensrag

MOCK = sys.argv.pop(1)
DATASET = os.path.join(MOCK, "dataset.jsonl")


class Primitives(unittest.TestCase):
    def test_fuse_and_select(self):
        fused = lensrag.fuse_scores([0.8, 0.2], [0.6, 0.5], 0.4, 0.6)
        self.assertAlmostEqual(fused[0], 0.68, places=12)
        chunks = [
            {"text": "a", "source_url": "u", "branch": "Textual", "source_position": 1, "chunk_index": 0, "fused_score": 0.95},
            {"text": "b", "source_url": "u", "branch": "Textual", "source_position": 1, "chunk_index": 1, "fused_score": 0.60},
            {"text": "c", "source_url": "u", "branch": "Textual", "source_position": 2, "chunk_index": 0, "fused_score": 0.61},
        ]
        sel = lensrag.select(chunks, 0.6, 10)
        self.assertEqual([c["text"] for c in sel], ["a", "c"])
        self.assertEqual([c["rank"] for c in sel], [1, 2])
        with self.assertRaises(lensrag.LengthMismatch):
            lensrag.fuse_scores([0.1], [0.1, 0.2], 0.4, 0.6)
        with self.assertRaises(lensrag.InvalidParams):
            lensrag.select(chunks, 0.6, 0)

    def test_reader(self):
        doc = lensrag.parse_html("<html><head><title>T</title></head><body><script>x()</script><p>Hi &amp; bye</p></body></html>")
        self.assertEqual(doc["title"], "T")
        self.assertIn("Hi & bye", doc["body"])
        self.assertNotIn("x()", doc["body"])
        spans = lensrag.chunk_spans("abcdefghij", 4, 1)
        self.assertEqual(spans[0], ("abcd", 0))
        self.assertEqual(spans[1][1], 3)

    def test_media_and_text(self):
        self.assertEqual(lensrag.resized_dims(2048, 1536), (1365, 1024))
        self.assertEqual(lensrag.resized_dims(800, 600), (800, 600))
        self.assertEqual(lensrag.normalize_query("  Eiffel   TOWER "), "eiffel tower")
        key = lensrag.image_key(os.path.join(MOCK, "images", "campbell.png"))
        self.assertEqual(key, lensrag.image_key(os.path.join(MOCK, "images", "campbell.png")))

    def test_config_and_judge_reply(self):
        cfg = lensrag.default_config()
        self.assertEqual(lensrag.validate_config(cfg), [])
        cfg["weight_visual"] = 0.9
        self.assertTrue(lensrag.validate_config(cfg))
        with self.assertRaises(lensrag.ConfigError):
            lensrag.Session(MOCK, cfg)
        self.assertIs(lensrag.parse_judge_reply('{"accuracy": true}'), True)
        self.assertIs(lensrag.parse_judge_reply('{"accuracy": false}'), False)
        self.assertIsNone(lensrag.parse_judge_reply("maybe"))


class EndToEnd(unittest.TestCase):
    def test_run_judge_report(self):
        tasks, rejected = lensrag.load_dataset(DATASET)
        self.assertEqual(len(tasks), 20)
        self.assertEqual(rejected, [])
        session = lensrag.Session(MOCK)
        records = session.run(DATASET)
        self.assertEqual([r["task_id"] for r in records], [t["id"] for t in tasks])
        judgments = session.judge(DATASET, records)
        report = lensrag.aggregate(judgments, tasks, records, "py")
        self.assertEqual(report["overall"]["accuracy_display"], "85.00")
        self.assertEqual(lensrag.overlap(judgments, judgments), 100.0)
        self.assertGreater(session.cache_stats()["l2_entries"], 0)
        self.assertEqual(lensrag.dataset_stats(DATASET)["total"], 20)

    def test_ask(self):
        session = lensrag.Session(MOCK)
        rec = session.ask(os.path.join(MOCK, "images", "campbell.png"),
                          "Which country is the renowned artist who painted this item from?", "Canada")
        self.assertIn("American", rec["answer"])
        self.assertEqual(rec["mode"], "Retrieved")

    def test_live_session_needs_endpoints(self):
        saved = {k: os.environ.pop(k) for k in list(os.environ) if k.startswith("LENSRAG_")}
        try:
            with self.assertRaises(lensrag.InvalidParams):
                lensrag.Session()
        finally:
            os.environ.update(saved)


if __name__ == "__main__":
    unittest.main(verbosity=2)
