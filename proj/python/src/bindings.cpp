#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

#include "lensrag/answerer.hpp"
#include "lensrag/evalharness.hpp"
#include "lensrag/media.hpp"
#include "lensrag/mock_backends.hpp"
#include "lensrag/live_backends.hpp"
#include "lensrag/reader.hpp"
#include "lensrag/rerank.hpp"
#include "lensrag/text_util.hpp"

namespace py = pybind11;
using namespace lensrag;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::handle& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

template <class T>
std::vector<T> list_from_py(const py::handle& o) {
  return from_py(o).get<std::vector<T>>();
}

py::list records_to_py(const std::vector<AnswerRecord>& records) {
  py::list out;
  for (const auto& r : records) out.append(to_py(record_to_json(r)));
  return out;
}

class Session {
 public:
  Session(const std::optional<std::string>& mock_dir, const py::object& config) {
    if (!config.is_none()) ctx_.cfg = from_py(config).get<PipelineConfig>();
    validated(ctx_.cfg);
    if (mock_dir) {
      ctx_.backends = make_mock_backends(*mock_dir);
      judge_ = std::make_shared<MockJudge>();
    } else {
      LiveConfig live = LiveConfig::from_env();
      live.timeout_ms = ctx_.cfg.fetch_timeout_ms;
      live.max_in_flight = ctx_.cfg.parallelism;
      ctx_.backends = make_live_backends(live);
      judge_ = ctx_.backends.chat;
    }
  }

  py::list run(const std::string& dataset) {
    const auto tasks = load_dataset(dataset).tasks;
    const auto dir = std::filesystem::path(dataset).parent_path().string();
    std::vector<AnswerRecord> records;
    {
      py::gil_scoped_release nogil;
      records = answer_all(tasks, ctx_, dir);
    }
    return records_to_py(records);
  }

  py::object ask(const std::string& image_path, const std::string& question, const std::optional<std::string>& location) {
    AnswerRecord r;
    {
      py::gil_scoped_release nogil;
      const auto img = ingest_image(image_path, ctx_.cfg);
      r = answer_image("ask", img, question, location, ctx_);
    }
    return to_py(record_to_json(r));
  }

  py::list judge(const std::string& dataset, const py::list& records) {
    const auto tasks = load_dataset(dataset).tasks;
    const auto recs = list_from_py<AnswerRecord>(records);
    std::vector<Judgment> js;
    {
      py::gil_scoped_release nogil;
      js = judge_all(tasks, recs, *judge_, ctx_.cfg.parallelism, ctx_.prompts);
    }
    py::list out;
    for (const auto& j : js) out.append(to_py(j));
    return out;
  }

  py::object cache_stats() const { return to_py(ctx_.cache->stats()); }
  void save_cache(const std::string& path) const { ctx_.cache->save(path); }
  void load_cache(const std::string& path) { ctx_.cache->load(path); }
  py::object config() const { return to_py(ctx_.cfg); }

 private:
  PipelineContext ctx_;
  std::shared_ptr<ChatBackend> judge_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "lensrag native core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidParams>(m, "InvalidParams", base.ptr());
  py::register_exception<DatasetError>(m, "DatasetError", base.ptr());
  py::register_exception<LengthMismatch>(m, "LengthMismatch", base.ptr());
  py::register_exception<BackendUnavailable>(m, "BackendUnavailable", base.ptr());

  m.def("fuse_scores", &fuse_scores, py::arg("visual"), py::arg("textual"), py::arg("w1"), py::arg("w2"));
  m.def(
      "select",
      [](const py::list& chunks, double tau, int k) {
        py::list out;
        for (const auto& c : select(list_from_py<EvidenceChunk>(chunks), tau, k)) out.append(to_py(c));
        return out;
      },
      py::arg("chunks"), py::arg("tau"), py::arg("k"));

  m.def(
      "parse_html", [](const std::string& raw, const std::string& url) { return to_py(parse_html(raw, url)); },
      py::arg("raw"), py::arg("url") = "");
  m.def(
      "chunk_spans",
      [](const std::string& body, int size, int overlap) {
        std::vector<std::pair<std::string, std::size_t>> out;
        for (auto& c : chunk_spans(body, size, overlap)) out.emplace_back(std::move(c.text), c.offset);
        return out;
      },
      py::arg("body"), py::arg("size"), py::arg("overlap"));

  m.def("resized_dims", &resized_dims, py::arg("width"), py::arg("height"), py::arg("target") = 1024);
  m.def(
      "image_key", [](const std::string& path) { return image_key(load_image(path)); }, py::arg("path"));
  m.def("normalize_query", &normalize_query, py::arg("text"));

  m.def("default_config", [] { return to_py(PipelineConfig{}); });
  m.def(
      "validate_config",
      [](const py::object& cfg) {
        std::vector<std::string> out;
        for (const auto& v : validate_config(from_py(cfg).get<PipelineConfig>())) out.push_back(v.message);
        return out;
      },
      py::arg("config"));

  m.def(
      "load_dataset",
      [](const std::string& path) {
        const auto d = load_dataset(path);
        py::list tasks;
        for (const auto& t : d.tasks) tasks.append(to_py(t));
        return py::make_tuple(tasks, d.rejections);
      },
      py::arg("path"));
  m.def(
      "dataset_stats", [](const std::string& path) { return to_py(stats_to_json(dataset_stats(load_dataset(path).tasks))); },
      py::arg("path"));

  m.def("parse_judge_reply", &parse_judge_reply, py::arg("reply"));
  m.def(
      "aggregate",
      [](const py::list& judgments, const py::list& tasks, const py::list& records, const std::string& label) {
        return to_py(report_to_json(aggregate(list_from_py<Judgment>(judgments), list_from_py<QueryTask>(tasks),
                                              list_from_py<AnswerRecord>(records), label)));
      },
      py::arg("judgments"), py::arg("tasks"), py::arg("records"), py::arg("label") = "run");
  m.def(
      "overlap",
      [](const py::list& a, const py::list& b) { return overlap(list_from_py<Judgment>(a), list_from_py<Judgment>(b)); },
      py::arg("a"), py::arg("b"));

  py::class_<Session>(m, "Session")
      .def(py::init<const std::optional<std::string>&, const py::object&>(), py::arg("mock_dir") = py::none(),
           py::arg("config") = py::none())
      .def("run", &Session::run, py::arg("dataset"))
      .def("ask", &Session::ask, py::arg("image"), py::arg("question"), py::arg("location") = py::none())
      .def("judge", &Session::judge, py::arg("dataset"), py::arg("records"))
      .def("cache_stats", &Session::cache_stats)
      .def("save_cache", &Session::save_cache, py::arg("path"))
      .def("load_cache", &Session::load_cache, py::arg("path"))
      .def_property_readonly("config", &Session::config);
}
