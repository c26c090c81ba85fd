#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "coauthornet/errors.hpp"
#include "coauthornet/eval.hpp"
#include "coauthornet/gradcheck.hpp"
#include "coauthornet/ingest.hpp"
#include "coauthornet/linkpred.hpp"
#include "coauthornet/nn.hpp"
#include "coauthornet/pipeline.hpp"
#include "coauthornet/synthetic.hpp"
#include "coauthornet/walks.hpp"

namespace py = pybind11;
using namespace coauthornet;

namespace {

using CommandResult = std::pair<int, std::string>;

template <typename Fn>
CommandResult capture(Fn&& fn) {
  std::ostringstream log;
  const int code = fn(log);
  return {code, log.str()};
}

py::list pairs_to_list(const std::vector<LabeledPair>& pairs) {
  py::list out;
  for (const auto& p : pairs) out.append(py::make_tuple(p.u, p.v, p.label));
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

PYBIND11_MODULE(_coauthornet, m) {
  m.doc() = "Co-authorship recommendation from citation-graph embeddings.";

  py::register_exception<Error>(m, "Error");

  py::class_<Graph>(m, "Graph")
      .def(py::init([](const std::vector<Edge>& edges, std::size_t n, bool directed) {
             return Graph::build(edges, n, directed);
           }),
           py::arg("edges"), py::arg("num_nodes"), py::arg("directed") = false)
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("directed", &Graph::directed)
      .def("neighbors",
           [](const Graph& g, NodeId v) {
             auto n = g.neighbors(v);
             return std::vector<NodeId>(n.begin(), n.end());
           })
      .def("degree", &Graph::degree)
      .def("has_edge", &Graph::has_edge)
      .def("edges", &Graph::edges);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("threads", &RunConfig::threads)
      .def_readwrite("offline", &RunConfig::offline)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("metadata_path", &RunConfig::metadata_path)
      .def_readwrite("edges_path", &RunConfig::edges_path)
      .def_readwrite("metrics_path", &RunConfig::metrics_path)
      .def_readwrite("lookup_path", &RunConfig::lookup_path)
      .def_readwrite("interest_vocab", &RunConfig::interest_vocab)
      .def_readwrite("article_dims", &RunConfig::article_dims)
      .def_readwrite("article_epochs", &RunConfig::article_epochs)
      .def_property(
          "article_method", [](const RunConfig& c) { return std::string(to_string(c.article_method)); },
          [](RunConfig& c, const std::string& s) { c.article_method = parse_article_method(s); })
      .def_property(
          "aggregator", [](const RunConfig& c) { return std::string(to_string(c.link.aggregator)); },
          [](RunConfig& c, const std::string& s) { c.link.aggregator = parse_aggregator(s); })
      .def_property(
          "operator", [](const RunConfig& c) { return std::string(to_string(c.link.op)); },
          [](RunConfig& c, const std::string& s) { c.link.op = parse_link_operator(s); })
      .def_property(
          "epochs", [](const RunConfig& c) { return c.link.epochs; },
          [](RunConfig& c, std::size_t e) { c.link.epochs = e; })
      .def_property(
          "learning_rate", [](const RunConfig& c) { return c.link.learning_rate; },
          [](RunConfig& c, double lr) { c.link.learning_rate = lr; })
      .def_property(
          "author_dims", [](const RunConfig& c) { return c.link.dims; },
          [](RunConfig& c, const std::vector<std::size_t>& d) { c.link.dims = d; })
      .def_property(
          "sample_sizes", [](const RunConfig& c) { return c.link.sample_sizes; },
          [](RunConfig& c, const std::vector<std::size_t>& s) { c.link.sample_sizes = s; })
      .def("describe", &RunConfig::describe)
      .def("__repr__", [](const RunConfig& c) {
        return "RunConfig(seed=" + std::to_string(c.seed) + ", out_dir='" + c.out_dir +
               "', article_method='" + std::string(to_string(c.article_method)) +
               "', author_dims=[" + join(c.link.dims) + "])";
      });

  m.def("ingest", [](const RunConfig& c) { return capture([&](auto& log) { return cmd_ingest(c, log); }); });
  m.def("embed", [](const RunConfig& c) { return capture([&](auto& log) { return cmd_embed(c, log); }); });
  m.def("train", [](const RunConfig& c) { return capture([&](auto& log) { return cmd_train(c, log); }); });
  m.def(
      "evaluate",
      [](const RunConfig& c, bool grid) {
        return capture([&](auto& log) { return cmd_evaluate(c, grid, log); });
      },
      py::arg("config"), py::arg("grid") = false);
  m.def(
      "recommend",
      [](const RunConfig& c, const std::string& author, std::size_t k) {
        return capture([&](auto& log) { return cmd_recommend(c, author, k, log); });
      },
      py::arg("config"), py::arg("author"), py::arg("k") = 10);
  m.def(
      "gen_synthetic",
      [](const RunConfig& c, std::vector<std::size_t> blocks, double p_in, double p_out) {
        SyntheticOptions opt{std::move(blocks), p_in, p_out};
        return capture([&](auto& log) { return cmd_gen_synthetic(c, opt, log); });
      },
      py::arg("config"), py::arg("block_sizes") = std::vector<std::size_t>{50, 50},
      py::arg("p_in") = 0.1, py::arg("p_out") = 0.01);
  m.def(
      "gradcheck",
      [](std::uint64_t seed, bool inject_wrong_gradient) {
        GradcheckOptions opt;
        opt.seed = seed;
        opt.inject_wrong_gradient = inject_wrong_gradient;
        std::vector<std::tuple<std::string, std::string, double>> rows;
        for (const auto& r : run_gradcheck(opt)) rows.emplace_back(r.family, r.block, r.max_rel_error);
        return rows;
      },
      py::arg("seed") = 1, py::arg("inject_wrong_gradient") = false);

  m.def(
      "generate_sbm",
      [](std::vector<std::size_t> blocks, double p_in, double p_out, std::uint64_t seed) {
        SbmGraph sbm = generate_sbm({std::move(blocks), p_in, p_out, seed});
        return py::make_tuple(std::move(sbm.graph), std::move(sbm.block));
      },
      py::arg("block_sizes") = std::vector<std::size_t>{50, 50}, py::arg("p_in") = 0.1,
      py::arg("p_out") = 0.01, py::arg("seed") = 7);
  m.def(
      "generate_walks",
      [](const Graph& g, double p, double q, std::size_t length, std::size_t per_node,
         std::uint64_t seed) {
        WalkConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.walk_length = length;
        cfg.walks_per_node = per_node;
        return generate_walks(g, cfg, seed);
      },
      py::arg("graph"), py::arg("p") = 1.0, py::arg("q") = 1.0, py::arg("walk_length") = 80,
      py::arg("walks_per_node") = 10, py::arg("seed") = 0);
  m.def(
      "split_edges",
      [](const Graph& g, std::array<std::size_t, 3> ratio, std::uint64_t seed) {
        const EdgeSplit s = split_edges(g, ratio, seed);
        py::dict d;
        d["train"] = pairs_to_list(s.train);
        d["val"] = pairs_to_list(s.val);
        d["test"] = pairs_to_list(s.test);
        return d;
      },
      py::arg("graph"), py::arg("ratio") = std::array<std::size_t, 3>{3, 1, 2},
      py::arg("seed") = 0);

  m.def("auc_roc", [](const std::vector<int>& labels, const std::vector<double>& scores) {
    return auc_roc(labels, scores);
  });
  m.def(
      "compute_metrics",
      [](const std::vector<int>& labels, const std::vector<double>& scores, double threshold) {
        const MetricsReport r = compute_metrics(labels, scores, threshold);
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["auc_roc"] = r.auc_roc;
        d["f1"] = r.f1;
        d["count"] = r.count;
        return d;
      },
      py::arg("labels"), py::arg("scores"), py::arg("threshold") = 0.5);
  m.def("bce_loss", [](const std::vector<double>& labels, const std::vector<double>& probs) {
    return bce_loss(labels, probs);
  });
  m.def("link_embed", [](const std::vector<double>& hu, const std::vector<double>& hv,
                         const std::string& op) {
    return link_embed(hu, hv, parse_link_operator(op));
  });
  m.def("normalize_author_name", [](const std::string& s) { return normalize_author_name(s); });
  m.def("parse_paper_metadata", [](const std::string& text) {
    std::istringstream in(text);
    const ParseResult parsed = parse_paper_metadata(in);
    py::list papers;
    for (const auto& p : parsed.papers) {
      py::dict d;
      d["paper_id"] = p.paper_id;
      d["title"] = p.title;
      d["abstract"] = p.abstract;
      d["authors"] = p.authors;
      d["journal_ref"] = p.journal_ref;
      d["date"] = p.date;
      papers.append(d);
    }
    return py::make_tuple(papers, parsed.skipped);
  });
}
