#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "secstore/analysis.hpp"
#include "secstore/classify.hpp"
#include "secstore/code.hpp"
#include "secstore/graph.hpp"
#include "secstore/instances.hpp"
#include "secstore/verify.hpp"

namespace secstore::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string label_str(const std::vector<int>& label) {
  if (label.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < label.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(label[i]);
  }
  return s;
}

inline std::string joined_names(const StorageGraph& g, const std::vector<int>& nodes) {
  if (nodes.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (i) s += "\t";
    s += g.nodes[nodes[i]];
  }
  return s;
}

inline std::string format_analysis(const StorageGraph& g, const ComponentAnalysis& a) {
  std::string out;
  out += "graph\tN\t" + std::to_string(g.nodes.size()) + "\tE\t" +
         std::to_string(g.edges.size()) + "\tK\t" + std::to_string(g.K) + "\tM\t" +
         std::to_string(g.M) + "\n";
  for (int k = 1; k <= g.K; ++k) {
    const auto& ps = a.per_source[k - 1];
    out += "source\t" + std::to_string(k) + "\tU\t" + std::to_string(ps.components.count) +
           "\tU_nondeg\t" + std::to_string(ps.restricted_components.count) + "\n";
    for (size_t n = 0; n < g.nodes.size(); ++n)
      out += "component\t" + g.nodes[n] + "\t" + std::to_string(ps.components.id[n]) + "\n";
    for (int e : ps.internal_qualified)
      out += "internal_qualified\t" + std::to_string(k) + "\t" + g.nodes[g.edges[e].a] + "\t" +
             g.nodes[g.edges[e].b] + "\n";
    for (int e : ps.restricted_internal)
      out += "internal_qualified_nondeg\t" + std::to_string(k) + "\t" + g.nodes[g.edges[e].a] +
             "\t" + g.nodes[g.edges[e].b] + "\n";
  }
  for (size_t n = 0; n < g.nodes.size(); ++n)
    out += "common\t" + g.nodes[n] + "\t" + label_str(a.common[n]) + "\n";
  out += "degenerate\t" + joined_names(g, a.degenerate_nodes()) + "\n";
  out += "nondegenerate\t" + joined_names(g, a.nondegenerate_nodes()) + "\n";
  return out;
}

inline std::string format_classification(const StorageGraph& g, const ClassificationResult& cls) {
  std::string out;
  out += "regime\t" + std::string(regime_name(cls.regime)) + "\n";
  out += "capacity\t" + cls.capacity.str() + "\n";
  for (const auto& [k, e] : cls.internal_witnesses)
    out += "witness\tinternal_qualified\t" + std::to_string(k) + "\t" + g.nodes[g.edges[e].a] +
           "\t" + g.nodes[g.edges[e].b] + "\n";
  for (int n : cls.nonempty_common_nodes)
    out += "witness\tcommon_sources\t" + g.nodes[n] + "\t" +
           label_str(common_sources(g, n)) + "\n";
  for (int e : cls.union_violations)
    out += "witness\tunion_violation\t" + g.nodes[g.edges[e].a] + "\t" + g.nodes[g.edges[e].b] +
           "\n";
  return out;
}

inline std::string format_report(const LinearSecureCode& code, const StorageGraph& g,
                                 const VerificationReport& report,
                                 const std::optional<AuditReport>& audit) {
  std::string out;
  out += "code\tkind\t" + std::string(code_kind_name(code.kind)) + "\tq\t" +
         std::to_string(code.field.q) + "\tK\t" + std::to_string(code.K) + "\tM\t" +
         std::to_string(code.M) + "\tzdim\t" + std::to_string(code.zdim) + "\n";
  for (const auto& rec : report.edges) {
    const auto& e = g.edges[rec.edge];
    out += "edge\t" + g.nodes[e.a] + "\t" + g.nodes[e.b] + "\tlabel\t" + label_str(e.label) +
           "\tcorrectness\t" + (rec.correctness ? "pass" : "fail") + "\tsecurity\t" +
           (rec.security ? "pass" : "fail") + "\tmethod\t" +
           (rec.oracle_ran ? "linear+oracle" : "linear");
    if (!rec.methods_agree) out += "\tmethod-disagreement";
    out += "\n";
  }
  for (size_t n = 0; n < g.nodes.size(); ++n)
    out += "entropy\tnode\t" + g.nodes[n] + "\t" + std::to_string(report.node_entropy[n]) + "\n";
  for (const auto& [e, h] : report.qualified_entropy)
    out += "entropy\tedge\t" + g.nodes[g.edges[e].a] + "\t" + g.nodes[g.edges[e].b] + "\t" +
           std::to_string(h) + "\n";
  out += "entropy\tnoise_given_sources\t" + std::to_string(report.noise_entropy_given_sources) +
         "\n";
  if (audit) {
    if (!audit->applicable) {
      out += "audit\tskipped\tzdim\t0\n";
    } else {
      for (std::string_view check : {"message_noise_size", "qualified_edge_size",
                                     "noise_alignment", "source_independence"}) {
        bool ok = true;
        for (const auto& fail : audit->failures)
          if (fail.check == check) {
            out += "audit\tfail\t" + fail.check + "\t" + fail.where + "\n";
            ok = false;
          }
        if (ok) out += "audit\tpass\t" + std::string(check) + "\n";
      }
    }
  }
  out += "rate\t" + report.rate + "\n";
  out += "verdict\t" + std::string(report.valid ? "VALID" : "INVALID") + "\n";
  return out;
}

// Route a graph to its construction. Throws PreconditionError when the
// regime admits none.
inline LinearSecureCode build_auto(const StorageGraph& g, const ComponentAnalysis& a,
                                   const ClassificationResult& cls, uint64_t seed,
                                   std::optional<uint64_t> q_override) {
  switch (cls.regime) {
    case Regime::Keyless:
      return build_keyless(g, a, seed, q_override);
    case Regime::ExtremalOneOverM:
      return g.M == 1 ? build_m1(g, a, q_override) : build_general(g, a, seed, q_override);
    case Regime::SubExtremal:
      throw PreconditionError(
          "no construction for regime SubExtremal (internal qualified edges present)");
    default:
      if (a.any_restricted_internal())
        throw PreconditionError(
            "no construction for this graph (internal qualified edges present)");
      return build_general_unchecked(g, a, seed, q_override);
  }
}

}  // namespace detail

// Single entry point used by the binary and by tests. Returns the process
// exit code: 0 success, 1 negative verdict or validation failure, 2 I/O or
// syntax error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"secure storage codes over graphs"};
  app.fallthrough();
  uint64_t seed = 0;
  uint64_t budget = kDefaultOracleBudget;
  app.add_option("--seed", seed, "seed for randomized constructions");
  app.add_option("--budget", budget, "work bound for exhaustive routines");

  std::string graph_path, code_path, out_path, mode = "auto";
  std::optional<uint64_t> q_override;
  uint64_t q_flag = 0;
  bool oracle = false, audit = false;
  int node_dim = 1, zdim = 0;

  auto* analyze_cmd = app.add_subcommand("analyze", "structural decomposition of a graph");
  analyze_cmd->add_option("file", graph_path, "graph file")->required();

  auto* classify_cmd = app.add_subcommand("classify", "extremal-regime classification");
  classify_cmd->add_option("file", graph_path, "graph file")->required();

  auto* build_cmd = app.add_subcommand("build", "synthesize a secure storage code");
  build_cmd->add_option("file", graph_path, "graph file")->required();
  build_cmd->add_option("--mode", mode, "auto|m1|general|keyless")
      ->check(CLI::IsMember({"auto", "m1", "general", "keyless"}));
  auto* qopt = build_cmd->add_option("--q", q_flag, "field size override (prime)");
  build_cmd->add_option("--out", out_path, "write the code here instead of stdout");

  auto* verify_cmd = app.add_subcommand("verify", "check a code against its graph");
  verify_cmd->add_option("codefile", code_path, "code file")->required();
  verify_cmd->add_option("graphfile", graph_path, "graph file")->required();
  verify_cmd->add_flag("--oracle", oracle, "also run the exhaustive entropy oracle");
  verify_cmd->add_flag("--audit", audit, "run the structural rank audits");

  auto* search_cmd =
      app.add_subcommand("search-converse", "exhaustive search over scalar linear codes");
  search_cmd->add_option("graphfile", graph_path, "graph file")->required();
  uint64_t search_q = 0;
  search_cmd->add_option("--q", search_q, "field size (prime)")->required();
  search_cmd->add_option("--node-dim", node_dim, "stored symbols per node");
  search_cmd->add_option("--zdim", zdim, "key symbols")->required();

  auto* demo_cmd = app.add_subcommand("demo", "run the bundled instances end to end");
  (void)demo_cmd;

  app.require_subcommand(0, 1);

  std::vector<const char*> argv;
  argv.push_back("secstore");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (app.get_subcommands().empty()) {
    err << "error: no command given (try --help)\n";
    return 2;
  }
  if (*qopt) q_override = q_flag;

  try {
    if (*analyze_cmd) {
      StorageGraph g = parse_graph(detail::read_file(graph_path));
      out << detail::format_analysis(g, analyze(g));
      return 0;
    }

    if (*classify_cmd) {
      StorageGraph g = parse_graph(detail::read_file(graph_path));
      ClassificationResult cls = classify(g, analyze(g));
      out << detail::format_classification(g, cls);
      return (cls.regime == Regime::Keyless || cls.regime == Regime::ExtremalOneOverM) ? 0 : 1;
    }

    if (*build_cmd) {
      StorageGraph g = parse_graph(detail::read_file(graph_path));
      ComponentAnalysis a = analyze(g);
      ClassificationResult cls = classify(g, a);
      LinearSecureCode code = [&] {
        if (mode == "m1") return build_m1(g, a, q_override);
        if (mode == "general") return build_general(g, a, seed, q_override);
        if (mode == "keyless") return build_keyless(g, a, seed, q_override);
        return detail::build_auto(g, a, cls, seed, q_override);
      }();
      std::string text = emit_code(code);
      if (out_path.empty()) {
        out << text;
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::ios_base::failure("cannot open " + out_path);
        f << text;
        out << "wrote\t" << out_path << "\n";
        out << "kind\t" << code_kind_name(code.kind) << "\n";
        out << "q\t" << code.field.q << "\n";
        out << "zdim\t" << code.zdim << "\n";
        out << "rate\t" << code.rate_str() << "\n";
      }
      return 0;
    }

    if (*verify_cmd) {
      StorageGraph g = parse_graph(detail::read_file(graph_path));
      LinearSecureCode code = parse_code(detail::read_file(code_path));
      VerificationReport report = verify_code(code, g, oracle, budget);
      std::optional<AuditReport> audit_report;
      if (audit) audit_report = audit_ranks(code, g, analyze(g));
      out << detail::format_report(code, g, report, audit_report);
      return report.valid ? 0 : 1;
    }

    if (*search_cmd) {
      StorageGraph g = parse_graph(detail::read_file(graph_path));
      auto found = exhaustive_converse_search(g, search_q, node_dim, zdim, budget);
      if (!found) {
        out << "NONE\n";
        return 1;
      }
      out << emit_code(*found);
      return 0;
    }

    // demo
    for (const auto& inst : instances::all()) {
      out << "=== " << inst.name << "\n";
      StorageGraph g = parse_graph(std::string(inst.text));
      ComponentAnalysis a = analyze(g);
      ClassificationResult cls = classify(g, a);
      out << detail::format_classification(g, cls);
      if (cls.regime == Regime::SubExtremal) {
        out << "build\tnone\n";
        auto found = exhaustive_converse_search(g, 2, 1, 1, budget);
        auto candidates = checked_pow(2, size_t(g.K + 1) * g.nodes.size(), budget);
        out << "converse\tq\t2\tnode_dim\t1\tzdim\t1\tcandidates\t"
            << (candidates ? std::to_string(*candidates) : "over-budget") << "\tresult\t"
            << (found ? "FOUND" : "NONE") << "\n";
        continue;
      }
      if (cls.regime == Regime::Uncharacterized) out << "note\tbest-effort build (no capacity claim)\n";
      LinearSecureCode code = detail::build_auto(g, a, cls, seed, std::nullopt);
      out << "build\t" << code_kind_name(code.kind) << "\tq\t" << code.field.q << "\tzdim\t"
          << code.zdim << "\trate\t" << code.rate_str() << "\n";
      VerificationReport report = verify_code(code, g, true, 100000);
      bool oracle_ran = !report.edges.empty() && report.edges.front().oracle_ran;
      out << "verify\t" << (report.valid ? "VALID" : "INVALID") << "\toracle\t"
          << (oracle_ran ? "yes" : "no") << "\n";
    }
    return 0;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const BuildError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace secstore::cli
