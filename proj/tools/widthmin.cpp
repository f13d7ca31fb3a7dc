// widthmin -- command line front end for the width minimization library.
//
// Subcommands: minimize, normalize, width, regions, tw, eval, equiv, bench.
// Exit codes: 0 success, 1 usage error, 2 input error, 3 bounds exceeded or
// oracle failure.  `-` reads standard input.

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "widthmin/minimize.hpp"
#include "widthmin/oracles.hpp"

using nlohmann::json;
namespace wm = widthmin;

namespace {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    ss << in.rdbuf();
  }
  return ss.str();
}

wm::formula load_formula(const std::string& path) {
  return wm::nnf(wm::parse_nnf_input(slurp(path)));
}

wm::structure load_structure(const std::string& path) {
  return wm::parse_structure(slurp(path));
}

void write_out(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << text;
}

// Runs work(i) for every input index, optionally on several threads, and
// returns the results in input order.  The first failure (again in input
// order) is rethrown once all workers have stopped.
std::vector<std::string> map_files(
    size_t count, int jobs, const std::function<std::string(size_t)>& work) {
  std::vector<std::string> results(count);
  std::vector<std::exception_ptr> errors(count);
  if (jobs <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) results[i] = work(i);
    return results;
  }
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(jobs, static_cast<int>(count));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void print_blocks(const std::vector<std::string>& files,
                  const std::vector<std::string>& blocks) {
  for (size_t i = 0; i < files.size(); ++i) {
    if (files.size() > 1) std::cout << "# " << files[i] << "\n";
    std::cout << blocks[i];
  }
}

// ------------------------------------------------------------------
// minimize
// ------------------------------------------------------------------

json report_json(const wm::minimize_report& rep) {
  json j;
  j["schema"] = 1;
  j["input_width"] = rep.input_width;
  j["output_width"] = rep.output_width;
  j["tw_mode"] = wm::tw_mode_name(rep.mode);
  j["normal_form_trace"] = json::array();
  for (const auto& s : rep.normal_form_trace)
    j["normal_form_trace"].push_back(wm::to_string(s));
  j["regions"] = json::array();
  for (const auto& r : rep.regions)
    j["regions"].push_back({{"region_id", r.region_id},
                            {"hypergraph_size", r.hypergraph_size},
                            {"tw", r.tw},
                            {"mode", wm::tw_mode_name(r.mode)}});
  return j;
}

int cmd_minimize(const std::vector<std::string>& files, wm::tw_mode mode,
                 int threshold, bool with_trace, const std::string& report,
                 int jobs) {
  std::vector<wm::minimize_result> results(files.size());
  map_files(files.size(), jobs, [&](size_t i) {
    results[i] = wm::minimize(load_formula(files[i]), mode, threshold);
    return std::string{};
  });
  std::vector<std::string> blocks;
  for (const auto& r : results) {
    std::string b = wm::to_string(r.result) + "\n";
    if (with_trace) b += wm::to_string(r.report.normal_form_trace);
    blocks.push_back(b);
  }
  print_blocks(files, blocks);
  if (!report.empty()) {
    json j;
    if (files.size() == 1) {
      j = report_json(results[0].report);
    } else {
      j = json::array();
      for (size_t i = 0; i < files.size(); ++i) {
        json one = report_json(results[i].report);
        one["file"] = files[i];
        j.push_back(one);
      }
    }
    write_out(report, j.dump(2) + "\n");
  }
  return 0;
}

// ------------------------------------------------------------------
// normalize
// ------------------------------------------------------------------

int cmd_normalize(const std::vector<std::string>& files, bool with_trace,
                  bool with_potentials, int jobs) {
  auto blocks = map_files(files.size(), jobs, [&](size_t i) {
    wm::formula g = load_formula(files[i]);
    wm::normal_form_result nf = wm::y_normal_form(g);
    std::string b = wm::to_string(nf.result) + "\n";
    if (with_trace) b += wm::to_string(nf.steps);
    if (with_potentials) {
      std::ostringstream csv;
      csv << "step,rule,y_potential,yprime_potential\n";
      csv << "0,-," << wm::y_potential(g) << ',' << wm::yprime_potential(g)
          << "\n";
      for (const auto& rep : nf.reports)
        csv << rep.step_index << ',' << wm::rule_name(rep.r) << ','
            << rep.y_potential << ',' << rep.yprime_potential << "\n";
      b += csv.str();
    }
    return b;
  });
  print_blocks(files, blocks);
  return 0;
}

// ------------------------------------------------------------------
// width
// ------------------------------------------------------------------

int cmd_width(const std::vector<std::string>& files, int jobs) {
  auto blocks = map_files(files.size(), jobs, [&](size_t i) {
    return std::to_string(wm::width(load_formula(files[i]))) + "\n";
  });
  print_blocks(files, blocks);
  return 0;
}

// ------------------------------------------------------------------
// regions
// ------------------------------------------------------------------

void dump_region(std::ostream& os, const wm::region_tree& t, int& next_id,
                 int indent,
                 std::vector<std::pair<int, wm::hypergraph>>& graphs) {
  std::string pad(2 * static_cast<size_t>(indent), ' ');
  int id = next_id++;
  graphs.push_back({id, wm::region_hypergraph(t.skeleton, t.assoc)});
  os << pad << "region " << id << " ["
     << (t.skeleton.pol == wm::polarity::exists_and ? "exists/and"
                                                    : "forall/or")
     << "] width " << wm::holey_width(t.skeleton, t.assoc) << ": "
     << wm::to_string(t.skeleton) << "\n";
  for (const auto& [i, child] : t.children) {
    os << pad << "  hole " << i << " {";
    bool first = true;
    for (const auto& v : t.assoc.at(i)) {
      if (!first) os << ',';
      os << v;
      first = false;
    }
    os << "}";
    if (wm::child_is_atom(child)) {
      os << " = " << wm::to_string(std::get<wm::formula>(child)) << "\n";
    } else {
      os << " -> region " << next_id << "\n";
      dump_region(
          os, *std::get<std::shared_ptr<const wm::region_tree>>(child),
          next_id, indent + 1, graphs);
    }
  }
}

int cmd_regions(const std::string& file) {
  wm::formula f = load_formula(file);
  wm::region_child rc = wm::organize(wm::standardize(f));
  if (wm::child_is_atom(rc)) {
    std::cout << "atom: " << wm::to_string(std::get<wm::formula>(rc)) << "\n";
    return 0;
  }
  std::vector<std::pair<int, wm::hypergraph>> graphs;
  int next_id = 1;
  dump_region(std::cout,
              *std::get<std::shared_ptr<const wm::region_tree>>(rc), next_id,
              0, graphs);
  for (const auto& [id, h] : graphs) {
    std::cout << "c region " << id << "\n" << wm::to_gr(h);
  }
  return 0;
}

// ------------------------------------------------------------------
// tw
// ------------------------------------------------------------------

int cmd_tw(const std::string& file, bool heuristic, int threshold,
           const std::string& out) {
  wm::hypergraph h = wm::parse_gr(slurp(file));
  wm::tw_result r =
      heuristic ? wm::heuristic_td(h) : wm::exact_treewidth(h, threshold);
  std::cout << r.width << "\n";
  if (!out.empty())
    write_out(out, wm::to_td(wm::normalize_td(h, r.td), h));
  return 0;
}

// ------------------------------------------------------------------
// eval
// ------------------------------------------------------------------

int cmd_eval(const std::string& ffile, const std::string& sfile, bool count,
             bool rows) {
  wm::formula f = load_formula(ffile);
  wm::structure s = load_structure(sfile);
  wm::assignment_relation rel = wm::evaluate(f, s);
  if (count) {
    std::cout << rel.rows.size() << "\n";
    return 0;
  }
  if (rel.schema.empty() && !rows) {
    std::cout << (rel.rows.empty() ? "false" : "true") << "\n";
    return 0;
  }
  std::cout << "vars:";
  for (const auto& v : rel.schema) std::cout << ' ' << v;
  std::cout << "\n";
  for (const auto& row : rel.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) std::cout << ' ';
      std::cout << row[i];
    }
    std::cout << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------
// equiv
// ------------------------------------------------------------------

int cmd_equiv(const std::string& f1, const std::string& f2, bool semantic,
              int max_domain) {
  wm::formula a = load_formula(f1);
  wm::formula b = load_formula(f2);
  bool eq = semantic ? wm::semantically_equiv(a, b, max_domain)
                     : wm::rewrite_equiv(a, b);
  std::cout << (eq ? "equivalent" : "inequivalent") << "\n";
  return 0;
}

// ------------------------------------------------------------------
// bench
// ------------------------------------------------------------------

double time_eval_ms(const wm::formula& f, const wm::structure& s) {
  using clock = std::chrono::steady_clock;
  auto once = [&]() {
    auto t0 = clock::now();
    wm::assignment_relation r = wm::evaluate(f, s);
    auto t1 = clock::now();
    (void)r;
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
  };
  double ms = once();
  if (ms >= 30.0) return ms;
  int reps = static_cast<int>(std::ceil(30.0 / std::max(ms, 0.01)));
  auto t0 = clock::now();
  for (int i = 0; i < reps; ++i) {
    wm::assignment_relation r = wm::evaluate(f, s);
    (void)r;
  }
  auto t1 = clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

int cmd_bench(const std::string& ffile, const std::string& sfile,
              wm::tw_mode mode, int threshold) {
  wm::formula before = load_formula(ffile);
  wm::structure s = load_structure(sfile);
  wm::formula after = wm::minimize(before, mode, threshold).result;
  if (!(wm::evaluate(before, s) == wm::evaluate(after, s)))
    throw wm::bounds_error(
        "bench: minimized formula disagrees with the input on this "
        "structure");
  double t_before = time_eval_ms(before, s);
  double t_after = time_eval_ms(after, s);
  json j;
  j["schema"] = 1;
  j["width_before"] = wm::width(before);
  j["width_after"] = wm::width(after);
  j["time_before_ms"] = t_before;
  j["time_after_ms"] = t_after;
  j["speedup"] = t_before / t_after;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"width minimization for positive first-order formulas"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string file1, file2, report, out;
  bool heuristic_tw = false, exact_tw = false, with_trace = false;
  bool with_potentials = false, count = false, rows = false;
  bool semantic = false, heuristic_flag = false;
  int threshold = 18, jobs = 1, max_domain = 2;

  auto add_tw_flags = [&](CLI::App* c) {
    c->add_flag("--exact-tw", exact_tw,
                "exact treewidth per region (default)");
    c->add_flag("--heuristic-tw", heuristic_tw,
                "min-fill heuristic treewidth per region");
    c->add_option("--exact-threshold", threshold,
                  "vertex cap for the exact treewidth algorithm");
  };

  CLI::App* cmin = app.add_subcommand("minimize", "minimize formula width");
  cmin->add_option("file", files, "formula files ('-' for stdin)")
      ->required();
  add_tw_flags(cmin);
  cmin->add_flag("--trace", with_trace, "print the normalization trace");
  cmin->add_option("--report", report, "write a JSON report ('-' = stdout)");
  cmin->add_option("--jobs", jobs, "process input files in parallel");

  CLI::App* cnorm =
      app.add_subcommand("normalize", "compute the Y-normal form");
  cnorm->add_option("file", files, "formula files ('-' for stdin)")
      ->required();
  cnorm->add_flag("--trace", with_trace, "print the rewrite trace");
  cnorm->add_flag("--potentials", with_potentials,
                  "print per-step potentials as CSV");
  cnorm->add_option("--jobs", jobs, "process input files in parallel");

  CLI::App* cwidth = app.add_subcommand("width", "print the formula width");
  cwidth->add_option("file", files, "formula files ('-' for stdin)")
      ->required();
  cwidth->add_option("--jobs", jobs, "process input files in parallel");

  CLI::App* creg =
      app.add_subcommand("regions", "dump region tree and hypergraphs");
  creg->add_option("file", file1, "formula file ('-' for stdin)")->required();

  CLI::App* ctw = app.add_subcommand("tw", "treewidth of a .gr hypergraph");
  ctw->add_option("file", file1, "graph file in .gr format")->required();
  ctw->add_flag("--exact", exact_tw, "exact algorithm (default)");
  ctw->add_flag("--heuristic", heuristic_flag, "min-fill heuristic");
  ctw->add_option("--exact-threshold", threshold,
                  "vertex cap for the exact algorithm");
  ctw->add_option("--out", out, "write the normalized decomposition (.td)");

  CLI::App* ceval =
      app.add_subcommand("eval", "evaluate a formula on a structure");
  ceval->add_option("formula", file1, "formula file ('-' for stdin)")
      ->required();
  ceval->add_option("structure", file2, "structure file")->required();
  ceval->add_flag("--count", count, "print only the number of rows");
  ceval->add_flag("--rows", rows, "print schema and rows");

  CLI::App* cequiv = app.add_subcommand("equiv", "decide equivalence");
  cequiv->add_option("formula1", file1, "first formula file")->required();
  cequiv->add_option("formula2", file2, "second formula file")->required();
  cequiv->add_flag("--semantic", semantic,
                   "semantic check over small structures instead of "
                   "rewrite equivalence");
  cequiv->add_option("--max-domain", max_domain,
                     "domain size cap for --semantic");

  CLI::App* cbench = app.add_subcommand(
      "bench", "time evaluation before and after minimization");
  cbench->add_option("formula", file1, "formula file ('-' for stdin)")
      ->required();
  cbench->add_option("structure", file2, "structure file")->required();
  add_tw_flags(cbench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (exact_tw && (heuristic_tw || heuristic_flag)) {
    std::cerr << "error: choose one of exact and heuristic\n";
    return 1;
  }
  wm::tw_mode mode =
      heuristic_tw ? wm::tw_mode::heuristic : wm::tw_mode::exact;

  try {
    if (*cmin)
      return cmd_minimize(files, mode, threshold, with_trace, report, jobs);
    if (*cnorm) return cmd_normalize(files, with_trace, with_potentials, jobs);
    if (*cwidth) return cmd_width(files, jobs);
    if (*creg) return cmd_regions(file1);
    if (*ctw) return cmd_tw(file1, heuristic_flag, threshold, out);
    if (*ceval) return cmd_eval(file1, file2, count, rows);
    if (*cequiv) return cmd_equiv(file1, file2, semantic, max_domain);
    if (*cbench) return cmd_bench(file1, file2, mode, threshold);
  } catch (const wm::bounds_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
