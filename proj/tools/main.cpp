// epikit command-line front end.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "epikit/consequence.hpp"
#include "epikit/epi.hpp"
#include "epikit/json_io.hpp"
#include "epikit/logic.hpp"
#include "epikit/models.hpp"
#include "epikit/parser.hpp"

namespace {

constexpr int kExitPositive = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw epikit::ParseError("cannot open file: " + path, 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<int> parse_elements(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<std::string> parse_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<epikit::Structure> load_models_dir(const std::string& dir,
                                               const epikit::Signature* sig) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  std::vector<epikit::Structure> out;
  for (const auto& f : files) out.push_back(epikit::parse_structure(slurp(f), sig));
  return out;
}

void print_structure_inline(const epikit::Structure& s, std::ostream& out) {
  out << epikit::render_structure(s);
}

struct CommonOpts {
  int depth = 2;
  std::int64_t fuel = 100000;
  bool json = false;
};

int cmd_entail(const std::string& theory_path, const std::string& query,
               const std::string& models_dir, int refute_size, const CommonOpts& opts) {
  using namespace epikit;
  Theory theory = parse_theory(slurp(theory_path));
  Implication imp = parse_implication(query, theory.signature());
  std::vector<AtomicFormula> sigma = imp.premises();
  const AtomicFormula& goal = imp.conclusion();

  if (!models_dir.empty()) {
    auto models = load_models_dir(models_dir, &theory.signature());
    auto res = entails_finite_class(models, sigma, goal);
    if (opts.json) {
      std::cout << entail_report_json(res, models);
    } else if (res.holds) {
      std::cout << "true: every listed structure validates the implication\n";
    } else {
      std::cout << "refuted by structure #" << res.counterexample->structure_index
                << " under";
      for (const auto& [var, val] : res.counterexample->assignment)
        std::cout << " " << var << "=" << val;
      std::cout << "\n";
      print_structure_inline(models[res.counterexample->structure_index], std::cout);
    }
    return res.holds ? kExitPositive : kExitRefuted;
  }

  auto res = entails_theory(theory, sigma, goal, opts.depth, opts.fuel);
  if (res.proved) {
    if (opts.json) {
      std::cout << entail_report_json(res);
    } else {
      std::cout << "proved (universe " << res.universe_size << " terms)\n"
                << format_certificate(*res.certificate);
    }
    return kExitPositive;
  }
  // not shown by the chase: look for a finite counter-model
  for (int size = 1; size <= refute_size; ++size) {
    auto models = enumerate_models(theory, size);
    auto fin = entails_finite_class(models, sigma, goal);
    if (!fin.holds) {
      if (opts.json) {
        std::cout << entail_report_json(fin, models);
      } else {
        std::cout << "refuted by a model of size " << size << " under";
        for (const auto& [var, val] : fin.counterexample->assignment)
          std::cout << " " << var << "=" << val;
        std::cout << "\n";
        print_structure_inline(models[fin.counterexample->structure_index], std::cout);
      }
      return kExitRefuted;
    }
  }
  if (opts.json) {
    std::cout << entail_report_json(res);
  } else {
    std::cout << "unknown: not derived within depth " << opts.depth << " and fuel "
              << opts.fuel << ", no counter-model of size <= " << refute_size << "\n";
  }
  return kExitUnknown;
}

epikit::DominionSemantics make_semantics(const epikit::Theory& theory,
                                         const std::string& models_dir,
                                         const CommonOpts& opts) {
  if (!models_dir.empty())
    return epikit::FiniteClassSemantics{load_models_dir(models_dir, &theory.signature())};
  return epikit::TheoryBoundedSemantics{theory, opts.depth, opts.fuel};
}

int cmd_dominion(const std::string& theory_path, const std::string& structure_path,
                 const std::string& sub_csv, const std::string& models_dir,
                 const CommonOpts& opts, bool epic_mode) {
  using namespace epikit;
  Theory theory = parse_theory(slurp(theory_path));
  Structure b = parse_structure(slurp(structure_path), &theory.signature());
  std::vector<int> base = parse_elements(sub_csv);
  DominionSemantics semantics = make_semantics(theory, models_dir, opts);
  DominionReport report = dominion(b, base, semantics);
  bool full = static_cast<int>(report.members.size()) == b.size();

  if (opts.json) {
    std::cout << dominion_report_json(report);
  } else {
    std::cout << "dominion of {";
    for (std::size_t i = 0; i < report.base.size(); ++i)
      std::cout << (i ? "," : "") << report.base[i];
    std::cout << "} = {";
    for (std::size_t i = 0; i < report.members.size(); ++i)
      std::cout << (i ? "," : "") << report.members[i];
    std::cout << "}  [" << (report.exact ? "exact" : "sound under-approximation")
              << "]\n";
    for (const auto& [e, cert] : report.member_certificates) {
      if (cert.steps.empty()) continue;
      std::cout << "element " << e << " certificate:\n" << format_certificate(cert);
    }
    for (const auto& [e, ev] : report.excluded_evidence) {
      std::cout << "element " << e << " excluded: homomorphism pair into model #"
                << ev.model_index << " maps it to " << ev.f[e] << " vs " << ev.g[e]
                << "\n";
    }
    if (epic_mode)
      std::cout << (full ? "epic\n" : (report.exact ? "not epic\n" : "not shown epic\n"));
  }
  if (!epic_mode) return kExitPositive;
  if (full) return kExitPositive;
  return report.exact ? kExitRefuted : kExitUnknown;
}

int cmd_scan_es(const std::string& theory_path, int max_size, int finite_class_max,
                bool weak_mode, const CommonOpts& opts) {
  using namespace epikit;
  Theory theory = parse_theory(slurp(theory_path));
  ScanOptions scan;
  scan.depth = opts.depth;
  scan.fuel = opts.fuel;
  if (finite_class_max > 0) scan.finite_class_max = finite_class_max;
  auto pairs = scan_es(theory, max_size, scan);

  if (opts.json && !weak_mode) {
    std::cout << es_pairs_json(pairs);
    return kExitPositive;
  }
  std::cout << pairs.size() << " proper epic pair(s) up to size " << max_size << "\n";
  DominionSemantics semantics =
      finite_class_max > 0
          ? DominionSemantics(
                FiniteClassSemantics{enumerate_models_up_to(theory, finite_class_max)})
          : DominionSemantics(TheoryBoundedSemantics{theory, opts.depth, opts.fuel});
  for (const auto& p : pairs) {
    std::cout << "model (size " << p.model.size() << "):\n";
    print_structure_inline(p.model, std::cout);
    std::cout << "epic subuniverse {";
    for (std::size_t i = 0; i < p.base.size(); ++i)
      std::cout << (i ? "," : "") << p.base[i];
    std::cout << "}\n";
    if (weak_mode) {
      std::vector<int> z;
      for (int e = 0; e < p.model.size(); ++e)
        if (!std::binary_search(p.base.begin(), p.base.end(), e)) z.push_back(e);
      std::vector<EpiWitness> witnesses;
      for (int e : z) witnesses.push_back(extract_witness(p.model, p.base, e, semantics));
      auto shrunk = shrink_almost_total(p.model, p.base, z, witnesses, semantics);
      if (opts.json) {
        std::cout << shrink_result_json(shrunk);
      } else {
        std::cout << "contracted pair: |B'| = " << shrunk.b_prime.size() << ", |A'| = "
                  << shrunk.a_prime.size()
                  << (shrunk.finitely_generated ? ", finitely generated" : "")
                  << (shrunk.proper ? ", proper" : ", NOT proper")
                  << (shrunk.epic ? ", epic" : ", NOT re-verified epic") << "\n";
      }
    }
  }
  return kExitPositive;
}

int cmd_beth(const std::string& theory_path, const std::string& gamma_path,
             const std::string& xvars, const std::string& zvars, int term_depth,
             int counter_size, const CommonOpts& opts) {
  using namespace epikit;
  Theory theory = parse_theory(slurp(theory_path));
  auto gamma = parse_atom_list(slurp(gamma_path), theory.signature());
  auto report = beth_check(theory, gamma, parse_names(xvars), parse_names(zvars),
                           opts.depth, opts.fuel, term_depth, counter_size);
  if (opts.json) {
    std::cout << beth_report_json(report);
  } else {
    std::cout << to_string(report.verdict) << "\n";
    for (const auto& [z, term] : report.definitions)
      std::cout << "  " << z << " := " << to_string(term) << "\n";
    if (!report.note.empty()) std::cout << "note: " << report.note << "\n";
    if (report.counterexample) {
      std::cout << "counter-model:\n";
      print_structure_inline(report.counterexample->model, std::cout);
      auto dump = [](const Assignment& v) {
        std::string s;
        for (const auto& [var, val] : v) s += " " + var + "=" + std::to_string(val);
        return s;
      };
      std::cout << "v1:" << dump(report.counterexample->v1) << "\n";
      std::cout << "v2:" << dump(report.counterexample->v2) << "\n";
    }
  }
  switch (report.verdict) {
    case BethVerdict::ExplicitlyDefined:
    case BethVerdict::ImplicitNotExplicit:
      return kExitPositive;
    case BethVerdict::NotImplicit:
      return kExitRefuted;
    case BethVerdict::Unknown:
      return kExitUnknown;
  }
  return kExitUnknown;
}

int cmd_leibniz(const std::string& matrix_path, bool reduce_mode, const CommonOpts& opts) {
  using namespace epikit;
  Structure m = parse_structure(slurp(matrix_path));
  if (reduce_mode) {
    auto q = reduce_matrix(m);
    if (opts.json) {
      std::cout << structure_to_json(q.structure, 2);
    } else {
      std::cout << render_structure(q.structure);
      std::cout << "projection:";
      for (int p : q.projection) std::cout << " " << p;
      std::cout << "\n";
    }
    return kExitPositive;
  }
  Congruence omega = leibniz(m);
  if (opts.json) {
    std::cout << congruence_json(omega);
  } else {
    std::cout << "leibniz congruence classes:";
    for (const auto& cls : omega.classes()) {
      std::cout << " {";
      for (std::size_t i = 0; i < cls.size(); ++i) std::cout << (i ? "," : "") << cls[i];
      std::cout << "}";
    }
    std::cout << "\n" << (omega.class_count() == m.size() ? "reduced\n" : "not reduced\n");
  }
  return kExitPositive;
}

int cmd_check_equiv(const std::string& system_path, const std::string& delta_path,
                    int refute_size, const CommonOpts& opts) {
  using namespace epikit;
  DeductiveSystem system = parse_deductive_system(slurp(system_path));
  auto delta = parse_term_list(slurp(delta_path), system.signature());
  auto check = check_equivalential(system, delta, opts.fuel, opts.depth, refute_size);
  if (opts.json) {
    std::cout << equivalential_json(check);
  } else {
    switch (check.status) {
      case EquivalentialCheck::Status::Verified:
        std::cout << "verified: delta is a set of equivalence formulas\n";
        break;
      case EquivalentialCheck::Status::Failed:
        std::cout << "failed at " << to_string(*check.failed_at) << " (" << check.detail
                  << ")\n";
        if (check.countermodel) {
          std::cout << "countermodel matrix:\n";
          print_structure_inline(check.countermodel->matrix, std::cout);
          std::cout << "assignment:";
          for (const auto& [var, val] : check.countermodel->assignment)
            std::cout << " " << var << "=" << val;
          std::cout << "\n";
        }
        break;
      case EquivalentialCheck::Status::Unknown:
        std::cout << "unknown: some condition neither derived nor refuted\n";
        break;
    }
  }
  switch (check.status) {
    case EquivalentialCheck::Status::Verified:
      return kExitPositive;
    case EquivalentialCheck::Status::Failed:
      return kExitRefuted;
    case EquivalentialCheck::Status::Unknown:
      return kExitUnknown;
  }
  return kExitUnknown;
}

int cmd_enumerate(const std::string& theory_path, int max_size, bool json_out) {
  using namespace epikit;
  Theory theory = parse_theory(slurp(theory_path));
  auto models = enumerate_models_up_to(theory, max_size);
  if (json_out) {
    std::string sep;
    std::cout << "[";
    for (const auto& m : models) {
      std::cout << sep << structure_to_json(m, -1);
      sep = ",";
    }
    std::cout << "]\n";
  } else {
    std::cout << models.size() << " model(s) up to size " << max_size << "\n";
    for (const auto& m : models) print_structure_inline(m, std::cout);
  }
  return kExitPositive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epikit: atomic consequence, dominions, epic substructures and "
               "Beth definability over finite first-order structures"};
  app.require_subcommand(1);

  std::string theory_path, structure_path, matrix_path, system_path, delta_path,
      gamma_path, models_dir, query, sub_csv, xvars, zvars;
  int max_size = 4, refute_size = 4, term_depth = 3, counter_size = 4,
      finite_class_max = 0;
  CommonOpts opts;

  auto add_common = [&](CLI::App* cmd, bool with_fuel = true) {
    if (with_fuel) {
      cmd->add_option("--depth", opts.depth, "chase universe depth bound");
      cmd->add_option("--fuel", opts.fuel, "maximum rule firings");
    }
    cmd->add_flag("--json", opts.json, "machine-readable output");
  };

  auto* entail = app.add_subcommand("entail", "decide an atomic implication");
  entail->add_option("--theory", theory_path)->required();
  entail->add_option("--query", query, "CONCL <= P1, P2, ...")->required();
  entail->add_option("--models", models_dir, "directory of structure files (exact mode)");
  entail->add_option("--refute-size", refute_size, "counter-model search bound");
  add_common(entail);

  auto* dom = app.add_subcommand("dominion", "compute a dominion with evidence");
  dom->add_option("--theory", theory_path)->required();
  dom->add_option("--structure", structure_path)->required();
  dom->add_option("--sub", sub_csv, "comma-separated subuniverse")->required();
  dom->add_option("--models", models_dir, "directory of structure files (exact mode)");
  add_common(dom);

  auto* epic = app.add_subcommand("epic", "test whether a subuniverse is epic");
  epic->add_option("--theory", theory_path)->required();
  epic->add_option("--structure", structure_path)->required();
  epic->add_option("--sub", sub_csv, "comma-separated subuniverse")->required();
  epic->add_option("--models", models_dir, "directory of structure files (exact mode)");
  add_common(epic);

  auto* scan = app.add_subcommand("scan-es", "scan small models for proper epic pairs");
  scan->add_option("--theory", theory_path)->required();
  scan->add_option("--max-size", max_size)->required();
  scan->add_option("--finite-class-max", finite_class_max,
                   "use exact semantics over models up to this size");
  add_common(scan);

  auto* weak = app.add_subcommand(
      "weak-es", "scan and contract epic pairs to finitely generated ones");
  weak->add_option("--theory", theory_path)->required();
  weak->add_option("--max-size", max_size)->required();
  weak->add_option("--finite-class-max", finite_class_max,
                   "use exact semantics over models up to this size");
  add_common(weak);

  auto* beth = app.add_subcommand("beth", "implicit/explicit definability check");
  beth->add_option("--theory", theory_path)->required();
  beth->add_option("--gamma", gamma_path, "file of atoms over x and z")->required();
  beth->add_option("--xvars", xvars, "comma-separated x variables")->required();
  beth->add_option("--zvars", zvars, "comma-separated z variables")->required();
  beth->add_option("--term-depth", term_depth, "candidate definition depth bound");
  beth->add_option("--counter-size", counter_size, "counter-model search bound");
  add_common(beth);

  auto* leib = app.add_subcommand("leibniz", "Leibniz congruence of a matrix");
  leib->add_option("--matrix", matrix_path)->required();
  add_common(leib, false);

  auto* red = app.add_subcommand("reduce", "quotient a matrix by its Leibniz congruence");
  red->add_option("--matrix", matrix_path)->required();
  add_common(red, false);

  auto* ce = app.add_subcommand("check-equiv", "equivalence-set conditions checker");
  ce->add_option("--system", system_path)->required();
  ce->add_option("--delta", delta_path, "file of binary terms over x, y")->required();
  ce->add_option("--refute-size", refute_size, "matrix counter-model bound");
  add_common(ce);

  auto* enumc = app.add_subcommand("enumerate", "list models of a theory up to a size");
  enumc->add_option("--theory", theory_path)->required();
  enumc->add_option("--max-size", max_size)->required();
  add_common(enumc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(entail))
      return cmd_entail(theory_path, query, models_dir, refute_size, opts);
    if (app.got_subcommand(dom))
      return cmd_dominion(theory_path, structure_path, sub_csv, models_dir, opts, false);
    if (app.got_subcommand(epic))
      return cmd_dominion(theory_path, structure_path, sub_csv, models_dir, opts, true);
    if (app.got_subcommand(scan))
      return cmd_scan_es(theory_path, max_size, finite_class_max, false, opts);
    if (app.got_subcommand(weak))
      return cmd_scan_es(theory_path, max_size, finite_class_max, true, opts);
    if (app.got_subcommand(beth))
      return cmd_beth(theory_path, gamma_path, xvars, zvars, term_depth, counter_size,
                      opts);
    if (app.got_subcommand(leib)) return cmd_leibniz(matrix_path, false, opts);
    if (app.got_subcommand(red)) return cmd_leibniz(matrix_path, true, opts);
    if (app.got_subcommand(ce))
      return cmd_check_equiv(system_path, delta_path, refute_size, opts);
    if (app.got_subcommand(enumc)) return cmd_enumerate(theory_path, max_size, opts.json);
  } catch (const epikit::UniverseLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const epikit::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const epikit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitUsage;
}
