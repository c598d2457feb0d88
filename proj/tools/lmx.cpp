// Command-line front end: space generation and validation, maximal function,
// Lorentz norms, operator constant estimates and the scripted experiments.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lmx/combiner.hpp"
#include "lmx/experiments.hpp"
#include "lmx/generators.hpp"
#include "lmx/maximal.hpp"
#include "lmx/opnorm.hpp"
#include "lmx/sequences.hpp"
#include "lmx/space_io.hpp"

namespace {

using namespace lmx;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertion = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Usage("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<BigInt> parse_bigs(const std::string& s) {
  std::vector<BigInt> out;
  for (const auto& item : split_list(s)) {
    try {
      out.emplace_back(item);
    } catch (const std::exception&) {
      throw Usage("not an integer: '" + item + "'");
    }
  }
  if (out.empty()) throw Usage("empty integer list");
  return out;
}

void emit_json(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(path, j);
  }
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path + "'");
  out << text;
}

FiniteSpace load_space(const std::string& path) { return space_from_json(read_json_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal operators and Lorentz quasi-norms on finite metric measure spaces"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "Check the metric measure space axioms of a space file");
  std::string validate_path;
  validate->add_option("space", validate_path, "Space file")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a test space");
  gen->require_subcommand(1);
  gen->fallthrough();
  std::string gen_out, plan_out;
  gen->add_option("--out,-o", gen_out, "Space file to write (stdout when omitted)");
  gen->add_option("--plan-out", plan_out, "Also write the sequence plan here");
  std::string gen_m;
  std::string gen_p = "2", gen_q = "2", gen_r = "2";
  std::size_t gen_l = 2;
  std::vector<std::string> gen_components;
  std::string gen_case = "U1", gen_p0 = "2", gen_q0 = "1", gen_r0 = "2";
  int gen_n = 4;
  auto* gen_first = gen->add_subcommand("first", "Space with x_0 and levels of m_j points of mass 2^j");
  gen_first->add_option("--m", gen_m, "Comma-separated non-decreasing counts")->required();
  auto* gen_first_prime = gen->add_subcommand("first-prime", "Counting-measure space from m' (m'_1 = 1)");
  gen_first_prime->add_option("--m", gen_m, "Comma-separated non-decreasing counts")->required();
  auto* gen_second = gen->add_subcommand("second", "Layered block space for (p, q, r), r < inf");
  auto* gen_second_prime = gen->add_subcommand("second-prime", "Layered block space for (p, q, inf)");
  for (auto* sub : {gen_second, gen_second_prime}) {
    sub->add_option("--p", gen_p, "Exponent p");
    sub->add_option("--q", gen_q, "Exponent q");
    sub->add_option("--l", gen_l, "Number of levels");
  }
  gen_second->add_option("--r", gen_r, "Exponent r");
  auto* gen_combined = gen->add_subcommand("combined", "Glue space files into one space");
  gen_combined->add_option("--components", gen_components, "Component space files")->required();
  auto* gen_thm1 = gen->add_subcommand("thm1", "n-th component of a divergence construction");
  gen_thm1->add_option("--case", gen_case, "U1..U4 or V1..V4");
  gen_thm1->add_option("--p0", gen_p0, "Exponent p0");
  gen_thm1->add_option("--q0", gen_q0, "Exponent q0");
  gen_thm1->add_option("--r0", gen_r0, "Exponent r0");
  gen_thm1->add_option("--n", gen_n, "Prefix length or family member");

  // maximal
  auto* maximal = app.add_subcommand("maximal", "Maximal function of a function file");
  std::string mx_space, mx_func, mx_out;
  maximal->add_option("space", mx_space, "Space file")->required();
  maximal->add_option("function", mx_func, "Function file")->required();
  maximal->add_option("--out,-o", mx_out, "Function file to write (stdout when omitted)");

  // norm
  auto* norm = app.add_subcommand("norm", "Lorentz quasi-norm of a function file");
  std::string nm_space, nm_func, nm_p = "2", nm_q = "2";
  norm->add_option("space", nm_space, "Space file")->required();
  norm->add_option("function", nm_func, "Function file")->required();
  norm->add_option("--p", nm_p, "Exponent p");
  norm->add_option("--q", nm_q, "Exponent q (number or inf)");

  // cnorm
  auto* cnorm = app.add_subcommand("cnorm", "Lower bound for the operator constant");
  std::string cn_space, cn_func, cn_method = "restricted", cn_witness;
  std::string cn_p = "2", cn_q = "1", cn_r = "2";
  std::uint64_t cn_budget = 1u << 16, cn_seed = 1;
  cnorm->add_option("space", cn_space, "Space file")->required();
  cnorm->add_option("--p", cn_p, "Exponent p");
  cnorm->add_option("--q", cn_q, "Exponent q");
  cnorm->add_option("--r", cn_r, "Exponent r");
  cnorm->add_option("--method", cn_method, "restricted, witness or search")
      ->check(CLI::IsMember({"restricted", "witness", "search"}));
  cnorm->add_option("--function", cn_func, "Function file (witness method)");
  cnorm->add_option("--budget", cn_budget, "Candidate or evaluation budget");
  cnorm->add_option("--seed", cn_seed, "Search seed");
  cnorm->add_option("--witness-out", cn_witness, "Write the best witness as a function file");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a scripted experiment");
  ExperimentConfig cfg;
  std::string ex_p0 = "2", ex_q0 = "1", ex_r0 = "2", ex_sweep, ex_r, ex_out, ex_format = "csv";
  experiment->add_option("id", cfg.id, "thm1-u, thm1-v, thm2, remark1, remark2 or prop1")
      ->required()
      ->check(CLI::IsMember({"thm1-u", "thm1-v", "thm2", "remark1", "remark2", "prop1"}));
  experiment->add_option("--p0", ex_p0, "Exponent p0");
  experiment->add_option("--q0", ex_q0, "Exponent q0");
  experiment->add_option("--r0", ex_r0, "Exponent r0");
  experiment->add_option("--sweep", ex_sweep, "Comma-separated sweep values");
  experiment->add_option("--r", ex_r, "Comma-separated exponents r to report");
  experiment->add_option("--seed", cfg.seed, "Seed");
  experiment->add_option("--budget", cfg.budget, "Candidate budget");
  experiment->add_option("--components", cfg.component_files, "Component space files (prop1)");
  experiment->add_option("--out,-o", ex_out, "Output file (stdout when omitted)");
  experiment->add_option("--format", ex_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      const ValidationReport rep = validate_space(load_space(validate_path));
      for (const auto& v : rep.violations) std::cout << v.invariant << ": " << v.detail << '\n';
      std::cout << (rep.ok() ? "valid" : "invalid") << '\n';
      return rep.ok() ? kExitOk : kExitAssertion;
    }
    if (*gen) {
      FiniteSpace space;
      std::optional<SequencePlan> plan;
      if (*gen_first) {
        const auto m = parse_bigs(gen_m);
        space = gen_first_type(m);
        plan = plan_first_type(m);
      } else if (*gen_first_prime) {
        auto [s, p] = gen_first_type_prime(parse_bigs(gen_m));
        space = std::move(s);
        plan = std::move(p);
      } else if (*gen_second) {
        plan = synth_second_type(parse_exponent(gen_p), parse_exponent(gen_q), parse_exponent(gen_r), gen_l);
        space = gen_second_type(*plan);
      } else if (*gen_second_prime) {
        auto [s, p] = synth_and_gen_second_type_prime(parse_exponent(gen_p), parse_exponent(gen_q), gen_l);
        space = std::move(s);
        plan = std::move(p);
      } else if (*gen_combined) {
        std::vector<FiniteSpace> comps;
        for (const auto& path : gen_components) comps.push_back(load_space(path));
        space = combine(comps);
      } else if (*gen_thm1) {
        const Thm1Sequence seq = thm1_sequences(thm1_case_from_string(gen_case), parse_exponent(gen_p0),
                                                parse_exponent(gen_q0), parse_exponent(gen_r0), gen_n);
        if (seq.target == GeneratorKind::FirstTypePrime) {
          auto [s, p] = gen_first_type_prime(seq.values);
          space = std::move(s);
          plan = std::move(p);
        } else {
          space = gen_first_type(seq.values);
          plan = plan_first_type(seq.values);
        }
      }
      emit_json(space_to_json(space), gen_out);
      if (!plan_out.empty()) {
        if (!plan) throw Usage("this generator has no sequence plan");
        write_json_file(plan_out, plan_to_json(*plan));
      }
      return kExitOk;
    }
    if (*maximal) {
      const FiniteSpace space = load_space(mx_space);
      const CellFunction f = function_from_json(space, read_json_file(mx_func));
      emit_json(function_to_json(space, maximal_function(space, f).mf), mx_out);
      return kExitOk;
    }
    if (*norm) {
      const FiniteSpace space = load_space(nm_space);
      const CellFunction f = function_from_json(space, read_json_file(nm_func));
      std::cout << format_value(lorentz_norm(space, f, parse_exponent(nm_p), parse_exponent(nm_q))) << '\n';
      return kExitOk;
    }
    if (*cnorm) {
      const FiniteSpace space = load_space(cn_space);
      const AdmissibleTriple t{parse_exponent(cn_p), parse_exponent(cn_q), parse_exponent(cn_r)};
      t.check();
      Witness best;
      bool exact = false;
      if (cn_method == "witness") {
        if (cn_func.empty()) throw Usage("--function is required for the witness method");
        best.space = space;
        best.f = function_from_json(space, read_json_file(cn_func));
        best.ratio = witness_ratio(space, best.f, t);
        best.method = "witness";
        best.label = cn_func;
      } else if (cn_method == "restricted") {
        if (t.q != 1) throw Usage("the restricted method measures q = 1");
        const ConstantEstimate e = restricted_constant_exact(space, t.p, t.r, cn_budget);
        best = e.best;
        exact = e.exact;
      } else {
        best = search_constant(space, t, cn_budget, cn_seed).best;
      }
      std::cout << "triple " << t.str() << "\nlower " << format_value(best.ratio) << "\nmethod " << best.method
                << "\nwitness " << best.label << "\nexact " << (exact ? "true" : "false") << '\n';
      if (!cn_witness.empty()) write_json_file(cn_witness, function_to_json(best.space, best.f));
      return kExitOk;
    }
    if (*experiment) {
      cfg.p0 = parse_exponent(ex_p0);
      cfg.q0 = parse_exponent(ex_q0);
      cfg.r0 = parse_exponent(ex_r0);
      for (const auto& s : split_list(ex_sweep)) {
        const double v = parse_exponent(s);
        if (v != std::floor(v) || v < 1) throw Usage("sweep values must be positive integers");
        cfg.sweep.push_back(static_cast<long long>(v));
      }
      for (const auto& s : split_list(ex_r)) cfg.r_grid.push_back(parse_exponent(s));
      const ExperimentResult res = run_experiment(cfg);
      if (ex_format == "json") {
        emit_json(result_to_json(res), ex_out);
      } else {
        emit_text(to_csv(res.table), ex_out);
        if (!ex_out.empty() && ex_out != "-") write_json_file(ex_out + ".json", res.sidecar);
      }
      for (const auto& c : res.checks) {
        std::cerr << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
      }
      return res.ok() ? kExitOk : kExitAssertion;
    }
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
