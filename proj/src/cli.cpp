#include "crmoduli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "crmoduli/cartan.hpp"
#include "crmoduli/exterior.hpp"
#include "crmoduli/moduli.hpp"
#include "crmoduli/vecfield.hpp"

namespace crmoduli {

namespace {

enum class Format { Text, Json, Latex };

struct Options {
  std::string model_file;
  std::string builtin = "m14";
  std::string a_text, b_text;
  std::string m1, m2;
  std::string format = "text";
  std::string output;
  std::string pipeline = "cartan";
  std::string branch;
  int samples = 50;
  std::uint64_t seed = 1;
};

Format parse_format(const std::string& f) {
  if (f == "text") return Format::Text;
  if (f == "json") return Format::Json;
  if (f == "latex") return Format::Latex;
  fail("SyntaxError", "unknown format '" + f + "' (text, json, latex)");
}

Pipeline parse_pipeline(const std::string& p) {
  if (p == "cartan") return Pipeline::Cartan;
  if (p == "lie") return Pipeline::Lie;
  fail("SyntaxError", "unknown pipeline '" + p + "' (cartan, lie)");
}

// "", "+1", "-1" or "both"; empty keeps the sign symbolic.
int parse_branch(const std::string& b, bool* both) {
  *both = false;
  if (b.empty()) return 0;
  if (b == "+1" || b == "1") return +1;
  if (b == "-1") return -1;
  if (b == "both") {
    *both = true;
    return +1;
  }
  fail("SyntaxError", "unknown branch '" + b + "' (+1, -1, both)");
}

CRModel resolve_model(const Options& o) {
  if (!o.model_file.empty()) {
    if (!o.a_text.empty() || !o.b_text.empty())
      fail("SyntaxError", "give either --model or --a/--b, not both");
    std::ifstream in(o.model_file);
    if (!in) fail("SyntaxError", "cannot read model file " + o.model_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
  }
  if (o.builtin != "m14") fail("SyntaxError", "unknown builtin model '" + o.builtin + "'");
  if (o.a_text.empty() && o.b_text.empty()) return builtin_m14();
  if (o.a_text.empty() || o.b_text.empty())
    fail("SyntaxError", "builtin coefficients need both --a and --b");
  return builtin_m14(parse_scalar(o.a_text), parse_scalar(o.b_text));
}

// Inline form "a=<rational>,b=<rational>"; anything without '=' is a file.
CRModel resolve_slot(const std::string& spec) {
  if (spec.empty()) fail("SyntaxError", "empty model slot");
  if (spec.find('=') == std::string::npos) {
    Options o;
    o.model_file = spec;
    return resolve_model(o);
  }
  std::string a_text, b_text;
  std::stringstream ss(spec);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    auto eq = piece.find('=');
    if (eq == std::string::npos) fail("SyntaxError", "bad model slot entry '" + piece + "'");
    std::string key = piece.substr(0, eq), val = piece.substr(eq + 1);
    if (key == "a")
      a_text = val;
    else if (key == "b")
      b_text = val;
    else
      fail("SyntaxError", "unknown model slot key '" + key + "'");
  }
  if (a_text.empty() || b_text.empty())
    fail("SyntaxError", "a model slot needs both a= and b=");
  return builtin_m14(parse_scalar(a_text), parse_scalar(b_text));
}

nlohmann::json equations_json(const StructureEquationSet& s) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& [i, f] : s.d) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [idx, c] : f.terms()) {
      nlohmann::json wedge = nlohmann::json::array();
      for (int x : idx) wedge.push_back(s.frame->name(x));
      terms.push_back({{"coeff", c.str()}, {"wedge", wedge}});
    }
    eqs.push_back({{"lhs", s.frame->name(i)}, {"terms", terms}});
  }
  return eqs;
}

void emit(const Options& o, std::ostream& out, const std::string& report) {
  if (o.output.empty()) {
    out << report;
    return;
  }
  std::ofstream f(o.output);
  if (!f) fail("SyntaxError", "cannot write " + o.output);
  f << report;
}

std::string frame_report(const Options& o) {
  CRModel m = resolve_model(o);
  Frame f = build_frame(m);
  switch (parse_format(o.format)) {
    case Format::Text:
      return f.str();
    case Format::Json: {
      nlohmann::json j;
      j["labels"] = f.labels;
      nlohmann::json fields = nlohmann::json::array();
      for (size_t k = 0; k < f.fields.size(); ++k) {
        nlohmann::json coeffs;
        for (const auto& [i, c] : f.fields[k].coeffs())
          coeffs[f.space->name(i)] = c.str();
        fields.push_back({{"label", f.labels[k]}, {"coeffs", coeffs}});
      }
      j["fields"] = fields;
      j["independence"] = f.independence.str();
      return j.dump() + "\n";
    }
    case Format::Latex:
      fail("SyntaxError", "latex output covers coframe, cartan and lie only");
  }
  fail("Internal", "unreachable");
}

std::string table_report(const Options& o) {
  CRModel m = resolve_model(o);
  Frame f = build_frame(m);
  StructureFunctions t = commutator_table(f);
  switch (parse_format(o.format)) {
    case Format::Text:
      return t.str();
    case Format::Json: {
      nlohmann::json j;
      j["labels"] = t.labels;
      nlohmann::json brackets = nlohmann::json::array();
      for (const auto& [key, coeffs] : t.entries) {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : coeffs) cs.push_back(c.str());
        brackets.push_back({{"lhs", t.labels[key.first]},
                            {"rhs", t.labels[key.second]},
                            {"coeffs", cs}});
      }
      j["brackets"] = brackets;
      return j.dump() + "\n";
    }
    case Format::Latex:
      fail("SyntaxError", "latex output covers coframe, cartan and lie only");
  }
  fail("Internal", "unreachable");
}

std::string coframe_report(const Options& o) {
  CRModel m = resolve_model(o);
  Frame f = build_frame(m);
  StructureEquationSet s = dual_structure(f, commutator_table(f));
  switch (parse_format(o.format)) {
    case Format::Text:
      return s.str();
    case Format::Json:
      return nlohmann::json{{"equations", equations_json(s)}}.dump() + "\n";
    case Format::Latex:
      return s.latex();
  }
  fail("Internal", "unreachable");
}

std::string cartan_report(const Options& o) {
  CRModel m = resolve_model(o);
  bool both = false;
  int eps = parse_branch(o.branch, &both);
  CartanRun run = run_cartan(m, o.branch.empty() ? 0 : eps);
  if (both) {
    CartanRun other = run_cartan(m, -1);
    if (!(other.reformed.invariants == run.reformed.invariants) ||
        !(other.reformed.canonical.d == run.reformed.canonical.d))
      fail("Internal", "the two sign branches disagree");
  }
  switch (parse_format(o.format)) {
    case Format::Text: {
      std::vector<std::string> names;
      for (int i = 0; i < run.structure.eq.frame->size(); ++i)
        names.push_back(run.structure.eq.frame->name(i));
      std::string out;
      out += "== lifted structure ==\n" + run.structure.eq.str();
      out += "torsions:\n" + run.structure.torsion.str(names);
      out += "== absorbed ==\nresidual torsions:\n" + run.absorption.residual.str(names);
      out += "== normalized ==\n" + run.reduced.str();
      out += "== prolonged ==\n" + run.prolonged.str();
      out += "== reformed ==\n" + run.reformed.canonical.str();
      for (const auto& [k, v] : run.reformed.invariants) out += k + " = " + v.str() + "\n";
      for (const auto& n : run.reformed.notes) out += "note: " + n + "\n";
      if (both) out += "note: both sign branches agree\n";
      return out;
    }
    case Format::Json: {
      nlohmann::json stages = nlohmann::json::array();
      for (const auto& [name, dump] : run.stages) {
        (void)name;
        stages.push_back(nlohmann::json::parse(dump));
      }
      return nlohmann::json{{"stages", stages}}.dump() + "\n";
    }
    case Format::Latex: {
      std::string out;
      out += "% lifted structure\n" + run.structure.eq.latex();
      out += "% normalized\n" + run.reduced.latex();
      out += "% prolonged\n" + run.prolonged.latex();
      out += "% reformed\n" + run.reformed.canonical.latex();
      return out;
    }
  }
  fail("Internal", "unreachable");
}

std::string lie_report(const Options& o) {
  CRModel m = resolve_model(o);
  LieRun run = run_lie(m);
  switch (parse_format(o.format)) {
    case Format::Text: {
      std::string out;
      out += "== dual equations ==\n" + run.dual.str();
      out += "== reduced ==\n" + run.mixed.str();
      out += "== canonical ==\n" + run.canonical.str();
      for (const auto& [k, v] : run.invariants) out += k + " = " + v.str() + "\n";
      return out;
    }
    case Format::Json: {
      nlohmann::json stages = nlohmann::json::array();
      for (const auto& [name, dump] : run.stages) {
        (void)name;
        stages.push_back(nlohmann::json::parse(dump));
      }
      nlohmann::json inv;
      for (const auto& [k, v] : run.invariants) inv[k] = v.str();
      return nlohmann::json{{"invariants", inv}, {"stages", stages}}.dump() + "\n";
    }
    case Format::Latex: {
      std::string out;
      out += "% dual equations\n" + run.dual.latex();
      out += "% reduced\n" + run.mixed.latex();
      out += "% canonical\n" + run.canonical.latex();
      return out;
    }
  }
  fail("Internal", "unreachable");
}

std::string invariant_report(const Options& o) {
  CRModel m = resolve_model(o);
  Pipeline p = parse_pipeline(o.pipeline);
  bool both = false;
  parse_branch(o.branch, &both);
  if (!o.branch.empty() && p != Pipeline::Cartan)
    fail("SyntaxError", "branch selection applies to the cartan pipeline only");
  InvariantReport rep = invariant(m, p);
  if (both && rep.cls != InvariantClass::M01) {
    CartanRun plus = run_cartan(m, +1);
    CartanRun minus = run_cartan(m, -1);
    if (!(plus.reformed.invariants == minus.reformed.invariants) ||
        !(plus.reformed.canonical.d == minus.reformed.canonical.d))
      fail("Internal", "the two sign branches disagree");
    if (rep.cls == InvariantClass::Generic &&
        !(plus.reformed.invariants.at("R") == rep.invariant))
      fail("Internal", "the sign branches disagree with the report");
  }
  switch (parse_format(o.format)) {
    case Format::Text:
      return rep.str();
    case Format::Json:
      return rep.json() + "\n";
    case Format::Latex:
      fail("SyntaxError", "latex output covers coframe, cartan and lie only");
  }
  fail("Internal", "unreachable");
}

std::string equiv_report(const Options& o) {
  CRModel m1 = resolve_slot(o.m1);
  CRModel m2 = resolve_slot(o.m2);
  EquivalenceCertificate cert = decide_equivalence(m1, m2, parse_pipeline(o.pipeline));
  switch (parse_format(o.format)) {
    case Format::Text:
      return cert.str();
    case Format::Json:
      return cert.json() + "\n";
    case Format::Latex:
      fail("SyntaxError", "latex output covers coframe, cartan and lie only");
  }
  fail("Internal", "unreachable");
}

std::string oracle_report(const Options& o) {
  CRModel m = resolve_model(o);
  std::uint64_t seed = o.seed;
  if (const char* env = std::getenv("CR_MODULI_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      fail("SyntaxError", "CR_MODULI_SEED must be an unsigned integer");
    }
  }
  OracleReport rep = invariance_oracle(m, o.samples, seed);
  switch (parse_format(o.format)) {
    case Format::Text:
      return rep.str();
    case Format::Json:
      return rep.json() + "\n";
    case Format::Latex:
      fail("SyntaxError", "latex output covers coframe, cartan and lie only");
  }
  fail("Internal", "unreachable");
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model_file, "model description file");
  cmd->add_option("--builtin", o.builtin, "builtin family name (m14)");
  cmd->add_option("--a", o.a_text, "cubic coefficient, exact complex rational like 1+1i");
  cmd->add_option("--b", o.b_text, "balanced coefficient, exact real rational");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "text, json or latex");
  cmd->add_option("--output", o.output, "write the report to this file instead of stdout");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"exact equivalence engine for cubic model surfaces"};
  app.name("cr-moduli");
  app.require_subcommand(1);

  CLI::App* frame = app.add_subcommand("frame", "print the bracket-generated frame");
  add_model_flags(frame, o);
  add_output_flags(frame, o);

  CLI::App* table = app.add_subcommand("table", "print the commutator table");
  add_model_flags(table, o);
  add_output_flags(table, o);

  CLI::App* coframe = app.add_subcommand("coframe", "print the dual structure equations");
  add_model_flags(coframe, o);
  add_output_flags(coframe, o);

  CLI::App* cartan =
      app.add_subcommand("cartan", "stage-by-stage equivalence reduction dump");
  add_model_flags(cartan, o);
  add_output_flags(cartan, o);
  cartan->add_option("--branch", o.branch, "sign branch: +1, -1 or both");

  CLI::App* lie = app.add_subcommand("lie", "symmetry algebra reduction dump");
  add_model_flags(lie, o);
  add_output_flags(lie, o);

  CLI::App* inv = app.add_subcommand("invariant", "classify one model");
  add_model_flags(inv, o);
  add_output_flags(inv, o);
  inv->add_option("--pipeline", o.pipeline, "cartan or lie");
  inv->add_option("--branch", o.branch, "sign branch: +1, -1 or both");

  CLI::App* equiv = app.add_subcommand("equiv", "decide equivalence of two models");
  equiv->add_option("--m1", o.m1, "first model: a=<rat>,b=<rat> or a file")->required();
  equiv->add_option("--m2", o.m2, "second model: a=<rat>,b=<rat> or a file")->required();
  equiv->add_option("--pipeline", o.pipeline, "cartan or lie");
  add_output_flags(equiv, o);

  CLI::App* oracle =
      app.add_subcommand("oracle", "random transformations must preserve the report");
  add_model_flags(oracle, o);
  add_output_flags(oracle, o);
  oracle->add_option("--samples", o.samples, "number of random transformations");
  oracle->add_option("--seed", o.seed, "generator seed (CR_MODULI_SEED overrides)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"error", {{"kind", "UsageError"}, {"message", e.what()}}}}.dump()
        << "\n";
    return 1;
  }

  try {
    std::string report;
    if (frame->parsed())
      report = frame_report(o);
    else if (table->parsed())
      report = table_report(o);
    else if (coframe->parsed())
      report = coframe_report(o);
    else if (cartan->parsed())
      report = cartan_report(o);
    else if (lie->parsed())
      report = lie_report(o);
    else if (inv->parsed())
      report = invariant_report(o);
    else if (equiv->parsed())
      report = equiv_report(o);
    else
      report = oracle_report(o);
    emit(o, out, report);
    return 0;
  } catch (const Error& e) {
    err << nlohmann::json{{"error", {{"kind", e.kind}, {"message", e.what()}}}}.dump()
        << "\n";
    return e.kind == "SyntaxError" ? 1 : 2;
  }
}

}  // namespace crmoduli
