#include "crmoduli/moduli.hpp"

#include <json.hpp>

#include <mutex>
#include <random>

namespace crmoduli {

namespace {

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

std::string stage_json(const std::string& stage, const StructureEquationSet& s,
                       const nlohmann::json& assignments) {
  nlohmann::json j = {{"stage", stage},
                      {"equations", equations_json(s)},
                      {"torsions", nlohmann::json::object()},
                      {"assignments", assignments}};
  return j.dump();
}

Scalar slot(const StructureEquationSet& s, int eq, std::vector<int> idx) {
  CoordRat c = s.d.at(eq).coefficient(std::move(idx));
  if (!c.is_constant())
    fail("Internal", "expected a parameter coefficient in d(" + s.frame->name(eq) + ")");
  return c.constant_value();
}

// Reads the invariant out of the canonical coframe set and cross checks the
// two slots that must carry it in lockstep.
Scalar cartan_invariant(const CartanRun& run) {
  const StructureEquationSet& can = run.reformed.canonical;
  int isb = can.frame->index("sigmabar");
  int izt = can.frame->index("zeta");
  int izb = can.frame->index("zetabar_new");
  Scalar r1 = slot(can, can.frame->index("mu_new"), {isb, izb});
  Scalar r2 = slot(can, can.frame->index("rhobar_new"), {izt, izb});
  if (!(r2 == Scalar::i() * r1))
    fail("Internal", "the two canonical invariant slots disagree");
  if (!(r1 == run.reformed.invariants.at("R")))
    fail("Internal", "the canonical slots disagree with the recorded invariant");
  return r1;
}

std::mutex memo_mutex;
std::map<std::string, InvariantReport> memo_cache;

std::string memo_key(const Scalar& a, const Scalar& b, Pipeline p) {
  return a.str() + "|" + b.str() + "|" + to_string(p);
}

}  // namespace

std::string to_string(InvariantClass c) {
  switch (c) {
    case InvariantClass::Generic: return "generic";
    case InvariantClass::B0: return "B0";
    case InvariantClass::M01: return "M01";
  }
  fail("Internal", "unknown invariant class");
}

std::string to_string(Pipeline p) {
  return p == Pipeline::Cartan ? "cartan" : "lie";
}

std::string InvariantReport::str() const {
  std::string out = "class: " + to_string(cls) + "\n";
  out += "invariant: ";
  out += cls == InvariantClass::Generic ? invariant.str() : "none";
  out += "\npipeline: " + to_string(pipeline) + "\n";
  out += "trail:\n";
  for (const auto& line : trail) out += "  - " + line + "\n";
  return out;
}

std::string InvariantReport::json() const {
  nlohmann::json j;
  j["class"] = to_string(cls);
  if (cls == InvariantClass::Generic) j["invariant"] = invariant.str();
  return j.dump();
}

LieRun run_lie(const CRModel& m) {
  auto fam = family_parameters(m);
  if (!fam) fail("DegenerateModel", "the symmetry pipeline runs on family members only");
  const Scalar& av = fam->first;
  const Scalar& bv = fam->second;
  if (av.is_zero() && bv.is_zero())
    fail("DegenerateModel", "a = 0 and b = 0 is not totally nondegenerate");

  LieRun run;
  run.dual = maurer_cartan(builtin_g_rb(), g_rb_dual_names(), g_rb_dual_latex());
  run.mixed = rescale_chain(run.dual, g_rb_reduction_chain());
  run.stages.emplace_back("dual", stage_json("dual", run.dual, nlohmann::json::object()));
  run.stages.emplace_back("reduced",
                          stage_json("reduced", run.mixed, nlohmann::json::object()));

  if (bv.is_zero()) {
    // The mixing chain stops early: with b = 0 a single scaling of mu already
    // lands on a constant coframe, so there is nothing left to normalize.
    StructureEquationSet flat = map_coeffs(run.mixed, [](const Scalar& s) {
      return s.substitute({{param::b, Scalar(0)}});
    });
    BasisChange fin = BasisChange::identity(6);
    fin.set(0, 0, Scalar(3) * Scalar::param(param::r));
    fin.rename(0, "mu_new", "\\mu^{\\rm new}");
    run.canonical = rescale_chain(flat, {fin});
    for (const auto& [i, f] : run.canonical.d) {
      (void)i;
      for (const auto& [idx, c] : f.terms()) {
        (void)idx;
        if (!c.is_constant())
          fail("Internal", "the decoupled symmetry coframe kept a parameter");
      }
    }
    if (!(slot(run.canonical, 0, {4, 1}) == Scalar(1)) ||
        !(slot(run.canonical, 0, {5, 2}) == Scalar(-1)) ||
        !(slot(run.canonical, 1, {5, 3}) == Scalar(-2)) ||
        !(slot(run.canonical, 2, {4, 3}) == Scalar(2)) ||
        !(slot(run.canonical, 3, {4, 5}) == Scalar(-2)))
      fail("Internal", "the decoupled symmetry coframe has the wrong constants");
    run.stages.emplace_back(
        "canonical", stage_json("canonical", run.canonical, nlohmann::json::object()));
    return run;
  }

  StructureEquationSet s3 = rescale_chain(run.mixed, {g_rb_final_change()});
  s3 = swap_equation(s3, 3, "rho_new", g_rb_rho_swap_factor(), "\\rho^{\\rm new}");
  run.canonical =
      map_coeffs(s3, [](const Scalar& s) { return s.rewrite_r_square(); });

  Scalar c1 = slot(run.canonical, 0, {4, 1});
  Scalar c2 = slot(run.canonical, 2, {4, 3});
  if (!(c2 == Scalar(2) * c1))
    fail("Internal", "the two symmetry invariant slots left their ratio");
  if (!(slot(run.canonical, 6, {4, 5}) == Scalar(-2)))
    fail("Internal", "the swapped equation lost its constant");
  Scalar r_sym = Scalar(GaussianRational(BigRat(4, 9))) * c1;
  Scalar r_val = r_sym.substitute({{param::a, av}, {param::b, bv}});
  run.invariants["R"] = r_val;
  run.stages.emplace_back(
      "canonical", stage_json("canonical", run.canonical, {{"R", r_val.str()}}));
  return run;
}

InvariantReport invariant(const CRModel& m, Pipeline pipeline) {
  auto fam = family_parameters(m);
  if (!fam) fail("DegenerateModel", "no invariant is defined outside the built-in family");
  const Scalar& a = fam->first;
  const Scalar& b = fam->second;
  if (a.is_zero() && b.is_zero())
    fail("DegenerateModel", "a = 0 and b = 0 is not totally nondegenerate");

  const std::string key = memo_key(a, b, pipeline);
  {
    std::lock_guard<std::mutex> lock(memo_mutex);
    auto it = memo_cache.find(key);
    if (it != memo_cache.end()) return it->second;
  }

  InvariantReport rep;
  rep.pipeline = pipeline;
  if (b.is_zero()) {
    rep.cls = InvariantClass::B0;
    rep.trail.push_back("class B0: the balanced coefficient vanishes");
    if (pipeline == Pipeline::Cartan) {
      CartanRun run = run_cartan(m);
      if (run.b_nonzero || !run.reformed.invariants.empty())
        fail("Internal", "the decoupled branch produced an invariant");
      rep.trail.push_back(
          "pipeline cartan: lift, absorb, normalize, prolong, reform");
      rep.trail.push_back(
          "reformation decouples the equations into a constant coframe");
    } else {
      LieRun run = run_lie(m);
      if (!run.invariants.empty())
        fail("Internal", "the decoupled branch produced an invariant");
      rep.trail.push_back(
          "pipeline lie: dual equations, reduction chain, one scaling");
      rep.trail.push_back(
          "the reduced equations close with constant coefficients");
    }
    rep.trail.push_back("every model in the class shares this coframe; no scalar invariant remains");
  } else if (a.is_zero()) {
    rep.cls = InvariantClass::M01;
    ModelTransform t{ModelTransform::W4Rescale, Scalar(1) / b};
    CRModel ref = transform_model(m, t);
    auto fp = family_parameters(ref);
    if (!fp || !fp->first.is_zero() || !(fp->second == Scalar(1)))
      fail("Internal", "the rescale onto the reference member failed");
    rep.trail.push_back("class M01: the cubic coefficient vanishes");
    rep.trail.push_back("w4 rescale by " + t.value.str() +
                        " lands on the reference member a = 0, b = 1");
    rep.trail.push_back(
        "the class has a single member up to equivalence; no scalar invariant remains");
  } else {
    rep.cls = InvariantClass::Generic;
    rep.trail.push_back("class generic: both family coefficients are nonzero");
    if (pipeline == Pipeline::Cartan) {
      CartanRun run = run_cartan(m);
      rep.invariant = cartan_invariant(run);
      rep.trail.push_back(
          "pipeline cartan: lift, absorb, normalize, prolong, reform");
      rep.trail.push_back(
          "d(mu_new)[sigmabar, zetabar_new] and d(rhobar_new)[zeta, zetabar_new] carry the value in lockstep");
    } else {
      LieRun run = run_lie(m);
      rep.invariant = run.invariants.at("R");
      rep.trail.push_back(
          "pipeline lie: dual equations, reduction chain, final rescale, conjugate swap");
      rep.trail.push_back(
          "d(mu_new)[zeta, sigma] and d(sigmat)[zeta, rho] carry the value in ratio two");
    }
    rep.trail.push_back("R = " + rep.invariant.str());
  }

  std::lock_guard<std::mutex> lock(memo_mutex);
  memo_cache.emplace(key, rep);
  return rep;
}

std::string EquivalenceCertificate::str() const {
  std::string out = equivalent ? "Equivalent" : "NotEquivalent";
  out += "\n";
  for (const auto& line : witness_chain) out += "  " + line + "\n";
  return out;
}

std::string EquivalenceCertificate::json() const {
  nlohmann::json j;
  j["verdict"] = equivalent ? "Equivalent" : "NotEquivalent";
  j["class1"] = class1;
  j["class2"] = class2;
  j["invariant1"] = invariant1;
  j["invariant2"] = invariant2;
  j["witness_chain"] = witness_chain;
  return j.dump();
}

EquivalenceCertificate decide_equivalence(const CRModel& m1, const CRModel& m2,
                                          Pipeline pipeline) {
  InvariantReport r1 = invariant(m1, pipeline);
  InvariantReport r2 = invariant(m2, pipeline);

  EquivalenceCertificate cert;
  cert.class1 = to_string(r1.cls);
  cert.class2 = to_string(r2.cls);
  if (r1.cls == InvariantClass::Generic) cert.invariant1 = r1.invariant.str();
  if (r2.cls == InvariantClass::Generic) cert.invariant2 = r2.invariant.str();
  cert.witness_chain.push_back("class " + cert.class1 + " vs class " + cert.class2);

  if (r1.cls != r2.cls) {
    cert.equivalent = false;
    cert.witness_chain.push_back("models in different classes are never equivalent");
    return cert;
  }
  switch (r1.cls) {
    case InvariantClass::Generic:
      cert.witness_chain.push_back("invariant " + cert.invariant1 + " vs " +
                                   cert.invariant2);
      cert.equivalent = r1.invariant == r2.invariant;
      cert.witness_chain.push_back(
          cert.equivalent ? "equal invariants identify equivalent generic models"
                          : "an equivalence preserves the invariant; the values differ");
      break;
    case InvariantClass::B0:
      cert.equivalent = true;
      cert.witness_chain.push_back("both models reduce to the shared constant coframe");
      break;
    case InvariantClass::M01:
      cert.equivalent = true;
      cert.witness_chain.push_back(
          "both models rescale onto the reference member a = 0, b = 1");
      break;
  }
  return cert;
}

std::string ModelTransform::str() const {
  switch (kind) {
    case Rotation: return "rotation with squared factor " + value.str();
    case RealScaling: return "real scaling by " + value.str();
    case W4Rescale: return "w4 rescale by " + value.str();
  }
  fail("Internal", "unknown transformation kind");
}

ModelTransform rotation_from_pythagorean(long m, long n) {
  if (m == 0 && n == 0) fail("NotAdmissible", "a rotation needs a nonzero pair");
  BigRat den(m * m + n * n);
  GaussianRational q(BigRat(m * m - n * n) / den, BigRat(2 * m * n) / den);
  return {ModelTransform::Rotation, Scalar(q)};
}

CRModel transform_model(const CRModel& m, const ModelTransform& t) {
  if (!family_parameters(m))
    fail("NotAdmissible", "transformations are defined on the built-in family only");
  if (!t.value.is_constant())
    fail("NotAdmissible", "the transformation factor must be numeric");

  int zi = m.space()->index("z");
  int zbi = m.space()->index("conj(z)");
  std::vector<CoordPoly> rhs;
  rhs.reserve(m.codimension());
  for (int j = 1; j <= m.codimension(); ++j) rhs.push_back(m.rhs(j));

  switch (t.kind) {
    case ModelTransform::Rotation: {
      if (!(t.value * t.value.conj() == Scalar(1)))
        fail("NotAdmissible", "the squared rotation factor must lie on the unit circle");
      // z picks up a square root of the stored factor, so a monomial with
      // z-degree p and conj(z)-degree q is scaled by value^{(p-q)/2}. Rows
      // where p - q is odd would need the root itself; the rotation induced
      // on their target plane cancels it again, so those rows stay put.
      for (CoordPoly& p : rhs) {
        bool balanced = true;
        for (const auto& [mono, c] : p.terms()) {
          (void)c;
          if ((mono.exponent(zi) - mono.exponent(zbi)) % 2 != 0) {
            balanced = false;
            break;
          }
        }
        if (!balanced) continue;
        CoordPoly twisted = p.zero_like();
        for (const auto& [mono, c] : p.terms()) {
          int d = mono.exponent(zi) - mono.exponent(zbi);
          Scalar f = d >= 0 ? t.value.pow(d / 2) : t.value.conj().pow(-d / 2);
          twisted.add_term(mono, c * f);
        }
        p = twisted;
      }
      break;
    }
    case ModelTransform::RealScaling: {
      if (!t.value.is_real() || t.value.is_zero())
        fail("NotAdmissible", "the scaling factor must be real and nonzero");
      // z -> lam z with w_j -> lam^{w_j} w_j scales each monomial of P_j by
      // lam^{p+q-w_j}; on a weighted homogeneous row that exponent vanishes.
      for (const CoordPoly& p : rhs) {
        auto w = p.homogeneous_weight();
        if (!w) fail("NotAdmissible", "real scaling needs weighted homogeneous rows");
        for (const auto& [mono, c] : p.terms()) {
          (void)c;
          if (mono.exponent(zi) + mono.exponent(zbi) != *w)
            fail("NotAdmissible", "real scaling needs weighted homogeneous rows");
        }
      }
      break;
    }
    case ModelTransform::W4Rescale: {
      if (!t.value.is_real() || t.value.is_zero())
        fail("NotAdmissible", "the rescale factor must be real and nonzero");
      rhs[3] = rhs[3].scale(t.value);
      break;
    }
  }

  CRModel out(m.name(), m.cr_dimension(), m.codimension(), m.params(), m.space(),
              std::move(rhs));
  if (!family_parameters(out))
    fail("Internal", "the transformed model left the family");
  return out;
}

namespace {

long pick(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

ModelTransform random_transform(std::mt19937_64& rng) {
  switch (pick(rng, 0, 2)) {
    case 0:
      return rotation_from_pythagorean(pick(rng, 1, 9), pick(rng, 0, 9));
    case 1: {
      long num = pick(rng, 0, 1) == 0 ? pick(rng, 1, 9) : -pick(rng, 1, 9);
      return {ModelTransform::RealScaling,
              Scalar(GaussianRational(BigRat(num, pick(rng, 1, 9))))};
    }
    default: {
      long num = pick(rng, 0, 1) == 0 ? pick(rng, 1, 9) : -pick(rng, 1, 9);
      return {ModelTransform::W4Rescale,
              Scalar(GaussianRational(BigRat(num, pick(rng, 1, 9))))};
    }
  }
}

}  // namespace

std::string OracleReport::str() const {
  std::string out = "oracle: " + std::to_string(samples) + " samples, seed " +
                    std::to_string(seed) + "\n";
  out += "base report: " + base.json() + "\n";
  for (const auto& line : log) out += "  " + line + "\n";
  out += "verdict: pass\n";
  return out;
}

std::string OracleReport::json() const {
  nlohmann::json j;
  j["samples"] = samples;
  j["seed"] = seed;
  j["base"] = nlohmann::json::parse(base.json());
  j["log"] = log;
  j["verdict"] = "pass";
  return j.dump();
}

OracleReport invariance_oracle(const CRModel& m, int samples, std::uint64_t seed) {
  if (samples < 1) fail("SyntaxError", "the oracle needs at least one sample");
  auto fam = family_parameters(m);
  if (!fam) fail("DegenerateModel", "the oracle runs on family members only");
  if (!fam->first.is_constant() || !fam->second.is_constant())
    fail("SyntaxError", "the oracle needs numeric family coefficients");

  OracleReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.base = invariant(m, Pipeline::Cartan);
  if (invariant(m, Pipeline::Lie) != rep.base)
    fail("OracleViolation", "the two pipelines disagree on the base model");
  rep.log.push_back("base: both pipelines report " + rep.base.json());

  std::mt19937_64 rng(seed);
  for (int i = 1; i <= samples; ++i) {
    ModelTransform t = random_transform(rng);
    CRModel moved = transform_model(m, t);
    auto moved_fam = family_parameters(moved);
    InvariantReport r = invariant(moved, Pipeline::Lie);
    bool deep = i % 10 == 1;
    if (deep && invariant(moved, Pipeline::Cartan) != r)
      fail("OracleViolation",
           "the two pipelines disagree at sample " + std::to_string(i));
    if (r != rep.base)
      fail("OracleViolation", "sample " + std::to_string(i) + " (" + t.str() +
                                  ") moved the report from " + rep.base.json() +
                                  " to " + r.json());
    if (!decide_equivalence(m, moved, Pipeline::Lie).equivalent)
      fail("OracleViolation", "sample " + std::to_string(i) + " (" + t.str() +
                                  ") broke the equivalence verdict");
    rep.log.push_back("sample " + std::to_string(i) + ": " + t.str() +
                      " -> (a, b) = (" + moved_fam->first.str() + ", " +
                      moved_fam->second.str() + "): report preserved" +
                      (deep ? " [full coframe pipeline agreed]" : ""));
  }
  return rep;
}

}  // namespace crmoduli
