#pragma once

// Classification of the built-in model family up to biholomorphic
// equivalence: invariant reports, an equivalence decision procedure with
// certificates, exact model transformations, and a randomized oracle that
// checks the invariant never moves under admissible transformations.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crmoduli/algebra.hpp"
#include "crmoduli/cartan.hpp"
#include "crmoduli/exterior.hpp"
#include "crmoduli/liealg.hpp"
#include "crmoduli/model.hpp"

namespace crmoduli {

// Where a family model lands once both reductions are done. Generic models
// (a != 0, b != 0) carry one scalar invariant; the b = 0 models share a
// single constant coframe; the a = 0 models all rescale onto the reference
// member with a = 0, b = 1.
enum class InvariantClass { Generic, B0, M01 };

enum class Pipeline { Cartan, Lie };

std::string to_string(InvariantClass c);
std::string to_string(Pipeline p);

struct InvariantReport {
  InvariantClass cls = InvariantClass::Generic;
  Scalar invariant;  // meaningful only when cls == Generic
  Pipeline pipeline = Pipeline::Cartan;
  std::vector<std::string> trail;

  // Two reports agree when they place their models in the same class with
  // the same invariant value; how they were computed does not matter.
  bool operator==(const InvariantReport& o) const {
    return cls == o.cls &&
           (cls != InvariantClass::Generic || invariant == o.invariant);
  }
  bool operator!=(const InvariantReport& o) const { return !(*this == o); }

  std::string str() const;
  std::string json() const;
};

// Classifies the model and, on the generic branch, extracts the invariant
// from the canonical structure equations of the requested pipeline. Results
// are memoized per (family parameters, pipeline) for the process lifetime.
InvariantReport invariant(const CRModel& m, Pipeline pipeline = Pipeline::Cartan);

struct EquivalenceCertificate {
  bool equivalent = false;
  std::string class1, class2;
  std::string invariant1, invariant2;  // empty on a branch with no invariant
  std::vector<std::string> witness_chain;

  std::string str() const;
  std::string json() const;
};

EquivalenceCertificate decide_equivalence(const CRModel& m1, const CRModel& m2,
                                          Pipeline pipeline = Pipeline::Cartan);

// An exact self-map of the family. Rotation stores the squared unit factor
// (so the circle point stays rational), RealScaling the nonzero real factor
// applied to z, W4Rescale the nonzero real factor applied to the last
// defining equation.
struct ModelTransform {
  enum Kind { Rotation, RealScaling, W4Rescale };
  Kind kind = Rotation;
  Scalar value;

  std::string str() const;
};

// The squared factor ((m^2 - n^2) + 2mn i)/(m^2 + n^2) of an exact unit
// rotation built from a Pythagorean pair.
ModelTransform rotation_from_pythagorean(long m, long n);

// Applies the transformation and returns the transformed family model.
// Fails with NotAdmissible when the factor is out of range or the model is
// not a member of the family.
CRModel transform_model(const CRModel& m, const ModelTransform& t);

// The graded symmetry algebra pipeline: dual equations of the builtin
// algebra, the mixing chain, and the final rescale with the conjugate swap
// that exposes the invariant. For a model with b = 0 the chain ends in a
// constant coframe instead and `invariants` stays empty.
struct LieRun {
  StructureEquationSet dual;
  StructureEquationSet mixed;
  StructureEquationSet canonical;
  std::map<std::string, Scalar> invariants;
  std::vector<std::pair<std::string, std::string>> stages;  // (name, json)
};

LieRun run_lie(const CRModel& m);

struct OracleReport {
  int samples = 0;
  std::uint64_t seed = 0;
  InvariantReport base;
  std::vector<std::string> log;

  std::string str() const;
  std::string json() const;
};

// Draws `samples` random admissible transformations of m and insists that
// the invariant report and the equivalence verdict never move. Every sample
// is checked through the symmetry-algebra pipeline; every tenth sample also
// reruns the full coframe pipeline. Fails with OracleViolation on the first
// mismatch.
OracleReport invariance_oracle(const CRModel& m, int samples,
                               std::uint64_t seed);

}  // namespace crmoduli
