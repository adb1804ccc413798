#include "crmoduli/vecfield.hpp"

#include <sstream>

#include "crmoduli/detail/linsolve.hpp"

namespace crmoduli {

VectorField VectorField::basis(CoordSpacePtr sp, int i) {
  VectorField v(sp);
  v.set_coeff(i, CoordRat(v.sp_, Scalar(1)));
  return v;
}

CoordRat VectorField::coeff(int i) const {
  auto it = c_.find(i);
  return it == c_.end() ? CoordRat(sp_, Scalar(0)) : it->second;
}

void VectorField::set_coeff(int i, CoordRat v) {
  if (i < 0 || (sp_ && i >= sp_->size())) fail("Internal", "coordinate index out of range");
  if (v.is_zero())
    c_.erase(i);
  else
    c_[i] = std::move(v);
}

VectorField VectorField::operator+(const VectorField& o) const {
  VectorField r = *this;
  for (const auto& [i, v] : o.c_) r.set_coeff(i, r.coeff(i) + v);
  return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
  VectorField r = *this;
  for (const auto& [i, v] : o.c_) r.set_coeff(i, r.coeff(i) - v);
  return r;
}

VectorField VectorField::operator-() const { return scale(Scalar(-1)); }

VectorField VectorField::scale(const CoordRat& f) const {
  VectorField r(sp_);
  for (const auto& [i, v] : c_) r.set_coeff(i, v * f);
  return r;
}

VectorField VectorField::scale(const Scalar& s) const {
  return scale(CoordRat(sp_, s));
}

VectorField VectorField::conj() const {
  // conj . d/dx . conj is again a coordinate derivation: on a coordinate y
  // it gives conj(d conj(y)/dx), which is conj(unit of the partner of x)
  // when y is that partner and zero otherwise.
  VectorField r(sp_);
  for (const auto& [i, v] : c_) {
    int p = sp_->conj(i);
    r.set_coeff(p, v.conj().scale(sp_->conj_unit(p).conj()));
  }
  return r;
}

CoordRat VectorField::apply(const CoordRat& f) const {
  CoordRat acc(sp_, Scalar(0));
  for (const auto& [i, v] : c_) acc = acc + v * f.diff(i);
  return acc;
}

VectorField VectorField::into(const CoordSpacePtr& target) const {
  if (sp_ == target) return *this;
  if (!sp_ || !target || !sp_->same_layout(*target))
    fail("Internal", "vector field transplant needs an identical layout");
  VectorField r(target);
  for (const auto& [i, v] : c_) r.set_coeff(i, v.substitute({}, target));
  return r;
}

std::string VectorField::str() const {
  if (c_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [i, v] : c_) {
    std::string piece;
    std::string var = "d/d" + sp_->name(i);
    if (v == CoordRat(sp_, Scalar(1)))
      piece = var;
    else if (v == CoordRat(sp_, Scalar(-1)))
      piece = "-" + var;
    else
      piece = "(" + v.str() + ")*" + var;
    if (first) {
      out << piece;
      first = false;
    } else if (!piece.empty() && piece[0] == '-') {
      out << " - " << piece.substr(1);
    } else {
      out << " + " << piece;
    }
  }
  return out.str();
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.space() && y.space() && x.space() != y.space())
    fail("Internal", "lie bracket needs both fields on one space");
  const CoordSpacePtr& sp = x.space() ? x.space() : y.space();
  VectorField r(sp);
  for (const auto& [i, v] : y.coeffs()) r.set_coeff(i, r.coeff(i) + x.apply(v));
  for (const auto& [i, v] : x.coeffs()) r.set_coeff(i, r.coeff(i) - y.apply(v));
  return r;
}

VectorField cr_generator(const CRModel& m) {
  const CoordSpacePtr& sp = m.space();
  int zi = sp->index("z");
  VectorField l(sp);
  l.set_coeff(zi, CoordRat(sp, Scalar(1)));
  Scalar half(GaussianRational(BigRat(1, 2)));
  for (int j = 1; j <= m.codimension(); ++j) {
    CoordPoly a = m.rhs(j).diff(zi);  // extrinsic d/dw_j coefficient
    int uj = sp->index("u" + std::to_string(j));
    l.set_coeff(uj, CoordRat(a.map_coeffs([&](const Scalar& c) { return c * half; })));
  }
  return l;
}

int Frame::index_of(const std::string& label) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

const VectorField& Frame::by_label(const std::string& label) const {
  int i = index_of(label);
  if (i < 0) fail("Internal", "no frame field labeled " + label);
  return fields[i];
}

std::string Frame::str() const {
  std::ostringstream out;
  for (size_t i = 0; i < fields.size(); ++i)
    out << labels[i] << " = " << fields[i].str() << '\n';
  return out.str();
}

Frame build_frame(const CRModel& m) {
  if (m.codimension() != 4)
    fail("DegenerateModel", "the bracket frame recipe applies to type (1,4)");
  const CoordSpacePtr& sp = m.space();

  VectorField l = cr_generator(m);
  VectorField lb = l.conj();
  VectorField t = lie_bracket(l, lb).scale(Scalar::i());
  VectorField s = lie_bracket(l, t);
  VectorField sb = lie_bracket(lb, t);

  // first nonvanishing length-four bracket, rescaled real
  VectorField u(sp);
  int u4 = sp->index("u4");
  for (const VectorField* cand :
       {&l, &lb}) {  // [l or lb, s or sb], in the fixed order below
    for (const VectorField* snd : {&s, &sb}) {
      VectorField b = lie_bracket(*cand, *snd);
      if (b.is_zero()) continue;
      if (b.coeffs().size() == 1 && b.coeffs().count(u4) &&
          b.coeff(u4).is_constant()) {
        // single constant component: rescale to the real convention 12
        u = b.scale(CoordRat(sp, Scalar(12)) / b.coeff(u4));
      } else if (b.conj() == b) {
        u = b;
      } else {
        continue;
      }
      break;
    }
    if (!u.is_zero()) break;
  }
  if (u.is_zero())
    fail("DegenerateModel", "no length-four bracket direction: " + m.name() +
                                " is not totally nondegenerate");

  Frame f;
  f.space = sp;
  f.labels = {"L", "Lbar", "T", "S", "Sbar", "U"};
  f.fields = {l, lb, t, s, sb, u};

  std::vector<std::vector<CoordRat>> mat;
  for (const VectorField& v : f.fields) {
    std::vector<CoordRat> row;
    for (int i = 0; i < sp->size(); ++i) row.push_back(v.coeff(i));
    mat.push_back(std::move(row));
  }
  f.independence = detail::determinant(mat);
  if (f.independence.is_zero())
    fail("DegenerateModel", "frame fields are linearly dependent");
  return f;
}

std::vector<CoordRat> decompose(const VectorField& x, const Frame& f) {
  if (!x.space() || !f.space || !x.space()->same_layout(*f.space))
    fail("NotInSpan", "vector field lives on a different coordinate space");
  VectorField xx = x.into(f.space);

  // one equation per coordinate: sum_j c_j * field_j[i] = x[i]
  std::vector<std::vector<CoordRat>> a;
  std::vector<CoordRat> rhs;
  for (int i = 0; i < f.space->size(); ++i) {
    std::vector<CoordRat> row;
    for (const VectorField& v : f.fields) row.push_back(v.coeff(i));
    a.push_back(std::move(row));
    rhs.push_back(xx.coeff(i));
  }
  auto sol = detail::linear_solve(a, rhs);
  if (!sol) fail("NotInSpan", "vector field is outside the frame span");

  VectorField rebuilt(f.space);
  for (size_t j = 0; j < f.fields.size(); ++j)
    rebuilt = rebuilt + f.fields[j].scale((*sol)[j]);
  if (!(rebuilt == xx)) fail("NotInSpan", "residual after decomposition is nonzero");
  return *sol;
}

std::vector<CoordRat> StructureFunctions::bracket(int i, int j) const {
  size_t n = labels.size();
  std::vector<CoordRat> zero(n, CoordRat());
  if (i == j) return zero;
  bool flip = i > j;
  auto it = entries.find(flip ? std::make_pair(j, i) : std::make_pair(i, j));
  if (it == entries.end()) return zero;
  if (!flip) return it->second;
  std::vector<CoordRat> neg;
  neg.reserve(n);
  for (const auto& c : it->second) neg.push_back(c.scale(Scalar(-1)));
  return neg;
}

bool StructureFunctions::all_constant() const {
  for (const auto& [ij, cs] : entries) {
    (void)ij;
    for (const auto& c : cs)
      if (!c.is_constant()) return false;
  }
  return true;
}

std::string StructureFunctions::str() const {
  std::ostringstream out;
  for (const auto& [ij, cs] : entries) {
    out << "[" << labels[ij.first] << ", " << labels[ij.second] << "] = ";
    std::string acc;
    for (size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].is_zero()) continue;
      std::string piece;
      if (cs[k] == CoordRat(CoordSpacePtr(), Scalar(1)))
        piece = labels[k];
      else if (cs[k] == CoordRat(CoordSpacePtr(), Scalar(-1)))
        piece = "-" + labels[k];
      else
        piece = "(" + cs[k].str() + ")*" + labels[k];
      if (acc.empty()) {
        acc = piece;
      } else if (piece[0] == '-') {
        acc += " - " + piece.substr(1);
      } else {
        acc += " + " + piece;
      }
    }
    out << (acc.empty() ? "0" : acc) << '\n';
  }
  return out.str();
}

StructureFunctions commutator_table(const Frame& f) {
  StructureFunctions sf;
  sf.labels = f.labels;
  int n = static_cast<int>(f.fields.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      sf.entries[{i, j}] = decompose(lie_bracket(f.fields[i], f.fields[j]), f);
  return sf;
}

}  // namespace crmoduli
