#pragma once

// Exact linear algebra over coordinate rational functions. Rows are cleared
// to polynomials first, then eliminated fraction-free (Bareiss): each
// two-step cross-multiplication is divided by the previous pivot, which is
// an exact polynomial division, so entries never pick up denominators and
// never grow past the minors they represent. Divisions return only in the
// final back-substitution.

#include <optional>
#include <utility>
#include <vector>

#include "crmoduli/coordring.hpp"

namespace crmoduli::detail {

struct Echelon {
  std::vector<std::vector<CoordPoly>> m;  // echelonized, possibly augmented
  std::vector<int> col_of;                // position -> original column
  int rank = 0;
  int sign = 1;                // parity of row and column swaps
  CoordPoly row_clear;         // product of the row-clearing factors
  CoordPoly last_pivot;        // rank-th pivot (the surviving minor)
};

// Clears each row by the product of its entries' denominators and runs
// fraction-free elimination with full pivoting on the first `ncols` columns
// (any extra columns ride along as augmentation).
inline Echelon echelonize(const std::vector<std::vector<CoordRat>>& rows, int ncols) {
  CoordSpacePtr sp;
  for (const auto& r : rows)
    for (const auto& e : r)
      if (!sp && e.num().space()) sp = e.num().space();

  Echelon ec;
  ec.row_clear = CoordPoly(sp, Scalar(1));
  int nr = static_cast<int>(rows.size());
  int width = nr ? static_cast<int>(rows[0].size()) : 0;
  for (int j = 0; j < width; ++j) ec.col_of.push_back(j);

  for (const auto& r : rows) {
    CoordPoly d(sp, Scalar(1));
    for (const auto& e : r) d = d * e.den();
    ec.row_clear = ec.row_clear * d;
    std::vector<CoordPoly> pr;
    pr.reserve(r.size());
    for (const auto& e : r)
      pr.push_back(e.num() * CoordPoly::exact_divide(d, e.den()));
    ec.m.push_back(std::move(pr));
  }

  CoordPoly prev(sp, Scalar(1));
  int row = 0;
  for (int col = 0; col < ncols && row < nr; ++col) {
    // full pivot: any nonzero entry in the remaining block of lead columns
    int pr = -1, pc = -1;
    for (int j = col; j < ncols && pr < 0; ++j)
      for (int i = row; i < nr; ++i)
        if (!ec.m[i][j].is_zero()) {
          pr = i;
          pc = j;
          break;
        }
    if (pr < 0) break;
    if (pr != row) {
      std::swap(ec.m[pr], ec.m[row]);
      ec.sign = -ec.sign;
    }
    if (pc != col) {
      for (auto& r : ec.m) std::swap(r[pc], r[col]);
      std::swap(ec.col_of[pc], ec.col_of[col]);
      ec.sign = -ec.sign;
    }
    const CoordPoly piv = ec.m[row][col];
    for (int i = row + 1; i < nr; ++i) {
      for (int j = col + 1; j < width; ++j)
        ec.m[i][j] = CoordPoly::exact_divide(
            ec.m[row][col] * ec.m[i][j] - ec.m[i][col] * ec.m[row][j], prev);
      ec.m[i][col] = CoordPoly(sp);
    }
    prev = piv;
    ec.last_pivot = piv;
    ++row;
  }
  ec.rank = row;
  if (ec.rank == 0) ec.last_pivot = CoordPoly(sp, Scalar(1));
  return ec;
}

// Determinant of a square matrix.
inline CoordRat determinant(const std::vector<std::vector<CoordRat>>& a) {
  int n = static_cast<int>(a.size());
  if (n == 0) return CoordRat(CoordSpacePtr(), Scalar(1));
  Echelon ec = echelonize(a, n);
  CoordSpacePtr sp = ec.row_clear.space();
  if (ec.rank < n) return CoordRat(sp, Scalar(0));
  CoordPoly num = ec.sign < 0 ? ec.last_pivot.scale(Scalar(-1)) : ec.last_pivot;
  return CoordRat(num, ec.row_clear);
}

// Solves A x = rhs for every right-hand-side column at once, sharing one
// elimination. Returns nullopt when any system is inconsistent or the
// solution is not unique (column rank below the unknown count).
inline std::optional<std::vector<std::vector<CoordRat>>> linear_solve_multi(
    const std::vector<std::vector<CoordRat>>& a,
    const std::vector<std::vector<CoordRat>>& rhs_cols) {
  int nr = static_cast<int>(a.size());
  int nc = nr ? static_cast<int>(a[0].size()) : 0;
  int nrhs = static_cast<int>(rhs_cols.size());
  std::vector<std::vector<CoordRat>> aug = a;
  for (int i = 0; i < nr; ++i)
    for (int r = 0; r < nrhs; ++r) aug[i].push_back(rhs_cols[r][i]);

  Echelon ec = echelonize(aug, nc);
  CoordSpacePtr sp;
  for (const auto& r : ec.m)
    for (const auto& e : r)
      if (!sp && e.space()) sp = e.space();

  for (int i = ec.rank; i < nr; ++i)
    for (int r = 0; r < nrhs; ++r)
      if (!ec.m[i][nc + r].is_zero()) return std::nullopt;
  if (ec.rank < nc) return std::nullopt;

  std::vector<std::vector<CoordRat>> xs(nrhs, std::vector<CoordRat>(nc, CoordRat(sp, Scalar(0))));
  for (int r = 0; r < nrhs; ++r) {
    std::vector<CoordRat>& x = xs[r];
    for (int i = nc - 1; i >= 0; --i) {
      CoordRat acc(ec.m[i][nc + r]);
      for (int j = i + 1; j < nc; ++j) acc = acc - x[ec.col_of[j]] * CoordRat(ec.m[i][j]);
      x[ec.col_of[i]] = acc / CoordRat(ec.m[i][i]);
    }
  }
  return xs;
}

inline std::optional<std::vector<CoordRat>> linear_solve(
    const std::vector<std::vector<CoordRat>>& a, const std::vector<CoordRat>& rhs) {
  auto xs = linear_solve_multi(a, {rhs});
  if (!xs) return std::nullopt;
  return std::move((*xs)[0]);
}

// Inverse of a square matrix; nullopt when singular.
inline std::optional<std::vector<std::vector<CoordRat>>> invert(
    const std::vector<std::vector<CoordRat>>& a) {
  int n = static_cast<int>(a.size());
  CoordSpacePtr sp;
  for (const auto& r : a)
    for (const auto& e : r)
      if (!sp && e.num().space()) sp = e.num().space();
  std::vector<std::vector<CoordRat>> cols(n, std::vector<CoordRat>(n, CoordRat(sp, Scalar(0))));
  for (int j = 0; j < n; ++j) cols[j][j] = CoordRat(sp, Scalar(1));
  auto xs = linear_solve_multi(a, cols);
  if (!xs) return std::nullopt;
  // xs[j] solves A x = e_j, i.e. xs[j] is column j of the inverse
  std::vector<std::vector<CoordRat>> inv(n, std::vector<CoordRat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = (*xs)[j][i];
  return inv;
}

}  // namespace crmoduli::detail
