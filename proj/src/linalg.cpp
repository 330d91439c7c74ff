#include "schottky/linalg.hpp"

#include <vector>

namespace schottky {

Int content(const IVec& v) {
  Int g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Int a = abs(v[i]);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  }
  return g;
}

bool is_zero(const IVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0) return false;
  return true;
}

IVec primitive_part(const IVec& v) {
  Int g = content(v);
  if (g == 0) throw ZeroVector();
  IVec w = v;
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] /= g;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] != 0) {
      if (w[i] < 0) w = -w;
      break;
    }
  }
  return w;
}

IMat identity(int n) { return IMat::Identity(n, n); }

IMat elementary(int n, int i, int j, const Int& c) {
  if (i == j) throw PreconditionViolated("elementary matrix needs i != j");
  IMat m = IMat::Identity(n, n);
  m(i, j) = c;
  return m;
}

Int det(const IMat& m) {
  if (m.rows() != m.cols()) throw PreconditionViolated("det of non-square matrix");
  const Eigen::Index n = m.rows();
  IMat a = m;
  Int prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index piv = -1;
      for (Eigen::Index r = k + 1; r < n; ++r)
        if (a(r, k) != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return 0;
      a.row(k).swap(a.row(piv));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        Int num = a(k, k) * a(i, j) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign > 0 ? a(n - 1, n - 1) : Int(-a(n - 1, n - 1));
}

IMat inverse_unimodular(const IMat& m) {
  Int d = det(m);
  if (d != 1 && d != -1) throw PreconditionViolated("matrix is not unimodular");
  const Eigen::Index n = m.rows();
  RMat a(n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = Rat(m(i, j));
      a(i, n + j) = (i == j) ? Rat(1) : Rat(0);
    }
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = k; r < n; ++r)
      if (a(r, k) != 0) {
        piv = r;
        break;
      }
    a.row(k).swap(a.row(piv));
    Rat p = a(k, k);
    for (Eigen::Index j = k; j < 2 * n; ++j) a(k, j) /= p;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      Rat f = a(i, k);
      for (Eigen::Index j = k; j < 2 * n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  IMat inv(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Rat e = a(i, n + j);
      if (e.get_den() != 1) throw PreconditionViolated("non-integer inverse entry");
      inv(i, j) = e.get_num();
    }
  return inv;
}

bool is_identity(const IMat& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != ((i == j) ? 1 : 0)) return false;
  return true;
}

namespace {

// Column operations turning the row vector c into (g, 0, ..., 0); the same
// operations are applied to the columns of u.
void reduce_row(IVec& c, IMat& u) {
  const Eigen::Index n = c.size();
  for (Eigen::Index j = 1; j < n; ++j) {
    if (c[j] == 0) continue;
    Int g, x, y;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), c[0].get_mpz_t(),
               c[j].get_mpz_t());
    Int a = c[0] / g, b = c[j] / g;
    // New columns: col0' = x*col0 + y*colj, colj' = -b*col0 + a*colj.
    IVec u0 = u.col(0), uj = u.col(j);
    Int nb = -b;
    u.col(0) = x * u0 + y * uj;
    u.col(j) = nb * u0 + a * uj;
    c[0] = g;
    c[j] = 0;
  }
  if (c[0] < 0) {
    c[0] = -c[0];
    u.col(0) = -u.col(0);
  }
}

}  // namespace

IMat kernel_basis(const IVec& f) {
  if (is_zero(f)) throw ZeroVector();
  const Eigen::Index n = f.size();
  IVec c = f;
  IMat u = IMat::Identity(n, n);
  reduce_row(c, u);
  return u.rightCols(n - 1);
}

IMat complete_to_unimodular(const IVec& v) {
  if (content(v) != 1) throw PreconditionViolated("vector is not primitive");
  const Eigen::Index n = v.size();
  // Find unimodular U with v^T U = (1, 0, ..., 0); then U^{-T} has first
  // column v, and so does the unimodular (U^{-1})^T.
  IVec c = v;
  IMat u = IMat::Identity(n, n);
  reduce_row(c, u);
  IMat m = inverse_unimodular(u.transpose());
  if (det(m) < 0) m.col(n - 1) = -m.col(n - 1);
  return m;
}

IVec dual_vector(const IVec& f) {
  if (content(f) != 1) throw PreconditionViolated("covector is not primitive");
  const Eigen::Index n = f.size();
  IVec c = f;
  IMat u = IMat::Identity(n, n);
  reduce_row(c, u);
  return u.col(0);
}

IVec solve_integer(const IMat& B, const IVec& v) {
  const Eigen::Index rows = B.rows(), cols = B.cols();
  RMat a(rows, cols + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = Rat(B(i, j));
    a(i, cols) = Rat(v[i]);
  }
  Eigen::Index rank = 0;
  std::vector<Eigen::Index> pivot_col;
  for (Eigen::Index k = 0; k < cols && rank < rows; ++k) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = rank; r < rows; ++r)
      if (a(r, k) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    a.row(rank).swap(a.row(piv));
    Rat p = a(rank, k);
    for (Eigen::Index j = k; j <= cols; ++j) a(rank, j) /= p;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == rank || a(i, k) == 0) continue;
      Rat f = a(i, k);
      for (Eigen::Index j = k; j <= cols; ++j) a(i, j) -= f * a(rank, j);
    }
    pivot_col.push_back(k);
    ++rank;
  }
  for (Eigen::Index i = rank; i < rows; ++i)
    if (a(i, cols) != 0) throw PreconditionViolated("inconsistent linear system");
  if (static_cast<Eigen::Index>(pivot_col.size()) != cols)
    throw PreconditionViolated("matrix does not have full column rank");
  IVec x(cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    Rat e = a(k, cols);
    if (e.get_den() != 1) throw PreconditionViolated("no integer solution");
    x[k] = e.get_num();
  }
  return x;
}

}  // namespace schottky
