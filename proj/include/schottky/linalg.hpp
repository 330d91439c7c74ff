#pragma once

#include <Eigen/Dense>

#include "schottky/errors.hpp"
#include "schottky/numeric.hpp"

namespace schottky {

using IVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using IMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using RVec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using RMat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;

// gcd of absolute values of the entries; 0 for the zero vector.
Int content(const IVec& v);

// v divided by its content, sign flipped so the first nonzero entry is positive.
IVec primitive_part(const IVec& v);

bool is_zero(const IVec& v);

IMat identity(int n);

// Elementary matrix I + c*E_{ij}, i != j (0-based indices).
IMat elementary(int n, int i, int j, const Int& c = 1);

// Exact determinant by fraction-free (Bareiss) elimination.
Int det(const IMat& m);

// Inverse of a matrix with determinant +-1; throws if not unimodular.
IMat inverse_unimodular(const IMat& m);

bool is_identity(const IMat& m);

// Basis of the integer kernel lattice {x in Z^n : f.x = 0} as columns of an
// n x (n-1) matrix; f must be nonzero.
IMat kernel_basis(const IVec& f);

// Unimodular matrix whose first column is the given primitive vector.
IMat complete_to_unimodular(const IVec& v);

// c with f.c = 1 for a primitive covector f.
IVec dual_vector(const IVec& f);

// Integer solution a of B*a = v for a full-column-rank B whose lattice
// contains v; throws if no exact integer solution exists.
IVec solve_integer(const IMat& B, const IVec& v);

}  // namespace schottky
