#pragma once

#include <lapacke.h>

#include <vector>

#include "conedex/linalg.hpp"

namespace conedex::spectral {

struct SvdResult {
  std::vector<double> sigma;  // descending, min(rows, cols) values
  Mat V;                      // right singular vectors (columns), if requested
};

/// Divide-and-conquer SVD via LAPACK, dispatching to real arithmetic when
/// the matrix has no imaginary part (factor ~3 at desk scale).
inline SvdResult svd(const Mat& M, bool want_vectors = false) {
  int m = int(M.rows()), n = int(M.cols());
  if (m < n) throw Error("svd: expects rows >= cols");
  int k = n;
  SvdResult out;
  out.sigma.resize(k);
  bool real_valued = M.imag().cwiseAbs().maxCoeff() < 1e-14;
  char jobz = want_vectors ? 'S' : 'N';
  int info = 0;
  if (real_valued) {
    RealMat A = M.real();  // column-major copy, destroyed by gesdd
    RealMat U(want_vectors ? m : 1, want_vectors ? k : 1);
    RealMat VT(want_vectors ? k : 1, want_vectors ? n : 1);
    info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, jobz, m, n, A.data(), m, out.sigma.data(),
                          U.data(), int(U.rows()), VT.data(), int(VT.rows()));
    if (want_vectors) out.V = VT.transpose().cast<Complex>();
  } else {
    Mat A = M;
    Mat U(want_vectors ? m : 1, want_vectors ? k : 1);
    Mat VT(want_vectors ? k : 1, want_vectors ? n : 1);
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, jobz, m, n,
                          reinterpret_cast<lapack_complex_double*>(A.data()), m,
                          out.sigma.data(),
                          reinterpret_cast<lapack_complex_double*>(U.data()), int(U.rows()),
                          reinterpret_cast<lapack_complex_double*>(VT.data()),
                          int(VT.rows()));
    if (want_vectors) out.V = VT.adjoint();
  }
  if (info != 0) throw Error("svd: LAPACK gesdd failed with info " + std::to_string(info));
  return out;
}

}  // namespace conedex::spectral
