#pragma once

#include <limits>

#include "netcpd/linalg.hpp"

namespace netcpd {

/// Eigenvalue cutoff and entry clip level for singular value thresholding.
/// tau2 may be +infinity (no clipping).
struct UsvtParams {
  double tau1 = 0.0;
  double tau2 = std::numeric_limits<double>::infinity();
};

/// Low-rank part of `m`: the sum of lambda v v^T over eigenpairs with
/// |lambda| >= tau1 (ties kept), together with how many pairs were kept.
struct LowRankPart {
  Matrix matrix;
  int kept = 0;
};

LowRankPart low_rank_part(const Matrix& m, double tau1);

/// Universal singular value thresholding: hard-threshold the spectrum at tau1,
/// then clip every entry to [-tau2, tau2]. A zero input short-circuits to zero.
Matrix usvt(const Matrix& m, const UsvtParams& p);

}  // namespace netcpd
