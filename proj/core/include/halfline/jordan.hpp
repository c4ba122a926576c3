#pragma once

#include <span>
#include <vector>

#include "halfline/linalg.hpp"
#include "halfline/types.hpp"

namespace halfline {

enum class JordanMode { exact, numeric };

std::string to_string(JordanMode m);
JordanMode jordan_mode_from_string(const std::string& s);

template <class Scalar>
struct JordanChain {
  Scalar eigenvalue;
  int length = 1;
};

/// Jordan decomposition Sinv * M * Smat = diag(J_{n_1}(l_1), ..., J_{n_kappa}(l_kappa)).
///
/// Columns of smat are the chain vectors u_{alpha j} in chain order, so that
/// (M - l_alpha) u_{alpha 1} = 0 and (M - l_alpha) u_{alpha j} = u_{alpha (j-1)}.
/// Rows of sinv form the biorthogonal adjoint basis. Zero-eigenvalue chains
/// come first; inside an eigenvalue, shorter chains come first.
template <class Scalar>
struct BasicJordanData {
  linalg::Mat<Scalar> matrix;
  linalg::Mat<Scalar> smat;
  linalg::Mat<Scalar> sinv;
  std::vector<JordanChain<Scalar>> chains;
  int mu = 0;     // number of zero-eigenvalue chains (geometric multiplicity)
  int nu = 0;     // total length of those chains (algebraic multiplicity)
  int kappa = 0;  // number of chains
  JordanMode mode = JordanMode::numeric;

  Eigen::Index n() const { return matrix.rows(); }

  /// Zero-based column of u_{alpha 1}.
  Eigen::Index chain_offset(size_t alpha) const {
    Eigen::Index off = 0;
    for (size_t i = 0; i < alpha; ++i) off += chains[i].length;
    return off;
  }

  /// The block-diagonal Jordan form.
  linalg::Mat<Scalar> jordan_form() const {
    linalg::Mat<Scalar> j = linalg::Mat<Scalar>::Zero(n(), n());
    Eigen::Index off = 0;
    for (const auto& c : chains) {
      for (int i = 0; i < c.length; ++i) {
        j(off + i, off + i) = c.eigenvalue;
        if (i + 1 < c.length) j(off + i, off + i + 1) = Scalar(1);
      }
      off += c.length;
    }
    return j;
  }
};

using JordanData = BasicJordanData<Complex>;
using ExactJordanData = BasicJordanData<GaussianRational>;

/// Jordan form of a floating-point matrix.
///
/// numeric: eigenvalues within eps_eig of each other are clustered (|l| <=
///   eps_eig counts as zero), and each cluster's multiplicity is confirmed by
///   rank tests with singular-value threshold eps_rank. Throws NumericalError
///   if the structure cannot be confirmed.
/// exact: entries are converted to Gaussian rationals (denominators up to
///   1e6) and the decomposition is done without rounding. Throws
///   ValidationError if an entry or an eigenvalue is not such a rational.
JordanData jordan_form(const Matrix& m, JordanMode mode, double eps_eig, double eps_rank);

/// Exact decomposition. Eigenvalues must be Gaussian rationals with
/// denominators up to 1e6.
ExactJordanData jordan_form_exact(const ExactMatrix& m);

JordanData to_numeric(const ExactJordanData& jd);

/// Multiplies every vector of chain alpha by factors[alpha] (and the matching
/// adjoint rows by 1/factors[alpha]). The result is still a Jordan basis.
JordanData rescale_chains(const JordanData& jd, std::span<const Complex> factors);

struct JordanResiduals {
  double biorthogonality = 0.0;  // ||Sinv Smat - I||
  double similarity = 0.0;       // ||Sinv M Smat - J||
  double chain_relations = 0.0;  // max over chains of the chain-relation residual
};
JordanResiduals jordan_residuals(const JordanData& jd);

/// Exact version; all residuals are zero iff the decomposition is exact.
bool jordan_exact_check(const ExactJordanData& jd);

}  // namespace halfline
