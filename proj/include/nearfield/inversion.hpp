#pragma once

#include <string>
#include <vector>

#include "nearfield/dtn.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/layer_potentials.hpp"
#include "nearfield/radial.hpp"

namespace nearfield {

struct FitConfig {
  int max_iterations = 200;
  double fd_step = 1e-6;      // relative finite-difference step
  double value_min = 0.1;
  double value_max = 10.0;
  double tolerance = 1e-20;   // stop when the misfit falls below this
  double step_tolerance = 1e-12;
  RadialOptions radial;
};

struct RecoveryConfig {
  double svd_threshold = 1e-10;  // relative singular-value cutoff
  int l_rec = -1;                // trusted degree; -1 selects the largest supported
  FitConfig fit;
};

struct RecoveredMiddle {
  DenseOperator M;                  // diagonal in the harmonic basis, zero above l_rec
  std::vector<double> sigma_L;      // singular values of L in the weighted L2(S) geometry
  std::vector<double> sigma_Lstar;
  int retained_L = 0;
  int retained_Lstar = 0;
  int l_rec = 0;      // trusted degree actually used
  int l_rec_max = 0;  // largest degree whose (l+1)^2 modes survive on both sides
  double design_condition = 0.0;  // condition number of the column-scaled fit
  double residual = 0.0;          // |4 pi F_S - L* M L| / |4 pi F_S| in the weighted norm
};

/// Fits the diagonal of M on degrees <= l_rec so that L* M L matches 4 pi F_S in the
/// weighted Frobenius norm. Each unknown owns the rank-one term L*_{:,q} L_{q,:}; the
/// columns are scaled to unit norm and solved by SVD with relative cutoff svd_threshold.
/// With l_rec = -1 the trusted degree is the largest l for which (l+1)^2 singular values
/// of both L and L* exceed the cutoff. Throws RankError when no degree qualifies or when
/// the fit for an explicit l_rec is rank deficient at the cutoff.
RecoveredMiddle recover_middle(const Discretization& disc, const CMatrix& F_S, const DenseOperator& L,
                               const DenseOperator& Lstar, const RecoveryConfig& config = {});

struct RecoveredDtn {
  HarmonicDiagonal fn;
  std::vector<cdouble> middle;  // mean of the diagonal of M over m, per degree
  double leakage = 0.0;  // off-diagonal energy plus spread over m, relative to M on degrees <= l_rec
};

/// fn = fout + (f0 - fout) / (1 + m / (f0 - fout)) from the diagonal of M.
/// Throws DegenerateError when the denominator vanishes.
RecoveredDtn recover_dtn(const CMatrix& M, const HarmonicDiagonal& f0, const HarmonicDiagonal& fout, int l_rec);

/// Scalar inverse of the middle symbol for one degree.
cdouble dtn_from_middle(cdouble m, cdouble f0, cdouble fout);

/// Starting model for the fit; breakpoints flagged fixed are not optimised.
struct FitTemplate {
  RadialPotential initial;
  std::vector<bool> fixed_breakpoints;

  int parameter_count() const;
};

/// "breakpoints=0.35,0.75;values=1.2,1.0;fixed=0,0" (fixed is optional).
FitTemplate parse_fit_template(const std::string& spec);

struct FitIteration {
  int iteration = 0;
  double misfit = 0.0;
  std::vector<double> parameters;
  std::string step;
};

struct FitResult {
  RadialPotential potential;
  std::vector<double> parameters;  // values followed by free breakpoints
  double misfit = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<FitIteration> log;
};

/// Thrown when the iteration budget runs out; carries the best iterate.
class FitNonConvergence : public NonConvergence {
 public:
  FitNonConvergence(const std::string& what, FitResult best) : NonConvergence(what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// sum_{l <= l_rec} |fn_model(l) - fn_data(l)|^2 / (1 + l)^2.
double fit_misfit(const HarmonicDiagonal& data, int l_rec, const RadialPotential& model, const RadialOptions& options = {});

/// Damped Gauss-Newton on the weighted misfit with a forward-difference Jacobian,
/// parameters projected into [value_min, value_max] x (0, a). Falls back to a
/// coordinate search when a Gauss-Newton step fails to decrease the misfit.
/// Throws BoundsError when the template starts outside the bounds and
/// FitNonConvergence when max_iterations is exhausted.
FitResult fit_potential(const HarmonicDiagonal& data, int l_rec, const FitTemplate& model, const FitConfig& config = {});

}  // namespace nearfield
