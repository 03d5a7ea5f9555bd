#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qtomo/geom.hpp"
#include "qtomo/quantile.hpp"

namespace qtomo {

/// Maps (sample, direction, p) to a scalar directional quantile.
///
/// Implementations must be translation and scale equivariant: shifting the
/// sample by b shifts the value by dir'b, scaling by c > 0 scales it by c.
/// Envelopes built from such estimators are affine equivariant.
class DirectionalQuantileEstimator {
 public:
  virtual ~DirectionalQuantileEstimator() = default;

  virtual double evaluate(const Sample2& s, UnitDirection dir, double p) const = 0;

  /// Values for every (level, direction) pair, indexed [level][direction].
  /// The default evaluates each pair independently, in parallel over
  /// directions.
  virtual std::vector<std::vector<double>> evaluate_grid(
      const Sample2& s, std::span<const UnitDirection> dirs,
      std::span<const double> ps) const;

  virtual std::string name() const = 0;
};

using EstimatorPtr = std::shared_ptr<const DirectionalQuantileEstimator>;

/// Plug-in estimator: the sample quantile of the projections.
///
/// Its evaluate_grid walks the directions in order and reuses each
/// direction's quantile to bracket the next one (projections move by at most
/// R |s - t| between directions s and t, R the sample radius about its
/// mean), so only the points inside the bracket are selected on. Values are
/// bit-identical to directional_quantile.
EstimatorPtr empirical_estimator(QuantileVersion v);

/// Peaks-over-threshold fit of the lower tail of a projection. All fields
/// live in the reflected frame w = -proj, whose upper tail is modelled:
/// exceedances are w - u for w > u.
struct TailModel {
  double threshold_fraction = 0.0;
  double xi = 0.0;     // GPD shape
  double sigma = 0.0;  // GPD scale
  double u = 0.0;      // threshold
  double zeta_u = 0.0; // fraction of points above u
  std::size_t exceedances = 0;
};

/// Fits a generalized Pareto tail by probability-weighted moments to the
/// exceedances of -proj over its (1 - threshold_fraction) quantile.
/// Needs n >= 50 and at least 20 exceedances.
TailModel fit_gpd_tail(const Sample1& proj, double threshold_fraction);

/// Upper quantile of the reflected sample at exceedance probability p:
/// u + (sigma/xi)((p/zeta_u)^(-xi) - 1), or u + sigma ln(zeta_u/p) when
/// |xi| < 1e-8. Valid for p <= zeta_u.
double gpd_quantile(const TailModel& m, double p);

/// Lower directional quantiles from a GPD tail fit below the
/// threshold_fraction quantile of each projection; levels at or above the
/// threshold (or outside the fitted tail) fall back to the empirical InfType1
/// quantile. `per_direction`, when set, overrides the threshold fraction for
/// individual directions.
EstimatorPtr extreme_estimator(double threshold_fraction,
                               std::function<double(UnitDirection)> per_direction = {});

struct LinearQRFit {
  double intercept = 0.0;
  double slope = 0.0;
  /// Mean check loss at the fit.
  double loss = 0.0;
  /// The two sample points the fitted line passes through.
  std::size_t first = 0;
  std::size_t second = 0;

  double operator()(double t) const { return intercept + slope * t; }
};

/// Mean check loss of the line a + b t.
double qr_loss(std::span<const double> t, std::span<const double> y, double p,
               double intercept, double slope);

/// The line through sample points i and j (t_i != t_j) in the canonical form
/// used by linear_qr, with its loss.
LinearQRFit qr_line_through(std::span<const double> t, std::span<const double> y, double p,
                            std::size_t i, std::size_t j);

/// Exact linear quantile regression of y on t. Some optimal line passes
/// through two sample points; the solver walks such lines, each step an exact
/// weighted-median search over slopes through one anchor point, until no
/// anchor on the current line improves the loss.
LinearQRFit linear_qr(std::span<const double> t, std::span<const double> y, double p);

/// Bivariate responses with a scalar covariate per point.
struct CovariateSample {
  Sample2 responses;
  std::vector<double> t;
};

struct DirectionSet;
struct Envelope;

/// Envelope at covariate value t0 assembled from per-direction linear
/// quantile regressions of the projected responses on t.
Envelope conditional_envelope(const CovariateSample& data, double t0, double p,
                              const DirectionSet& dirs);

}  // namespace qtomo
