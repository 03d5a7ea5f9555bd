#include "qtomo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtomo/envelope.hpp"
#include "qtomo/error.hpp"
#include "qtomo/parallel.hpp"

namespace qtomo {

std::vector<std::vector<double>> DirectionalQuantileEstimator::evaluate_grid(
    const Sample2& s, std::span<const UnitDirection> dirs, std::span<const double> ps) const {
  std::vector<std::vector<double>> out(ps.size(), std::vector<double>(dirs.size()));
  parallel_chunks(dirs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d)
      for (std::size_t l = 0; l < ps.size(); ++l) out[l][d] = evaluate(s, dirs[d], ps[l]);
  });
  return out;
}

namespace {

// Order statistics needed for one level.
struct LevelRanks {
  std::size_t lo = 0;  // 1-based
  std::size_t hi = 0;  // 0 when unused
  double frac = 0.0;
};

LevelRanks ranks_for(double p, std::size_t n, QuantileVersion v) {
  if (v == QuantileVersion::InfType1) return {type1_rank(p, n), 0, 0.0};
  const double h = static_cast<double>(n - 1) * p;
  const auto lower = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lower);
  if (frac == 0.0 || lower + 1 >= n) return {lower + 1, 0, 0.0};
  return {lower + 1, lower + 2, frac};
}

class EmpiricalEstimator final : public DirectionalQuantileEstimator {
 public:
  explicit EmpiricalEstimator(QuantileVersion v) : version_(v) {}

  double evaluate(const Sample2& s, UnitDirection dir, double p) const override {
    return directional_quantile(s, dir, p, version_);
  }

  std::vector<std::vector<double>> evaluate_grid(const Sample2& s,
                                                 std::span<const UnitDirection> dirs,
                                                 std::span<const double> ps) const override;

  std::string name() const override {
    return version_ == QuantileVersion::InfType1 ? "empirical-type1" : "empirical-r7";
  }

 private:
  QuantileVersion version_;
};

std::vector<std::vector<double>> EmpiricalEstimator::evaluate_grid(
    const Sample2& s, std::span<const UnitDirection> dirs, std::span<const double> ps) const {
  const std::size_t n = s.size();
  std::vector<LevelRanks> levels;
  std::vector<std::size_t> ranks;
  for (double p : ps) {
    require_open_probability(p);
    levels.push_back(ranks_for(p, n, version_));
    ranks.push_back(levels.back().lo);
    if (levels.back().hi) ranks.push_back(levels.back().hi);
  }
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  const std::size_t nr = ranks.size();

  std::vector<double> xs(n), ys(n);
  Point2 center{};
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = s[i].x;
    ys[i] = s[i].y;
    center = center + s[i];
  }
  center = (1.0 / static_cast<double>(n)) * center;
  double radius = 0.0, reach = 0.0;
  for (const Point2& pt : s.points()) {
    radius = std::max(radius, norm(pt - center));
    reach = std::max(reach, norm(pt));
  }
  // Covers rounding in the projections and in the bracket arithmetic.
  const double pad = 1e-12 * (reach + norm(center) + 1.0);

  // values[r][d]: ranks[r]-th order statistic of the projections on dirs[d].
  std::vector<std::vector<double>> values(nr, std::vector<double>(dirs.size()));

  // Directions are handled in blocks. One full pass at the start of a block
  // sorts every point into below, above or candidate for each rank, using a
  // band wide enough to cover every direction in the block; the remaining
  // directions only project the candidates.
  constexpr std::size_t kBlock = 4;
  parallel_chunks(
      dirs.size(),
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(n), work, t;
        std::vector<double> prev(nr);
        std::vector<std::size_t> below(nr);
        std::vector<std::vector<double>> cx(nr), cy(nr);
        auto full_select = [&](std::size_t d) {
          const double dx = dirs[d].x(), dy = dirs[d].y();
          for (std::size_t i = 0; i < n; ++i) z[i] = dx * xs[i] + dy * ys[i];
          work.assign(z.begin(), z.end());
          auto first = work.begin();
          for (std::size_t r = 0; r < nr; ++r) {
            auto nth = work.begin() + static_cast<std::ptrdiff_t>(ranks[r] - 1);
            std::nth_element(first, nth, work.end());
            prev[r] = *nth;
            first = nth;
          }
        };
        // Order statistics of the candidates; false if a rank falls outside.
        // prev holds the values at direction e, which narrows each search to
        // a window around the shifted previous value.
        auto select_candidates = [&](std::size_t d, std::size_t e) {
          const double dx = dirs[d].x(), dy = dirs[d].y();
          const Point2 step = dirs[d].vec() - dirs[e].vec();
          const double slack = radius * norm(step) + pad;
          const double shift = dot(step, center);
          for (std::size_t r = 0; r < nr; ++r) {
            const std::size_t m = cx[r].size();
            if (!(below[r] < ranks[r] && ranks[r] <= below[r] + m)) return false;
            const double l = prev[r] + shift - slack;
            const double h = prev[r] + shift + slack;
            const double* px = cx[r].data();
            const double* py = cy[r].data();
            std::size_t b = below[r];
            t.clear();
            for (std::size_t j = 0; j < m; ++j) {
              const double v = dx * px[j] + dy * py[j];
              b += v < l;
              if (v >= l && v <= h) t.push_back(v);
            }
            if (!(b < ranks[r] && ranks[r] <= b + t.size())) return false;
            auto nth = t.begin() + static_cast<std::ptrdiff_t>(ranks[r] - b - 1);
            std::nth_element(t.begin(), nth, t.end());
            prev[r] = *nth;
          }
          return true;
        };
        for (std::size_t d0 = begin; d0 < end; d0 += kBlock) {
          const std::size_t d1 = std::min(end, d0 + kBlock);
          // Distance from the block's first direction to the rest, and the
          // uncertainty of the estimate carried over from the previous direction.
          double spread = 0.0, carry = 0.0;
          Point2 step{};
          if (d0 == begin) {
            full_select(d0);
          } else {
            step = dirs[d0].vec() - dirs[d0 - 1].vec();
            carry = radius * norm(step);
          }
          for (std::size_t d = d0 + 1; d < d1; ++d)
            spread = std::max(spread, norm(dirs[d].vec() - dirs[d0].vec()));
          const double half = carry + 2.0 * radius * spread + pad;
          const double shift = dot(step, center);
          const double dx = dirs[d0].x(), dy = dirs[d0].y();
          for (std::size_t i = 0; i < n; ++i) z[i] = dx * xs[i] + dy * ys[i];
          for (std::size_t r = 0; r < nr; ++r) {
            const double l = prev[r] + shift - half;
            const double h = prev[r] + shift + half;
            std::size_t b = 0;
            auto& ux = cx[r];
            auto& uy = cy[r];
            ux.clear();
            uy.clear();
            for (std::size_t i = 0; i < n; ++i) {
              const double v = z[i];
              b += v < l;
              if (v >= l && v <= h) {
                ux.push_back(xs[i]);
                uy.push_back(ys[i]);
              }
            }
            below[r] = b;
          }
          for (std::size_t d = d0; d < d1; ++d) {
            const std::size_t e = d == begin ? d : d - 1;
            if (!select_candidates(d, e)) full_select(d);
            for (std::size_t r = 0; r < nr; ++r) values[r][d] = prev[r];
          }
        }
      },
      64);

  auto lookup = [&](std::size_t rank) {
    return static_cast<std::size_t>(std::lower_bound(ranks.begin(), ranks.end(), rank) -
                                    ranks.begin());
  };
  std::vector<std::vector<double>> out(ps.size(), std::vector<double>(dirs.size()));
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& lo = values[lookup(levels[l].lo)];
    if (!levels[l].hi) {
      out[l] = lo;
      continue;
    }
    const auto& hi = values[lookup(levels[l].hi)];
    for (std::size_t d = 0; d < dirs.size(); ++d)
      out[l][d] = lo[d] + levels[l].frac * (hi[d] - lo[d]);
  }
  return out;
}

class ExtremeEstimator final : public DirectionalQuantileEstimator {
 public:
  ExtremeEstimator(double threshold_fraction, std::function<double(UnitDirection)> per_direction)
      : threshold_fraction_(threshold_fraction), per_direction_(std::move(per_direction)) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
      throw Error(ErrorCode::InvalidConfig, "threshold fraction must lie in (0, 1)");
  }

  double evaluate(const Sample2& s, UnitDirection dir, double p) const override {
    require_open_probability(p);
    const double fraction = per_direction_ ? per_direction_(dir) : threshold_fraction_;
    std::vector<double> z = s.project(dir);
    if (p >= fraction) return quantile_inplace(z, p, QuantileVersion::InfType1);
    const TailModel model = fit_gpd_tail(Sample1(z), fraction);
    if (p > model.zeta_u) return quantile_inplace(z, p, QuantileVersion::InfType1);
    return -gpd_quantile(model, p);
  }

  std::string name() const override { return "extreme-gpd"; }

 private:
  double threshold_fraction_;
  std::function<double(UnitDirection)> per_direction_;
};

}  // namespace

EstimatorPtr empirical_estimator(QuantileVersion v) {
  return std::make_shared<EmpiricalEstimator>(v);
}

EstimatorPtr extreme_estimator(double threshold_fraction,
                               std::function<double(UnitDirection)> per_direction) {
  return std::make_shared<ExtremeEstimator>(threshold_fraction, std::move(per_direction));
}

TailModel fit_gpd_tail(const Sample1& proj, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "threshold fraction must lie in (0, 1)");
  const std::size_t n = proj.size();
  if (n < 50)
    throw Error(ErrorCode::TooFewExceedances,
                "tail fitting needs at least 50 points, got " + std::to_string(n));
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = -proj.values()[i];
  std::vector<double> buf = w;
  const double u = quantile_inplace(buf, 1.0 - threshold_fraction, QuantileVersion::InfType1);

  std::vector<double> excess;
  for (double v : w)
    if (v > u) excess.push_back(v - u);
  const std::size_t k = excess.size();
  if (k < 20)
    throw Error(ErrorCode::TooFewExceedances,
                "only " + std::to_string(k) + " exceedances above the threshold");
  std::sort(excess.begin(), excess.end());

  // Unbiased probability-weighted moments a0 = E[Y], a1 = E[Y (1 - F(Y))].
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    m0 += excess[j];
    m1 += excess[j] * static_cast<double>(k - 1 - j) / static_cast<double>(k - 1);
  }
  m0 /= static_cast<double>(k);
  m1 /= static_cast<double>(k);
  const double denom = m0 - 2.0 * m1;
  if (!(denom > 1e-12 * std::abs(m0)))
    throw Error(ErrorCode::DegenerateTail, "exceedances have no spread");

  TailModel m;
  m.threshold_fraction = threshold_fraction;
  m.sigma = 2.0 * m0 * m1 / denom;
  m.xi = 2.0 - m0 / denom;
  m.u = u;
  m.zeta_u = static_cast<double>(k) / static_cast<double>(n);
  m.exceedances = k;
  if (!(m.sigma > 0.0)) throw Error(ErrorCode::DegenerateTail, "fitted scale is not positive");
  return m;
}

double gpd_quantile(const TailModel& m, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidP, "tail probability must be positive");
  if (p > m.zeta_u)
    throw Error(ErrorCode::OutOfRegime, "p = " + std::to_string(p) +
                                            " lies above the exceedance fraction " +
                                            std::to_string(m.zeta_u));
  const double ratio = p / m.zeta_u;
  if (std::abs(m.xi) < 1e-8) return m.u + m.sigma * std::log(1.0 / ratio);
  return m.u + (m.sigma / m.xi) * (std::pow(ratio, -m.xi) - 1.0);
}

double qr_loss(std::span<const double> t, std::span<const double> y, double p,
               double intercept, double slope) {
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - intercept - slope * t[i];
    total += r * (p - (r < 0.0 ? 1.0 : 0.0));
  }
  return total / static_cast<double>(t.size());
}

LinearQRFit qr_line_through(std::span<const double> t, std::span<const double> y, double p,
                            std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  LinearQRFit f;
  f.first = i;
  f.second = j;
  f.slope = (y[j] - y[i]) / (t[j] - t[i]);
  f.intercept = y[i] - f.slope * t[i];
  f.loss = qr_loss(t, y, p, f.intercept, f.slope);
  return f;
}

namespace {

// Best line through sample point k: the loss along that pencil is a weighted
// sum of check functions of the slopes to the other points, minimized at a
// weighted quantile of those slopes.
LinearQRFit best_line_through(std::span<const double> t, std::span<const double> y, double p,
                              std::size_t k) {
  struct Slope {
    double value;
    double weight;
    std::size_t index;
  };
  std::vector<Slope> slopes;
  slopes.reserve(t.size());
  double derivative = 0.0;  // d loss / d slope, left of every breakpoint
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t[k];
    if (dt == 0.0) continue;
    const double weight = std::abs(dt);
    slopes.push_back({(y[i] - y[k]) / dt, weight, i});
    derivative -= weight * (dt > 0.0 ? p : 1.0 - p);
  }
  std::sort(slopes.begin(), slopes.end(), [](const Slope& a, const Slope& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  });
  std::size_t pick = slopes.size() - 1;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    derivative += slopes[i].weight;
    if (derivative >= 0.0) {
      pick = i;
      break;
    }
  }
  return qr_line_through(t, y, p, k, slopes[pick].index);
}

}  // namespace

LinearQRFit linear_qr(std::span<const double> t, std::span<const double> y, double p) {
  require_open_probability(p);
  const std::size_t n = t.size();
  if (n != y.size()) throw Error(ErrorCode::InvalidConfig, "covariate/response length mismatch");
  if (n < 2) throw Error(ErrorCode::DegenerateCovariate, "regression needs at least two points");
  if (std::all_of(t.begin(), t.end(), [&](double v) { return v == t[0]; }))
    throw Error(ErrorCode::DegenerateCovariate, "all covariate values are equal");

  // Start from the horizontal quantile line's anchor point.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const std::size_t rank = type1_rank(p, n);
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   order.end(), [&](std::size_t a, std::size_t b) {
                     return y[a] < y[b] || (y[a] == y[b] && a < b);
                   });
  LinearQRFit best = best_line_through(t, y, p, order[rank - 1]);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(y[i]), std::abs(t[i])});
  const double on_line = 1e-12 * (scale + 1.0);

  // The loss is strictly decreasing along the walk and there are finitely
  // many candidate lines, so this terminates.
  for (;;) {
    std::vector<std::size_t> anchors{best.first, best.second};
    for (std::size_t i = 0; i < n; ++i)
      if (i != best.first && i != best.second &&
          std::abs(y[i] - best(t[i])) <= on_line)
        anchors.push_back(i);
    bool moved = false;
    for (std::size_t a : anchors) {
      LinearQRFit cand = best_line_through(t, y, p, a);
      if (cand.loss < best.loss) {
        best = cand;
        moved = true;
        break;
      }
    }
    if (!moved) return best;
  }
}

Envelope conditional_envelope(const CovariateSample& data, double t0, double p,
                              const DirectionSet& dirs) {
  require_envelope_level(p);
  const auto& t = data.t;
  if (t.size() != data.responses.size())
    throw Error(ErrorCode::InvalidConfig, "covariate column length differs from responses");
  const auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
  if (!(*tmax > *tmin)) throw Error(ErrorCode::DegenerateCovariate, "covariate has no spread");
  if (!(t0 >= *tmin && t0 <= *tmax))
    throw Error(ErrorCode::ExtrapolationRefused,
                "covariate value " + std::to_string(t0) + " outside [" + std::to_string(*tmin) +
                    ", " + std::to_string(*tmax) + "]");
  dirs.validate();
  std::vector<double> q(dirs.size());
  parallel_chunks(dirs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      const std::vector<double> z = data.responses.project(dirs.dirs[d]);
      q[d] = linear_qr(t, z, p)(t0);
    }
  });
  return envelope_from_offsets(p, dirs, q);
}

}  // namespace qtomo
