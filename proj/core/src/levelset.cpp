#include "popsteady/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "popsteady/error.hpp"

namespace popsteady {

int LevelFunction::sign_at(const Environment& e) const {
  if (sign) return sign(e);
  const double v = value(e);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

Environment ray_direction(double theta) {
  if (theta <= 0.0) return {1.0, 0.0};
  if (theta >= std::numbers::pi / 2) return {0.0, 1.0};
  return {std::cos(theta), std::sin(theta)};
}

double simplex_coordinate(const Environment& e) {
  const double sum = e.e1 + e.e2;
  if (!(sum > 0.0)) throw Error(ErrorKind::DegenerateEnvironment, "environment has zero total");
  return e.e2 / sum;
}

double simplex_angle(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return std::numbers::pi / 2;
  return std::atan2(t, 1.0 - t);
}

namespace {

void check_endpoints(const LevelFunction& sigma, double theta, double r_max) {
  if (sigma.sign_at({0.0, 0.0}) <= 0) {
    std::ostringstream os;
    os << "sigma(0,0) = " << sigma.value({0.0, 0.0}) << " is not positive";
    throw Error(ErrorKind::BadOrigin, os.str());
  }
  const Environment far = r_max * ray_direction(theta);
  if (sigma.sign_at(far) >= 0) {
    std::ostringstream os;
    os << "no sign change on the ray theta = " << theta << ": sigma(" << far.e1 << ", " << far.e2
       << ") = " << sigma.value(far);
    throw Error(ErrorKind::NoOuterSignChange, os.str());
  }
}

double bisect_cell(const LevelFunction& sigma, const Environment& dir, double lo, double hi, double tol) {
  return bisect_root([&](double r) { return static_cast<double>(sigma.sign_at(r * dir)); }, lo, hi, tol);
}

}  // namespace

double bracket_on_ray(const LevelFunction& sigma, double theta, double r_max, double tol) {
  if (!(r_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "r_max must be positive");
  check_endpoints(sigma, theta, r_max);
  const Environment dir = ray_direction(theta);
  const double step = r_max / kRayScanSteps;
  double prev = 0.0;
  for (int k = 1; k <= kRayScanSteps; ++k) {
    const double r = k == kRayScanSteps ? r_max : k * step;
    const int s = sigma.sign_at(r * dir);
    if (s == 0) return r;
    if (s < 0) return bisect_cell(sigma, dir, prev, r, tol);
    prev = r;
  }
  return r_max;  // unreachable: the outer point is negative
}

std::vector<double> roots_on_ray(const LevelFunction& sigma, double theta, double r_max, double tol) {
  if (!(r_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "r_max must be positive");
  const Environment dir = ray_direction(theta);
  const double step = r_max / kRayScanSteps;
  std::vector<double> roots;
  double prev_r = 0.0;
  int prev_s = sigma.sign_at({0.0, 0.0});
  for (int k = 1; k <= kRayScanSteps; ++k) {
    const double r = k == kRayScanSteps ? r_max : k * step;
    const int s = sigma.sign_at(r * dir);
    if (s == 0) {
      roots.push_back(r);
    } else if (prev_s != 0 && s != prev_s) {
      roots.push_back(bisect_cell(sigma, dir, prev_r, r, tol));
    }
    prev_r = r;
    prev_s = s;
  }
  return roots;
}

LevelCurve trace_zero_set(const LevelFunction& sigma, const TraceOptions& options) {
  if (options.n_rays < 2) throw Error(ErrorKind::InvalidArgument, "at least two rays are needed");
  LevelCurve curve;
  curve.samples.reserve(options.n_rays);
  for (int i = 0; i < options.n_rays; ++i) {
    const double theta = i == options.n_rays - 1 ? std::numbers::pi / 2
                                                 : std::numbers::pi / 2 * i / (options.n_rays - 1);
    double rho = 0.0;
    try {
      if (options.branch == 0) {
        rho = bracket_on_ray(sigma, theta, options.r_max, options.tol);
      } else {
        const auto roots = roots_on_ray(sigma, theta, options.r_max, options.tol);
        if (static_cast<int>(roots.size()) <= options.branch) {
          std::ostringstream os;
          os << "ray theta = " << theta << " has " << roots.size() << " roots, branch " << options.branch
             << " does not exist";
          throw Error(ErrorKind::NoOuterSignChange, os.str());
        }
        rho = roots[options.branch];
      }
    } catch (const Error& e) {
      if (options.skip_failed_rays && e.kind() == ErrorKind::NoOuterSignChange) {
        curve.skipped_thetas.push_back(theta);
        continue;
      }
      throw;
    }
    CurveSample sample;
    sample.theta = theta;
    sample.rho = rho;
    sample.point = rho * ray_direction(theta);
    sample.sigma_residual = sigma.value(sample.point);
    const double step = options.r_max / kRayScanSteps;
    sample.degenerate = sigma.sign_at(std::max(0.0, rho - step) * ray_direction(theta)) == 0 &&
                        sigma.sign_at(std::min(options.r_max, rho + step) * ray_direction(theta)) == 0;
    curve.samples.push_back(sample);
  }
  if (curve.samples.empty())
    throw Error(ErrorKind::NoOuterSignChange, "no ray of the fan has a sign change inside r_max");
  return curve;
}

int count_branches(const LevelFunction& sigma, const TraceOptions& options) {
  std::size_t fewest = static_cast<std::size_t>(-1);
  for (int i = 0; i < options.n_rays; ++i) {
    const double theta = std::numbers::pi / 2 * i / (options.n_rays - 1);
    fewest = std::min(fewest, roots_on_ray(sigma, theta, options.r_max, options.tol).size());
  }
  return static_cast<int>(fewest);
}

Environment project_to_curve(const Environment& point, const LevelCurve& curve) {
  if (point.e1 == 0.0 && point.e2 == 0.0)
    throw Error(ErrorKind::InvalidArgument, "the origin lies on every ray");
  const auto& s = curve.samples;
  const double theta = std::atan2(point.e2, point.e1);
  const double tiny = 1e-12;
  if (theta < s.front().theta - tiny || theta > s.back().theta + tiny)
    throw Error(ErrorKind::InvalidArgument, "the ray through the point is outside the traced angular range");
  auto it = std::lower_bound(s.begin(), s.end(), theta, [](const CurveSample& c, double t) { return c.theta < t; });
  if (it == s.end()) return s.back().point;
  if (std::abs(it->theta - theta) <= tiny || it == s.begin()) return it->point;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (theta - a.theta) / (b.theta - a.theta);
  const double rho = (1.0 - w) * a.rho + w * b.rho;
  return rho * ray_direction(theta);
}

}  // namespace popsteady
