#include "skelgait/gait_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "skelgait/errors.hpp"

namespace skelgait {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 joint_at(const SkeletonSequence& seq, std::size_t t, std::size_t j) {
  return {seq.data(0, t, j), seq.data(1, t, j), seq.data(2, t, j)};
}
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

void require_body(const SkeletonSequence& seq, const SkeletonTopology& topo, const char* what) {
  if (seq.channels() != kCoordinateChannels || seq.joints() != topo.size()) {
    throw ShapeError(std::string(what) + ": expected 3 x T x " + std::to_string(topo.size()) +
                     ", got " + seq.data.shape_string());
  }
  if (seq.frames() == 0) throw ShapeError(std::string(what) + ": sequence has no frames");
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

JointAngles joint_spine_angles(const SkeletonSequence& seq, const SkeletonTopology& topo,
                               const AngleOptions& opts) {
  require_body(seq, topo, "joint_spine_angles");
  const std::size_t T = seq.frames();
  const std::size_t J = seq.joints();
  JointAngles out;
  out.per_frame.assign(T, std::vector<std::optional<double>>(J));
  std::vector<double> sum(J, 0.0);
  std::vector<std::size_t> count(J, 0);
  const double rad_to_deg = 180.0 / std::numbers::pi;

  for (std::size_t t = 0; t < T; ++t) {
    const Vec3 spine = joint_at(seq, t, topo.spine_index);
    Vec3 axis = opts.vertical;
    if (opts.reference == AngleReference::spine_axis) {
      axis = sub(joint_at(seq, t, topo.neck_index), spine);
    }
    const double axis_norm = norm(axis);
    if (axis_norm < opts.epsilon) continue;
    for (std::size_t j = 0; j < J; ++j) {
      if (j == topo.spine_index) continue;
      const Vec3 v = sub(joint_at(seq, t, j), spine);
      const double n = norm(v);
      if (n < opts.epsilon) continue;
      const double c = std::clamp(dot(v, axis) / (n * axis_norm), -1.0, 1.0);
      double deg = std::acos(c) * rad_to_deg;
      if (opts.convention == AngleConvention::line) deg = std::min(deg, 180.0 - deg);
      out.per_frame[t][j] = deg;
      sum[j] += deg;
      ++count[j];
    }
  }
  out.mean.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    if (count[j] > 0) out.mean[j] = sum[j] / static_cast<double>(count[j]);
  }
  return out;
}

std::vector<double> motion_profile(const SkeletonSequence& seq) {
  if (seq.frames() < 2) {
    throw ShapeError("motion_profile: needs at least 2 frames, got " +
                     std::to_string(seq.frames()));
  }
  std::vector<double> motion(seq.joints(), 0.0);
  for (std::size_t j = 0; j < seq.joints(); ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t + 1 < seq.frames(); ++t) {
      s += norm(sub(joint_at(seq, t + 1, j), joint_at(seq, t, j)));
    }
    motion[j] = s / static_cast<double>(seq.frames() - 1);
  }
  return motion;
}

std::vector<double> spine_distances(const SkeletonSequence& seq, const SkeletonTopology& topo) {
  require_body(seq, topo, "spine_distances");
  std::vector<double> dist(seq.joints(), 0.0);
  for (std::size_t j = 0; j < seq.joints(); ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < seq.frames(); ++t) {
      s += norm(sub(joint_at(seq, t, j), joint_at(seq, t, topo.spine_index)));
    }
    dist[j] = s / static_cast<double>(seq.frames());
  }
  return dist;
}

GaitStatsReport gait_report(const SkeletonSequence& seq, const SkeletonTopology& topo,
                            const AngleOptions& opts) {
  if (topo.left_group.size() != topo.right_group.size()) {
    throw ValidationError("gait_report: mirrored groups differ in size");
  }
  GaitStatsReport r;
  r.per_joint_mean_angle = joint_spine_angles(seq, topo, opts).mean;
  r.mean_motion = motion_profile(seq);
  r.mean_spine_distance = spine_distances(seq, topo);

  double angle_sum = 0.0;
  std::size_t angle_count = 0;
  for (const auto& a : r.per_joint_mean_angle) {
    if (a) {
      angle_sum += *a;
      ++angle_count;
    }
  }
  r.mean_joint_angle =
      angle_count > 0 ? angle_sum / static_cast<double>(angle_count)
                      : std::numeric_limits<double>::quiet_NaN();
  r.overall_motion = mean_of(r.mean_motion);

  double da = 0.0, dm = 0.0, dd = 0.0;
  std::size_t na = 0;
  for (std::size_t p = 0; p < topo.left_group.size(); ++p) {
    PairMetrics m;
    m.left = topo.left_group[p];
    m.right = topo.right_group[p];
    m.left_angle = r.per_joint_mean_angle[m.left];
    m.right_angle = r.per_joint_mean_angle[m.right];
    m.left_motion = r.mean_motion[m.left];
    m.right_motion = r.mean_motion[m.right];
    m.left_distance = r.mean_spine_distance[m.left];
    m.right_distance = r.mean_spine_distance[m.right];
    if (m.left_angle && m.right_angle) {
      da += std::abs(*m.left_angle - *m.right_angle);
      ++na;
    }
    dm += std::abs(m.left_motion - m.right_motion);
    dd += std::abs(m.left_distance - m.right_distance);
    r.pairs.push_back(m);
  }
  const double pairs = static_cast<double>(std::max<std::size_t>(1, r.pairs.size()));
  r.asymmetry.angle = na > 0 ? da / static_cast<double>(na)
                             : std::numeric_limits<double>::quiet_NaN();
  r.asymmetry.motion = dm / pairs;
  r.asymmetry.distance = dd / pairs;
  return r;
}

AsymmetryIndices asymmetry(const SkeletonSequence& seq, const SkeletonTopology& topo,
                           const AngleOptions& opts) {
  return gait_report(seq, topo, opts).asymmetry;
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
  if (values.empty()) throw ValidationError("five_number_summary: no values");
  std::sort(values.begin(), values.end());
  auto q = [&](double p) {
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), q(0.25), q(0.5), q(0.75), values.back()};
}

std::array<double, 5> sample_metrics(const GaitStatsReport& report) {
  return {report.mean_joint_angle, report.overall_motion, report.asymmetry.angle,
          report.asymmetry.motion, report.asymmetry.distance};
}

GroupSummary summarize_group(const std::vector<SkeletonSequence>& group, std::string name,
                             const SkeletonTopology& topo, const AngleOptions& opts) {
  if (group.empty()) throw ValidationError("population_summary: group '" + name + "' is empty");
  std::vector<std::vector<double>> columns(kSummaryMetrics.size());
  for (const auto& seq : group) {
    const auto m = sample_metrics(gait_report(seq, topo, opts));
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (!std::isnan(m[k])) columns[k].push_back(m[k]);
    }
  }
  GroupSummary s;
  s.name = std::move(name);
  s.samples = group.size();
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.metrics.push_back({nan, nan, nan, nan, nan});
    } else {
      s.metrics.push_back(five_number_summary(columns[k]));
    }
  }
  return s;
}

PopulationComparison population_summary(const std::vector<SkeletonSequence>& first,
                                        const std::vector<SkeletonSequence>& second,
                                        std::string first_name, std::string second_name,
                                        const SkeletonTopology& topo, const AngleOptions& opts) {
  PopulationComparison out;
  out.first = summarize_group(first, std::move(first_name), topo, opts);
  out.second = summarize_group(second, std::move(second_name), topo, opts);
  for (std::size_t k = 0; k < kSummaryMetrics.size(); ++k) {
    MetricComparison row;
    row.metric = std::string(kSummaryMetrics[k]);
    row.first_median = out.first.metrics[k].median;
    row.second_median = out.second.metrics[k].median;
    row.first_iqr = out.first.metrics[k].iqr();
    row.second_iqr = out.second.metrics[k].iqr();
    if (row.first_median > row.second_median) {
      row.higher_median = out.first.name;
    } else if (row.second_median > row.first_median) {
      row.higher_median = out.second.name;
    } else {
      row.higher_median = "equal";
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

PopulationComparison population_summary(const Dataset& ds, const AngleOptions& opts) {
  std::vector<SkeletonSequence> td;
  std::vector<SkeletonSequence> asd;
  for (const auto& seq : ds.sequences) {
    if (!seq.label) continue;
    (*seq.label == Label::TD ? td : asd).push_back(seq);
  }
  return population_summary(td, asd, "TD", "ASD", ds.topology, opts);
}

}  // namespace skelgait
