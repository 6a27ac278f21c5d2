#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "skelgait/skeleton.hpp"

namespace skelgait {

/// Which axis the joint angles are measured against.
enum class AngleReference {
  /// A fixed world axis (default +z, "up" for aligned or gait data).
  vertical,
  /// The instantaneous spine -> neck segment of each frame.
  spine_axis,
};

/// Angle between the spine -> joint vector and the reference axis.
enum class AngleConvention {
  /// Angle between the two lines, in [0, 90]. A limb hanging straight down reads 0.
  line,
  /// Angle between the two rays, in [0, 180].
  ray,
};

struct AngleOptions {
  AngleReference reference = AngleReference::vertical;
  AngleConvention convention = AngleConvention::line;
  std::array<double, 3> vertical = {0.0, 0.0, 1.0};
  /// Vectors shorter than this are treated as degenerate.
  double epsilon = 1e-9;
};

struct JointAngles {
  /// angles[t][j] in degrees; empty when the frame/joint pair was skipped.
  std::vector<std::vector<std::optional<double>>> per_frame;
  /// Mean over the measured frames; empty for the spine joint and for joints never measured.
  std::vector<std::optional<double>> mean;
};

JointAngles joint_spine_angles(const SkeletonSequence& seq,
                               const SkeletonTopology& topo = default_topology(),
                               const AngleOptions& opts = {});

/// Mean frame-to-frame displacement per joint (units per frame). Needs T >= 2.
std::vector<double> motion_profile(const SkeletonSequence& seq);

/// Mean distance of each joint to the spine joint of the same frame.
std::vector<double> spine_distances(const SkeletonSequence& seq,
                                    const SkeletonTopology& topo = default_topology());

struct PairMetrics {
  std::size_t left = 0;
  std::size_t right = 0;
  std::optional<double> left_angle;
  std::optional<double> right_angle;
  double left_motion = 0.0;
  double right_motion = 0.0;
  double left_distance = 0.0;
  double right_distance = 0.0;
};

struct AsymmetryIndices {
  /// Mean |left - right| over the mirrored pairs; the angle index skips unmeasured pairs
  /// and is NaN when none can be measured.
  double angle = 0.0;
  double motion = 0.0;
  double distance = 0.0;
};

struct GaitStatsReport {
  std::vector<std::optional<double>> per_joint_mean_angle;
  std::vector<double> mean_motion;
  std::vector<double> mean_spine_distance;
  std::vector<PairMetrics> pairs;
  AsymmetryIndices asymmetry;
  /// Mean of the per-joint mean angles over measured joints.
  double mean_joint_angle = 0.0;
  /// Mean of the per-joint mean motions.
  double overall_motion = 0.0;
};

GaitStatsReport gait_report(const SkeletonSequence& seq,
                            const SkeletonTopology& topo = default_topology(),
                            const AngleOptions& opts = {});

AsymmetryIndices asymmetry(const SkeletonSequence& seq,
                           const SkeletonTopology& topo = default_topology(),
                           const AngleOptions& opts = {});

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  double iqr() const noexcept { return q3 - q1; }
  friend bool operator==(const FiveNumberSummary&, const FiveNumberSummary&) = default;
};

/// Linear-interpolation quantiles (R type 7). Throws ValidationError on empty input.
FiveNumberSummary five_number_summary(std::vector<double> values);

/// Per-sample scalar metrics summarized over a group.
inline constexpr std::array<std::string_view, 5> kSummaryMetrics = {
    "mean_joint_angle", "mean_motion", "angle_asymmetry", "motion_asymmetry",
    "distance_asymmetry"};

struct GroupSummary {
  std::string name;
  std::size_t samples = 0;
  /// Indexed like kSummaryMetrics.
  std::vector<FiveNumberSummary> metrics;
};

struct MetricComparison {
  std::string metric;
  double first_median = 0.0;
  double second_median = 0.0;
  /// Name of the group with the higher median, or "equal".
  std::string higher_median;
  double first_iqr = 0.0;
  double second_iqr = 0.0;
};

struct PopulationComparison {
  GroupSummary first;
  GroupSummary second;
  std::vector<MetricComparison> rows;
};

/// Scalar metric values of one sequence, indexed like kSummaryMetrics.
std::array<double, 5> sample_metrics(const GaitStatsReport& report);

GroupSummary summarize_group(const std::vector<SkeletonSequence>& group, std::string name,
                             const SkeletonTopology& topo = default_topology(),
                             const AngleOptions& opts = {});

/// Throws ValidationError if either group is empty.
PopulationComparison population_summary(const std::vector<SkeletonSequence>& first,
                                        const std::vector<SkeletonSequence>& second,
                                        std::string first_name, std::string second_name,
                                        const SkeletonTopology& topo = default_topology(),
                                        const AngleOptions& opts = {});

/// Splits a labeled dataset into its TD and ASD records and compares them (TD first).
PopulationComparison population_summary(const Dataset& ds, const AngleOptions& opts = {});

}  // namespace skelgait
