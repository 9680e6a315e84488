#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsdkit/image.hpp"

namespace gsdkit {

inline constexpr int kNumClasses = 2;
inline constexpr const char* kClassNames[kNumClasses] = {"Background", "Trees"};

struct ClassCounts {
    std::uint64_t intersection = 0;
    std::uint64_t pred = 0;
    std::uint64_t gt = 0;

    std::uint64_t union_count() const { return pred + gt - intersection; }
};

// Mergeable per-class counters; merge is componentwise sum, so any partition
// of the image stream yields the same totals.
struct ConfusionAccumulator {
    std::array<ClassCounts, kNumClasses> classes{};
    std::uint64_t pixels = 0;

    void add(const LabelMask& pred, const LabelMask& gt);
    void merge(const ConfusionAccumulator& other);
};

struct EvalPair {
    std::string source;  // dataset the model was trained on
    std::string target;  // dataset it is evaluated on
};

struct ClassIoU {
    bool defined = false;  // union > 0
    std::uint64_t intersection = 0;
    std::uint64_t union_count = 0;
    double percent = 0.0;  // 100 * I / U
};

struct IoUReport {
    EvalPair pair;
    std::array<ClassIoU, kNumClasses> per_class{};
    double macro_percent = 0.0;  // mean over defined classes
    std::uint64_t pixels = 0;
};

IoUReport finalize(const ConfusionAccumulator& acc, EvalPair pair);

// Validates unique (source, target) keys; the matrix is the ordered report
// list consumed by the renderers below.
std::vector<IoUReport> cross_matrix(std::vector<IoUReport> reports);

// csv: "source,target,class,iou" rows; md: one table, classes as rows and
// source->target pairs as columns. Percentages carry exactly two decimals,
// rounded half-up; undefined classes render as "undefined".
std::string render_matrix_csv(const std::vector<IoUReport>& reports);
std::string render_matrix_markdown(const std::vector<IoUReport>& reports);

// Exact half-up formatting of 100*I/U with two decimals (integer arithmetic).
std::string format_percent(std::uint64_t intersection, std::uint64_t union_count);
// Same rounding applied to an already-computed percentage (macro averages).
std::string format_percent(double percent);

}  // namespace gsdkit
