#include "gsdkit/eval.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "gsdkit/error.hpp"

namespace gsdkit {
namespace {

std::string two_decimals(std::uint64_t hundredths) {
    std::string out = std::to_string(hundredths / 100);
    const std::uint64_t frac = hundredths % 100;
    out += '.';
    out += static_cast<char>('0' + frac / 10);
    out += static_cast<char>('0' + frac % 10);
    return out;
}

std::string class_cell(const ClassIoU& c) {
    return c.defined ? format_percent(c.intersection, c.union_count) : std::string("undefined");
}

}  // namespace

void ConfusionAccumulator::add(const LabelMask& pred, const LabelMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        fail("GeometryError", "prediction and ground truth dimensions differ");

    const std::size_t n = pred.classes.size();
    std::uint64_t pred1 = 0;
    std::uint64_t gt1 = 0;
    std::uint64_t both1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t p = pred.classes[i];
        const std::uint8_t g = gt.classes[i];
        if (p > 1 || g > 1) fail("InvalidMaskValue", "mask value outside {0, 1}");
        pred1 += p;
        gt1 += g;
        both1 += static_cast<std::uint64_t>(p & g);
    }

    classes[1].pred += pred1;
    classes[1].gt += gt1;
    classes[1].intersection += both1;
    classes[0].pred += n - pred1;
    classes[0].gt += n - gt1;
    classes[0].intersection += n - pred1 - gt1 + both1;
    pixels += n;
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
    for (int c = 0; c < kNumClasses; ++c) {
        classes[c].intersection += other.classes[c].intersection;
        classes[c].pred += other.classes[c].pred;
        classes[c].gt += other.classes[c].gt;
    }
    pixels += other.pixels;
}

IoUReport finalize(const ConfusionAccumulator& acc, EvalPair pair) {
    if (acc.pixels == 0) fail("EmptyEvaluation", "no pixels accumulated");

    IoUReport report;
    report.pair = std::move(pair);
    report.pixels = acc.pixels;

    double sum = 0.0;
    int defined = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const ClassCounts& counts = acc.classes[c];
        ClassIoU& out = report.per_class[c];
        out.intersection = counts.intersection;
        out.union_count = counts.union_count();
        out.defined = out.union_count > 0;
        if (out.defined) {
            out.percent = 100.0 * static_cast<double>(out.intersection) /
                          static_cast<double>(out.union_count);
            sum += out.percent;
            ++defined;
        }
    }
    // A class absent from both prediction and ground truth has no defined IoU
    // and is left out of the macro average.
    report.macro_percent = defined > 0 ? sum / defined : 0.0;
    return report;
}

std::vector<IoUReport> cross_matrix(std::vector<IoUReport> reports) {
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& r : reports) {
        if (!keys.insert({r.pair.source, r.pair.target}).second)
            fail("DuplicateEvaluation", r.pair.source + " -> " + r.pair.target);
    }
    return reports;
}

std::string format_percent(std::uint64_t intersection, std::uint64_t union_count) {
    if (union_count == 0) return "undefined";
    // half-up at two decimals: floor((10000*I + U/2... ) exact in 128 bits
    const unsigned __int128 numer =
        static_cast<unsigned __int128>(intersection) * 20000 + union_count;
    const std::uint64_t hundredths =
        static_cast<std::uint64_t>(numer / (static_cast<unsigned __int128>(union_count) * 2));
    return two_decimals(hundredths);
}

std::string format_percent(double percent) {
    const double scaled = percent * 100.0;
    const std::uint64_t hundredths = static_cast<std::uint64_t>(std::floor(scaled + 0.5));
    return two_decimals(hundredths);
}

std::string render_matrix_csv(const std::vector<IoUReport>& reports) {
    std::ostringstream out;
    out << "source,target,class,iou\n";
    for (const auto& r : reports) {
        for (int c = 0; c < kNumClasses; ++c)
            out << r.pair.source << ',' << r.pair.target << ',' << kClassNames[c] << ','
                << class_cell(r.per_class[c]) << '\n';
        out << r.pair.source << ',' << r.pair.target << ",Average,"
            << format_percent(r.macro_percent) << '\n';
    }
    return out.str();
}

std::string render_matrix_markdown(const std::vector<IoUReport>& reports) {
    std::ostringstream out;
    out << "| Class |";
    for (const auto& r : reports) out << ' ' << r.pair.source << " -> " << r.pair.target << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < reports.size(); ++i) out << "---|";
    out << '\n';
    for (int c = 0; c < kNumClasses; ++c) {
        out << "| " << kClassNames[c] << " |";
        for (const auto& r : reports) out << ' ' << class_cell(r.per_class[c]) << " |";
        out << '\n';
    }
    out << "| Average |";
    for (const auto& r : reports) out << ' ' << format_percent(r.macro_percent) << " |";
    out << '\n';
    return out.str();
}

}  // namespace gsdkit
