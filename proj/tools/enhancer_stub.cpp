// Minimal enhancer implementing the job-file contract: read the job JSON
// named on the command line, write one PNG per input with the same stem into
// output_dir, exit 0. Used by the test suites in place of real models; the
// nearest mode stands in for a fixed-outscale super-resolution network.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsdkit/error.hpp"
#include "gsdkit/png_io.hpp"
#include "gsdkit/rational.hpp"
#include "gsdkit/resample.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"test enhancer speaking the gsdkit job protocol"};
    std::string mode = "copy";
    std::string skip_substring;
    std::string job_path;
    double sleep_seconds = 0.0;
    app.add_option("--mode", mode, "copy | nearest | fail | sleep");
    app.add_option("--skip-substring", skip_substring,
                   "silently skip inputs whose stem contains this");
    app.add_option("--sleep-seconds", sleep_seconds, "delay before processing (sleep mode)");
    app.add_option("job_file", job_path, "job JSON file")->required();
    CLI11_PARSE(app, argc, argv);

    try {
        if (mode == "fail") {
            std::cerr << "synthetic enhancer failure (requested by test)\n";
            return 3;
        }
        if (mode == "sleep")
            std::this_thread::sleep_for(std::chrono::duration<double>(sleep_seconds));

        std::ifstream in(job_path, std::ios::binary);
        if (!in) {
            std::cerr << "cannot read job file " << job_path << "\n";
            return 2;
        }
        nlohmann::json job;
        in >> job;

        const fs::path output_dir = job.at("output_dir").get<std::string>();
        fs::create_directories(output_dir);
        gsdkit::Rational scale{1};
        if (job.contains("scale")) {
            const auto& js = job.at("scale");
            scale = js.is_string() ? gsdkit::Rational::parse(js.get<std::string>())
                                   : gsdkit::Rational::parse(js.dump());
        }
        if (job.contains("prompt"))
            std::cerr << "prompt: " << job.at("prompt").get<std::string>() << "\n";

        for (const auto& jin : job.at("inputs")) {
            const fs::path input = jin.get<std::string>();
            const std::string stem = input.stem().string();
            if (!skip_substring.empty() && stem.find(skip_substring) != std::string::npos)
                continue;
            const fs::path output = output_dir / (stem + ".png");

            if (mode == "copy" || mode == "sleep") {
                fs::copy_file(input, output, fs::copy_options::overwrite_existing);
                continue;
            }
            if (mode == "nearest") {
                const gsdkit::RasterImage img = gsdkit::png::read_image(input, gsdkit::Rational(1));
                const gsdkit::Rational ow = gsdkit::Rational(img.width) * scale;
                const gsdkit::Rational oh = gsdkit::Rational(img.height) * scale;
                if (!ow.is_integral() || !oh.is_integral()) {
                    std::cerr << "scale " << scale.to_string() << " does not give integer dims for "
                              << input << "\n";
                    return 4;
                }
                gsdkit::png::write_image(
                    output, gsdkit::resize_image(img, static_cast<int>(ow.num),
                                                 static_cast<int>(oh.num),
                                                 gsdkit::FilterKind::NearestNeighbor));
                continue;
            }
            std::cerr << "unknown mode " << mode << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
