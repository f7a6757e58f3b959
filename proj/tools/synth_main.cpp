#include <CLI11.hpp>

#include <iostream>

#include "caedge/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a seeded multi-annotator edge-detection corpus"};

    caedge::SynthConfig config;
    std::string out_dir;
    app.add_option("--out", out_dir, "Output directory")->required();
    app.add_option("--count", config.count, "Number of images")->capture_default_str();
    app.add_option("--width", config.width, "Landscape scene width")->capture_default_str();
    app.add_option("--height", config.height, "Landscape scene height")->capture_default_str();
    app.add_option("--annotators", config.annotators, "Simulated annotators per image")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "Corpus seed")->capture_default_str();
    app.add_option("--portrait-fraction", config.portrait_fraction,
                   "Fraction of images emitted in portrait orientation")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto samples = caedge::generate_corpus(config);
        std::cout << caedge::write_corpus(out_dir, samples) << '\n';
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
