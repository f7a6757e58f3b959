#include "caedge/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace caedge {

const char* to_string(Category cat) {
    switch (cat) {
        case Category::animals: return "animals";
        case Category::landscapes: return "landscapes";
        case Category::objects: return "objects";
        case Category::people: return "people";
    }
    throw std::invalid_argument("to_string: unknown category");
}

Category category_from_string(const std::string& name) {
    if (name == "animals") return Category::animals;
    if (name == "landscapes") return Category::landscapes;
    if (name == "objects") return Category::objects;
    if (name == "people") return Category::people;
    throw std::runtime_error("unknown category: " + name);
}

Category category_from_index(int index) {
    if (index < 0 || index >= kCategoryCount)
        throw std::invalid_argument("category_from_index: out of range");
    return static_cast<Category>(index);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open manifest");
    const fs::path base = fs::path(path).parent_path();

    DatasetManifest manifest;
    std::string line;
    bool header = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (header) {
            header = false;
            if (stripped == "image,annotations,category") continue;
        }
        const auto fields = split(stripped, ',');
        if (fields.size() != 3)
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": expected 3 comma-separated fields");

        ManifestEntry entry;
        const fs::path img = base / trim(fields[0]);
        if (!fs::exists(img))
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": missing image " + img.string());
        entry.image_path = img.string();
        entry.id = img.stem().string();

        for (const auto& ann : split(fields[1], ';')) {
            const std::string name = trim(ann);
            if (name.empty()) continue;
            const fs::path ap = base / name;
            if (!fs::exists(ap))
                throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                         ": missing annotation " + ap.string());
            entry.annotation_paths.push_back(ap.string());
        }
        if (entry.annotation_paths.empty())
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": entry has no annotations");

        entry.category = category_from_string(trim(fields[2]));
        manifest.entries.push_back(std::move(entry));
    }
    if (manifest.entries.empty()) throw std::runtime_error(path + ": manifest is empty");
    return manifest;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    const fs::path base = fs::path(path).parent_path();
    out << "image,annotations,category\n";
    for (const auto& entry : manifest.entries) {
        out << fs::relative(entry.image_path, base).generic_string() << ',';
        for (std::size_t i = 0; i < entry.annotation_paths.size(); ++i) {
            if (i) out << ';';
            out << fs::relative(entry.annotation_paths[i], base).generic_string();
        }
        out << ',' << to_string(entry.category) << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace caedge
