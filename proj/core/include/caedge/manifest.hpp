#pragma once

#include <string>
#include <vector>

namespace caedge {

enum class Category { animals, landscapes, objects, people };

const char* to_string(Category c);
Category category_from_string(const std::string& name);  // throws on unknown names
inline constexpr int kCategoryCount = 4;
Category category_from_index(int i);

struct ManifestEntry {
    std::string id;  // image filename stem, used as the row key in reports
    std::string image_path;
    std::vector<std::string> annotation_paths;
    Category category = Category::animals;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::size_t size() const { return entries.size(); }
};

/// Parses a CSV with header `image,annotations,category`, where `annotations`
/// is a `;`-separated path list. Relative paths are resolved against the
/// manifest's directory. Verifies every referenced file exists, every entry
/// has at least one annotation, and the category is one of the four known
/// names. Throws std::runtime_error with the offending line on failure.
DatasetManifest load_manifest(const std::string& path);

/// Writes the same CSV format. Paths are emitted as given.
void save_manifest(const std::string& path, const DatasetManifest& manifest);

}  // namespace caedge
