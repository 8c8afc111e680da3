#include "patmine/corpus.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "patmine/errors.hpp"

namespace patmine {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IngestError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool glob_match(const std::string& pattern, const std::string& text) {
    return ::fnmatch(pattern.c_str(), text.c_str(), 0) == 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

const SourceFile* CorpusManifest::find(const FileKey& key) const {
    auto it = std::lower_bound(files.begin(), files.end(), key,
                               [](const SourceFile& f, const FileKey& k) { return f.key() < k; });
    if (it != files.end() && it->key() == key) return &*it;
    return nullptr;
}

std::optional<std::string> exclusion_reason(const std::string& root_relative_path,
                                            const FilterRules& filters) {
    const auto slash = root_relative_path.rfind('/');
    const std::string name =
        slash == std::string::npos ? root_relative_path : root_relative_path.substr(slash + 1);
    if (filters.exclude_tests) {
        if (glob_match("*Test.java", name) || glob_match("Test*.java", name)) {
            return "test-file rule";
        }
        const std::string padded = "/" + root_relative_path;
        if (padded.find("/src/test/") != std::string::npos) return "test-directory rule";
    }
    for (const auto& glob : filters.exclude_globs) {
        if (glob_match(glob, root_relative_path)) return "exclude glob '" + glob + "'";
    }
    return std::nullopt;
}

CorpusManifest ingest_corpus(const fs::path& root, const FilterRules& filters) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IngestError("corpus root is not a readable directory: " + root.string());
    }
    const std::string root_name = fs::weakly_canonical(root).filename().string();

    std::vector<std::string> found;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw IngestError("cannot scan " + root.string() + ": " + ec.message());
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".java") continue;
        found.push_back(entry.path().lexically_relative(root).generic_string());
    }
    std::sort(found.begin(), found.end());

    CorpusManifest manifest;
    std::set<FileKey> seen;
    for (const auto& rel : found) {
        if (auto reason = exclusion_reason(rel, filters)) {
            manifest.excluded.push_back({rel, *reason});
            continue;
        }
        SourceFile file;
        if (filters.project_id) {
            file.project_id = *filters.project_id;
            file.relative_path = rel;
        } else if (const auto slash = rel.find('/'); slash == std::string::npos) {
            file.project_id = root_name;
            file.relative_path = rel;
        } else {
            file.project_id = rel.substr(0, slash);
            file.relative_path = rel.substr(slash + 1);
        }
        if (!seen.insert(file.key()).second) {
            throw DuplicatePathError("duplicate corpus path " + file.key().str());
        }
        file.content = read_text(root / rel);
        manifest.files.push_back(std::move(file));
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.key() < b.key(); });

    if (manifest.files.empty()) {
        manifest.warnings.push_back("no Java files found under " + root.string());
        spdlog::warn("{}", manifest.warnings.back());
    }
    return manifest;
}

std::vector<LabelledInstance> parse_labels_csv(const std::string& text,
                                               const CorpusManifest& manifest) {
    std::istringstream in(text);
    std::string line;
    std::vector<LabelledInstance> out;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() == 4 && fields[0] == "project_id" && fields[1] == "path") continue;
            throw Error("labels CSV must start with header 'project_id,path,class_name,label'");
        }
        if (fields.size() != 4) {
            throw Error("labels CSV row " + std::to_string(row) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
        }
        const auto label = parse_label(fields[3]);
        if (!label) {
            throw UnknownLabelError("labels CSV row " + std::to_string(row) + ": unknown label '" +
                                    fields[3] + "'");
        }
        if (fields[2].empty()) {
            throw Error("labels CSV row " + std::to_string(row) + ": empty class_name");
        }
        FileKey key{fields[0], fields[1]};
        if (!manifest.find(key)) {
            throw MissingFileError("labels CSV row " + std::to_string(row) +
                                   ": file not in manifest: " + key.str());
        }
        out.push_back({std::move(key), fields[2], *label});
    }
    return out;
}

std::vector<LabelledInstance> load_labels(const fs::path& label_file,
                                          const CorpusManifest& manifest) {
    std::error_code ec;
    if (!fs::is_regular_file(label_file, ec)) {
        throw LabelsNotFound("labels file not found: " + label_file.string());
    }
    return parse_labels_csv(read_text(label_file), manifest);
}

std::string labels_to_csv(const std::vector<LabelledInstance>& labels) {
    std::string out = "project_id,path,class_name,label\n";
    for (const auto& l : labels) {
        out += csv_field(l.file.project_id) + "," + csv_field(l.file.path) + "," +
               csv_field(l.class_name) + "," + std::string(to_string(l.label)) + "\n";
    }
    return out;
}

std::string manifest_to_json(const CorpusManifest& manifest) {
    auto list = nlohmann::json::array();
    for (const auto& f : manifest.files) {
        list.push_back({{"project_id", f.project_id}, {"path", f.relative_path}});
    }
    return list.dump(2) + "\n";
}

CorpusManifest manifest_from_json(const std::string& json, const fs::path& root) {
    nlohmann::json list;
    try {
        list = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(std::string("malformed manifest JSON: ") + e.what());
    }
    if (!list.is_array()) throw IngestError("manifest JSON must be a list");
    CorpusManifest manifest;
    std::set<FileKey> seen;
    for (const auto& entry : list) {
        SourceFile file;
        file.project_id = entry.at("project_id").get<std::string>();
        file.relative_path = entry.at("path").get<std::string>();
        if (!seen.insert(file.key()).second) {
            throw DuplicatePathError("duplicate manifest entry " + file.key().str());
        }
        fs::path location = root / file.project_id / file.relative_path;
        if (!fs::exists(location)) location = root / file.relative_path;
        file.content = read_text(location);
        manifest.files.push_back(std::move(file));
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.key() < b.key(); });
    return manifest;
}

void write_corpus(const CorpusManifest& manifest, const fs::path& root) {
    for (const auto& f : manifest.files) {
        const fs::path target = root / f.project_id / f.relative_path;
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        if (!out) throw IngestError("cannot write " + target.string());
        out << f.content;
    }
}

}  // namespace patmine
